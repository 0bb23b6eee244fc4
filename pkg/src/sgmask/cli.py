"""Command-line interface.

Subcommands: segment, cut, mean, mix, batch, stats, gallery. Exit codes:
0 success, 1 usage (bad flags, bad config file), 2 data errors (decode
or file I/O), 3 constraint violations (parameter domains, dimension
mismatches, undersized mix partners).

``--config FILE`` reads flat ``key=value`` lines mirroring flag names;
explicit flags override the file. ``SGM_SEED`` supplies the global seed
when neither a flag nor a config entry sets one.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .core import AugmentConfig, masked_ratio, pixel_mask, select_superpixels
from .errors import (
    DecodeError,
    DimensionMismatchError,
    ParameterError,
    SgmaskError,
    SizeConstraintError,
)

_USAGE_EXIT = 1
_DATA_EXIT = 2
_CONSTRAINT_EXIT = 3


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the CLI contract wants 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(_USAGE_EXIT, f"{self.prog}: error: {message}\n")


def _add_selection_flags(p: argparse.ArgumentParser, ratio=True):
    p.add_argument("--superpixels", "-q", type=int, default=200,
                   help="requested superpixel count (default 200)")
    if ratio:
        p.add_argument("--ratio", "-r", type=float, default=0.4,
                       help="target fraction of processed superpixels (default 0.4)")
        p.add_argument("--seed", "-s", type=int, default=None,
                       help="selection seed (default: SGM_SEED or 0)")
    p.add_argument("--compactness", type=float, default=10.0,
                   help="SLIC spatial-vs-color weight (default 10)")
    p.add_argument("--iterations", type=int, default=10,
                   help="SLIC k-means rounds (default 10)")
    p.add_argument("--config", type=str, default=None, metavar="FILE",
                   help="key=value defaults file; flags override it")


def build_parser():
    parser = _Parser(prog="sgm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True
    commands = {}

    p = sub.add_parser("segment", help="write a superpixel label map")
    p.add_argument("input")
    _add_selection_flags(p, ratio=False)
    p.add_argument("--out", required=True,
                   help="label map path (.png for 16-bit PNG, anything else raw u32)")
    p.set_defaults(func=_cmd_segment)
    commands["segment"] = p

    for op in ("cut", "mean"):
        p = sub.add_parser(op, help=f"apply the {op} operator to one image")
        p.add_argument("input")
        _add_selection_flags(p)
        p.add_argument("--out", required=True)
        p.set_defaults(func=_cmd_single, operator=op)
        commands[op] = p

    p = sub.add_parser("mix", help="fuse two same-class images")
    p.add_argument("input")
    p.add_argument("partner")
    _add_selection_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_single, operator="mix")
    commands["mix"] = p

    p = sub.add_parser("batch", help="augment a dataset tree with a manifest")
    p.add_argument("root", help="dataset root (root/<class>/<image>) or index file")
    p.add_argument("--op", required=True, choices=("cut", "mean", "mix"))
    _add_selection_flags(p)
    p.add_argument("--workers", "-w", type=int, default=1)
    p.add_argument("--out", required=True)
    p.add_argument("--include-originals", action="store_true",
                   help="copy sources into the output tree (dataset doubling)")
    p.set_defaults(func=_cmd_batch)
    commands["batch"] = p

    p = sub.add_parser("stats", help="report k, selection and dispersion figures")
    p.add_argument("path", help="label map file or batch output directory")
    p.add_argument("--ratio", "-r", type=float, default=None)
    p.add_argument("--seed", "-s", type=int, default=None)
    p.set_defaults(func=_cmd_stats)
    commands["stats"] = p

    p = sub.add_parser("gallery", help="render a comparison strip for one image (pair)")
    p.add_argument("input")
    p.add_argument("partner", nargs="?", default=None)
    _add_selection_flags(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_gallery)
    commands["gallery"] = p

    return parser, commands


_CONFIG_COERCE = {
    "superpixels": int,
    "ratio": float,
    "seed": int,
    "compactness": float,
    "iterations": int,
    "workers": int,
    "op": str,
    "out": str,
    "include_originals": lambda v: v.lower() in ("1", "true", "yes", "on"),
}


def _extract_config_path(argv):
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if tok.startswith("--config="):
            return tok.split("=", 1)[1]
    return None


def _load_config(path: str) -> dict:
    values = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        key, value = line.split("=", 1)
        key = key.strip().replace("-", "_")
        if key not in _CONFIG_COERCE:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = _CONFIG_COERCE[key](value.strip())
    return values


def _resolve_seed(ns) -> int:
    if getattr(ns, "seed", None) is not None:
        return ns.seed
    env = os.environ.get("SGM_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ParameterError(f"SGM_SEED must be an integer, got {env!r}") from exc
    return 0


def _make_config(ns) -> AugmentConfig:
    return AugmentConfig(
        seed=_resolve_seed(ns),
        superpixels=ns.superpixels,
        ratio=getattr(ns, "ratio", 0.0) if getattr(ns, "ratio", None) is not None else 0.0,
        compactness=ns.compactness,
        iterations=ns.iterations,
    )


def _cmd_segment(ns) -> int:
    from .imageio import load_image, save_label_map
    from .slic import SlicParams, slic_segment

    image = load_image(ns.input)
    params = SlicParams(
        superpixels=ns.superpixels,
        compactness=ns.compactness,
        iterations=ns.iterations,
    )
    grid = slic_segment(image, params)
    save_label_map(grid, ns.out, params)
    print(f"wrote {ns.out} (k={grid.superpixel_count})")
    return 0


def _cmd_single(ns) -> int:
    from .augment import augment_one
    from .imageio import load_image, save_image

    config = _make_config(ns)
    image = load_image(ns.input)
    partner = load_image(ns.partner) if ns.operator == "mix" else None
    partner_id = str(ns.partner) if ns.operator == "mix" else None
    outcome = augment_one(image, ns.operator, config, partner, partner_id)
    out = Path(ns.out)
    if out.parent and not out.parent.exists():
        out.parent.mkdir(parents=True, exist_ok=True)
    save_image(outcome.image, out)
    print(f"wrote {ns.out} (k={outcome.grid.superpixel_count}, "
          f"k_selected={outcome.selection.selected_count})")
    return 0


def _cmd_batch(ns) -> int:
    from .pipeline import batch_augment, read_index_file, scan_dataset

    config = _make_config(ns)
    root = Path(ns.root)
    index = read_index_file(root) if root.is_file() else scan_dataset(root)
    result = batch_augment(
        index,
        ns.op,
        config,
        ns.out,
        workers=ns.workers,
        include_originals=ns.include_originals,
        log=lambda msg: print(msg),
    )
    print(f"manifest {result.manifest_path} "
          f"({len(result.records)} records, {len(result.errors)} errors)")
    return 0


def _cmd_stats(ns) -> int:
    path = Path(ns.path)
    if path.is_dir():
        return _manifest_stats(path)
    from .imageio import load_label_map
    from .slic import relative_size_dispersion

    grid = load_label_map(path)
    rows = [
        ("k", grid.superpixel_count),
        ("size_dispersion", f"{relative_size_dispersion(grid):.6f}"),
    ]
    if ns.ratio is not None:
        seed = _resolve_seed(ns)
        selection = select_superpixels(grid, ns.ratio, seed)
        rows += [
            ("k_selected", selection.selected_count),
            ("masked_ratio", f"{masked_ratio(pixel_mask(grid, selection)):.6f}"),
            ("ratio", ns.ratio),
            ("seed", seed),
        ]
    for key, value in rows:
        print(f"{key}\t{value}")
    return 0


def _manifest_stats(path: Path) -> int:
    from .pipeline import MANIFEST_NAME, ManifestRecord

    manifest = path / MANIFEST_NAME
    if not manifest.exists():
        raise DecodeError(f"{manifest}: no manifest found")
    print("output\toperator\tk\tk_selected\tmasked_ratio")
    import json

    for line in manifest.read_text().splitlines():
        obj = json.loads(line)
        if "error" in obj:
            continue
        rec = ManifestRecord.from_json(line)
        print(f"{rec.output}\t{rec.operator}\t{rec.superpixel_count}"
              f"\t{rec.selected_count}\t{rec.masked_ratio}")
    return 0


def _cmd_gallery(ns) -> int:
    from .imageio import load_image
    from .report import render_gallery

    config = _make_config(ns)
    image = load_image(ns.input)
    partner = load_image(ns.partner) if ns.partner else None
    written = render_gallery(image, partner, config, ns.out)
    for name, p in written.items():
        print(f"wrote {p} ({name})")
    return 0


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, commands = build_parser()
    config_path = _extract_config_path(argv)
    if config_path is not None and argv and argv[0] in commands:
        try:
            defaults = _load_config(config_path)
        except (OSError, ValueError) as exc:
            print(f"sgm: bad config file: {exc}", file=sys.stderr)
            return _USAGE_EXIT
        known = {
            k: v for k, v in defaults.items()
            if any(a.dest == k for a in commands[argv[0]]._actions)
        }
        commands[argv[0]].set_defaults(**known)
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else _USAGE_EXIT
    try:
        return ns.func(ns)
    except DecodeError as exc:
        print(f"sgm: {exc}", file=sys.stderr)
        return _DATA_EXIT
    except (ParameterError, DimensionMismatchError, SizeConstraintError) as exc:
        print(f"sgm: {exc}", file=sys.stderr)
        return _CONSTRAINT_EXIT
    except SgmaskError as exc:
        print(f"sgm: {exc}", file=sys.stderr)
        return _CONSTRAINT_EXIT
    except OSError as exc:
        print(f"sgm: {exc}", file=sys.stderr)
        return _DATA_EXIT


if __name__ == "__main__":
    sys.exit(main())
