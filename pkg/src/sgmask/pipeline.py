"""Dataset-level batch augmentation with a provenance manifest.

A dataset is a directory tree ``root/<class>/<image>`` or an explicit
index file (one ``path<TAB>class`` line per image). Every source gets a
per-image seed derived from the run's global seed, its canonical path
and the operator, so a batch is reproducible file-by-file: re-running
any manifest record's config through the single-image CLI recreates the
output bytes.

Cut and mean emit one augmented image per source. Mix pairs each image
with the nearest subsequent same-class image at least as large in both
dimensions, skipping (and reporting) images with no eligible partner.

The manifest is newline-delimited JSON at ``<out>/manifest.jsonl``. Ok
lines carry: output, operator, sources, class, config {t, s, q, r,
compactness, iterations}, k, k_selected, masked_ratio. Error lines
carry: error, sources, class. Line order and file bytes are independent
of the worker count.
"""

from __future__ import annotations

import hashlib
import json
import shutil
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from multiprocessing import get_context
from pathlib import Path
from typing import NamedTuple, Optional, Union

from .augment import OPERATORS, augment_one
from .core import AugmentConfig, masked_ratio, pixel_mask
from .errors import ParameterError, SgmaskError
from .imageio import load_image, probe_size, save_image

MANIFEST_NAME = "manifest.jsonl"

_IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg")


@dataclass(frozen=True)
class IndexEntry:
    path: str  # canonical id: posix-style, relative to the index root
    label: str
    width: int
    height: int


@dataclass(frozen=True)
class DatasetIndex:
    root: Path
    entries: tuple[IndexEntry, ...]
    scan_errors: tuple[tuple[str, str], ...] = ()  # (path, message)

    def __post_init__(self):
        paths = [e.path for e in self.entries]
        if len(set(paths)) != len(paths):
            raise ParameterError("dataset index contains duplicate paths")
        for e in self.entries:
            if e.width < 1 or e.height < 1:
                raise ParameterError(f"{e.path}: non-positive dimensions")

    def resolve(self, entry_path: str) -> Path:
        return self.root / entry_path


def scan_dataset(root: Union[str, Path]) -> DatasetIndex:
    """Index a ``root/<class>/<image>`` tree in sorted order."""
    root = Path(root)
    if not root.is_dir():
        raise ParameterError(f"{root}: not a directory")
    entries = []
    errors = []
    for class_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        for img in sorted(class_dir.iterdir()):
            if img.suffix.lower() not in _IMAGE_SUFFIXES or not img.is_file():
                continue
            rel = img.relative_to(root).as_posix()
            try:
                w, h = probe_size(img)
            except SgmaskError as exc:
                errors.append((rel, str(exc)))
                continue
            entries.append(IndexEntry(rel, class_dir.name, w, h))
    return DatasetIndex(root, tuple(entries), tuple(errors))


def read_index_file(path: Union[str, Path]) -> DatasetIndex:
    """Read an explicit ``path<TAB>class`` index; paths resolve against its directory."""
    path = Path(path)
    root = path.parent
    entries = []
    errors = []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "\t" not in line:
            raise ParameterError(f"{path}:{lineno}: expected 'path<TAB>class'")
        rel, label = line.split("\t", 1)
        try:
            w, h = probe_size(root / rel)
        except SgmaskError as exc:
            errors.append((rel, str(exc)))
            continue
        entries.append(IndexEntry(Path(rel).as_posix(), label.strip(), w, h))
    return DatasetIndex(root, tuple(entries), tuple(errors))


class AugmentationCount(NamedTuple):
    total: int
    augmented: int


def augmentation_count(n: int) -> AugmentationCount:
    """Dataset size after one-to-one doubling plus all N*(N-1) mixes: N**2."""
    if n < 0:
        raise ParameterError("dataset size must be non-negative")
    return AugmentationCount(n * n, n * n - n)


def pair_consecutive(
    index: DatasetIndex,
) -> tuple[list[tuple[IndexEntry, IndexEntry]], list[IndexEntry]]:
    """Pair each image with the nearest subsequent same-class image that covers it.

    A partner must satisfy width >= and height >= of the paired image.
    Returns (pairs, skipped) where skipped lists images with no eligible
    partner.
    """
    pairs = []
    skipped = []
    for i, entry in enumerate(index.entries):
        partner = None
        for other in index.entries[i + 1 :]:
            if other.label != entry.label:
                continue
            if other.width >= entry.width and other.height >= entry.height:
                partner = other
                break
        if partner is None:
            skipped.append(entry)
        else:
            pairs.append((entry, partner))
    return pairs, skipped


def derive_seed(global_seed: int, source_id: str, operator: str) -> int:
    """Mix a global seed, a canonical source path and an operator tag into 64 bits.

    blake2b(digest_size=8) over ``LE64(global_seed) || utf8(source_id) ||
    0x1F || utf8(operator)``, read back little-endian. Stable across
    platforms and releases.
    """
    h = hashlib.blake2b(digest_size=8)
    h.update(struct.pack("<Q", global_seed & 0xFFFFFFFFFFFFFFFF))
    h.update(source_id.encode("utf-8"))
    h.update(b"\x1f")
    h.update(operator.encode("utf-8"))
    return int.from_bytes(h.digest(), "little")


@dataclass(frozen=True)
class ManifestRecord:
    output: str
    operator: str
    sources: tuple[str, ...]
    label: str
    config: Optional[dict]
    superpixel_count: Optional[int]
    selected_count: Optional[int]
    masked_ratio: Optional[float]

    def to_json(self) -> str:
        return json.dumps(
            {
                "output": self.output,
                "operator": self.operator,
                "sources": list(self.sources),
                "class": self.label,
                "config": self.config,
                "k": self.superpixel_count,
                "k_selected": self.selected_count,
                "masked_ratio": self.masked_ratio,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, line: str) -> "ManifestRecord":
        obj = json.loads(line)
        return cls(
            output=obj["output"],
            operator=obj["operator"],
            sources=tuple(obj["sources"]),
            label=obj["class"],
            config=obj["config"],
            superpixel_count=obj["k"],
            selected_count=obj["k_selected"],
            masked_ratio=obj["masked_ratio"],
        )


@dataclass(frozen=True)
class BatchResult:
    manifest_path: Path
    records: tuple[ManifestRecord, ...]
    errors: tuple[dict, ...]


@dataclass(frozen=True)
class _Task:
    kind: str  # "augment" | "original"
    operator: str
    out_rel: str
    sources: tuple[str, ...]
    label: str
    seed: int
    config: AugmentConfig


def _unique_name(base: str, used: set) -> str:
    name = base
    n = 2
    while name in used:
        stem, dot, ext = base.rpartition(".")
        name = f"{stem}__{n}.{ext}" if dot else f"{base}__{n}"
        n += 1
    used.add(name)
    return name


def _build_tasks(
    index: DatasetIndex,
    operator: str,
    config: AugmentConfig,
    include_originals: bool,
) -> tuple[list[_Task], list[IndexEntry]]:
    tasks = []
    used: set = set()
    skipped: list[IndexEntry] = []
    if include_originals:
        for e in index.entries:
            rel = _unique_name(f"{e.label}/{Path(e.path).name}", used)
            tasks.append(_Task("original", "original", rel, (e.path,), e.label, 0, config))
    if operator in ("cut", "mean"):
        for e in index.entries:
            seed = derive_seed(config.seed, e.path, operator)
            rel = _unique_name(f"{e.label}/{Path(e.path).stem}__{operator}.png", used)
            tasks.append(_Task("augment", operator, rel, (e.path,), e.label, seed, config))
    else:
        pairs, skipped = pair_consecutive(index)
        for a, b in pairs:
            seed = derive_seed(config.seed, a.path, operator)
            rel = _unique_name(
                f"{a.label}/{Path(a.path).stem}__mix__{Path(b.path).stem}.png", used
            )
            tasks.append(_Task("augment", "mix", rel, (a.path, b.path), a.label, seed, config))
    return tasks, skipped


def _run_task(args: tuple) -> tuple:
    root_str, out_str, task = args
    root = Path(root_str)
    out_path = Path(out_str) / task.out_rel
    out_path.parent.mkdir(parents=True, exist_ok=True)
    try:
        if task.kind == "original":
            shutil.copyfile(root / task.sources[0], out_path)
            record = ManifestRecord(
                output=task.out_rel,
                operator="original",
                sources=task.sources,
                label=task.label,
                config=None,
                superpixel_count=None,
                selected_count=None,
                masked_ratio=None,
            )
            return ("ok", record)
        image = load_image(root / task.sources[0])
        partner = None
        partner_id = None
        if task.operator == "mix":
            partner_id = task.sources[1]
            partner = load_image(root / partner_id)
        cfg = AugmentConfig(
            seed=task.seed,
            superpixels=task.config.superpixels,
            ratio=task.config.ratio,
            grid_type=task.config.grid_type,
            compactness=task.config.compactness,
            iterations=task.config.iterations,
        )
        outcome = augment_one(image, task.operator, cfg, partner, partner_id)
        save_image(outcome.image, out_path)
        record = ManifestRecord(
            output=task.out_rel,
            operator=task.operator,
            sources=task.sources,
            label=task.label,
            config={
                "t": cfg.grid_type,
                "s": cfg.seed,
                "q": cfg.superpixels,
                "r": cfg.ratio,
                "compactness": cfg.compactness,
                "iterations": cfg.iterations,
            },
            superpixel_count=outcome.grid.superpixel_count,
            selected_count=outcome.selection.selected_count,
            masked_ratio=masked_ratio(pixel_mask(outcome.grid, outcome.selection)),
        )
        return ("ok", record)
    except SgmaskError as exc:
        return ("err", {"error": str(exc), "sources": list(task.sources), "class": task.label})


def batch_augment(
    index: DatasetIndex,
    operator: str,
    config: AugmentConfig,
    output_dir: Union[str, Path],
    workers: int = 1,
    include_originals: bool = False,
    log=None,
) -> BatchResult:
    """Augment a whole dataset and write outputs plus a manifest.

    Output bytes and the manifest are identical for any ``workers``
    value. Per-file decode failures become manifest error lines; an
    unwritable output directory is fatal.
    """
    if operator not in OPERATORS:
        raise ParameterError(f"unknown operator {operator!r}")
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    tasks, _ = _build_tasks(index, operator, config, include_originals)
    args = [(str(index.root), str(out), t) for t in tasks]
    results = []
    if workers <= 1:
        for a in args:
            results.append(_run_task(a))
            _log_result(log, results[-1])
    else:
        with ProcessPoolExecutor(
            max_workers=workers, mp_context=get_context("fork")
        ) as pool:
            for res in pool.map(_run_task, args):
                results.append(res)
                _log_result(log, res)

    records = sorted(
        (r for kind, r in results if kind == "ok"), key=lambda r: r.output
    )
    errors = [r for kind, r in results if kind == "err"]
    errors += [
        {"error": msg, "sources": [path], "class": ""} for path, msg in index.scan_errors
    ]
    errors.sort(key=lambda e: e["sources"])
    manifest_path = out / MANIFEST_NAME
    with open(manifest_path, "w") as fh:
        for rec in records:
            fh.write(rec.to_json() + "\n")
        for err in errors:
            fh.write(json.dumps(err, sort_keys=True) + "\n")
    return BatchResult(manifest_path, tuple(records), tuple(errors))


def _log_result(log, result: tuple) -> None:
    if log is None:
        return
    kind, payload = result
    if kind == "ok":
        log(f"wrote {payload.output}")
    else:
        log(f"error {payload['sources'][0]}: {payload['error']}")
