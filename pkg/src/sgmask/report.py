"""Gallery rendering: side-by-side comparison strips for one image pair.

Writes the individual augmented PNGs (deterministic bytes) next to a
matplotlib strip figure. The strip is a visual report, not a
byte-determinism artifact.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Union

from .augment import augment_one
from .core import AugmentConfig, Image
from .imageio import save_image


def render_gallery(
    image: Image,
    partner: Optional[Image],
    config: AugmentConfig,
    out_dir: Union[str, Path],
) -> dict[str, Path]:
    """Apply cut/mean (and mix, when a partner is given) and render the strip."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    panels: list[tuple[str, Image]] = [("original", image)]
    panels.append(("cut", augment_one(image, "cut", config).image))
    panels.append(("mean", augment_one(image, "mean", config).image))
    if partner is not None:
        panels.append(("partner", partner))
        panels.append(
            ("mix", augment_one(image, "mix", config, partner, "partner").image)
        )

    written: dict[str, Path] = {}
    for name, img in panels:
        path = out / f"{name}.png"
        save_image(img, path)
        written[name] = path

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(1, len(panels), figsize=(3 * len(panels), 3.4))
    if len(panels) == 1:
        axes = [axes]
    for ax, (name, img) in zip(axes, panels):
        arr = img.data[:, :, 0] if img.channels == 1 else img.data
        ax.imshow(arr, cmap="gray" if img.channels == 1 else None, vmin=0, vmax=255)
        ax.set_title(name)
        ax.set_axis_off()
    fig.suptitle(
        f"q={config.superpixels}  r={config.ratio}  seed={config.seed}", fontsize=10
    )
    fig.tight_layout()
    strip = out / "strip.png"
    fig.savefig(strip, dpi=110)
    plt.close(fig)
    written["strip"] = strip
    return written
