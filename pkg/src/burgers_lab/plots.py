"""SVG line plots with reproducible output.

matplotlib is imported lazily so library users who never plot do not pay for
it.  Unless stamping is requested, the SVG date metadata is stripped and the
hash salt pinned, making reruns byte-stable.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import numpy as np


def _pyplot():
    import matplotlib

    matplotlib.use("Agg", force=False)
    matplotlib.rcParams["svg.hashsalt"] = "burgers-lab"
    import matplotlib.pyplot as plt

    return plt


def save_line_plot(
    path: str | Path,
    x: Sequence[float],
    series: Mapping[str, Sequence[float]],
    xlabel: str,
    ylabel: str,
    title: str = "",
    logy: bool = False,
    stamp: bool = False,
) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for label, ys in series.items():
        ys = np.asarray(ys, dtype=float)
        if logy:
            ax.semilogy(x, np.maximum(ys, 1e-300), label=label)
        else:
            ax.plot(x, ys, label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    if len(series) > 1:
        ax.legend(loc="best")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    metadata = None if stamp else {"Date": None}
    fig.savefig(path, format="svg", metadata=metadata)
    plt.close(fig)
