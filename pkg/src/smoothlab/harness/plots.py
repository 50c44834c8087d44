"""Static SVG figures for sweep results."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

# Fixed salt and no date so that identical data give identical files.
_RC = {"svg.hashsalt": "smoothlab", "svg.fonttype": "none"}


def plot_sweep(path, cells, flags, zeta_list, beta_grid):
    """One panel per beta: Delta_{alpha,beta} - Delta_{0,beta} against alpha, one line per zeta.

    ``cells`` maps (zeta, alpha, beta) to a dict with ``diff``; ``flags`` maps
    (zeta, beta) to ``"dashed"`` or ``"solid"``.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    n = len(beta_grid)
    ncols = min(3, n)
    nrows = -(-n // ncols)
    with plt.rc_context(_RC):
        fig, axes = plt.subplots(nrows, ncols, figsize=(4 * ncols, 3.2 * nrows), squeeze=False, sharey=True)
        colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]
        for i, beta in enumerate(beta_grid):
            ax = axes[i // ncols][i % ncols]
            for zi, zeta in enumerate(zeta_list):
                pts = sorted((a, c["diff"]) for (z, a, b), c in cells.items() if z == zeta and b == beta)
                if not pts:
                    continue
                style = "--" if flags.get((zeta, beta)) == "dashed" else "-"
                ax.plot([p[0] for p in pts], [p[1] for p in pts], style, marker="o", markersize=3,
                        color=colors[zi % len(colors)], label=f"zeta={zeta:g}")
            ax.axhline(0.0, color="0.6", linewidth=0.8)
            ax.set_title(f"beta={beta:g}")
            ax.set_xlabel("alpha")
            if i % ncols == 0:
                ax.set_ylabel("excess risk difference")
        for j in range(n, nrows * ncols):
            axes[j // ncols][j % ncols].set_visible(False)
        axes[0][0].legend(fontsize="small")
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return path
