"""Figure rendering for benchmark CSV output."""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

_STYLE = {
    "identity": dict(color="tab:gray", marker="o"),
    "jacobi": dict(color="tab:blue", marker="s"),
    "ilu0": dict(color="tab:red", marker="^"),
    "ic0": dict(color="tab:green", marker="v"),
    "ssor": dict(color="tab:purple", marker="d"),
}


def _series(rows, ykey):
    grouped = {}
    for row in rows:
        grouped.setdefault(row["preconditioner"], []).append((row["scale"], row[ykey]))
    for pts in grouped.values():
        pts.sort()
    return grouped


def _line_figure(rows, ykey, ylabel, title, path, logy=False):
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for name, pts in _series(rows, ykey).items():
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        ax.plot(xs, ys, label=name, **_STYLE.get(name, {}))
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel("scale")
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def render_bench_figures(rows: list[dict], out_dir) -> list[Path]:
    """Render the iteration, runtime, and build-fraction charts next to the CSV.

    Returns the written paths. Cells that broke down (nan metrics) still plot
    their iteration and time columns; matplotlib drops nan points silently.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = [
        out_dir / "bench_inner_iterations.png",
        out_dir / "bench_total_time.png",
        out_dir / "bench_build_fraction.png",
    ]
    _line_figure(rows, "inner_iters_total", "total inner iterations",
                 "Inner iterations per scale", paths[0], logy=True)
    _line_figure(rows, "total_s", "total time [s]",
                 "Wall-clock time per scale", paths[1], logy=True)
    _line_figure(rows, "precond_build_pct", "build time [% of total]",
                 "Preconditioner build fraction", paths[2])
    return paths
