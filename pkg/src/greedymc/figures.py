"""Matplotlib rendering of phase-transition curves to files."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

X_LABELS = {"density": "observed density", "size": "matrix size n"}
Y_LABELS = {
    "error_rate": "max admissible error rate",
    "erasure_rate": "max admissible erasure rate",
}
LINE_STYLES = {"sgmca": "-", "alm_only": "--"}


def render_curves(table, path) -> None:
    """One line series per solver; sentinel points are shown at the y floor."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    solvers = []
    for point in table.points:
        if point.solver not in solvers:
            solvers.append(point.solver)
    for solver in solvers:
        xs = [p.x for p in table.points if p.solver == solver]
        ys = [p.y for p in table.points if p.solver == solver]
        ax.plot(
            xs, ys,
            LINE_STYLES.get(solver, "-"),
            marker="o",
            markersize=4,
            label=solver,
        )
    ax.set_xlabel(X_LABELS.get(table.x_axis, table.x_axis))
    ax.set_ylabel(Y_LABELS.get(table.scan_axis, table.scan_axis))
    ax.grid(True, alpha=0.4)
    ax.legend()
    fig.tight_layout()
    # drop the creation timestamp so repeated runs produce identical SVGs
    fig.savefig(path, metadata={"Date": None} if str(path).endswith(".svg") else None)
    plt.close(fig)
