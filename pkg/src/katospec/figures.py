"""Figure rendering for the CLI report paths.

Figures are written next to the delimited output files; they are a
convenience view of the same numbers and never the canonical record.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

_STATUS_COLORS = {
    "pass": "#2a9d38",
    "fail": "#c8102e",
    "report-only": "#4472c4",
    "hypothesis-not-met": "#9a9a9a",
}


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_spectrum_figure(eigenvalues, path, label=""):
    fig, ax = plt.subplots(figsize=(5.5, 3.5))
    ax.step(range(len(eigenvalues)), eigenvalues, where="post")
    ax.set_xlabel("mode index")
    ax.set_ylabel("eigenvalue")
    ax.set_title(f"spectrum {label}".strip())
    _finish(fig, path)


def save_series_figure(horizons, kappas, path, target=None, label=""):
    fig, ax = plt.subplots(figsize=(5.5, 3.5))
    ax.plot(horizons, kappas, marker=".")
    if target is not None:
        ax.axhline(target, color="#c8102e", ls="--", lw=1, label=f"target {target:g}")
        ax.legend()
    ax.set_xlabel("horizon T")
    ax.set_ylabel("kappa_T")
    ax.set_xscale("log")
    ax.set_title(f"Kato constant {label}".strip())
    _finish(fig, path)


def save_constants_figure(deltas, primary, alternate, n, path):
    fig, ax = plt.subplots(figsize=(5.5, 3.5))
    ax.plot(deltas, primary, label="sqrt(2 p gamma)/(p-2)")
    ax.plot(deltas, alternate, ls="--", label="simplified radical")
    ax.set_xlabel("delta")
    ax.set_ylabel(f"C({n}, delta)")
    ax.set_title(f"diameter constant, n = {n}")
    ax.legend()
    _finish(fig, path)


def save_suite_figure(reports, path):
    fig, ax = plt.subplots(figsize=(7.0, 0.35 * max(8, len(reports)) + 1.2))
    labels, values, colors = [], [], []
    for r in reports:
        labels.append(f"{r.theorem} | {r.manifold}")
        values.append(0.0 if r.margin is None else r.margin)
        colors.append(_STATUS_COLORS.get(r.status, "#000000"))
    y = range(len(reports))
    ax.barh(y, values, color=colors)
    ax.set_yticks(y, labels, fontsize=7)
    ax.invert_yaxis()
    ax.axvline(0.0, color="black", lw=0.8)
    ax.set_xlabel("margin (0 for report-only)")
    ax.set_title("suite margins by status")
    _finish(fig, path)
