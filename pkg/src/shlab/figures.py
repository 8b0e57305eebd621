"""Render experiment series to PNG files alongside the CSV output."""

from __future__ import annotations

import numpy as np

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def render_series_figure(report, path: str) -> None:
    """Log-log plot of every series column with the fitted and expected slopes."""
    if report.series is None or len(report.series) == 0:
        return
    series = np.asarray(report.series, dtype=float)
    t = series[:, 0]
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    for j, name in enumerate(report.series_columns[1:], start=1):
        vals = series[:, j]
        if np.any(vals <= 0.0):
            ax.plot(t, vals, "o-", ms=3, label=name)
        else:
            ax.loglog(t, vals, "o", ms=3, label=name)
    fit = report.fit
    if fit is not None:
        tt = np.geomspace(fit.window[0], fit.window[1], 50)
        ax.loglog(tt, np.exp(fit.intercept) * tt**fit.slope, "-",
                  label=f"fit slope {fit.slope:.4f}")
        if report.theory is not None:
            anchor = np.exp(fit.intercept) * tt[0] ** fit.slope
            ax.loglog(tt, anchor * (tt / tt[0]) ** report.theory, "--",
                      label=f"expected slope {report.theory:.4f}")
    ax.set_xlabel(report.series_columns[0] if report.series_columns else "t")
    ax.set_ylabel(report.series_columns[1] if len(report.series_columns) > 1 else "value")
    ax.set_title(f"{report.experiment} [{report.verdict}]")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
