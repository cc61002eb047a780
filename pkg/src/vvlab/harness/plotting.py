"""Figures written next to the sweep tables (non-interactive Agg backend)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = ["sweep_figures", "layer_figure"]

STYLE = {
    "figure.figsize": (6.0, 4.2),
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 10,
    "legend.fontsize": 8,
    "savefig.dpi": 130,
}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def sweep_figures(report, directory):
    d = Path(directory)
    rows = report.ok_rows
    eps = np.array([r.eps for r in rows])
    out = {}
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for name in report.cfg.criteria:
            vals = np.array([r.criteria.get(name, np.nan) for r in rows])
            if np.all(vals > 0):
                fit = report.fits.get(f"K_{name}")
                label = name if fit is None else f"{name} (slope {fit.slope:.2f})"
                ax.loglog(eps, vals, "o-", label=label)
        ax.set_xlabel(r"$\varepsilon$")
        ax.set_ylabel("criterion integral")
        ax.legend()
        out["fig_criteria"] = _save(fig, d / "criteria.png")

        fig, ax = plt.subplots()
        for key, label in (("sup_relE", "sup relative energy"), ("tesi", "distance to Euler")):
            vals = np.array([getattr(r, key) for r in rows])
            if np.all(vals > 0):
                ax.loglog(eps, vals, "s-", label=f"{label} (slope {report.fits[key].slope:.2f})")
        ax.set_xlabel(r"$\varepsilon$")
        ax.legend()
        out["fig_convergence"] = _save(fig, d / "convergence.png")

        fig, ax = plt.subplots()
        for r in rows:
            if r.diagnostics is not None:
                ax.semilogy(r.diagnostics.times, np.maximum(r.diagnostics.series["relE_U"], 1e-300),
                            label=rf"$\varepsilon$={r.eps:.4g}")
        ax.set_xlabel("t")
        ax.set_ylabel(r"$E(\rho, u \,|\, \rho^E, U)$")
        ax.legend()
        out["fig_relative_energy"] = _save(fig, d / "relative_energy.png")
    return out


def layer_figure(table, path):
    """log-log plots of every non-vanishing layer norm with its fitted slope."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        names = []
        for r in table.rows:
            if r.bound not in names:
                names.append(r.bound)
        for name in names:
            rows = [r for r in table.rows if r.bound == name]
            e = np.array([r.eps for r in rows])
            v = np.array([r.value for r in rows])
            if np.all(v > 0):
                ax.loglog(e, v, "o-", label=f"{name} ({rows[0].slope:+.2f} vs {rows[0].target:+.2f})")
        ax.set_xlabel(r"$\varepsilon$")
        ax.legend(ncol=2)
        return _save(fig, Path(path))
