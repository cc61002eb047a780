"""Sweep persistence: sweep.csv, sweep_extra.csv, summary.txt, diag_<eps>/ dumps."""

from __future__ import annotations

import csv
from pathlib import Path

from ..solver.io import write_snapshot

__all__ = ["SWEEP_COLUMNS", "EXTRA_COLUMNS", "emit_report", "read_sweep_csv", "sweep_table_rows", "summary_text"]

SWEEP_COLUMNS = (
    "eps", "r1", "K_thm1", "K_thm2", "K_sueur", "K_bn", "K_bica", "K_cor", "K_byebye",
    "sup_relE", "tesi_metric", "energy_defect_max", "status",
)
EXTRA_COLUMNS = (
    "eps", "n", "runtime_s", "wp_kinetic", "energy0", "gronwall_C", "gronwall_eta", "gronwall_residual",
    "gronwall_holds", "luca_ok", "relE_layer_bound_ok", "lambda_checks", "lambda_violations",
)
_CRIT_COLUMN = {"thm1": "K_thm1", "thm2": "K_thm2", "sueur": "K_sueur", "bardos_nguyen": "K_bn",
                "bica": "K_bica", "cor": "K_cor", "byebye": "K_byebye"}


def _num(v):
    return f"{float(v):.17g}"


def sweep_table_rows(report):
    out = []
    for r in report.rows:
        row = {"eps": _num(r.eps), "r1": _num(r.r1)}
        for name, col in _CRIT_COLUMN.items():
            row[col] = _num(r.criteria[name]) if name in r.criteria else "nan"
        row["sup_relE"] = _num(r.sup_relE)
        row["tesi_metric"] = _num(r.tesi)
        row["energy_defect_max"] = _num(r.energy_defect_max)
        row["status"] = r.status
        out.append(row)
    return out


def _extra_rows(report):
    out = []
    for r in report.rows:
        out.append({
            "eps": _num(r.eps),
            "n": "x".join(str(k) for k in r.n),
            "runtime_s": f"{r.runtime:.3f}",
            "wp_kinetic": _num(r.wp_kinetic),
            "energy0": _num(r.energy_scale),
            "gronwall_C": _num(r.gronwall_C),
            "gronwall_eta": _num(r.gronwall_eta),
            "gronwall_residual": _num(r.gronwall_residual),
            "gronwall_holds": int(r.gronwall_holds),
            "luca_ok": int(bool(r.luca) and all(ok for *_, ok in r.luca)),
            "relE_layer_bound_ok": int(r.relE_bound_ok),
            "lambda_checks": r.lambda_checks,
            "lambda_violations": r.lambda_violations,
        })
    return out


def _write_csv(path, columns, rows):
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)


def read_sweep_csv(path):
    """Parse sweep.csv back into a list of dicts (numbers as floats)."""
    rows = []
    with Path(path).open(newline="") as fh:
        for rec in csv.DictReader(fh):
            rows.append({k: (v if k == "status" else float(v)) for k, v in rec.items()})
    return rows


def summary_text(report):
    cfg = report.cfg
    lines = ["# vvlab sweep summary", "[config]"] + cfg.lines()
    lines.append("[reference]")
    lines += [f"{k} = {v}" for k, v in report.reference_info.items()]
    if report.assumptions is not None:
        lines.append("[viscosity audit]")
        lines += report.assumptions.lines()
    lines.append("[fits] log-log OLS slope vs eps")
    for name, fit in report.fits.items():
        lines.append(f"{name} = {fit.slope:.6f}  residual={fit.residual:.3e}  n={fit.n}")
    lines.append("[acceptance]")
    for name, ok, detail in report.verdicts():
        lines.append(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    for w in report.warnings:
        lines.append(f"warning: {w}")
    return "\n".join(lines) + "\n"


def emit_report(report, directory, figures=True, dumps=True):
    """Write every sweep artefact into ``directory``; returns the paths written."""
    d = Path(directory)
    try:
        d.mkdir(parents=True, exist_ok=True)
        paths = {}
        paths["sweep"] = d / "sweep.csv"
        _write_csv(paths["sweep"], SWEEP_COLUMNS, sweep_table_rows(report))
        paths["extra"] = d / "sweep_extra.csv"
        _write_csv(paths["extra"], EXTRA_COLUMNS, _extra_rows(report))
        paths["summary"] = d / "summary.txt"
        paths["summary"].write_text(summary_text(report))
        if dumps:
            for r in report.rows:
                sub = d / f"diag_{r.eps:.6g}"
                sub.mkdir(exist_ok=True)
                (sub / "status.txt").write_text(r.status + "\n")
                if r.diagnostics is not None:
                    r.diagnostics.write(sub / "diagnostics.txt")
                if r.final_state is not None:
                    write_snapshot(sub / "final_state.txt", r.final_state, report.cfg.gamma, r.eps, r.r1)
    except OSError as exc:
        raise OSError(f"report output under {d}: {exc}") from exc
    if figures and report.ok_rows:
        from .plotting import sweep_figures

        paths.update(sweep_figures(report, d))
    return paths

