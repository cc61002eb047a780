"""Command-line entry point: ``vvlab {sweep,audit,layer}``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from ..errors import VVLabError
from ..layer import verify_layer_scalings
from ..solver import SolverConfig
from ..thermo import GasLaw, fit_equivalence_constants
from ..viscosity import check_assumptions, make_law
from .config import load_config
from .presets import get_preset, steady_shear_trajectory
from .report import SWEEP_COLUMNS, emit_report, sweep_table_rows
from .sweep import run_sweep

__all__ = ["main", "build_parser"]


def _common(p):
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--eps-list", help="comma-separated decreasing eps values (2^-4 syntax allowed)")
    p.add_argument("--gamma")
    p.add_argument("--nu")
    p.add_argument("--law", help="linear | power:b | affine:a,b")
    p.add_argument("--c", help="strip constant c")
    p.add_argument("--drag-exponent", help="a in r1 = eps^a")
    p.add_argument("--preset", help="bump1d | channel2d")
    p.add_argument("--out", help="output directory")
    p.add_argument("--threads", help="worker processes for sweep rows")
    p.add_argument("--criteria", help="comma-separated subset of criteria")


def build_parser():
    ap = argparse.ArgumentParser(prog="vvlab", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("sweep", "run an eps-sweep and write sweep.csv, summary.txt, figures"),
        ("audit", "check the viscosity law and fit the relative-entropy constants"),
        ("layer", "fit the eps-scalings of the boundary-layer corrector"),
    ):
        p = sub.add_parser(name, help=help_)
        _common(p)
        if name == "sweep":
            p.add_argument("--T", help="final time")
            p.add_argument("--no-figures", action="store_true")
        if name == "audit":
            p.add_argument("--K", default="0.5,2", help="compact density range lo,hi for the constants")
    return ap


def _overrides(args):
    keys = ("eps_list", "gamma", "nu", "law", "c", "drag_exponent", "preset", "out", "threads", "criteria", "T")
    return {k: getattr(args, k, None) for k in keys}


def _cmd_sweep(args, cfg):
    report = run_sweep(cfg)
    paths = emit_report(report, cfg.out, figures=not args.no_figures)
    print("# sweep.csv")
    print(",".join(SWEEP_COLUMNS))
    for row in sweep_table_rows(report):
        print(",".join(str(row[c]) for c in SWEEP_COLUMNS))
    print("# acceptance")
    for name, ok, detail in report.verdicts():
        print(f"{'PASS' if ok else 'FAIL'},{name},{detail}")
    print("# files")
    for k, p in paths.items():
        print(f"{k},{p}")
    return 0


def _cmd_audit(args, cfg):
    law = make_law(cfg.law, cfg.nu, cfg.gamma)
    rep = check_assumptions(law)
    print("# viscosity audit")
    print("\n".join(rep.lines()))
    lo, hi = (float(v) for v in args.K.split(","))
    consts = fit_equivalence_constants(GasLaw(cfg.gamma), (lo, hi), n_rho=2000, n_r=2000, n_profiles=500)
    print("# relative-entropy constants")
    print("c3,c4,c5,k_lo,k_hi,rho_cap")
    print(f"{consts.c3:.10g},{consts.c4:.10g},{consts.c5:.10g},{lo:g},{hi:g},{consts.rho_cap:g}")
    return 0 if rep.passed else 1


def _cmd_layer(args, cfg):
    preset = get_preset("channel2d")
    times = np.linspace(0.0, cfg.T, 5)
    scfg = SolverConfig(gamma=cfg.gamma)
    grids = [preset.grid_for(e, cfg.c, cfg.cells_per_layer) for e in cfg.eps_list]
    table = verify_layer_scalings(grids, lambda gr: steady_shear_trajectory(gr, times, scfg), cfg.c, cfg.eps_list, cfg.cutoff)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "layer_scalings.csv").write_text(table.csv())
    from .plotting import layer_figure

    fig = layer_figure(table, out / "layer_scalings.png")
    sys.stdout.write(table.csv())
    print(f"# files\nlayer_scalings,{out / 'layer_scalings.csv'}\nfig_layer,{fig}")
    return 0 if all(table.passed.values()) else 1


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config, **_overrides(args))
        return {"sweep": _cmd_sweep, "audit": _cmd_audit, "layer": _cmd_layer}[args.command](args, cfg)
    except (VVLabError, ValueError, OSError) as exc:
        print(f"vvlab: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
