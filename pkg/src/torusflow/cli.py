"""Command-line front end: tableau reports, convergence sweeps, adaptive runs.

Outputs are deterministic CSV/JSON; figures are produced by the separate
plotting scripts from these files.  Exit codes: 0 success, 2 validation
failure, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time

import numpy as np

from . import __version__
from .adaptive import ControllerConfig, StallError, Strategy
from .manufactured import UnknownCase, get_case
from .orderconds import certify, check_order
from .solver import NonFiniteState, Problem, SingularStage, run_adaptive, run_fixed
from .spectral import GridSpec, NonZeroMean, random_mean_free
from .tableaux import (DegenerateParameter, UnknownTableau, in_pd_range,
                       make_tableau, stability_report, validate)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3

TRAJ_COLUMNS = ["n", "t", "tau", "enstrophy", "dtau_norm", "err_mix_inf", "rejected"]
CONV_COLUMNS = ["tableau", "tau", "err_L2_omega", "err_L2_u", "err_L2_psi", "observed_rate"]


class ValidationFailure(Exception):
    pass


def _fmt(x) -> str:
    if isinstance(x, float):
        if math.isnan(x):
            return ""
        return f"{x:.16e}"
    return str(x)


def _write_csv(path, columns, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _parse_tableau_spec(spec: str):
    """'ierk23:0.35' or 'imex_euler' -> (name, param)."""
    name, _, param = spec.partition(":")
    return name, (float(param) if param else None)


def _load_config(path):
    if path is None:
        return {}
    with open(path) as fh:
        return json.load(fh)


def _cfg_get(args, config, key, default=None):
    v = getattr(args, key, None)
    if v is not None:
        return v
    return config.get(key, default)


# ---------------------------------------------------------------- tableau

def tableau_report(name: str, param: float | None) -> dict:
    tab = make_tableau(name, param)
    rep = stability_report(tab)
    conds = check_order(tab, 4)
    cert = certify(tab)
    return {
        "name": tab.name,
        "param": tab.param,
        "stages": tab.s,
        "claimed_order": tab.order,
        "certified_order": cert,
        "c": tab.c.tolist(),
        "A": tab.A.tolist(),
        "A_hat": tab.A_hat.tolist(),
        "lambda_I": rep.lambda_I,
        "sigma_I": rep.sigma_I,
        "sigma_E": rep.sigma_E,
        "positive_definite": rep.positive_definite,
        "structure_violations": validate(tab),
        "order_conditions": [
            {"label": r.label, "order": r.order, "kind": r.kind,
             "lhs": r.lhs, "target": r.target, "residual": r.residual}
            for r in conds
        ],
    }


def _matrix_lines(name, m):
    out = [f"{name} ="]
    for row in m:
        out.append("    " + "  ".join(f"{v: .12g}" for v in row))
    return out


def format_tableau_text(rep: dict) -> str:
    lines = [
        f"{rep['name']}" + (f" (param = {rep['param']:g})" if rep["param"] is not None else ""),
        f"stages = {rep['stages']}, claimed order = {rep['claimed_order']}, "
        f"certified order = {rep['certified_order']}",
        "c = " + "  ".join(f"{v:.12g}" for v in rep["c"]),
    ]
    lines += _matrix_lines("A", rep["A"])
    lines += _matrix_lines("A_hat", rep["A_hat"])
    lines.append(
        f"lambda_I = {rep['lambda_I']:.12g}, sigma_I = {rep['sigma_I']:.12g}, "
        f"sigma_E = {rep['sigma_E']:.12g}, positive definite: {rep['positive_definite']}"
    )
    if rep["structure_violations"]:
        lines.append("structure violations: " + "; ".join(rep["structure_violations"]))
    lines.append("order conditions (residuals):")
    for r in rep["order_conditions"]:
        lines.append(f"  [{r['order']}] {r['label']:32s} {r['kind']:9s} residual = {r['residual']:.3e}")
    return "\n".join(lines)


def cmd_tableau(args, config) -> int:
    rep = tableau_report(args.name, args.param)
    print(format_tableau_text(rep))
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rep, fh, indent=2)
        print(f"wrote {args.json}")
    ok = rep["certified_order"] == rep["claimed_order"] and rep["positive_definite"]
    if not ok:
        if not rep["positive_definite"]:
            print(f"{rep['name']}: parameter outside positive-definite range "
                  f"(lambda_I = {rep['lambda_I']:.3e})", file=sys.stderr)
        if rep["certified_order"] != rep["claimed_order"]:
            print(f"{rep['name']}: certified order {rep['certified_order']} "
                  f"!= claimed {rep['claimed_order']}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


# ---------------------------------------------------------------- cases

def _case_overrides(pairs):
    out = {}
    for item in pairs or ():
        key, _, val = item.partition("=")
        if not val:
            raise ValidationFailure(f"case option {item!r} must look like key=value")
        key = key.strip()
        if key in ("l_x", "l_t", "lx", "lt"):
            out[{"lx": "l_x", "lt": "l_t"}.get(key, key)] = int(val)
        else:
            out[key] = float(val)
    return out


def _checked_tableau(name, param, allow_unstable):
    try:
        tab = make_tableau(name, param)
    except (UnknownTableau, DegenerateParameter) as e:
        raise ValidationFailure(str(e))
    if not allow_unstable and not in_pd_range(tab.name, tab.param):
        raise ValidationFailure(
            f"{tab.label()} is outside the positive-definite range; "
            "pass --allow-unstable to run it anyway")
    return tab


# ---------------------------------------------------------------- converge

def cmd_converge(args, config) -> int:
    case_name = _cfg_get(args, config, "case")
    if case_name is None:
        raise ValidationFailure("converge needs a case (flag --case or config)")
    M = int(_cfg_get(args, config, "grid_m", 128))
    T = float(_cfg_get(args, config, "final_time", 1.0))
    taus = _cfg_get(args, config, "taus")
    if not taus:
        raise ValidationFailure("converge needs at least one tau (--taus)")
    if isinstance(taus, str):
        taus = [float(v) for v in taus.split(",")]
    specs = _cfg_get(args, config, "tableaux")
    if not specs:
        raise ValidationFailure("converge needs at least one tableau (--tableau)")
    if isinstance(specs, str):
        specs = specs.split(",")
    form = _cfg_get(args, config, "convection", "skew")
    # explicit forcing placement carries the full temporal order on forced cases
    gw = _cfg_get(args, config, "forcing_weights", "explicit")

    grid = GridSpec(M)
    case = get_case(case_name, grid, **_case_overrides(args.case_opt))
    prob = case.problem(convection_form=form, forcing_weights=gw)

    rows = []
    for spec in specs:
        name, param = _parse_tableau_spec(spec)
        tab = _checked_tableau(name, param, args.allow_unstable)
        prev_err = None
        for tau in taus:
            res = run_fixed(prob, tab, case.exact_omega(0.0), tau, T)
            state = res.state
            ew = _l2_diff(state.omega, case.exact_omega(state.t))
            vel = state.vel
            vex = case.exact_psi(state.t)
            from .spectral import velocity as _velocity

            vel_ex = _velocity(vex)
            eu = math.sqrt(_l2_diff(vel.u, vel_ex.u) ** 2 + _l2_diff(vel.v, vel_ex.v) ** 2)
            ep = _l2_diff(state.psi, case.exact_psi(state.t))
            rate = math.log2(prev_err / ew) if prev_err is not None and ew > 0 else float("nan")
            rows.append([tab.label(), tau, ew, eu, ep, rate])
            prev_err = ew

    if args.output:
        _write_csv(args.output, CONV_COLUMNS, rows)
        print(f"wrote {args.output}")
    print(f"{'tableau':14s} {'tau':>12s} {'err_L2_omega':>14s} {'err_L2_u':>14s} "
          f"{'err_L2_psi':>14s} {'rate':>7s}")
    for r in rows:
        rate = "" if math.isnan(r[5]) else f"{r[5]:.3f}"
        print(f"{r[0]:14s} {r[1]:12.6g} {r[2]:14.6e} {r[3]:14.6e} {r[4]:14.6e} {rate:>7s}")
    return EXIT_OK


def _l2_diff(f, g):
    d = f.values - g.values
    return float(np.sqrt(f.grid.h**2 * np.sum(d * d)))


# ---------------------------------------------------------------- adaptive

def cmd_adaptive(args, config) -> int:
    case_name = _cfg_get(args, config, "case")
    if case_name is None:
        raise ValidationFailure("adaptive needs a case (flag --case or config)")
    M = int(_cfg_get(args, config, "grid_m", 128))
    spec = _cfg_get(args, config, "tableau")
    if spec is None:
        raise ValidationFailure("adaptive needs a tableau (--tableau)")
    name, param = _parse_tableau_spec(spec) if isinstance(spec, str) else (spec, None)
    if param is None:
        param = _cfg_get(args, config, "param")
    tab = _checked_tableau(name, param, args.allow_unstable)

    cfg = ControllerConfig(
        tau_min=float(_cfg_get(args, config, "tau_min", 1e-4)),
        tau_max=float(_cfg_get(args, config, "tau_max", 0.5)),
        beta=float(_cfg_get(args, config, "beta", 1000.0)),
        r_star=float(_cfg_get(args, config, "r_star", 4.0)),
        d_max=int(_cfg_get(args, config, "d_max", 5)),
        gamma_tol=float(_cfg_get(args, config, "gamma_tol", 1e-3)),
        beta_thr=float(_cfg_get(args, config, "beta_thr", 10.0)),
        strategy=Strategy.parse(_cfg_get(args, config, "strategy", "ats_ldlb")),
    )
    form = _cfg_get(args, config, "convection", "skew")
    gw = _cfg_get(args, config, "forcing_weights", "implicit")
    seed = _cfg_get(args, config, "seed")
    grid = GridSpec(M)

    if case_name.lower() == "decay":
        # unforced decay from seeded band-limited random data
        seed = 0 if seed is None else int(seed)
        rng = np.random.default_rng(seed)
        band = int(_cfg_get(args, config, "band", 5))
        nu = float(_cfg_get(args, config, "nu", 0.5))
        T = float(_cfg_get(args, config, "final_time", 10.0))
        omega0 = random_mean_free(grid, rng, band=band)
        prob = Problem(grid, nu, convection_form=form)
        case = None
        exact = None
    else:
        case = get_case(case_name, grid, **_case_overrides(args.case_opt))
        T = float(_cfg_get(args, config, "final_time", case.T))
        prob = case.problem(convection_form=form, forcing_weights=gw)
        omega0 = case.exact_omega(0.0)
        exact = case.exact_omega

    t0 = time.time()
    res = run_adaptive(prob, tab, omega0, cfg, T, exact=exact)
    wall = time.time() - t0

    every = max(1, int(_cfg_get(args, config, "record_every", 1)))
    rows = []
    for i, r in enumerate(res.records):
        if r.rejected or i % every == 0 or i == len(res.records) - 1:
            rows.append([r.n, r.t, r.tau, r.enstrophy, r.dtau_norm, r.err_mix_inf,
                         int(r.rejected)])
    if args.output:
        _write_csv(args.output, TRAJ_COLUMNS, rows)
        print(f"wrote {args.output}")

    errs = [r.err_mix_inf for r in res.records
            if not r.rejected and not math.isnan(r.err_mix_inf)]
    summary = {
        "case": case_name,
        "tableau": tab.label(),
        "strategy": cfg.strategy.value,
        "max_err_mix": max(errs) if errs else None,
        "steps": res.steps,
        "rejects": res.rejects,
        "seed": seed,
        "final_time": res.state.t,
        "wall_time_s": wall,
    }
    if args.summary:
        with open(args.summary, "w") as fh:
            json.dump(summary, fh, indent=2)
        print(f"wrote {args.summary}")
    if args.reference_out and case is not None:
        ref_rows = [[r.t, case.pulse.f(r.t) if case.pulse else float("nan"),
                     case.enstrophy_ref(r.t)]
                    for r in res.records if not r.rejected]
        _write_csv(args.reference_out, ["t", "f", "enstrophy_ref"], ref_rows)
        print(f"wrote {args.reference_out}")
    print(json.dumps(summary))
    return EXIT_OK


# ---------------------------------------------------------------- main

def build_parser():
    p = argparse.ArgumentParser(prog="torusflow",
                                description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"torusflow {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    pt = sub.add_parser("tableau", help="print and certify an IMEX tableau")
    pt.add_argument("name")
    pt.add_argument("--param", type=float, default=None)
    pt.add_argument("--json", default=None, help="also write the report as JSON")
    pt.set_defaults(fn=cmd_tableau)

    pc = sub.add_parser("converge", help="fixed-step convergence sweep on an exact case")
    pc.add_argument("--config", default=None, help="JSON config file; flags override")
    pc.add_argument("--case", default=None)
    pc.add_argument("--tableau", action="append", dest="tableaux", default=None,
                    metavar="NAME[:PARAM]")
    pc.add_argument("--taus", default=None, help="comma-separated step sizes")
    pc.add_argument("--grid-m", dest="grid_m", type=int, default=None)
    pc.add_argument("--final-time", dest="final_time", type=float, default=None)
    pc.add_argument("--convection", choices=("skew", "advective"), default=None)
    pc.add_argument("--forcing-weights", dest="forcing_weights",
                    choices=("implicit", "explicit"), default=None,
                    help="stage weights for the forcing term (default explicit)")
    pc.add_argument("--case-opt", action="append", default=None, metavar="KEY=VAL")
    pc.add_argument("--allow-unstable", action="store_true")
    pc.add_argument("--output", default=None, help="CSV output path")
    pc.set_defaults(fn=cmd_converge)

    pa = sub.add_parser("adaptive", help="adaptive run with ATS / ATS-LD / ATS-LDLB")
    pa.add_argument("--config", default=None, help="JSON config file; flags override")
    pa.add_argument("--case", default=None,
                    help="example1 | example2 | example3-freqA | example3-freqB | decay")
    pa.add_argument("--tableau", default=None, metavar="NAME[:PARAM]")
    pa.add_argument("--strategy", default=None, choices=("ats", "ats-ld", "ats-ldlb",
                                                         "ats_ld", "ats_ldlb"))
    pa.add_argument("--tau-min", dest="tau_min", type=float, default=None)
    pa.add_argument("--tau-max", dest="tau_max", type=float, default=None)
    pa.add_argument("--beta", type=float, default=None)
    pa.add_argument("--r-star", dest="r_star", type=float, default=None)
    pa.add_argument("--d-max", dest="d_max", type=int, default=None)
    pa.add_argument("--gamma-tol", dest="gamma_tol", type=float, default=None)
    pa.add_argument("--beta-thr", dest="beta_thr", type=float, default=None)
    pa.add_argument("--grid-m", dest="grid_m", type=int, default=None)
    pa.add_argument("--final-time", dest="final_time", type=float, default=None)
    pa.add_argument("--convection", choices=("skew", "advective"), default=None)
    pa.add_argument("--forcing-weights", dest="forcing_weights",
                    choices=("implicit", "explicit"), default=None,
                    help="stage weights for the forcing term (default implicit)")
    pa.add_argument("--case-opt", action="append", default=None, metavar="KEY=VAL")
    pa.add_argument("--seed", type=int, default=None, help="seed for the decay case")
    pa.add_argument("--record-every", dest="record_every", type=int, default=None)
    pa.add_argument("--allow-unstable", action="store_true")
    pa.add_argument("--output", default=None, help="trajectory CSV path")
    pa.add_argument("--summary", default=None, help="summary JSON path")
    pa.add_argument("--reference-out", dest="reference_out", default=None,
                    help="CSV with t, f(t), reference enstrophy at accepted steps")
    pa.set_defaults(fn=cmd_adaptive)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    config = _load_config(getattr(args, "config", None))
    try:
        return args.fn(args, config)
    except (ValidationFailure, UnknownTableau, UnknownCase, DegenerateParameter,
            ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except (NonFiniteState, SingularStage, StallError, NonZeroMean) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
