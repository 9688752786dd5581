"""Command-line front end for assembly, analysis, scans, and runs.

Every command reads JSON, writes CSV or JSON through the deterministic
serializer, and echoes its full configuration (plus the tool version)
into the output. Exit codes: 0 success, 2 validation failure,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__, hme1d, serialize
from .hermite import hermite_roots
from .hyperbolicity import (DEFAULT_COND_CAP, DEFAULT_TOL, analyze,
                            check_abs_system, scan_grad_region,
                            symmetry_criterion)
from .moment13 import (Moment13State, assemble_D13, assemble_M13,
                       assemble_system_13, eigenspeeds_13, rhs_explicit_13,
                       sample_state_13, validate_13)
from .momentnd import (assemble_system_nd, orthonormalized_convection,
                       sample_state_nd)
from .solver1d import Grid1D, SimConfig, max_speed_factor
from .solver1d import run as run_simulation
from .state1d import MomentState1D, validate

__all__ = ["main", "build_parser"]


def _load_json(path):
    with open(path) as fh:
        return json.load(fh)


def _emit(args, text):
    if args.out:
        serialize.write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def _envelope(command, config):
    return {"tool": "hymo", "version": __version__, "command": command,
            "config": config}


def _load_state_1d(path):
    state = MomentState1D.from_json_dict(_load_json(path))
    problems = validate(state)
    if problems:
        raise ValueError("invalid state: " + "; ".join(problems))
    return state


def _load_state_13(path):
    state = Moment13State.from_json_dict(_load_json(path))
    problems = validate_13(state)
    if problems:
        raise ValueError("invalid state: " + "; ".join(problems))
    return state


# -- assemble ---------------------------------------------------------------

def cmd_assemble(args):
    state = _load_state_1d(args.state)
    matrices = {}
    if args.which == "grad":
        matrices["A"] = hme1d.assemble_grad_A(state)
    elif args.which == "regularized":
        matrices["A_reg"] = hme1d.regularize(hme1d.assemble_grad_A(state), state)
    elif args.which == "D":
        matrices["D"] = hme1d.assemble_D(state)
    elif args.which == "M":
        matrices["M"] = hme1d.assemble_Mmat(state.u, state.theta, state.M)
    else:  # system
        sys_ = hme1d.build_system_by_deduction(state, tau=args.tau)
        matrices["D"] = sys_.D
        matrices["M"] = sys_.Mk[0]
        matrices["q"] = sys_.q
        matrices["transport"] = sys_.transport_matrix()
    config = {
        "which": args.which,
        "M": state.M,
        "state_hash": serialize.state_hash(state.to_json_dict()),
        "layout": "w = (rho, u, theta, f3..fM)",
        "tau": args.tau,
    }
    env = _envelope("assemble", config)
    if args.format == "csv":
        sections = [serialize.matrix_csv_section(k, v)
                    for k, v in matrices.items()]
        return _emit(args, serialize.build_csv(env, sections))
    result = {"matrices": {k: np.atleast_2d(v).tolist()
                           for k, v in matrices.items()}}
    return _emit(args, serialize.build_json(env, result))


# -- eig --------------------------------------------------------------------

def cmd_eig(args):
    predicted = None
    multiplicities = None
    if args.target == "m13":
        state = _load_state_13(args.state)
        sys13 = assemble_system_13(state)
        direction = [0.0, 0.0, 0.0]
        direction[args.axis - 1] = 1.0
        mat = sys13.transport_matrix(direction)
        speeds, mult = eigenspeeds_13(state, args.axis)
        predicted = speeds
        multiplicities = mult
        config = {"target": args.target, "axis": args.axis,
                  "state_hash": serialize.state_hash(state.to_json_dict())}
    else:
        state = _load_state_1d(args.state)
        A = hme1d.assemble_grad_A(state)
        if args.target == "regularized":
            mat = hme1d.regularize(A, state)
            predicted = state.u + math.sqrt(state.theta) \
                * hermite_roots(state.M + 1)
        else:
            mat = A
        config = {"target": args.target, "M": state.M,
                  "state_hash": serialize.state_hash(state.to_json_dict())}
    tol = args.tol if args.tol is not None else DEFAULT_TOL
    report = analyze(mat, tol=tol, cond_cap=DEFAULT_COND_CAP)
    config["tol"] = tol
    result = report.to_json_dict()
    if predicted is not None:
        result["predicted_speeds"] = [float(v) for v in predicted]
    if multiplicities is not None:
        result["predicted_multiplicities"] = [int(v) for v in multiplicities]
    env = _envelope("eig", config)
    if args.format == "csv":
        table = np.column_stack([report.eigenvalues.real,
                                 report.eigenvalues.imag])
        sections = [serialize.matrix_csv_section("eigenvalues_re_im", table)]
        if predicted is not None:
            sections.append(serialize.matrix_csv_section(
                "predicted_speeds", np.asarray(predicted)))
        return _emit(args, serialize.build_csv(env, sections))
    return _emit(args, serialize.build_json(env, result))


# -- scan -------------------------------------------------------------------

def cmd_scan(args):
    grid = np.linspace(args.grid_min, args.grid_max, args.grid_points)
    tol = args.tol if args.tol is not None else DEFAULT_TOL
    res = scan_grad_region(args.order, grid, grid, matrix=args.matrix, tol=tol)
    config = {"M": args.order, "matrix": args.matrix,
              "grid_min": args.grid_min, "grid_max": args.grid_max,
              "grid_points": args.grid_points, "tol": tol}
    env = _envelope("scan", config)
    if args.format == "csv":
        lines = serialize.envelope_comments(
            dict(env, fraction_hyperbolic=serialize.fnum(res.fraction_hyperbolic())))
        lines.append("gm1,gm,hyperbolic,max_imag")
        for i, g1 in enumerate(res.gm1_grid):
            for j, g2 in enumerate(res.gm_grid):
                lines.append(",".join([
                    serialize.fnum(g1), serialize.fnum(g2),
                    str(int(res.hyperbolic[i, j])),
                    serialize.fnum(res.max_imag[i, j])]))
        return _emit(args, "\n".join(lines) + "\n")
    result = {
        "gm1_grid": res.gm1_grid.tolist(),
        "gm_grid": res.gm_grid.tolist(),
        "hyperbolic": res.hyperbolic.astype(int).tolist(),
        "max_imag": res.max_imag.tolist(),
        "fraction_hyperbolic": res.fraction_hyperbolic(),
    }
    return _emit(args, serialize.build_json(env, result))


# -- check13 ----------------------------------------------------------------

def _min_poly_residual(M1, u1, theta):
    n = M1.shape[0]
    eye = np.eye(n)
    B = M1 - u1 * eye
    B2 = B @ B
    p = B @ (5.0 * B2 - 7.0 * theta * eye) \
        @ (5.0 * B2 @ B2 - 26.0 * theta * B2 + 15.0 * theta ** 2 * eye)
    return float(np.abs(p).max())


def cmd_check13(args):
    tol = args.tol if args.tol is not None else 1e-10
    rng = np.random.default_rng(args.seed)
    worst = {"poly": 0.0, "eig": 0.0, "rhs": 0.0, "det": 0.0}
    for _ in range(args.n_states):
        state = sample_state_13(rng)
        theta = state.theta_mean
        sys13 = assemble_system_13(state)

        M1 = assemble_M13(state, 1)
        scale3 = max(1.0, float(np.abs(M1).max())) ** 3
        worst["poly"] = max(worst["poly"],
                            _min_poly_residual(M1, float(state.u[0]), theta) / scale3)

        for k in (1, 2, 3):
            speeds, mult = eigenspeeds_13(state, k)
            expanded = np.sort(np.repeat(speeds, mult))
            direction = np.eye(3)[k - 1]
            lam = np.sort(np.linalg.eigvals(sys13.transport_matrix(direction)).real)
            scale = 1.0 + abs(float(state.u[k - 1])) + math.sqrt(theta)
            worst["eig"] = max(worst["eig"],
                               float(np.abs(lam - expanded).max()) / scale)

        grads = rng.normal(size=(13, 3))
        lhs = rhs_explicit_13(state, grads, chi23=1.0, m_g=1.0)
        conv = sum(sys13.Mk[k] @ (sys13.D @ grads[:, k]) for k in range(3))
        rhs = np.linalg.solve(sys13.D, sys13.q - conv)
        scale = max(1.0, float(np.abs(lhs).max()))
        worst["rhs"] = max(worst["rhs"], float(np.abs(lhs - rhs).max()) / scale)

        det_ref = state.rho ** 9 / 1000.0
        det = float(np.linalg.det(assemble_D13(state)))
        worst["det"] = max(worst["det"], abs(det - det_ref) / abs(det_ref))

    checks = {
        "min_poly_residual": (worst["poly"], tol),
        "eigenvalue_error": (worst["eig"], 1e-9),
        "explicit_rhs_error": (worst["rhs"], 1e-9),
        "det_error": (worst["det"], 1e-9),
    }
    passed = all(value < bound for value, bound in checks.values())
    config = {"n_states": args.n_states, "seed": args.seed, "tol": tol}
    env = _envelope("check13", config)
    result = {name: {"value": value, "bound": bound, "passed": value < bound}
              for name, (value, bound) in checks.items()}
    result["passed"] = passed
    if args.format == "csv":
        lines = serialize.envelope_comments(env)
        lines.append("check,value,bound,passed")
        for name, (value, bound) in checks.items():
            lines.append(f"{name},{serialize.fnum(value)},"
                         f"{serialize.fnum(bound)},{int(value < bound)}")
        lines.append(f"all,,,{int(passed)}")
        text = "\n".join(lines) + "\n"
    else:
        text = serialize.build_json(env, result)
    status = _emit(args, text)
    if not passed:
        raise RuntimeError("check13 failed; see report for residuals")
    return status


# -- checknd ----------------------------------------------------------------

def cmd_checknd(args):
    tol = args.tol if args.tol is not None else DEFAULT_TOL
    rng = np.random.default_rng(args.seed)
    kinds = ["classic", "generalized"] if args.kind == "both" else [args.kind]
    summary = {}
    passed = True
    for kind in kinds:
        worst_imag = 0.0
        worst_cond = 0.0
        all_symmetric = True
        all_hyper = True
        for _ in range(args.n_states):
            state = sample_state_nd(args.dim, args.order, kind, rng)
            sysnd = assemble_system_nd(state)
            rep = check_abs_system(sysnd, n_directions=args.n_directions,
                                   tol=tol, seed=args.seed)
            worst_imag = max(worst_imag, rep.worst_max_imag)
            worst_cond = max(worst_cond, rep.d_condition)
            if not rep.passed:
                all_hyper = False
            if not symmetry_criterion(orthonormalized_convection(state)):
                all_symmetric = False
        ok = all_hyper and all_symmetric
        passed = passed and ok
        summary[kind] = {
            "worst_max_imag": worst_imag,
            "worst_d_condition": worst_cond,
            "all_hyperbolic": all_hyper,
            "all_symmetric": all_symmetric,
            "passed": ok,
        }
    config = {"dim": args.dim, "order": args.order, "kind": args.kind,
              "n_states": args.n_states, "n_directions": args.n_directions,
              "seed": args.seed, "tol": tol}
    env = _envelope("checknd", config)
    result = dict(summary)
    result["passed"] = passed
    if args.format == "csv":
        lines = serialize.envelope_comments(env)
        lines.append("kind,worst_max_imag,worst_d_condition,"
                     "all_hyperbolic,all_symmetric,passed")
        for kind, row in summary.items():
            lines.append(",".join([
                kind, serialize.fnum(row["worst_max_imag"]),
                serialize.fnum(row["worst_d_condition"]),
                str(int(row["all_hyperbolic"])),
                str(int(row["all_symmetric"])),
                str(int(row["passed"]))]))
        text = "\n".join(lines) + "\n"
    else:
        text = serialize.build_json(env, result)
    status = _emit(args, text)
    if not passed:
        raise RuntimeError("checknd failed; see report")
    return status


# -- simulate ----------------------------------------------------------------

def _state_from_fields(M, fields):
    f = np.asarray(fields.get("f", np.zeros(M - 2)), dtype=float)
    return MomentState1D(M=M, rho=float(fields["rho"]), u=float(fields["u"]),
                         theta=float(fields["theta"]), f=f)


def _grid_from_config(cfg):
    M = int(cfg["M"])
    n_cells = int(cfg["n_cells"])
    x_min = float(cfg["x_min"])
    x_max = float(cfg["x_max"])
    ic = cfg["ic"]
    kind = ic["kind"]
    if kind == "uniform":
        state = _state_from_fields(M, ic)
        fn = lambda x: state
    elif kind == "sine":
        rho0 = float(ic.get("rho0", 1.0))
        amp_rho = float(ic.get("amp_rho", 0.1))
        theta0 = float(ic.get("theta0", 1.0))
        amp_theta = float(ic.get("amp_theta", 0.0))
        u0 = float(ic.get("u0", 0.0))
        f3_amp = float(ic.get("f3_amp", 0.0))
        periods = float(ic.get("periods", 1.0))
        span = x_max - x_min

        def fn(x):
            phase = 2.0 * math.pi * periods * (x - x_min) / span
            f = np.zeros(M - 2)
            f[0] = f3_amp * math.sin(phase)
            return MomentState1D(M=M, rho=rho0 * (1.0 + amp_rho * math.sin(phase)),
                                 u=u0,
                                 theta=theta0 * (1.0 + amp_theta * math.sin(phase)),
                                 f=f)
    elif kind == "shock":
        left = _state_from_fields(M, ic["left"])
        right = _state_from_fields(M, ic["right"])
        x_jump = float(ic.get("x_jump", 0.5 * (x_min + x_max)))
        fn = lambda x: left if x < x_jump else right
    else:
        raise ValueError(f"unknown initial condition kind: {kind!r}")
    return Grid1D.from_function(x_min, x_max, n_cells, fn)


def cmd_simulate(args):
    cfg = _load_json(args.config)
    config = SimConfig(M=int(cfg["M"]), t_end=float(cfg["t_end"]),
                       tau=float(cfg.get("tau", 1.0)),
                       cfl=float(cfg.get("cfl", 0.45)),
                       bc=cfg.get("bc", "periodic"),
                       output_stride=int(cfg.get("output_stride", 1)),
                       backend=cfg.get("backend", "auto"))
    grid = _grid_from_config(cfg)
    problems = grid.validate_cells()
    if problems:
        raise ValueError("invalid initial grid: " + "; ".join(problems))
    result = run_simulation(config, grid)
    env = _envelope("simulate", {"input": cfg, "seed": args.seed})
    snapshot_files = []
    for i, (t, g) in enumerate(zip(result.times, result.grids)):
        path = f"{args.out}_{i:04d}.csv"
        serialize.write_text(path, serialize.grid_csv_text(g, t, env))
        snapshot_files.append(path)
    meta = {
        "times": [float(t) for t in result.times],
        "dt_history": [float(dt) for dt in result.dt_history],
        "totals": [[float(v) for v in row] for row in result.totals],
        "n_steps": result.n_steps,
        "snapshots": snapshot_files,
        "max_wavespeed_factor": max_speed_factor(config.M),
    }
    serialize.write_text(f"{args.out}_meta.json",
                         serialize.build_json(env, meta))
    return 0


# -- parser -----------------------------------------------------------------

def _add_common(sub):
    sub.add_argument("--tol", type=float, default=None,
                     help="tolerance override for numerical verdicts")
    sub.add_argument("--seed", type=int, default=0,
                     help="seed for any randomized sampling")
    sub.add_argument("--out", default=None,
                     help="output path (default: stdout)")
    sub.add_argument("--format", choices=("csv", "json"), default="json",
                     help="output format")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hymo",
        description="hyperbolic moment systems: assembly, analysis, simulation")
    parser.add_argument("--version", action="version",
                        version=f"hymo {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("assemble", help="write a system matrix for a state")
    p.add_argument("--state", required=True, help="state JSON file")
    p.add_argument("--which", required=True,
                   choices=("grad", "regularized", "D", "M", "system"))
    p.add_argument("--tau", type=float, default=1.0,
                   help="relaxation time for the source (system only)")
    _add_common(p)
    p.set_defaults(func=cmd_assemble)

    p = subs.add_parser("eig", help="hyperbolicity report for one matrix")
    p.add_argument("--state", required=True, help="state JSON file")
    p.add_argument("--target", required=True,
                   choices=("grad", "regularized", "m13"))
    p.add_argument("--axis", type=int, default=1, choices=(1, 2, 3),
                   help="convection axis for the m13 target")
    _add_common(p)
    p.set_defaults(func=cmd_eig)

    p = subs.add_parser("scan", help="hyperbolicity region scan")
    p.add_argument("--order", type=int, default=3, help="moment order M")
    p.add_argument("--matrix", choices=("grad", "regularized"), default="grad")
    p.add_argument("--grid-min", type=float, default=-1.0)
    p.add_argument("--grid-max", type=float, default=1.0)
    p.add_argument("--grid-points", type=int, default=21)
    _add_common(p)
    p.set_defaults(func=cmd_scan)

    p = subs.add_parser("check13", help="randomized 13-moment property checks")
    p.add_argument("--n-states", type=int, default=100)
    _add_common(p)
    p.set_defaults(func=cmd_check13)

    p = subs.add_parser("checknd", help="randomized multi-dimensional checks")
    p.add_argument("--dim", type=int, default=2, choices=(2, 3))
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--kind", choices=("classic", "generalized", "both"),
                   default="both")
    p.add_argument("--n-states", type=int, default=20)
    p.add_argument("--n-directions", type=int, default=20)
    _add_common(p)
    p.set_defaults(func=cmd_checknd)

    p = subs.add_parser("simulate", help="run the 1D finite-volume solver")
    p.add_argument("--config", required=True, help="run configuration JSON")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True,
                   help="output prefix for snapshots and metadata")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_simulate)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"hymo: validation error: {exc}", file=sys.stderr)
        return 2
    except (RuntimeError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"hymo: numerical failure: {exc}", file=sys.stderr)
        return 3
