"""Command-line interface.

Each subcommand wraps one library operation, prints a report and exits
with 0 when every check passes, 1 when a check fails (the report is still
printed) and 2 on malformed input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import dilation, fundamental, generators, hardy, io, mu
from .errors import GammaLabError, ShapeError
from .kernel import operator_norm
from .report import Report

A_MU = "mu_E(A) bracketed by phase search and similarity scaling"
A_SYM = "symmetrization of a matrix into domain coordinates"
A_THETA = "Theta(z) = -T + z D_{T*} sum_n z^n T*^n D_T"
A_WPROP = "W*W + M_Theta M_Theta* = I on the truncated Hardy space"
A_INTER = "Theta intertwines the two pencil families"
A_GATE = "contraction gates on the tuple"


class UsageError(Exception):
    pass


def _emit(args, payload: dict, report: Report | None) -> int:
    if args.json:
        out = dict(payload)
        if report is not None:
            out["report"] = report.to_dict()
        print(json.dumps(io.to_jsonable(out), indent=1))
    else:
        for k, v in payload.items():
            if k != "command":
                print(f"{k}: {_fmt(v)}")
        if report is not None:
            print(report.format())
    return 0 if report is None or report.passed else 1


def _fmt(v):
    if isinstance(v, np.ndarray):
        return np.array2string(v, precision=6, suppress_small=True)
    return v


def _echo(args) -> dict:
    return {"command": " ".join(sys.argv[1:]) if sys.argv else args.cmd}


# subcommands ------------------------------------------------------------


def cmd_mu(args) -> int:
    st = mu.BlockStructure.parse(args.structure)
    A = io.read_matrix(args.matrix)
    b = mu.mu_bounds(A, st, args.grid, args.iters)
    rep = Report("mu bounds")
    rep.add("lower<=upper", max(0.0, b.lower - b.upper), args.tol, A_MU)
    payload = _echo(args) | {"lower": b.lower, "upper": b.upper, "relative_gap": b.relative_gap}
    return _emit(args, payload, rep)


def cmd_symmetrize(args) -> int:
    variant = {"3311": "E3311", "3212": "E3212", "2211": "E2211"}[args.variant]
    p = mu.SYMMETRIZE[variant](io.read_matrix(args.matrix))
    return _emit(args, _echo(args) | {"variant": variant, "coords": p.coords}, None)


def cmd_verify(args) -> int:
    t = io.read_tuple(args.tuple)
    gates = Report("contraction gates")
    bounds = [1.0] * 7 if t.variant == "gamma7" else [1.0, 2.0, 1.0, 2.0, 1.0]
    for name, M, b in zip(t.names, t.mats, bounds):
        gates.add(f"||{name}||<={b:g}", max(0.0, operator_norm(M) - b), args.tol, A_GATE)
    gates.add("commutation", t.commutation_residual, args.tol, A_GATE)
    if args.check == "contraction":
        rep = gates
    elif args.check == "isometry":
        rep = (dilation.gamma_isometry_check7 if t.variant == "gamma7" else dilation.gamma_isometry_check5)(t, args.tol)
    else:
        rep = (dilation.gamma_unitary_check7 if t.variant == "gamma7" else dilation.gamma_unitary_check5)(t.mats, args.tol, args.seed)
    if rep is not gates:
        rep.extend(gates)
    return _emit(args, _echo(args) | {"variant": t.variant, "n": t.n}, rep)


def cmd_fundamental(args) -> int:
    t = io.read_tuple(args.tuple)
    if t.variant == "gamma7":
        f = fundamental.solve_fundamental7(t, args.tol)
        rep = f.report(args.tol)
        rec = fundamental.verify_recurrence7(t, f)
        ops = [f.ambient(i) for i in range(1, 7)]
        names = [f"F{i}" for i in range(1, 7)]
    else:
        f = fundamental.solve_fundamental5(t, args.tol)
        rep = f.report(args.tol)
        rec = fundamental.verify_recurrence5(t, f)
        ops = [f.basis.embed(x) for x in f.as_list()]
        names = ["G1", "G2", "Gt1", "Gt2"]
    rep.add("recurrences", float(np.max(rec, initial=0.0)), args.tol, fundamental.ANCHOR_REC7 if t.variant == "gamma7" else fundamental.ANCHOR_REC5)
    payload = _echo(args) | {"rank": f.rank, "operators": {k: v for k, v in zip(names, ops)}}
    return _emit(args, payload, rep)


def cmd_theta(args) -> int:
    th = hardy.theta_series(io.read_matrix(args.matrix), args.terms, args.convention)
    payload = _echo(args) | {
        "terms": th.K,
        "tail_bound": th.tail_bound,
        "coefficients": list(th.coefficients),
    }
    return _emit(args, payload, None)


def cmd_wprop(args) -> int:
    T = io.read_matrix(args.matrix)
    res = hardy.w_property_residual(T, args.levels, convention=args.convention)
    tail = operator_norm(np.linalg.matrix_power(T, args.levels))
    rep = Report("W property")
    rep.add("W*W+M_Theta M_Theta*=I", res, max(args.tol, 2 * tail), A_WPROP)
    return _emit(args, _echo(args) | {"levels": args.levels, "tail": tail}, rep)


def cmd_intertwine(args) -> int:
    T7 = io.read_matrix(args.t7)
    F, Ft = io.read_symbols(args.f), io.read_symbols(args.ftilde)
    th = hardy.theta_series(T7, args.deg)
    if len(F) == 6 and len(Ft) == 6:
        res = hardy.intertwine_residual7(Ft, F, th, args.deg)
    elif len(F) == 4 and len(Ft) == 4:
        res = hardy.intertwine_residual5(Ft, F, th, args.deg)
    else:
        raise UsageError("symbol files need 6 (7-tuple) or 4 (5-tuple) matrices each")
    rep = Report("Theta intertwining")
    for i, row in enumerate(res, start=1):
        rep.add(f"pencil {i}", float(np.max(row)), args.tol, A_INTER)
    return _emit(args, _echo(args), rep)


def cmd_schaffer(args) -> int:
    t = io.read_tuple(args.tuple)
    if t.variant == "gamma7":
        f = fundamental.solve_fundamental7(t, args.tol)
        d = dilation.schaffer7(t, f, args.levels, args.tol)
        corner = dilation.corner_recovery7(d, f)
    else:
        f = fundamental.solve_fundamental5(t, args.tol)
        d = dilation.schaffer5(t, f, args.levels, args.tol)
        corner = dilation.corner_recovery5(d, f)
    maxdeg = args.levels - 2 if args.maxdeg is None else args.maxdeg
    rep = Report("Schaffer dilation")
    rep.add("lift Pi X* = V* Pi", float(d.lift_residuals.max()), args.tol, dilation.A_LIFT)
    rep.add(f"dilation identity deg<={maxdeg}", dilation.dilation_identity_check(d, t, maxdeg, seed=args.seed), args.tol, dilation.A_DIL)
    rep.add("corner recovery", corner, args.tol, dilation.A_SM)
    payload = _echo(args) | {
        "dimension": d.pi.shape[0],
        "fiber_dim": d.fiber_dim,
        "boundary_defect": d.boundary_defect,
        "interior_defect": d.interior_defect,
    }
    return _emit(args, payload, rep)


def cmd_douglas(args) -> int:
    t = io.read_tuple(args.tuple)
    if t.variant != "gamma7":
        raise UsageError("douglas expects a gamma7 tuple")
    e = dilation.douglas_embedding(t, args.levels, args.tol)
    return _emit(args, _echo(args) | {"isometry_residual": e.isometry_residual}, e.report)


def cmd_canonical(args) -> int:
    t = io.read_tuple(args.tuple)
    canon = dilation.canonical_unitary7 if t.variant == "gamma7" else dilation.canonical_unitary5
    c = canon(t, args.tol, seed=args.seed)
    payload = _echo(args) | {"rank": c.rank}
    if c.spectra is not None:
        payload["joint_spectrum"] = c.spectra
    return _emit(args, payload, c.report)


def cmd_admissible(args) -> int:
    T7 = io.read_matrix(args.t7)
    Ft = io.read_symbols(args.ftilde)
    F = io.read_symbols(args.f) if args.f else None
    if len(Ft) == 6:
        r = dilation.admissible_construct7(T7, Ft, args.levels, args.tol, F)
    elif len(Ft) == 4:
        r = dilation.admissible_construct5(T7, Ft, args.levels, args.tol, F)
    else:
        raise UsageError("symbol file needs 6 or 4 matrices")
    if args.out:
        io.write_tuple(r.tuple, args.out)
    return _emit(args, _echo(args) | {"n": r.tuple.n}, r.report)


def cmd_gamma_unitary(args) -> int:
    syms = io.read_symbols(args.symbols)
    variant = {6: "gamma7", 4: "gamma5"}.get(len(syms))
    if variant is None:
        raise UsageError("symbol file needs 6 or 4 matrices")
    t = dilation.circulant_gamma_unitary(syms, args.modes, variant, args.form)
    if variant == "gamma7":
        rep = dilation.gamma_isometry_check7(t, args.tol)
        rep.extend(dilation.gamma_unitary_check7(t.mats, args.tol, args.seed))
    else:
        rep = dilation.gamma_isometry_check5(t, args.tol)
        rep.extend(dilation.gamma_unitary_check5(t.mats, args.tol, args.seed))
    if args.out:
        io.write_tuple(t, args.out)
    return _emit(args, _echo(args) | {"n": t.n}, rep)


def cmd_generate(args) -> int:
    spec = generators.GeneratorSpec(args.kind, args.seed, args.dim, args.levels)
    t = generators.generate(spec)
    io.write_tuple(t, args.out)
    return _emit(args, _echo(args) | {"kind": args.kind, "n": t.n, "out": args.out}, None)


# parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-8, help="residual threshold (default 1e-8)")
    common.add_argument("--json", action="store_true", help="machine-readable report")
    common.add_argument("--seed", type=int, default=0)

    p = argparse.ArgumentParser(prog="gammalab", description="Numerical checks for commuting operator tuples.")
    sub = p.add_subparsers(dest="cmd", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=fn)
        return sp

    sp = add("mu", cmd_mu, "bracket mu_E(A)")
    sp.add_argument("--structure", required=True, help='block structure "n;s;r1,..,rs"')
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--grid", type=int, default=64)
    sp.add_argument("--iters", type=int, default=64)

    sp = add("symmetrize", cmd_symmetrize, "domain coordinates of a matrix")
    sp.add_argument("--variant", required=True, choices=["3311", "3212", "2211"])
    sp.add_argument("--matrix", required=True)

    sp = add("verify", cmd_verify, "isometry, unitary or contraction checks on a tuple")
    sp.add_argument("--tuple", required=True)
    sp.add_argument("--check", choices=["isometry", "unitary", "contraction"], default="isometry")

    sp = add("fundamental", cmd_fundamental, "solve the fundamental equations")
    sp.add_argument("--tuple", required=True)

    sp = add("theta", cmd_theta, "characteristic function coefficients")
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--terms", type=int, required=True)
    sp.add_argument("--convention", choices=["classical", "literal"], default="classical")

    sp = add("wprop", cmd_wprop, "truncated W property residual")
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--levels", type=int, required=True)
    sp.add_argument("--convention", choices=["classical", "literal"], default="classical")

    sp = add("intertwine", cmd_intertwine, "Theta intertwining of two symbol families")
    sp.add_argument("--t7", required=True)
    sp.add_argument("--f", required=True)
    sp.add_argument("--ftilde", required=True)
    sp.add_argument("--deg", type=int, default=8)

    sp = add("schaffer", cmd_schaffer, "Schaffer dilation and its checks")
    sp.add_argument("--tuple", required=True)
    sp.add_argument("--levels", type=int, required=True)
    sp.add_argument("--maxdeg", type=int)

    sp = add("douglas", cmd_douglas, "Douglas embedding checks")
    sp.add_argument("--tuple", required=True)
    sp.add_argument("--levels", type=int, required=True)

    sp = add("canonical", cmd_canonical, "canonical unitary part")
    sp.add_argument("--tuple", required=True)

    sp = add("admissible", cmd_admissible, "converse construction from symbols")
    sp.add_argument("--t7", required=True)
    sp.add_argument("--ftilde", required=True)
    sp.add_argument("--f", help="optional partner symbols on the defect space of T7")
    sp.add_argument("--levels", type=int, required=True)
    sp.add_argument("--out")

    sp = add("gamma-unitary", cmd_gamma_unitary, "circulant unitary model from symbols")
    sp.add_argument("--symbols", required=True)
    sp.add_argument("--modes", type=int, required=True)
    sp.add_argument("--form", choices=["diagonal", "circulant"], default="diagonal")
    sp.add_argument("--out")

    sp = add("generate", cmd_generate, "write a generated tuple")
    sp.add_argument("--kind", required=True, choices=list(generators.KINDS))
    sp.add_argument("--dim", type=int, default=1)
    sp.add_argument("--levels", type=int, default=4)
    sp.add_argument("--out", required=True)
    return p


def _thread_limit():
    raw = os.environ.get("GAMMA_LAB_THREADS")
    if not raw:
        return None
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=int(raw))


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    limiter = _thread_limit()
    try:
        return args.func(args)
    except (UsageError, ShapeError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except GammaLabError as exc:
        # input rejected by a mathematical gate: a failed verification
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    finally:
        if limiter is not None:
            limiter.restore_original_limits()

if __name__ == "__main__":
    sys.exit(main())
