"""Command-line front end.

Exit codes: 0 success, 1 input error, 2 moments not solvable (T_d not PSD),
3 gap necessary condition failed, 4 no gap candidate found (inconclusive),
5 residual check failed.
"""

import argparse
import logging
import sys

import numpy as np

from . import example21, io, oracle
from .gap import (
    GRID_N,
    MARGIN_TOL,
    class_check,
    constant_candidate_search,
    gap_mass,
    regular_type_certificate,
)
from .model import build_isometry, build_model_space
from .moments import PSD_TOL, build_toeplitz, psd_check
from .resolvent import SchurParameter, atomic_measure, transform_evaluator, verify_moments

log = logging.getLogger("tmtmp")

EXIT_OK, EXIT_INPUT, EXIT_UNSOLVABLE, EXIT_NECESSARY, EXIT_NO_CANDIDATE, EXIT_RESIDUAL = range(6)

CONVENTION = "G[k][j] = integral of 1/(1 - zeta e^{it}) d m_{k,j}(t); the transform of dM^T is its transpose"


class InputError(Exception):
    pass


def _emit(obj, out):
    text = io.dumps(obj) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_moments(path):
    try:
        return io.moments_from_json(io.load(path))
    except OSError as exc:
        raise InputError(str(exc)) from exc
    except io.SchemaError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _model(s, tol):
    t = build_toeplitz(s)
    try:
        rep = psd_check(t, tol)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    if not rep.solvable:
        return rep, None
    return rep, build_isometry(build_model_space(t, tol))


def _parameter(args, delta):
    if getattr(args, "unitary", None):
        try:
            F = io.decode_matrix(io.load(args.unitary)["F"])
        except (OSError, KeyError, io.SchemaError) as exc:
            raise InputError(f"{args.unitary}: {exc}") from exc
        if F.shape != (delta, delta):
            raise InputError(f"parameter has shape {F.shape}, the problem needs ({delta}, {delta})")
        return SchurParameter.constant(F)
    return SchurParameter.phase(args.phase, delta)


def cmd_check(args):
    s = _load_moments(args.moments)
    rep, model = _model(s, args.tol)
    out = {"solvable": rep.solvable, "rank": rep.rank, "min_eigenvalue": rep.min_eigenvalue}
    if model is not None:
        out.update(tau=model.tau, delta=model.delta, indeterminate=model.delta >= 1)
    _emit(out, args.out)
    return EXIT_OK if rep.solvable else EXIT_UNSOLVABLE


def _solve(s, model, p, tol):
    m = atomic_measure(model, p)
    return m, verify_moments(m, s, tol)


def cmd_solve(args):
    s = _load_moments(args.moments)
    rep, model = _model(s, args.tol)
    if model is None:
        _emit({"solvable": False, "min_eigenvalue": rep.min_eigenvalue}, args.out)
        return EXIT_UNSOLVABLE
    if model.delta == 0:
        if args.unitary or args.phase:
            log.warning("moment problem is determinate; the parameter is ignored")
        p = SchurParameter.constant(np.zeros((0, 0)))
    else:
        p = _parameter(args, model.delta)
        if not p.is_unitary():
            raise InputError("the parameter must be unitary")
    m, res = _solve(s, model, p, args.residual_tol)
    _emit({**io.measure_to_json(m), **res.to_json(), "convention": CONVENTION}, args.out)
    return EXIT_OK if res.passed else EXIT_RESIDUAL


def _parse_zeta(text):
    try:
        re_, im_ = (float(x) for x in text.split(","))
    except ValueError as exc:
        raise InputError(f"bad point {text!r}; expected 're,im'") from exc
    return complex(re_, im_)


def cmd_transform(args):
    s = _load_moments(args.moments)
    rep, model = _model(s, args.tol)
    if model is None:
        _emit({"solvable": False, "min_eigenvalue": rep.min_eigenvalue}, args.out)
        return EXIT_UNSOLVABLE
    p = _parameter(args, model.delta)
    zetas = [_parse_zeta(z) for z in (args.zeta or ["0,0"])]
    if any(abs(z) >= 1 for z in zetas):
        raise InputError("transform points must lie in the open unit disk")
    try:
        G = transform_evaluator(model, p)(np.array(zetas))
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    values = [{"zeta": io.encode_complex(z), "G": io.encode_matrix(g)} for z, g in zip(zetas, G)]
    _emit({"convention": CONVENTION, "values": values}, args.out)
    return EXIT_OK


def _gap(args):
    try:
        if args.gap_file:
            return io.gap_from_json(io.load(args.gap_file))
        if args.gap:
            return io.parse_gap(args.gap)
    except (OSError, ValueError) as exc:
        raise InputError(str(exc)) from exc
    raise InputError("give --gap 'start,end;...' or --gap-file")


def cmd_gap_check(args):
    s = _load_moments(args.moments)
    g = _gap(args)
    rep, model = _model(s, args.tol)
    if model is None:
        _emit({"solvable": False, "min_eigenvalue": rep.min_eigenvalue}, args.out)
        return EXIT_UNSOLVABLE
    out = {"gap": g.to_json(), "delta": model.delta, "grid_certified": True}
    if model.delta == 0:
        m, res = _solve(s, model, SchurParameter.constant(np.zeros((0, 0))), args.residual_tol)
        _, mass = gap_mass(m, g)
        ok = mass <= args.residual_tol
        out.update(
            verdict="determinate",
            gap_satisfied=ok,
            gap_mass=mass,
            measure=io.measure_to_json(m),
            report=res.to_json(),
        )
        _emit(out, args.out)
        return EXIT_OK if ok else EXIT_NECESSARY

    reg = regular_type_certificate(model, g, args.grid, args.margin_tol)
    out.update(
        grid=[io.encode_complex(z) for z in reg.zetas],
        regularity_margin=reg.margin.tolist(),
        w_tilde=[io.encode_matrix(W) if np.isfinite(W).all() else None for W in reg.w],
        candidate=None,
    )
    if not reg.certified:
        out["verdict"] = "necessary_failed"
        _emit(out, args.out)
        return EXIT_NECESSARY
    cand = constant_candidate_search(
        model, g, args.grid, args.attempts, args.margin_tol, args.seed, regularity=reg
    )
    if not cand.found:
        out.update(verdict="no_candidate_found", best_margin=cand.margin)
        _emit(out, args.out)
        return EXIT_NO_CANDIDATE
    p = SchurParameter.constant(cand.F)
    check = class_check(model, g, p, args.grid, args.margin_tol, regularity=reg)
    m, res = _solve(s, model, p, args.residual_tol)
    _, mass = gap_mass(m, g)
    out.update(
        verdict="candidate_found",
        candidate={"F": io.encode_matrix(cand.F), "margin": cand.margin, "min_abs_det": cand.min_abs_det},
        class_check=check.to_json(),
        measure=io.measure_to_json(m),
        report=res.to_json(),
        gap_mass=mass,
    )
    _emit(out, args.out)
    return EXIT_OK if res.passed else EXIT_RESIDUAL


def cmd_example21(args):
    checks = example21.run()
    for name, ok, detail in checks:
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    return EXIT_OK if all(ok for _, ok, _ in checks) else EXIT_RESIDUAL


def cmd_oracle_roundtrip(args):
    if args.atoms * args.dim < 1 or args.order < 1:
        raise InputError("need --atoms >= 1, --dim >= 1, --order >= 1")
    rep = oracle.roundtrip(args.atoms, args.dim, args.order, args.seed)
    _emit(rep, args.out)
    return EXIT_OK if rep["pass"] else EXIT_RESIDUAL


def _positive(kind):
    def conv(text):
        v = kind(text)
        if v <= 0:
            raise argparse.ArgumentTypeError("must be positive")
        return v

    return conv


def _grid_size(text):
    v = int(text)
    if v < 16:
        raise argparse.ArgumentTypeError("grid size must be at least 16")
    return v


def build_parser():
    parser = argparse.ArgumentParser(prog="tmtmp", description="Truncated matrix trigonometric moment problem with gaps")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, moments=True):
        if moments:
            p.add_argument("moments", help="moment file (JSON)")
            p.add_argument("--tol", type=_positive(float), default=PSD_TOL, help="relative PSD / rank tolerance")
        p.add_argument("--out", help="write JSON here instead of standard output")

    def param(p):
        grp = p.add_mutually_exclusive_group()
        grp.add_argument("--phase", type=float, default=0.0, help="constant parameter e^{i phase} I")
        grp.add_argument("--unitary", help="JSON file {'F': matrix} with a constant unitary parameter")

    p = sub.add_parser("check", help="solvability, rank and deficiency")
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("solve", help="atomic solution for a constant unitary parameter")
    common(p)
    param(p)
    p.add_argument("--residual-tol", type=_positive(float), default=1e-8)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("transform", help="evaluate the solution transform G(zeta)")
    common(p)
    param(p)
    p.add_argument("--zeta", action="append", help="point 're,im' in the open disk (repeatable)")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("gap-check", help="certify solvability with an open gap")
    common(p)
    p.add_argument("--gap", help="arcs as 'start,end;start,end' (radians, counterclockwise, open)")
    p.add_argument("--gap-file", help="gap JSON file")
    p.add_argument("--grid", type=_grid_size, default=GRID_N, help="grid points per arc")
    p.add_argument("--attempts", type=_positive(int), default=None)
    p.add_argument("--margin-tol", type=_positive(float), default=MARGIN_TOL)
    p.add_argument("--residual-tol", type=_positive(float), default=1e-8)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gap_check)

    p = sub.add_parser("example21", help="built-in N=3, d=1 regression")
    p.set_defaults(func=cmd_example21)

    p = sub.add_parser("oracle-roundtrip", help="random-measure differential test")
    common(p, moments=False)
    p.add_argument("--atoms", type=int, default=10)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--order", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_oracle_roundtrip)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except InputError as exc:
        log.error("%s", exc)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
