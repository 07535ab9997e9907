"""Built-in regression: N = 3, d = 1 moments with the gap l(1, -1)."""

import math

import numpy as np

from .gap import GapSet, conjugate_set, constant_candidate_search, gap_mass, make_arc, regular_type_certificate, szeta_qzeta
from .model import solve_model
from .moments import MomentSequence, build_toeplitz, psd_check
from .resolvent import SchurParameter, atomic_measure, transform_eval, verify_moments

S0 = np.array([[1, 1, 0], [1, 1, 0], [0, 0, 1]], dtype=np.complex128)
S1 = np.array([[1, 1, 0], [1, 1, 0], [0, 0, 0]], dtype=np.complex128)
TOL = 1e-10
SAMPLE_ZETAS = (0.0, 0.3, 0.5j, -0.4 + 0.2j, 0.9 * np.exp(2j), 0.1 - 0.7j, -0.85, 0.6 + 0.6j)


def moments():
    return MomentSequence.from_list([S0, S1])


def gap():
    return GapSet.of(make_arc(1, -1))


def closed_form_transform(zeta, F=1.0):
    """Closed form of the transform of ``dM^T`` for a constant parameter ``F``."""
    a = 1.0 / (1.0 - zeta)
    return np.array(
        [[a, a, 0], [a, a, 0], [0, 0, 1 + zeta**2 * F / (1 - zeta**2 * F)]], dtype=np.complex128
    )


def run(grid_n=16):
    """Return ``[(name, passed, detail), ...]`` for every regression check."""
    checks = []

    def add(name, ok, detail):
        checks.append((name, bool(ok), detail))

    s = moments()
    rep = psd_check(build_toeplitz(s))
    add("rank(T_1) = 3", rep.solvable and rep.rank == 3, f"rank={rep.rank}")
    model = solve_model(s)
    add("tau = 2, delta = 1", (model.tau, model.delta) == (2, 1), f"tau={model.tau} delta={model.delta}")

    zetas, _ = conjugate_set(gap()).grid(grid_n)
    err_s = err_q = err_w = 0.0
    for z in zetas:
        ms, mq = szeta_qzeta(model, z)
        err_s = max(err_s, abs(ms[0, 0] - z / math.sqrt(2)))
        err_q = max(err_q, abs(mq[0, 0] - 1 / math.sqrt(2)))
    reg = regular_type_certificate(model, gap(), grid_n)
    err_w = float(np.abs(reg.w[:, 0, 0] - zetas**-2.0).max())
    add("M_S = zeta/sqrt(2)", err_s <= TOL, f"max err {err_s:.2e}")
    add("M_Q = 1/sqrt(2)", err_q <= TOL, f"max err {err_q:.2e}")
    add("W~ = zeta^-2", err_w <= TOL, f"max err {err_w:.2e} over {zetas.size} points")

    one = SchurParameter.constant([[1.0]])
    err_g = max(
        float(np.abs(transform_eval(model, one, z).T - closed_form_transform(z)).max()) for z in SAMPLE_ZETAS
    )
    add("transform matches closed form (F = 1)", err_g <= TOL, f"max err {err_g:.2e}")

    cand = constant_candidate_search(model, gap())
    add("gap l(1,-1) solvable", cand.found, f"margin {cand.margin:.3e}")
    if cand.found:
        m = atomic_measure(model, SchurParameter.constant(cand.F))
        _, mass = gap_mass(m, gap())
        res = max(verify_moments(m, s).residuals)
        add("gap mass and moments", mass < TOL and res < TOL, f"gap mass {mass:.2e}, residual {res:.2e}")
    return checks
