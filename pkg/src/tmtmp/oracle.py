"""Random atomic measures with known moments, used as a differential oracle."""

import numpy as np

from .model import solve_model
from .moments import MomentSequence
from .resolvent import (
    AtomicMeasure,
    SchurParameter,
    atomic_measure,
    measure_transform,
    transform_eval,
    verify_moments,
)

TWO_PI = 2.0 * np.pi


def random_unitary(rng, n):
    """Haar-distributed ``n x n`` unitary (QR of a complex Gaussian)."""
    if n == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_measure(rng, n_atoms, N):
    """``n_atoms`` atoms at uniform angles with random PSD weights of random rank."""
    thetas = np.sort(rng.uniform(0.0, TWO_PI, n_atoms))
    weights = []
    for _ in range(n_atoms):
        k = int(rng.integers(1, N + 1))
        G = (rng.standard_normal((N, k)) + 1j * rng.standard_normal((N, k))) / np.sqrt(2 * N)
        weights.append(G @ G.conj().T)
    return AtomicMeasure(thetas, np.array(weights).reshape(n_atoms, N, N))


def moments_of(m, d):
    """``S_n = sum_a e^{i n theta_a} W_a`` for ``n = 0..d``."""
    return MomentSequence(np.stack([m.moment(n) for n in range(d + 1)]))


def random_disk_points(rng, n, radius=0.9):
    return rng.uniform(0.0, radius, n) * np.exp(1j * rng.uniform(0.0, TWO_PI, n))


def roundtrip(n_atoms, N, d, seed, n_zeta=50, tol=1e-8, transform_tol=1e-9):
    """Moments of a random measure -> model -> random unitary solution -> checks.

    Returns a JSON-ready report. ``pass`` requires moment residuals below
    ``tol`` and agreement of the resolvent and atomic-sum transforms below
    ``transform_tol`` at ``n_zeta`` random points with ``|zeta| <= 0.9``.
    """
    rng = np.random.default_rng(seed)
    source = random_measure(rng, n_atoms, N)
    s = moments_of(source, d)
    model = solve_model(s)
    p = SchurParameter.constant(random_unitary(rng, model.delta))
    sol = atomic_measure(model, p)
    rep = verify_moments(sol, s, tol)
    zetas = random_disk_points(rng, n_zeta)
    terr = max(
        float(np.abs(transform_eval(model, p, z) - measure_transform(sol, z)).max()) for z in zetas
    )
    out = {
        "atoms": n_atoms,
        "dim": N,
        "order": d,
        "seed": seed,
        "rank": model.r,
        "tau": model.tau,
        "delta": model.delta,
        "residuals": rep.residuals,
        "tol": tol,
        "transform_error": terr,
        "transform_tol": transform_tol,
    }
    ok = rep.passed and terr < transform_tol
    if model.delta == 0:
        # determinate: the unique solution must be the source measure
        serr = max(
            float(np.abs(measure_transform(source, z) - measure_transform(sol, z)).max()) for z in zetas
        )
        out["source_error"] = serr
        ok = ok and serr < transform_tol
    out["pass"] = bool(ok)
    return out
