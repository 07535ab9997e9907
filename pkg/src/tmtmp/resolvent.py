"""Solutions from Schur parameters: extensions, transforms and atomic measures.

Conventions
-----------
``G(zeta)[k, j] = integral 1/(1 - zeta e^{it}) dm_{k,j}(t)
= ((E - zeta (A + Phi_zeta))^{-1} x_k, x_j)``. Closed forms written
for the transform of ``dM^T`` correspond to ``G(zeta).T``.
Atom weights are indexed the same way: ``weight[k, j] = (P x_k, x_j)``.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

#: Angular distance below which eigenvalues of a unitary extension share an atom.
MERGE_TOL = 1e-9
#: Tolerance of the contraction / unitarity checks on parameters.
UNIT_TOL = 1e-10
TWO_PI = 2.0 * np.pi


@dataclass(frozen=True, eq=False)
class SchurParameter:
    """Matrix of ``Phi_zeta`` from the N_0 basis to the N_inf basis.

    Entry ``[j, k]`` is ``(Phi_zeta u_k, v_j)``. Either a constant matrix
    (``value``) or a callable ``func(zeta) -> (delta, delta) array``.
    """

    value: np.ndarray = None
    func: object = field(default=None, compare=False)

    def __post_init__(self):
        if (self.value is None) == (self.func is None):
            raise ValueError("give exactly one of a constant value or an evaluator")
        if self.value is not None:
            v = np.array(self.value, dtype=np.complex128)
            if v.ndim != 2 or v.shape[0] != v.shape[1]:
                raise ValueError(f"Schur parameter must be square, got shape {v.shape}")
            v.setflags(write=False)
            object.__setattr__(self, "value", v)

    @classmethod
    def constant(cls, value):
        return cls(value=value)

    @classmethod
    def phase(cls, phi, delta):
        """``e^{i phi} I_delta``."""
        return cls(value=np.exp(1j * phi) * np.eye(delta))

    @classmethod
    def evaluator(cls, func):
        return cls(func=func)

    @property
    def kind(self):
        return "constant" if self.value is not None else "evaluator"

    def at(self, zeta=None):
        if self.value is not None:
            return self.value
        try:
            F = np.asarray(self.func(zeta), dtype=np.complex128)
        except Exception as exc:
            raise ValueError(f"Schur parameter evaluator is undefined at zeta={zeta!r}") from exc
        if F.ndim == 0:
            F = F.reshape(1, 1)
        if not np.all(np.isfinite(F)):
            raise ValueError(f"Schur parameter evaluator is undefined at zeta={zeta!r}")
        return F

    def is_unitary(self, tol=UNIT_TOL):
        if self.value is None:
            return False
        F = self.value
        return bool(np.abs(F.conj().T @ F - np.eye(F.shape[0])).max(initial=0.0) <= tol)


def _check_contraction(F, delta, zeta=None):
    if F.shape != (delta, delta):
        raise ValueError(f"Schur parameter has shape {F.shape}, expected ({delta}, {delta})")
    if delta and np.linalg.norm(F, 2) > 1 + UNIT_TOL:
        raise ValueError(f"Schur parameter is not a contraction at zeta={zeta!r}")


def extend(model, p, zeta=None):
    """``r x r`` matrix of ``A + Phi`` (Phi acting N_0 -> N_inf)."""
    F = p.at(zeta) if isinstance(p, SchurParameter) else np.asarray(p, dtype=np.complex128)
    if F.shape != (model.delta, model.delta):
        raise ValueError(f"Schur parameter has shape {F.shape}, expected ({model.delta}, {model.delta})")
    return model.A_op + model.defect_inf @ F @ model.defect0.conj().T


def transform_eval(model, p, zeta):
    """``G(zeta)`` for ``|zeta| < 1`` (see module docstring for indexing)."""
    zeta = complex(zeta)
    if abs(zeta) >= 1:
        raise ValueError("transform_eval requires |zeta| < 1")
    F = p.at(zeta)
    _check_contraction(F, model.delta, zeta)
    U = extend(model, F)
    C = model.head
    try:
        R = np.linalg.solve(np.eye(model.r) - zeta * U, C)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - impossible for a contraction
        raise RuntimeError(f"singular resolvent at zeta={zeta!r}") from exc
    return (C.conj().T @ R).T


def transform_evaluator(model, p):
    """Vectorised ``zetas -> G(zetas)`` with shape ``(len(zetas), N, N)``."""
    C = model.head
    C_h = C.conj().T
    if p.kind == "constant":
        F = p.at()
        _check_contraction(F, model.delta)
        U = extend(model, F)
        # U is a contraction; a Schur form turns every solve into a triangular one
        Tm, Z = scipy.linalg.schur(U, output="complex")
        ZC = Z.conj().T @ C
        CZ = C_h @ Z
        eye = np.eye(model.r)

        def G(zetas):
            zetas = np.atleast_1d(np.asarray(zetas, dtype=np.complex128))
            out = np.empty((zetas.size, model.N, model.N), dtype=np.complex128)
            for i, z in enumerate(zetas):
                y = scipy.linalg.solve_triangular(eye - z * Tm, ZC)
                out[i] = (CZ @ y).T
            return out

        return G

    def G(zetas):
        zetas = np.atleast_1d(np.asarray(zetas, dtype=np.complex128))
        return np.stack([transform_eval(model, p, z) for z in zetas])

    return G


@dataclass(frozen=True, eq=False)
class AtomicMeasure:
    """Finitely many atoms ``(theta, weight)`` with ``theta`` in [0, 2pi)."""

    thetas: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        th = np.asarray(self.thetas, dtype=float).reshape(-1)
        W = np.asarray(self.weights, dtype=np.complex128)
        if W.ndim != 3 or W.shape[0] != th.size or W.shape[1] != W.shape[2]:
            raise ValueError("weights must have shape (n_atoms, N, N) matching thetas")
        th.setflags(write=False)
        W.setflags(write=False)
        object.__setattr__(self, "thetas", th)
        object.__setattr__(self, "weights", W)

    @property
    def N(self):
        return self.weights.shape[1]

    @property
    def atoms(self):
        return list(zip(self.thetas.tolist(), self.weights))

    def __len__(self):
        return self.thetas.size

    def moment(self, n):
        z = np.exp(1j * n * self.thetas)
        return np.einsum("a,aij->ij", z, self.weights)

    def total(self):
        return self.weights.sum(axis=0)


def _cluster_angles(theta, tol):
    """Group sorted angles in [0, 2pi) into clusters closer than ``tol``,
    joining the last cluster to the first across 0."""
    order = np.argsort(theta)
    groups = [[order[0]]]
    for a, b in zip(order[:-1], order[1:]):
        if theta[b] - theta[a] < tol:
            groups[-1].append(b)
        else:
            groups.append([b])
    if len(groups) > 1 and theta[order[0]] + TWO_PI - theta[order[-1]] < tol:
        groups[0] = groups.pop() + groups[0]
    return groups


def atomic_measure(model, p, merge_tol=MERGE_TOL):
    """Spectral measure of the unitary extension ``A + Phi`` seen from ``x_0..x_{N-1}``."""
    if p.kind != "constant" or not p.is_unitary():
        raise ValueError("atomic_measure requires a constant unitary Schur parameter")
    if p.value.shape != (model.delta, model.delta):
        raise ValueError(f"Schur parameter has shape {p.value.shape}, expected ({model.delta}, {model.delta})")
    U = extend(model, p)
    Tm, Z = scipy.linalg.schur(U, output="complex")
    lam = np.diag(Tm)
    theta = np.mod(np.angle(lam), TWO_PI)
    Y = Z.conj().T @ model.head  # row i: coordinates of x_k along eigenvector i
    thetas, weights = [], []
    for grp in _cluster_angles(theta, merge_tol):
        z = lam[grp].mean()
        th = float(np.mod(np.angle(z), TWO_PI))
        if th >= TWO_PI - 1e-15:
            th = 0.0
        Yg = Y[grp]
        thetas.append(th)
        weights.append((Yg.conj().T @ Yg).T)
    order = np.argsort(thetas, kind="stable")
    return AtomicMeasure(np.array(thetas)[order], np.array(weights)[order])


def measure_transform(m, zeta):
    """``sum_a weight_a / (1 - zeta e^{i theta_a})``."""
    zeta = complex(zeta)
    denom = 1.0 - zeta * np.exp(1j * m.thetas)
    if len(m) and np.min(np.abs(denom)) == 0.0:
        raise ValueError(f"zeta={zeta!r} coincides with an atom")
    if not len(m):
        return np.zeros((m.N, m.N), dtype=np.complex128)
    return np.einsum("a,aij->ij", 1.0 / denom, m.weights)


@dataclass(frozen=True)
class ResidualReport:
    residuals: list
    tol: float

    @property
    def passed(self):
        return all(r <= self.tol for r in self.residuals)

    def to_json(self):
        return {"residuals": list(self.residuals), "pass": self.passed, "tol": self.tol}


def verify_moments(m, s, tol=1e-8):
    """Largest entrywise error of each reproduced moment ``n = 0..d``."""
    if m.N != s.N:
        raise ValueError("measure and moments have different matrix sizes")
    res = [float(np.abs(m.moment(n) - s.S[n]).max()) for n in range(s.d + 1)]
    return ResidualReport(res, float(tol))


def invert_transform(G, S0, K=4096, r=None, samples_per_bin=8, tol=1e-9):
    """Histogram of a solution measure from its transform.

    ``G`` maps an array of points in the disk to the stacked ``N x N``
    transform values. The Hermitian part of ``2 G - S0`` at
    ``zeta = r e^{-it}`` is the Poisson smoothing of the measure at angle
    ``t``; averaging it over each of ``K`` equal arcs ``[2pi b/K, 2pi (b+1)/K)``
    and dividing by ``K`` gives the arc masses. Atoms sit at bin centres.
    """
    if r is None:
        r = 1.0 - TWO_PI / K
    if not 0 < r < 1:
        raise ValueError("radius must lie in (0, 1)")
    S0 = np.asarray(S0, dtype=np.complex128)
    n = K * samples_per_bin
    t = (np.arange(n) + 0.5) * (TWO_PI / n)
    vals = np.asarray(G(r * np.exp(-1j * t)), dtype=np.complex128)
    C = 2.0 * vals - S0[None]
    H = 0.5 * (C + np.conj(np.swapaxes(C, 1, 2)))
    scale = max(1.0, float(np.abs(H).max()))
    lo = np.linalg.eigvalsh(H).min()
    if lo < -tol * scale:
        raise ValueError(f"transform is not of Herglotz type (min eigenvalue {lo:.3e})")
    W = H.reshape(K, samples_per_bin, *S0.shape).mean(axis=1) / K
    centres = (np.arange(K) + 0.5) * (TWO_PI / K)
    return AtomicMeasure(centres, W)
