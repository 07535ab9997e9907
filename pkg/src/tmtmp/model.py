"""The finite-dimensional model space H and the isometric block shift A.

Coordinates: ``X[:, n]`` holds the coordinates of ``x_n`` in an orthonormal
frame of H. The inner product is linear in the first argument,
``inner(a, b) = b^H a``, so ``inner(X[:, n], X[:, m]) = gamma_{n,m}``, i.e.
``X^H X = conj(T_d)``.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .kernels import DROP_TOL
from .moments import PSD_TOL, build_toeplitz, check_hermitian


class NotRegularError(ValueError):
    """Raised when a point is not of regular type for the block shift."""


def inner(a, b):
    """``(a, b)_H`` for coordinate vectors, linear in ``a``."""
    return np.vdot(b, a)


@dataclass(frozen=True)
class ModelSpace:
    X: np.ndarray
    N: int
    d: int
    rank_tol: float = PSD_TOL

    @property
    def r(self):
        return self.X.shape[0]

    @property
    def floor(self):
        """Absolute norm floor used by every Gram-Schmidt pass."""
        return float(np.linalg.norm(self.X, axis=0).max(initial=0.0))

    def gram(self):
        """Matrix of ``(x_n, x_m)`` indexed ``[n, m]``."""
        return self.X.T @ self.X.conj()


def build_model_space(t, rank_tol=PSD_TOL):
    """Factor ``T_d`` through its dominant eigenspace.

    With ``T_d = V diag(w) V^H`` and ``r`` eigenvalues above
    ``rank_tol * max(w)``, the coordinates are ``X = diag(sqrt(w_r)) V_r^T``.
    """
    T = t.entries
    check_hermitian(T, rank_tol)
    w, V = np.linalg.eigh(T)
    top = float(w[-1])
    if w[0] < -rank_tol * max(1.0, top):
        raise ValueError(f"T_d is not positive semidefinite (min eigenvalue {w[0]:.3e})")
    keep = w > rank_tol * top if top > 0 else np.zeros_like(w, dtype=bool)
    X = np.sqrt(w[keep])[:, None] * V[:, keep].T
    X = X[::-1].copy()  # largest eigenvalue first
    X.setflags(write=False)
    return ModelSpace(X, t.N, t.d, rank_tol)


def _gs(basis, cand, floor):
    r = cand.shape[0]
    basis = np.ascontiguousarray(basis, dtype=np.complex128).reshape(r, -1)
    cand = np.ascontiguousarray(cand, dtype=np.complex128)
    return kernels.gram_schmidt(basis, cand, DROP_TOL, floor)


@dataclass(frozen=True)
class IsometryModel:
    """A together with its domain/range bases and the two defect bases.

    ``A_op`` is the ``r x r`` matrix acting as A on D(A) and as 0 on N_0(A);
    ``A_matrix`` is A written from ``domain_basis`` to ``range_basis``
    coordinates.
    """

    space: ModelSpace
    domain_basis: np.ndarray
    range_basis: np.ndarray
    A_op: np.ndarray
    A_matrix: np.ndarray
    defect0: np.ndarray
    defect_inf: np.ndarray

    @property
    def tau(self):
        return self.domain_basis.shape[1]

    @property
    def delta(self):
        return self.defect0.shape[1]

    @property
    def N(self):
        return self.space.N

    @property
    def d(self):
        return self.space.d

    @property
    def r(self):
        return self.space.r

    @property
    def head(self):
        """Coordinates of ``x_0, ..., x_{N-1}``."""
        return self.space.X[:, : self.N]


def build_isometry(s):
    """Construct A and its canonical bases by Gram-Schmidt.

    * domain basis from ``x_0 .. x_{dN-1}``;
    * range basis from ``x_N .. x_{(d+1)N-1}``;
    * N_0 basis continues the domain basis with ``x_{dN} .. x_{(d+1)N-1}``;
    * N_inf basis continues the range basis with ``x_0 .. x_{N-1}``.
    """
    X, N, d = s.X, s.N, s.d
    r = s.r
    floor = s.floor
    empty = np.zeros((r, 0), dtype=np.complex128)
    dom, _ = _gs(empty, X[:, : d * N], floor)
    rng, _ = _gs(empty, X[:, N:], floor)
    u, _ = _gs(dom, X[:, d * N :], floor)
    v, _ = _gs(rng, X[:, :N], floor)
    if u.shape[1] != v.shape[1]:
        raise ValueError(
            f"defect dimensions disagree (dim N_0 = {u.shape[1]}, dim N_inf = {v.shape[1]}); "
            "the numerical rank of T_d is ambiguous at this tolerance"
        )
    if dom.shape[1] + u.shape[1] != r:
        raise ValueError("domain and defect bases do not span H")
    Xd = X[:, : d * N]
    pinv = np.linalg.pinv(Xd, rcond=DROP_TOL) if Xd.size else np.zeros((0, r))
    A_op = X[:, N:] @ pinv
    A_matrix = rng.conj().T @ A_op @ dom
    for arr in (dom, rng, A_op, A_matrix, u, v):
        arr.setflags(write=False)
    return IsometryModel(s, dom, rng, A_op, A_matrix, u, v)


@dataclass(frozen=True)
class Deficiency:
    tau: int
    delta: int
    indeterminate: bool


def deficiency(model):
    return Deficiency(model.tau, model.delta, model.delta >= 1)


def m_zeta_basis(model, zeta):
    """Orthonormal basis of ``M_zeta(A) = (E - zeta A) D(A)``.

    Gram-Schmidt over ``x_k - zeta x_{k+N}``, ``k = 0 .. dN-1`` in order.
    May have fewer than ``tau`` columns (possibly none).
    """
    X, N, d = model.space.X, model.N, model.d
    empty = np.zeros((model.r, 0), dtype=np.complex128)
    g, _ = _gs(empty, X[:, : d * N] - zeta * X[:, N:], model.space.floor)
    return g


def n_zeta_basis(model, zeta):
    """Orthonormal basis of ``N_zeta(A) = H - M_zeta(A)``.

    Continues :func:`m_zeta_basis` with ``x_0, ..., x_{N-1}``. Raises
    :class:`NotRegularError` when the result does not have ``delta`` columns.

    At ``zeta = 0`` the vectors ``x_0, ..., x_{N-1}`` lie in ``M_0(A) = D(A)``
    and add nothing, so the continuation uses ``x_{dN}, ..., x_{(d+1)N-1}``
    instead, which reproduces the N_0 basis.
    """
    g = m_zeta_basis(model, zeta)
    X, N, d = model.space.X, model.N, model.d
    cont = X[:, d * N :] if zeta == 0 else model.head
    gp, _ = _gs(g, cont, model.space.floor)
    if g.shape[1] != model.tau or gp.shape[1] != model.delta:
        raise NotRegularError(
            f"zeta={zeta!r} is not of regular type (dim M_zeta = {g.shape[1]}, "
            f"tau = {model.tau}, dim N_zeta = {gp.shape[1]}, delta = {model.delta})"
        )
    return gp


def solve_model(moments, rank_tol=PSD_TOL):
    """Shortcut: moments -> :class:`IsometryModel`."""
    return build_isometry(build_model_space(build_toeplitz(moments), rank_tol))
