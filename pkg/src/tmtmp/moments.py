"""Moment data, the block-Toeplitz matrix T_d and the basic solvability test."""

from dataclasses import dataclass

import numpy as np

#: Default relative tolerance of :func:`psd_check`.
PSD_TOL = 1e-10


@dataclass(frozen=True)
class MomentSequence:
    """Matrix moments ``S[0], ..., S[d]``, each ``N x N`` complex.

    ``S`` is stored as given (no symmetrisation), as a read-only
    ``(d+1, N, N)`` complex array.
    """

    S: np.ndarray

    def __post_init__(self):
        S = np.array(self.S, dtype=np.complex128)
        if S.ndim != 3 or S.shape[1] != S.shape[2] or S.shape[1] == 0:
            raise ValueError(f"moments must be a list of square matrices, got shape {S.shape}")
        if S.shape[0] < 2:
            raise ValueError("at least two moments are required (d >= 1)")
        S.setflags(write=False)
        object.__setattr__(self, "S", S)

    @classmethod
    def from_list(cls, mats):
        mats = [np.asarray(M) for M in mats]
        shapes = {M.shape for M in mats}
        if len(shapes) != 1:
            raise ValueError(f"moment matrices have mismatched shapes: {sorted(shapes)}")
        return cls(np.stack(mats))

    @property
    def N(self):
        return self.S.shape[1]

    @property
    def d(self):
        return self.S.shape[0] - 1


def hermitian_extend(S):
    """Full moment table ``S_{-d}, ..., S_d`` with ``S_{-k} = S_k^*``.

    Returns a ``(2d+1, N, N)`` array whose entry ``k + d`` is ``S_k``.
    ``S_0`` is passed through unchanged.
    """
    if isinstance(S, MomentSequence):
        S = S.S
    else:
        S = MomentSequence.from_list(S).S
    d = S.shape[0] - 1
    out = np.empty((2 * d + 1,) + S.shape[1:], dtype=np.complex128)
    out[d:] = S
    for k in range(1, d + 1):
        out[d - k] = S[k].conj().T
    return out


@dataclass(frozen=True)
class ToeplitzGram:
    """Block-Toeplitz Gram matrix ``T_d = (S_{i-j})``."""

    entries: np.ndarray
    N: int
    d: int

    @property
    def dim(self):
        return (self.d + 1) * self.N

    def gamma(self, n, m):
        return self.entries[n, m]


def build_toeplitz(m):
    """Assemble ``T_d`` by copying moment entries (no arithmetic)."""
    full = hermitian_extend(m)
    N, d = m.N, m.d
    T = np.empty(((d + 1) * N, (d + 1) * N), dtype=np.complex128)
    for i in range(d + 1):
        for j in range(d + 1):
            T[i * N : (i + 1) * N, j * N : (j + 1) * N] = full[d + i - j]
    T.setflags(write=False)
    return ToeplitzGram(T, N, d)


@dataclass(frozen=True)
class PSDReport:
    solvable: bool
    min_eigenvalue: float
    rank: int


def check_hermitian(T, tol=PSD_TOL):
    scale = max(1.0, float(np.abs(T).max(initial=0.0)))
    err = float(np.abs(T - T.conj().T).max(initial=0.0))
    if err > tol * scale:
        raise ValueError(f"Toeplitz matrix is not Hermitian (max asymmetry {err:.3e})")


def psd_check(t, tol=PSD_TOL):
    """Decide ``T_d >= 0`` numerically.

    ``solvable`` holds when the smallest eigenvalue is at least
    ``-tol * max(1, largest eigenvalue)``; ``rank`` counts eigenvalues above
    ``tol * largest eigenvalue``.
    """
    T = t.entries if isinstance(t, ToeplitzGram) else np.asarray(t)
    check_hermitian(T, tol)
    w = np.linalg.eigvalsh(T)
    top = float(w[-1])
    solvable = bool(w[0] >= -tol * max(1.0, top))
    rank = int(np.count_nonzero(w > tol * top)) if top > 0 else 0
    return PSDReport(solvable, float(w[0]), rank)
