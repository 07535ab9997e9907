"""Hot numeric kernels.

Every kernel exists twice: a loop-style version compiled with numba
(``*_numba``) and a vectorised numpy version (``*_numpy``). The public names
(:func:`gram_schmidt`, :func:`zeta_scan`, :func:`phase_scan`) are bound to one
of them at import time according to :data:`tmtmp._jit.USE_NUMBA`.
"""

import numpy as np

from ._jit import USE_NUMBA, njit

#: Relative drop threshold of the Gram-Schmidt procedure.
DROP_TOL = 1e-8


# ---------------------------------------------------------------------------
# Gram-Schmidt with one reorthogonalisation pass
# ---------------------------------------------------------------------------

@njit
def gram_schmidt_numba(basis, cand, drop_tol, floor):
    r = cand.shape[0]
    q0 = basis.shape[1]
    m = cand.shape[1]
    out = np.empty((r, q0 + m), dtype=np.complex128)
    for i in range(q0):
        for a in range(r):
            out[a, i] = basis[a, i]
    kept = np.empty(m, dtype=np.int64)
    q = q0
    nk = 0
    for j in range(m):
        v = cand[:, j].copy()
        n0 = 0.0
        for a in range(r):
            n0 += v[a].real * v[a].real + v[a].imag * v[a].imag
        n0 = np.sqrt(n0)
        for _ in range(2):
            for i in range(q):
                c = 0.0 + 0.0j
                for a in range(r):
                    c += np.conj(out[a, i]) * v[a]
                for a in range(r):
                    v[a] -= c * out[a, i]
        nv = 0.0
        for a in range(r):
            nv += v[a].real * v[a].real + v[a].imag * v[a].imag
        nv = np.sqrt(nv)
        if nv > drop_tol * max(n0, floor):
            for a in range(r):
                out[a, q] = v[a] / nv
            q += 1
            kept[nk] = j
            nk += 1
    return out[:, q0:q].copy(), kept[:nk].copy()


def gram_schmidt_numpy(basis, cand, drop_tol, floor):
    r = cand.shape[0]
    cols = []
    kept = []
    Q = np.array(basis, dtype=np.complex128).reshape(r, -1)
    for j in range(cand.shape[1]):
        v = np.array(cand[:, j], dtype=np.complex128)
        n0 = np.linalg.norm(v)
        for _ in range(2):
            v = v - Q @ (Q.conj().T @ v)
        nv = np.linalg.norm(v)
        if nv > drop_tol * max(n0, floor):
            v = v / nv
            cols.append(v)
            kept.append(j)
            Q = np.column_stack([Q, v])
    new = np.array(cols, dtype=np.complex128).T.reshape(r, len(cols))
    return new, np.array(kept, dtype=np.int64)


# ---------------------------------------------------------------------------
# Per-zeta scan: bases of M_zeta(A), N_zeta(A), regularity and S/Q matrices
# ---------------------------------------------------------------------------

@njit
def zeta_scan_numba(X, N, d, dom, Aop, U3, V3, zetas, drop_tol, floor):
    r = X.shape[0]
    tau = dom.shape[1]
    delta = U3.shape[1]
    m = zetas.shape[0]
    tau_t = np.zeros(m, dtype=np.int64)
    n_plus = np.zeros(m, dtype=np.int64)
    margin = np.zeros(m)
    ms = np.zeros((m, delta, delta), dtype=np.complex128)
    mq = np.zeros((m, delta, delta), dtype=np.complex128)
    empty = np.zeros((r, 0), dtype=np.complex128)
    Adom = Aop @ dom
    head = np.ascontiguousarray(X[:, :N])
    for t in range(m):
        z = zetas[t]
        cand = np.ascontiguousarray(X[:, : d * N] - z * X[:, N:])
        g, _ = gram_schmidt_numba(empty, cand, drop_tol, floor)
        k = g.shape[1]
        tau_t[t] = k
        if k != tau or tau == 0:
            continue
        B = np.ascontiguousarray(g.conj().T @ (dom - z * Adom))
        _, s, _ = np.linalg.svd(B)
        margin[t] = s[s.shape[0] - 1]
        gp, _ = gram_schmidt_numba(g, head, drop_tol, floor)
        n_plus[t] = gp.shape[1]
        if gp.shape[1] != delta:
            continue
        ms[t] = U3.conj().T @ gp
        mq[t] = V3.conj().T @ gp
    return tau_t, margin, n_plus, ms, mq


def zeta_scan_numpy(X, N, d, dom, Aop, U3, V3, zetas, drop_tol, floor):
    r = X.shape[0]
    tau = dom.shape[1]
    delta = U3.shape[1]
    m = zetas.shape[0]
    tau_t = np.zeros(m, dtype=np.int64)
    n_plus = np.zeros(m, dtype=np.int64)
    margin = np.zeros(m)
    ms = np.zeros((m, delta, delta), dtype=np.complex128)
    mq = np.zeros((m, delta, delta), dtype=np.complex128)
    empty = np.zeros((r, 0), dtype=np.complex128)
    Adom = Aop @ dom
    for t, z in enumerate(zetas):
        g, _ = gram_schmidt_numpy(empty, X[:, : d * N] - z * X[:, N:], drop_tol, floor)
        tau_t[t] = g.shape[1]
        if g.shape[1] != tau or tau == 0:
            continue
        margin[t] = np.linalg.svd(g.conj().T @ (dom - z * Adom), compute_uv=False)[-1]
        gp, _ = gram_schmidt_numpy(g, X[:, :N], drop_tol, floor)
        n_plus[t] = gp.shape[1]
        if gp.shape[1] != delta:
            continue
        ms[t] = U3.conj().T @ gp
        mq[t] = V3.conj().T @ gp
    return tau_t, margin, n_plus, ms, mq


# ---------------------------------------------------------------------------
# Scalar phase scan for the constant-unitary candidate search (delta == 1)
# ---------------------------------------------------------------------------

@njit
def phase_scan_numba(w, seg_ok, phases):
    m = w.shape[0]
    P = phases.shape[0]
    point_min = np.empty(P)
    seg_bound = np.empty(P)
    wr = w.real.copy()
    wi = w.imag.copy()
    step = np.empty(max(m - 1, 0))
    for j in range(1, m):
        step[j - 1] = np.sqrt((wr[j] - wr[j - 1]) ** 2 + (wi[j] - wi[j - 1]) ** 2)
    for p in range(P):
        fr = np.cos(phases[p])
        fi = np.sin(phases[p])
        prev = np.sqrt((fr - wr[0]) ** 2 + (fi - wi[0]) ** 2)
        pm = prev
        sb = np.inf
        for j in range(1, m):
            cur = np.sqrt((fr - wr[j]) ** 2 + (fi - wi[j]) ** 2)
            if cur < pm:
                pm = cur
            if seg_ok[j - 1]:
                b = 0.5 * (prev + cur) - step[j - 1]
                if b < sb:
                    sb = b
            prev = cur
        point_min[p] = pm
        seg_bound[p] = min(sb, pm)
    return point_min, seg_bound


def phase_scan_numpy(w, seg_ok, phases, chunk=256):
    P = phases.shape[0]
    point_min = np.empty(P)
    seg_bound = np.empty(P)
    step = np.abs(np.diff(w))
    for lo in range(0, P, chunk):
        F = np.exp(1j * phases[lo : lo + chunk])[:, None]
        dist = np.abs(F - w[None, :])
        pm = dist.min(axis=1)
        pair = 0.5 * (dist[:, :-1] + dist[:, 1:]) - step[None, :]
        pair = np.where(seg_ok[None, :], pair, np.inf)
        sb = pair.min(axis=1) if pair.shape[1] else np.full(pm.shape, np.inf)
        point_min[lo : lo + chunk] = pm
        seg_bound[lo : lo + chunk] = np.minimum(sb, pm)
    return point_min, seg_bound


if USE_NUMBA:
    gram_schmidt = gram_schmidt_numba
    zeta_scan = zeta_scan_numba
    phase_scan = phase_scan_numba
else:
    gram_schmidt = gram_schmidt_numpy
    zeta_scan = zeta_scan_numpy
    phase_scan = phase_scan_numpy

__all__ = [
    "DROP_TOL",
    "gram_schmidt",
    "gram_schmidt_numba",
    "gram_schmidt_numpy",
    "zeta_scan",
    "zeta_scan_numba",
    "zeta_scan_numpy",
    "phase_scan",
    "phase_scan_numba",
    "phase_scan_numpy",
]
