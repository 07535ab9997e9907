"""Open gaps on the unit circle and grid certificates for gap solvability.

Every "for all zeta in the conjugate gap" condition is checked on a grid of
interior points of each arc. Between two neighbouring grid points the
margins are bounded from below: if ``D`` moves from ``D_j`` to ``D_{j+1}``
along a path of length at most ``2 ||D_{j+1} - D_j||``, then
``sigma_min(D) >= (sigma_min(D_j) + sigma_min(D_{j+1})) / 2 - ||D_{j+1} - D_j||``
on the way. Verdicts are therefore grid-certified, not proofs.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .kernels import DROP_TOL
from .model import n_zeta_basis

TWO_PI = 2.0 * math.pi
#: Angles closer than this to an arc endpoint count as outside the (open) arc.
ENDPOINT_TOL = 1e-12
GRID_N = 1024
MARGIN_TOL = 1e-6
PHASE_ATTEMPTS = 4096
RANDOM_ATTEMPTS = 256
RADII = tuple(1.0 - 2.0 ** (-k) for k in range(4, 13))


def _wrap(theta):
    t = math.fmod(theta, TWO_PI)
    if t < 0:
        t += TWO_PI
    return 0.0 if t >= TWO_PI else t


@dataclass(frozen=True)
class Arc:
    """Open arc from ``start`` counterclockwise to ``end`` (radians in [0, 2pi))."""

    start: float
    end: float

    def __post_init__(self):
        s, e = _wrap(float(self.start)), _wrap(float(self.end))
        if s == e:
            raise ValueError("an arc needs distinct endpoints")
        object.__setattr__(self, "start", s)
        object.__setattr__(self, "end", e)

    @property
    def length(self):
        return self.end - self.start if self.end > self.start else self.end + TWO_PI - self.start

    def offset(self, theta):
        """Counterclockwise distance from ``start`` to ``theta``."""
        off = _wrap(theta) - self.start
        return off + TWO_PI if off < 0 else off

    def contains(self, theta, tol=ENDPOINT_TOL):
        off = self.offset(theta)
        return tol < off < self.length - tol

    def grid(self, n):
        """``n`` interior angles ``start + L (j+1)/(n+1)``."""
        j = np.arange(1, n + 1)
        return np.mod(self.start + self.length * j / (n + 1), TWO_PI)

    def to_json(self):
        return {"start": self.start, "end": self.end}


def make_arc(z, w):
    """The open arc ``l(z, w)`` from ``arg z`` counterclockwise to ``arg w``."""
    z, w = complex(z), complex(w)
    if abs(abs(z) - 1) > 1e-12 or abs(abs(w) - 1) > 1e-12:
        raise ValueError("arc endpoints must lie on the unit circle")
    if z == w:
        raise ValueError("arc endpoints must differ")
    return Arc(math.atan2(z.imag, z.real), math.atan2(w.imag, w.real))


@dataclass(frozen=True)
class GapSet:
    """Finite union of pairwise disjoint open arcs.

    ``mirrored`` marks the conjugate set ``{z : conj(z) in union of arcs}``;
    keeping the flag (instead of recomputing endpoints) makes conjugation an
    exact involution.
    """

    base: tuple
    mirrored: bool = False

    def __post_init__(self):
        arcs = tuple(a if isinstance(a, Arc) else Arc(*a) for a in self.base)
        if not arcs:
            raise ValueError("a gap needs at least one arc")
        for i, a in enumerate(arcs):
            for b in arcs[i + 1 :]:
                if a.start == b.start or a.contains(b.start, 0.0) or b.contains(a.start, 0.0):
                    raise ValueError(f"arcs {a} and {b} overlap")
        object.__setattr__(self, "base", arcs)

    @classmethod
    def of(cls, *arcs):
        return cls(tuple(arcs))

    @property
    def arcs(self):
        if not self.mirrored:
            return self.base
        return tuple(Arc(TWO_PI - a.end, TWO_PI - a.start) for a in self.base)

    def contains(self, theta, tol=ENDPOINT_TOL):
        if self.mirrored:
            theta = -theta
        return any(a.contains(theta, tol) for a in self.base)

    def grid(self, n):
        """Grid points (unimodular) on every arc, and a mask marking which
        consecutive pairs lie on the same arc."""
        pts, same = [], []
        for a in self.base:
            z = np.exp(1j * a.grid(n))
            pts.append(np.conj(z) if self.mirrored else z)
            same.append(np.r_[np.ones(n - 1, dtype=bool), False])
        seg_ok = np.concatenate(same)[:-1]
        return np.concatenate(pts), seg_ok

    def to_json(self):
        return {"arcs": [a.to_json() for a in self.arcs]}

    @classmethod
    def from_json(cls, obj):
        return cls(tuple(Arc(a["start"], a["end"]) for a in obj["arcs"]))


def conjugate_set(g):
    return GapSet(g.base, not g.mirrored)


# ---------------------------------------------------------------------------
# Regular type, S/Q matrices and W-tilde
# ---------------------------------------------------------------------------

def szeta_qzeta(model, zeta):
    """Matrices of ``S_zeta`` and ``Q_zeta``: ``[j, k] = (g'_k, u_j)`` and ``(g'_k, v_j)``."""
    gp = n_zeta_basis(model, zeta)
    return model.defect0.conj().T @ gp, model.defect_inf.conj().T @ gp


def w_tilde(model, zeta, tol=MARGIN_TOL):
    """``zeta^{-1} M_Q M_S^{-1}``."""
    ms, mq = szeta_qzeta(model, zeta)
    if np.linalg.svd(ms, compute_uv=False)[-1] <= tol:
        raise ValueError(f"matrix of S_zeta is singular at zeta={zeta!r}")
    return np.linalg.solve(ms.T, mq.T).T / zeta


@dataclass(frozen=True, eq=False)
class RegularityReport:
    """Per-grid-point data on the conjugate gap.

    ``margin`` is the smallest singular value of ``E - zeta A`` written from the
    domain basis to the basis of ``M_zeta(A)`` (0 where that basis is short).
    ``w`` holds ``W~_zeta`` (NaN where undefined).
    """

    zetas: np.ndarray
    seg_ok: np.ndarray
    tau_tilde: np.ndarray
    margin: np.ndarray
    regular: np.ndarray
    w: np.ndarray
    tol: float

    @property
    def certified(self):
        return bool(self.regular.all())

    @property
    def min_margin(self):
        return float(self.margin.min())


def regular_type_certificate(model, g, grid_n=GRID_N, tol=MARGIN_TOL):
    """Scan the conjugate set of the gap ``g`` for points of regular type."""
    if model.delta == 0:
        raise ValueError("the moment problem is determinate; check its unique solution directly")
    zetas, seg_ok = conjugate_set(g).grid(grid_n)
    c = np.ascontiguousarray
    tau_t, margin, n_plus, ms, mq = kernels.zeta_scan(
        c(model.space.X, dtype=np.complex128),
        model.N,
        model.d,
        c(model.domain_basis),
        c(model.A_op, dtype=np.complex128),
        c(model.defect0),
        c(model.defect_inf),
        c(zetas),
        DROP_TOL,
        model.space.floor,
    )
    ok = (tau_t == model.tau) & (n_plus == model.delta)
    margin = np.where(ok, margin, 0.0)
    delta = model.delta
    w = np.full((zetas.size, delta, delta), np.nan, dtype=np.complex128)
    if ok.any():
        s_min = np.linalg.svd(ms[ok], compute_uv=False)[:, -1]
        good = np.flatnonzero(ok)[s_min > tol]
        ok[:] = False
        ok[good] = True
        msT = np.swapaxes(ms[good], 1, 2)
        mqT = np.swapaxes(mq[good], 1, 2)
        w[good] = np.swapaxes(np.linalg.solve(msT, mqT), 1, 2) / zetas[good, None, None]
    margin = np.where(ok, margin, 0.0)
    regular = ok & (margin > tol)
    return RegularityReport(zetas, seg_ok, tau_t, margin, regular, w, tol)


# ---------------------------------------------------------------------------
# Condition C margins
# ---------------------------------------------------------------------------

def _sigma_min(D):
    if D.shape[-1] == 0:
        return np.full(D.shape[:-2], np.inf)
    return np.linalg.svd(D, compute_uv=False)[..., -1]


def _segment_bound(point, D, seg_ok):
    """Lower bound of ``sigma_min`` between neighbouring points.

    Pairs touching a point where ``D`` is undefined (NaN) contribute the
    plain pointwise minimum.
    """
    if point.size < 2 or not seg_ok.any():
        return float(point.min())
    bad = ~np.isfinite(D).all(axis=(1, 2))
    diff = np.diff(np.where(bad[:, None, None], 0.0, D), axis=0)
    step = np.linalg.norm(diff, ord=2, axis=(1, 2)) if D.shape[-1] else np.zeros(point.size - 1)
    step = np.where(bad[:-1] | bad[1:], 0.0, step)
    pair = 0.5 * (point[:-1] + point[1:]) - step
    pair = np.where(seg_ok, pair, np.inf)
    return float(min(pair.min(), point.min()))


@dataclass(frozen=True)
class ConditionResult:
    passed: bool
    value: float
    detail: dict = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class ClassCheckReport:
    A: ConditionResult
    B: ConditionResult
    C: ConditionResult
    point_margins: np.ndarray
    zetas: np.ndarray

    @property
    def passed(self):
        return self.A.passed and self.B.passed and self.C.passed

    def to_json(self):
        out = {"pass": self.passed}
        for k in "ABC":
            c = getattr(self, k)
            out[k] = {"pass": c.passed, "value": c.value, **c.detail}
        return out


def class_check(model, g, F, grid_n=GRID_N, tol=MARGIN_TOL, regularity=None):
    """Grid check that ``F`` lies in the constrained Schur class for ``g``.

    A) radial continuity: at each grid point ``zeta``,
       ``||F(r zeta) - F(zeta)||`` for ``r = 1 - 2^-k`` (k = 4..12) must end at
       most ``max(tol, 2^-7 * value at k=4)``, i.e. converge at least at the
       rate of a Lipschitz function; F must also be contractive at the
       sampled interior points.
    B) ``||F^* F - I|| <= tol`` on the grid.
    C) certified lower bound of ``sigma_min(F - W~)`` exceeds ``tol``; points
       where ``W~`` is undefined count as margin 0.
    """
    reg = regularity if regularity is not None else regular_type_certificate(model, g, grid_n, tol)
    zetas = reg.zetas
    delta = model.delta
    Fb = np.stack([np.asarray(F.at(z)).reshape(delta, delta) for z in zetas])
    eye = np.eye(delta)

    worst_ratio, worst_tail, contractive = 0.0, 0.0, True
    if F.kind != "constant":
        for i, z in enumerate(zetas):
            vals = [np.asarray(F.at(r * z)).reshape(delta, delta) for r in RADII]
            if any(np.linalg.norm(v, 2) > 1 + tol for v in vals):
                contractive = False
            dist = [np.linalg.norm(v - Fb[i], 2) for v in vals]
            worst_tail = max(worst_tail, dist[-1])
            allowed = max(tol, 2.0 ** (-7) * dist[0])
            worst_ratio = max(worst_ratio, dist[-1] / allowed)
    A = ConditionResult(
        bool(worst_ratio <= 1.0 and contractive),
        float(worst_tail),
        {"contractive": contractive, "radii": list(RADII)},
    )

    unit_err = np.abs(np.conj(np.swapaxes(Fb, 1, 2)) @ Fb - eye).max(axis=(1, 2))
    B = ConditionResult(bool(unit_err.max() <= tol), float(unit_err.max()))

    D = Fb - reg.w
    point = np.where(reg.regular, _sigma_min(np.where(np.isfinite(D), D, 0.0)), 0.0)
    bound = _segment_bound(point, D, reg.seg_ok)
    C = ConditionResult(
        bool(bound > tol),
        float(bound),
        {"point_min": float(point.min()), "irregular_points": int((~reg.regular).sum())},
    )
    return ClassCheckReport(A, B, C, point, zetas)


# ---------------------------------------------------------------------------
# Constant-unitary candidate search
# ---------------------------------------------------------------------------

def _random_unitary(rng, n):
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2)
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


@dataclass(frozen=True, eq=False)
class CandidateResult:
    F: np.ndarray
    margin: float
    min_abs_det: float
    tried: int

    @property
    def found(self):
        return self.F is not None


def constant_candidate_search(model, g, grid_n=GRID_N, attempts=None, tol=MARGIN_TOL, seed=0, regularity=None):
    """Look for a constant unitary ``F`` with ``F - W~`` invertible on the grid.

    Constant unitaries satisfy conditions A and B automatically. For
    ``delta == 1`` the phases ``2 pi j / attempts`` are scanned exhaustively;
    otherwise ``attempts`` random unitaries plus a grid of diagonal phases.
    The best candidate by certified margin is returned when that margin
    exceeds ``tol``; otherwise ``F`` is None (inconclusive).
    """
    reg = regularity if regularity is not None else regular_type_certificate(model, g, grid_n, tol)
    if not reg.certified:
        raise ValueError("regularity is not certified on the conjugate gap")
    delta = model.delta
    w = reg.w
    if delta == 1:
        attempts = PHASE_ATTEMPTS if attempts is None else attempts
        phases = TWO_PI * np.arange(attempts) / attempts
        wv = np.ascontiguousarray(w[:, 0, 0])
        point, bound = kernels.phase_scan(wv, np.ascontiguousarray(reg.seg_ok), phases)
        best = int(np.argmax(bound))
        F = np.array([[np.exp(1j * phases[best])]])
        margin, min_det, tried = float(bound[best]), float(point[best]), attempts
    else:
        attempts = RANDOM_ATTEMPTS if attempts is None else attempts
        rng = np.random.default_rng(seed)
        cands = [_random_unitary(rng, delta) for _ in range(attempts)]
        per_axis = max(2, int(math.floor(attempts ** (1.0 / delta) + 1e-9)))
        axis = TWO_PI * np.arange(per_axis) / per_axis
        for idx in np.ndindex(*(per_axis,) * delta):
            cands.append(np.diag(np.exp(1j * axis[list(idx)])))
        cands = np.array(cands)
        # D_{j+1} - D_j = W~_j - W~_{j+1} does not depend on the candidate
        step = np.linalg.norm(np.diff(w, axis=0), ord=2, axis=(1, 2))
        bounds = np.empty(len(cands))
        for lo in range(0, len(cands), 64):
            point = _sigma_min(cands[lo : lo + 64, None] - w[None])
            pair = 0.5 * (point[:, :-1] + point[:, 1:]) - step[None]
            pair = np.where(reg.seg_ok[None], pair, np.inf)
            bounds[lo : lo + 64] = np.minimum(pair.min(axis=1, initial=np.inf), point.min(axis=1))
        best = int(np.argmax(bounds))
        F, margin = cands[best], float(bounds[best])
        min_det = float(np.abs(np.linalg.det(F[None] - w)).min())
        tried = len(cands)
    if margin <= tol:
        return CandidateResult(None, margin, min_det, tried)
    return CandidateResult(F, margin, min_det, tried)


# ---------------------------------------------------------------------------
# Mass on the gap
# ---------------------------------------------------------------------------

def gap_mass(m, g):
    """Sum of the weights of atoms strictly inside the gap, and its max-entry norm."""
    inside = np.array([g.contains(t) for t in m.thetas], dtype=bool)
    M = m.weights[inside].sum(axis=0) if inside.any() else np.zeros((m.N, m.N), dtype=np.complex128)
    return M, float(np.abs(M).max(initial=0.0))
