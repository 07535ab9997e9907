import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tmtmp import example21, oracle
from tmtmp.model import solve_model
from tmtmp.moments import MomentSequence
from tmtmp.resolvent import (
    AtomicMeasure,
    SchurParameter,
    atomic_measure,
    extend,
    invert_transform,
    measure_transform,
    transform_eval,
    transform_evaluator,
    verify_moments,
)

ONE = SchurParameter.constant([[1.0]])


@pytest.fixture
def ex21(ex21_moments):
    return solve_model(ex21_moments)


def coords(model, v):
    """Coordinates of a vector in the basis x_0, x_2, x_5 (built-in 3 x 3 example)."""
    B = model.space.X[:, [0, 2, 5]]
    return np.linalg.lstsq(B, v, rcond=None)[0]


def test_schur_parameter_validation():
    with pytest.raises(ValueError):
        SchurParameter()
    with pytest.raises(ValueError):
        SchurParameter(value=[[1.0]], func=lambda z: 1)
    with pytest.raises(ValueError):
        SchurParameter.constant([1.0, 0.0])
    assert SchurParameter.phase(np.pi, 2).is_unitary()
    assert not SchurParameter.constant([[0.5]]).is_unitary()
    assert not SchurParameter.evaluator(lambda z: [[1.0]]).is_unitary()


def test_evaluator_undefined_point():
    p = SchurParameter.evaluator(lambda z: [[1 / z]])
    with pytest.raises(ValueError, match="undefined"):
        p.at(0)
    p = SchurParameter.evaluator(lambda z: [[np.nan]])
    with pytest.raises(ValueError, match="undefined"):
        p.at(0.5)


def test_extend_example_swaps(ex21):
    U = extend(ex21, ONE)
    X = ex21.space.X
    np.testing.assert_allclose(U @ X[:, 0], X[:, 0], atol=1e-12)
    np.testing.assert_allclose(U @ X[:, 2], X[:, 5], atol=1e-12)
    np.testing.assert_allclose(U @ X[:, 5], X[:, 2], atol=1e-12)


def test_extend_determinate_is_a():
    model = solve_model(MomentSequence.from_list([[[1.0]], [[1.0]]]))
    U = extend(model, SchurParameter.constant(np.zeros((0, 0))))
    np.testing.assert_array_equal(U, model.A_op)
    np.testing.assert_allclose(U.conj().T @ U, np.eye(model.r), atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31))
def test_extend_contraction_norm(seed):
    rng = np.random.default_rng(seed)
    model = solve_model(oracle.moments_of(oracle.random_measure(rng, 12, 3), 2))
    F = rng.standard_normal((model.delta,) * 2) + 1j * rng.standard_normal((model.delta,) * 2)
    F = 0.99 * F / max(1.0, np.linalg.norm(F, 2))
    assert np.linalg.norm(extend(model, SchurParameter.constant(F)), 2) <= 1 + 1e-10


def test_transform_example_closed_form(ex21):
    for z in (0.2, -0.7j, 0.5 + 0.5j, 0.95 * np.exp(1j)):
        a, b = 1 / (1 - z), 1 / (1 - z * z)
        np.testing.assert_allclose(
            transform_eval(ex21, ONE, z), [[a, a, 0], [a, a, 0], [0, 0, b]], atol=1e-12
        )


def test_transform_example_general_constant(ex21):
    """The closed form holds for every constant F in the closed disk."""
    for F in (0.0, 0.3 - 0.4j, np.exp(2.5j)):
        p = SchurParameter.constant([[F]])
        for z in (0.3, 0.5j, -0.6 + 0.1j):
            np.testing.assert_allclose(
                transform_eval(ex21, p, z).T, example21.closed_form_transform(z, F), atol=1e-12
            )


def test_transform_at_zero_is_s0(ex21):
    p = SchurParameter.evaluator(lambda z: [[z * 0.5]])
    np.testing.assert_allclose(transform_eval(ex21, p, 0), example21.S0, atol=1e-12)


def test_transform_requires_disk(ex21):
    with pytest.raises(ValueError):
        transform_eval(ex21, ONE, 1.0)


def test_transform_rejects_non_contraction(ex21):
    with pytest.raises(ValueError):
        transform_eval(ex21, SchurParameter.constant([[2.0]]), 0.1)
    with pytest.raises(ValueError):
        transform_eval(ex21, SchurParameter.constant(np.eye(2)), 0.1)


def test_transform_evaluator_matches_pointwise(ex21):
    zs = np.array([0, 0.3, 0.5j, -0.4 + 0.2j])
    for p in (ONE, SchurParameter.evaluator(lambda z: [[z]])):
        vec = transform_evaluator(ex21, p)(zs)
        for z, g in zip(zs, vec):
            np.testing.assert_allclose(g, transform_eval(ex21, p, z), atol=1e-12)


def test_atomic_measure_example(ex21):
    m = atomic_measure(ex21, ONE)
    np.testing.assert_allclose(m.thetas, [0.0, np.pi], atol=1e-12)
    np.testing.assert_allclose(m.weights[0], [[1, 1, 0], [1, 1, 0], [0, 0, 0.5]], atol=1e-12)
    np.testing.assert_allclose(m.weights[1], np.diag([0, 0, 0.5]), atol=1e-12)


def test_atomic_measure_other_phase(ex21):
    # F = -1: U fixes x_0 and maps x_2 -> x_5 -> -x_2, eigenvalues 1, i, -i
    m = atomic_measure(ex21, SchurParameter.phase(np.pi, 1))
    np.testing.assert_allclose(m.thetas, [0.0, np.pi / 2, 3 * np.pi / 2], atol=1e-12)
    np.testing.assert_allclose(m.weights[0], [[1, 1, 0], [1, 1, 0], [0, 0, 0]], atol=1e-12)
    np.testing.assert_allclose(m.weights[1], np.diag([0, 0, 0.5]), atol=1e-12)
    np.testing.assert_allclose(m.weights[2], np.diag([0, 0, 0.5]), atol=1e-12)
    assert max(verify_moments(m, example21.moments()).residuals) < 1e-12


def test_atomic_measure_point_mass():
    s = MomentSequence.from_list([[[1.0]], [[1.0]]])
    m = atomic_measure(solve_model(s), SchurParameter.constant(np.zeros((0, 0))))
    assert len(m) == 1
    assert m.thetas[0] == 0.0
    np.testing.assert_allclose(m.weights[0], [[1.0]], atol=1e-12)


def test_atomic_measure_rejects(ex21):
    with pytest.raises(ValueError):
        atomic_measure(ex21, SchurParameter.constant([[0.5]]))
    with pytest.raises(ValueError):
        atomic_measure(ex21, SchurParameter.evaluator(lambda z: [[1.0]]))
    with pytest.raises(ValueError):
        atomic_measure(ex21, SchurParameter.constant(np.eye(2)))


@settings(max_examples=60, deadline=None)
@given(atoms=st.integers(1, 20), N=st.integers(1, 4), d=st.integers(1, 4), seed=st.integers(0, 2**31))
def test_atomic_measure_invariants(atoms, N, d, seed):
    rng = np.random.default_rng(seed)
    s = oracle.moments_of(oracle.random_measure(rng, atoms, N), d)
    model = solve_model(s)
    p = SchurParameter.constant(oracle.random_unitary(rng, model.delta))
    m = atomic_measure(model, p)
    for W in m.weights:
        np.testing.assert_allclose(W, W.conj().T, atol=1e-12)
        assert np.linalg.eigvalsh(W).min() > -1e-10
    assert np.abs(m.total() - s.S[0]).max() < 1e-8
    assert np.all(np.diff(m.thetas) > 1e-9)
    assert np.all((m.thetas >= 0) & (m.thetas < 2 * np.pi))
    assert max(verify_moments(m, s).residuals) < 1e-8
    for z in oracle.random_disk_points(rng, 10):
        assert np.abs(transform_eval(model, p, z) - measure_transform(m, z)).max() < 1e-9


def test_measure_transform_cases(ex21):
    S0 = example21.S0
    single = AtomicMeasure([0.0], [S0])
    np.testing.assert_allclose(measure_transform(single, 0.4), S0 / 0.6, atol=1e-14)
    m = atomic_measure(ex21, ONE)
    assert measure_transform(m, 0.5)[2, 2] == pytest.approx(4 / 3, abs=1e-12)
    empty = AtomicMeasure(np.zeros(0), np.zeros((0, 2, 2)))
    np.testing.assert_array_equal(measure_transform(empty, 0.3), np.zeros((2, 2)))
    with pytest.raises(ValueError):
        measure_transform(single, 1.0)


def test_verify_moments_example_and_perturbation(ex21):
    s = example21.moments()
    m = atomic_measure(ex21, ONE)
    assert max(verify_moments(m, s).residuals) < 1e-12
    W = np.array(m.weights)
    W[1, 2, 2] += 1e-3
    rep = verify_moments(AtomicMeasure(m.thetas, W), s, 1e-8)
    assert not rep.passed
    assert max(rep.residuals) == pytest.approx(1e-3, rel=1e-6)
    assert rep.to_json() == {"residuals": rep.residuals, "pass": False, "tol": 1e-8}


def poisson_arc(a, b, r):
    """Mass of the normalised Poisson kernel ``P_r`` over the arc (a, b), |a|, |b| < pi."""
    F = lambda t: np.arctan((1 + r) / (1 - r) * np.tan(t / 2)) / np.pi
    return F(b) - F(a)


def test_invert_transform_point_mass_poisson():
    K, r = 1024, 1 - 1 / 1024
    G = lambda z: (1 / (1 - z))[:, None, None]
    m = invert_transform(G, [[1.0]], K=K, r=r, samples_per_bin=32)
    w = m.weights[:, 0, 0].real
    edges = 2 * np.pi * np.arange(K + 1) / K
    edges = np.where(edges > np.pi, edges - 2 * np.pi, edges)
    for b in list(range(0, 20)) + list(range(K - 20, K)) + [100, 300, 700]:
        assert w[b] == pytest.approx(poisson_arc(edges[b], edges[b + 1], r), abs=1e-5)
    near = w[0] + w[-1]
    assert near == pytest.approx(2 / np.pi * np.arctan((1 + r) / (1 - r) * np.tan(np.pi / K)), abs=1e-5)
    assert w[:11].sum() + w[-11:].sum() > 0.99
    assert w.sum() == pytest.approx(1.0, abs=1e-9)


def test_invert_transform_uniform():
    K = 256
    m = invert_transform(lambda z: np.ones((len(z), 1, 1)), [[1.0]], K=K)
    np.testing.assert_allclose(m.weights[:, 0, 0], 1 / K, atol=1e-15)


def test_invert_transform_example_halves(ex21):
    K = 1024
    m = invert_transform(transform_evaluator(ex21, ONE), example21.S0, K=K)
    w = m.weights[:, 2, 2].real
    right = w[: K // 4].sum() + w[3 * K // 4 :].sum()
    left = w[K // 4 : 3 * K // 4].sum()
    assert right == pytest.approx(0.5, abs=1e-9)
    assert left == pytest.approx(0.5, abs=1e-9)
    np.testing.assert_allclose(m.total(), example21.S0, atol=1e-9)


def test_invert_transform_rejects_non_herglotz():
    with pytest.raises(ValueError):
        invert_transform(lambda z: -np.ones((len(z), 1, 1)), [[1.0]], K=64)
    with pytest.raises(ValueError):
        invert_transform(lambda z: np.ones((len(z), 1, 1)), [[1.0]], K=64, r=1.0)
