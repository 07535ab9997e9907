import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tmtmp import oracle
from tmtmp.moments import MomentSequence, build_toeplitz, hermitian_extend, psd_check


def test_hermitian_extend_example(ex21_moments):
    full = hermitian_extend(ex21_moments)
    np.testing.assert_array_equal(full[0], full[2])
    np.testing.assert_array_equal(full[1], ex21_moments.S[0])


def test_hermitian_extend_scalar_cases():
    assert hermitian_extend([[[1.0]], [[0.0]]])[0, 0, 0] == 0
    assert hermitian_extend([[[1.0]], [[1j]]])[0, 0, 0] == -1j


def test_moment_sequence_validation():
    with pytest.raises(ValueError):
        MomentSequence.from_list([np.eye(2)])
    with pytest.raises(ValueError):
        MomentSequence.from_list([np.eye(2), np.eye(3)])
    with pytest.raises(ValueError):
        MomentSequence(np.zeros((2, 2, 3)))
    s = MomentSequence.from_list([np.eye(2), np.zeros((2, 2))])
    assert (s.N, s.d) == (2, 1)
    assert not s.S.flags.writeable


def test_toeplitz_example_blocks(ex21_moments):
    t = build_toeplitz(ex21_moments)
    S0, S1 = ex21_moments.S
    expected = np.block([[S0, S1.conj().T], [S1, S0]])
    np.testing.assert_array_equal(t.entries, expected)
    assert t.gamma(3, 0) == 1 and t.gamma(0, 3) == 1
    assert t.dim == 6


def test_toeplitz_identity():
    t = build_toeplitz(MomentSequence.from_list([[[1.0]], [[0.0]]]))
    np.testing.assert_array_equal(t.entries, np.eye(2))


@settings(max_examples=40, deadline=None)
@given(N=st.integers(1, 4), d=st.integers(1, 4), seed=st.integers(0, 2**31))
def test_toeplitz_index_law(N, d, seed):
    rng = np.random.default_rng(seed)
    S = rng.standard_normal((d + 1, N, N)) + 1j * rng.standard_normal((d + 1, N, N))
    S[0] = S[0] + S[0].conj().T
    t = build_toeplitz(MomentSequence(S))
    full = hermitian_extend(MomentSequence(S))
    for k in range(d + 1):
        for r in range(d + 1):
            for s_ in range(N):
                for l in range(N):
                    assert t.gamma(k * N + s_, r * N + l) == full[d + k - r][s_, l]
    np.testing.assert_array_equal(t.entries, t.entries.conj().T)


def test_random_measure_toeplitz_is_gram():
    """T_d equals the Gram matrix of the family z^k e_s in L^2 of the measure."""
    rng = np.random.default_rng(3)
    m = oracle.random_measure(rng, 5, 2)
    d = 3
    t = build_toeplitz(oracle.moments_of(m, d))
    N = 2
    G = np.zeros((t.dim, t.dim), dtype=complex)
    for th, W in m.atoms:
        for k in range(d + 1):
            for r in range(d + 1):
                G[k * N : (k + 1) * N, r * N : (r + 1) * N] += np.exp(1j * (k - r) * th) * W
    np.testing.assert_allclose(t.entries, G, atol=1e-12)
    assert psd_check(t).solvable


def test_psd_example(ex21_moments):
    rep = psd_check(build_toeplitz(ex21_moments))
    assert rep.solvable and rep.rank == 3


def test_psd_rejects():
    rep = psd_check(build_toeplitz(MomentSequence.from_list([[[1.0]], [[2.0]]])))
    assert not rep.solvable
    assert rep.min_eigenvalue == pytest.approx(-1.0)


def test_psd_rejects_non_hermitian_s0():
    with pytest.raises(ValueError):
        psd_check(build_toeplitz(MomentSequence.from_list([[[1, 1], [0, 1]], np.zeros((2, 2))])))


@settings(max_examples=30, deadline=None)
@given(atoms=st.integers(1, 12), N=st.integers(1, 3), d=st.integers(1, 4), seed=st.integers(0, 2**31))
def test_random_moments_solvable(atoms, N, d, seed):
    rng = np.random.default_rng(seed)
    s = oracle.moments_of(oracle.random_measure(rng, atoms, N), d)
    assert psd_check(build_toeplitz(s)).solvable
