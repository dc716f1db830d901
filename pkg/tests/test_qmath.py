import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from oqwork.errors import BlochOutOfBall, InvalidState, NonHermitian
from oqwork.qmath import (
    PAULI_X,
    PAULI_Z,
    bloch_to_state,
    check_state,
    coherence_l1,
    coherence_rel_entropy,
    dephase,
    eig_hermitian,
    entropy_vn,
    expm_hermitian_generator,
    gibbs_state,
    log_partition_function,
    state_to_bloch,
    trace_norm,
)
from oqwork.randomized import random_hermitian, random_state


def _taylor_expm(M, terms=30):
    # scaling and squaring with a truncated Taylor series
    s = max(0, int(np.ceil(np.log2(max(np.linalg.norm(M, 1), 1e-300)))) + 1)
    A = M / 2**s
    out = np.eye(M.shape[0], dtype=complex)
    term = np.eye(M.shape[0], dtype=complex)
    for k in range(1, terms):
        term = term @ A / k
        out = out + term
    for _ in range(s):
        out = out @ out
    return out


def test_eigenvalues_match_characteristic_polynomial_roots(rng):
    for d in (2, 3, 4):
        H = random_hermitian(d, rng)
        roots = np.sort(np.roots(np.poly(H)).real)
        assert np.allclose(eig_hermitian(H).eigenvalues, roots, atol=1e-9)


def test_eig_reconstructs_and_projectors_are_orthogonal(rng):
    H = random_hermitian(4, rng)
    dec = eig_hermitian(H)
    assert np.allclose(dec.reconstruct(), H, atol=1e-12)
    for i, p in enumerate(dec.projectors):
        assert np.allclose(p @ p, p, atol=1e-12)
        for q in dec.projectors[i + 1:]:
            assert np.allclose(p @ q, 0, atol=1e-12)


def test_eig_groups_degenerate_levels():
    dec = eig_hermitian(np.diag([1.0, 1.0 + 1e-12, 2.0]))
    assert dec.multiplicities == (2, 1)
    assert not dec.is_nondegenerate()


def test_eig_rejects_non_hermitian():
    with pytest.raises(NonHermitian):
        eig_hermitian(np.array([[0, 1], [0, 0]]))


def test_eig_phase_convention_is_deterministic(rng):
    H = random_hermitian(3, rng)
    v = eig_hermitian(H).vectors
    for k in range(3):
        first = v[np.flatnonzero(np.abs(v[:, k]) > 1e-12)[0], k]
        assert abs(first.imag) < 1e-14 and first.real > 0


def test_propagator_matches_two_independent_exponentials(rng):
    for d in (2, 3, 4):
        H = random_hermitian(d, rng)
        U = expm_hermitian_generator(H, 0.7)
        assert np.allclose(U, scipy.linalg.expm(-0.7j * H), atol=1e-12)
        assert np.allclose(U, _taylor_expm(-0.7j * H), atol=1e-12)
        assert np.allclose(expm_hermitian_generator(H, 0.7, sign=1), U.conj().T, atol=1e-12)


def test_gibbs_state_and_partition_function(rng):
    H = random_hermitian(3, rng)
    for beta in (0.0, 0.5, 10.0):
        g = gibbs_state(H, beta)
        ref = scipy.linalg.expm(-beta * H)
        assert np.allclose(g, ref / np.trace(ref), atol=1e-12)
        assert np.isclose(log_partition_function(H, beta), np.log(np.trace(ref).real), atol=1e-12)


def test_gibbs_large_beta_is_stable():
    H = np.diag([0.0, 1000.0])
    assert np.allclose(gibbs_state(H, 50.0), np.diag([1.0, 0.0]))
    assert np.isfinite(log_partition_function(H, 50.0))


def test_check_state_rejects_bad_inputs():
    with pytest.raises(InvalidState):
        check_state(np.diag([0.6, 0.6]))
    with pytest.raises(InvalidState):
        check_state(np.diag([1.2, -0.2]))
    with pytest.raises(InvalidState):
        check_state(np.array([[0.5, 0.5], [0.0, 0.5]]))


def test_dephase_splits_state(rng):
    rho = random_state(3, rng)
    rho_d, rho_off = dephase(rho)
    assert np.allclose(rho_d + rho_off, rho)
    assert np.allclose(rho_d, np.diag(np.diag(rho)))


def test_entropy_and_coherence_examples():
    assert entropy_vn(np.eye(2) / 2) == pytest.approx(np.log(2))
    plus = 0.5 * np.ones((2, 2))
    assert entropy_vn(plus) == pytest.approx(0.0, abs=1e-12)
    assert coherence_rel_entropy(plus) == pytest.approx(np.log(2))
    assert coherence_l1(plus) == pytest.approx(1.0)
    # the X eigenbasis sees no coherence in |+><+|
    assert coherence_l1(plus, eig_hermitian(PAULI_X).vectors) == pytest.approx(0.0, abs=1e-12)


def test_bloch_out_of_ball():
    with pytest.raises(BlochOutOfBall):
        bloch_to_state([1.0, 0.5, 0.0])


@settings(max_examples=60, deadline=None)
@given(st.floats(0, np.pi), st.floats(0, 2 * np.pi), st.floats(0, 1))
def test_bloch_round_trip(theta, phi, r):
    v = r * np.array([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])
    rho = bloch_to_state(v)
    check_state(rho)
    assert np.allclose(state_to_bloch(rho), v, atol=1e-12)


def test_trace_norm_of_hermitian_is_sum_of_abs_eigenvalues(rng):
    H = random_hermitian(4, rng)
    assert trace_norm(H) == pytest.approx(np.abs(np.linalg.eigvalsh(H)).sum())
    assert trace_norm(PAULI_Z) == pytest.approx(2.0)


def test_halved_hamiltonian_is_not_a_projector_but_spectral_one_is():
    gap = 1.7
    H = 0.5 * gap * PAULI_Z
    naive = 0.5 * (np.eye(2) + H / gap)
    assert not np.allclose(naive @ naive, naive)
    for p in eig_hermitian(H).projectors:
        assert np.allclose(p @ p, p, atol=1e-14)
