import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oqwork.dist import QuasiDist
from oqwork.errors import BadMixingWeight, BadPartition, DimMismatch, NotNormalized
from oqwork.jointmeas import binary_povm
from oqwork.qmath import PAULI_X, PAULI_Z, dephase
from oqwork.quasiprob import (
    characteristic_table,
    coarse_grain,
    decohere_state,
    inverse_characteristic,
    kdq,
    mhq_direct,
    mhq_via_schemes,
    negativity,
    noncommutativity_witnessed,
    oq,
    oq_via_characteristic,
)
from oqwork.randomized import (
    random_binary_qubit_povm,
    random_projective_povm,
    random_protocol,
    random_state,
)
from oqwork.scenarios import QubitScenarioConfig, qubit_row
from oqwork.schemes import Povm, epm_prob, tpm_prob

Z_MEAS = Povm.from_hamiltonian(PAULI_Z)
X_MEAS = Povm.from_hamiltonian(PAULI_X)


def test_oq_of_incoherent_state_is_tpm(rng):
    rho = np.diag([0.7, 0.3])
    assert np.allclose(oq(rho, Z_MEAS, X_MEAS).values, tpm_prob(rho, Z_MEAS, X_MEAS).values)


def test_oq_marginals_and_tpm_asymmetry(rng):
    seen_gap = 0.0
    for d in (2, 3, 4):
        rho = random_state(d, rng)
        A, B = random_projective_povm(d, rng), random_projective_povm(d, rng)
        q = oq(rho, A, B)
        assert np.allclose(q.marginal_i, [np.trace(rho @ a).real for a in A.effects], atol=1e-12)
        assert np.allclose(q.marginal_f, epm_prob(rho, B), atol=1e-12)
        p = tpm_prob(rho, A, B)
        seen_gap = max(seen_gap, np.max(np.abs(p.marginal_f - epm_prob(rho, B))))
    # the sequential scheme disturbs the late statistics for coherent states
    assert seen_gap > 1e-3


def test_oq_plus_state_example():
    # |+> with both measurements along z: TPM is diagonal 1/2 and EPM agrees
    plus = 0.5 * np.ones((2, 2))
    assert np.allclose(oq(plus, Z_MEAS, Z_MEAS).values, np.diag([0.5, 0.5]))
    # z then x: TPM gives 1/4 everywhere and so does the OQ correction-free table
    assert np.allclose(tpm_prob(plus, Z_MEAS, X_MEAS).values, 0.25)


def test_fourier_oracle_agrees(rng):
    for d in (2, 3, 4):
        rho = random_state(d, rng)
        A, B = random_projective_povm(d, rng), random_projective_povm(d, rng)
        assert np.max(np.abs(oq(rho, A, B).values - oq_via_characteristic(rho, A, B).values)) < 1e-12


def test_characteristic_table_corner_and_round_trip(rng):
    rho = random_state(3, rng)
    chi = characteristic_table(rho, random_projective_povm(3, rng), random_projective_povm(3, rng))
    assert chi[0, 0] == 1.0
    uniform = np.full((3, 3), 1 / 9)
    chi_u = np.array([[sum(uniform[i, f] * np.exp(2j * np.pi * (m * i + n * f) / 3)
                           for i in range(3) for f in range(3)) for n in range(3)] for m in range(3)])
    assert np.allclose(inverse_characteristic(chi_u), uniform)


def test_kdq_and_mhq(rng):
    rho = random_state(3, rng)
    A, B = random_projective_povm(3, rng), random_projective_povm(3, rng)
    k = kdq(rho, A, B)
    assert k.values.dtype == complex
    assert k.total == pytest.approx(1.0)
    assert np.allclose(mhq_direct(rho, A, B).values, k.values.real)
    assert np.allclose(mhq_via_schemes(rho, A, B).values, k.values.real, atol=1e-12)


def test_mhq_of_commuting_pair_is_tpm():
    rho = np.diag([0.2, 0.8])
    assert np.allclose(mhq_direct(rho, Z_MEAS, X_MEAS).values, tpm_prob(rho, Z_MEAS, X_MEAS).values)


def test_binary_qubit_oq_equals_scheme_mhq(rng):
    for _ in range(200):
        rho = random_state(2, rng)
        A, B = random_binary_qubit_povm(rng), random_binary_qubit_povm(rng)
        assert np.max(np.abs(oq(rho, A, B).values - mhq_via_schemes(rho, A, B).values)) < 1e-12


def test_biased_pairs_separate_scheme_mhq_from_kd_real_part():
    # with bias, Re Tr(rho A_i B_f) is a different table from the scheme-built MHQ
    rho = 0.5 * (np.eye(2) + 0.5 * PAULI_X)
    A = binary_povm([0.0, 0.0, 0.4], bias=0.5)
    B = binary_povm([0.4, 0.0, 0.0], bias=0.0)
    gap = np.max(np.abs(mhq_direct(rho, A, B).values - mhq_via_schemes(rho, A, B).values))
    assert gap > 1e-3


def test_maximally_mixed_state_oq_equals_mhq(rng):
    for _ in range(20):
        A, B = random_binary_qubit_povm(rng), random_binary_qubit_povm(rng)
        rho = np.eye(2) / 2
        assert np.allclose(oq(rho, A, B).values, mhq_via_schemes(rho, A, B).values, atol=1e-12)


def test_negativity_examples():
    assert negativity(np.array([[0.6, -0.1], [0.3, 0.2]])) == pytest.approx(0.2)
    assert negativity(np.array([[0.25, 0.25], [0.25, 0.25]])) == 0.0
    with pytest.raises(NotNormalized):
        negativity(np.array([[0.5, 0.1], [0.1, 0.1]]))


def test_negativity_positive_in_qubit_scenario():
    assert qubit_row(QubitScenarioConfig(), np.pi).neg_oq > 0.1


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_coarse_graining_never_increases_negativity(seed):
    r = np.random.default_rng(seed)
    proto = random_protocol(3, r)
    q = oq(random_state(3, r), proto.A, proto.B_H)
    labels_i = r.integers(0, 3, size=3)
    labels_f = r.integers(0, 3, size=3)
    part_i = [list(np.flatnonzero(labels_i == k)) for k in range(3) if np.any(labels_i == k)]
    part_f = [list(np.flatnonzero(labels_f == k)) for k in range(3) if np.any(labels_f == k)]
    assert negativity(coarse_grain(q, part_i, part_f)) <= negativity(q) + 1e-12


def test_coarse_grain_examples():
    q = QuasiDist(np.array([[0.6, -0.1], [0.3, 0.2]]), "OQ")
    assert np.allclose(coarse_grain(q, [[0], [1]], [[0], [1]]).values, q.values)
    merged = coarse_grain(q, [[0, 1]], [[0, 1]])
    assert merged.values[0, 0] == pytest.approx(1.0)
    assert negativity(merged) == pytest.approx(0.0)
    with pytest.raises(BadPartition):
        coarse_grain(q, [[0], [0]], [[0, 1]])
    with pytest.raises(BadPartition):
        coarse_grain(q, [[0, 1], []], [[0, 1]])


def test_decohere_state_endpoints(rng):
    rho = random_state(3, rng)
    A = random_projective_povm(3, rng)
    assert np.allclose(decohere_state(rho, A.effects, 0.0), rho)
    assert np.allclose(decohere_state(rho, A.effects, 1.0), dephase(rho, A.effects)[0])
    with pytest.raises(BadMixingWeight):
        decohere_state(rho, A.effects, 1.5)


def test_full_dephasing_in_first_basis_removes_negativity(rng):
    proto = random_protocol(3, rng)
    rho = decohere_state(random_state(3, rng), proto.A.effects, 1.0)
    assert negativity(oq(rho, proto.A, proto.B_H)) == pytest.approx(0.0, abs=1e-12)


def test_partial_dephasing_reduces_qubit_scenario_negativity():
    from oqwork.scenarios import qubit_protocol, qubit_state

    cfg = QubitScenarioConfig()
    prot = qubit_protocol(cfg, np.pi)
    rho = qubit_state(cfg)
    n0 = negativity(oq(rho, prot.A, prot.B_H))
    n_half = negativity(oq(decohere_state(rho, prot.A.effects, 0.5), prot.A, prot.B_H))
    assert n_half < n0


@pytest.mark.parametrize("d, raises", [(2, False), (3, True)])
def test_dephasing_in_second_basis(d, raises):
    # monotone for qubits; for d = 3 dephasing in the late-measurement basis can raise N
    r = np.random.default_rng(7)
    worst = -np.inf
    for _ in range(200):
        proto = random_protocol(d, r)
        rho = random_state(d, r)
        base = negativity(oq(rho, proto.A, proto.B_H))
        after = negativity(oq(decohere_state(rho, proto.B_H.effects, 1.0), proto.A, proto.B_H))
        worst = max(worst, after - base)
    assert (worst > 1e-3) == raises


def test_noncommutativity_witness():
    plus = 0.5 * np.ones((2, 2))
    assert noncommutativity_witnessed(plus, Z_MEAS, X_MEAS) == (True, True)
    assert noncommutativity_witnessed(np.diag([0.3, 0.7]), Z_MEAS, X_MEAS) == (False, True)
    assert noncommutativity_witnessed(plus, Z_MEAS, Z_MEAS) == (True, False)


def test_dimension_mismatch(rng):
    with pytest.raises(DimMismatch):
        oq(random_state(3, rng), Z_MEAS, Z_MEAS)
