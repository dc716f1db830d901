import numpy as np
import pytest

from oqwork.errors import (
    BetaNegative,
    BetaNonPositive,
    MissingEnergies,
    NonSharpMeasurement,
    NotTraceless,
    SingularGibbs,
    UnsupportedDim,
)
from oqwork.dist import QuasiDist
from oqwork.jointmeas import smear
from oqwork.qmath import PAULI_X, PAULI_Z, dephase, eig_hermitian, gibbs_state
from oqwork.quasiprob import kdq, oq
from oqwork.randomized import random_protocol, random_state
from oqwork.scenarios import QubitScenarioConfig, qubit_protocol, qubit_state
from oqwork.schemes import Channel, Povm, tpm_prob
from oqwork.thermo import (
    Protocol,
    delta_free_energy,
    exp_work_average,
    free_energy_ratio,
    gamma_terms,
    hoelder_bound_check,
    jarzynski_check,
    second_law_decomposition,
    second_moment_bound_check,
    trace_norm_witness,
    work_moment,
    work_split,
)

H_STEP = 1e-4


def _qubit_case(t=1.0):
    cfg = QubitScenarioConfig()
    return qubit_state(cfg), qubit_protocol(cfg, t)


def _plus_in_first_basis(proto):
    v = eig_hermitian(proto.H_initial).vectors
    psi = v @ np.ones(proto.dim) / np.sqrt(proto.dim)
    return np.outer(psi, psi.conj())


def test_mean_work_vanishes_without_dynamics(rng):
    H = np.diag([0.0, 1.0, 3.0])
    proto = Protocol(H, H, Channel.identity(3))
    assert work_moment(oq(random_state(3, rng), proto.A, proto.B_H), 1) == pytest.approx(0.0, abs=1e-12)


def test_mean_work_is_energy_difference(rng):
    rho, proto = _qubit_case()
    w = work_moment(oq(rho, proto.A, proto.B_H), 1)
    ref = np.trace(rho @ proto.H_final_heisenberg).real - np.trace(rho @ proto.H_initial).real
    assert w == pytest.approx(ref, abs=1e-12)


def test_moments_from_generating_function_differences(rng):
    for d in (2, 3):
        proto = random_protocol(d, rng)
        q = oq(random_state(d, rng), proto.A, proto.B_H)
        g = lambda b: exp_work_average(q, b)  # noqa: E731
        first = -(g(H_STEP) - g(-H_STEP)) / (2 * H_STEP)
        second = (g(H_STEP) - 2 * g(0.0) + g(-H_STEP)) / H_STEP**2
        assert first == pytest.approx(work_moment(q, 1), abs=1e-5)
        assert second == pytest.approx(work_moment(q, 2), abs=1e-5)


def test_correction_factor_derivative_matches_table_sums(rng):
    # d ln Gamma / d beta = -<w e^{-beta w}>/<e^{-beta w}> + <H_f>_G,f - <H_i>_G,i
    rho, proto = _qubit_case(1.3)
    beta = 0.8
    g = lambda b: gamma_terms(rho, proto, b).oq  # noqa: E731
    lhs = (np.log(g(beta + H_STEP)) - np.log(g(beta - H_STEP))) / (2 * H_STEP)
    q = oq(rho, proto.A, proto.B_H)
    w = q.work_values()
    weights = q.values * np.exp(-beta * w)
    e_f = np.trace(gibbs_state(proto.H_final, beta) @ proto.H_final).real
    e_i = np.trace(gibbs_state(proto.H_initial, beta) @ proto.H_initial).real
    rhs = -np.sum(weights * w) / np.sum(weights) + e_f - e_i
    assert lhs == pytest.approx(rhs, abs=1e-5)


def test_jarzynski_gibbs_and_beta_zero(rng):
    proto = random_protocol(3, rng)
    stats = jarzynski_check(gibbs_state(proto.H_initial, 1.0), proto, 1.0)
    assert stats.jarzynski_lhs == pytest.approx(stats.exp_minus_beta_dF, rel=1e-9)
    assert stats.gamma == pytest.approx(1.0, abs=1e-9)
    zero = jarzynski_check(random_state(3, rng), proto, 0.0)
    assert zero.jarzynski_lhs == pytest.approx(1.0)
    assert zero.exp_minus_beta_dF == pytest.approx(1.0)


def test_modified_jarzynski_on_coherent_qubit():
    _, proto = _qubit_case()
    rho = _plus_in_first_basis(proto)
    for beta in (0.3, 1.0, 3.0):
        stats = jarzynski_check(rho, proto, beta)
        assert stats.jarzynski_lhs == pytest.approx(stats.exp_minus_beta_dF * stats.gamma, rel=1e-9)


def test_gamma_terms_incoherent_and_kd_route(rng):
    proto = random_protocol(3, rng)
    rho_d, _ = dephase(random_state(3, rng), proto.A.effects)
    g = gamma_terms(rho_d, proto, 0.7)
    assert g.oq == pytest.approx(g.tpm, abs=1e-12)
    assert g.kdq == pytest.approx(g.tpm, abs=1e-12)

    rho = random_state(3, rng)
    beta = 0.7
    g = gamma_terms(rho, proto, beta)
    direct = np.sum(kdq(rho, proto.A, proto.B_H).values * np.exp(-beta * oq(rho, proto.A, proto.B_H).work_values()))
    # the closed form and the direct Kirkwood-Dirac sum are complex conjugates
    assert g.kdq * free_energy_ratio(proto, beta) == pytest.approx(np.conj(direct), abs=1e-12)


def test_free_energy(rng):
    proto = Protocol(np.diag([0.0, 1.0]), np.diag([0.0, 2.0]), Channel.identity(2))
    z_i, z_f = 1 + np.exp(-1.0), 1 + np.exp(-2.0)
    assert delta_free_energy(proto, 1.0) == pytest.approx(-np.log(z_f / z_i))
    assert delta_free_energy(proto, 0.0) == pytest.approx(0.5)
    with pytest.raises(BetaNegative):
        delta_free_energy(proto, -1.0)


def test_errors():
    _, proto = _qubit_case()
    rho = np.eye(2) / 2
    with pytest.raises(BetaNegative):
        jarzynski_check(rho, proto, -0.1)
    unsharp = Protocol(proto.H_initial, proto.H_final, proto.channel, A=smear(proto.A, 0.5))
    with pytest.raises(NonSharpMeasurement):
        gamma_terms(rho, unsharp, 1.0)
    with pytest.raises(BetaNonPositive):
        second_law_decomposition(rho, proto, 0.0)
    wide = Protocol(np.diag([0.0, 1e3]), np.diag([0.0, 1.0]), Channel.identity(2))
    with pytest.raises(SingularGibbs):
        gamma_terms(rho, wide, 1e3)
    with pytest.raises(MissingEnergies):
        work_moment(QuasiDist(np.eye(2) / 2, "OQ"), 1)
    shifted = Protocol(np.diag([1.0, 2.0]), np.diag([1.0, 2.0]), Channel.identity(2))
    with pytest.raises(NotTraceless):
        second_moment_bound_check(rho, shifted)


def test_work_split(rng):
    proto = random_protocol(3, rng)
    rho_d, _ = dephase(random_state(3, rng), proto.A.effects)
    assert work_split(rho_d, proto).coherent_term == pytest.approx(0.0, abs=1e-12)
    rho, qproto = _qubit_case()
    s = work_split(rho, qproto)
    w_tpm = work_moment(tpm_prob(rho, qproto.A, qproto.B_H), 1)
    assert s.w_oq - w_tpm == pytest.approx(s.coherent_term, abs=1e-12)
    # H^H_f diagonal in the first basis: coherence cannot contribute
    diag = Protocol(PAULI_Z, 2 * PAULI_Z, Channel.identity(2))
    assert work_split(0.5 * np.ones((2, 2)), diag).coherent_term == pytest.approx(0.0, abs=1e-15)


def test_second_law_decomposition_examples(rng):
    proto = Protocol(PAULI_Z, PAULI_X, Channel.identity(2))
    plus = 0.5 * np.ones((2, 2))
    law = second_law_decomposition(plus, proto, 1.0)
    assert law.coherence_term == pytest.approx(np.log(2))
    assert law.delta_w == pytest.approx(law.delta_F - law.coherence_term, abs=1e-12)
    assert law.delta_w <= law.delta_F
    zero = second_law_decomposition(np.diag([0.3, 0.7]), proto, 1.0)
    assert np.allclose(zero, 0.0, atol=1e-12)


def test_hoelder_bound_and_equality_case(rng):
    proto = Protocol(PAULI_Z, PAULI_X, Channel.identity(2))
    eq = hoelder_bound_check(0.5 * np.ones((2, 2)), proto)
    assert eq.abs_delta_w == pytest.approx(eq.bound)
    inc = hoelder_bound_check(np.diag([0.4, 0.6]), proto)
    assert inc.abs_delta_w == pytest.approx(0.0) and inc.bound >= 0
    cfg = QubitScenarioConfig()
    rho = qubit_state(cfg)
    for t in np.linspace(0, 2 * np.pi, 25):
        h = hoelder_bound_check(rho, qubit_protocol(cfg, t))
        assert h.abs_delta_w <= h.bound + 1e-10


def test_second_moment_bound(rng):
    cfg = QubitScenarioConfig()
    rho = qubit_state(cfg)
    for t in np.linspace(0, 2 * np.pi, 25):
        m = second_moment_bound_check(rho, qubit_protocol(cfg, t))
        assert m.m2 >= m.lower_bound - 1e-9
    inc = second_moment_bound_check(np.diag([0.5, 0.5]), qubit_protocol(cfg, 1.0))
    assert inc.lower_bound == pytest.approx(0.0, abs=1e-12)


def test_negative_second_moment_still_above_bound():
    r = np.random.default_rng(3)
    found = None
    for k in range(3000):
        d = (2, 3, 4)[k % 3]
        proto = random_protocol(d, r, traceless=True)
        m = second_moment_bound_check(random_state(d, r), proto)
        if m.m2 < 0:
            found = m
            break
    assert found is not None
    assert found.m2 >= found.lower_bound


@pytest.mark.parametrize("c", [0.0, 0.3, 0.5])
def test_trace_norm_witness(c):
    A = Povm.from_hamiltonian(PAULI_Z)
    rho = np.array([[0.5, c], [c, 0.5]], dtype=complex)
    assert trace_norm_witness(rho, A) == pytest.approx(2 * c, abs=1e-3)


def test_trace_norm_witness_complex_offdiagonal():
    A = Povm.from_hamiltonian(PAULI_Z)
    c = 0.2 * np.exp(0.9j)
    rho = np.array([[0.6, c], [np.conj(c), 0.4]])
    assert trace_norm_witness(rho, A) == pytest.approx(0.4, abs=1e-3)


def test_trace_norm_witness_qubits_only(rng):
    with pytest.raises(UnsupportedDim):
        trace_norm_witness(random_state(3, rng), Povm.from_hamiltonian(np.diag([0.0, 1.0, 2.0])))


def test_hoelder_rho_basis_reading_has_counterexamples():
    from oqwork.randomized import random_protocol, random_state

    r = np.random.default_rng(17)
    excess = []
    for _ in range(400):
        d = int(r.integers(2, 5))
        h = hoelder_bound_check(random_state(d, r), random_protocol(d, r))
        assert h.abs_delta_w <= h.bound + 1e-9
        excess.append(h.abs_delta_w - h.bound_rho_basis)
    assert max(excess) > 1e-3
