"""Randomized invariant suites shared by the ``check`` command and the tests.

Every suite takes a numpy ``Generator`` and an instance count and returns a
:class:`CheckResult` whose ``worst`` is the largest observed violation
(deviation from an identity, or excess over a bound).
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .jointmeas import busch_criterion, make_unbiased_povm, oq_positivity_certificate
from .qmath import PAULIS, dephase, gibbs_state
from .quasiprob import (
    _oq_table,
    coarse_grain,
    decohere_state,
    mhq_via_schemes,
    negativity,
    noncommutativity_witnessed,
    oq,
    oq_via_characteristic,
)
from .randomized import (
    random_binary_qubit_povm,
    random_eigenbasis_protocol,
    random_partition,
    random_projective_povm,
    random_protocol,
    random_state,
    random_unit_vector,
)
from .schemes import Povm, epm_prob, tpm_prob
from .thermo import (
    exp_work_average,
    free_energy_ratio,
    gamma_terms,
    hoelder_bound_check,
    second_law_decomposition,
    second_moment_bound_check,
    trace_norm_witness,
    work_split,
)

DIMS = (2, 3, 4)
S_GRID = (0.0, 0.25, 0.5, 0.75, 1.0)
BETAS = (0.1, 1.0, 10.0)


class CheckResult(NamedTuple):
    name: str
    passed: bool
    worst: float
    tol: float
    count: int
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f" ({self.detail})" if self.detail else ""
        return f"{status} {self.name}: worst={self.worst:.3e} tol={self.tol:.0e} n={self.count}{extra}"


def _result(name, worst, tol, n, detail="") -> CheckResult:
    return CheckResult(name, bool(worst <= tol), float(worst), tol, n, detail)


def _instance(rng, k):
    d = DIMS[k % len(DIMS)]
    return d, random_state(d, rng), random_projective_povm(d, rng), random_protocol(d, rng)


def check_marginality(rng, n: int = 1000) -> CheckResult:
    worst = 0.0
    for k in range(n):
        d, rho, A, proto = _instance(rng, k)
        B_H = proto.B_H
        q = oq(rho, A, B_H)
        p_a = np.array([np.trace(rho @ a).real for a in A.effects])
        worst = max(worst,
                    np.max(np.abs(q.marginal_i - p_a)),
                    np.max(np.abs(q.marginal_f - epm_prob(rho, B_H))))
    return _result("marginality", worst, 1e-10, n)


def check_tpm_reproducibility(rng, n: int = 500) -> CheckResult:
    worst = 0.0
    for k in range(n):
        d, rho, A, proto = _instance(rng, k)
        rho_d, _ = dephase(rho, A.effects)
        diff = oq(rho_d, A, proto.B_H).values - tpm_prob(rho_d, A, proto.B_H).values
        worst = max(worst, np.max(np.abs(diff)))
    return _result("incoherent states reproduce TPM", worst, 1e-11, n)


def check_convex_linearity(rng, n: int = 500) -> CheckResult:
    worst = 0.0
    for k in range(n):
        d, _, A, proto = _instance(rng, k)
        m = int(rng.integers(2, 5))
        states = [random_state(d, rng) for _ in range(m)]
        w = rng.dirichlet(np.ones(m))
        mixed = oq(sum(p * s for p, s in zip(w, states)), A, proto.B_H).values
        combo = sum(p * oq(s, A, proto.B_H).values for p, s in zip(w, states))
        worst = max(worst, np.max(np.abs(mixed - combo)))
    return _result("convex linearity", worst, 1e-11, n)


def check_fourier_oracle(rng, n: int = 500) -> CheckResult:
    worst = 0.0
    for k in range(n):
        d, rho, A, proto = _instance(rng, k)
        diff = oq(rho, A, proto.B_H).values - oq_via_characteristic(rho, A, proto.B_H).values
        worst = max(worst, np.max(np.abs(diff)))
    return _result("closed form equals inverse Fourier", worst, 1e-11, n)


def check_jarzynski(rng, n: int = 200, betas=BETAS) -> CheckResult:
    worst = 0.0
    for k in range(n):
        d = DIMS[k % len(DIMS)]
        proto = random_eigenbasis_protocol(d, rng)
        for beta in betas:
            rho = gibbs_state(proto.H_initial, beta)
            lhs = exp_work_average(oq(rho, proto.A, proto.B_H), beta)
            rhs = free_energy_ratio(proto, beta)
            worst = max(worst, abs(lhs - rhs) / rhs)
    return _result("Jarzynski equality for Gibbs input", worst, 1e-9, n * len(betas))


def check_modified_jarzynski(rng, n: int = 200, betas=BETAS) -> tuple[CheckResult, CheckResult]:
    """(direct sum vs closed-form correction, incoherent-state equality of the corrections)."""
    worst_rel, worst_inc = 0.0, 0.0
    for k in range(n):
        d = DIMS[k % len(DIMS)]
        proto = random_protocol(d, rng)
        rho = random_state(d, rng)
        rho_d, _ = dephase(rho, proto.A.effects)
        for beta in betas:
            ratio = free_energy_ratio(proto, beta)
            g = gamma_terms(rho, proto, beta)
            lhs = exp_work_average(oq(rho, proto.A, proto.B_H), beta)
            worst_rel = max(worst_rel, abs(lhs - ratio * g.oq) / abs(ratio * g.oq))
            gd = gamma_terms(rho_d, proto, beta)
            worst_inc = max(worst_inc, abs(gd.oq - gd.tpm) / max(1.0, abs(gd.tpm)))
    m = n * len(betas)
    return (_result("modified Jarzynski closed form", worst_rel, 1e-9, m, "relative"),
            _result("incoherent correction equals TPM", worst_inc, 1e-11, m))


def check_moment_identities(rng, n: int = 1000) -> dict:
    worst = dict(split=0.0, second_law=0.0, hoelder=-np.inf, second_moment=-np.inf)
    for k in range(n):
        d = DIMS[k % len(DIMS)]
        proto = random_protocol(d, rng, traceless=True)
        rho = random_state(d, rng)
        s = work_split(rho, proto)
        worst["split"] = max(worst["split"], abs(s.w_oq - s.w_tpm - s.coherent_term))
        beta = float(rng.uniform(0.1, 10.0))
        law = second_law_decomposition(rho, proto, beta)
        worst["second_law"] = max(worst["second_law"],
                                  abs(law.delta_w - law.delta_F + law.coherence_term))
        h = hoelder_bound_check(rho, proto)
        worst["hoelder"] = max(worst["hoelder"], h.abs_delta_w - h.bound)
        m = second_moment_bound_check(rho, proto)
        worst["second_moment"] = max(worst["second_moment"], m.lower_bound - m.m2)
    return {
        "split": _result("mean work split", worst["split"], 1e-9, n),
        "second_law": _result("coherent second-law decomposition", worst["second_law"], 1e-9, n),
        "hoelder": _result("Hoelder bound (excess)", max(worst["hoelder"], 0.0), 1e-9, n,
                           f"max signed excess {worst['hoelder']:.3e}"),
        "second_moment": _result("second-moment bound (excess)", max(worst["second_moment"], 0.0),
                                 1e-9, n, f"max signed excess {worst['second_moment']:.3e}"),
    }


def check_binary_equivalence(rng, n: int = 1000) -> CheckResult:
    """OQ equals the scheme-reconstructed MHQ for binary qubit POVMs (with bias)."""
    worst = 0.0
    for _ in range(n):
        rho = random_state(2, rng)
        A = random_binary_qubit_povm(rng)
        B_H = random_binary_qubit_povm(rng)
        diff = oq(rho, A, B_H).values - mhq_via_schemes(rho, A, B_H).values
        worst = max(worst, np.max(np.abs(diff)))
    return _result("OQ equals MHQ for binary qubit POVMs", worst, 1e-10, n)


CERT_THETAS = np.linspace(0.1, 3.04, 25)
CERT_MUS = np.linspace(0.05, 1.0, 20)
BOUNDARY_BAND = 1e-9


def check_certificate_grid(rng, n_states: int = 10_000, thetas=CERT_THETAS, mus=CERT_MUS) -> CheckResult:
    """Certificate, Busch criterion and sampled all-state positivity agree on a grid.

    The pair is ``v_i = mu z`` and ``v_f = mu (sin theta, 0, cos theta)``.  Grid
    points within the boundary band of the Busch margin are excluded.
    """
    r = np.array([random_unit_vector(rng) for _ in range(n_states)])
    basis = [np.eye(2, dtype=complex), *PAULIS]
    disagreements, checked, skipped = 0, 0, 0
    for th in thetas:
        for mu in mus:
            v_i = mu * np.array([0.0, 0.0, 1.0])
            v_f = mu * np.array([np.sin(th), 0.0, np.cos(th)])
            jm, margin = busch_criterion(v_i, v_f)
            if abs(margin) <= BOUNDARY_BAND:
                skipped += 1
                continue
            checked += 1
            cert = oq_positivity_certificate(v_i, v_f)
            A = make_unbiased_povm([0.0, 0.0, 1.0], mu)
            B_H = make_unbiased_povm([np.sin(th), 0.0, np.cos(th)], mu)
            # the table is linear in the state: q(rho) = (q(I) + r.q(sigma)) / 2
            t = np.array([_oq_table(b, A, B_H) for b in basis])
            tables = 0.5 * (t[0] + np.einsum("sk,kif->sif", r, t[1:]))
            positive = bool(tables.min() >= -BOUNDARY_BAND)
            if not (cert == jm == positive):
                disagreements += 1
    return _result("certificate, Busch and sampled positivity agree", disagreements, 0, checked,
                   f"{skipped} boundary points skipped")


def check_faithfulness(rng, n: int = 500) -> CheckResult:
    """N = 2 * (total negative mass), so N vanishes exactly when no entry is negative."""
    worst = 0.0
    for k in range(n):
        d, rho, A, proto = _instance(rng, k)
        if k % 2:
            rho, _ = dephase(rho, A.effects)
        q = oq(rho, A, proto.B_H).values
        neg_mass = np.sum(np.clip(-q, 0.0, None))
        worst = max(worst, abs(negativity(q) - 2 * neg_mass))
    return _result("N1 faithfulness", worst, 1e-11, n)


def check_noncommutativity(rng, n: int = 500) -> CheckResult:
    """Positive negativity requires both state-measurement and measurement-measurement noncommutativity."""
    violations = 0
    for k in range(n):
        d, rho, A, proto = _instance(rng, k)
        B_H = proto.B_H
        mode = k % 4
        if mode == 1:
            rho, _ = dephase(rho, A.effects)
        elif mode == 2:
            B_H = A
        elif mode == 3:
            rho, _ = dephase(rho, A.effects)
            B_H = A
        if negativity(oq(rho, A, B_H)) > 1e-9:
            state_side, meas_side = noncommutativity_witnessed(rho, A, B_H)
            violations += not (state_side and meas_side)
    return _result("N2 noncommutativity witness", violations, 0, n)


def check_negativity_convexity(rng, n: int = 500) -> CheckResult:
    worst = -np.inf
    for k in range(n):
        d, _, A, proto = _instance(rng, k)
        m = int(rng.integers(2, 5))
        w = rng.dirichlet(np.ones(m))
        tables = [oq(random_state(d, rng), A, proto.B_H).values for _ in range(m)]
        mixed = sum(p * t for p, t in zip(w, tables))
        worst = max(worst, negativity(mixed) - sum(p * negativity(t) for p, t in zip(w, tables)))
    return _result("N3 convexity", max(worst, 0.0), 1e-11, n, f"max signed excess {worst:.3e}")


def check_decoherence_monotone(rng, n: int = 500, basis: str = "A", s_grid=S_GRID) -> CheckResult:
    worst = -np.inf
    for k in range(n):
        d, rho, A, proto = _instance(rng, k)
        B_H = proto.B_H
        effects = A.effects if basis == "A" else B_H.effects
        base = negativity(oq(rho, A, B_H))
        for s in s_grid:
            worst = max(worst, negativity(oq(decohere_state(rho, effects, s), A, B_H)) - base)
    return _result(f"N4 decoherence monotone ({basis} basis)", max(worst, 0.0), 1e-11,
                   n * len(s_grid), f"max signed excess {worst:.3e}")


def check_coarse_graining(rng, n: int = 500) -> CheckResult:
    worst = -np.inf
    for k in range(n):
        d, rho, A, proto = _instance(rng, k)
        q = oq(rho, A, proto.B_H)
        cg = coarse_grain(q, random_partition(q.shape[0], rng), random_partition(q.shape[1], rng))
        worst = max(worst, negativity(cg) - negativity(q))
    return _result("N5 coarse-graining monotone", max(worst, 0.0), 1e-11, n,
                   f"max signed excess {worst:.3e}")


def check_witness(cs=(0.1, 0.3, 0.5)) -> CheckResult:
    """Trace-norm witness of a qubit with off-diagonal c equals 2|c|."""
    A = Povm.from_hamiltonian(np.diag([0.0, 1.0]))
    worst = 0.0
    for c in cs:
        rho = np.array([[0.5, c], [c, 0.5]], dtype=complex)
        worst = max(worst, abs(trace_norm_witness(rho, A) - 2 * abs(c)))
    return _result("trace-norm witness equals 2|c|", worst, 1e-3, len(cs))


def run_all(seed: int = 0, scale: float = 1.0) -> list:
    """Run every randomized suite; ``scale`` multiplies the instance counts."""
    rng = np.random.default_rng(seed)

    def n(k):
        return max(1, int(round(k * scale)))

    results = [
        check_marginality(rng, n(1000)),
        check_tpm_reproducibility(rng, n(500)),
        check_convex_linearity(rng, n(500)),
        check_fourier_oracle(rng, n(500)),
        check_jarzynski(rng, n(200)),
        *check_modified_jarzynski(rng, n(200)),
        *check_moment_identities(rng, n(1000)).values(),
        check_binary_equivalence(rng, n(1000)),
        check_certificate_grid(rng, n(10_000)),
        check_faithfulness(rng, n(500)),
        check_noncommutativity(rng, n(500)),
        check_negativity_convexity(rng, n(500)),
        check_decoherence_monotone(rng, n(500)),
        check_coarse_graining(rng, n(500)),
        check_witness(),
    ]
    return results
