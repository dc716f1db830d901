"""Work statistics over quasiprobability tables.

A :class:`Protocol` fixes the initial and final Hamiltonians and the evolution
channel; the first and second measurements default to sharp energy
measurements of ``H_initial`` and ``H_final``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .dist import QuasiDist
from .errors import (
    BetaNegative,
    BetaNonPositive,
    MissingEnergies,
    NonSharpMeasurement,
    NotTraceless,
    SingularGibbs,
    UnsupportedDim,
)
from .qmath import (
    PAULIS,
    as_operator,
    bloch_components,
    check_state,
    coherence_l1,
    coherence_rel_entropy,
    dagger,
    dephase,
    eig_hermitian,
    entropy_vn,
    gibbs_state,
    log_partition_function,
    require_hermitian,
)
from .quasiprob import oq
from .schemes import Channel, Povm, heisenberg, post_measurement_operators, tpm_prob


@dataclass(frozen=True, eq=False)
class Protocol:
    """Two-time work protocol: measure, evolve through ``channel``, measure.

    ``A`` and ``B`` override the default sharp energy measurements.  ``B`` is
    given at the final time; :attr:`B_H` is its Heisenberg-picture image.
    """

    H_initial: np.ndarray
    H_final: np.ndarray
    channel: Channel
    A: Optional[Povm] = None
    B: Optional[Povm] = None

    def __post_init__(self):
        object.__setattr__(self, "H_initial", require_hermitian(self.H_initial))
        object.__setattr__(self, "H_final", require_hermitian(self.H_final))
        if self.H_initial.shape != self.H_final.shape:
            raise ValueError("initial and final Hamiltonians differ in dimension")
        if self.A is None:
            object.__setattr__(self, "A", Povm.from_hamiltonian(self.H_initial))
        if self.B is None:
            object.__setattr__(self, "B", Povm.from_hamiltonian(self.H_final))

    @property
    def dim(self) -> int:
        return self.H_initial.shape[0]

    @cached_property
    def B_H(self) -> Povm:
        return heisenberg(self.B, self.channel)

    @cached_property
    def H_final_heisenberg(self) -> np.ndarray:
        return self.channel.dual(self.H_final)

    def is_sharp(self) -> bool:
        return self.A.is_projective() and self.B.is_projective()

    def require_sharp(self, rank_one: bool = False) -> None:
        if not self.is_sharp():
            raise NonSharpMeasurement("protocol measurements must be projective")
        if rank_one and len(self.A) != self.dim:
            raise NonSharpMeasurement("first measurement must be rank-one (nondegenerate H_initial)")


class WorkStats(NamedTuple):
    mean: float
    second_moment: float
    jarzynski_lhs: float
    delta_F: float
    gamma: float
    exp_minus_beta_dF: float


class GammaTerms(NamedTuple):
    tpm: float
    oq: float
    kdq: complex


class WorkSplit(NamedTuple):
    w_oq: float
    w_tpm: float
    coherent_term: float


class SecondLaw(NamedTuple):
    delta_w: float
    delta_F: float
    coherence_term: float


class HoelderCheck(NamedTuple):
    abs_delta_w: float
    bound: float
    bound_rho_basis: float


class SecondMomentCheck(NamedTuple):
    m2: float
    lower_bound: float


def work_moment(q: QuasiDist, n: int):
    """sum_if q_if (E_f - E_i)^n."""
    if n < 1 or int(n) != n:
        raise ValueError("moment order must be a positive integer")
    if not q.has_energies:
        raise MissingEnergies("distribution carries no energy labels")
    val = np.sum(q.values * q.work_values() ** n)
    return complex(val) if q.kind == "KDQ" else float(val)


def exp_work_average(q: QuasiDist, beta: float):
    """<exp(-beta w)> over the table."""
    if not q.has_energies:
        raise MissingEnergies("distribution carries no energy labels")
    val = np.sum(q.values * np.exp(-beta * q.work_values()))
    return complex(val) if q.kind == "KDQ" else float(val)


def free_energy_ratio(protocol: Protocol, beta: float) -> float:
    """Z_f / Z_i = exp(-beta dF)."""
    if beta < 0:
        raise BetaNegative("beta must be nonnegative")
    return float(np.exp(log_partition_function(protocol.H_final, beta)
                        - log_partition_function(protocol.H_initial, beta)))


def delta_free_energy(protocol: Protocol, beta: float) -> float:
    """dF = -(1/beta) ln(Z_f/Z_i); the beta -> 0 limit is (Tr H_f - Tr H_i)/d."""
    if beta < 0:
        raise BetaNegative("beta must be nonnegative")
    if beta == 0:
        return float(np.trace(protocol.H_final - protocol.H_initial).real / protocol.dim)
    return -(log_partition_function(protocol.H_final, beta)
             - log_partition_function(protocol.H_initial, beta)) / beta


def _inverse_gibbs(H, beta: float) -> np.ndarray:
    dec = eig_hermitian(H)
    mult = np.array(dec.multiplicities)
    coeffs = []
    with np.errstate(over="ignore"):
        for e in dec.eigenvalues:
            # Z e^{beta E} = sum_y m_y exp(-beta (E_y - E))
            coeffs.append(np.sum(mult * np.exp(-beta * (dec.eigenvalues - e))))
    coeffs = np.array(coeffs)
    if not np.all(np.isfinite(coeffs)):
        raise SingularGibbs("Gibbs state not invertible at this beta")
    return sum(c * p for c, p in zip(coeffs, dec.projectors))


def gamma_terms(rho, protocol: Protocol, beta: float) -> GammaTerms:
    """Coherence corrections to the Jarzynski equality for TPM, OQ and KDQ."""
    if beta < 0:
        raise BetaNegative("beta must be nonnegative")
    protocol.require_sharp(rank_one=True)
    rho = check_state(rho)
    rho_d, rho_off = dephase(rho, protocol.A.effects)
    gi_inv = _inverse_gibbs(protocol.H_initial, beta)
    x = protocol.channel.dual(gibbs_state(protocol.H_final, beta))
    g_tpm = np.trace(gi_inv @ rho_d @ x).real
    g_oq = g_tpm + np.trace(gi_inv).real * np.trace(rho_off @ x).real / len(protocol.A)
    g_kdq = g_tpm + np.trace(gi_inv @ rho_off @ x)
    return GammaTerms(float(g_tpm), float(g_oq), complex(g_kdq))


def jarzynski_check(rho, protocol: Protocol, beta: float) -> WorkStats:
    """OQ work statistics with the closed-form modified Jarzynski factor."""
    if beta < 0:
        raise BetaNegative("beta must be nonnegative")
    protocol.require_sharp(rank_one=True)
    q = oq(rho, protocol.A, protocol.B_H)
    g = gamma_terms(rho, protocol, beta)
    return WorkStats(
        mean=work_moment(q, 1),
        second_moment=work_moment(q, 2),
        jarzynski_lhs=exp_work_average(q, beta),
        delta_F=delta_free_energy(protocol, beta),
        gamma=g.oq,
        exp_minus_beta_dF=free_energy_ratio(protocol, beta),
    )


def work_split(rho, protocol: Protocol) -> WorkSplit:
    """<w>_OQ, <w>_TPM and the coherent contribution Tr(rho_off H^H_f)."""
    protocol.require_sharp()
    rho = check_state(rho)
    w_oq = work_moment(oq(rho, protocol.A, protocol.B_H), 1)
    w_tpm = work_moment(tpm_prob(rho, protocol.A, protocol.B_H), 1)
    _, rho_off = dephase(rho, protocol.A.effects)
    term = np.trace(rho_off @ protocol.B_H.observable()).real
    return WorkSplit(w_oq, w_tpm, float(term))


def second_law_decomposition(rho, protocol: Protocol, beta: float) -> SecondLaw:
    """Split of delta_w into free-energy and coherence parts.

    With ``F(s) = Tr(s H^H_f) - T S(s)`` and ``delta_F = F(rho) - F(rho_D)`` the
    identity is ``delta_w = delta_F - T * C_rel(rho)``, hence ``delta_w <= delta_F``.
    """
    if beta <= 0:
        raise BetaNonPositive("beta must be positive")
    split = work_split(rho, protocol)
    temp = 1.0 / beta
    rho = check_state(rho)
    rho_d, _ = dephase(rho, protocol.A.effects)
    h = protocol.B_H.observable()

    def free_energy(s):
        return np.trace(s @ h).real - temp * entropy_vn(s)

    return SecondLaw(
        delta_w=split.w_oq - split.w_tpm,
        delta_F=float(free_energy(rho) - free_energy(rho_d)),
        coherence_term=temp * coherence_rel_entropy(rho, protocol.A.effects),
    )


def _offdiag_max(op: np.ndarray) -> float:
    mask = ~np.eye(op.shape[0], dtype=bool)
    return float(np.max(np.abs(op[mask]), initial=0.0))


def hoelder_bound_check(rho, protocol: Protocol) -> HoelderCheck:
    """|delta_w| against C_l1(rho) * max_{i!=j} |(H^H_f)_ij|.

    ``bound`` takes both factors in the first-measurement eigenbasis, the basis
    in which ``rho`` is split into diagonal and off-diagonal parts.
    ``bound_rho_basis`` instead reads the Hamiltonian off-diagonals in the
    eigenbasis of ``rho`` itself; it is reported, not asserted.
    """
    protocol.require_sharp(rank_one=True)
    split = work_split(rho, protocol)
    v = eig_hermitian(protocol.H_initial).vectors
    h = protocol.B_H.observable()
    c_l1 = coherence_l1(rho, v)
    bound = c_l1 * _offdiag_max(dagger(v) @ h @ v)
    w = eig_hermitian(as_operator(rho)).vectors
    bound_rho = c_l1 * _offdiag_max(dagger(w) @ h @ w)
    return HoelderCheck(abs(split.w_oq - split.w_tpm), bound, bound_rho)


def second_moment_bound_check(rho, protocol: Protocol) -> SecondMomentCheck:
    """<w^2>_OQ against Tr(rho_off (H^H_f)^2); needs Tr H_initial = 0."""
    protocol.require_sharp()
    if abs(np.trace(protocol.H_initial)) > 1e-10:
        raise NotTraceless("initial Hamiltonian must be traceless")
    rho = check_state(rho)
    m2 = work_moment(oq(rho, protocol.A, protocol.B_H), 2)
    _, rho_off = dephase(rho, protocol.A.effects)
    h = protocol.B_H.observable()
    return SecondMomentCheck(m2, float(np.trace(rho_off @ h @ h).real))


def _direction(theta, phi):
    theta, phi = np.broadcast_arrays(theta, phi)
    return np.stack([np.sin(theta) * np.cos(phi),
                     np.sin(theta) * np.sin(phi),
                     np.cos(theta)], axis=-1)


def _projective_povm(n) -> Povm:
    ns = sum(c * s for c, s in zip(n, PAULIS))
    eye = np.eye(2, dtype=complex)
    return Povm((0.5 * (eye + ns), 0.5 * (eye - ns)))


def _witness_value(rho, A: Povm, n) -> float:
    B = _projective_povm(n)
    return float(np.sum(np.abs(oq(rho, A, B).values - tpm_prob(rho, A, B).values)))


def trace_norm_witness(rho, A: Povm, scan_resolution=(720, 360), refine_sweeps: int = 4) -> float:
    """max over projective B^H of sum_if |q^OQ_if - p^TPM_if| for a qubit.

    Scans Bloch directions on an (n_phi, n_theta) grid, then refines the best
    cell by alternating bounded one-dimensional searches.  The grid pass uses
    the fact that every table entry is affine in the measurement direction.
    """
    rho = check_state(rho)
    if rho.shape != (2, 2):
        raise UnsupportedDim("trace-norm witness scan is implemented for qubits only")
    if not A.is_projective():
        raise NonSharpMeasurement("first measurement must be projective")
    n_phi, n_theta = scan_resolution
    thetas = np.linspace(0.0, np.pi, n_theta)
    phis = np.linspace(0.0, 2 * np.pi, n_phi, endpoint=False)
    dirs = _direction(thetas[:, None], phis[None, :])  # (n_theta, n_phi, 3)

    # Tr(X B_pm) = (Tr X +- x.n)/2 for X in {rho, A_i^1/2 rho A_i^1/2}
    ops = [rho] + post_measurement_operators(rho, A)
    tr = np.array([np.trace(x).real for x in ops])
    bl = np.array([bloch_components(x) for x in ops])
    proj = dirs @ bl.T  # (..., 1 + d)
    signs = np.array([1.0, -1.0])
    epm = 0.5 * (tr[0] + signs * proj[..., :1])  # (..., 2)
    tpm = 0.5 * (tr[1:, None] + signs[None, :] * proj[..., 1:, None])  # (..., i, f)
    diff = (epm - tpm.sum(axis=-2)) / len(A)
    objective = len(A) * np.sum(np.abs(diff), axis=-1)

    k = int(np.argmax(objective))  # first max: smallest theta, then phi
    ti, pj = divmod(k, n_phi)
    best_t, best_p = thetas[ti], phis[pj]
    best = _witness_value(rho, A, _direction(best_t, best_p))
    dt = np.pi / max(n_theta - 1, 1)
    dp = 2 * np.pi / n_phi
    for _ in range(refine_sweeps):
        r = minimize_scalar(lambda t: -_witness_value(rho, A, _direction(t, best_p)),
                            bounds=(max(best_t - dt, 0.0), min(best_t + dt, np.pi)),
                            method="bounded", options={"xatol": 1e-10})
        if -r.fun > best:
            best, best_t = -r.fun, r.x
        r = minimize_scalar(lambda p: -_witness_value(rho, A, _direction(best_t, p)),
                            bounds=(best_p - dp, best_p + dp),
                            method="bounded", options={"xatol": 1e-10})
        if -r.fun > best:
            best, best_p = -r.fun, r.x
    return best
