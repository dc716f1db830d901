"""Binary qubit measurements: joint measurability and work-extraction bounds.

Convention: outcome 0 is the ground level and outcome 1 the excited level of
a gap ``Delta``, so ``(i, f) = (1, 0)`` is the de-excitation cell.  A binary
effect pair is described by the Bloch vector ``v`` of its outcome-0 effect,
``A_0 = ((1 + x) I + v.sigma)/2`` and ``A_1 = I - A_0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import (
    BlochOutOfBall,
    DegenerateDirections,
    DimMismatch,
    InvalidPovm,
    SharpnessOutOfRange,
)
from .qmath import PAULIS, bloch_components, check_state
from .quasiprob import oq
from .schemes import Povm
from .thermo import Protocol, work_moment

PSD_TOL = 1e-12
JM_TOL = 1e-12


@dataclass(frozen=True)
class BlochEffectPair:
    """Bloch data of the two binary measurements (outcome-0 effects)."""

    v_i: np.ndarray
    v_f: np.ndarray
    bias_x: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "v_i", np.asarray(self.v_i, dtype=float))
        object.__setattr__(self, "v_f", np.asarray(self.v_f, dtype=float))
        for v in (self.v_i, self.v_f):
            if 1 - abs(self.bias_x) - np.linalg.norm(v) < -PSD_TOL:
                raise InvalidPovm("binary effect is not positive semidefinite")

    @property
    def mu_i(self) -> float:
        return float(np.linalg.norm(self.v_i))

    @property
    def mu_f(self) -> float:
        return float(np.linalg.norm(self.v_f))


def _sigma_dot(v) -> np.ndarray:
    return sum(c * s for c, s in zip(v, PAULIS))


def binary_povm(v, bias: float = 0.0, energies=None) -> Povm:
    """Effects ((1 + x) I + v.sigma)/2 and ((1 - x) I - v.sigma)/2."""
    v = np.asarray(v, dtype=float)
    if 1 - abs(bias) - np.linalg.norm(v) < -PSD_TOL:
        raise InvalidPovm("need 1 +- x +- |v| >= 0")
    eye = np.eye(2, dtype=complex)
    a0 = 0.5 * ((1 + bias) * eye + _sigma_dot(v))
    return Povm((a0, eye - a0), energies)


def make_unbiased_povm(direction, mu: float, energies=None) -> Povm:
    """Smeared projective measurement mu * Pi + (1 - mu) I/2 along ``direction``."""
    if not 0.0 <= mu <= 1.0:
        raise SharpnessOutOfRange(f"sharpness {mu} outside [0, 1]")
    d = np.asarray(direction, dtype=float)
    norm = np.linalg.norm(d)
    if abs(norm - 1.0) > 1e-9:
        raise ValueError("direction must be a unit vector")
    return binary_povm(mu * d / norm, 0.0, energies)


def smear(P: Povm, mu: float) -> Povm:
    """mu * effect + (1 - mu) I/d for every effect of ``P``."""
    if not 0.0 <= mu <= 1.0:
        raise SharpnessOutOfRange(f"sharpness {mu} outside [0, 1]")
    eye = np.eye(P.dim, dtype=complex)
    return Povm(tuple(mu * e + (1 - mu) * eye / len(P) for e in P.effects), P.energies)


def effect_bloch(P: Povm) -> np.ndarray:
    """Bloch vector of the outcome-0 effect of a binary qubit POVM."""
    if P.dim != 2 or len(P) != 2:
        raise DimMismatch("need a binary qubit POVM")
    return bloch_components(P.effects[0])


def busch_criterion(v_i, v_f) -> tuple[bool, float]:
    """Joint measurability of two unbiased binary qubit POVMs.

    Returns ``(jm, margin)`` with ``margin = 2 - |v_i + v_f| - |v_i - v_f|``.
    """
    v_i = np.asarray(v_i, dtype=float)
    v_f = np.asarray(v_f, dtype=float)
    margin = 2.0 - np.linalg.norm(v_i + v_f) - np.linalg.norm(v_i - v_f)
    return bool(margin >= -JM_TOL), float(margin)


def oq_bloch_closed_form(r, v_i, v_f, x_i: int, x_f: int) -> float:
    """OQ entry for unbiased binary qubit POVMs in Bloch form."""
    r = np.asarray(r, dtype=float)
    if np.linalg.norm(r) > 1 + 1e-10:
        raise BlochOutOfBall("state Bloch vector outside the unit ball")
    si, sf = (-1.0) ** x_i, (-1.0) ** x_f
    v_i = np.asarray(v_i, dtype=float)
    v_f = np.asarray(v_f, dtype=float)
    return 0.25 * (1 + si * sf * (v_i @ v_f) + (si * v_i + sf * v_f) @ r)


def oq_positivity_certificate(v_i, v_f, tol: float = JM_TOL) -> bool:
    """True iff 1 +- v_i.v_f - |v_i +- v_f| >= 0 for both signs.

    That is the minimum of every OQ entry over the Bloch ball, so the table is
    nonnegative for all qubit states exactly when this holds.
    """
    v_i = np.asarray(v_i, dtype=float)
    v_f = np.asarray(v_f, dtype=float)
    dot = v_i @ v_f
    plus = 1 + dot - np.linalg.norm(v_i + v_f)
    minus = 1 - dot - np.linalg.norm(v_i - v_f)
    return bool(plus >= -tol and minus >= -tol)


def classical_bound(v_i, v_f, Delta: float) -> float:
    """State-independent cap on work from the de-excitation cell of a positive OQ."""
    if Delta <= 0:
        raise ValueError("energy gap must be positive")
    v_i = np.asarray(v_i, dtype=float)
    v_f = np.asarray(v_f, dtype=float)
    return 0.25 * Delta * (1 - v_i @ v_f + np.linalg.norm(v_i - v_f))


def saturating_state(v_i, v_f) -> np.ndarray:
    """Bloch vector -(v_i - v_f)/|v_i - v_f| that maximizes the (1, 0) entry."""
    diff = np.asarray(v_i, dtype=float) - np.asarray(v_f, dtype=float)
    norm = np.linalg.norm(diff)
    if norm < 1e-12:
        raise DegenerateDirections("v_i and v_f coincide")
    return -diff / norm


def jm_sharpness_limit(dir_i, dir_f) -> float:
    """Largest common sharpness keeping two unbiased directions jointly measurable."""
    dir_i = np.asarray(dir_i, dtype=float)
    dir_f = np.asarray(dir_f, dtype=float)
    s = np.linalg.norm(dir_i + dir_f) + np.linalg.norm(dir_i - dir_f)
    return float(min(1.0, 2.0 / s))


def bound_at_sharpness(dir_i, dir_f, Delta: float, mu: float) -> float:
    return classical_bound(mu * np.asarray(dir_i, float), mu * np.asarray(dir_f, float), Delta)


def optimize_bound_over_sharpness(dir_i, dir_f, Delta: float) -> tuple[float, float]:
    """Maximize the classical bound over a common sharpness within the JM region.

    Returns ``(mu_star, W_cl_max)``.  The objective is a concave or increasing
    quadratic in ``mu``, so a bounded scalar search plus the endpoint suffices.
    """
    mu_jm = jm_sharpness_limit(dir_i, dir_f)
    res = minimize_scalar(lambda m: -bound_at_sharpness(dir_i, dir_f, Delta, m),
                          bounds=(0.0, mu_jm), method="bounded",
                          options={"xatol": 1e-10})
    candidates = [(bound_at_sharpness(dir_i, dir_f, Delta, m), m)
                  for m in (0.0, float(res.x), mu_jm)]
    w, mu_star = max(candidates, key=lambda c: (c[0], -c[1]))
    return mu_star, w


def bound_landscape(dir_i, dir_f, Delta: float, mus) -> np.ndarray:
    """Classical bound at each sharpness in ``mus`` (NaN outside the JM region)."""
    mu_jm = jm_sharpness_limit(dir_i, dir_f)
    return np.array([bound_at_sharpness(dir_i, dir_f, Delta, m) if m <= mu_jm + 1e-12 else np.nan
                     for m in mus])


class ExtractionComparison(NamedTuple):
    W_q: float
    W_cl_max: float
    nonclassical: bool
    busch_margin: float
    mu_star: float


def energy_gap(protocol: Protocol) -> float:
    e = np.asarray(protocol.A.energies)
    return float(e.max() - e.min())


def work_extraction_compare(rho, protocol: Protocol, mu: float) -> ExtractionComparison:
    """Quasi-work from the OQ at sharpness ``mu`` against the optimized JM bound."""
    rho = check_state(rho)
    if protocol.dim != 2 or rho.shape != (2, 2):
        raise DimMismatch("work-extraction comparison is defined for qubits")
    protocol.require_sharp(rank_one=True)
    A = smear(protocol.A, mu)
    B_H = smear(protocol.B_H, mu)
    W_q = -work_moment(oq(rho, A, B_H), 1)
    dir_i = effect_bloch(protocol.A)
    dir_f = effect_bloch(protocol.B_H)
    mu_star, W_cl = optimize_bound_over_sharpness(dir_i, dir_f, energy_gap(protocol))
    _, margin = busch_criterion(mu * dir_i, mu * dir_f)
    return ExtractionComparison(W_q, W_cl, bool(W_q > W_cl + 1e-10), margin, mu_star)
