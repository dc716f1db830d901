"""Quasiprobability constructions (OQ, KDQ, MHQ) and negativity tools."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .dist import QuasiDist
from .errors import BadMixingWeight, BadPartition, NotNormalized
from .qmath import Basis, as_operator, check_state, commutator, dephase
from .schemes import (
    Povm,
    _energies,
    _match,
    epm_prob,
    post_measurement_operators,
    tpm_prob,
    wtpm_prob,
)

NORM_TOL = 1e-10


def _oq_table(rho, A: Povm, B_H: Povm) -> np.ndarray:
    # linear in rho; no validation so it also accepts traceless operators.
    # The EPM minus TPM-marginal correction is formed at operator level first,
    # which keeps it exactly zero for states already block-diagonal in A.
    post = post_measurement_operators(rho, A)
    tpm = np.array([[np.trace(m @ b).real for b in B_H.effects] for m in post])
    defect = rho - sum(post)
    corr = np.array([np.trace(defect @ b).real for b in B_H.effects])
    return tpm + corr[None, :] / len(A)


def oq(rho, A: Povm, B_H: Povm) -> QuasiDist:
    """Operational quasiprobability built from EPM and TPM statistics.

    ``q_if = p^TPM_if + (p^EPM_f - sum_i' p^TPM_i'f) / d`` where ``d`` is the
    number of outcomes of ``A``.
    """
    rho = _match(rho, A, B_H)
    return QuasiDist(_oq_table(rho, A, B_H), "OQ", _energies(A), _energies(B_H))


def characteristic_table(rho, A: Povm, B_H: Povm) -> np.ndarray:
    """chi_mn: EPM characteristic function on row m = 0, TPM elsewhere."""
    rho = _match(rho, A, B_H)
    da, db = len(A), len(B_H)
    tpm = tpm_prob(rho, A, B_H).values
    epm = epm_prob(rho, B_H)
    ga = np.exp(2j * np.pi / da)
    gb = np.exp(2j * np.pi / db)
    i_idx = np.arange(da)
    f_idx = np.arange(db)
    chi = np.empty((da, db), dtype=complex)
    for n in range(db):
        chi[0, n] = np.sum(epm * gb ** (n * f_idx))
    for m in range(1, da):
        for n in range(db):
            phase = np.outer(ga ** (m * i_idx), gb ** (n * f_idx))
            chi[m, n] = np.sum(tpm * phase)
    chi[0, 0] = 1.0
    return chi


def inverse_characteristic(chi: np.ndarray) -> np.ndarray:
    """q_if = (1 / (d_A d_B)) sum_mn gamma^(-i m - f n) chi_mn."""
    da, db = chi.shape
    ga = np.exp(2j * np.pi / da)
    gb = np.exp(2j * np.pi / db)
    q = np.empty((da, db), dtype=complex)
    for i in range(da):
        for f in range(db):
            kernel = np.outer(ga ** (-i * np.arange(da)), gb ** (-f * np.arange(db)))
            q[i, f] = np.sum(kernel * chi) / (da * db)
    return q


def oq_via_characteristic(rho, A: Povm, B_H: Povm) -> QuasiDist:
    """OQ by explicit inverse Fourier transform of the characteristic table."""
    q = inverse_characteristic(characteristic_table(rho, A, B_H))
    return QuasiDist(q.real, "OQ", _energies(A), _energies(B_H))


def kdq(rho, A: Povm, B_H: Povm) -> QuasiDist:
    """Kirkwood-Dirac table Tr(rho A_i B^H_f) (complex)."""
    rho = _match(rho, A, B_H)
    vals = np.array([[np.trace(rho @ a @ b) for b in B_H.effects] for a in A.effects])
    if abs(vals.sum().imag) > NORM_TOL:
        raise NotNormalized("KDQ total has a nonzero imaginary part")
    return QuasiDist(vals, "KDQ", _energies(A), _energies(B_H))


def mhq_direct(rho, A: Povm, B_H: Povm) -> QuasiDist:
    """Margenau-Hill table: real part of the KDQ."""
    k = kdq(rho, A, B_H)
    return QuasiDist(k.values.real, "MHQ", k.energies_i, k.energies_f)


def mhq_via_schemes(rho, A: Povm, B_H: Povm) -> QuasiDist:
    """MHQ reconstructed from EPM, TPM and wTPM probabilities."""
    rho = _match(rho, A, B_H)
    tpm = tpm_prob(rho, A, B_H).values
    w = wtpm_prob(rho, A, B_H).values
    epm = epm_prob(rho, B_H)
    vals = tpm + 0.5 * (epm[None, :] - w)
    return QuasiDist(vals, "MHQ", _energies(A), _energies(B_H))


def negativity(q: QuasiDist | np.ndarray, tol: float = NORM_TOL) -> float:
    """sum |q_if| - 1 (modulus for complex tables), floored at 0 against round-off."""
    vals = q.values if isinstance(q, QuasiDist) else np.asarray(q)
    total = vals.sum()
    if abs(total - 1.0) > tol:
        raise NotNormalized(f"table sums to {total}")
    return max(0.0, float(np.sum(np.abs(vals)) - 1.0))


def _check_partition(parts: Sequence[Sequence[int]], n: int) -> list:
    flat = [k for part in parts for k in part]
    if any(len(part) == 0 for part in parts) or sorted(flat) != list(range(n)):
        raise BadPartition(f"{parts!r} is not a partition of range({n})")
    return [list(part) for part in parts]


def coarse_grain(q: QuasiDist, partition_i, partition_f) -> QuasiDist:
    """Sum the table over blocks of first and second outcomes."""
    pi = _check_partition(partition_i, q.shape[0])
    pf = _check_partition(partition_f, q.shape[1])
    vals = np.array([[q.values[np.ix_(I, F)].sum() for F in pf] for I in pi])
    return QuasiDist(vals, q.kind)


def decohere_state(rho, basis: Basis, s: float) -> np.ndarray:
    """(1 - s) rho + s D[rho] with D the dephasing in ``basis``."""
    if not 0.0 <= s <= 1.0:
        raise BadMixingWeight(f"mixing weight {s} outside [0, 1]")
    rho = check_state(rho)
    rho_d, _ = dephase(rho, basis)
    return (1.0 - s) * rho + s * rho_d


def max_commutator(a, b) -> float:
    return float(np.max(np.abs(commutator(as_operator(a), as_operator(b)))))


def noncommutativity_witnessed(rho, A: Povm, B_H: Povm, tol: float = 1e-9) -> tuple[bool, bool]:
    """(some [rho, A_i] != 0, some [A_i, B^H_f] != 0) at max-norm tolerance."""
    state_side = any(max_commutator(rho, a) > tol for a in A.effects)
    meas_side = any(max_commutator(a, b) > tol for a in A.effects for b in B_H.effects)
    return state_side, meas_side
