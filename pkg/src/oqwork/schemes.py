"""Measurement schemes: end-point (EPM), two-point (TPM) and weak two-point
(wTPM) statistics, plus Heisenberg-picture transport of the late measurement.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .dist import JointDist
from .errors import (
    ChannelNotUnital,
    DimMismatch,
    InvalidPovm,
    NegativeProbability,
    NotPSD,
)
from .qmath import (
    HERM_TOL,
    SpectralDecomp,
    as_operator,
    check_state,
    dagger,
    eig_hermitian,
    is_hermitian,
)

PROB_CLAMP = 1e-12
SQRT_SNAP = 1e-13
PROJ_TOL = 1e-14


@dataclass(frozen=True)
class Povm:
    """Ordered list of positive effects summing to the identity."""

    effects: tuple
    energies: Optional[tuple] = None
    labels: Optional[tuple] = None

    def __post_init__(self):
        effects = tuple(as_operator(e) for e in self.effects)
        if not effects:
            raise InvalidPovm("a POVM needs at least one effect")
        d = effects[0].shape[0]
        for k, e in enumerate(effects):
            if e.shape != (d, d):
                raise InvalidPovm("effects have inconsistent dimensions")
            if not is_hermitian(e):
                raise InvalidPovm(f"effect {k} is not Hermitian")
            if np.linalg.eigvalsh(0.5 * (e + dagger(e)))[0] < -HERM_TOL:
                raise InvalidPovm(f"effect {k} is not positive semidefinite")
        if np.max(np.abs(sum(effects) - np.eye(d))) > HERM_TOL:
            raise InvalidPovm("effects do not sum to the identity")
        object.__setattr__(self, "effects", effects)
        if self.energies is not None:
            energies = tuple(float(x) for x in self.energies)
            if len(energies) != len(effects):
                raise InvalidPovm("one energy per effect is required")
            object.__setattr__(self, "energies", energies)
        labels = tuple(range(len(effects))) if self.labels is None else tuple(self.labels)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_spectral(cls, dec: SpectralDecomp) -> "Povm":
        """Sharp energy measurement on the eigenspaces of ``dec``."""
        return cls(tuple(dec.projectors), tuple(dec.eigenvalues))

    @classmethod
    def from_hamiltonian(cls, H) -> "Povm":
        return cls.from_spectral(eig_hermitian(H))

    @property
    def dim(self) -> int:
        return self.effects[0].shape[0]

    def __len__(self) -> int:
        return len(self.effects)

    def is_projective(self, tol: float = 1e-10) -> bool:
        return all(np.max(np.abs(e @ e - e)) <= tol for e in self.effects)

    def observable(self) -> np.ndarray:
        """sum_k E_k * effect_k (requires energies)."""
        if self.energies is None:
            raise InvalidPovm("POVM carries no energies")
        return sum(e * m for e, m in zip(self.energies, self.effects))


@dataclass(frozen=True)
class Channel:
    """Heisenberg-picture (dual) action of an evolution channel.

    Only unitary channels are built concretely; ``dual`` lets callers supply any
    unital dual map for abstract use.
    """

    kind: str = "unitary"
    U: Optional[np.ndarray] = None
    dual_map: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind == "unitary":
            U = as_operator(self.U)
            if np.max(np.abs(dagger(U) @ U - np.eye(U.shape[0]))) > 1e-10:
                raise ChannelNotUnital("U is not unitary")
            object.__setattr__(self, "U", U)
        elif self.kind == "dual":
            if self.dual_map is None:
                raise ValueError("dual channel needs a dual_map")
        else:
            raise ValueError(f"unknown channel kind {self.kind!r}")

    @classmethod
    def unitary(cls, U) -> "Channel":
        return cls("unitary", U=U)

    @classmethod
    def identity(cls, d: int) -> "Channel":
        return cls("unitary", U=np.eye(d, dtype=complex))

    @classmethod
    def from_dual(cls, fn: Callable[[np.ndarray], np.ndarray]) -> "Channel":
        return cls("dual", dual_map=fn)

    def dual(self, op) -> np.ndarray:
        op = as_operator(op)
        if self.kind == "unitary":
            return dagger(self.U) @ op @ self.U
        return as_operator(self.dual_map(op))

    def check_unital(self, d: int, tol: float = 1e-10) -> None:
        if np.max(np.abs(self.dual(np.eye(d, dtype=complex)) - np.eye(d))) > tol:
            raise ChannelNotUnital("dual map does not preserve the identity")


def heisenberg(B: Povm, ch: Channel) -> Povm:
    """Transport the late measurement to the initial time: B^H_f = dual(B_f)."""
    ch.check_unital(B.dim)
    return Povm(tuple(ch.dual(e) for e in B.effects), B.energies, B.labels)


def _match(rho, *povms: Povm) -> np.ndarray:
    rho = check_state(rho)
    for p in povms:
        if p.dim != rho.shape[0]:
            raise DimMismatch(f"state has dim {rho.shape[0]}, POVM has dim {p.dim}")
    return rho


def clamp_probabilities(p: np.ndarray) -> np.ndarray:
    """Zero round-off negatives; larger negatives are an error."""
    p = np.asarray(p, dtype=float)
    if np.any(p < -PROB_CLAMP):
        raise NegativeProbability(f"probability {p.min():.3e} below clamp")
    return np.where(p < 0, 0.0, p)


def _energies(p: Povm):
    return None if p.energies is None else np.array(p.energies)


def epm_prob(rho, B_H: Povm) -> np.ndarray:
    rho = _match(rho, B_H)
    return clamp_probabilities([np.trace(rho @ b).real for b in B_H.effects])


def sqrt_effect(E) -> np.ndarray:
    """Positive square root of a PSD effect via its spectral decomposition."""
    E = as_operator(E)
    if np.max(np.abs(E @ E - E)) <= PROJ_TOL:
        return E  # a projector is its own root
    dec = eig_hermitian(E)
    if dec.eigenvalues[0] < -HERM_TOL:
        raise NotPSD(f"effect has eigenvalue {dec.eigenvalues[0]:.3e}")
    # round-off eigenvalues (~1e-17) would otherwise leak sqrt-sized errors
    root = np.zeros((dec.dim, dec.dim), dtype=complex)
    for e, p in zip(dec.eigenvalues, dec.projectors):
        if e > SQRT_SNAP:
            root += np.sqrt(e) * p
    return root


def post_measurement_operators(rho, A: Povm) -> list:
    """Unnormalized Lueders states A_i^{1/2} rho A_i^{1/2}."""
    roots = [sqrt_effect(a) for a in A.effects]
    return [r @ rho @ r for r in roots]


def _tpm_table(rho, A: Povm, B_H: Povm) -> np.ndarray:
    post = post_measurement_operators(rho, A)
    return np.array([[np.trace(m @ b).real for b in B_H.effects] for m in post])


def tpm_prob(rho, A: Povm, B_H: Povm) -> JointDist:
    """p^TPM_{if} = Tr(A_i^{1/2} rho A_i^{1/2} B^H_f)."""
    rho = _match(rho, A, B_H)
    vals = clamp_probabilities(_tpm_table(rho, A, B_H))
    return JointDist(vals, "TPM", _energies(A), _energies(B_H))


def nonselective_state(rho, A: Povm, i: int) -> np.ndarray:
    """State after the binary nonselective measurement {A_i, I - A_i}."""
    a = A.effects[i]
    r = sqrt_effect(a)
    rc = sqrt_effect(np.eye(A.dim) - a)
    return r @ rho @ r + rc @ rho @ rc


def _wtpm_table(rho, A: Povm, B_H: Povm) -> np.ndarray:
    rows = []
    for i in range(len(A)):
        ns = nonselective_state(rho, A, i)
        rows.append([np.trace(ns @ b).real for b in B_H.effects])
    return np.array(rows)


def wtpm_prob(rho, A: Povm, B_H: Povm) -> JointDist:
    """p^wTPM_{if} = Tr(rho_NS,i B^H_f) with the complement I - A_i."""
    rho = _match(rho, A, B_H)
    vals = clamp_probabilities(_wtpm_table(rho, A, B_H))
    return JointDist(vals, "wTPM", _energies(A), _energies(B_H))
