"""Dense linear algebra and state utilities for small (d <= 4) quantum systems.

Operators are plain ``numpy`` complex arrays of shape ``(d, d)``.  Density
states are operators that pass :func:`check_state`.  Units: hbar = k_B = 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import BlochOutOfBall, InvalidState, NonHermitian, OQError

HERM_TOL = 1e-10
STATE_TOL = 1e-10
EIG_GROUP_TOL = 1e-9
ENTROPY_CLAMP = 1e-12

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_X, PAULI_Y, PAULI_Z)


def as_operator(op) -> np.ndarray:
    """Coerce ``op`` to a square complex array, rejecting NaN/Inf."""
    arr = np.asarray(op, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise OQError(f"operator must be a non-empty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise OQError("operator has non-finite entries")
    return arr


def dagger(op: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(op, -1, -2))


def is_hermitian(op, tol: float = HERM_TOL) -> bool:
    op = np.asarray(op)
    return bool(np.max(np.abs(op - dagger(op)), initial=0.0) <= tol)


def require_hermitian(op, tol: float = HERM_TOL) -> np.ndarray:
    op = as_operator(op)
    if not is_hermitian(op, tol):
        dev = np.max(np.abs(op - dagger(op)))
        raise NonHermitian(f"operator is not Hermitian (max deviation {dev:.3e})")
    return op


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def check_state(rho, tol: float = STATE_TOL) -> np.ndarray:
    """Return ``rho`` as an array after checking it is a density operator."""
    rho = as_operator(rho)
    if not is_hermitian(rho, tol):
        raise InvalidState("density operator is not Hermitian")
    if abs(np.trace(rho) - 1.0) > tol:
        raise InvalidState(f"density operator has trace {np.trace(rho).real:.12g}")
    lam = np.linalg.eigvalsh(0.5 * (rho + dagger(rho)))
    if lam[0] < -tol:
        raise InvalidState(f"density operator has negative eigenvalue {lam[0]:.3e}")
    return rho


@dataclass(frozen=True)
class SpectralDecomp:
    """Spectral decomposition grouped by distinct eigenvalue.

    ``eigenvalues`` holds the distinct eigenvalues in ascending order and
    ``projectors[k]`` projects onto the eigenspace of ``eigenvalues[k]``.
    ``vectors`` is a unitary whose columns are phase-fixed eigenvectors in the
    same (ascending) order, repeated eigenvalues adjacent.
    """

    eigenvalues: np.ndarray
    projectors: tuple
    multiplicities: tuple
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def __len__(self) -> int:
        return len(self.projectors)

    def reconstruct(self) -> np.ndarray:
        return sum(e * p for e, p in zip(self.eigenvalues, self.projectors))

    def is_nondegenerate(self) -> bool:
        return len(self.projectors) == self.dim


def _fix_phases(vecs: np.ndarray) -> np.ndarray:
    vecs = vecs.copy()
    for k in range(vecs.shape[1]):
        col = vecs[:, k]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        if nz.size:
            ph = col[nz[0]] / abs(col[nz[0]])
            vecs[:, k] = col / ph
    return vecs


def eig_hermitian(op, group_tol: float = EIG_GROUP_TOL) -> SpectralDecomp:
    """Diagonalize a Hermitian operator.

    Eigenvalues closer than ``group_tol`` share one projector.  The first
    nonzero component of every eigenvector is made real-positive so the
    returned basis is deterministic for nondegenerate spectra.
    """
    op = require_hermitian(op)
    lam, vecs = np.linalg.eigh(0.5 * (op + dagger(op)))
    vecs = _fix_phases(vecs)

    groups: list[list[int]] = []
    for k, val in enumerate(lam):
        if groups and abs(val - lam[groups[-1][0]]) <= group_tol:
            groups[-1].append(k)
        else:
            groups.append([k])

    eigenvalues = np.array([lam[g].mean() for g in groups])
    projectors = tuple(vecs[:, g] @ dagger(vecs[:, g]) for g in groups)
    return SpectralDecomp(
        eigenvalues=eigenvalues,
        projectors=projectors,
        multiplicities=tuple(len(g) for g in groups),
        vectors=vecs,
    )


def spectral_function(op, fn) -> np.ndarray:
    """Apply a scalar function to a Hermitian operator via its eigenbasis."""
    dec = eig_hermitian(op)
    return sum(fn(e) * p for e, p in zip(dec.eigenvalues, dec.projectors))


def expm_hermitian_generator(H, t: float, sign: int = -1) -> np.ndarray:
    """Return ``exp(sign * 1j * t * H)`` for Hermitian ``H``.

    ``sign=-1`` gives the usual propagator ``exp(-i t H)``.
    """
    if sign not in (-1, 1):
        raise OQError("sign must be +1 or -1")
    return spectral_function(H, lambda e: np.exp(sign * 1j * t * e))


def gibbs_state(H, beta: float) -> np.ndarray:
    """Thermal state exp(-beta H) / Z, computed with a ground-energy shift."""
    if beta < 0:
        raise OQError("beta must be nonnegative")
    dec = eig_hermitian(H)
    shifted = dec.eigenvalues - dec.eigenvalues[0]
    weights = np.exp(-beta * shifted) * np.array(dec.multiplicities)
    z = weights.sum()
    return sum((w / m) / z * p for w, m, p in zip(weights, dec.multiplicities, dec.projectors))


def log_partition_function(H, beta: float) -> float:
    """ln Tr exp(-beta H), stable for large beta."""
    dec = eig_hermitian(H)
    e0 = dec.eigenvalues[0]
    z_shift = np.sum(np.array(dec.multiplicities) * np.exp(-beta * (dec.eigenvalues - e0)))
    return float(-beta * e0 + np.log(z_shift))


Basis = Union[SpectralDecomp, Sequence[np.ndarray], np.ndarray, None]


def basis_projectors(basis: Basis, dim: int) -> list:
    """Projectors of a reference basis.

    ``basis`` may be a :class:`SpectralDecomp`, a sequence of projectors, a
    unitary whose columns are the basis vectors, or ``None`` (computational).
    """
    if basis is None:
        return [np.diag(np.eye(dim)[k]).astype(complex) for k in range(dim)]
    if isinstance(basis, SpectralDecomp):
        return list(basis.projectors)
    if isinstance(basis, np.ndarray) and basis.ndim == 2:
        return [np.outer(basis[:, k], basis[:, k].conj()) for k in range(basis.shape[1])]
    return [np.asarray(p, dtype=complex) for p in basis]


def basis_vectors(basis: Basis, dim: int) -> np.ndarray:
    """Unitary whose columns span the reference basis one vector at a time."""
    if basis is None:
        return np.eye(dim, dtype=complex)
    if isinstance(basis, SpectralDecomp):
        return basis.vectors
    if isinstance(basis, np.ndarray) and basis.ndim == 2:
        return basis.astype(complex)
    cols = []
    for p in basis:
        dec = eig_hermitian(p)
        # eigenvalue-1 eigenspace of a projector
        cols.append(dec.vectors[:, dec.vectors.shape[1] - dec.multiplicities[-1]:])
    return np.hstack(cols)


def dephase(rho, basis: Basis = None) -> tuple[np.ndarray, np.ndarray]:
    """Split ``rho`` into block-diagonal and off-diagonal parts for ``basis``."""
    rho = as_operator(rho)
    projs = basis_projectors(basis, rho.shape[0])
    rho_d = sum(p @ rho @ p for p in projs)
    return rho_d, rho - rho_d


def entropy_vn(rho) -> float:
    """Von Neumann entropy in nats; eigenvalues below 1e-12 contribute zero."""
    rho = as_operator(rho)
    lam = np.linalg.eigvalsh(0.5 * (rho + dagger(rho)))
    lam = lam[lam > ENTROPY_CLAMP]
    return float(-np.sum(lam * np.log(lam)))


def coherence_rel_entropy(rho, basis: Basis = None) -> float:
    rho_d, _ = dephase(rho, basis)
    return max(entropy_vn(rho_d) - entropy_vn(rho), 0.0)


def coherence_l1(rho, basis: Basis = None) -> float:
    """Sum of moduli of the off-diagonal entries of ``rho`` in ``basis``."""
    rho = as_operator(rho)
    v = basis_vectors(basis, rho.shape[0])
    r = dagger(v) @ rho @ v
    return float(np.sum(np.abs(r)) - np.sum(np.abs(np.diag(r))))


def bloch_to_state(r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if r.shape != (3,):
        raise OQError("Bloch vector must have three components")
    if np.linalg.norm(r) > 1 + 1e-10:
        raise BlochOutOfBall(f"|r| = {np.linalg.norm(r):.6g} exceeds 1")
    return 0.5 * (np.eye(2, dtype=complex) + sum(rk * s for rk, s in zip(r, PAULIS)))


def state_to_bloch(rho) -> np.ndarray:
    return bloch_components(rho)


def bloch_components(op) -> np.ndarray:
    """Tr(op sigma_k) for k = x, y, z (real part)."""
    op = as_operator(op)
    if op.shape != (2, 2):
        raise OQError("Bloch components need a 2x2 operator")
    return np.array([np.trace(op @ s).real for s in PAULIS])


def trace_norm(op) -> float:
    return float(np.sum(np.linalg.svd(as_operator(op), compute_uv=False)))
