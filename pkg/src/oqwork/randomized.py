"""Random states, measurements and protocols for property checks."""

from __future__ import annotations

import numpy as np
from scipy.stats import unitary_group

from .qmath import PAULIS, dagger, eig_hermitian
from .schemes import Channel, Povm
from .thermo import Protocol


def _ginibre(d: int, rng: np.random.Generator, cols: int | None = None) -> np.ndarray:
    cols = d if cols is None else cols
    return rng.standard_normal((d, cols)) + 1j * rng.standard_normal((d, cols))


def random_state(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    g = _ginibre(d, rng, rank)
    rho = g @ dagger(g)
    return rho / np.trace(rho).real


def random_pure_state(d: int, rng: np.random.Generator) -> np.ndarray:
    return random_state(d, rng, rank=1)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    return unitary_group.rvs(d, random_state=rng)


def random_hermitian(d: int, rng: np.random.Generator, traceless: bool = False) -> np.ndarray:
    """Random Hermitian matrix rescaled to spectral norm 1."""
    g = _ginibre(d, rng)
    h = 0.5 * (g + dagger(g))
    if traceless:
        h = h - np.trace(h).real / d * np.eye(d)
    return h / np.max(np.abs(np.linalg.eigvalsh(h)))


def random_projective_povm(d: int, rng: np.random.Generator) -> Povm:
    return Povm.from_spectral(eig_hermitian(random_hermitian(d, rng)))


def random_unit_vector(rng: np.random.Generator, n: int = 3) -> np.ndarray:
    v = rng.standard_normal(n)
    return v / np.linalg.norm(v)


def random_binary_qubit_povm(rng: np.random.Generator, biased: bool = True) -> Povm:
    """Binary qubit POVM ((1 + x) I + v.sigma)/2 with |v| <= 1 - x."""
    x = rng.uniform(0.0, 1.0) if biased else 0.0
    mu = rng.uniform(0.0, 1.0 - x)
    v = mu * random_unit_vector(rng)
    eye = np.eye(2, dtype=complex)
    a0 = 0.5 * ((1 + x) * eye + sum(c * s for c, s in zip(v, PAULIS)))
    if rng.uniform() < 0.5:
        a0 = eye - a0
    return Povm((a0, eye - a0))


def random_protocol(d: int, rng: np.random.Generator, traceless: bool = False) -> Protocol:
    return Protocol(
        random_hermitian(d, rng, traceless=traceless),
        random_hermitian(d, rng),
        Channel.unitary(random_unitary(d, rng)),
    )


def random_partition(n: int, rng: np.random.Generator) -> list:
    labels = rng.integers(0, n, size=n)
    parts = [list(np.flatnonzero(labels == k)) for k in range(n)]
    return [[int(i) for i in p] for p in parts if p]


def random_eigenbasis_protocol(d: int, rng: np.random.Generator) -> Protocol:
    """Protocol with diagonal Hamiltonians and a Haar-random unitary.

    Any protocol is unitarily equivalent to one of this form, and the exact
    diagonal representation avoids reconstructing tiny Gibbs weights from a
    rotated basis.
    """
    e_i = np.linalg.eigvalsh(random_hermitian(d, rng))
    e_f = np.linalg.eigvalsh(random_hermitian(d, rng))
    return Protocol(np.diag(e_i).astype(complex), np.diag(e_f).astype(complex),
                    Channel.unitary(random_unitary(d, rng)))
