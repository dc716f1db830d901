"""Qubit rotating-field and three-level NV-center work-extraction scenarios.

Energies are in units of the Rabi frequency for the qubit and rad/us for the NV
model (times in us).  hbar = 1.
"""

from __future__ import annotations

import dataclasses
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import repeat
from typing import Optional

import numpy as np

from .errors import ConfigInvalid, ConfigParseError
from .jointmeas import (
    bound_landscape,
    busch_criterion,
    effect_bloch,
    energy_gap,
    optimize_bound_over_sharpness,
    smear,
)
from .qmath import (
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    check_state,
    dagger,
    eig_hermitian,
    expm_hermitian_generator,
    is_hermitian,
)
from .quasiprob import mhq_via_schemes, mhq_direct, negativity, oq
from .schemes import Channel, epm_prob, tpm_prob, wtpm_prob
from .thermo import Protocol, work_moment

ROW_TOL = 1e-10

# -- configuration ----------------------------------------------------------


def _grid(start: float, stop: float, num: int) -> tuple:
    return tuple(float(t) for t in np.linspace(start, stop, num))


def _from_dict(cls, data: dict):
    if not isinstance(data, dict):
        raise ConfigInvalid(f"{cls.__name__} config must be a JSON object")
    names = {f.name for f in dataclasses.fields(cls) if f.init}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigInvalid(f"unknown {cls.__name__} fields: {', '.join(unknown)}")
    try:
        return cls(**data)
    except TypeError as exc:
        raise ConfigInvalid(str(exc)) from exc


@dataclass(frozen=True)
class QubitScenarioConfig:
    """Rotating-field qubit with a coherent initial state.

    The state matrix ``[[p, c], [c, 1 - p]]`` is written in the eigenbasis of
    ``H(0)`` (ground level first, real eigenvectors).  ``transport`` selects
    how the late energy measurement is carried back to t = 0: ``"reverse"``
    uses U Pi(t) U^dagger, ``"forward"`` the Schroedinger-consistent
    U^dagger Pi(t) U.
    """

    Omega: float = 1.0
    delta: float = math.sqrt(2.0) + 1.0
    p: float = 0.5
    c: float = 0.5
    mu: float = 1.0
    t_grid: tuple = field(default_factory=lambda: _grid(0.0, 2 * math.pi, 400))
    beta: Optional[float] = None
    transport: str = "reverse"

    def __post_init__(self):
        try:
            object.__setattr__(self, "t_grid", tuple(float(t) for t in self.t_grid))
            for name in ("Omega", "delta", "p", "c", "mu"):
                object.__setattr__(self, name, float(getattr(self, name)))
            if self.beta is not None:
                object.__setattr__(self, "beta", float(self.beta))
        except (TypeError, ValueError) as exc:
            raise ConfigInvalid(f"non-numeric qubit config value: {exc}") from exc
        if not 0.0 <= self.p <= 1.0:
            raise ConfigInvalid("p must lie in [0, 1]")
        if self.c ** 2 > self.p * (1 - self.p) + 1e-12:
            raise ConfigInvalid("state is not positive: need c^2 <= p (1 - p)")
        if not 0.0 <= self.mu <= 1.0:
            raise ConfigInvalid("mu must lie in [0, 1]")
        if self.Omega == 0 and self.delta == 0:
            raise ConfigInvalid("Omega and delta cannot both vanish")
        if self.beta is not None and self.beta < 0:
            raise ConfigInvalid("beta must be nonnegative")
        if self.transport not in ("reverse", "forward"):
            raise ConfigInvalid("transport must be 'reverse' or 'forward'")
        if not self.t_grid:
            raise ConfigInvalid("t_grid is empty")

    @classmethod
    def from_dict(cls, data: dict) -> "QubitScenarioConfig":
        return _from_dict(cls, data)

    @property
    def gap(self) -> float:
        return math.hypot(self.delta, self.Omega)


DEFAULT_NV_P = (0.7654, 0.0009, 0.2338)
DEFAULT_NV_A = (0.0073, 0.2787, 0.0002)
NV_OMEGA = 4.4 * math.pi


@dataclass(frozen=True)
class NvScenarioConfig:
    """Bichromatically driven NV spin triplet.

    Basis order is (|+1>, |0>, |-1>).  ``phi1``/``phi2`` default to
    1.09 * Omega1.  Populations within 1e-3 of unit sum are renormalized and
    ``renormalized`` records it.
    """

    Omega1: float = NV_OMEGA
    Omega2: float = NV_OMEGA
    phi1: Optional[float] = None
    phi2: Optional[float] = None
    p_amplitudes: tuple = DEFAULT_NV_P
    a_phases: tuple = DEFAULT_NV_A
    t_grid: tuple = field(default_factory=lambda: _grid(0.0, 0.5, 400))
    renormalized: bool = field(default=False, init=False)

    def __post_init__(self):
        try:
            for name in ("Omega1", "Omega2"):
                object.__setattr__(self, name, float(getattr(self, name)))
            for name in ("phi1", "phi2"):
                val = getattr(self, name)
                object.__setattr__(self, name, 1.09 * self.Omega1 if val is None else float(val))
            p = np.array(self.p_amplitudes, dtype=float)
            a = np.array(self.a_phases, dtype=float)
            object.__setattr__(self, "t_grid", tuple(float(t) for t in self.t_grid))
        except (TypeError, ValueError) as exc:
            raise ConfigInvalid(f"non-numeric NV config value: {exc}") from exc
        if p.shape != (3,) or a.shape != (3,):
            raise ConfigInvalid("p_amplitudes and a_phases need three entries")
        if np.any(p < 0):
            raise ConfigInvalid("populations must be nonnegative")
        if abs(p.sum() - 1.0) > 1e-3:
            raise ConfigInvalid(f"populations sum to {p.sum():.6g}, not 1")
        if abs(p.sum() - 1.0) > 1e-12:
            object.__setattr__(self, "renormalized", True)
            p = p / p.sum()
        if np.any(a < 0) or np.any(a >= 1):
            raise ConfigInvalid("phases must lie in [0, 1)")
        if not self.t_grid:
            raise ConfigInvalid("t_grid is empty")
        object.__setattr__(self, "p_amplitudes", tuple(float(x) for x in p))
        object.__setattr__(self, "a_phases", tuple(float(x) for x in a))

    @classmethod
    def from_dict(cls, data: dict) -> "NvScenarioConfig":
        return _from_dict(cls, data)


def load_config(path, kind: str):
    """Read a JSON config file for ``kind`` in {"qubit", "nv"}."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"{path}: {exc}") from exc
    cls = {"qubit": QubitScenarioConfig, "nv": NvScenarioConfig}[kind]
    return cls.from_dict(data)


def with_grid(cfg, num: int):
    """Same config on ``num`` evenly spaced times spanning its current grid."""
    if num < 1:
        raise ConfigInvalid("grid size must be positive")
    out = dataclasses.replace(cfg, t_grid=_grid(cfg.t_grid[0], cfg.t_grid[-1], num))
    if getattr(cfg, "renormalized", False):
        # the replaced populations already sum to one; keep the provenance flag
        object.__setattr__(out, "renormalized", True)
    return out


def config_metadata(cfg) -> dict:
    return {k: v for k, v in dataclasses.asdict(cfg).items() if k != "t_grid"}


# -- qubit --------------------------------------------------------------------


def qubit_hamiltonian(cfg: QubitScenarioConfig, t: float) -> np.ndarray:
    field_x = cfg.Omega * (math.cos(cfg.delta * t) * PAULI_X + math.sin(cfg.delta * t) * PAULI_Y)
    return 0.5 * (field_x + cfg.delta * PAULI_Z)


def qubit_unitary(cfg: QubitScenarioConfig, t: float) -> np.ndarray:
    """exp(-i delta sigma_z t/2) exp(-i Omega sigma_x t/2)."""
    frame = expm_hermitian_generator(0.5 * cfg.delta * PAULI_Z, t)
    drive = expm_hermitian_generator(0.5 * cfg.Omega * PAULI_X, t)
    return frame @ drive


def qubit_state(cfg: QubitScenarioConfig) -> np.ndarray:
    v = eig_hermitian(qubit_hamiltonian(cfg, 0.0)).vectors
    rho_eig = np.array([[cfg.p, cfg.c], [cfg.c, 1 - cfg.p]], dtype=complex)
    return check_state(v @ rho_eig @ dagger(v))


def qubit_protocol(cfg: QubitScenarioConfig, t: float) -> Protocol:
    U = qubit_unitary(cfg, t)
    ch = Channel.unitary(U if cfg.transport == "forward" else dagger(U))
    return Protocol(qubit_hamiltonian(cfg, 0.0), qubit_hamiltonian(cfg, t), ch)


@dataclass(frozen=True)
class QubitSweepRow:
    t: float
    q: np.ndarray
    neg_oq: float
    w_q: float
    w_cl: float
    w_tpm: float
    mu_star: float
    busch_margin: float
    nonclassical: bool
    epm: np.ndarray
    tpm_marginal_f: np.ndarray


def _check_row(q, p_a, p_b, what: str):
    if abs(q.sum() - 1) > ROW_TOL:
        raise ArithmeticError(f"{what} table not normalized")
    if np.max(np.abs(q.sum(axis=1) - p_a)) > ROW_TOL or np.max(np.abs(q.sum(axis=0) - p_b)) > ROW_TOL:
        raise ArithmeticError(f"{what} table fails marginality")


def qubit_row(cfg: QubitScenarioConfig, t: float, rho=None) -> QubitSweepRow:
    rho = qubit_state(cfg) if rho is None else rho
    prot = qubit_protocol(cfg, t)
    A = smear(prot.A, cfg.mu)
    B_H = smear(prot.B_H, cfg.mu)
    q = oq(rho, A, B_H)
    epm = epm_prob(rho, B_H)
    _check_row(q.values, epm_prob(rho, A), epm, "OQ")
    tpm = tpm_prob(rho, A, B_H)
    dir_i, dir_f = effect_bloch(prot.A), effect_bloch(prot.B_H)
    mu_star, w_cl = optimize_bound_over_sharpness(dir_i, dir_f, energy_gap(prot))
    _, margin = busch_criterion(cfg.mu * dir_i, cfg.mu * dir_f)
    w_q = -work_moment(q, 1)
    return QubitSweepRow(
        t=t, q=q.values, neg_oq=negativity(q), w_q=w_q, w_cl=w_cl,
        w_tpm=-work_moment(tpm, 1), mu_star=mu_star, busch_margin=margin,
        nonclassical=bool(w_q > w_cl + 1e-10), epm=epm, tpm_marginal_f=tpm.marginal_f,
    )


def _map_rows(fn, cfg, rho, workers: Optional[int]) -> list:
    # rows are independent; executor.map keeps grid order
    if not workers or workers <= 1:
        return [fn(cfg, t, rho) for t in cfg.t_grid]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, repeat(cfg), cfg.t_grid, repeat(rho), chunksize=16))


def run_qubit_sweep(cfg: QubitScenarioConfig, workers: Optional[int] = None) -> list:
    return _map_rows(qubit_row, cfg, qubit_state(cfg), workers)


def qubit_bound_landscape(cfg: QubitScenarioConfig, mus) -> np.ndarray:
    """Classical bound over (t, mu); NaN where mu leaves the JM region."""
    out = []
    for t in cfg.t_grid:
        prot = qubit_protocol(cfg, t)
        out.append(bound_landscape(effect_bloch(prot.A), effect_bloch(prot.B_H), energy_gap(prot), mus))
    return np.array(out)


# -- NV center ---------------------------------------------------------------

_S = 1.0 / math.sqrt(2.0)
S_X1 = _S * np.array([[0, 1, 0], [1, 0, 0], [0, 0, 0]], dtype=complex)
S_Y1 = _S * np.array([[0, -1j, 0], [1j, 0, 0], [0, 0, 0]], dtype=complex)
S_X2 = _S * np.array([[0, 0, 0], [0, 0, 1], [0, 1, 0]], dtype=complex)
S_Y2 = _S * np.array([[0, 0, 0], [0, 0, -1j], [0, 1j, 0]], dtype=complex)
S_Z1 = np.diag([1, 0, 0]).astype(complex)
S_Z2 = np.diag([0, 0, -1]).astype(complex)


def nv_hamiltonian(cfg: NvScenarioConfig, t: float) -> np.ndarray:
    c1, s1 = math.cos(cfg.phi1 * t), math.sin(cfg.phi1 * t)
    c2, s2 = math.cos(cfg.phi2 * t), math.sin(cfg.phi2 * t)
    return cfg.Omega1 * (S_X1 * c1 + S_Y1 * s1) + cfg.Omega2 * (S_X2 * c2 - S_Y2 * s2)


def nv_effective_hamiltonian(cfg: NvScenarioConfig) -> np.ndarray:
    return cfg.Omega1 * S_X1 - cfg.phi1 * S_Z1 + cfg.Omega2 * S_X2 + cfg.phi2 * S_Z2


def nv_unitary(cfg: NvScenarioConfig, t: float) -> np.ndarray:
    """exp(-i t phi1 S_z1) exp(i t phi2 S_z2) exp(-i t H_eff)."""
    return (expm_hermitian_generator(cfg.phi1 * S_Z1, t)
            @ expm_hermitian_generator(cfg.phi2 * S_Z2, t, sign=1)
            @ expm_hermitian_generator(nv_effective_hamiltonian(cfg), t))


def nv_state(cfg: NvScenarioConfig) -> np.ndarray:
    psi = np.sqrt(cfg.p_amplitudes) * np.exp(2j * np.pi * np.array(cfg.a_phases))
    return np.outer(psi, psi.conj())


@dataclass(frozen=True)
class NvSweepRow:
    t: float
    oq: np.ndarray
    mhq: np.ndarray
    neg_oq: float
    neg_mhq: float
    w_oq: float
    w_mhq: float
    epm: np.ndarray
    tpm_marginal_f: np.ndarray
    wtpm: np.ndarray
    dark_epm: float
    energies_f: np.ndarray


def nv_row(cfg: NvScenarioConfig, t: float, rho=None) -> NvSweepRow:
    rho = nv_state(cfg) if rho is None else rho
    H0, Ht, U = nv_hamiltonian(cfg, 0.0), nv_hamiltonian(cfg, t), nv_unitary(cfg, t)
    if not (is_hermitian(H0) and is_hermitian(Ht)):
        raise ArithmeticError(f"NV Hamiltonian not Hermitian at t={t}")
    if np.max(np.abs(U @ dagger(U) - np.eye(3))) > 1e-10:
        raise ArithmeticError(f"NV propagator not unitary at t={t}")
    prot = Protocol(H0, Ht, Channel.unitary(U))
    A, B_H = prot.A, prot.B_H
    q = oq(rho, A, B_H)
    m = mhq_via_schemes(rho, A, B_H)
    if np.max(np.abs(m.values - mhq_direct(rho, A, B_H).values)) > ROW_TOL:
        raise ArithmeticError("MHQ reconstruction disagrees with Re KDQ")
    epm = epm_prob(rho, B_H)
    p_a = epm_prob(rho, A)
    _check_row(q.values, p_a, epm, "OQ")
    _check_row(m.values, p_a, epm, "MHQ")
    e_f = np.asarray(B_H.energies)
    return NvSweepRow(
        t=t, oq=q.values, mhq=m.values, neg_oq=negativity(q), neg_mhq=negativity(m),
        w_oq=work_moment(q, 1), w_mhq=work_moment(m, 1), epm=epm,
        tpm_marginal_f=tpm_prob(rho, A, B_H).marginal_f,
        wtpm=wtpm_prob(rho, A, B_H).values,
        dark_epm=float(epm[int(np.argmin(np.abs(e_f)))]), energies_f=e_f,
    )


def run_nv_sweep(cfg: NvScenarioConfig, workers: Optional[int] = None) -> list:
    return _map_rows(nv_row, cfg, check_state(nv_state(cfg)), workers)
