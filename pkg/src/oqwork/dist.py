"""Outcome-pair tables shared by the measurement schemes and quasiprobabilities."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

KINDS = ("OQ", "KDQ", "MHQ", "TPM", "wTPM", "classical")


@dataclass(frozen=True)
class QuasiDist:
    """Table ``values[i, f]`` over first-outcome ``i`` and second-outcome ``f``.

    Values are real except for ``kind == "KDQ"``.  ``energies_i`` and
    ``energies_f`` label the outcomes when the table is a work distribution.
    """

    values: np.ndarray
    kind: str = "classical"
    energies_i: Optional[np.ndarray] = None
    energies_f: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        vals = np.array(self.values, dtype=complex if self.kind == "KDQ" else float)
        if vals.ndim != 2:
            raise ValueError("distribution table must be two-dimensional")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        for name, n in (("energies_i", vals.shape[0]), ("energies_f", vals.shape[1])):
            e = getattr(self, name)
            if e is not None:
                e = np.array(e, dtype=float)
                if e.shape != (n,):
                    raise ValueError(f"{name} must have {n} entries")
                e.setflags(write=False)
                object.__setattr__(self, name, e)

    @property
    def shape(self):
        return self.values.shape

    @property
    def total(self):
        return self.values.sum()

    @property
    def marginal_i(self) -> np.ndarray:
        return self.values.sum(axis=1)

    @property
    def marginal_f(self) -> np.ndarray:
        return self.values.sum(axis=0)

    @property
    def has_energies(self) -> bool:
        return self.energies_i is not None and self.energies_f is not None

    def work_values(self) -> np.ndarray:
        """Matrix of E_f - E_i matching ``values``."""
        return self.energies_f[None, :] - self.energies_i[:, None]

    def with_values(self, values, kind: Optional[str] = None) -> "QuasiDist":
        return QuasiDist(values, kind or self.kind, self.energies_i, self.energies_f)


# the two-point schemes return plain probability tables of the same shape
JointDist = QuasiDist
