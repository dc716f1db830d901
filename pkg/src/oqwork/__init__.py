"""Operational quasiprobability work statistics.

Builds OQ, Kirkwood-Dirac and Margenau-Hill tables from measurement schemes,
evaluates Jarzynski-type corrections and moment identities, and compares
quasi-work extraction with the bound set by jointly measurable qubit
measurements.
"""

from .dist import JointDist, QuasiDist
from .errors import OQError
from .quasiprob import kdq, mhq_direct, mhq_via_schemes, negativity, oq, oq_via_characteristic
from .schemes import Channel, Povm, epm_prob, heisenberg, tpm_prob, wtpm_prob
from .thermo import Protocol, jarzynski_check, work_moment

__version__ = "0.1.0"

__all__ = [
    "Channel",
    "JointDist",
    "OQError",
    "Povm",
    "Protocol",
    "QuasiDist",
    "epm_prob",
    "heisenberg",
    "jarzynski_check",
    "kdq",
    "mhq_direct",
    "mhq_via_schemes",
    "negativity",
    "oq",
    "oq_via_characteristic",
    "tpm_prob",
    "work_moment",
    "wtpm_prob",
]
