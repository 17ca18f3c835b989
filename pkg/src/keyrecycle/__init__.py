"""Quantum authentication with key recycling: codes, protocols, simulators and attacks."""

from .errors import (
    CapExceededError,
    DimensionError,
    IllegalWiring,
    NonSymplecticError,
    PortError,
    PortUnavailable,
    PTCFormatError,
    SignatureMismatch,
)
from .pauli import Dimensions, PauliIndex, random_symplectic, symplectic_check
from .protocol import ETC, ETE, KeyMaterial, decrypt, encrypt
from .ptc import (
    CodeFamily,
    EpsilonReport,
    ErrorClass,
    chau_family,
    classify,
    epsilon_report,
    load_family,
    random_clifford_family,
    save_family,
)

__version__ = "0.1.0"
