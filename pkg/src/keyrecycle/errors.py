"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Operands disagree on qubit count or register size."""


class NonSymplecticError(ValueError):
    """A matrix fails the symplectic check.

    ``key`` is the key index within a code family when known.
    """

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


class CapExceededError(ValueError):
    """An exhaustive operation would exceed the configured enumeration cap."""


class PTCFormatError(ValueError):
    """Malformed code-family file."""


class PortError(RuntimeError):
    """Illegal use of a port in a simulated system (reuse, unavailable, bad wiring)."""


class IllegalWiring(PortError):
    """A port is connected twice, left dangling, or used twice in one run."""


class PortUnavailable(PortError):
    """A strategy touched a port or register it does not hold."""


class SignatureMismatch(ValueError):
    """Two systems compared by a distinguisher expose different ports."""
