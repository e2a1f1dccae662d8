"""Exception types shared across the package."""


class NativeIsingError(Exception):
    """Base class for all package errors."""


class DimensionError(NativeIsingError, ValueError):
    """A state or problem has the wrong number of qubits."""


class CapacityError(NativeIsingError, ValueError):
    """A problem is too large for exhaustive enumeration or dense simulation."""


class DegenerateSpectrumError(NativeIsingError, ValueError):
    """The spectrum has a single energy level, so no gap is defined."""


class InfeasibleEncodingError(NativeIsingError):
    """No ancilla-free 2-local Ising encoding exists for a truth table.

    Attributes
    ----------
    certificate : dict or None
        Farkas multipliers keyed by constraint name when the search was an
        exact LP; ``None`` for grid search.
    report : str
        Human-readable diagnosis.
    """

    def __init__(self, report, certificate=None):
        super().__init__(report)
        self.report = report
        self.certificate = certificate
