"""Exception types shared across the package."""

from __future__ import annotations


class QgearError(Exception):
    """Base class for all package-specific errors."""


# --- circuit IR ---

class EmptyInputError(QgearError):
    """An operation received an empty collection where at least one item is required."""


class InvalidQubitIndexError(QgearError):
    """A control or target index falls outside the owning circuit's register."""


class SelfPairError(QgearError):
    """A two-qubit gate names the same qubit as control and target."""


class NonFiniteParamError(QgearError):
    """A gate parameter is NaN or infinite."""


class InvalidGateError(QgearError):
    """A gate record violates the kind's control/parameter shape."""


class CorruptTensorError(QgearError):
    """A circuit tensor has a bad kind id or non-padding data beyond its gate count."""


class CapacityExceededError(QgearError):
    """A circuit's gate count exceeds the capacity of its tensor."""


# --- container files ---

class ContainerFormatError(QgearError):
    """A container file is malformed or has an unrecognized format."""


# --- state-vector simulation ---

class TooManyQubitsError(QgearError):
    """Allocating the state vector would exceed the memory budget."""

    def __init__(self, n_qubits: int, required_bytes: int, budget_bytes: int):
        self.n_qubits = n_qubits
        self.required_bytes = required_bytes
        self.budget_bytes = budget_bytes
        super().__init__(
            f"{n_qubits} qubits need {required_bytes} bytes of amplitudes, "
            f"budget is {budget_bytes} bytes"
        )


class IndexOutOfRangeError(QgearError):
    """A qubit index is outside the simulated register."""


class MeasureMidCircuitError(QgearError):
    """A MEASURE record appears before a non-measure gate."""


class UnnormalizedStateError(QgearError):
    """The state norm deviates beyond the precision tolerance."""


# --- partitioned execution ---

class BadWorkerCountError(QgearError):
    """Worker count must be a power of two between 1 and 2^n."""


class ProtocolViolationError(QgearError):
    """An exchange message was consumed out of sequence (implementation bug)."""


class SequenceMismatchError(QgearError):
    """Workers reached gather with different sequence numbers."""


# --- generators ---

class TooFewQubitsError(QgearError):
    """Random blocks need at least two qubits for a distinct control/target."""


# --- QCrank ---

class PlanTooSmallError(QgearError):
    """The address/data split cannot hold every pixel."""


class LengthMismatchError(QgearError):
    """A probability vector does not match the plan's register size."""


# --- benchmarking ---

class EmptySpecError(QgearError):
    """A benchmark spec has an empty grid."""


class InsufficientDataError(QgearError):
    """Too few distinct qubit counts to fit a scaling slope."""
