"""Fixed-capacity tensor representation of gate-level circuits.

A circuit is a header triple (circuit type, qubit count, gate count) plus a
gate-record array of fixed length ``d`` (the capacity) and a mirrored
parameter vector.  Records at positions >= ``n_gates`` are zero padding
(kind id 0, no control, target 0, parameter 0.0) and carry no meaning.
Several circuits encoded together share one capacity, so a whole set maps
onto three rectangular arrays — the layout the container format stores.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from .errors import (
    EmptyInputError,
    InvalidGateError,
    InvalidQubitIndexError,
    NonFiniteParamError,
    SelfPairError,
    CorruptTensorError,
)

TWO_PI = 2.0 * math.pi


class GateKind(IntEnum):
    """Gate alphabet with stable integer ids (used verbatim on disk)."""

    H = 0
    RX = 1
    RY = 2
    RZ = 3
    CX = 4
    CR1 = 5
    MEASURE = 6


TWO_QUBIT_KINDS = frozenset({GateKind.CX, GateKind.CR1})
PARAM_KINDS = frozenset({GateKind.RX, GateKind.RY, GateKind.RZ, GateKind.CR1})


class CircType(IntEnum):
    """Circuit family tag stored in the header."""

    RANDOM = 0
    QFT = 1
    QCRANK = 2
    IMPORTED = 3


@dataclass(frozen=True)
class GateRecord:
    """One gate: (kind, control, target, param); control is None for 1-qubit kinds."""

    kind: GateKind
    control: int | None
    target: int
    param: float = 0.0

    @classmethod
    def h(cls, target: int) -> "GateRecord":
        return cls(GateKind.H, None, target)

    @classmethod
    def rx(cls, target: int, theta: float) -> "GateRecord":
        return cls(GateKind.RX, None, target, theta)

    @classmethod
    def ry(cls, target: int, theta: float) -> "GateRecord":
        return cls(GateKind.RY, None, target, theta)

    @classmethod
    def rz(cls, target: int, theta: float) -> "GateRecord":
        return cls(GateKind.RZ, None, target, theta)

    @classmethod
    def cx(cls, control: int, target: int) -> "GateRecord":
        return cls(GateKind.CX, control, target)

    @classmethod
    def cr1(cls, control: int, target: int, lam: float) -> "GateRecord":
        return cls(GateKind.CR1, control, target, lam)

    @classmethod
    def measure(cls, target: int) -> "GateRecord":
        return cls(GateKind.MEASURE, None, target)


PAD_RECORD = GateRecord(GateKind.H, None, 0, 0.0)


@dataclass(frozen=True)
class CircuitHeader:
    circ_type: CircType
    n_qubits: int
    n_gates: int


@dataclass
class CircuitTensor:
    """One circuit padded to capacity ``d``: header + d gate records + d params."""

    header: CircuitHeader
    gates: tuple[GateRecord, ...]
    params: np.ndarray  # float64, shape (d,), mirrors gates[i].param

    @property
    def capacity(self) -> int:
        return len(self.gates)

    @property
    def n_qubits(self) -> int:
        return self.header.n_qubits

    @property
    def n_gates(self) -> int:
        return self.header.n_gates

    @property
    def active_gates(self) -> tuple[GateRecord, ...]:
        """The real gates, padding stripped."""
        return self.gates[: self.header.n_gates]

    @classmethod
    def from_gates(
        cls,
        circ_type: CircType,
        n_qubits: int,
        gates: list[GateRecord] | tuple[GateRecord, ...],
        capacity: int | None = None,
    ) -> "CircuitTensor":
        """Build a tensor from a plain gate list, padding up to ``capacity``."""
        n_gates = len(gates)
        d = n_gates if capacity is None else capacity
        if d < n_gates:
            raise ValueError(f"capacity {d} < gate count {n_gates}")
        padded = tuple(gates) + (PAD_RECORD,) * (d - n_gates)
        params = np.array([g.param for g in padded], dtype=np.float64)
        return cls(CircuitHeader(circ_type, n_qubits, n_gates), padded, params)

    def repadded(self, capacity: int) -> "CircuitTensor":
        """Same circuit with a new (not smaller) capacity."""
        return CircuitTensor.from_gates(
            self.header.circ_type, self.n_qubits, list(self.active_gates), capacity
        )

    def count_kind(self, kind: GateKind) -> int:
        return sum(1 for g in self.active_gates if g.kind == kind)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CircuitTensor):
            return NotImplemented
        return (
            self.header == other.header
            and self.gates == other.gates
            and np.array_equal(self.params, other.params)
        )


@dataclass
class CircuitSet:
    """Circuits sharing one capacity, plus free-form string metadata."""

    capacity: int
    circuits: tuple[CircuitTensor, ...]
    metadata: dict[str, str] = field(default_factory=dict)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CircuitSet):
            return NotImplemented
        return (
            self.capacity == other.capacity
            and self.circuits == other.circuits
            and self.metadata == other.metadata
        )


def canonical_param(kind: GateKind, param: float) -> float:
    """CR1 angles are stored reduced to [0, 2*pi); other params pass through."""
    if kind == GateKind.CR1:
        return float(param) % TWO_PI
    return float(param)


def _check_record(g: GateRecord, n_qubits: int) -> str | None:
    """Return a violation code for a live record, or None if it is valid."""
    if not isinstance(g.kind, GateKind):
        return "KindIdOutOfRange"
    if not (0 <= g.target < n_qubits):
        return "InvalidQubitIndex"
    if g.kind in TWO_QUBIT_KINDS:
        if g.control is None:
            return "MissingControl"
        if not (0 <= g.control < n_qubits):
            return "InvalidQubitIndex"
        if g.control == g.target:
            return "SelfPair"
    elif g.control is not None:
        return "UnexpectedControl"
    if not math.isfinite(g.param):
        return "NonFiniteParam"
    if g.kind not in PARAM_KINDS and g.param != 0.0:
        return "UnexpectedParam"
    return None


_RAISE_BY_CODE = {
    "InvalidQubitIndex": InvalidQubitIndexError,
    "SelfPair": SelfPairError,
    "NonFiniteParam": NonFiniteParamError,
}


def encode_circuits(
    gate_lists: list[tuple[CircType | int, int, list[GateRecord]]],
    metadata: dict[str, str] | None = None,
) -> CircuitSet:
    """Encode plain gate lists into a CircuitSet with shared capacity.

    Capacity is the maximum gate count over the inputs; shorter circuits get
    zero padding.  CR1 parameters are canonicalized to [0, 2*pi).  Input
    order is preserved.
    """
    if not gate_lists:
        raise EmptyInputError("no circuits to encode")
    checked: list[tuple[CircType, int, list[GateRecord]]] = []
    for i, (circ_type, n_qubits, gates) in enumerate(gate_lists):
        if n_qubits < 1:
            raise InvalidGateError(f"circuit {i}: n_qubits must be >= 1, got {n_qubits}")
        clean: list[GateRecord] = []
        for pos, g in enumerate(gates):
            code = _check_record(g, n_qubits)
            if code is not None:
                exc = _RAISE_BY_CODE.get(code, InvalidGateError)
                raise exc(f"circuit {i}, gate {pos}: {code}")
            if g.kind == GateKind.CR1:
                g = GateRecord(g.kind, g.control, g.target, canonical_param(g.kind, g.param))
            clean.append(g)
        checked.append((CircType(circ_type), n_qubits, clean))

    d = max(len(gates) for _, _, gates in checked)
    circuits = tuple(
        CircuitTensor.from_gates(ct, nq, gates, capacity=d) for ct, nq, gates in checked
    )
    meta = dict(metadata or {})
    meta.setdefault("capacity", str(d))
    meta.setdefault("n_circ", str(len(circuits)))
    return CircuitSet(capacity=d, circuits=circuits, metadata=meta)


def decode_circuits(circuit_set: CircuitSet) -> list[tuple[CircType, int, list[GateRecord]]]:
    """Strip padding and return the original (circ_type, n_qubits, gates) triples.

    Raises CorruptTensorError when a tensor carries a bad kind id or
    non-padding data beyond its gate count.
    """
    out = []
    for i, circ in enumerate(circuit_set.circuits):
        n_gates = circ.header.n_gates
        if n_gates > circ.capacity:
            raise CorruptTensorError(
                f"circuit {i}: n_gates {n_gates} exceeds capacity {circ.capacity}"
            )
        for pos, g in enumerate(circ.gates):
            if not isinstance(g.kind, GateKind):
                raise CorruptTensorError(f"circuit {i}, gate {pos}: kind id out of range")
            if pos >= n_gates and g != PAD_RECORD:
                raise CorruptTensorError(f"circuit {i}, gate {pos}: non-zero padding record")
        out.append((circ.header.circ_type, circ.header.n_qubits, list(circ.active_gates)))
    return out


NO_CONTROL = -1  # on-disk encoding of control=None


def set_to_arrays(circuit_set: CircuitSet) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Flatten a CircuitSet into the three container arrays.

    Returns (circ_type, gate_type, gate_param):
      circ_type  int32 (n_circ, 3)    rows (circ_type, n_qubits, n_gates)
      gate_type  int32 (n_circ, d, 3) rows (kind_id, control_or_minus1, target)
      gate_param float64 (n_circ, d)
    """
    n_circ = len(circuit_set.circuits)
    d = circuit_set.capacity
    headers = np.zeros((n_circ, 3), dtype=np.int32)
    gate_type = np.zeros((n_circ, d, 3), dtype=np.int32)
    gate_param = np.zeros((n_circ, d), dtype=np.float64)
    for i, circ in enumerate(circuit_set.circuits):
        headers[i] = (int(circ.header.circ_type), circ.header.n_qubits, circ.header.n_gates)
        for pos, g in enumerate(circ.gates):
            gate_type[i, pos] = (
                int(g.kind),
                NO_CONTROL if g.control is None else g.control,
                g.target,
            )
        gate_param[i] = circ.params
    return headers, gate_type, gate_param


def set_from_arrays(
    headers: np.ndarray,
    gate_type: np.ndarray,
    gate_param: np.ndarray,
    metadata: dict[str, str] | None = None,
) -> CircuitSet:
    """Rebuild a CircuitSet from container arrays (inverse of set_to_arrays).

    Raises CorruptTensorError for kind ids outside the alphabet or
    mismatched array shapes.
    """
    headers = np.asarray(headers)
    gate_type = np.asarray(gate_type)
    gate_param = np.asarray(gate_param)
    if headers.ndim != 2 or headers.shape[1] != 3 or gate_type.ndim != 3 or gate_type.shape[2] != 3:
        raise CorruptTensorError(f"bad array shapes {headers.shape}, {gate_type.shape}")
    n_circ = headers.shape[0]
    d = gate_type.shape[1]
    if gate_type.shape[0] != n_circ or gate_param.shape != (n_circ, d):
        raise CorruptTensorError("array shapes disagree on circuit count or capacity")
    circuits = []
    for i in range(n_circ):
        ct_raw, n_qubits, n_gates = (int(v) for v in headers[i])
        try:
            circ_type = CircType(ct_raw)
        except ValueError as exc:
            raise CorruptTensorError(f"circuit {i}: unknown circ_type {ct_raw}") from exc
        records = []
        for pos in range(d):
            kind_id, control, target = (int(v) for v in gate_type[i, pos])
            try:
                kind = GateKind(kind_id)
            except ValueError as exc:
                raise CorruptTensorError(
                    f"circuit {i}, gate {pos}: kind id {kind_id} out of range"
                ) from exc
            records.append(
                GateRecord(
                    kind,
                    None if control == NO_CONTROL else control,
                    target,
                    float(gate_param[i, pos]),
                )
            )
        header = CircuitHeader(circ_type, n_qubits, n_gates)
        circuits.append(
            CircuitTensor(header, tuple(records), np.array(gate_param[i], dtype=np.float64))
        )
    return CircuitSet(capacity=d, circuits=tuple(circuits), metadata=dict(metadata or {}))


@dataclass(frozen=True)
class Violation:
    """One invariant failure inside a CircuitSet."""

    code: str
    circuit: int
    gate: int | None
    message: str


@dataclass
class ValidationReport:
    violations: list[Violation]

    @property
    def ok(self) -> bool:
        return not self.violations


def validate(circuit_set: CircuitSet) -> ValidationReport:
    """List every invariant violation; an empty report means the set is valid."""
    violations: list[Violation] = []

    def add(code: str, circuit: int, gate: int | None, message: str) -> None:
        violations.append(Violation(code, circuit, gate, message))

    for i, circ in enumerate(circuit_set.circuits):
        hdr = circ.header
        if circ.capacity != circuit_set.capacity:
            add("CapacityMismatch", i, None,
                f"tensor capacity {circ.capacity} != set capacity {circuit_set.capacity}")
        if hdr.n_qubits < 1:
            add("BadHeader", i, None, f"n_qubits {hdr.n_qubits} < 1")
        if hdr.n_gates < 0:
            add("BadHeader", i, None, f"n_gates {hdr.n_gates} < 0")
        if hdr.n_gates > circ.capacity:
            add("CapacityExceeded", i, None,
                f"n_gates {hdr.n_gates} > capacity {circ.capacity}")
        n_live = min(hdr.n_gates, circ.capacity)
        for pos, g in enumerate(circ.gates):
            if pos < n_live:
                code = _check_record(g, hdr.n_qubits)
                if code is not None:
                    add(code, i, pos, f"{code} for {g}")
            elif g != PAD_RECORD:
                add("PaddingViolation", i, pos, f"non-zero record in padding: {g}")
            if circ.params[pos] != g.param:
                add("ParamMirrorMismatch", i, pos,
                    f"params[{pos}]={circ.params[pos]} != record param {g.param}")
    return ValidationReport(violations)
