"""Single-worker state-vector simulator.

Conventions (shared by every module):

* qubit k occupies bit k of the basis index, so a gate on qubit k pairs
  amplitudes 2**k apart;
* display bitstrings list qubit 0 leftmost, i.e. the string for index i is
  bit 0, bit 1, ... bit n-1 of i.

Gates update the amplitude array in place through strided views; the dense
tensor-product construction exists only as a test oracle.  Rotations use
the half-angle convention.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .errors import (
    IndexOutOfRangeError,
    MeasureMidCircuitError,
    SelfPairError,
    TooManyQubitsError,
    UnnormalizedStateError,
)
from .ir import CircuitTensor, GateKind, GateRecord

DEFAULT_MEMORY_BUDGET = 16 * 2**30  # bytes of amplitude storage

_DTYPES = {"fp32": np.complex64, "fp64": np.complex128}
_COMPLEX_WIDTH = {"fp32": 8, "fp64": 16}
# Norm drift allowance: loose enough for 10k-gate fp32 runs, tight enough
# to catch real bugs.
NORM_TOL = {"fp32": 1e-3, "fp64": 1e-9}


@dataclass
class StateVector:
    n_qubits: int
    precision: str
    amplitudes: np.ndarray

    def norm_sq(self) -> float:
        """Squared norm, accumulated in float64 regardless of precision."""
        amps = self.amplitudes
        return float(np.sum((amps.real.astype(np.float64)) ** 2 + (amps.imag.astype(np.float64)) ** 2))

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.precision, self.amplitudes.copy())


@dataclass
class SimOptions:
    precision: str = "fp64"
    shots: int = 0  # 0 = exact mode, no sampling
    rng_seed: int = 0
    memory_budget: int = DEFAULT_MEMORY_BUDGET


@dataclass
class CountsTable:
    counts: dict[str, int]
    total: int
    n_qubits: int


def bitstring(index: int, n_qubits: int) -> str:
    """Display string for a basis index: qubit 0 leftmost."""
    return "".join("1" if (index >> k) & 1 else "0" for k in range(n_qubits))


def index_of_bitstring(bits: str) -> int:
    """Inverse of bitstring()."""
    return int(bits[::-1], 2) if bits else 0


def init_zero_state(
    n_qubits: int, precision: str = "fp64", memory_budget: int = DEFAULT_MEMORY_BUDGET
) -> StateVector:
    """|0...0> at the requested precision; refuses states over the byte budget."""
    if n_qubits < 1:
        raise ValueError(f"n_qubits must be >= 1, got {n_qubits}")
    if precision not in _DTYPES:
        raise ValueError(f"precision must be fp32 or fp64, got {precision!r}")
    required = _COMPLEX_WIDTH[precision] * (1 << n_qubits)
    if required > memory_budget:
        raise TooManyQubitsError(n_qubits, required, memory_budget)
    amps = np.zeros(1 << n_qubits, dtype=_DTYPES[precision])
    amps[0] = 1.0
    return StateVector(n_qubits, precision, amps)


def gate_matrix_2x2(kind: GateKind, param: float = 0.0) -> np.ndarray:
    """2x2 unitary for a single-qubit kind (half-angle convention)."""
    if kind == GateKind.H:
        s = 1.0 / math.sqrt(2.0)
        return np.array([[s, s], [s, -s]], dtype=np.complex128)
    half = param / 2.0
    c, s = math.cos(half), math.sin(half)
    if kind == GateKind.RX:
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)
    if kind == GateKind.RY:
        return np.array([[c, -s], [s, c]], dtype=np.complex128)
    if kind == GateKind.RZ:
        return np.array([[np.exp(-1j * half), 0.0], [0.0, np.exp(1j * half)]], dtype=np.complex128)
    raise ValueError(f"{kind.name} has no 2x2 matrix")


# --- array-level kernels (shared with the partitioned executor) ---

def apply_matrix_array(amps: np.ndarray, target: int, u: np.ndarray) -> None:
    """Multiply every (target=0, target=1) amplitude pair by the 2x2 matrix u."""
    u = u.astype(amps.dtype, copy=False)
    v = amps.reshape(-1, 2, 1 << target)
    a = v[:, 0, :].copy()
    b = v[:, 1, :]
    v[:, 0, :] = u[0, 0] * a + u[0, 1] * b
    v[:, 1, :] = u[1, 0] * a + u[1, 1] * b


def swap_target_pairs_array(amps: np.ndarray, control: int, target: int) -> None:
    """CX kernel: swap target-bit pairs wherever the control bit is 1."""
    hi, lo = max(control, target), min(control, target)
    v = amps.reshape(-1, 2, 1 << (hi - lo - 1), 2, 1 << lo)
    sub = v[:, 1, :, :, :] if control == hi else v[:, :, :, 1, :]
    axis = 2 if control == hi else 1  # target axis inside sub
    t0 = [slice(None)] * sub.ndim
    t1 = [slice(None)] * sub.ndim
    t0[axis], t1[axis] = 0, 1
    t0, t1 = tuple(t0), tuple(t1)
    tmp = sub[t0].copy()
    sub[t0] = sub[t1]
    sub[t1] = tmp


def phase_pairs_array(amps: np.ndarray, control: int, target: int, lam: float) -> None:
    """CR1 kernel: multiply amplitudes with both bits set by e^{i lam}."""
    hi, lo = max(control, target), min(control, target)
    v = amps.reshape(-1, 2, 1 << (hi - lo - 1), 2, 1 << lo)
    v[:, 1, :, 1, :] *= np.exp(1j * lam)


def apply_1q(state: StateVector, kind: GateKind, target: int, param: float = 0.0) -> StateVector:
    """In-place single-qubit gate (H, RX, RY, RZ)."""
    if not (0 <= target < state.n_qubits):
        raise IndexOutOfRangeError(f"target {target} out of range for {state.n_qubits} qubits")
    apply_matrix_array(state.amplitudes, target, gate_matrix_2x2(kind, param))
    return state


def _check_pair(state: StateVector, control: int, target: int) -> None:
    for q in (control, target):
        if not (0 <= q < state.n_qubits):
            raise IndexOutOfRangeError(f"qubit {q} out of range for {state.n_qubits} qubits")
    if control == target:
        raise SelfPairError(f"control == target == {control}")


def apply_cx(state: StateVector, control: int, target: int) -> StateVector:
    """In-place CX: amplitude-pair swap on the target where the control bit is 1."""
    _check_pair(state, control, target)
    swap_target_pairs_array(state.amplitudes, control, target)
    return state


def apply_cr1(state: StateVector, control: int, target: int, lam: float) -> StateVector:
    """In-place CR1(lam) = diag(1, 1, 1, e^{i lam}); symmetric in (control, target)."""
    _check_pair(state, control, target)
    phase_pairs_array(state.amplitudes, control, target, lam)
    return state


def apply_record(state: StateVector, g: GateRecord) -> StateVector:
    if g.kind == GateKind.CX:
        return apply_cx(state, g.control, g.target)
    if g.kind == GateKind.CR1:
        return apply_cr1(state, g.control, g.target, g.param)
    if g.kind == GateKind.MEASURE:
        return state  # sampling happens once, on the final state
    return apply_1q(state, g.kind, g.target, g.param)


def split_trailing_measures(gates: tuple[GateRecord, ...]) -> tuple[tuple[GateRecord, ...], tuple[GateRecord, ...]]:
    """Split gates into (body, trailing MEASURE block); reject mid-circuit MEASURE."""
    first_measure = len(gates)
    for i, g in enumerate(gates):
        if g.kind == GateKind.MEASURE:
            first_measure = i
            break
    for g in gates[first_measure:]:
        if g.kind != GateKind.MEASURE:
            raise MeasureMidCircuitError("MEASURE records must form a trailing block")
    return gates[:first_measure], gates[first_measure:]


def run_circuit(
    circuit: CircuitTensor, options: SimOptions | None = None
) -> tuple[StateVector, CountsTable | None]:
    """Apply the circuit's live gates in order; sample once iff shots > 0."""
    options = options or SimOptions()
    body, _ = split_trailing_measures(circuit.active_gates)
    state = init_zero_state(circuit.n_qubits, options.precision, options.memory_budget)
    for g in body:
        apply_record(state, g)
    counts = None
    if options.shots > 0:
        counts = sample_counts(state, options.shots, options.rng_seed)
    return state, counts


def exact_probabilities(state: StateVector) -> np.ndarray:
    """|amplitude|^2 vector in float64."""
    amps = state.amplitudes
    return amps.real.astype(np.float64) ** 2 + amps.imag.astype(np.float64) ** 2


def sample_counts(state: StateVector, shots: int, rng_seed: int = 0) -> CountsTable:
    """Multinomial draw from |amplitude|^2; deterministic per seed (PCG64)."""
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    probs = exact_probabilities(state)
    total = probs.sum()
    if abs(total - 1.0) > NORM_TOL[state.precision]:
        raise UnnormalizedStateError(f"norm^2 = {total!r} outside tolerance")
    probs = probs / total
    rng = np.random.default_rng(rng_seed)
    outcomes = rng.choice(probs.size, size=shots, p=probs)
    values, freq = np.unique(outcomes, return_counts=True)
    counts = {bitstring(int(v), state.n_qubits): int(c) for v, c in zip(values, freq)}
    return CountsTable(counts=counts, total=shots, n_qubits=state.n_qubits)


@dataclass
class TimedRun:
    """run_circuit plus a wall-clock measurement of the gate loop only."""

    state: StateVector
    counts: CountsTable | None
    wall_ms: float


def run_circuit_timed(circuit: CircuitTensor, options: SimOptions | None = None) -> TimedRun:
    t0 = time.perf_counter()
    state, counts = run_circuit(circuit, options)
    wall_ms = (time.perf_counter() - t0) * 1000.0
    return TimedRun(state=state, counts=counts, wall_ms=wall_ms)
