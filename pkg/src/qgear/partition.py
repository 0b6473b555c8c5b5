"""Partitioned state-vector execution over in-process workers.

The 2^n amplitudes are split into W contiguous chunks (W a power of two),
one per worker.  A qubit is *local* when its stride fits inside a chunk;
gates on local qubits touch no other worker.  A gate whose target qubit is
non-local is tagged EXCHANGE: the two workers whose ids differ in exactly
the target's mask bit trade one message each and update their chunks.  A
non-local *control* never moves data — every index a worker owns shares the
control bit, which is a bit of the worker id.

Message payloads carry exactly the amplitudes the partner must combine:
the full chunk for dense single-qubit gates, the control=1 half for CX
with a local control, everything or nothing for CX with a non-local
control, and nothing for the diagonal CR1.  Every EXCHANGE gate costs each
worker exactly one send and one receive (possibly empty), followed by a
global barrier, so workers advance in lockstep on sequence numbers.
"""

from __future__ import annotations

import queue
import threading
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from .errors import (
    BadWorkerCountError,
    ProtocolViolationError,
    SequenceMismatchError,
    UnnormalizedStateError,
)
from .ir import CircuitTensor, GateKind, GateRecord
from .statevec import (
    NORM_TOL,
    CountsTable,
    SimOptions,
    StateVector,
    apply_matrix_array,
    gate_matrix_2x2,
    init_zero_state,
    phase_pairs_array,
    sample_counts,
    split_trailing_measures,
    swap_target_pairs_array,
)

_JOIN_TIMEOUT = 60.0  # seconds; workers deadlocking is a bug, not a wait


class Locality(Enum):
    LOCAL = "local"
    EXCHANGE = "exchange"


@dataclass(frozen=True)
class GateTask:
    seq: int
    record: GateRecord
    locality: Locality
    partner_mask: int = 0  # worker-id bit that flips to reach the partner


@dataclass
class Partition:
    """One worker's contiguous slice of the global amplitude array."""

    worker_id: int
    chunk: np.ndarray
    base_index: int


@dataclass(frozen=True)
class ExchangeMessage:
    sender: int
    seq: int
    payload: np.ndarray


def _check_worker_count(n_qubits: int, workers: int) -> None:
    if workers < 1 or workers & (workers - 1) != 0:
        raise BadWorkerCountError(f"workers must be a power of two >= 1, got {workers}")
    if workers > (1 << n_qubits):
        raise BadWorkerCountError(f"workers {workers} exceeds 2^{n_qubits} amplitudes")


def chunk_length(n_qubits: int, workers: int) -> int:
    _check_worker_count(n_qubits, workers)
    return (1 << n_qubits) // workers


def partner_mask(n_qubits: int, workers: int, qubit: int) -> int:
    """0 when the qubit is local; otherwise the worker-id mask of its partner."""
    n_local = chunk_length(n_qubits, workers).bit_length() - 1
    return 0 if qubit < n_local else 1 << (qubit - n_local)


def plan(circuit: CircuitTensor, workers: int) -> list[GateTask]:
    """Tag every live gate LOCAL or EXCHANGE for the given worker count."""
    _check_worker_count(circuit.n_qubits, workers)
    body, _ = split_trailing_measures(circuit.active_gates)
    tasks = []
    for seq, g in enumerate(body):
        mask = partner_mask(circuit.n_qubits, workers, g.target)
        locality = Locality.EXCHANGE if mask else Locality.LOCAL
        tasks.append(GateTask(seq=seq, record=g, locality=locality, partner_mask=mask))
    return tasks


def scatter(state: StateVector, workers: int) -> list[Partition]:
    """Split a state into W contiguous chunks (copies)."""
    length = chunk_length(state.n_qubits, workers)
    return [
        Partition(w, state.amplitudes[w * length : (w + 1) * length].copy(), w * length)
        for w in range(workers)
    ]


def gather(
    partitions: list[Partition],
    sequence_numbers: list[int] | None = None,
    precision: str = "fp64",
) -> StateVector:
    """Concatenate chunks in worker order and re-verify the norm."""
    if sequence_numbers is not None and len(set(sequence_numbers)) > 1:
        raise SequenceMismatchError(f"workers stopped at different sequences: {sequence_numbers}")
    parts = sorted(partitions, key=lambda p: p.worker_id)
    if [p.worker_id for p in parts] != list(range(len(parts))):
        raise ValueError("partitions must cover worker ids 0..W-1 exactly once")
    length = len(parts[0].chunk)
    for p in parts:
        if len(p.chunk) != length or p.base_index != p.worker_id * length:
            raise ValueError(f"partition {p.worker_id} has inconsistent geometry")
    amps = np.concatenate([p.chunk for p in parts])
    n_qubits = amps.size.bit_length() - 1
    state = StateVector(n_qubits, precision, amps)
    if abs(state.norm_sq() - 1.0) > NORM_TOL[precision]:
        raise UnnormalizedStateError(f"gathered norm^2 = {state.norm_sq()!r}")
    return state


def _flip_target(chunk: np.ndarray, target: int) -> None:
    """Unconditional X on a local qubit (CX whose non-local control bit is 1)."""
    v = chunk.reshape(-1, 2, 1 << target)
    tmp = v[:, 0, :].copy()
    v[:, 0, :] = v[:, 1, :]
    v[:, 1, :] = tmp


def _phase_on_bit(chunk: np.ndarray, qubit: int, lam: float) -> None:
    v = chunk.reshape(-1, 2, 1 << qubit)
    v[:, 1, :] *= np.exp(1j * lam)


@dataclass
class _Shared:
    """State owned by the coordinating thread, visible to every worker."""

    inboxes: list[queue.SimpleQueue]
    barrier: threading.Barrier
    abort: threading.Event
    sent: list[int] = field(default_factory=list)
    received: list[int] = field(default_factory=list)


def _check_message(msg: ExchangeMessage, expected_seq: int, expected_sender: int) -> None:
    if msg.seq != expected_seq or msg.sender != expected_sender:
        raise ProtocolViolationError(
            f"expected seq {expected_seq} from worker {expected_sender}, "
            f"got seq {msg.seq} from worker {msg.sender}"
        )


class _Worker:
    """Executes the shared task list against one chunk."""

    def __init__(
        self,
        worker_id: int,
        n_qubits: int,
        workers: int,
        chunk: np.ndarray,
        shared: _Shared,
        delay_hook: Callable[[int, int], None] | None = None,
    ):
        self.id = worker_id
        self.workers = workers
        self.chunk = chunk
        self.n_local = len(chunk).bit_length() - 1
        self.shared = shared
        self.delay_hook = delay_hook
        self.seq = -1

    def _id_bit(self, qubit: int) -> int:
        """Value of a non-local qubit over this worker's whole chunk."""
        return (self.id >> (qubit - self.n_local)) & 1

    def _exchange(self, task: GateTask, payload: np.ndarray) -> np.ndarray:
        partner = self.id ^ task.partner_mask
        if self.delay_hook is not None:
            self.delay_hook(self.id, task.seq)
        self.shared.inboxes[partner].put(ExchangeMessage(self.id, task.seq, payload))
        self.shared.sent[self.id] += 1
        while True:
            if self.shared.abort.is_set():
                raise ProtocolViolationError("aborted while waiting for a message")
            try:
                msg = self.shared.inboxes[self.id].get(timeout=0.2)
                break
            except queue.Empty:
                continue
        _check_message(msg, task.seq, partner)
        self.shared.received[self.id] += 1
        return msg.payload

    def _run_local(self, g: GateRecord) -> None:
        if g.kind in (GateKind.H, GateKind.RX, GateKind.RY, GateKind.RZ):
            apply_matrix_array(self.chunk, g.target, gate_matrix_2x2(g.kind, g.param))
        elif g.kind == GateKind.CX:
            if g.control < self.n_local:
                swap_target_pairs_array(self.chunk, g.control, g.target)
            elif self._id_bit(g.control):
                _flip_target(self.chunk, g.target)
        elif g.kind == GateKind.CR1:
            if g.control < self.n_local:
                phase_pairs_array(self.chunk, g.control, g.target, g.param)
            elif self._id_bit(g.control):
                _phase_on_bit(self.chunk, g.target, g.param)
        else:
            raise ValueError(f"unexpected kind in task list: {g.kind}")

    def _run_exchange(self, task: GateTask) -> None:
        g = task.record
        empty = self.chunk[:0].copy()
        if g.kind in (GateKind.H, GateKind.RX, GateKind.RY, GateKind.RZ):
            theirs = self._exchange(task, self.chunk.copy())
            u = gate_matrix_2x2(g.kind, g.param).astype(self.chunk.dtype, copy=False)
            if self._id_bit(g.target) == 0:
                self.chunk[:] = u[0, 0] * self.chunk + u[0, 1] * theirs
            else:
                self.chunk[:] = u[1, 0] * theirs + u[1, 1] * self.chunk
        elif g.kind == GateKind.CX:
            if g.control < self.n_local:
                v = self.chunk.reshape(-1, 2, 1 << g.control)
                sel = v[:, 1, :]
                theirs = self._exchange(task, sel.copy())
                sel[...] = theirs.reshape(sel.shape)
            elif self._id_bit(g.control):
                theirs = self._exchange(task, self.chunk.copy())
                self.chunk[:] = theirs
            else:
                self._exchange(task, empty)
        elif g.kind == GateKind.CR1:
            self._exchange(task, empty)
            if self._id_bit(g.target):
                if g.control < self.n_local:
                    _phase_on_bit(self.chunk, g.control, g.param)
                elif self._id_bit(g.control):
                    self.chunk *= np.exp(1j * g.param)
        else:
            raise ValueError(f"unexpected kind in task list: {g.kind}")

    def run(self, tasks: list[GateTask]) -> None:
        for task in tasks:
            if self.shared.abort.is_set():
                return
            if task.locality is Locality.LOCAL:
                self._run_local(task.record)
            else:
                self._run_exchange(task)
                self.shared.barrier.wait(timeout=_JOIN_TIMEOUT)
            self.seq = task.seq


@dataclass
class DistributedResult:
    state: StateVector
    counts: CountsTable | None
    messages_sent: list[int]
    messages_received: list[int]
    tasks: list[GateTask]


def execute_distributed(
    circuit: CircuitTensor,
    workers: int,
    options: SimOptions | None = None,
    delay_hook: Callable[[int, int], None] | None = None,
) -> DistributedResult:
    """Run a circuit across W workers and gather the result.

    The gathered state matches the single-worker simulator element-wise,
    and sampling happens once on the gathered state, so identical seeds
    give identical counts in every mode.
    """
    options = options or SimOptions()
    _check_worker_count(circuit.n_qubits, workers)
    if workers > 1 and options.precision != "fp64":
        raise ValueError("distributed mode supports fp64 only; run fp32 with workers=1")

    tasks = plan(circuit, workers)
    full = init_zero_state(circuit.n_qubits, options.precision, options.memory_budget)
    parts = scatter(full, workers)
    del full

    shared = _Shared(
        inboxes=[queue.SimpleQueue() for _ in range(workers)],
        barrier=threading.Barrier(workers),
        abort=threading.Event(),
        sent=[0] * workers,
        received=[0] * workers,
    )
    worker_objs = [
        _Worker(p.worker_id, circuit.n_qubits, workers, p.chunk, shared, delay_hook)
        for p in parts
    ]

    if workers == 1:
        worker_objs[0].run(tasks)
    else:
        errors: list[BaseException] = []

        def drive(w: _Worker) -> None:
            try:
                w.run(tasks)
            except BaseException as exc:  # surfaced to the caller below
                errors.append(exc)
                shared.abort.set()
                shared.barrier.abort()

        threads = [threading.Thread(target=drive, args=(w,), daemon=True) for w in worker_objs]
        for t in threads:
            t.start()
        for t in threads:
            t.join(timeout=_JOIN_TIMEOUT)
        if any(t.is_alive() for t in threads):
            shared.abort.set()
            raise ProtocolViolationError("worker threads failed to finish")
        if errors:
            real = [e for e in errors if not isinstance(e, threading.BrokenBarrierError)]
            raise (real[0] if real else errors[0])

    state = gather(parts, [w.seq for w in worker_objs], options.precision)
    counts = None
    if options.shots > 0:
        counts = sample_counts(state, options.shots, options.rng_seed)
    return DistributedResult(
        state=state,
        counts=counts,
        messages_sent=list(shared.sent),
        messages_received=list(shared.received),
        tasks=tasks,
    )
