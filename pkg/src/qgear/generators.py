"""Synthetic circuit generators: random entangling blocks and the QFT ladder.

Randomness comes from numpy's PCG64 (``np.random.default_rng``), a named,
seedable generator with a documented algorithm, so a spec reproduces the
same tensor on any platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import TooFewQubitsError
from .ir import CircType, CircuitTensor, GateRecord

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class RandomSpec:
    """Parameters for a random block circuit.

    Each block is two parameterized rotations followed by a CX on a random
    ordered qubit pair: RY(theta1) on the control, RZ(theta2) on the
    target, then CX(control -> target), with angles uniform on [0, 2*pi).
    """

    n_qubits: int
    n_blocks: int
    seed: int = 0
    include_measure: bool = False


@dataclass(frozen=True)
class QftSpec:
    n_qubits: int
    reversed: bool = False  # relabel qubit q -> n-1-q throughout


def random_qubit_pairs(n_qubits: int, k: int, seed: int = 0) -> list[tuple[int, int]]:
    """k ordered (control, target) pairs, uniform over all n(n-1) non-self pairs.

    Sampled with replacement; deterministic per seed.
    """
    if n_qubits < 2:
        raise TooFewQubitsError(f"need >= 2 qubits for pairs, got {n_qubits}")
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    rng = np.random.default_rng(seed)
    flat = rng.integers(0, n_qubits * (n_qubits - 1), size=k)
    pairs = []
    for u in flat:
        control, r = divmod(int(u), n_qubits - 1)
        target = r if r < control else r + 1
        pairs.append((control, target))
    return pairs


def generate_random_gate_list(spec: RandomSpec) -> CircuitTensor:
    """Random block circuit with 3 * n_blocks gates (+ one MEASURE per qubit)."""
    if spec.n_qubits < 2:
        raise TooFewQubitsError(f"need >= 2 qubits, got {spec.n_qubits}")
    if spec.n_blocks < 0:
        raise ValueError(f"n_blocks must be >= 0, got {spec.n_blocks}")
    rng = np.random.default_rng(spec.seed)
    n_pairs = spec.n_qubits * (spec.n_qubits - 1)
    gates: list[GateRecord] = []
    for _ in range(spec.n_blocks):
        control, r = divmod(int(rng.integers(0, n_pairs)), spec.n_qubits - 1)
        target = r if r < control else r + 1
        theta1, theta2 = rng.uniform(0.0, TWO_PI, size=2)
        gates.append(GateRecord.ry(control, float(theta1)))
        gates.append(GateRecord.rz(target, float(theta2)))
        gates.append(GateRecord.cx(control, target))
    if spec.include_measure:
        gates.extend(GateRecord.measure(q) for q in range(spec.n_qubits))
    return CircuitTensor.from_gates(CircType.RANDOM, spec.n_qubits, gates)


def build_qft(spec: QftSpec) -> CircuitTensor:
    """QFT ladder: per qubit i an H, then CR1 from every later qubit j with
    angle 2*pi / 2^(j-i+1).  No terminal swap layer, so the output is in
    bit-reversed order relative to the textbook transform.  Gate count is
    n(n+1)/2.
    """
    n = spec.n_qubits
    if n < 1:
        raise ValueError(f"n_qubits must be >= 1, got {n}")

    def q(i: int) -> int:
        return n - 1 - i if spec.reversed else i

    gates: list[GateRecord] = []
    for i in range(n):
        gates.append(GateRecord.h(q(i)))
        for j in range(i + 1, n):
            lam = TWO_PI / (1 << (j - i + 1))
            gates.append(GateRecord.cr1(q(j), q(i), lam))
    return CircuitTensor.from_gates(CircType.QFT, n, gates)
