"""Container file formats for circuit sets.

Two interchangeable encodings of the same arrays:

* HDF5 — root attributes {format_version: "1", capacity, n_circ}, datasets
  ``circ_type`` (n_circ, 3) int32, ``gate_type`` (n_circ, d, 3) int32,
  ``gate_param`` (n_circ, d) float64, optional group ``meta`` holding
  string attributes.
* Flat binary fallback — magic ``QGIR1``, little-endian, same field order:
  u32 capacity, u32 n_circ, u32 n_meta, the three arrays (int32 / int32 /
  float64, C order), then n_meta (u32-length-prefixed key, value) UTF-8
  pairs in sorted key order.

Both writers are deterministic: identical sets produce byte-identical
files, and both readers produce identical CircuitSet values.
"""

from __future__ import annotations

import struct
from pathlib import Path

import h5py
import numpy as np

from .errors import ContainerFormatError
from .ir import CircuitSet, set_from_arrays, set_to_arrays

FORMAT_VERSION = "1"
BINARY_MAGIC = b"QGIR1"
HDF5_MAGIC = b"\x89HDF"


def write_hdf5(circuit_set: CircuitSet, path: str | Path) -> None:
    headers, gate_type, gate_param = set_to_arrays(circuit_set)
    # track_times=False keeps writes reproducible (no embedded timestamps).
    with h5py.File(path, "w", track_order=False) as f:
        f.attrs["format_version"] = FORMAT_VERSION
        f.attrs["capacity"] = np.int64(circuit_set.capacity)
        f.attrs["n_circ"] = np.int64(len(circuit_set.circuits))
        f.create_dataset("circ_type", data=headers, track_times=False)
        f.create_dataset("gate_type", data=gate_type, track_times=False)
        f.create_dataset("gate_param", data=gate_param, track_times=False)
        if circuit_set.metadata:
            meta = f.create_group("meta", track_order=False)
            for key in sorted(circuit_set.metadata):
                meta.attrs[key] = circuit_set.metadata[key]


def read_hdf5(path: str | Path) -> CircuitSet:
    with h5py.File(path, "r") as f:
        version = f.attrs.get("format_version")
        if version != FORMAT_VERSION:
            raise ContainerFormatError(f"unsupported format_version {version!r}")
        for name in ("circ_type", "gate_type", "gate_param"):
            if name not in f:
                raise ContainerFormatError(f"missing dataset {name!r}")
        headers = f["circ_type"][...]
        gate_type = f["gate_type"][...]
        gate_param = f["gate_param"][...]
        metadata = {}
        if "meta" in f:
            metadata = {k: str(v) for k, v in f["meta"].attrs.items()}
        n_circ = int(f.attrs.get("n_circ", headers.shape[0]))
        capacity = int(f.attrs.get("capacity", gate_type.shape[1]))
    if n_circ != headers.shape[0] or capacity != gate_type.shape[1]:
        raise ContainerFormatError("root attributes disagree with dataset shapes")
    return set_from_arrays(headers, gate_type, gate_param, metadata)


def write_binary(circuit_set: CircuitSet, path: str | Path) -> None:
    headers, gate_type, gate_param = set_to_arrays(circuit_set)
    meta_items = sorted(circuit_set.metadata.items())
    with open(path, "wb") as f:
        f.write(BINARY_MAGIC)
        f.write(struct.pack("<III", circuit_set.capacity, headers.shape[0], len(meta_items)))
        f.write(headers.astype("<i4").tobytes(order="C"))
        f.write(gate_type.astype("<i4").tobytes(order="C"))
        f.write(gate_param.astype("<f8").tobytes(order="C"))
        for key, value in meta_items:
            for text in (key, value):
                raw = text.encode("utf-8")
                f.write(struct.pack("<I", len(raw)))
                f.write(raw)


def read_binary(path: str | Path) -> CircuitSet:
    data = Path(path).read_bytes()
    if not data.startswith(BINARY_MAGIC):
        raise ContainerFormatError("bad magic, not a QGIR1 file")
    off = len(BINARY_MAGIC)

    def take(count: int) -> bytes:
        nonlocal off
        if off + count > len(data):
            raise ContainerFormatError("truncated file")
        chunk = data[off : off + count]
        off += count
        return chunk

    capacity, n_circ, n_meta = struct.unpack("<III", take(12))
    headers = np.frombuffer(take(n_circ * 3 * 4), dtype="<i4").reshape(n_circ, 3)
    gate_type = np.frombuffer(take(n_circ * capacity * 3 * 4), dtype="<i4").reshape(
        n_circ, capacity, 3
    )
    gate_param = np.frombuffer(take(n_circ * capacity * 8), dtype="<f8").reshape(n_circ, capacity)
    metadata = {}
    for _ in range(n_meta):
        klen = struct.unpack("<I", take(4))[0]
        key = take(klen).decode("utf-8")
        vlen = struct.unpack("<I", take(4))[0]
        metadata[key] = take(vlen).decode("utf-8")
    if off != len(data):
        raise ContainerFormatError(f"{len(data) - off} trailing bytes")
    return set_from_arrays(headers, gate_type, gate_param, metadata)


def save_circuit_set(circuit_set: CircuitSet, path: str | Path) -> None:
    """Write HDF5 for .h5/.hdf5 paths, the binary fallback otherwise."""
    if Path(path).suffix.lower() in (".h5", ".hdf5"):
        write_hdf5(circuit_set, path)
    else:
        write_binary(circuit_set, path)


def load_circuit_set(path: str | Path) -> CircuitSet:
    """Read either container format, sniffing the magic bytes."""
    with open(path, "rb") as f:
        head = f.read(8)
    if head.startswith(HDF5_MAGIC):
        return read_hdf5(path)
    if head.startswith(BINARY_MAGIC):
        return read_binary(path)
    raise ContainerFormatError(f"{path}: unrecognized container format")
