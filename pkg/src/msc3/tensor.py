"""Dense 3rd-order tensor storage, mode-wise slicing, sub-cubes, and file I/O.

Layout is row-major: entry (i, j, k) of an m1 x m2 x m3 tensor lives at flat
index ((i * m2) + j) * m3 + k, which is exactly numpy C order for shape
(m1, m2, m3).

Indices are 0-based everywhere. Modes are numbered 1, 2, 3.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import FormatError, ValidationError

T3B_MAGIC = b"T3B1"


def check_index_set(indices, size, mode):
    """Validate a cluster index set for one mode.

    Returns the indices as a sorted tuple. Raises ValueError on an empty set
    or duplicates, IndexError on out-of-range members. mode is only used in
    messages; pass any label when there is no mode context.
    """
    label = f"mode-{mode}" if isinstance(mode, int) else str(mode)
    idx = tuple(sorted(int(i) for i in indices))
    if len(idx) == 0:
        raise ValueError(f"{label} index set is empty")
    if len(set(idx)) != len(idx):
        raise ValueError(f"{label} index set has duplicates")
    if idx[0] < 0 or idx[-1] >= size:
        raise IndexError(
            f"{label} index out of range: valid range is 0..{size - 1}"
        )
    return idx


@dataclass(frozen=True)
class Tensor3:
    """Immutable dense 3rd-order tensor of float64 values."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.data, dtype=np.float64)
        if arr.ndim != 3:
            raise ValueError(f"expected a 3-d array, got ndim={arr.ndim}")
        if min(arr.shape) < 1:
            raise ValueError(f"all dims must be positive, got {arr.shape}")
        if not np.isfinite(arr).all():
            raise ValidationError("tensor contains NaN or Inf entries")
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @property
    def dims(self):
        return self.data.shape

    def slice(self, mode, index):
        """Matrix obtained by fixing one index of the tensor.

        mode 1 fixes i and returns the m2 x m3 matrix T(i, :, :); mode 2
        returns T(:, j, :); mode 3 returns T(:, :, k). Always a copy.
        """
        m = self.dims[_mode_axis(mode)]
        if not 0 <= index < m:
            raise IndexError(
                f"mode-{mode} slice index {index} out of range 0..{m - 1}"
            )
        if mode == 1:
            out = self.data[index, :, :]
        elif mode == 2:
            out = self.data[:, index, :]
        else:
            out = self.data[:, :, index]
        return out.copy()

    def subcube(self, j1, j2, j3):
        """Sub-tensor on the index sets (j1, j2, j3), preserving index order."""
        s1 = check_index_set(j1, self.dims[0], 1)
        s2 = check_index_set(j2, self.dims[1], 2)
        s3 = check_index_set(j3, self.dims[2], 3)
        return Tensor3(self.data[np.ix_(s1, s2, s3)])


def _mode_axis(mode):
    if mode not in (1, 2, 3):
        raise ValueError(f"mode must be 1, 2, or 3, got {mode}")
    return mode - 1


def save_tensor(t, path, fmt="t3b"):
    """Write a tensor to path in t3b or csv format.

    t3b: magic "T3B1", then m1, m2, m3 as unsigned 32-bit little-endian,
    then the payload as IEEE-754 binary64 little-endian in row-major order.
    Byte-deterministic for equal inputs.

    csv: first line "m1,m2,m3", then one value per line in row-major order.
    """
    m1, m2, m3 = t.dims
    if fmt == "t3b":
        payload = np.ascontiguousarray(t.data, dtype="<f8").tobytes()
        with open(path, "wb") as fh:
            fh.write(T3B_MAGIC)
            fh.write(struct.pack("<III", m1, m2, m3))
            fh.write(payload)
    elif fmt == "csv":
        with open(path, "w") as fh:
            fh.write(f"{m1},{m2},{m3}\n")
            for v in t.data.ravel():
                fh.write(f"{float(v)!r}\n")
    else:
        raise ValueError(f"unknown tensor format {fmt!r}")


def load_tensor(path, fmt="t3b"):
    """Read a tensor written by save_tensor. Exact round trip for t3b."""
    if fmt == "t3b":
        return _load_t3b(path)
    if fmt == "csv":
        return _load_csv(path)
    raise ValueError(f"unknown tensor format {fmt!r}")


def _load_t3b(path):
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:4] != T3B_MAGIC:
        raise FormatError(f"bad magic in {path}: expected {T3B_MAGIC!r}", offset=0)
    if len(raw) < 16:
        raise FormatError(f"truncated header in {path}", offset=len(raw))
    m1, m2, m3 = struct.unpack("<III", raw[4:16])
    if min(m1, m2, m3) < 1:
        raise FormatError(f"non-positive dims ({m1},{m2},{m3}) in {path}", offset=4)
    n = m1 * m2 * m3
    expected = 16 + 8 * n
    if len(raw) != expected:
        raise FormatError(
            f"payload size mismatch in {path}: expected {expected} bytes, "
            f"got {len(raw)}",
            offset=min(len(raw), expected),
        )
    data = np.frombuffer(raw[16:], dtype="<f8").reshape(m1, m2, m3)
    if not np.isfinite(data).all():
        raise ValidationError(f"non-finite entry in {path}")
    return Tensor3(data)


def _load_csv(path):
    with open(path, "r") as fh:
        header = fh.readline()
        parts = header.strip().split(",")
        if len(parts) != 3:
            raise FormatError(f"bad csv header in {path}: {header.strip()!r}", offset=0)
        try:
            m1, m2, m3 = (int(p) for p in parts)
        except ValueError:
            raise FormatError(
                f"non-integer dims in csv header of {path}: {header.strip()!r}",
                offset=0,
            ) from None
        if min(m1, m2, m3) < 1:
            raise FormatError(f"non-positive dims ({m1},{m2},{m3}) in {path}", offset=0)
        n = m1 * m2 * m3
        values = []
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            try:
                values.append(float(line))
            except ValueError:
                raise FormatError(
                    f"bad value on line {lineno} of {path}: {line!r}"
                ) from None
    if len(values) != n:
        raise FormatError(
            f"value count mismatch in {path}: expected {n}, got {len(values)}"
        )
    data = np.array(values, dtype=np.float64)
    if not np.isfinite(data).all():
        raise ValidationError(f"non-finite entry in {path}")
    return Tensor3(data.reshape(m1, m2, m3))
