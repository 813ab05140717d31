"""Bit-vector helpers.  Payloads are uint8 arrays of 0/1, head bit first."""

import numpy as np


def as_bits(value) -> np.ndarray:
    """Coerce a '0101' string, an iterable of ints or an array into a bit array."""
    if isinstance(value, str):
        value = [int(c) for c in value if c in "01"]
    arr = np.asarray(value, dtype=np.uint8)
    if arr.ndim != 1 or (arr > 1).any():
        raise ValueError("payload must be a flat sequence of 0/1")
    return arr


def from_bytes(data: bytes, nbits: int | None = None) -> np.ndarray:
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8))
    return bits if nbits is None else bits[:nbits].copy()


def to_bytes(bits: np.ndarray) -> bytes:
    return np.packbits(np.asarray(bits, dtype=np.uint8)).tobytes()


def to_int(bits: np.ndarray) -> int:
    if len(bits) == 0:
        return 0
    pad = (-len(bits)) % 8
    return int.from_bytes(to_bytes(bits), "big") >> pad


def from_int(value: int, nbits: int) -> np.ndarray:
    nbytes = (nbits + 7) // 8
    pad = nbytes * 8 - nbits
    return from_bytes((value << pad).to_bytes(nbytes, "big"), nbits)


def to_str(bits: np.ndarray) -> str:
    return "".join("1" if b else "0" for b in bits)
