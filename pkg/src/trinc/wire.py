"""Bit-exact frames for coded packets.

Layout (big-endian bit packing, zero-padded to a whole byte)::

    magic 8 | version 4 | mode 4 | M 16 | B 32 | body | payload

Bodies:

* explicit: round 16, then M padding fields of r_max.bit_length() bits each
* compact:  round 16 | group 16 | rotation 16; r is rebuilt from the sequence
* rlnc:     q 8, then M coefficients of q bits each

The triangular payload is B + r_max bits; the RLNC payload is ceil(B/q) symbols
of q bits.
"""

from __future__ import annotations

import numpy as np

from .bits import from_int, to_int
from .codec import CodedPacket
from .gf import POLYS
from .ids import TriId, id_from_parts
from .rlnc import RlncCodedPacket

MAGIC = 0xA7
VERSION = 1
EXPLICIT, COMPACT, RLNC = 0, 1, 2
MODES = {"explicit": EXPLICIT, "compact": COMPACT, "rlnc": RLNC}
HEADER_BITS = 8 + 4 + 4 + 16 + 32
COMPACT_BODY_BITS = 48


class WireError(ValueError):
    """Base class for every frame rejection."""


class BadMagicError(WireError):
    pass


class BadVersionError(WireError):
    pass


class BadModeError(WireError):
    pass


class LengthError(WireError):
    """Frame shorter or longer than its header implies."""


class InvalidIdError(WireError):
    """Header fields describe an id the sequence never produces."""


class FieldRangeError(WireError):
    """A value does not fit its field, or a field holds an unusable value."""


class _Writer:
    __slots__ = ("acc", "n")

    def __init__(self):
        self.acc = 0
        self.n = 0

    def put(self, value: int, width: int, what: str = "field"):
        if not 0 <= value < (1 << width):
            raise FieldRangeError(f"{what}={value} does not fit in {width} bits")
        self.acc = (self.acc << width) | value
        self.n += width

    def put_bits(self, bits: np.ndarray):
        self.acc = (self.acc << len(bits)) | to_int(bits)
        self.n += len(bits)

    def finish(self) -> bytes:
        pad = -self.n % 8
        return (self.acc << pad).to_bytes((self.n + pad) // 8, "big")


class _Reader:
    __slots__ = ("acc", "left")

    def __init__(self, data: bytes):
        self.acc = int.from_bytes(data, "big")
        self.left = 8 * len(data)

    def need(self, nbits: int):
        if nbits > self.left:
            raise LengthError(f"frame truncated: need {nbits} more bits, have {self.left}")

    def get(self, width: int) -> int:
        self.need(width)
        self.left -= width
        return (self.acc >> self.left) & ((1 << width) - 1)


def _mode_of(pkt, mode) -> int:
    if mode is None:
        return RLNC if isinstance(pkt, RlncCodedPacket) else COMPACT
    code = MODES.get(mode, mode)
    if code not in (EXPLICIT, COMPACT, RLNC):
        raise BadModeError(f"unknown mode {mode!r}")
    if (code == RLNC) != isinstance(pkt, RlncCodedPacket):
        raise BadModeError(f"mode {mode!r} does not fit {type(pkt).__name__}")
    return code


def serialize(pkt: CodedPacket | RlncCodedPacket, mode=None) -> bytes:
    """Frame a packet.  ``mode`` is 'explicit', 'compact' (default for
    triangular packets) or 'rlnc'; numeric mode codes work too."""
    code = _mode_of(pkt, mode)
    w = _Writer()
    w.put(MAGIC, 8)
    w.put(VERSION, 4)
    w.put(code, 4)
    if code == RLNC:
        w.put(pkt.m, 16, "M")
        w.put(pkt.batch_B, 32, "B")
        w.put(pkt.q, 8, "q")
        for c in pkt.coefficients:
            w.put(int(c), pkt.q, "coefficient")
        for s in pkt.payload:
            w.put(int(s), pkt.q, "symbol")
        return w.finish()
    tid = pkt.id
    w.put(tid.m, 16, "M")
    w.put(pkt.batch_B, 32, "B")
    w.put(tid.round, 16, "round")
    if code == COMPACT:
        w.put(tid.group, 16, "group")
        w.put(tid.rotation, 16, "rotation")
    else:
        width = tid.r_max.bit_length()
        for x in tid.r:
            w.put(x, width, "padding")
    w.put_bits(pkt.payload)
    return w.finish()


def frame_bits(m: int, B: int, mode, r_max: int = 0, q: int = 8) -> int:
    """Unpadded frame length in bits."""
    code = MODES.get(mode, mode)
    if code == RLNC:
        return HEADER_BITS + 8 + m * q + -(-B // q) * q
    body = 16 + (COMPACT_BODY_BITS - 16 if code == COMPACT else m * r_max.bit_length())
    return HEADER_BITS + body + B + r_max


def _expect_total(data: bytes, nbits: int):
    if len(data) != (nbits + 7) // 8:
        raise LengthError(f"frame holds {len(data)} bytes, header implies {(nbits + 7) // 8}")


def parse(data: bytes) -> CodedPacket | RlncCodedPacket:
    data = bytes(data)
    rd = _Reader(data)
    if len(data) < HEADER_BITS // 8:
        raise LengthError(f"frame of {len(data)} bytes is shorter than the header")
    if rd.get(8) != MAGIC:
        raise BadMagicError("bad magic byte")
    version = rd.get(4)
    if version != VERSION:
        raise BadVersionError(f"unsupported version {version}")
    code = rd.get(4)
    if code not in (EXPLICIT, COMPACT, RLNC):
        raise BadModeError(f"unknown mode {code}")
    m = rd.get(16)
    B = rd.get(32)
    if B < 1:
        raise FieldRangeError("B must be positive")
    if m < 1:
        raise FieldRangeError("M must be positive")

    if code == RLNC:
        q = rd.get(8)
        if q not in POLYS:
            raise FieldRangeError(f"unsupported field size q={q}")
        nsym = -(-B // q)
        _expect_total(data, frame_bits(m, B, RLNC, q=q))
        coefs = np.array([rd.get(q) for _ in range(m)], dtype=np.uint8)
        payload = np.array([rd.get(q) for _ in range(nsym)], dtype=np.uint8)
        _check_tail(rd)
        return RlncCodedPacket(coefs, payload, q, B)

    if m < 2:
        raise InvalidIdError("triangular frames need M >= 2")
    rho = rd.get(16)
    if rho < 1:
        raise InvalidIdError("round must be at least 1")
    r_max = rho * (m - 1)
    _expect_total(data, frame_bits(m, B, code, r_max=r_max))
    if code == COMPACT:
        g, t = rd.get(16), rd.get(16)
        try:
            tid = id_from_parts(m, rho, g, t)
        except ValueError as exc:
            raise InvalidIdError(str(exc)) from None
    else:
        width = r_max.bit_length()
        r = [rd.get(width) for _ in range(m)]
        try:
            tid = TriId.from_r(r)
        except ValueError as exc:
            raise InvalidIdError(str(exc)) from None
        if tid.round != rho:
            raise InvalidIdError(f"paddings {tuple(r)} belong to round {tid.round}, header says {rho}")
    nbits = B + r_max
    payload = from_int(rd.get(nbits), nbits)
    _check_tail(rd)
    return CodedPacket(tid, payload, B)


def _check_tail(rd: _Reader):
    if rd.left >= 8:
        raise LengthError("trailing bytes after payload")
    if rd.get(rd.left):
        raise FieldRangeError("non-zero tail padding")
