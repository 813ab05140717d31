"""Shift-pad XOR encoding and bit-level peeling decoder."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .bits import as_bits
from .ids import TriId


class DecodeError(Exception):
    pass


class ContradictionError(DecodeError):
    """An equation reduced to 1 = 0: the coded packets are inconsistent."""


class InsufficientPacketsError(DecodeError):
    pass


class StallError(DecodeError):
    """Every residual equation has two or more unknowns although at least
    ``m`` distinct ids were received."""

    def __init__(self, msg, ids, residual):
        super().__init__(msg)
        self.ids = ids
        self.residual = residual


@dataclass
class OpCounter:
    xors: int = 0


@dataclass(eq=False)
class Packet:
    payload: np.ndarray
    index: int

    def __post_init__(self):
        self.payload = as_bits(self.payload)
        if len(self.payload) < 1:
            raise ValueError("payload must hold at least one bit")

    def __eq__(self, other):
        return (isinstance(other, Packet) and self.index == other.index
                and np.array_equal(self.payload, other.payload))

    def __repr__(self):
        return f"Packet(index={self.index}, B={len(self.payload)})"


@dataclass(eq=False)
class CodedPacket:
    id: TriId
    payload: np.ndarray
    batch_B: int

    def __post_init__(self):
        self.payload = as_bits(self.payload)
        if len(self.payload) != self.batch_B + self.id.r_max:
            raise ValueError(
                f"payload has {len(self.payload)} bits, expected "
                f"{self.batch_B} + {self.id.r_max}")

    def __eq__(self, other):
        return (isinstance(other, CodedPacket) and self.id == other.id
                and self.batch_B == other.batch_B
                and np.array_equal(self.payload, other.payload))

    def __repr__(self):
        return f"CodedPacket(id={self.id}, B={self.batch_B})"


def _check_batch(batch: list[Packet]) -> int:
    if not batch:
        raise ValueError("empty batch")
    lengths = {len(p.payload) for p in batch}
    if len(lengths) != 1:
        raise ValueError(f"packets differ in length: {sorted(lengths)}")
    if sorted(p.index for p in batch) != list(range(1, len(batch) + 1)):
        raise ValueError("packet indices must be 1..M, each exactly once")
    return lengths.pop()


def encode(batch: list[Packet], tri_id: TriId, counter: OpCounter | None = None) -> CodedPacket:
    B = _check_batch(batch)
    if tri_id.m != len(batch):
        raise ValueError(f"id is for m={tri_id.m}, batch has {len(batch)} packets")
    out = np.zeros(B + tri_id.r_max, dtype=np.uint8)
    for pkt in batch:
        s = tri_id.r[pkt.index - 1]
        out[s:s + B] ^= pkt.payload
    if counter is not None:
        counter.xors += len(batch) * B
    return CodedPacket(tri_id, out, B)


@dataclass(frozen=True)
class DecodeProgress:
    newly_solved_bits: int
    fully_decoded_packets: frozenset[int]
    complete: bool
    redundant: bool = False
    stalled: bool = False


class Decoder:
    """Progressive peeling decoder for one batch.

    Padding bits are known zeros and never enter the system; every column of a
    coded packet becomes one XOR equation over the original bits it covers.
    Equations are stored flat: unknown count, XOR of unknown indices and the
    running right-hand side, so a single-unknown equation names its own
    unknown.  Not safe to share between threads.
    """

    def __init__(self, m: int, B: int):
        if m < 1 or B < 1:
            raise ValueError("m and B must be positive")
        self.m = m
        self.B = B
        self.ops = 0
        self.ids: list[TriId] = []
        self._seen: set[tuple[int, ...]] = set()
        self.solved = np.zeros(m * B, dtype=np.uint8)
        self.bits = np.zeros(m * B, dtype=np.uint8)
        self.n_solved = 0
        cap = 8
        self._shifts = np.zeros((cap, m), dtype=np.int32)
        self._offs = np.zeros(cap + 1, dtype=np.int32)
        self._cnt = np.zeros(cap * (B + m), dtype=np.int32)
        self._xs = np.zeros_like(self._cnt)
        self._val = np.zeros_like(self._cnt, dtype=np.uint8)
        self._stack = np.zeros_like(self._cnt)

    @property
    def complete(self) -> bool:
        return self.n_solved == self.m * self.B

    @property
    def stalled(self) -> bool:
        return not self.complete and len(self.ids) >= self.m

    def fully_decoded(self) -> frozenset[int]:
        done = self.solved.reshape(self.m, self.B).all(axis=1)
        return frozenset(int(i) + 1 for i in np.flatnonzero(done))

    def _progress(self, newly, redundant=False):
        return DecodeProgress(newly, self.fully_decoded(), self.complete,
                              redundant, self.stalled)

    def _grow(self, npk, need):
        if npk + 1 > self._shifts.shape[0]:
            cap = 2 * self._shifts.shape[0]
            self._shifts = np.concatenate([self._shifts, np.zeros_like(self._shifts)])
            offs = np.zeros(cap + 1, dtype=np.int32)
            offs[:len(self._offs)] = self._offs
            self._offs = offs
        if need > len(self._cnt):
            size = max(need, 2 * len(self._cnt))
            for name in ("_cnt", "_xs", "_val", "_stack"):
                old = getattr(self, name)
                new = np.zeros(size, dtype=old.dtype)
                new[:len(old)] = old
                setattr(self, name, new)

    def push(self, pkt) -> DecodeProgress:
        if self.m == 1:
            return self._push_uncoded(pkt)
        newly = self.absorb(pkt)
        return self._progress(max(newly, 0), redundant=newly < 0)

    def absorb(self, pkt) -> int:
        """Add a coded packet and peel; returns newly solved bits, -1 if the
        id was already seen."""
        if pkt.batch_B != self.B or pkt.id.m != self.m:
            raise ValueError(f"packet (m={pkt.id.m}, B={pkt.batch_B}) does not "
                             f"match decoder (m={self.m}, B={self.B})")
        if pkt.id.r in self._seen:
            return -1
        self._seen.add(pkt.id.r)
        k = len(self.ids)
        length = self.B + pkt.id.r_max
        self._grow(k, self._offs[k] + length)
        self._shifts[k] = pkt.id.r
        self._offs[k + 1] = self._offs[k] + length
        self.ids.append(pkt.id)
        newly, ops, status = _kernels.absorb(
            k, self._shifts, self._offs, pkt.payload, self._cnt, self._xs,
            self._val, self.solved, self.bits, self.B, self.m, self._stack)
        self.ops += ops
        if status == _kernels.CONTRADICTION:
            raise ContradictionError(f"packet {pkt.id} contradicts solved bits")
        self.n_solved += newly
        return newly

    def _push_uncoded(self, pkt):
        payload = pkt.payload
        if len(payload) != self.B:
            raise ValueError("uncoded packet length differs from B")
        newly = 0 if self.complete else self.B
        self.bits[:] = payload
        self.solved[:] = 1
        self.n_solved = self.B
        return self._progress(newly, redundant=newly == 0)

    def residual(self) -> list[tuple[frozenset[tuple[int, int]], int]]:
        """Unsolved equations as (unknown (packet, bit) pairs, rhs bit), 1-based."""
        out = []
        for k, tid in enumerate(self.ids):
            base = self._offs[k]
            for j in range(self.B + tid.r_max):
                if self._cnt[base + j] < 2:
                    continue
                unknowns = frozenset(
                    (mi + 1, j - s + 1) for mi, s in enumerate(tid.r)
                    if 0 <= j - s < self.B and not self.solved[mi * self.B + j - s])
                out.append((unknowns, int(self._val[base + j])))
        return out

    def packets(self) -> list[Packet]:
        if not self.complete:
            raise DecodeError("batch not fully decoded")
        rows = self.bits.reshape(self.m, self.B)
        return [Packet(rows[i].copy(), i + 1) for i in range(self.m)]


def decode_all(m: int, B: int, pkts, counter: OpCounter | None = None) -> list[Packet]:
    if m > 1:
        distinct = {p.id.r for p in pkts}
        if len(distinct) < m:
            raise InsufficientPacketsError(
                f"need {m} distinct ids, got {len(distinct)}")
    elif not pkts:
        raise InsufficientPacketsError("no packet received")
    dec = Decoder(m, B)
    for p in pkts:
        if dec.push(p).complete:
            break
    if counter is not None:
        counter.xors += dec.ops
    if not dec.complete:
        raise StallError(
            f"peeling stalled with {dec.n_solved}/{m * B} bits solved",
            list(dec.ids), dec.residual())
    return dec.packets()
