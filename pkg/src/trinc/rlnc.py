"""Random linear network coding over GF(2^q): the comparison baseline."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .codec import Packet, _check_batch
from .gf import field


class RankDeficientError(Exception):
    def __init__(self, rank: int, m: int):
        super().__init__(f"rank {rank} < {m}: cannot decode yet")
        self.rank = rank
        self.m = m


def symbols_from_bits(bits: np.ndarray, q: int) -> np.ndarray:
    """Split bits big-endian into q-bit symbols, zero-padding the tail."""
    n = -(-len(bits) // q)
    padded = np.zeros(n * q, dtype=np.uint8)
    padded[:len(bits)] = bits
    weights = (1 << np.arange(q - 1, -1, -1)).astype(np.uint16)
    return (padded.reshape(n, q) * weights).sum(axis=1).astype(np.uint8)


def bits_from_symbols(symbols: np.ndarray, q: int, B: int) -> np.ndarray:
    shifts = np.arange(q - 1, -1, -1)
    bits = (np.asarray(symbols, dtype=np.uint8)[:, None] >> shifts) & 1
    return bits.reshape(-1)[:B].astype(np.uint8)


@dataclass(eq=False)
class RlncCodedPacket:
    coefficients: np.ndarray
    payload: np.ndarray      # ceil(B/q) symbols
    q: int
    batch_B: int

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=np.uint8)
        self.payload = np.asarray(self.payload, dtype=np.uint8)
        if len(self.payload) != -(-self.batch_B // self.q):
            raise ValueError("payload symbol count does not match B and q")
        if (self.coefficients >= (1 << self.q)).any() or (self.payload >= (1 << self.q)).any():
            raise ValueError(f"values exceed GF(2^{self.q})")

    @property
    def m(self) -> int:
        return len(self.coefficients)

    def __eq__(self, other):
        return (isinstance(other, RlncCodedPacket) and self.q == other.q
                and self.batch_B == other.batch_B
                and np.array_equal(self.coefficients, other.coefficients)
                and np.array_equal(self.payload, other.payload))


def rlnc_combine(batch: list[Packet], coefficients, q: int) -> RlncCodedPacket:
    B = _check_batch(batch)
    gf = field(q)
    coefs = np.asarray(coefficients, dtype=np.uint8)
    if len(coefs) != len(batch):
        raise ValueError("one coefficient per packet required")
    ordered = sorted(batch, key=lambda p: p.index)
    symbols = np.stack([symbols_from_bits(p.payload, q) for p in ordered])
    return RlncCodedPacket(coefs, _kernels.gf_mix(coefs, symbols, gf.mul), q, B)


def rlnc_encode(batch: list[Packet], rng: np.random.Generator, q: int = 8) -> RlncCodedPacket:
    if not batch:
        raise ValueError("empty batch")
    coefs = rng.integers(0, 1 << q, size=len(batch), dtype=np.uint8)
    return rlnc_combine(batch, coefs, q)


class RlncDecoder:
    """Incremental Gauss-Jordan elimination on [coefficients | symbols]."""

    def __init__(self, m: int, B: int, q: int = 8):
        self.m, self.B, self.q = m, B, q
        self.gf = field(q)
        self.width = m + -(-B // q)
        self.basis = np.zeros((m, self.width), dtype=np.uint8)
        self.pivots = np.zeros(m, dtype=np.int64)
        self.rank = 0

    @property
    def complete(self) -> bool:
        return self.rank == self.m

    def push(self, pkt: RlncCodedPacket) -> bool:
        """Add a packet; returns True if it raised the rank."""
        if pkt.q != self.q or pkt.m != self.m or pkt.batch_B != self.B:
            raise ValueError("packet dimensions do not match decoder")
        if self.complete:
            return False
        row = np.concatenate([pkt.coefficients, pkt.payload])
        before = self.rank
        self.rank = _kernels.gf_insert(self.basis, self.pivots, self.rank, row,
                                       self.m, self.gf.mul, self.gf.inv)
        return self.rank > before

    def push_coefficients(self, coefs: np.ndarray) -> bool:
        """Rank-only update (payload treated as zero)."""
        row = np.zeros(self.width, dtype=np.uint8)
        row[:self.m] = coefs
        before = self.rank
        if not self.complete:
            self.rank = _kernels.gf_insert(self.basis, self.pivots, self.rank, row,
                                           self.m, self.gf.mul, self.gf.inv)
        return self.rank > before

    def packets(self) -> list[Packet]:
        if not self.complete:
            raise RankDeficientError(self.rank, self.m)
        out = [None] * self.m
        for k in range(self.m):
            col = int(self.pivots[k])
            out[col] = Packet(bits_from_symbols(self.basis[k, self.m:], self.q, self.B), col + 1)
        return out


def rlnc_decode(pkts: list[RlncCodedPacket], m: int, B: int) -> list[Packet]:
    if not pkts:
        raise RankDeficientError(0, m)
    qs = {p.q for p in pkts}
    if len(qs) != 1:
        raise ValueError("packets use different fields")
    dec = RlncDecoder(m, B, qs.pop())
    for p in pkts:
        dec.push(p)
    return dec.packets()


def rank_product(m: int, q: int = 1) -> float:
    """P(m uniform random vectors over GF(2^q)^m are independent)."""
    out = 1.0
    for i in range(1, m + 1):
        out *= 1.0 - 2.0 ** (-q * i)
    return out
