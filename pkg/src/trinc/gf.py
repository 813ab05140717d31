"""GF(2^q) arithmetic for q in {1, 4, 8} via full multiplication tables."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

# x^8+x^4+x^3+x+1, x^4+x+1, and the trivial field
POLYS = {1: 0b11, 4: 0b10011, 8: 0x11B}


def clmul_mod(x: int, y: int, q: int) -> int:
    """Shift-and-add product reduced by the field polynomial."""
    poly = POLYS[q]
    out = 0
    while y:
        if y & 1:
            out ^= x
        y >>= 1
        x <<= 1
        if x >> q:
            x ^= poly
    return out


class GF:
    def __init__(self, q: int):
        if q not in POLYS:
            raise ValueError(f"unsupported field exponent q={q}")
        self.q = q
        self.order = 1 << q
        size = self.order
        mul = np.zeros((size, size), dtype=np.uint8)
        for x in range(size):
            for y in range(x, size):
                mul[x, y] = mul[y, x] = clmul_mod(x, y, q)
        self.mul = mul
        inv = np.zeros(size, dtype=np.uint8)
        for x in range(1, size):
            inv[x] = int(np.flatnonzero(mul[x] == 1)[0])
        self.inv = inv

    def check(self, *xs):
        for x in xs:
            if not 0 <= int(x) < self.order:
                raise ValueError(f"{x} is not an element of GF(2^{self.q})")

    def add(self, x: int, y: int) -> int:
        self.check(x, y)
        return int(x) ^ int(y)

    def mul_(self, x: int, y: int) -> int:
        self.check(x, y)
        return int(self.mul[x, y])

    def inverse(self, x: int) -> int:
        self.check(x)
        if x == 0:
            raise ZeroDivisionError("0 has no inverse")
        return int(self.inv[x])


@lru_cache(maxsize=None)
def field(q: int) -> GF:
    return GF(q)


def gf_mul(x: int, y: int, q: int = 8) -> int:
    return field(q).mul_(x, y)


def gf_add(x: int, y: int, q: int = 8) -> int:
    return field(q).add(x, y)


def gf_inv(x: int, q: int = 8) -> int:
    return field(q).inverse(x)


class GfElement:
    __slots__ = ("value", "q")

    def __init__(self, value: int, q: int = 8):
        field(q).check(value)
        self.value = int(value)
        self.q = q

    def _same(self, other):
        if not isinstance(other, GfElement):
            raise TypeError(f"cannot combine GfElement with {type(other).__name__}")
        if other.q != self.q:
            raise ValueError(f"GF(2^{self.q}) and GF(2^{other.q}) elements do not mix")
        return other

    def __add__(self, other):
        other = self._same(other)
        return GfElement(self.value ^ other.value, self.q)

    def __mul__(self, other):
        other = self._same(other)
        return GfElement(field(self.q).mul_(self.value, other.value), self.q)

    def inverse(self):
        return GfElement(field(self.q).inverse(self.value), self.q)

    def __eq__(self, other):
        return isinstance(other, GfElement) and (self.value, self.q) == (other.value, other.q)

    def __hash__(self):
        return hash((self.value, self.q))

    def __repr__(self):
        return f"GfElement({self.value:#x}, q={self.q})"
