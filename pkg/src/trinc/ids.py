"""Triangular coding coefficient ids.

A coded packet is identified by its padding vector ``r``: packet ``m`` is
shifted right by ``r[m]`` bit positions before XOR-ing.  Ids are laid out in
an unbounded sequence of rounds; each round holds ``m`` groups (one per
position of the zero anchor) of ``m - 1`` rotations.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True, slots=True)
class TriId:
    m: int
    r: tuple[int, ...]
    round: int = field(compare=False)
    group: int = field(compare=False)
    rotation: int = field(compare=False)

    @property
    def r_max(self) -> int:
        return self.round * (self.m - 1)

    @property
    def seq(self) -> int:
        """1-based position of this id in the global sequence."""
        per_round = self.m * (self.m - 1)
        return (self.round - 1) * per_round + self.group * (self.m - 1) + self.rotation + 1

    @classmethod
    def from_r(cls, r) -> "TriId":
        """Recover the full id from a padding vector, rejecting vectors the
        sequence never produces."""
        r = tuple(int(x) for x in r)
        m = len(r)
        if m < 2:
            raise ValueError("triangular ids need at least 2 packets")
        if r.count(0) != 1 or min(r) < 0:
            raise ValueError(f"{r} must hold exactly one zero and no negatives")
        group = r.index(0)
        rho = min(x for x in r if x)
        first = r[1] if group == 0 else r[0]
        if first % rho:
            raise ValueError(f"{r} is not a scaled rotation")
        t = (m - 1 - (first // rho - 1)) % (m - 1)
        candidate = _build(m, rho, group, t)
        if candidate != r:
            raise ValueError(f"{r} is not produced by the id sequence")
        return cls(m, r, rho, group, t)

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.r)) + ")"


def _build(m: int, rho: int, g: int, t: int) -> tuple[int, ...]:
    r = [0] * m
    # non-anchored positions in increasing order carry the rotated base 1..m-1
    for i, pos in enumerate(p for p in range(m) if p != g):
        r[pos] = rho * (((i - t) % (m - 1)) + 1)
    return tuple(r)


def decompose(m: int, a: int) -> tuple[int, int, int]:
    """Split sequence number ``a`` into (round, group, rotation)."""
    per_round = m * (m - 1)
    rho = (a - 1) // per_round + 1
    g, t = divmod((a - 1) % per_round, m - 1)
    return rho, g, t


def id_at(m: int, a: int) -> TriId:
    if m < 2:
        raise ValueError("batch size must be at least 2 for coded ids")
    if a < 1:
        raise ValueError("sequence numbers start at 1")
    rho, g, t = decompose(m, a)
    return TriId(m, _build(m, rho, g, t), rho, g, t)


def id_from_parts(m: int, rho: int, g: int, t: int) -> TriId:
    if m < 2:
        raise ValueError("batch size must be at least 2 for coded ids")
    if rho < 1 or not 0 <= g < m or not 0 <= t < m - 1:
        raise ValueError(f"invalid (round, group, rotation) = ({rho}, {g}, {t}) for m={m}")
    return TriId(m, _build(m, rho, g, t), rho, g, t)


def seq_of(tri_id: TriId) -> int:
    # re-validate: a hand-built TriId may carry inconsistent metadata
    return TriId.from_r(tri_id.r).seq


def ids_needed(m: int, count: int) -> list[TriId]:
    if count < 1:
        raise ValueError("count must be positive")
    return [id_at(m, a) for a in range(1, count + 1)]


def group_ids(m: int, rho: int, g: int) -> list[TriId]:
    """All ``m - 1`` rotations sharing anchor ``g`` in round ``rho``."""
    return [id_from_parts(m, rho, g, t) for t in range(m - 1)]
