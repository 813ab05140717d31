"""Independent decodability checks.

Two views of a set of ids: the integer coefficient matrix with entries
``2**(r_max - r_m)`` (linear independence in ordinary arithmetic) and the
full GF(2) bit-level system solved by Gaussian elimination.  Neither shares
code with the peeling decoder.
"""

from __future__ import annotations

import numpy as np

from .ids import TriId

MAX_ORACLE_M = 16


def _check_ids(ids) -> int:
    ids = list(ids)
    if not ids:
        raise ValueError("no ids given")
    ms = {t.m for t in ids}
    if len(ms) != 1:
        raise ValueError(f"mixed batch sizes {sorted(ms)}")
    m = ms.pop()
    if m > MAX_ORACLE_M:
        raise ValueError(f"oracle is limited to m <= {MAX_ORACLE_M}")
    return m


def lambda_row(tri_id: TriId) -> list[int]:
    rmax = tri_id.r_max
    return [1 << (rmax - x) for x in tri_id.r]


def lambda_matrix(ids) -> list[list[int]]:
    _check_ids(ids)
    return [lambda_row(t) for t in ids]


def integer_rank(rows: list[list[int]]) -> int:
    """Exact rank via fraction-free (Bareiss) elimination."""
    a = [list(r) for r in rows]
    if not a:
        return 0
    n, w = len(a), len(a[0])
    rank, prev = 0, 1
    for c in range(w):
        piv = next((i for i in range(rank, n) if a[i][c]), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        p = a[rank][c]
        for i in range(rank + 1, n):
            f = a[i][c]
            a[i] = [(p * x - f * y) // prev for x, y in zip(a[i], a[rank])]
        prev = p
        rank += 1
        if rank == n:
            break
    return rank


def lambda_rank(ids) -> int:
    return integer_rank(lambda_matrix(ids))


def lemma2_condition(group: list[TriId], probe: TriId) -> bool:
    """Whether ``probe`` is independent of a complete group.

    The rows of a complete group with anchor value ``A`` and off-anchor value
    sum ``S`` span the hyperplane orthogonal to ``(S, -A, ..., -A)`` (anchor
    first), so the probe is independent iff ``S * lam_anchor != A * sum(rest)``.
    For round-1 groups this is ``2^(M-1) * sum(rest) != (2^(M-1) - 1) * lam_1``.
    """
    m = _check_ids(list(group) + [probe])
    first = group[0]
    if sorted(t.rotation for t in group) != list(range(m - 1)) or any(
            (t.round, t.group) != (first.round, first.group) for t in group):
        raise ValueError("group must be all m-1 rotations of one (round, anchor)")
    if probe in group:
        raise ValueError("probe belongs to the group")
    g = first.group
    anchor_value = 1 << first.r_max
    off_sum = sum(v for i, v in enumerate(lambda_row(first)) if i != g)
    lam = lambda_row(probe)
    return off_sum * lam[g] != anchor_value * (sum(lam) - lam[g])


def bit_rows(m: int, B: int, ids) -> list[int]:
    """Column equations as integer bitsets; unknown (packet p, bit i) is bit p*B + i."""
    rows = []
    for t in ids:
        for j in range(B + t.r_max):
            row = 0
            for p, s in enumerate(t.r):
                if 0 <= j - s < B:
                    row |= 1 << (p * B + j - s)
            rows.append(row)
    return rows


def bit_matrix(m: int, B: int, ids) -> np.ndarray:
    """Dense 0/1 view of the bit-level system (one row per coded column)."""
    _check_ids(ids)
    rows = bit_rows(m, B, ids)
    out = np.zeros((len(rows), m * B), dtype=np.uint8)
    for k, row in enumerate(rows):
        for u in range(m * B):
            out[k, u] = (row >> u) & 1
    return out


def _reduce(rows):
    basis: dict[int, int] = {}
    for row in rows:
        while row:
            h = row.bit_length() - 1
            if h in basis:
                row ^= basis[h]
            else:
                basis[h] = row
                break
    return basis


def bit_rank(m: int, B: int, ids) -> int:
    _check_ids(ids)
    return len(_reduce(bit_rows(m, B, ids)))


def bit_solvable(m: int, B: int, ids) -> bool:
    ids = list(ids)
    _check_ids(ids)
    if sum(B + t.r_max for t in ids) < m * B:
        return False
    return bit_rank(m, B, ids) == m * B


def determined_unknowns(m: int, B: int, ids) -> int:
    """How many individual bits the system pins down (unit vectors in the row space)."""
    _check_ids(ids)
    basis = _reduce(bit_rows(m, B, ids))
    # back-substitute to reduced echelon form, lowest pivots first
    for h in sorted(basis):
        row = basis[h]
        for h2 in sorted(basis):
            if h2 >= h:
                break
            if (row >> h2) & 1:
                row ^= basis[h2]
        basis[h] = row
    return sum(1 for row in basis.values() if row & (row - 1) == 0)
