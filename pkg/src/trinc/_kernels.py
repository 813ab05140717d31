"""Hot loops shared by the codecs and the simulator.

Compiled with numba when it is importable; the same functions run as plain
Python otherwise (correct, just slow).
"""

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - exercised only without numba
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f

OK = 0
CONTRADICTION = 1


@njit(cache=True)
def add_packet(k, shifts, offs, payload, cnt, xs, val, solved, bits, B, m, stack, top):
    """Build the column equations of packet ``k`` against current knowledge.

    Returns (top, ops, status).  Known bits are folded into the equation value
    immediately; only unknown bits are counted.
    """
    base = offs[k]
    length = offs[k + 1] - base
    ops = 0
    for j in range(length):
        cnt[base + j] = 0
        xs[base + j] = 0
        val[base + j] = payload[j]
    for mi in range(m):
        s = shifts[k, mi]
        for i in range(B):
            u = mi * B + i
            e = base + i + s
            # unsolved bits are stored as 0, so this is branch-free
            free = 1 - solved[u]
            val[e] ^= bits[u]
            cnt[e] += free
            xs[e] ^= u * free
        ops += B
    for j in range(length):
        e = base + j
        if cnt[e] == 1:
            stack[top] = e
            top += 1
        elif cnt[e] == 0 and val[e] != 0:
            return top, ops, CONTRADICTION
    return top, ops, OK


@njit(cache=True)
def peel(npk, shifts, offs, cnt, xs, val, solved, bits, B, stack, top):
    """Run single-unknown substitution to a fixpoint.

    Returns (newly_solved, ops, status).
    """
    newly = 0
    ops = 0
    while top > 0:
        top -= 1
        e = stack[top]
        if cnt[e] != 1:
            continue
        u = xs[e]
        v = val[e]
        mi = u // B
        i = u - mi * B
        solved[u] = 1
        bits[u] = v
        newly += 1
        for b in range(npk):
            kk = offs[b] + i + shifts[b, mi]
            cnt[kk] -= 1
            xs[kk] ^= u
            val[kk] ^= v
            ops += 1
            if cnt[kk] == 1:
                stack[top] = kk
                top += 1
            elif cnt[kk] == 0 and val[kk] != 0:
                return newly, ops, CONTRADICTION
    return newly, ops, OK


@njit(cache=True)
def absorb(k, shifts, offs, payload, cnt, xs, val, solved, bits, B, m, stack):
    """add_packet followed by peel in one call.

    Returns (newly_solved, ops, status).
    """
    top, ops, status = add_packet(k, shifts, offs, payload, cnt, xs, val,
                                  solved, bits, B, m, stack, 0)
    if status != OK:
        return 0, ops, status
    newly, more, status = peel(k + 1, shifts, offs, cnt, xs, val, solved,
                               bits, B, stack, top)
    return newly, ops + more, status


@njit(cache=True)
def gf_insert(basis, pivots, rank, row, ncoef, mul, inv):
    """Insert ``row`` into a fully reduced row-echelon basis over GF(2^q).

    ``basis[:rank]`` is kept in reduced form with leading coefficient 1 at
    ``pivots[:rank]``.  Only the first ``ncoef`` entries are eligible pivots;
    the rest ride along (payload symbols).  Returns the new rank.
    """
    width = row.shape[0]
    for k in range(rank):
        f = row[pivots[k]]
        if f != 0:
            for c in range(width):
                row[c] ^= mul[f, basis[k, c]]
    p = -1
    for c in range(ncoef):
        if row[c] != 0:
            p = c
            break
    if p < 0:
        return rank
    f = inv[row[p]]
    for c in range(width):
        row[c] = mul[f, row[c]]
    for k in range(rank):
        g = basis[k, p]
        if g != 0:
            for c in range(width):
                basis[k, c] ^= mul[g, row[c]]
    for c in range(width):
        basis[rank, c] = row[c]
    pivots[rank] = p
    return rank + 1


@njit(cache=True)
def gf_mix(coefs, symbols, mul):
    """XOR-sum of coefs[m] * symbols[m, :] over GF(2^q)."""
    out = np.zeros(symbols.shape[1], dtype=np.uint8)
    for mi in range(symbols.shape[0]):
        g = coefs[mi]
        if g != 0:
            for s in range(symbols.shape[1]):
                out[s] ^= mul[g, symbols[mi, s]]
    return out
