"""Exhaustive property suites over small batch sizes, shared by the CLI and tests."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .codec import CodedPacket, Decoder
from .ids import group_ids, ids_needed
from .oracle import bit_solvable, lambda_rank, lemma2_condition


@dataclass
class SuiteResult:
    name: str
    checks: int = 0
    failures: list = field(default_factory=list)   # offending id lists

    @property
    def ok(self) -> bool:
        return not self.failures

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        text = f"{status} {self.name}: {self.checks} checks, {len(self.failures)} failures"
        if self.failures:
            text += "; first counterexample " + " ".join(map(str, self.failures[0]))
        return text


def peel_solved(m: int, B: int, ids) -> int:
    """Bits recovered by the peeling decoder from the given ids (payloads are irrelevant)."""
    dec = Decoder(m, B)
    for t in ids:
        dec.absorb(CodedPacket(t, np.zeros(B + t.r_max, dtype=np.uint8), B))
    return dec.n_solved


def group_rank(m_max: int, rounds=(1, 2)) -> SuiteResult:
    """Each complete group of m-1 rotations has rank m-1."""
    res = SuiteResult("group-rank")
    for m in range(2, m_max + 1):
        for rho in rounds:
            for g in range(m):
                grp = group_ids(m, rho, g)
                res.checks += 1
                if lambda_rank(grp) != m - 1:
                    res.failures.append(grp)
    return res


def group_plus_one(m_max: int) -> SuiteResult:
    """A round-1 group plus any other id from rounds 1-2 has full rank, and the
    closed-form independence test agrees."""
    res = SuiteResult("group-plus-one")
    for m in range(2, m_max + 1):
        pool = ids_needed(m, 2 * m * (m - 1))
        for g in range(m):
            grp = group_ids(m, 1, g)
            for probe in pool:
                if probe in grp:
                    continue
                res.checks += 1
                full = lambda_rank(grp + [probe]) == m
                if not full or lemma2_condition(grp, probe) != full:
                    res.failures.append(grp + [probe])
    return res


def window_rank(m_max: int) -> SuiteResult:
    """Every run of m consecutive ids among the first two rounds has rank m."""
    res = SuiteResult("window-rank")
    for m in range(2, m_max + 1):
        pool = ids_needed(m, 2 * m * (m - 1))
        for s in range(len(pool) - m + 1):
            res.checks += 1
            if lambda_rank(pool[s:s + m]) != m:
                res.failures.append(pool[s:s + m])
    return res


def first_m_decode(m_max: int, widths=(1, 7, 64)) -> SuiteResult:
    """The first m ids peel to completion and GF(2) elimination agrees."""
    res = SuiteResult("first-m-decode")
    for m in range(2, m_max + 1):
        ids = ids_needed(m, m)
        for B in widths:
            res.checks += 1
            if peel_solved(m, B, ids) != m * B or not bit_solvable(m, B, ids):
                res.failures.append(ids)
    return res


def subset_rank(m_max: int, exhaustive_upto: int = 5, samples: int = 10_000,
                seed: int = 0, stop_after: int | None = None) -> SuiteResult:
    """Every subset of up to m ids from the first two rounds has full rank.

    Exhaustive for m <= ``exhaustive_upto``, ``samples`` random subsets per m
    beyond.  Known to fail from m = 3 on; it is reported, not assumed.
    ``stop_after`` ends the scan once that many counterexamples are in hand.
    """
    res = SuiteResult("subset-rank")
    rng = np.random.default_rng(seed)

    def check(sub):
        res.checks += 1
        if lambda_rank(sub) != len(sub):
            res.failures.append(list(sub))
        return stop_after is not None and len(res.failures) >= stop_after

    for m in range(2, m_max + 1):
        pool = ids_needed(m, 2 * m * (m - 1))
        if m <= exhaustive_upto:
            for n in range(1, m + 1):
                for sub in combinations(pool, n):
                    if check(sub):
                        return res
        else:
            for _ in range(samples):
                n = int(rng.integers(1, m + 1))
                pick = sorted(rng.choice(len(pool), size=n, replace=False))
                if check([pool[i] for i in pick]):
                    return res
    return res


def window_decode(m_max: int, widths=(1, 7, 64)) -> SuiteResult:
    """Every run of m consecutive ids peels to completion."""
    res = SuiteResult("window-decode")
    for m in range(2, m_max + 1):
        pool = ids_needed(m, 2 * m * (m - 1))
        for s in range(len(pool) - m + 1):
            for B in widths:
                res.checks += 1
                if peel_solved(m, B, pool[s:s + m]) != m * B:
                    res.failures.append(pool[s:s + m])
    return res


DEFAULT_SUITES = (group_rank, group_plus_one, window_rank, first_m_decode)
EXTRA_SUITES = (subset_rank, window_decode)


def run_suites(m_max: int, exhaustive: bool = False) -> list[SuiteResult]:
    if m_max < 2:
        raise ValueError("m_max must be at least 2")
    suites = DEFAULT_SUITES + (EXTRA_SUITES if exhaustive else ())
    return [s(m_max) for s in suites]
