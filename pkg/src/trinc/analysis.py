"""Expected transmission counts, round selection and header overhead."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

# round, group and rotation fields of the compact wire header
COMPACT_INDEX_BITS = 48

SCHEMES = ("rlnc", "dlnc", "sparse", "xor", "triangular", "triangular-compact")


@dataclass(frozen=True)
class LossProfile:
    probs: tuple[float, ...]

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probs)
        if not probs:
            raise ValueError("need at least one receiver")
        if any(not 0.0 <= p < 1.0 for p in probs):
            raise ValueError("loss probabilities must lie in [0, 1)")
        object.__setattr__(self, "probs", probs)

    @classmethod
    def homogeneous(cls, p: float, n: int) -> "LossProfile":
        return cls((p,) * n)

    @property
    def n(self) -> int:
        return len(self.probs)

    @property
    def p_max(self) -> float:
        return max(self.probs)

    @property
    def k(self) -> int:
        return sum(1 for p in self.probs if p == self.p_max)


def _tail_terms(probs: np.ndarray, m: int, n: np.ndarray) -> np.ndarray:
    """1 - prod_j P(Bin(n, 1 - p_j) >= m) for each n in the array.

    The per-receiver lower tail P(Bin(n, 1 - p_j) < m) comes from the
    regularized incomplete beta, which keeps relative accuracy deep in the
    tail where a running subtraction would stall near 1e-10.
    """
    short = special.bdtr(m - 1, n[:, None], 1.0 - probs[None, :])
    short = np.where(n[:, None] < m, 1.0, short)
    with np.errstate(divide="ignore"):
        # 1 - prod(1 - short) without cancellation when every short is tiny
        return -np.expm1(np.log1p(-short).sum(axis=1))


def _sum_series(probs, m: int, epsilon: float, chunk: int = 512) -> float:
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if m < 1:
        raise ValueError("batch size must be positive")
    probs = np.asarray(probs, dtype=float)
    total = 0.0
    start = 0
    while True:
        n = np.arange(start, start + chunk)
        terms = _tail_terms(probs, m, n)
        stop = np.flatnonzero((n >= m) & (terms < epsilon))
        if len(stop):
            return total + float(terms[:stop[0]].sum())
        total += float(terms.sum())
        start += chunk


def expected_tx_exact(profile: LossProfile, m: int, epsilon: float = 1e-12) -> float:
    """Mean transmissions until every receiver holds m innovative packets."""
    return _sum_series(profile.probs, m, epsilon)


def expected_tx_approx(p: float, k: int, m: int, epsilon: float = 1e-12) -> float:
    """Same bound keeping only the k receivers at the worst loss rate p."""
    if not 0.0 <= p < 1.0:
        raise ValueError("p must lie in [0, 1)")
    if k < 1:
        raise ValueError("k must be positive")
    return _sum_series([p] * k, m, epsilon)


def alpha_required(p: float, k: int, m: int) -> int:
    """Smallest round count whose ids cover the expected transmission count."""
    if m < 2:
        raise ValueError("m must be at least 2")
    need = math.ceil(expected_tx_approx(p, k, m) - 1e-9)
    return max(1, -(-need // (m * (m - 1))))


@dataclass(frozen=True)
class OverheadReport:
    scheme: str
    bits: int
    m: int
    n: int | None = None
    q: int | None = None
    alpha: int | None = None
    degenerate: bool = False
    note: str = ""


def _clog2(x: int) -> int:
    return (x - 1).bit_length() if x > 0 else 0


def overhead_bits(scheme: str, m: int, n: int | None = None, q: int | None = None,
                  alpha: int = 1) -> OverheadReport:
    if scheme == "rlnc":
        if not q or q < 1:
            raise ValueError("rlnc overhead needs q >= 1")
        return OverheadReport(scheme, m * q, m, n, q)
    if scheme in ("dlnc", "sparse"):
        if n is None or n < 2:
            raise ValueError(f"{scheme} overhead needs n >= 2 receivers")
        return OverheadReport(scheme, m * _clog2(n), m, n, q)
    if scheme == "xor":
        return OverheadReport(scheme, m, m, n, q)
    if scheme in ("triangular", "triangular-compact"):
        if m < 2 or alpha < 1:
            raise ValueError("triangular overhead needs m >= 2 and alpha >= 1")
        r_max = alpha * (m - 1)
        if scheme == "triangular-compact":
            return OverheadReport(scheme, r_max + COMPACT_INDEX_BITS, m, n, q, alpha,
                                  note="padding + round/group/rotation fields")
        return OverheadReport(
            scheme, r_max + m * _clog2(r_max), m, n, q, alpha,
            degenerate=r_max == 1,
            note="id fields sized ceil(log2 r_max); the wire uses ceil(log2(r_max+1))")
    raise ValueError(f"unknown scheme {scheme!r}")


def overhead_sweep(m_range, n: int, p: float, q: int) -> list[OverheadReport]:
    ms = list(m_range)
    if not ms:
        raise ValueError("empty batch-size range")
    rows = []
    for m in ms:
        alpha = alpha_required(p, n, m)
        for scheme in SCHEMES:
            rows.append(overhead_bits(scheme, m, n, q, alpha))
    return rows


def overhead_csv(rows: list[OverheadReport], p: float) -> str:
    buf = io.StringIO()
    buf.write("scheme,M,N,p,q,alpha,bits\n")
    for r in rows:
        alpha = r.alpha if r.scheme.startswith("triangular") else ""
        buf.write(f"{r.scheme},{r.m},{r.n},{p:g},{r.q},{alpha},{r.bits}\n")
    return buf.getvalue()
