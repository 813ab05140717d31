"""Monte Carlo multicast over independent Bernoulli erasure channels.

One transmitter sends a batch of ``m`` packets to ``N`` receivers until every
receiver can rebuild the batch.  Trial ``i`` draws all randomness from
``numpy.random.default_rng(trial_seed(master_seed, i))``: per block of transmissions,
first the erasure matrix, then (RLNC only) the coefficient matrix.
"""

from __future__ import annotations

import io
import math
import warnings
from functools import lru_cache
from dataclasses import dataclass, field

import numpy as np

from .analysis import LossProfile, expected_tx_approx, expected_tx_exact
from .codec import CodedPacket, Decoder
from .ids import id_at
from .rlnc import RlncDecoder

SCHEMES = ("triangular", "rlnc", "arq-roundrobin", "oracle-perfect")
_ALIASES = {"arq": "arq-roundrobin", "oracle": "oracle-perfect"}
_BLOCK = 64
_MASK64 = (1 << 64) - 1
SEED_RULE = ("trial i uses default_rng(H(master_seed) XOR i), "
             "H(s) = SeedSequence(s).generate_state(1, uint64)[0]")


@lru_cache(maxsize=64)
def _scramble(master_seed: int) -> int:
    # plain master_seed ^ i would make seeds 0 and 5 share most trial streams
    ss = np.random.SeedSequence(master_seed & _MASK64)
    return int(ss.generate_state(1, np.uint64)[0])


def trial_seed(master_seed: int, index: int) -> int:
    return _scramble(master_seed) ^ index


def default_payload_bits(m: int) -> int:
    """Smallest multiple of 8 (at least 64) above (m - 1)**2.

    n coded packets carry n*(B + r_max) equations.  Finishing before
    transmission m means n <= m - 1 packets, all from round 1 (r_max = m - 1),
    which B > (m - 1)**2 makes too few for the m*B unknowns.
    """
    need = (m - 1) ** 2 + 1
    return max(64, -(-need // 8) * 8)


@dataclass(frozen=True)
class SimConfig:
    m: int
    profile: LossProfile
    scheme: str = "triangular"
    q: int = 8
    B: int | None = None
    trials: int = 1000
    master_seed: int = 0
    max_tx: int | None = None

    def __post_init__(self):
        scheme = _ALIASES.get(self.scheme, self.scheme)
        if scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        object.__setattr__(self, "scheme", scheme)
        if not isinstance(self.profile, LossProfile):
            object.__setattr__(self, "profile", LossProfile(tuple(self.profile)))
        if self.m < 1 or (scheme == "triangular" and self.m < 2):
            raise ValueError("batch size too small for this scheme")
        if self.trials < 1:
            raise ValueError("trials must be positive")
        if self.max_tx is not None and self.max_tx < self.m:
            raise ValueError("max_tx must be at least m")

    @property
    def payload_bits(self) -> int:
        return self.B if self.B is not None else default_payload_bits(self.m)

    @property
    def bound(self) -> float:
        p = self.profile
        return expected_tx_approx(p.p_max, p.k, self.m)

    @property
    def tx_cap(self) -> int:
        return self.max_tx if self.max_tx is not None else math.ceil(50 * self.bound)


_INT_KEYS = {"m", "n", "q", "B", "trials", "seed", "max_tx"}


def parse_config_text(text: str) -> dict:
    """Read ``key=value`` lines ('#' starts a comment) into typed values.

    Keys: scheme, m, n, p, profile (comma list), q, B, trials, seed, max_tx.
    """
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (part.strip() for part in line.partition("="))
        if not sep or not key:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        if key in _INT_KEYS:
            out[key] = int(value)
        elif key == "p":
            out[key] = float(value)
        elif key == "profile":
            out[key] = tuple(float(x) for x in value.split(",") if x.strip())
        elif key == "scheme":
            out[key] = value
        else:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
    return out


def config_from_mapping(d: dict) -> SimConfig:
    """Build a SimConfig from parse_config_text output (or CLI flags)."""
    if "profile" in d:
        profile = LossProfile(tuple(d["profile"]))
    elif "p" in d and "n" in d:
        profile = LossProfile.homogeneous(d["p"], d["n"])
    else:
        raise ValueError("need either profile or both p and n")
    if "m" not in d:
        raise ValueError("m is required")
    return SimConfig(d["m"], profile, d.get("scheme", "triangular"), q=d.get("q", 8),
                     B=d.get("B"), trials=d.get("trials", 1000),
                     master_seed=d.get("seed", 0), max_tx=d.get("max_tx"))


@dataclass
class SimReport:
    config: SimConfig
    T: np.ndarray               # per trial; -1 where aborted
    completion: np.ndarray      # (trials, N) transmission index of completion, 0 if never
    aborted: np.ndarray
    encoder_ops: int
    decoder_ops: int
    G: float
    L: float
    max_round: int = 0
    metadata: dict = field(default_factory=dict)

    @property
    def samples(self) -> np.ndarray:
        return self.T[~self.aborted]

    @property
    def mean_T(self) -> float:
        return float(self.samples.mean()) if len(self.samples) else math.nan

    @property
    def std_T(self) -> float:
        s = self.samples
        return float(s.std(ddof=1)) if len(s) > 1 else 0.0

    @property
    def ci95(self) -> float:
        """Half-width of the normal 95% interval on mean_T."""
        n = len(self.samples)
        return 1.96 * self.std_T / math.sqrt(n) if n else math.nan


class _Receivers:
    """Decoder-backed receivers (triangular, RLNC) for one trial."""

    def __init__(self, cfg: SimConfig, shared: dict):
        self.cfg = cfg
        self.n = cfg.profile.n
        self.shared = shared
        self.ops = 0
        m = cfg.m
        if cfg.scheme == "triangular":
            self.decs = [Decoder(m, cfg.payload_bits) for _ in range(self.n)]
        elif cfg.scheme == "rlnc":
            # payload is irrelevant to rank; one symbol keeps rows short
            self.decs = [RlncDecoder(m, 1, cfg.q) for _ in range(self.n)]

    def deliver(self, k: int, t: int, coefs=None) -> bool:
        """Receiver k got transmission t (1-based); return True once complete."""
        cfg = self.cfg
        if cfg.scheme == "triangular":
            dec = self.decs[k]
            before = dec.ops
            dec.absorb(self.shared_packet(t))
            self.ops += dec.ops - before
            return dec.complete
        dec = self.decs[k]
        dec.push_coefficients(coefs)
        self.ops += cfg.m * cfg.m
        return dec.complete

    def shared_packet(self, t: int) -> CodedPacket:
        cache = self.shared.setdefault("packets", [])
        B = self.cfg.payload_bits
        while len(cache) < t:
            tid = id_at(self.cfg.m, len(cache) + 1)
            cache.append(CodedPacket(tid, np.zeros(B + tid.r_max, dtype=np.uint8), B))
        return cache[t - 1]


def _counting_trial(cfg: SimConfig, rng, probs):
    """oracle-perfect and ARQ need no decoder: completion follows from the
    erasure matrix alone, scanned one block at a time."""
    n = len(probs)
    cap = cfg.tx_cap
    completion = np.zeros(n, dtype=np.int64)
    got = np.zeros(n, dtype=np.int64) if cfg.scheme == "oracle-perfect" else None
    have = np.zeros((n, cfg.m), dtype=bool) if got is None else None
    start = 0
    while (completion == 0).any() and start < cap:
        hits = rng.random((_BLOCK, n)) >= probs
        t = np.arange(start + 1, start + _BLOCK + 1)
        if got is not None:
            total = got[None, :] + np.cumsum(hits, axis=0)
            reached = total >= cfg.m
        else:
            slot = (t - 1) % cfg.m
            reached = np.zeros_like(hits)
            for row in range(_BLOCK):
                have[hits[row], slot[row]] = True
                reached[row] = have.all(axis=1)
        first = np.where(reached.any(axis=0), t[reached.argmax(axis=0)], 0)
        completion = np.where(completion == 0, first, completion)
        if got is not None:
            got = total[-1]
        start += _BLOCK
    completion[completion > cap] = 0
    if (completion == 0).any():
        return -1, completion, 0, 0
    return int(completion.max()), completion, 0, 0


def _trial(cfg: SimConfig, index: int, shared: dict):
    rng = np.random.default_rng(trial_seed(cfg.master_seed, index))
    probs = np.asarray(cfg.profile.probs)
    if cfg.scheme in ("oracle-perfect", "arq-roundrobin"):
        return _counting_trial(cfg, rng, probs)
    n = len(probs)
    rx = _Receivers(cfg, shared)
    completion = np.zeros(n, dtype=np.int64)
    pending = n
    cap = cfg.tx_cap
    t = 0
    enc_ops = 0
    while pending:
        hits = rng.random((_BLOCK, n)) >= probs
        coefs = (rng.integers(0, 1 << cfg.q, size=(_BLOCK, cfg.m), dtype=np.uint8)
                 if cfg.scheme == "rlnc" else None)
        for row in range(_BLOCK):
            t += 1
            if t > cap:
                return -1, completion, enc_ops, rx.ops
            if cfg.scheme == "triangular":
                enc_ops += cfg.m * cfg.payload_bits
            elif cfg.scheme == "rlnc":
                enc_ops += cfg.m * -(-cfg.payload_bits // cfg.q)
            for k in np.flatnonzero(hits[row] & (completion == 0)):
                if rx.deliver(k, t, None if coefs is None else coefs[row]):
                    completion[k] = t
                    pending -= 1
            if not pending:
                break
    return t, completion, enc_ops, rx.ops


def run(cfg: SimConfig) -> SimReport:
    shared: dict = {}
    T = np.zeros(cfg.trials, dtype=np.int64)
    comp = np.zeros((cfg.trials, cfg.profile.n), dtype=np.int64)
    enc = dec = 0
    for i in range(cfg.trials):
        T[i], comp[i], e, d = _trial(cfg, i, shared)
        enc += e
        dec += d
    aborted = T < 0
    if aborted.any():
        warnings.warn(f"{int(aborted.sum())} trial(s) hit max_tx={cfg.tx_cap} and "
                      "were excluded from the mean", RuntimeWarning, stacklevel=2)
    max_round = 0
    if cfg.scheme == "triangular" and (~aborted).any():
        max_round = id_at(cfg.m, int(T[~aborted].max())).round
    meta = {
        "seed_rule": SEED_RULE,
        "schedule": ("ids sent in sequence order a = 1, 2, ... without feedback"
                     if cfg.scheme == "triangular" else cfg.scheme),
        "payload_bits": cfg.payload_bits,
        "below_m": int(((T < cfg.m) & ~aborted).sum()),
    }
    p = cfg.profile
    return SimReport(cfg, T, comp, aborted, enc, dec, cfg.bound,
                     expected_tx_exact(p, cfg.m), max_round, meta)


def _fmt(x: float) -> str:
    return f"{x:.6g}"


SWEEP_HEADER = "scheme,M,N,p,q_or_alpha,mean_T,ci95,G,note"


def report_row(rep: SimReport) -> str:
    """One CSV row (no newline) in SWEEP_HEADER order."""
    cfg = rep.config
    p = cfg.profile
    if cfg.scheme == "rlnc":
        qa = str(cfg.q)
    elif cfg.scheme == "triangular":
        qa = str(rep.max_round)
    else:
        qa = ""
    note = f"{int(rep.aborted.sum())} aborted" if rep.aborted.any() else ""
    return (f"{cfg.scheme},{cfg.m},{p.n},{_fmt(p.p_max)},{qa},"
            f"{_fmt(rep.mean_T)},{_fmt(rep.ci95)},{_fmt(rep.G)},{note}")


def sweep(configs: list[SimConfig]) -> str:
    if not configs:
        raise ValueError("no configurations to run")
    buf = io.StringIO()
    buf.write(SWEEP_HEADER + "\n")
    for cfg in configs:
        p = cfg.profile
        try:
            rep = run(cfg)
        except Exception as exc:  # one bad config must not sink the sweep
            buf.write(f"{cfg.scheme},{cfg.m},{p.n},{_fmt(p.p_max)},,,,,"
                      f"error: {type(exc).__name__}\n")
            continue
        buf.write(report_row(rep) + "\n")
    return buf.getvalue()
