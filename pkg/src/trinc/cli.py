"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 runtime or data error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from . import analysis, sim, wire
from .bits import from_bytes, to_bytes
from .codec import (CodedPacket, DecodeError, InsufficientPacketsError, Packet,
                    StallError, decode_all, encode)
from .ids import id_at
from .rlnc import RankDeficientError, RlncCodedPacket, rlnc_decode
from .verify import run_suites

SEED_ENV = "TRINC_SEED"
EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _prob(text: str) -> float:
    try:
        p = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 <= p < 1:
        raise argparse.ArgumentTypeError(f"loss probability must be in [0, 1), got {p}")
    return p


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive, got {v}")
    return v


def _batch(text: str) -> int:
    v = _positive(text)
    if v < 2:
        raise argparse.ArgumentTypeError("coded batches need M >= 2")
    return v


def _profile(text: str) -> tuple[float, ...]:
    return tuple(_prob(x) for x in text.split(",") if x.strip())


def _m_range(text: str) -> range:
    try:
        lo, hi, step = (int(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError("expected LO:HI:STEP") from None
    if lo < 1 or hi < lo or step < 1:
        raise argparse.ArgumentTypeError(f"bad range {text!r}")
    return range(lo, hi + 1, step)


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV, "0")
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV}={raw!r} is not an integer") from None


# -- subcommands ---------------------------------------------------------------

def cmd_idgen(args) -> int:
    for a in range(1, args.count + 1):
        t = id_at(args.m, a)
        if args.format == "csv":
            print(f"{a},{t.round},{t.group},{t.rotation},{t}")
        else:
            print(f"a={a} round={t.round} group={t.group} rotation={t.rotation} r={t}")
    return EXIT_OK


def _sidecar(path: Path) -> Path:
    return path.with_name(path.name + ".json")


def cmd_encode(args) -> int:
    data = Path(args.inp).read_bytes()
    chunk = max(1, math.ceil(len(data) / args.m))
    padded = data.ljust(chunk * args.m, b"\0")
    B = 8 * chunk
    batch = [Packet(from_bytes(padded[i * chunk:(i + 1) * chunk]), i + 1)
             for i in range(args.m)]
    frame = wire.serialize(encode(batch, id_at(args.m, args.seq)), args.mode)
    out = Path(args.out)
    out.write_bytes(frame)
    _sidecar(out).write_text(json.dumps({"length": len(data), "m": args.m, "B": B}) + "\n")
    print(f"wrote {len(frame)} bytes (id {args.seq}: {id_at(args.m, args.seq)}) to {out}")
    return EXIT_OK


def cmd_decode(args) -> int:
    pkts = [wire.parse(Path(f).read_bytes()) for f in args.inp]
    kinds = {type(p) for p in pkts}
    if len(kinds) > 1:
        raise DecodeError("mixed triangular and RLNC frames")
    ms = {p.id.m if isinstance(p, CodedPacket) else p.m for p in pkts}
    Bs = {p.batch_B for p in pkts}
    if ms != {args.m}:
        raise DecodeError(f"frames carry M={sorted(ms)}, expected {args.m}")
    if len(Bs) != 1:
        raise DecodeError(f"frames disagree on B: {sorted(Bs)}")
    B = Bs.pop()
    if kinds == {RlncCodedPacket}:
        packets = rlnc_decode(pkts, args.m, B)
    else:
        packets = decode_all(args.m, B, pkts)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for p in packets:
        (out / f"packet_{p.index}.bin").write_bytes(to_bytes(p.payload))
    side = _sidecar(Path(args.inp[0]))
    if side.exists():
        meta = json.loads(side.read_text())
        joined = b"".join(to_bytes(p.payload) for p in packets)
        (out / "decoded.bin").write_bytes(joined[:int(meta["length"])])
    print(f"decoded {len(packets)} packets of {B} bits into {out}")
    return EXIT_OK


def cmd_bound(args) -> int:
    if args.exact:
        if not args.profile:
            raise UsageError("--exact needs --profile p1,p2,...")
        value = analysis.expected_tx_exact(analysis.LossProfile(args.profile), args.m)
    else:
        if args.p is None or args.k is None:
            raise UsageError("--p and --k are required without --exact")
        value = analysis.expected_tx_approx(args.p, args.k, args.m)
    print(_fmt(value))
    return EXIT_OK


def cmd_alpha(args) -> int:
    print(analysis.alpha_required(args.p, args.k, args.m))
    return EXIT_OK


def cmd_overhead(args) -> int:
    rows = analysis.overhead_sweep(args.m_range, args.n, args.p, args.q)
    sys.stdout.write(analysis.overhead_csv(rows, args.p))
    return EXIT_OK


def cmd_simulate(args) -> int:
    settings = {}
    if args.config:
        try:
            settings = sim.parse_config_text(Path(args.config).read_text())
        except ValueError as exc:
            raise UsageError(f"{args.config}: {exc}") from None
    for key in ("scheme", "m", "n", "p", "q", "B", "trials", "seed", "max_tx"):
        value = getattr(args, key)
        if value is not None:
            settings[key] = value
    settings.setdefault("seed", _default_seed())
    if "scheme" not in settings:
        raise UsageError("--scheme is required (flag or config file)")
    try:
        cfg = sim.config_from_mapping(settings)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rep = sim.run(cfg)
    print(sim.SWEEP_HEADER)
    print(sim.report_row(rep))
    return EXIT_OK


def cmd_verify(args) -> int:
    results = run_suites(args.m_max, exhaustive=args.exhaustive)
    for r in results:
        print(r.line())
    return EXIT_OK if all(r.ok for r in results) else EXIT_RUNTIME


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="trinc", description="Triangular network coding toolkit")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("idgen", help="list coefficient ids in sequence order")
    p.add_argument("--m", type=_batch, required=True)
    p.add_argument("--count", type=_positive, required=True)
    p.add_argument("--format", choices=("csv", "text"), default="csv")
    p.set_defaults(func=cmd_idgen)

    p = sub.add_parser("encode", help="encode a file into one coded frame")
    p.add_argument("--m", type=_batch, required=True)
    p.add_argument("--seq", type=_positive, required=True)
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--mode", choices=("compact", "explicit"), default="compact")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="recover the original packets from frames")
    p.add_argument("--m", type=_positive, required=True)
    p.add_argument("--in", dest="inp", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("bound", help="expected transmissions to finish a batch")
    p.add_argument("--m", type=_positive, required=True)
    p.add_argument("--p", type=_prob)
    p.add_argument("--k", type=_positive)
    p.add_argument("--exact", action="store_true")
    p.add_argument("--profile", type=_profile)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("alpha", help="smallest padding scale covering the bound")
    p.add_argument("--m", type=_batch, required=True)
    p.add_argument("--p", type=_prob, required=True)
    p.add_argument("--k", type=_positive, required=True)
    p.set_defaults(func=cmd_alpha)

    p = sub.add_parser("overhead", help="per-packet overhead sweep as CSV")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--p", type=_prob, required=True)
    p.add_argument("--q", type=_positive, default=8)
    p.add_argument("--m-range", type=_m_range, required=True)
    p.set_defaults(func=cmd_overhead)

    p = sub.add_parser("simulate", help="Monte Carlo multicast over erasure links")
    p.add_argument("--config", help="key=value file; flags override its entries")
    p.add_argument("--scheme", choices=sim.SCHEMES + tuple(sim._ALIASES))
    p.add_argument("--m", type=_positive)
    p.add_argument("--n", type=_positive)
    p.add_argument("--p", type=_prob)
    p.add_argument("--q", type=int, choices=(1, 4, 8))
    p.add_argument("--B", type=_positive)
    p.add_argument("--trials", type=_positive)
    p.add_argument("--seed", type=int, help=f"master seed (default ${SEED_ENV} or 0)")
    p.add_argument("--max-tx", type=_positive)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="exhaustive rank and decodability suites")
    p.add_argument("--m-max", type=_batch, required=True)
    p.add_argument("--exhaustive", action="store_true",
                   help="also run the all-subsets and sliding-window decode suites")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"trinc {args.command}: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StallError as exc:
        print(f"trinc {args.command}: decoding stalled: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (InsufficientPacketsError, RankDeficientError) as exc:
        print(f"trinc {args.command}: insufficient packets: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except DecodeError as exc:
        print(f"trinc {args.command}: decode error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (wire.WireError, OSError, ValueError) as exc:
        print(f"trinc {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
