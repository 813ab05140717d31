"""Triangular network coding: shift-padded XOR encoding with a peeling decoder,
plus transmission bounds, an RLNC baseline, a multicast simulator and a wire format."""

from .analysis import (LossProfile, alpha_required, expected_tx_approx,
                       expected_tx_exact, overhead_bits, overhead_sweep)
from .codec import (CodedPacket, ContradictionError, DecodeError, Decoder,
                    InsufficientPacketsError, OpCounter, Packet, StallError,
                    decode_all, encode)
from .ids import TriId, id_at, id_from_parts, ids_needed, seq_of
from .oracle import bit_rank, bit_solvable, lambda_rank
from .rlnc import RlncCodedPacket, RlncDecoder, rlnc_decode, rlnc_encode
from .sim import SimConfig, SimReport, run, sweep
from .wire import WireError, parse, serialize

__version__ = "0.1.0"
