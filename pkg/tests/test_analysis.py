import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import binom

from trinc.analysis import (COMPACT_INDEX_BITS, LossProfile, alpha_required,
                            expected_tx_approx, expected_tx_exact, overhead_bits,
                            overhead_csv, overhead_sweep)


def brute_tail_sum(probs, m, n_max=2000):
    """Direct sum of P(T > n) with scipy's binomial survival function."""
    total = 0.0
    for n in range(n_max):
        done = 1.0
        for p in probs:
            done *= binom.sf(m - 1, n, 1 - p)
        total += 1.0 - done
    return total


class TestBounds:
    def test_geometric(self):
        assert expected_tx_approx(0.5, 1, 1) == pytest.approx(2.0, abs=1e-9)
        assert expected_tx_exact(LossProfile((0.5,)), 1) == pytest.approx(2.0, abs=1e-9)

    def test_lossless(self):
        assert expected_tx_approx(0.0, 10, 7) == 7
        assert expected_tx_exact(LossProfile((0.0,) * 4), 9) == 9

    def test_frozen_value(self):
        # computed once with the independent brute-force sum below
        assert expected_tx_approx(0.3, 10, 10) == pytest.approx(18.54499, abs=1e-4)
        assert expected_tx_approx(0.8, 100, 5) == pytest.approx(58.0949, abs=1e-3)

    @pytest.mark.parametrize("probs, m", [((0.3,) * 10, 10), ((0.1, 0.4, 0.25), 6),
                                          ((0.8,) * 3, 5), ((0.05,), 12)])
    def test_matches_brute_force(self, probs, m):
        assert expected_tx_exact(LossProfile(probs), m) == pytest.approx(
            brute_tail_sum(probs, m), abs=1e-8)

    def test_homogeneous_forms_coincide(self):
        for p, n, m in [(0.3, 10, 10), (0.6, 4, 3), (0.1, 25, 20)]:
            assert expected_tx_exact(LossProfile.homogeneous(p, n), m) == pytest.approx(
                expected_tx_approx(p, n, m), abs=1e-9)

    def test_monte_carlo(self):
        rng = np.random.default_rng(0)
        # completion time of a receiver = m + failures before the m-th success
        t = 10 + rng.negative_binomial(10, 0.7, size=(1_000_000, 10)).max(axis=1)
        g = expected_tx_approx(0.3, 10, 10)
        assert abs(t.mean() - g) / g < 0.005

    def test_epsilon_stability(self):
        for p, k, m in [(0.3, 10, 10), (0.8, 100, 5), (0.5, 2, 30)]:
            a = expected_tx_approx(p, k, m, 1e-12)
            b = expected_tx_approx(p, k, m, 5e-13)
            assert abs(a - b) < 1e-9

    def test_extreme_loss_terminates(self):
        assert expected_tx_approx(0.99, 1, 200) == pytest.approx(200 / 0.01, rel=1e-6)

    @pytest.mark.parametrize("args", [(1.0, 1, 2), (-0.1, 1, 2), (0.3, 0, 2)])
    def test_rejects(self, args):
        with pytest.raises(ValueError):
            expected_tx_approx(*args)

    def test_profile_validation(self):
        with pytest.raises(ValueError):
            LossProfile((0.2, 1.0))
        with pytest.raises(ValueError):
            LossProfile(())
        prof = LossProfile((0.1, 0.4, 0.4, 0.2))
        assert (prof.n, prof.p_max, prof.k) == (4, 0.4, 2)

    def test_monotone_grid(self):
        ps, ks, ms = (0.0, 0.2, 0.5, 0.8), (1, 3, 10), (1, 4, 9)
        g = {(p, k, m): expected_tx_approx(p, k, m) for p in ps for k in ks for m in ms}
        for (p, k, m), v in g.items():
            assert v >= m / (1 - p) - 1e-9
            for p2 in ps:
                if p2 > p:
                    assert g[(p2, k, m)] >= v - 1e-9
            for k2 in ks:
                if k2 > k:
                    assert g[(p, k2, m)] >= v - 1e-9
            for m2 in ms:
                if m2 > m:
                    assert g[(p, k, m2)] >= v - 1e-9


@settings(max_examples=40, deadline=None)
@given(probs=st.lists(st.floats(0.0, 0.9), min_size=1, max_size=8), m=st.integers(1, 15))
def test_exact_dominates_approx(probs, m):
    prof = LossProfile(tuple(probs))
    assert expected_tx_exact(prof, m) >= expected_tx_approx(prof.p_max, prof.k, m) - 1e-9


class TestAlpha:
    def test_examples(self):
        assert alpha_required(0.3, 10, 10) == 1
        assert alpha_required(0.0, 1, 2) == 1
        assert alpha_required(0.3, 10, 5) == 1

    def test_rule(self):
        for p, k, m in [(0.8, 100, 5), (0.5, 20, 3), (0.3, 10, 4)]:
            a = alpha_required(p, k, m)
            need = math.ceil(expected_tx_approx(p, k, m) - 1e-9)
            assert a * m * (m - 1) >= need > (a - 1) * m * (m - 1)

    def test_rejects_m1(self):
        with pytest.raises(ValueError):
            alpha_required(0.1, 1, 1)


class TestOverhead:
    def test_examples(self):
        assert overhead_bits("triangular", 10, alpha=1).bits == 49
        assert overhead_bits("rlnc", 10, q=8).bits == 80
        assert overhead_bits("dlnc", 10, n=100).bits == 70
        assert overhead_bits("sparse", 10, n=100).bits == 70
        assert overhead_bits("xor", 10).bits == 10

    def test_degenerate_m2(self):
        rep = overhead_bits("triangular", 2, alpha=1)
        assert rep.bits == 1 and rep.degenerate

    def test_compact(self):
        assert overhead_bits("triangular-compact", 10, alpha=2).bits == 18 + COMPACT_INDEX_BITS

    @pytest.mark.parametrize("args", [("foo", 4), ("dlnc", 4, 1), ("triangular", 1), ("rlnc", 4)])
    def test_rejects(self, args):
        with pytest.raises(ValueError):
            overhead_bits(*args)

    def test_sweep_and_csv(self):
        rows = overhead_sweep(range(5, 101, 5), 10, 0.3, 8)
        assert len(rows) == 20 * 6
        tri = {r.m: r.bits for r in rows if r.scheme == "triangular"}
        rl = {r.m: r.bits for r in rows if r.scheme == "rlnc"}
        assert all(tri[m] < rl[m] for m in tri)
        text = overhead_csv(rows, 0.3)
        lines = text.splitlines()
        assert lines[0] == "scheme,M,N,p,q,alpha,bits"
        assert len(lines) == 121
        assert "triangular,10,10,0.3,8,1,49" in lines

    def test_two_sweeps_differ_only_at_m5(self):
        a = {(r.scheme, r.m): r.bits for r in overhead_sweep(range(5, 101, 5), 10, 0.3, 8)
             if r.scheme == "triangular"}
        b = {(r.scheme, r.m): r.bits for r in overhead_sweep(range(5, 101, 5), 100, 0.8, 8)
             if r.scheme == "triangular"}
        # alpha is 3 at M=5 and 2 at M=10 for N=100, p=0.8
        assert sorted(k[1] for k in a if a[k] != b[k]) == [5, 10]

    def test_ceiling_jumps(self):
        tri = {r.m: r.bits for r in overhead_sweep(range(5, 101, 5), 10, 0.3, 8)
               if r.scheme == "triangular"}
        steps = {m: tri[m] - tri[m - 5] for m in range(15, 101, 5)}
        assert steps[35] > steps[30] and steps[35] > steps[40]
        # 64 = 2**6, so ceil(log2(M-1)) only moves on to 7 between 65 and 70
        assert steps[70] > steps[65] and steps[70] > steps[75]
        assert steps[65] == steps[60]

    def test_empty_range(self):
        with pytest.raises(ValueError):
            overhead_sweep([], 10, 0.3, 8)
