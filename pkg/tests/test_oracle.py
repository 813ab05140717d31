from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from trinc.ids import TriId, group_ids, id_at, ids_needed
from trinc.oracle import (MAX_ORACLE_M, bit_matrix, bit_rank, bit_solvable,
                          determined_unknowns, integer_rank, lambda_matrix,
                          lambda_rank, lemma2_condition)
from trinc.verify import peel_solved

FIG2 = [TriId.from_r(r) for r in [(0, 1, 2, 3), (1, 0, 2, 3), (3, 0, 1, 2), (1, 2, 3, 0)]]


def fraction_rank(rows):
    a = [[Fraction(x) for x in r] for r in rows]
    rank = 0
    for c in range(len(a[0]) if a else 0):
        piv = next((i for i in range(rank, len(a)) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        for i in range(len(a)):
            if i != rank and a[i][c] != 0:
                f = a[i][c] / a[rank][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[rank])]
        rank += 1
    return rank


def gf2_rank(mat):
    a = mat.copy() % 2
    rank = 0
    for c in range(a.shape[1]):
        rows = np.flatnonzero(a[rank:, c]) + rank
        if not len(rows):
            continue
        a[[rank, rows[0]]] = a[[rows[0], rank]]
        hit = np.flatnonzero(a[:, c])
        hit = hit[hit != rank]
        a[hit] ^= a[rank]
        rank += 1
        if rank == a.shape[0]:
            break
    return rank


class TestLambdaRank:
    def test_group_rank(self):
        assert lambda_rank(group_ids(4, 1, 0)) == 3

    def test_group_plus_other(self):
        assert lambda_rank(group_ids(4, 1, 0) + [TriId.from_r((1, 0, 2, 3))]) == 4

    def test_single(self):
        assert lambda_rank([id_at(5, 7)]) == 1

    def test_matrix_entries(self):
        assert lambda_matrix([id_at(4, 4)]) == [[4, 8, 2, 1]]

    def test_mixed_m_rejected(self):
        with pytest.raises(ValueError):
            lambda_rank([id_at(3, 1), id_at(4, 1)])

    def test_size_cap(self):
        with pytest.raises(ValueError):
            lambda_rank([id_at(MAX_ORACLE_M + 1, 1)])

    def test_known_rank_deficient_triples(self):
        # three distinct ids from the first two rounds that are linearly dependent
        ids = [TriId.from_r(r) for r in [(0, 1, 2), (0, 4, 2), (2, 0, 4)]]
        assert lambda_rank(ids) == 2
        assert fraction_rank(lambda_matrix(ids)) == 2

    def test_m4_round1_deficient_quadruple(self):
        ids = [TriId.from_r(r) for r in [(0, 1, 2, 3), (0, 3, 1, 2), (1, 0, 2, 3), (3, 0, 1, 2)]]
        assert lambda_rank(ids) == 3

    def test_m4_deficient_subset_count(self):
        pool = ids_needed(4, 24)
        assert sum(lambda_rank(s) < 4 for s in combinations(pool, 4)) == 186

    @settings(max_examples=80, deadline=None)
    @given(m=st.integers(2, 7), data=st.data())
    def test_bareiss_matches_fractions(self, m, data):
        pool = ids_needed(m, 3 * m * (m - 1))
        ids = data.draw(st.lists(st.sampled_from(pool), min_size=1, max_size=m + 1))
        assert lambda_rank(ids) == fraction_rank(lambda_matrix(ids))

    def test_integer_rank_plain_matrices(self):
        assert integer_rank([[1, 2], [2, 4]]) == 1
        assert integer_rank([[0, 0], [0, 0]]) == 0
        assert integer_rank([[0, 3], [5, 0], [1, 1]]) == 2
        assert integer_rank([]) == 0


class TestGroupsAndProbes:
    def test_group_rank_any_round(self):
        for m in range(2, 11):
            for rho in (1, 2, 3):
                for g in range(m):
                    assert lambda_rank(group_ids(m, rho, g)) == m - 1

    def test_lemma2_examples(self):
        assert lemma2_condition(group_ids(4, 1, 0), TriId.from_r((1, 0, 2, 3)))
        assert lemma2_condition(group_ids(2, 1, 0), TriId.from_r((1, 0)))

    def test_probe_from_group_rejected(self):
        grp = group_ids(4, 1, 0)
        with pytest.raises(ValueError):
            lemma2_condition(grp, grp[1])

    def test_incomplete_group_rejected(self):
        with pytest.raises(ValueError):
            lemma2_condition(group_ids(4, 1, 0)[:2], id_at(4, 4))

    def test_condition_agrees_with_rank(self):
        for m in range(2, 8):
            pool = ids_needed(m, 3 * m * (m - 1))
            for rho in (1, 2):
                for g in range(m):
                    grp = group_ids(m, rho, g)
                    for probe in pool:
                        if probe in grp:
                            continue
                        full = lambda_rank(grp + [probe]) == m
                        assert lemma2_condition(grp, probe) == full


class TestBitOracle:
    def test_fig2_solvable(self):
        assert bit_solvable(4, 4, FIG2)

    def test_m2_b1(self):
        assert bit_solvable(2, 1, ids_needed(2, 2))

    def test_matrix_shape_and_rows(self):
        mat = bit_matrix(2, 3, [TriId.from_r((1, 0))])
        assert mat.shape == (4, 6)
        # column 0 holds only bit 1 of packet 2; column 3 only bit 3 of packet 1
        assert mat[0].tolist() == [0, 0, 0, 1, 0, 0]
        assert mat[3].tolist() == [0, 0, 1, 0, 0, 0]

    @settings(max_examples=60, deadline=None)
    @given(m=st.integers(2, 5), B=st.integers(1, 9), data=st.data())
    def test_rank_matches_numpy(self, m, B, data):
        pool = ids_needed(m, 2 * m * (m - 1))
        ids = data.draw(st.lists(st.sampled_from(pool), min_size=1, max_size=m, unique=True))
        assert bit_rank(m, B, ids) == gf2_rank(bit_matrix(m, B, ids))

    def test_m_minus_one_ids_insufficient(self):
        for m in range(2, 6):
            B = (m - 1) ** 2 + 1
            for ids in combinations(ids_needed(m, m * (m - 1)), m - 1):
                assert not bit_solvable(m, B, ids)

    def test_determined_is_upper_bound_for_peeling(self):
        for m in (3, 4):
            pool = ids_needed(m, m * (m - 1))
            for n in range(1, m + 1):
                for ids in combinations(pool, n):
                    for B in (1, 5):
                        assert peel_solved(m, B, ids) <= determined_unknowns(m, B, ids)

    def test_full_system_determines_everything(self):
        assert determined_unknowns(4, 8, FIG2) == 32
