import itertools
import math

import pytest
from hypothesis import given, strategies as st

from treelc.errors import BadSizes
from treelc.harness.generators import random_matroid, rng_for
from treelc.inequalities import check_cor_partition, partition_tuples
from treelc.matroid import Matroid, ik_counts, n_partitions, rank, validate
from treelc.setfn import from_matroid
from treelc.verdict import elements_of, mask_of, popcount

import oracles

TRIANGLE = [(0, 1), (1, 2), (0, 2)]


def masks(*sets):
    return {mask_of(s) for s in sets}


class TestValidate:
    def test_u12(self):
        assert validate(masks((), (0,), (1,)), 2)

    def test_not_downward_closed(self):
        v = validate(masks((), (0,), (0, 1)), 2)
        assert not v and v.witness == ("subset", [0, 1], [1])

    def test_augmentation(self):
        v = validate(masks((), (0,), (1,), (2,), (0, 1)), 3)
        assert not v and v.witness == ("augment", [0, 1], [2])

    def test_empty(self):
        assert not validate(set(), 2)

    @given(st.integers(1, 4), st.data())
    def test_agrees_with_brute_force(self, n, data):
        fam = data.draw(st.sets(st.integers(0, (1 << n) - 1), max_size=1 << n))
        sets = [elements_of(m) for m in fam]
        assert bool(validate(fam, n)) == oracles.matroid_axioms(n, sets)

    def test_constructor_rejects(self):
        with pytest.raises(ValueError):
            Matroid(2, masks((), (0, 1)))


class TestConstructors:
    def test_from_bases(self):
        assert Matroid.from_bases(3, [(0, 1), (0, 2), (1, 2)]) == Matroid.uniform(2, 3)

    def test_graphic_triangle(self):
        assert Matroid.graphic(TRIANGLE) == Matroid.uniform(2, 3)

    def test_graphic_loop(self):
        M = Matroid.graphic([(0, 0), (0, 1)])
        assert M.independent == masks((), (1,))

    def test_uniform_independent_of_construction(self):
        for d, n in [(0, 3), (2, 4), (3, 5)]:
            fam = {mask_of(c) for k in range(d + 1) for c in itertools.combinations(range(n), k)}
            assert Matroid.uniform(d, n).independent == fam


class TestRank:
    def test_u23_full(self):
        assert rank(Matroid.uniform(2, 3), [0, 1, 2]) == 2

    @pytest.mark.parametrize("M", [Matroid.uniform(2, 3), Matroid.graphic(TRIANGLE), Matroid.free(2)])
    def test_empty(self, M):
        assert rank(M, []) == 0

    def test_triangle_pairs(self):
        M = Matroid.graphic(TRIANGLE)
        assert all(rank(M, p) == 2 for p in itertools.combinations(range(3), 2))

    @pytest.mark.parametrize("seed", range(10))
    def test_ik_from_rank(self, seed):
        M = random_matroid(rng_for(seed, "rank-ik"), 5)
        counts = [0] * (M.n + 1)
        for S in range(1 << M.n):
            if rank(M, S) == popcount(S):
                counts[popcount(S)] += 1
        assert counts == ik_counts(M)

    @pytest.mark.parametrize("seed", range(6))
    def test_indicator_domain_round_trip(self, seed):
        M = random_matroid(rng_for(seed, "dom"), 5)
        assert set(from_matroid(M, "indicator").dom()) == set(M.independent)


class TestIk:
    def test_u24(self):
        assert ik_counts(Matroid.uniform(2, 4)) == [1, 4, 6, 0, 0]

    def test_u24_binomials(self):
        assert ik_counts(Matroid.uniform(2, 4))[:3] == [math.comb(4, k) for k in range(3)]

    def test_triangle(self):
        assert ik_counts(Matroid.graphic(TRIANGLE)) == [1, 3, 3, 0]

    def test_free(self):
        assert ik_counts(Matroid.free(3)) == [1, 3, 3, 1]


class TestPartitions:
    def test_u23(self):
        M = Matroid.uniform(2, 3)
        assert n_partitions(M, 1, 2) == 3
        assert n_partitions(M, 0, 3) == 0

    def test_free_two(self):
        assert n_partitions(Matroid.free(2), 1, 1) == 2

    def test_bad_sizes(self):
        with pytest.raises(BadSizes):
            n_partitions(Matroid.free(2), 1, 2)

    @pytest.mark.parametrize("seed", range(10))
    def test_swap_and_oracle(self, seed):
        M = random_matroid(rng_for(seed, "parts"), int(rng_for(seed, "size").integers(1, 7)))
        sets = [elements_of(m) for m in M.independent]
        expect = oracles.n_partitions(M.n, sets)
        for a in range(M.n + 1):
            assert n_partitions(M, a, M.n - a) == n_partitions(M, M.n - a, a) == expect.get(a, 0)

    @pytest.mark.parametrize("seed", range(10))
    def test_cor_partition(self, seed):
        M = random_matroid(rng_for(seed, "corpart"), int(rng_for(seed, "m").integers(1, 9)))
        assert all(check_cor_partition(M, *t) for t in partition_tuples(M.n))
