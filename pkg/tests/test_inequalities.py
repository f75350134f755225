import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from treelc.errors import BadIndices, BadSizes, DegreeMismatch
from treelc.exactnum import NEG_INF
from treelc.harness.generators import MNAT_FAMILIES, mnat_instance, rng_for
from treelc.harness.suite import local_global_sequence
from treelc.inequalities import (
    PolyFamily,
    check_cor_partition,
    check_lc4acoeff,
    check_partition_weighted,
    check_poly_family,
    check_ulc,
    iq_counts,
    iq_poly,
    multisets_of_size,
    n_s_coeff,
    partition_tuples,
    poly_geq,
    valid_family_tuples,
)
from treelc.matroid import Matroid, ik_counts
from treelc.poly import HomogPoly, is_lorentzian, poly_mul, specialize_bivariate, z_poly
from treelc.setfn import SetFunction, duplicate_extend, from_matroid

import oracles
from strategies import as_frozen, set_functions

F = Fraction
GRID = [F(1), F(9, 10), F(3, 4), F(1, 2), F(1, 4), F(1, 10), F(1, 100)]
PINNED = SetFunction.from_dict(2, {0: 0, 1: 0, 2: 0, 3: 1})


def P(nvars, terms):
    return HomogPoly(nvars, sum(next(iter(terms))), terms)


def mnat(seed, n):
    rng = rng_for(seed, "ineq")
    return mnat_instance(rng, MNAT_FAMILIES[seed % 4], n)


class TestIqCounts:
    @pytest.mark.parametrize("q", GRID)
    def test_u23_indicator(self, q):
        assert iq_counts(from_matroid(Matroid.uniform(2, 3), "indicator"), q) == [1, 3, 3, 0]

    @pytest.mark.parametrize("seed", range(6))
    def test_q_one_counts_domain(self, seed):
        nu = mnat(seed, 4)
        expect = [sum(1 for S in nu.dom() if bin(S).count("1") == k) for k in range(nu.n + 1)]
        assert iq_counts(nu, 1) == expect

    def test_rank_u11(self):
        assert iq_counts(from_matroid(Matroid.uniform(1, 1), "rank"), F(1, 2)) == [1, 2]

    def test_float_mode(self):
        seq = iq_counts(PINNED, 0.5, exact=False)
        assert seq == pytest.approx([1.0, 2.0, 2.0])


class TestUlc:
    def test_u23_equality(self):
        rep = check_ulc(ik_counts(Matroid.uniform(2, 3)), "M3")[0]
        assert rep.verdict and rep.margin == 0
        assert 3**2 == 2 * F(3, 2) * 1 * 3

    def test_u24_equality(self):
        rep = check_ulc(ik_counts(Matroid.uniform(2, 4)), "M3")[0]
        assert rep.verdict and rep.margin == 0
        assert 4**2 == 2 * F(4, 3) * 1 * 6

    def test_m1_failure(self):
        rep = check_ulc([1, 1, 3], "M1")[0]
        assert not rep.verdict and rep.margin == -2 and rep.witness == {"k": 1}

    def test_length_mismatch(self):
        with pytest.raises(BadSizes):
            check_ulc([1, 2, 3], "M3", n=3)

    @given(st.lists(st.integers(0, 12), min_size=3, max_size=7))
    def test_implication_chain(self, seq):
        reps = {s: check_ulc(seq, s) for s in ("M1", "M2", "M3")}
        for m3, m2, m1 in zip(reps["M3"], reps["M2"], reps["M1"]):
            assert not m3.verdict or m2.verdict
            assert not m2.verdict or m1.verdict

    @pytest.mark.parametrize("seed", range(16))
    def test_thm_valuated(self, seed):
        nu = mnat(seed, 5)
        for q in GRID:
            assert all(check_ulc(iq_counts(nu, q), "M3"))

    @pytest.mark.parametrize("seed", range(6))
    def test_specialization_consistency(self, seed):
        nu = mnat(seed, 4)
        for q in (F(1), F(1, 2)):
            seq = iq_counts(nu, q)
            assert [sum(iq_poly(nu, q, k).terms.values()) for k in range(nu.n + 1)] == seq
            g = specialize_bivariate(z_poly(nu, q), [list(range(nu.n)), [nu.n]])
            assert [g.coeff((k, nu.n - k)) for k in range(nu.n + 1)] == seq


class TestIqPoly:
    def test_u22_linear(self):
        assert iq_poly(from_matroid(Matroid.uniform(2, 2), "indicator"), 1, 1) == P(2, {(1, 0): 1, (0, 1): 1})

    def test_pinned_top(self):
        assert iq_poly(PINNED, F(1, 2), 2) == P(2, {(1, 1): 2})

    def test_constant(self):
        nu = SetFunction(2, [3, 0, 0, 0])
        assert iq_poly(nu, F(1, 2), 0) == HomogPoly(2, 0, {(0, 0): 8})

    def test_bad_k(self):
        with pytest.raises(BadIndices):
            iq_poly(PINNED, 1, 3)


class TestPolyGeq:
    def test_square(self):
        x = P(2, {(1, 0): 1, (0, 1): 1})
        rep = poly_geq(poly_mul(x, x), P(2, {(1, 1): 2}))
        assert rep.verdict

    def test_pak(self):
        nu = from_matroid(Matroid.uniform(2, 2), "indicator")
        i0, i1, i2 = (iq_poly(nu, 1, k) for k in range(3))
        f, g = (i1 * i1).scale(F(1, 4)), i0 * i2
        rep = poly_geq(f, g)
        assert not rep.verdict
        assert rep.witness == {"monomial": [1, 1], "coefficient": F(-1, 2)}
        assert f - g == P(2, {(2, 0): F(1, 4), (1, 1): F(-1, 2), (0, 2): F(1, 4)})

    def test_reflexive(self):
        f = z_poly(PINNED, F(1, 2))
        assert poly_geq(f, f).verdict

    def test_global_fails_at_0123(self):
        x, xy, x74, y3 = local_global_sequence()
        rep = poly_geq(xy * x74, x * y3)
        assert not rep.verdict
        assert rep.witness == {"monomial": [1, 1], "coefficient": F(-1, 4)}

    def test_adjacent_checks_pass(self):
        s = local_global_sequence()
        assert all(poly_geq(s[k] * s[k], s[k - 1] * s[k + 1]).verdict for k in (1, 2))

    def test_degree_mismatch(self):
        with pytest.raises(DegreeMismatch):
            poly_geq(P(2, {(1, 0): 1}), P(2, {(1, 1): 1}))


class TestPolyFamily:
    def test_u22_example(self):
        nu = from_matroid(Matroid.uniform(2, 2), "indicator")
        rep = check_poly_family(nu, 1, 0, 1, 1, 2)
        # difference x0^2 + x1^2
        assert rep.verdict and rep.margin == 1

    def test_trivial_tuple(self):
        rep = check_poly_family(mnat(3, 4), F(1, 2), 1, 1, 3, 3)
        assert rep.verdict and rep.margin == 0

    def test_bad_indices(self):
        with pytest.raises(BadIndices):
            check_poly_family(PINNED, 1, 0, 1, 1, 3)

    def test_tuples(self):
        assert list(valid_family_tuples(2)) == [(0, 0, 0, 0), (0, 0, 1, 1), (0, 0, 2, 2), (0, 1, 1, 2), (1, 1, 1, 1), (1, 1, 2, 2), (2, 2, 2, 2)]

    @pytest.mark.parametrize("seed", range(12))
    def test_mnat_family(self, seed):
        nu = mnat(seed, 4)
        for q in (F(1), F(1, 2), F(1, 10)):
            fam = PolyFamily(nu, q)
            assert all(fam.check(*t) for t in valid_family_tuples(nu.n))
            assert all(fam.check_adjacent(k) for k in range(1, nu.n))

    def test_pinned_non_mnat_fails_somewhere(self):
        fam = PolyFamily(PINNED, F(1, 2))
        assert not fam.check(0, 1, 1, 2)


class TestNS:
    def test_pair(self):
        assert n_s_coeff(SetFunction(2, [0] * 4), 1, [0, 1], 1, 1) == 2

    def test_double(self):
        assert n_s_coeff(SetFunction(2, [0] * 4), 1, [0, 0], 1, 1) == 1

    def test_bad_sizes(self):
        with pytest.raises(BadSizes):
            n_s_coeff(PINNED, 1, [0, 1], 2, 1)

    @given(set_functions(max_n=3), st.data())
    def test_matches_enumeration_and_swap(self, nu, data):
        counts = data.draw(st.tuples(*[st.integers(0, 2)] * nu.n))
        size = sum(counts)
        a = data.draw(st.integers(0, size))
        q = F(1, 2)
        if not nu.is_integer_valued():
            return
        got = n_s_coeff(nu, q, dict(enumerate(counts)), a, size - a)
        assert got == oracles.n_s(as_frozen(nu), q, counts, a, size - a)
        assert got == n_s_coeff(nu, q, dict(enumerate(counts)), size - a, a)

    @pytest.mark.parametrize("seed", range(6))
    def test_product_identity(self, seed):
        nu = mnat(seed, 3)
        n = nu.n
        q = F(1, 2)
        for a, b in itertools.product(range(n + 1), repeat=2):
            prod = poly_mul(iq_poly(nu, q, a), iq_poly(nu, q, b))
            expect = {}
            for S in multisets_of_size(n, a + b):
                c = n_s_coeff(nu, q, dict(enumerate(S)), a, b)
                if c:
                    expect[S] = c
            assert prod.terms == expect

    @pytest.mark.parametrize("seed", range(8))
    def test_lc4acoeff(self, seed):
        nu = mnat(seed, 4)
        n = nu.n
        for q in (F(1), F(1, 2)):
            for size in range(2 * n + 1):
                for S in multisets_of_size(n, size):
                    Sd = dict(enumerate(S))
                    for i in range(size + 1):
                        for j in range(i, size + 1):
                            k, l = size - j, size - i
                            if j <= k <= l:
                                assert check_lc4acoeff(nu, q, Sd, i, j, k, l)
                                assert check_partition_weighted(nu, q, Sd, i, j, k, l)

    @pytest.mark.parametrize("seed", range(6))
    def test_slice_is_lorentzian(self, seed):
        nu = mnat(seed, 3)
        n = nu.n
        q = F(1, 2)
        z = z_poly(nu, q)
        # embed Z(x, y) and Z(x, z) into variables (x_0..x_{n-1}, y, z)
        zy = HomogPoly(n + 2, n, {e + (0,): c for e, c in z.terms.items()})
        zz = HomogPoly(n + 2, n, {e[:n] + (0, e[n]): c for e, c in z.terms.items()})
        prod = poly_mul(zy, zz)
        for S in itertools.product(range(3), repeat=n):
            sl = {e[n:]: c for e, c in prod.terms.items() if e[:n] == S}
            if not sl:
                continue
            g = HomogPoly(2, 2 * n - sum(S), sl)
            assert is_lorentzian(g)
            for j in range(sum(S) + 1):
                k = sum(S) - j
                assert g.coeff((n - j, n - k)) == n_s_coeff(nu, q, dict(enumerate(S)), j, k)

    @pytest.mark.parametrize("seed", range(6))
    def test_duplicate_extension_factor(self, seed):
        nu = mnat(seed, 3)
        q = F(1, 2)
        for size in range(1, 2 * nu.n + 1):
            for S in multisets_of_size(nu.n, size):
                ext = duplicate_extend(nu, dict(enumerate(S)))
                if all(v == NEG_INF for v in ext.nu.values):
                    continue
                full = list(range(ext.nu.n))
                for a in range(size + 1):
                    lhs = n_s_coeff(ext.nu, q, full, a, size - a)
                    rhs = 2**ext.n_doubled * n_s_coeff(nu, q, dict(enumerate(S)), a, size - a)
                    assert lhs == rhs


class TestCorPartition:
    def test_u23(self):
        rep = check_cor_partition(Matroid.uniform(2, 3), 0, 1, 2, 3)
        assert rep.verdict and rep.margin == 6

    def test_free_two_equality(self):
        rep = check_cor_partition(Matroid.free(2), 0, 1, 1, 2)
        assert rep.verdict and rep.margin == 0

    def test_i_equals_j(self):
        rep = check_cor_partition(Matroid.uniform(2, 4), 1, 1, 3, 3)
        assert rep.verdict and rep.margin == 0

    def test_bad_indices(self):
        with pytest.raises(BadIndices):
            check_cor_partition(Matroid.free(2), 0, 1, 1, 1)

    def test_tuples(self):
        assert list(partition_tuples(3)) == [(0, 0, 3, 3), (0, 1, 2, 3), (1, 1, 2, 2)]
