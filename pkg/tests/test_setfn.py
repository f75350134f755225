import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from treelc.errors import DomainTooSmall, MultiplicityTooHigh
from treelc.exactnum import NEG_INF, is_neg_inf
from treelc.harness.generators import MNAT_FAMILIES, mnat_instance, random_valuated, rng_for
from treelc.matroid import Matroid, validate
from treelc.poly import partial, z_poly
from treelc.setfn import (
    SetFunction,
    ValuatedMatroid,
    contract,
    duplicate_extend,
    from_matroid,
    is_mnat_concave,
    is_valuated_matroid,
    murota_extension,
    ultrametric_from,
)
from treelc.verdict import mask_of, popcount

import oracles
from strategies import as_frozen, set_functions, valuated

F = Fraction
U12 = Matroid.uniform(1, 2)
U23 = Matroid.uniform(2, 3)
GRID = [F(1), F(9, 10), F(3, 4), F(1, 2), F(1, 4), F(1, 10), F(1, 100)]


def split_example():
    # -1 on {0,1} and {2,3}, 0 on the other 2-subsets of {0..3}
    vals = {B: F(0) for B in itertools.combinations(range(4), 2)}
    vals[(0, 1)] = vals[(2, 3)] = F(-1)
    return ValuatedMatroid(4, 2, vals)


class TestMnatConcave:
    def test_u12_indicator(self):
        assert is_mnat_concave(from_matroid(U12, "indicator"))

    def test_supermodular_pair(self):
        nu = SetFunction.from_dict(2, {0: 0, 1: 0, 2: 0, 3: 1})
        v = is_mnat_concave(nu)
        assert not v
        assert v.witness == ([0, 1], [], 0)

    @pytest.mark.parametrize("seed", range(10))
    def test_rank_functions(self, seed):
        rng = rng_for(seed, "rank-test")
        n = int(rng.integers(1, 7))
        assert is_mnat_concave(mnat_instance(rng, "rank", n))

    @given(set_functions(max_n=4))
    def test_agrees_with_brute_force(self, nu):
        assert bool(is_mnat_concave(nu)) == oracles.mnat_concave(nu.n, as_frozen(nu))

    @given(set_functions(max_n=3))
    def test_witness_is_least_violation(self, nu):
        v = is_mnat_concave(nu)
        if v:
            return
        I1, I2, i1 = v.witness
        sub = SetFunction(nu.n, nu.values)
        # the witness really violates both conditions
        val = as_frozen(sub)
        A, B = frozenset(I1), frozenset(I2)
        lhs = val[A] + val[B]
        assert lhs > val[A - {i1}] + val[B | {i1}]
        assert all(lhs > val[(A - {i1}) | {i2}] + val[(B | {i1}) - {i2}] for i2 in B - A)

    def test_rational_values(self):
        nu = SetFunction(1, [F(1, 3), F(1, 2)])
        assert is_mnat_concave(nu)

    @given(set_functions(min_n=2, max_n=4))
    def test_small_exchange_consequence(self, nu):
        small = [S for S in range(1 << nu.n) if popcount(S) <= 2]
        if not is_mnat_concave(nu) or any(is_neg_inf(nu.values[S]) for S in small):
            return
        for i, j in itertools.combinations(range(nu.n), 2):
            assert nu.values[(1 << i) | (1 << j)] + nu.values[0] <= nu.values[1 << i] + nu.values[1 << j]


class TestContract:
    def test_zero(self):
        c = contract(SetFunction(2, [0, 0, 0, 0]), 0)
        assert c.n == 1 and c.values == (0, 0)

    def test_u12_indicator(self):
        c = contract(from_matroid(U12, "indicator"), 0)
        assert c.values == (0, NEG_INF)

    def test_u23_rank(self):
        c = contract(from_matroid(U23, "rank"), 0)
        assert c.values == (1, 2, 2, 2)

    @given(set_functions(min_n=2, max_n=4), st.data())
    def test_partial_identity(self, nu, data):
        i = data.draw(st.integers(0, nu.n - 1))
        try:
            c = contract(nu, i)
        except ValueError:  # contraction has empty domain
            return
        for q in (F(1), F(1, 2), F(1, 3)):
            lhs = z_poly(c, q)
            rhs = partial(z_poly(nu, q), i)
            # drop x_i (now absent) to compare in the smaller variable set
            keep = [k for k in range(nu.n + 1) if k != i]
            assert all(e[i] == 0 for e in rhs.terms)
            assert {tuple(e[k] for k in keep): v for e, v in rhs.terms.items()} == lhs.terms

    @pytest.mark.parametrize("fam", MNAT_FAMILIES)
    def test_preserves_mnat(self, fam):
        for seed in range(4):
            rng = rng_for(seed, "contract", fam)
            nu = mnat_instance(rng, fam, 4)
            for i in range(nu.n):
                if any(not is_neg_inf(v) for S, v in enumerate(nu.values) if S >> i & 1):
                    assert is_mnat_concave(contract(nu, i))


class TestFromMatroid:
    def test_u23_indicator(self):
        nu = from_matroid(U23, "indicator")
        assert all((v == 0) == (popcount(S) <= 2) for S, v in enumerate(nu.values))
        assert nu.values[7] == NEG_INF

    def test_u23_rank(self):
        assert from_matroid(U23, "rank").values == tuple(F(min(popcount(S), 2)) for S in range(8))

    def test_triangle_rank(self):
        tri = Matroid.graphic([(0, 1), (1, 2), (0, 2)])
        assert from_matroid(tri, "rank").values[7] == 2

    def test_domain_of_indicator_is_family(self):
        M = Matroid.graphic([(0, 1), (1, 2), (0, 2), (2, 3)])
        assert set(from_matroid(M, "indicator").dom()) == set(M.independent)

    def test_bad_kind(self):
        with pytest.raises(ValueError):
            from_matroid(U23, "bogus")


class TestValuated:
    def test_uniform_zero(self):
        vm = ValuatedMatroid(4, 2, {B: 0 for B in itertools.combinations(range(4), 2)})
        assert is_valuated_matroid(vm)

    def test_split_valid(self):
        assert is_valuated_matroid(split_example())

    def test_split_positive_invalid(self):
        vals = {B: F(0) for B in itertools.combinations(range(4), 2)}
        vals[(0, 1)] = vals[(2, 3)] = F(1)
        v = is_valuated_matroid(ValuatedMatroid(4, 2, vals))
        assert not v and v.witness == ([0, 1], [2, 3], 0)

    @given(valuated(max_n=4))
    def test_agrees_with_brute_force(self, vm):
        value = {frozenset(i for i in range(vm.n) if B >> i & 1): v for B, v in vm.values.items()}
        assert bool(is_valuated_matroid(vm)) == oracles.valuated(vm.n, vm.d, value)

    @given(valuated(max_n=4))
    def test_murota_equivalence(self, vm):
        assert bool(is_mnat_concave(murota_extension(vm))) == bool(is_valuated_matroid(vm))

    @pytest.mark.parametrize("seed", range(8))
    def test_murota_domain_is_matroid(self, seed):
        rng = rng_for(seed, "murota-dom")
        n = int(rng.integers(2, 6))
        vm = random_valuated(rng, n, int(rng.integers(1, n + 1)))
        nu = murota_extension(vm)
        assert validate(nu.dom(), n)
        assert is_mnat_concave(nu)

    def test_wrong_size(self):
        with pytest.raises(ValueError):
            ValuatedMatroid(3, 2, {(0,): 0})


class TestMurota:
    def test_uniform_zero(self):
        nu = murota_extension(ValuatedMatroid(3, 2, {B: 0 for B in itertools.combinations(range(3), 2)}))
        assert all((v == 0) == (popcount(S) <= 2) for S, v in enumerate(nu.values))
        assert nu.values[7] == NEG_INF

    def test_split(self):
        nu = murota_extension(split_example())
        assert nu((0, 1)) == -1 and nu((0, 2)) == 0 and nu((0,)) == 0 and nu(()) == 0
        assert all(nu(S) == NEG_INF for S in itertools.combinations(range(4), 3))

    def test_element_in_no_basis(self):
        vm = ValuatedMatroid(3, 2, {(0, 1): NEG_INF, (0, 2): NEG_INF, (1, 2): 0})
        assert murota_extension(vm)((0,)) == NEG_INF


class TestUltrametricFrom:
    def test_zero_function(self):
        d = ultrametric_from(SetFunction(3, [0] * 8), F(1, 2))
        assert all(d.d[i][j] == (2 if i != j else 0) for i in range(3) for j in range(3))

    def test_parallel_pair(self):
        M = Matroid.graphic([(0, 1), (0, 1), (1, 2)])  # edges 0 and 1 are parallel
        d = ultrametric_from(from_matroid(M, "rank"), F(1, 2))
        assert d.d[0][1] == 1 and d.d[0][2] == d.d[1][2] == 2

    def test_u23_rank(self):
        d = ultrametric_from(from_matroid(U23, "rank"), F(1, 3))
        assert all(d.d[i][j] == 2 for i in range(3) for j in range(3) if i != j)

    def test_domain_too_small(self):
        with pytest.raises(DomainTooSmall):
            ultrametric_from(from_matroid(U12, "indicator"), F(1, 2))

    @pytest.mark.parametrize("seed", range(12))
    def test_three_point_and_radius(self, seed):
        rng = rng_for(seed, "ultra")
        n = int(rng.integers(2, 6))
        if seed % 2:
            nu = from_matroid(Matroid.graphic([tuple(int(x) for x in rng.integers(0, 4, 2)) for _ in range(n)]), "rank")
        else:
            nu = murota_extension(random_valuated(rng, n, int(rng.integers(2, n + 1)), neg_inf_prob=0))
        for q in GRID:
            d = ultrametric_from(nu, q)
            assert d.is_ultrametric()
            assert max(max(r) for r in d.d) <= 2


class TestDuplicateExtend:
    def test_no_doubles(self):
        nu = SetFunction(3, [F(k) for k in range(8)])
        ext = duplicate_extend(nu, [0, 1])
        assert ext.nu.n == 2
        assert ext.nu.values == tuple(nu.values[S] for S in range(4))

    def test_one_double(self):
        ext = duplicate_extend(SetFunction(2, [0, 0, 0, 0]), [0, 0, 1])
        # E' = (0, 1, 0'); the copy 0' has index 2
        assert ext.collapse == (0, 1, 0)
        assert ext.nu(mask_of([0, 2])) == NEG_INF
        assert ext.nu(mask_of([2, 1])) == 0
        assert ext.n_doubled == 1

    def test_full_set_with_double(self):
        ext = duplicate_extend(SetFunction(2, [0, 0, 0, 0]), [0, 0, 1, 1])
        assert ext.nu.values[-1] == NEG_INF

    def test_multiplicity_cap(self):
        with pytest.raises(MultiplicityTooHigh):
            duplicate_extend(SetFunction(1, [0, 0]), [0, 0, 0])


class TestSetFunction:
    def test_empty_domain(self):
        with pytest.raises(ValueError):
            SetFunction(1, [NEG_INF, NEG_INF])

    def test_wrong_length(self):
        with pytest.raises(ValueError):
            SetFunction(2, [0, 0])

    def test_integer_valued(self):
        assert SetFunction(1, [0, NEG_INF]).is_integer_valued()
        assert not SetFunction(1, [0, F(1, 2)]).is_integer_valued()
