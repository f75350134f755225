from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from treelc.errors import InvalidTree, NotUltrametric, WrongRadius
from treelc.harness.generators import random_tree, random_upper_subtree, rng_for
from treelc.symmat import Psd, SymMatrix, inertia, is_psd
from treelc.trees import (
    BaseStep,
    BinarizeStep,
    ContractStep,
    MergeStep,
    UltrametricFn,
    UltrametricTree,
    UpperSubtree,
    a_matrix,
    angle,
    binarize,
    c_T,
    certify_a_psd,
    classify,
    leaf_distance_matrix,
    normalize_radius,
    thm_psd_matrix,
    tree_from_ultrametric,
)

F = Fraction
H = F(1, 2)


def star(n, length=1):
    return UltrametricTree("r", [("r", i, length) for i in range(n)])


def two_level():
    # leaves 0, 1 meet at height 1/2; leaf 2 hangs off the root
    return UltrametricTree("r", [("r", "a", H), ("a", 0, H), ("a", 1, H), ("r", 2, 1)])


seeds = st.integers(0, 2**32 - 1)
leaf_counts = st.integers(2, 9)


def gen_tree(seed, n, **kw):
    return random_tree(rng_for(seed, "test-tree"), n, **kw)


class TestConstruction:
    def test_unequal_depths(self):
        with pytest.raises(InvalidTree):
            UltrametricTree("r", [("r", 0, 1), ("r", 1, 2)])

    def test_negative_length(self):
        with pytest.raises(InvalidTree):
            UltrametricTree("r", [("r", 0, -1)])

    def test_two_parents(self):
        with pytest.raises(InvalidTree):
            UltrametricTree("r", [("r", 0, 1), ("r", "a", 0), ("a", 0, 1)])

    def test_heights_and_lca(self):
        T = two_level()
        assert T.radius == 1
        assert T.height("a") == H and T.height("r") == 1 and T.height(0) == 0
        assert T.lca(0, 1) == "a" and T.lca(0, 2) == "r"

    def test_normalize(self):
        T = normalize_radius(star(3, F(5, 2)))
        assert T.radius == 1
        with pytest.raises(WrongRadius):
            normalize_radius(star(2, 0))


class TestLeafDistance:
    def test_unit_star(self):
        assert leaf_distance_matrix(star(3)) == SymMatrix([[0, 2, 2], [2, 0, 2], [2, 2, 0]])

    def test_two_level(self):
        D = leaf_distance_matrix(two_level())
        assert D[0, 1] == 1 and D[0, 2] == 2 and D[1, 2] == 2

    def test_single_leaf(self):
        assert leaf_distance_matrix(UltrametricTree("r", [("r", 0, 1)])) == SymMatrix([[0]])

    @given(seeds, leaf_counts)
    def test_three_point_and_bound(self, seed, n):
        T = gen_tree(seed, n)
        D = leaf_distance_matrix(T)
        assert UltrametricFn(D.rows).is_ultrametric()
        assert all(D[i, j] <= 2 * T.radius for i in range(n) for j in range(n))


class TestFromUltrametric:
    def test_three_points(self):
        T = tree_from_ultrametric([[0, 1, 2], [1, 0, 2], [2, 2, 0]])
        expect = UltrametricTree("u0", [("u0", "u1", H), ("u1", 0, H), ("u1", 1, H), ("u0", 2, 1)])
        assert T == expect
        assert leaf_distance_matrix(T) == leaf_distance_matrix(two_level())

    def test_all_zero(self):
        T = tree_from_ultrametric([[0] * 3] * 3)
        assert T.children[T.root] == (0, 1, 2)
        assert all(T.length[i] == 0 for i in range(3))

    def test_not_ultrametric(self):
        with pytest.raises(NotUltrametric) as exc:
            tree_from_ultrametric([[0, 1, 2], [1, 0, 3], [2, 3, 0]])
        assert exc.value.witness == (0, 1, 2)

    @given(seeds, leaf_counts)
    def test_round_trip(self, seed, n):
        D = leaf_distance_matrix(gen_tree(seed, n))
        T = tree_from_ultrametric(D.rows)
        assert leaf_distance_matrix(T) == D
        assert T.radius == max(max(r) for r in D.rows) / 2


class TestBinarize:
    def test_four_star(self):
        T = star(4)
        B = binarize(T)
        assert B.is_binary()
        internal = [v for v in B.vertices if B.children[v] and v != B.root]
        assert len(internal) == 2 and all(B.length[v] == 0 for v in internal)
        # left comb: leaves 0, 1 share the deepest new vertex, 2 and 3 hang off the chain
        assert B.lca(0, 1) != B.lca(0, 2) != B.lca(0, 3) != B.lca(0, 1)
        assert B.parent[B.lca(0, 1)] == B.lca(0, 2) and B.parent[B.lca(0, 2)] == B.root
        assert leaf_distance_matrix(B) == leaf_distance_matrix(T)

    def test_binary_unchanged(self):
        T = two_level()
        assert binarize(T) is T

    def test_three_children(self):
        B = binarize(star(3))
        assert sum(1 for v in B.vertices if B.children[v]) == 2

    @given(seeds, leaf_counts)
    def test_preserves_distances(self, seed, n):
        T = gen_tree(seed, n)
        B = binarize(T)
        assert all(len(c) <= 2 for c in B.children.values())
        assert B.leaves == T.leaves
        assert leaf_distance_matrix(B) == leaf_distance_matrix(T)


class TestAMatrix:
    def test_root_only(self):
        assert a_matrix(two_level(), {"r"}) == SymMatrix([[0]])

    def test_whole_star_is_thm_matrix(self):
        T = star(3)
        expect = SymMatrix.identity(3) - SymMatrix.constant(3, F(1, 3))
        assert a_matrix(T, UpperSubtree.whole(T)) == expect == thm_psd_matrix(T)

    def test_two_level_whole(self):
        A = a_matrix(two_level(), UpperSubtree.whole(two_level()))
        third = F(2, 3)
        assert [A[i, i] for i in range(3)] == [third] * 3
        assert A[0, 1] == F(1, 6)
        assert A[0, 2] == A[1, 2] == F(-1, 3)

    def test_wrong_radius(self):
        with pytest.raises(WrongRadius):
            a_matrix(star(2, 2), {"r"})

    def test_upper_subtree_closed(self):
        with pytest.raises(ValueError):
            UpperSubtree(two_level(), {"a"})


class TestThmPsd:
    @given(seeds, leaf_counts)
    def test_radius_one(self, seed, n):
        M = thm_psd_matrix(gen_tree(seed, n))
        cert = is_psd(M)
        assert isinstance(cert, Psd) and cert.replay(M)

    @given(seeds, leaf_counts, st.sampled_from([F(0), F(1, 3), F(1, 2), F(9, 10)]))
    def test_smaller_radius(self, seed, n, r):
        T = gen_tree(seed, n, radius=r) if r else star(n, 0)
        assert is_psd(thm_psd_matrix(T))

    def test_star_eigenvalues(self):
        # 1, ..., 1 and 1 - (1 - lambda) n = 0 for lambda = 1 - 1/n
        for n in range(2, 8):
            assert tuple(inertia(thm_psd_matrix(star(n)))) == (n - 1, 1, 0)


class TestCertificate:
    def test_two_star(self):
        T = star(2)
        cert = certify_a_psd(T, UpperSubtree.whole(T))
        assert cert.pivots == (2, 0)
        assert isinstance(cert.trace[0], MergeStep) and cert.trace[0].pivot == 2
        assert isinstance(cert.trace[-1], BaseStep) and cert.trace[-1].entry == 0

    @pytest.mark.parametrize("n", range(2, 8))
    def test_star_merges(self, n):
        T = star(n)
        cert = certify_a_psd(T, UpperSubtree.whole(T))
        merges = [s for s in cert.trace if isinstance(s, MergeStep)]
        assert len(merges) == n - 1
        assert cert.trace[-1].entry == 0
        assert isinstance(cert.trace[0], BinarizeStep) == (n > 2)
        assert cert.replay(a_matrix(T, UpperSubtree.whole(T)))

    def test_contraction_first(self):
        T = UltrametricTree(
            "r",
            [("r", "a", H), ("r", 2, 1), ("a", "b", F(1, 4)), ("a", 1, H), ("b", 0, F(1, 4)), ("b", 3, F(1, 4))],
        )
        U = UpperSubtree(T, {"r", "a", "b", 2})
        cert = certify_a_psd(T, U)
        first = cert.trace[0]
        assert isinstance(first, ContractStep)
        assert (first.leaf, first.parent, first.grandparent) == ("b", "a", "r")
        assert first.new_length == F(3, 4) and first.removed == (1,)
        T2 = UltrametricTree("r", [("r", "b", F(3, 4)), ("r", 2, 1), ("b", 0, F(1, 4)), ("b", 3, F(1, 4))])
        assert a_matrix(T, U) == a_matrix(T2, UpperSubtree(T2, {"r", "b", 2}))
        assert cert.replay(a_matrix(T, U))

    @given(seeds, leaf_counts, st.floats(0.1, 0.9))
    def test_random_pairs(self, seed, n, p):
        rng = rng_for(seed, "pair")
        T = random_tree(rng, n)
        U = random_upper_subtree(rng, T, p)
        M = a_matrix(T, U)
        cert = certify_a_psd(T, U)
        assert cert.replay(M)
        assert all(x >= 0 for x in cert.pivots)
        assert cert.labels == U.minimal
        assert is_psd(M)


class TestEqStar:
    def test_identity(self):
        for a in range(1, 101):
            for b in range(1, 101):
                x, y = angle(a), angle(b)
                assert angle(a + b) == (1 - x * y) / (2 - x - y)


class TestCt:
    @pytest.mark.parametrize("n", range(2, 7))
    def test_star_exact(self, n):
        ct = c_T(star(n), F(1, 10**6))
        assert ct.exact and ct.lo == ct.hi == 1 - F(1, n)

    def test_two_star_half(self):
        assert c_T(star(2)).lo == H

    def test_two_level_strictly_below(self):
        ct = c_T(two_level(), F(1, 10**6))
        assert not ct.exact and ct.hi < F(2, 3) and ct.hi - ct.lo <= F(1, 10**6)
        assert is_psd(SymMatrix.constant(3, ct.hi) - leaf_distance_matrix(two_level()).scale(H))
        assert not is_psd(SymMatrix.constant(3, ct.lo) - leaf_distance_matrix(two_level()).scale(H))

    def test_degenerate(self):
        T = UltrametricTree("r", [("r", "a", 1), ("a", 0, 0), ("a", 1, 0)])
        ct = c_T(T)
        assert ct.degenerate and ct.lo == ct.hi == 0

    def test_bad_tol(self):
        with pytest.raises(ValueError):
            c_T(star(2), 0)

    @given(seeds, st.integers(2, 6), st.booleans())
    def test_equality_case(self, seed, n, force_star):
        T = gen_tree(seed, n, leaf_positive=True, star=force_star)
        cls = classify(T)
        ct = c_T(T, F(1, 10**6))
        assert cls.star_metric == ct.contains(angle(n))


class TestClassify:
    def test_star(self):
        c = classify(star(4))
        assert c.leaf_positive and c.star_metric

    def test_two_level(self):
        c = classify(two_level())
        assert c.leaf_positive and not c.star_metric

    def test_zero_leaf_edge(self):
        T = UltrametricTree("r", [("r", "x", 1), ("x", 0, 0), ("r", 1, 1), ("r", 2, 1)])
        assert not classify(T).leaf_positive

    def test_wrong_radius(self):
        with pytest.raises(WrongRadius):
            classify(star(2, H))
