"""Seeded instance generators.

Every generator draws from a numpy ``Generator`` derived from
``SeedSequence([seed, crc32(label)])``, so a (kind, params, seed) triple
always yields the same instance.  The algorithms below are part of the
stable interface: changing them changes the regression corpus.
"""
from __future__ import annotations

import itertools
import zlib
from fractions import Fraction
from typing import Dict, List, Sequence

import numpy as np

from ..errors import CapExceeded
from ..exactnum import NEG_INF, is_neg_inf
from ..matroid import MAX_ENUM_N, Matroid
from ..setfn import (
    SetFunction,
    ValuatedMatroid,
    contract,
    from_matroid,
    is_mnat_concave,
    is_valuated_matroid,
    murota_extension,
)
from ..trees import UltrametricTree, UpperSubtree
from .io import Instance

MAX_SETFN_N = 10
MAX_TREE_LEAVES = 40
DENOMINATORS = (2, 3, 4, 5, 6, 8, 10, 12)


def rng_for(seed: int, *labels) -> np.random.Generator:
    words = [int(seed) & 0xFFFFFFFFFFFFFFFF]
    for lab in labels:
        words.append(zlib.crc32(str(lab).encode()))
    return np.random.default_rng(np.random.SeedSequence(words))


# --------------------------------------------------------------------------
# matroids


def random_graphic(rng: np.random.Generator, n_vertices: int, n_edges: int, loops: bool = True) -> Matroid:
    edges = []
    for _ in range(n_edges):
        u = int(rng.integers(n_vertices))
        v = int(rng.integers(n_vertices))
        if u == v and not loops:
            v = (u + 1) % n_vertices
        edges.append((u, v))
    return Matroid.graphic(edges)


def random_matroid(rng: np.random.Generator, n: int) -> Matroid:
    """Uniform or graphic matroid on n elements, chosen at random."""
    if rng.random() < 0.3:
        d = int(rng.integers(0, n + 1))
        return Matroid.uniform(d, n)
    return random_graphic(rng, int(rng.integers(2, n + 2)), n, loops=rng.random() < 0.3)


# --------------------------------------------------------------------------
# valuated matroids and set functions


def tropical_plucker(W: Sequence[Sequence], n: int, d: int) -> Dict[int, object]:
    """nu(B) = max over bijections rows -> B of the summed weights (max-plus minors)."""
    vals = {}
    for B in itertools.combinations(range(n), d):
        best = NEG_INF
        for perm in itertools.permutations(B):
            s = 0
            for r, c in enumerate(perm):
                s = s + W[r][c]
                if is_neg_inf(s):
                    break
            if not is_neg_inf(s) and (is_neg_inf(best) or s > best):
                best = s
        if not is_neg_inf(best):
            vals[sum(1 << b for b in B)] = best
    return vals


def random_valuated(
    rng: np.random.Generator, n: int, d: int, value_range: int = 3, neg_inf_prob: float = 0.15, tries: int = 200
) -> ValuatedMatroid:
    """Random integer valuated matroid, accepted only after passing the exchange check.

    Candidates are max-plus maximal minors of a random integer matrix; with
    probability 1/3 one value is then nudged by +-1, which the check often
    rejects.
    """
    for _ in range(tries):
        W = [
            [NEG_INF if rng.random() < neg_inf_prob else int(rng.integers(-value_range, value_range + 1)) for _ in range(n)]
            for _ in range(d)
        ]
        vals = tropical_plucker(W, n, d)
        if not vals:
            continue
        if rng.random() < 1 / 3:
            keys = sorted(vals)
            k = keys[int(rng.integers(len(keys)))]
            vals[k] = vals[k] + int(rng.choice([-1, 1]))
        vm = ValuatedMatroid(n, d, {k: Fraction(v) for k, v in vals.items()})
        if is_valuated_matroid(vm):
            return vm
    raise RuntimeError("failed to generate a valuated matroid")


def random_contraction(rng: np.random.Generator, nu: SetFunction) -> SetFunction:
    order = [int(x) for x in rng.permutation(nu.n)]
    for e in order:
        if any(not is_neg_inf(v) for S, v in enumerate(nu.values) if S >> e & 1):
            return contract(nu, e)
    raise RuntimeError("no element can be contracted")


def perturb_non_mnat(rng: np.random.Generator, nu: SetFunction, tries: int = 500) -> SetFunction:
    """Change one value of nu until M-natural concavity fails.

    A finite value moves by +-1 or +-2 or becomes -inf; a -inf value becomes an
    integer within two of the finite range (three above it).
    """
    N = 1 << nu.n
    finite = [v for v in nu.values if not is_neg_inf(v)]
    lo, hi = int(min(finite)) - 2, int(max(finite)) + 3
    for _ in range(tries):
        vals = list(nu.values)
        S = int(rng.integers(N))
        r = rng.random()
        if is_neg_inf(vals[S]):
            vals[S] = Fraction(int(rng.integers(lo, hi + 1)))
        elif r < 0.2 and S != 0:
            vals[S] = NEG_INF
        else:
            vals[S] = vals[S] + int(rng.choice([-2, -1, 1, 2]))
        if all(is_neg_inf(v) for v in vals):
            continue
        cand = SetFunction(nu.n, vals)
        if not is_mnat_concave(cand):
            return cand
    raise RuntimeError("failed to perturb into a non-M-natural-concave function")


def mnat_instance(rng: np.random.Generator, family: str, n: int) -> SetFunction:
    if family == "indicator":
        return from_matroid(random_matroid(rng, n), "indicator")
    if family == "rank":
        return from_matroid(random_matroid(rng, n), "rank")
    if family == "murota":
        d = int(rng.integers(1, n + 1))
        return murota_extension(random_valuated(rng, n, d))
    if family == "contraction":
        base = mnat_instance(rng, str(rng.choice(["indicator", "rank", "murota"])), n + 1)
        return random_contraction(rng, base)
    raise ValueError(f"unknown family {family!r}")


MNAT_FAMILIES = ("indicator", "rank", "murota", "contraction")


def mnat_corpus(seed: int, count: int, n_min: int = 2, n_max: int = 6) -> List[Instance]:
    """Round-robin over the four M-natural concave families."""
    out = []
    for idx in range(count):
        fam = MNAT_FAMILIES[idx % len(MNAT_FAMILIES)]
        rng = rng_for(seed, "mnat", fam, idx)
        n = int(rng.integers(n_min, n_max + 1))
        nu = mnat_instance(rng, fam, n)
        out.append(Instance("setfunction", nu, {"generator": fam, "seed": seed, "index": idx, "n": n}))
    return out


def full_small_domain_corpus(seed: int, count: int, n_min: int = 2, n_max: int = 6) -> List[Instance]:
    """M-natural concave functions whose domain contains every set of size <= 2."""
    out = []
    for idx in range(count):
        rng = rng_for(seed, "fulldom", idx)
        n = int(rng.integers(n_min, n_max + 1))
        if idx % 2 == 0:
            nu = from_matroid(random_matroid(rng, n), "rank")
            gen = "rank"
        else:
            d = int(rng.integers(2, n + 1))
            nu = murota_extension(random_valuated(rng, n, d, neg_inf_prob=0.0))
            gen = "murota"
        out.append(Instance("setfunction", nu, {"generator": gen, "seed": seed, "index": idx, "n": n}))
    return out


def non_mnat_corpus(seed: int, count: int, n_min: int = 2, n_max: int = 5) -> List[Instance]:
    out = []
    for idx in range(count):
        rng = rng_for(seed, "nonmnat", idx)
        n = int(rng.integers(n_min, n_max + 1))
        fam = MNAT_FAMILIES[idx % len(MNAT_FAMILIES)]
        nu = perturb_non_mnat(rng, mnat_instance(rng, fam, n))
        out.append(Instance("setfunction", nu, {"generator": f"perturbed-{fam}", "seed": seed, "index": idx, "n": n}))
    return out


# --------------------------------------------------------------------------
# trees


def _random_fraction(rng: np.random.Generator) -> Fraction:
    den = int(rng.choice(DENOMINATORS))
    return Fraction(int(rng.integers(1, den)), den)


def random_tree(
    rng: np.random.Generator,
    n_leaves: int,
    radius=1,
    zero_prob: float = 0.1,
    leaf_positive: bool = False,
    star: bool = False,
    max_children: int = 4,
) -> UltrametricTree:
    """Random ultrametric tree by recursive height splitting.

    The leaf set is split into 2..max_children random blocks; each block of
    size > 1 becomes a child vertex at a random rational height below its
    parent (equal to it with probability ``zero_prob``, or at height 0 with
    the same probability unless ``leaf_positive``).  With ``star`` every
    internal vertex sits at the root height.
    """
    if not 1 <= n_leaves <= MAX_TREE_LEAVES:
        raise CapExceeded(f"n_leaves must be in 1..{MAX_TREE_LEAVES}")
    radius = Fraction(radius)
    labels = [int(x) for x in rng.permutation(n_leaves)]
    if n_leaves == 1:
        return UltrametricTree("r", [("r", labels[0], radius)])
    edges = []
    counter = itertools.count()

    def build(block, h):
        v = "r" if h == radius and not edges and not hasattr(build, "started") else f"v{next(counter)}"
        build.started = True
        k = int(rng.integers(2, min(len(block), max_children) + 1))
        cuts = sorted(int(x) for x in rng.choice(np.arange(1, len(block)), size=k - 1, replace=False))
        parts = [block[a:b] for a, b in zip([0] + cuts, cuts + [len(block)])]
        for part in parts:
            if len(part) == 1:
                edges.append((v, part[0], h))
                continue
            if star:
                hc = h
            else:
                r = rng.random()
                if r < zero_prob:
                    hc = h
                elif r < 2 * zero_prob and not leaf_positive:
                    hc = Fraction(0)
                else:
                    hc = h * _random_fraction(rng)
            w = build(part, hc)
            edges.append((v, w, h - hc))
        return v

    root = build(labels, radius)
    return UltrametricTree(root, edges)


def random_upper_subtree(rng: np.random.Generator, T: UltrametricTree, p: float = 0.5) -> UpperSubtree:
    seeds = [v for v in T.vertices if rng.random() < p]
    return UpperSubtree.closure(T, seeds or [T.root])


# --------------------------------------------------------------------------
# entry point used by the CLI


def gen(kind: str, params: Dict, seed: int) -> Instance:
    """Build one instance of the named kind; deterministic in (kind, params, seed)."""
    params = dict(params)
    rng = rng_for(seed, kind, sorted(params.items()))
    prov = {"generator": kind, "seed": seed, "params": params}
    n = int(params.get("n", 4))
    if kind in ("uniform", "graphic", "matroid", "indicator", "rank", "murota", "valuated", "contraction", "nonmnat"):
        if n > MAX_ENUM_N or (kind not in ("uniform", "graphic", "matroid") and n > MAX_SETFN_N):
            raise CapExceeded(f"n = {n} exceeds the generator cap")
    if kind == "uniform":
        return Instance("matroid", Matroid.uniform(int(params.get("d", 2)), n), prov)
    if kind == "graphic":
        if "edges" in params:
            return Instance("matroid", Matroid.graphic(params["edges"]), prov)
        return Instance("matroid", random_graphic(rng, int(params.get("vertices", 4)), n), prov)
    if kind == "matroid":
        return Instance("matroid", random_matroid(rng, n), prov)
    if kind in ("indicator", "rank", "murota", "contraction"):
        return Instance("setfunction", mnat_instance(rng, kind, n), prov)
    if kind == "valuated":
        return Instance("valuated", random_valuated(rng, n, int(params.get("d", 2))), prov)
    if kind == "nonmnat":
        fam = params.get("family", "rank")
        return Instance("setfunction", perturb_non_mnat(rng, mnat_instance(rng, fam, n)), prov)
    if kind == "tree":
        nl = int(params.get("n_leaves", 5))
        T = random_tree(
            rng,
            nl,
            radius=Fraction(str(params.get("radius", 1))),
            zero_prob=float(params.get("zero_prob", 0.1)),
            leaf_positive=bool(params.get("leaf_positive", False)),
            star=bool(params.get("star", False)),
        )
        return Instance("tree", T, prov)
    raise ValueError(f"unknown generator kind {kind!r}")
