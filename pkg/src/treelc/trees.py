"""Ultrametric trees, their leaf distance matrices and the rank-one PSD bound.

Vertex ids are ints or strings.  Leaves are ordered by :func:`vkey` (ints
first, then strings), and that order indexes the rows of every leaf matrix.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from .errors import InvalidTree, NotUltrametric, WrongRadius
from .symmat import Psd, Relax, RowOp, SymMatrix, is_psd


def vkey(v):
    return (isinstance(v, str), v)


def angle(a) -> Fraction:
    """Pivot bookkeeping function <a> = 1 - 1/a."""
    return 1 - Fraction(1, a) if isinstance(a, int) else 1 - 1 / Fraction(a)


class UltrametricTree:
    """Rooted tree with nonnegative rational edge lengths and equidistant leaves.

    ``edges`` is an iterable of ``(parent, child, length)``.  Instances are
    treated as immutable once validated.
    """

    def __init__(self, root: Hashable, edges: Iterable[Tuple[Hashable, Hashable, object]] = ()):
        parent: Dict = {}
        length: Dict = {}
        children: Dict = {root: []}
        for p, c, ell in edges:
            ell = Fraction(ell)
            if ell < 0:
                raise InvalidTree(f"edge {p}->{c} has negative length {ell}")
            if c in parent or c == root:
                raise InvalidTree(f"vertex {c!r} has more than one parent")
            parent[c] = p
            length[c] = ell
            children.setdefault(p, []).append(c)
            children.setdefault(c, [])
        # connectivity from the root, which also rules out cycles
        depth = {root: Fraction(0)}
        order = [root]
        stack = [root]
        while stack:
            v = stack.pop()
            for c in children[v]:
                depth[c] = depth[v] + length[c]
                order.append(c)
                stack.append(c)
        if len(depth) != len(children):
            missing = sorted((v for v in children if v not in depth), key=vkey)
            raise InvalidTree(f"vertices not reachable from the root: {missing}")
        self.root = root
        self.parent = parent
        self.length = length
        self.children = {v: tuple(sorted(cs, key=vkey)) for v, cs in children.items()}
        self.vertices = tuple(sorted(children, key=vkey))
        self.leaves = tuple(v for v in self.vertices if not self.children[v])
        self.depth = depth
        radii = {depth[v] for v in self.leaves}
        if len(radii) != 1:
            raise InvalidTree(f"leaves are at different distances from the root: {sorted(radii)}")
        self.radius = radii.pop()
        self.leaf_index = {v: i for i, v in enumerate(self.leaves)}
        below = {}
        for v in reversed(order):
            below[v] = 1 if not self.children[v] else sum(below[c] for c in self.children[v])
        self.n_below = below

    # -- basic queries ------------------------------------------------------

    @property
    def n_leaves(self) -> int:
        return len(self.leaves)

    def edges(self) -> List[Tuple]:
        return [(self.parent[v], v, self.length[v]) for v in self.vertices if v != self.root]

    def height(self, v) -> Fraction:
        """Distance from v to its furthest (equivalently, any) descendant leaf."""
        return self.radius - self.depth[v]

    def ancestors(self, v) -> List:
        out = [v]
        while out[-1] != self.root:
            out.append(self.parent[out[-1]])
        return out

    def lca(self, u, v):
        anc = set(self.ancestors(u))
        for w in self.ancestors(v):
            if w in anc:
                return w
        raise AssertionError("tree has no common ancestor")

    def is_binary(self) -> bool:
        return all(len(cs) in (0, 2) for cs in self.children.values())

    def __eq__(self, other):
        if not isinstance(other, UltrametricTree):
            return NotImplemented
        return self.root == other.root and sorted(self.edges(), key=lambda e: vkey(e[1])) == sorted(
            other.edges(), key=lambda e: vkey(e[1])
        )

    def __hash__(self):
        return hash((self.root, tuple(sorted(((vkey(c), vkey(p), ell) for p, c, ell in self.edges())))))

    def __repr__(self):
        return f"UltrametricTree(root={self.root!r}, leaves={len(self.leaves)}, radius={self.radius})"

    def rescaled(self, factor) -> "UltrametricTree":
        factor = Fraction(factor)
        return UltrametricTree(self.root, [(p, c, ell * factor) for p, c, ell in self.edges()])


def normalize_radius(T: UltrametricTree) -> UltrametricTree:
    """Divide all edge lengths by the radius so the result has radius 1."""
    if T.radius == 0:
        raise WrongRadius("cannot normalize a tree of radius 0")
    return T.rescaled(1 / T.radius)


def _require_radius_one(T: UltrametricTree):
    if T.radius != 1:
        raise WrongRadius(f"tree has radius {T.radius}, expected 1")


# --------------------------------------------------------------------------
# distance matrices and ultrametrics


@dataclass(frozen=True)
class UltrametricFn:
    """Symmetric nonnegative function on pairs of {0..n-1} with zero diagonal."""

    d: tuple

    def __init__(self, d: Sequence[Sequence]):
        rows = tuple(tuple(Fraction(x) for x in r) for r in d)
        n = len(rows)
        for i in range(n):
            if len(rows[i]) != n:
                raise ValueError("distance matrix is not square")
            if rows[i][i] != 0:
                raise ValueError(f"d({i},{i}) must be 0")
            for j in range(n):
                if rows[i][j] < 0 or rows[i][j] != rows[j][i]:
                    raise ValueError(f"d({i},{j}) must be symmetric and nonnegative")
        object.__setattr__(self, "d", rows)

    @property
    def n(self) -> int:
        return len(self.d)

    def three_point_violation(self) -> Optional[Tuple[int, int, int]]:
        """Least triple whose maximum pairwise distance is attained only once."""
        d = self.d
        for i, j, k in itertools.combinations(range(self.n), 3):
            vals = sorted((d[i][j], d[j][k], d[i][k]))
            if vals[2] != vals[1]:
                return (i, j, k)
        return None

    def is_ultrametric(self) -> bool:
        return self.three_point_violation() is None


def leaf_distance_matrix(T: UltrametricTree) -> SymMatrix:
    L = T.leaves
    n = len(L)
    rows = [[Fraction(0)] * n for _ in range(n)]
    for a in range(n):
        for b in range(a + 1, n):
            w = T.lca(L[a], L[b])
            rows[a][b] = rows[b][a] = T.depth[L[a]] + T.depth[L[b]] - 2 * T.depth[w]
    return SymMatrix(rows)


def tree_from_ultrametric(d) -> UltrametricTree:
    """Single-linkage reconstruction of the ultrametric tree realizing ``d``.

    Leaves are 0..n-1; internal vertices are named "u0", "u1", ... in
    preorder.
    """
    if not isinstance(d, UltrametricFn):
        d = UltrametricFn(d)
    bad = d.three_point_violation()
    if bad is not None:
        raise NotUltrametric(f"three-point condition fails on {bad}", witness=bad)
    D = d.d
    n = d.n
    if n == 1:
        return UltrametricTree(0)
    edges = []
    counter = itertools.count()

    def diam(cls):
        return max((D[a][b] for a, b in itertools.combinations(cls, 2)), default=Fraction(0))

    def build(cls, h):
        v = f"u{next(counter)}"
        if h == 0:
            for leaf in cls:
                edges.append((v, leaf, Fraction(0)))
            return v
        dm = 2 * h
        classes: List[List[int]] = []
        for leaf in cls:
            for c in classes:
                if D[c[0]][leaf] < dm:
                    c.append(leaf)
                    break
            else:
                classes.append([leaf])
        for c in classes:
            if len(c) == 1:
                edges.append((v, c[0], h))
            else:
                hc = diam(c) / 2
                w = build(c, hc)
                edges.append((v, w, h - hc))
        return v

    root = build(list(range(n)), diam(range(n)) / 2)
    return UltrametricTree(root, edges)


def binarize(T: UltrametricTree) -> UltrametricTree:
    """Replace each vertex with k > 2 children by a left comb of k-1 binary vertices.

    New vertices are joined by zero-length edges, so the leaf distance matrix
    is unchanged.  Vertices with a single child are kept as they are.
    """
    if all(len(cs) <= 2 for cs in T.children.values()):
        return T
    taken = {str(v) for v in T.vertices}
    edges = []
    for v in T.vertices:
        cs = T.children[v]
        if len(cs) <= 2:
            edges.extend((v, c, T.length[c]) for c in cs)
            continue
        top = v
        for m, c in enumerate(reversed(cs[2:]), start=1):
            w = f"{v}.{m}"
            while w in taken:
                w += "'"
            taken.add(w)
            edges.append((top, c, T.length[c]))
            edges.append((top, w, Fraction(0)))
            top = w
        edges.append((top, cs[0], T.length[cs[0]]))
        edges.append((top, cs[1], T.length[cs[1]]))
    return UltrametricTree(T.root, edges)


# --------------------------------------------------------------------------
# upper subtrees and A^{T,U}


class UpperSubtree:
    """Nonempty ancestor-closed vertex set of a tree."""

    def __init__(self, T: UltrametricTree, members: Iterable):
        members = frozenset(members)
        if not members:
            raise ValueError("upper subtree must be nonempty")
        for v in members:
            if v not in T.children:
                raise ValueError(f"{v!r} is not a vertex of the tree")
            if v != T.root and T.parent[v] not in members:
                raise ValueError(f"ancestor of {v!r} missing from the upper subtree")
        self.tree = T
        self.members = members
        self.minimal = tuple(
            v for v in T.vertices if v in members and not any(c in members for c in T.children[v])
        )

    @classmethod
    def whole(cls, T: UltrametricTree) -> "UpperSubtree":
        return cls(T, T.vertices)

    @classmethod
    def closure(cls, T: UltrametricTree, seeds: Iterable) -> "UpperSubtree":
        members = set()
        for v in seeds:
            members.update(T.ancestors(v))
        return cls(T, members or {T.root})


def _a_entries(T: UltrametricTree, M: Sequence, nb: Dict) -> List[List[Fraction]]:
    n = sum(nb[i] for i in M)
    an = angle(n)
    rows = []
    for a, i in enumerate(M):
        row = []
        for b, j in enumerate(M):
            if a == b:
                row.append(an - angle(nb[i]) * T.height(i))
            else:
                row.append(an - T.height(T.lca(i, j)))
        rows.append(row)
    return rows


def a_matrix(T: UltrametricTree, U) -> SymMatrix:
    """The matrix indexed by the minimal elements of U from the generalized PSD bound."""
    _require_radius_one(T)
    if not isinstance(U, UpperSubtree):
        U = UpperSubtree(T, U)
    return SymMatrix(_a_entries(T, U.minimal, T.n_below))


def thm_psd_matrix(T: UltrametricTree) -> SymMatrix:
    """(1 - 1/n) * ones - D/2 for the leaf distance matrix D."""
    n = T.n_leaves
    D = leaf_distance_matrix(T)
    return SymMatrix.constant(n, angle(n)) - D.scale(Fraction(1, 2))


# --------------------------------------------------------------------------
# certificate replaying the inductive proof


@dataclass(frozen=True)
class BinarizeStep:
    added: tuple


@dataclass(frozen=True)
class ContractStep:
    """Edges g-h-i replaced by one edge g-i; h and i's sibling subtrees removed."""

    leaf: object
    parent: object
    grandparent: object
    new_length: Fraction
    removed: tuple


@dataclass(frozen=True)
class MergeStep:
    """Sibling minimal elements i, j (matrix indices) replaced by their parent h."""

    i: int
    j: int
    vi: object
    vj: object
    h: object
    pivot: Fraction
    relax_i: Fraction
    relax_j: Fraction
    factor: Fraction


@dataclass(frozen=True)
class BaseStep:
    index: int
    vertex: object
    entry: Fraction


@dataclass(frozen=True)
class TreePsd(Psd):
    """Psd certificate carrying the tree-level reduction trace and row labels."""

    trace: tuple = ()
    labels: tuple = ()


def certify_a_psd(T: UltrametricTree, U, check: bool = True) -> TreePsd:
    """Replay the inductive PSD proof for A^{T,U}, emitting a verifiable certificate.

    When both reductions apply the sibling merge is used, taking the smallest
    pair of matrix indices.  With ``check`` set, every edge contraction is
    verified to leave the matrix unchanged.
    """
    _require_radius_one(T)
    if not isinstance(U, UpperSubtree):
        U = UpperSubtree(T, U)
    A0 = a_matrix(T, U)
    labels = U.minimal
    trace = []

    Tb = binarize(T)
    if Tb is not T:
        added = tuple(v for v in Tb.vertices if v not in T.children)
        trace.append(BinarizeStep(added))
        U = UpperSubtree.closure(Tb, U.members)
        assert U.minimal == labels
        if check:
            assert a_matrix(Tb, U) == A0
    T = Tb

    parent = dict(T.parent)
    children = {v: list(cs) for v, cs in T.children.items()}
    length = dict(T.length)
    height = {v: T.height(v) for v in T.vertices}
    nb = dict(T.n_below)
    members = set(U.members)
    index = {v: a for a, v in enumerate(labels)}
    M = list(labels)

    steps = []
    pivots: List[Optional[Fraction]] = [None] * len(labels)

    def current_tree():
        return UltrametricTree(T.root, [(parent[c], c, length[c]) for c in parent])

    while len(M) > 1:
        merge = None
        for vi, vj in sorted(
            itertools.combinations(M, 2), key=lambda p: tuple(sorted((index[p[0]], index[p[1]])))
        ):
            if vi in parent and vj in parent and parent[vi] == parent[vj]:
                if index[vi] > index[vj]:
                    vi, vj = vj, vi
                merge = (vi, vj)
                break
        if merge is not None:
            vi, vj = merge
            h = parent[vi]
            assert sorted(children[h], key=vkey) == sorted((vi, vj), key=vkey)
            i, j = index[vi], index[vj]
            ni, nj = nb[vi], nb[vj]
            nh = ni + nj
            Hh = height[h]
            relax_i = angle(ni) * (Hh - height[vi])
            relax_j = angle(nj) * (Hh - height[vj])
            factor = Fraction(ni, nh)
            pivot = (Fraction(1, ni) + Fraction(1, nj)) * Hh
            steps.extend([Relax(i, relax_i), Relax(j, relax_j), RowOp(i, j, Fraction(-1)), RowOp(j, i, factor)])
            pivots[i] = pivot
            trace.append(MergeStep(i, j, vi, vj, h, pivot, relax_i, relax_j, factor))
            members.discard(vi)
            members.discard(vj)
            M.remove(vi)
            M[M.index(vj)] = h
            del index[vi], index[vj]
            index[h] = j
            nb[h] = nh  # contractions may have pruned leaves below h
            continue

        # a minimal element whose parent has no other child in U
        vi = min(M, key=lambda v: index[v])
        for v in sorted(M, key=lambda v: index[v]):
            p = parent[v]
            if not any(c in members for c in children[p] if c != v):
                vi = v
                break
        else:
            raise AssertionError("neither reduction applies; tree is not binary")
        h = parent[vi]
        g = parent[h]
        removed = []
        stack = [c for c in children[h] if c != vi]
        while stack:
            w = stack.pop()
            removed.append(w)
            stack.extend(children[w])
        before = _a_entries(current_tree(), M, nb) if check else None
        for w in removed:
            del parent[w], length[w], children[w]
        new_len = length[h] + length[vi]
        children[g] = [c for c in children[g] if c != h] + [vi]
        del parent[h], length[h], children[h]
        members.discard(h)
        parent[vi] = g
        length[vi] = new_len
        trace.append(ContractStep(vi, h, g, new_len, tuple(sorted(removed, key=vkey))))
        if check:
            assert _a_entries(current_tree(), M, nb) == before

    (last,) = M
    n = nb[last]
    entry = angle(n) - angle(n) * height[last]
    pivots[index[last]] = entry
    trace.append(BaseStep(index[last], last, entry))
    cert = TreePsd(tuple(steps), tuple(pivots), tuple(trace), tuple(labels))
    if check:
        assert cert.replay(A0), "tree PSD certificate failed to replay"
    return cert


# --------------------------------------------------------------------------
# optimal constant and the equality-case predicates


@dataclass(frozen=True)
class ClassifyResult:
    leaf_positive: bool
    star_metric: bool


def classify(T: UltrametricTree) -> ClassifyResult:
    _require_radius_one(T)
    leaf_positive = all(T.length[v] > 0 for v in T.leaves if v != T.root)
    star_metric = all(
        T.height(T.lca(a, b)) in (0, 1) for a, b in itertools.combinations(T.leaves, 2)
    )
    return ClassifyResult(leaf_positive, star_metric)


@dataclass(frozen=True)
class CtInterval:
    lo: Fraction
    hi: Fraction
    exact: bool = False
    degenerate: bool = False

    def contains(self, c) -> bool:
        return self.lo <= c <= self.hi


DEFAULT_TOL = Fraction(1, 10**9)


def c_matrix(D: SymMatrix, c) -> SymMatrix:
    return SymMatrix.constant(D.size, c) - D.scale(Fraction(1, 2))


def c_T(T: UltrametricTree, tol=DEFAULT_TOL) -> CtInterval:
    """Bracket the least c with c*ones - D/2 PSD by exact bisection on [0, 1 - 1/n].

    The invariant is that A(lo) is not PSD (unless degenerate) and A(hi) is.
    The result is marked exact when A(1 - 1/n - tol) is not PSD and the tree
    is a star-metric.
    """
    _require_radius_one(T)
    tol = Fraction(tol)
    if tol <= 0:
        raise ValueError("tol must be positive")
    D = leaf_distance_matrix(T)
    top = angle(T.n_leaves)
    if is_psd(c_matrix(D, 0)):
        return CtInterval(Fraction(0), Fraction(0), exact=True, degenerate=True)
    if not is_psd(c_matrix(D, top)):
        raise AssertionError("(1 - 1/n) ones - D/2 is not PSD")
    lo, hi = Fraction(0), top
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if is_psd(c_matrix(D, mid)):
            hi = mid
        else:
            lo = mid
    if hi == top and not is_psd(c_matrix(D, top - tol)) and classify(T).star_metric:
        return CtInterval(top, top, exact=True)
    return CtInterval(lo, hi)
