"""Finite matroids stored as explicit families of independent-set bitmasks."""
from __future__ import annotations

from typing import Iterable, List, Sequence

from .errors import BadSizes, SizeCap
from .verdict import Verdict, elements_of, mask_of, popcount

MAX_ENUM_N = 16


def validate(family: Iterable[int], n: int) -> Verdict:
    """Check the independence axioms on a family of bitmasks over {0..n-1}.

    The witness is ``("subset", I, J)`` for a member I with a missing subset J,
    or ``("augment", I, J)`` for members with |I| > |J| and no augmenting
    element of I - J.
    """
    fam = set(family)
    if not fam:
        return Verdict(False, None, "family is empty")
    full = (1 << n) - 1
    for I in sorted(fam):
        if I & ~full:
            return Verdict(False, ("range", elements_of(I)), "set outside the ground set")
    for I in sorted(fam):
        for e in elements_of(I):
            J = I & ~(1 << e)
            if J not in fam:
                return Verdict(False, ("subset", elements_of(I), elements_of(J)), "not downward closed")
    ordered = sorted(fam)
    for I in ordered:
        for J in ordered:
            if popcount(I) <= popcount(J):
                continue
            if not any((J | (1 << i)) in fam for i in elements_of(I & ~J)):
                return Verdict(False, ("augment", elements_of(I), elements_of(J)), "augmentation fails")
    return Verdict(True)


class Matroid:
    """Matroid on {0..n-1} given by its independent sets (as bitmasks)."""

    def __init__(self, n: int, independent: Iterable[int], check: bool = True):
        self.n = n
        self.independent = frozenset(independent)
        if check:
            v = validate(self.independent, n)
            if not v:
                raise ValueError(f"not a matroid: {v.reason} {v.witness}")
        self._rank = None

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_sets(cls, n: int, sets: Iterable[Iterable[int]]) -> "Matroid":
        return cls(n, {mask_of(s) for s in sets})

    @classmethod
    def from_bases(cls, n: int, bases: Iterable[Iterable[int]]) -> "Matroid":
        fam = set()
        for B in bases:
            b = mask_of(B)
            sub = b
            while True:
                fam.add(sub)
                if sub == 0:
                    break
                sub = (sub - 1) & b
        return cls(n, fam)

    @classmethod
    def uniform(cls, d: int, n: int) -> "Matroid":
        return cls(n, {m for m in range(1 << n) if popcount(m) <= d})

    @classmethod
    def free(cls, n: int) -> "Matroid":
        return cls.uniform(n, n)

    @classmethod
    def graphic(cls, edges: Sequence[Sequence[int]]) -> "Matroid":
        """Cycle matroid: ground set = edge indices, independent sets = forests."""
        edges = [tuple(e) for e in edges]
        n = len(edges)
        if n > MAX_ENUM_N:
            raise SizeCap(f"graphic matroid with {n} edges exceeds cap {MAX_ENUM_N}")
        fam = set()
        for m in range(1 << n):
            root = {}

            def find(x):
                while root.get(x, x) != x:
                    x = root[x]
                return x

            ok = True
            for e in elements_of(m):
                u, v = edges[e]
                ru, rv = find(u), find(v)
                if ru == rv:
                    ok = False
                    break
                root[ru] = rv
            if ok:
                fam.add(m)
        return cls(n, fam)

    # -- queries -----------------------------------------------------------

    def is_independent(self, S) -> bool:
        return (S if isinstance(S, int) else mask_of(S)) in self.independent

    def rank_table(self) -> List[int]:
        if self._rank is None:
            if self.n > MAX_ENUM_N:
                raise SizeCap(f"n = {self.n} exceeds cap {MAX_ENUM_N}")
            r = [0] * (1 << self.n)
            for S in range(1, 1 << self.n):
                if S in self.independent:
                    r[S] = popcount(S)
                else:
                    r[S] = max(r[S & ~(1 << e)] for e in elements_of(S))
            self._rank = r
        return self._rank

    @property
    def rank_of_matroid(self) -> int:
        return max(popcount(I) for I in self.independent)

    def bases(self) -> List[int]:
        r = self.rank_of_matroid
        return sorted(I for I in self.independent if popcount(I) == r)

    def __eq__(self, other):
        return isinstance(other, Matroid) and self.n == other.n and self.independent == other.independent

    def __hash__(self):
        return hash((self.n, self.independent))

    def __repr__(self):
        return f"Matroid(n={self.n}, rank={self.rank_of_matroid}, |I|={len(self.independent)})"


def rank(M: Matroid, S) -> int:
    mask = S if isinstance(S, int) else mask_of(S)
    return M.rank_table()[mask]


def ik_counts(M: Matroid) -> List[int]:
    counts = [0] * (M.n + 1)
    for I in M.independent:
        counts[popcount(I)] += 1
    return counts


def n_partitions(M: Matroid, a: int, b: int) -> int:
    """Ordered partitions E = A + B with A, B independent, |A| = a, |B| = b."""
    if a < 0 or b < 0 or a + b != M.n:
        raise BadSizes(f"need a + b = {M.n}, got {a} + {b}")
    full = (1 << M.n) - 1
    return sum(1 for A in M.independent if popcount(A) == a and (full ^ A) in M.independent)
