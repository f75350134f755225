"""Set functions 2^E -> Q u {-inf}, M-natural concavity and related constructions.

A set function on {0..n-1} stores one extended value per subset, indexed by
bitmask.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Sequence, Tuple

from .errors import DomainTooSmall, MultiplicityTooHigh, NotUltrametric, SizeCap
from .exactnum import NEG_INF, ExtValue, as_ext, is_neg_inf, q_neg_pow
from .matroid import Matroid
from .trees import UltrametricFn
from .verdict import Verdict, elements_of, mask_of, popcount

MAX_N = 20


class SetFunction:
    def __init__(self, n: int, values: Sequence):
        if n > MAX_N:
            raise SizeCap(f"ground set size {n} exceeds cap {MAX_N}")
        if len(values) != 1 << n:
            raise ValueError(f"expected {1 << n} values, got {len(values)}")
        self.n = n
        self.values = tuple(as_ext(v) for v in values)
        if all(is_neg_inf(v) for v in self.values):
            raise ValueError("effective domain must be nonempty")

    @classmethod
    def from_dict(cls, n: int, values: Mapping, default=NEG_INF) -> "SetFunction":
        vals = [default] * (1 << n)
        for S, v in values.items():
            vals[S if isinstance(S, int) else mask_of(S)] = v
        return cls(n, vals)

    @classmethod
    def from_callable(cls, n: int, f: Callable[[int], object]) -> "SetFunction":
        return cls(n, [f(S) for S in range(1 << n)])

    def __call__(self, S) -> ExtValue:
        return self.values[S if isinstance(S, int) else mask_of(S)]

    def dom(self) -> List[int]:
        return [S for S, v in enumerate(self.values) if not is_neg_inf(v)]

    def is_integer_valued(self) -> bool:
        return all(is_neg_inf(v) or (isinstance(v, Fraction) and v.denominator == 1) for v in self.values)

    def __eq__(self, other):
        return isinstance(other, SetFunction) and self.n == other.n and self.values == other.values

    def __hash__(self):
        return hash((self.n, self.values))

    def __repr__(self):
        return f"SetFunction(n={self.n}, |dom|={len(self.dom())})"


def _scaled(values: Sequence[ExtValue]) -> list:
    """Integer copies of the finite values (common positive scaling); -inf kept."""
    den = 1
    for v in values:
        if not is_neg_inf(v):
            den = den * v.denominator // math.gcd(den, v.denominator)
    return [v if is_neg_inf(v) else int(v * den) for v in values]


def is_mnat_concave(nu: SetFunction) -> Verdict:
    """Exhaustive exchange check; witness is the least failing (I1, I2, i1) by bitmask order."""
    v = _scaled(nu.values)
    n = nu.n
    N = 1 << n
    for I1 in range(N):
        a = v[I1]
        if is_neg_inf(a):
            continue
        for I2 in range(N):
            lhs = a + v[I2]
            if is_neg_inf(lhs):
                continue
            only1 = I1 & ~I2
            only2 = I2 & ~I1
            for i1 in range(n):
                b1 = 1 << i1
                if not only1 & b1:
                    continue
                if lhs <= v[I1 ^ b1] + v[I2 | b1]:
                    continue
                base1 = I1 ^ b1
                base2 = I2 | b1
                found = False
                for i2 in range(n):
                    b2 = 1 << i2
                    if only2 & b2 and lhs <= v[base1 | b2] + v[base2 ^ b2]:
                        found = True
                        break
                if not found:
                    return Verdict(False, (elements_of(I1), elements_of(I2), i1), "exchange fails")
    return Verdict(True)


def contract(nu: SetFunction, i: int) -> SetFunction:
    """nu/i on E - i (remaining elements relabelled in order): S -> nu(S + i)."""
    if not 0 <= i < nu.n:
        raise ValueError(f"element {i} outside the ground set")
    n = nu.n
    low = (1 << i) - 1
    vals = []
    for S in range(1 << (n - 1)):
        full = (S & low) | ((S & ~low) << 1) | (1 << i)
        vals.append(nu.values[full])
    return SetFunction(n - 1, vals)


def from_matroid(M: Matroid, kind: str) -> SetFunction:
    if kind == "indicator":
        return SetFunction(M.n, [0 if S in M.independent else NEG_INF for S in range(1 << M.n)])
    if kind == "rank":
        return SetFunction(M.n, M.rank_table())
    raise ValueError(f"unknown kind {kind!r}")


class ValuatedMatroid:
    """Function on the d-subsets of {0..n-1}; subsets not listed are -inf."""

    def __init__(self, n: int, d: int, values: Mapping):
        if not 0 <= d <= n:
            raise ValueError("need 0 <= d <= n")
        if n > MAX_N:
            raise SizeCap(f"ground set size {n} exceeds cap {MAX_N}")
        vals: Dict[int, ExtValue] = {}
        for S, v in values.items():
            m = S if isinstance(S, int) else mask_of(S)
            if popcount(m) != d:
                raise ValueError(f"set {elements_of(m)} does not have size {d}")
            v = as_ext(v)
            if not is_neg_inf(v):
                vals[m] = v
        if not vals:
            raise ValueError("valuated matroid must have a finite value")
        self.n = n
        self.d = d
        self.values = dict(sorted(vals.items()))

    def __call__(self, B) -> ExtValue:
        return self.values.get(B if isinstance(B, int) else mask_of(B), NEG_INF)

    def __eq__(self, other):
        return isinstance(other, ValuatedMatroid) and (self.n, self.d, self.values) == (other.n, other.d, other.values)

    def __repr__(self):
        return f"ValuatedMatroid(n={self.n}, d={self.d}, |support|={len(self.values)})"


def is_valuated_matroid(vm: ValuatedMatroid) -> Verdict:
    """Symmetric exchange check; witness is the least failing (B1, B2, b1)."""
    keys = list(vm.values)
    scaled = dict(zip(keys, _scaled(list(vm.values.values()))))

    def val(m):
        return scaled.get(m, NEG_INF)

    for B1 in keys:
        for B2 in keys:
            lhs = scaled[B1] + scaled[B2]
            only2 = elements_of(B2 & ~B1)
            for b1 in elements_of(B1 & ~B2):
                x1 = 1 << b1
                if not any(
                    lhs <= val((B1 ^ x1) | (1 << b2)) + val((B2 ^ (1 << b2)) | x1) for b2 in only2
                ):
                    return Verdict(False, (elements_of(B1), elements_of(B2), b1), "symmetric exchange fails")
    return Verdict(True)


def murota_extension(vm: ValuatedMatroid) -> SetFunction:
    """nu(S) = max value of a d-subset containing S (max of nothing is -inf)."""
    vals: List[ExtValue] = [NEG_INF] * (1 << vm.n)
    for B, v in vm.values.items():
        sub = B
        while True:
            if is_neg_inf(vals[sub]) or v > vals[sub]:
                vals[sub] = v
            if sub == 0:
                break
            sub = (sub - 1) & B
    return SetFunction(vm.n, vals)


def ultrametric_from(nu: SetFunction, q) -> UltrametricFn:
    """d(i,j) = 2 q^(-nu(ij) + nu(i) + nu(j) - nu(empty)) for i != j."""
    n = nu.n
    small = [S for S in range(1 << n) if popcount(S) <= 2]
    for S in small:
        if is_neg_inf(nu.values[S]):
            raise DomainTooSmall(f"set {elements_of(S)} is outside the effective domain")
    e = nu.values[0]
    rows = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            expo = nu.values[(1 << i) | (1 << j)] - nu.values[1 << i] - nu.values[1 << j] + e
            rows[i][j] = rows[j][i] = 2 * q_neg_pow(q, expo)
    d = UltrametricFn(rows)
    bad = d.three_point_violation()
    if bad is not None:
        raise NotUltrametric(f"three-point condition fails on {bad}; is nu M-natural concave?", witness=bad)
    return d


def multiset_counts(S, n: int) -> Tuple[int, ...]:
    """Multiplicity vector of a multiset given as a list of elements or a mapping."""
    if isinstance(S, Mapping):
        c = Counter({int(k): int(v) for k, v in S.items()})
    else:
        c = Counter(int(x) for x in S)
    for e in c:
        if not 0 <= e < n:
            raise ValueError(f"element {e} outside the ground set")
    return tuple(c.get(e, 0) for e in range(n))


@dataclass(frozen=True)
class DuplicateExtension:
    nu: SetFunction
    collapse: Tuple[int, ...]  # element of E' -> element of E
    counts: Tuple[int, ...]

    @property
    def n_doubled(self) -> int:
        return sum(1 for c in self.counts if c == 2)


def duplicate_extend(nu: SetFunction, S) -> DuplicateExtension:
    """Extension to E' = support of S plus a second copy of each doubled element.

    nu'(I) = nu(pi(I)) when the copy-collapsing map pi is injective on I, and
    -inf otherwise.
    """
    counts = multiset_counts(S, nu.n)
    if any(c > 2 for c in counts):
        raise MultiplicityTooHigh("multiplicities must be at most 2")
    base = [e for e in range(nu.n) if counts[e] >= 1]
    copies = [e for e in range(nu.n) if counts[e] == 2]
    collapse = tuple(base + copies)
    m = len(collapse)
    vals: List[ExtValue] = []
    for I in range(1 << m):
        image = 0
        ok = True
        for k in elements_of(I):
            bit = 1 << collapse[k]
            if image & bit:
                ok = False
                break
            image |= bit
        vals.append(nu.values[image] if ok else NEG_INF)
    return DuplicateExtension(SetFunction(m, vals), collapse, counts)
