"""Log-concavity inequality suites for set functions and matroids."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

from .errors import BadIndices, BadSizes, DegreeMismatch, MultiplicityTooHigh
from .exactnum import format_rational, is_neg_inf, q_neg_pow, sign
from .matroid import Matroid, n_partitions
from .poly import HomogPoly, poly_mul
from .setfn import SetFunction, multiset_counts
from .verdict import popcount

STYLES = ("M1", "M2", "M3")


@dataclass(frozen=True)
class IneqReport:
    claim: str
    params: Dict[str, Any]
    verdict: bool
    margin: Any = None
    witness: Any = None

    def __bool__(self):
        return self.verdict


def iq_counts(nu: SetFunction, q, exact: bool = True) -> List:
    """I_k = sum over k-subsets of q^(-nu(S)), with q^inf = 0."""
    out = [Fraction(0) if exact else 0.0 for _ in range(nu.n + 1)]
    for S, v in enumerate(nu.values):
        if not is_neg_inf(v):
            out[popcount(S)] += q_neg_pow(q, v, exact)
    return out


def ulc_weight(style: str, k: int, n: int) -> Fraction:
    if style == "M1":
        return Fraction(1)
    if style == "M2":
        return 1 + Fraction(1, k)
    if style == "M3":
        return (1 + Fraction(1, k)) * (1 + Fraction(1, n - k))
    raise ValueError(f"unknown style {style!r}")


def check_ulc(seq: Sequence, style: str = "M3", n: Optional[int] = None, claim: Optional[str] = None) -> List[IneqReport]:
    """seq[k]^2 >= w(k) seq[k-1] seq[k+1] for 0 < k < n, one report per k."""
    n = len(seq) - 1 if n is None else n
    if len(seq) != n + 1:
        raise BadSizes(f"sequence has length {len(seq)}, expected {n + 1}")
    claim = claim or f"ulc_{style}"
    out = []
    for k in range(1, n):
        w = ulc_weight(style, k, n)
        margin = seq[k] * seq[k] - w * seq[k - 1] * seq[k + 1]
        ok = sign(margin) >= 0
        out.append(IneqReport(claim, {"k": k, "style": style}, ok, margin, None if ok else {"k": k}))
    return out


def iq_poly(nu: SetFunction, q, k: int, exact: bool = True) -> HomogPoly:
    """sum over k-subsets S of q^(-nu(S)) x^S."""
    if not 0 <= k <= nu.n:
        raise BadIndices(f"k = {k} outside 0..{nu.n}")
    t = {}
    for S, v in enumerate(nu.values):
        if popcount(S) == k and not is_neg_inf(v):
            t[tuple((S >> i) & 1 for i in range(nu.n))] = q_neg_pow(q, v, exact)
    return HomogPoly(nu.n, k, t)


def poly_geq(f: HomogPoly, g: HomogPoly, claim: str = "poly_geq", params: Optional[dict] = None) -> IneqReport:
    """Coefficientwise f >= g; the witness is the first negative monomial of f - g in lex order."""
    if f.nvars != g.nvars:
        raise DegreeMismatch("polynomials have different numbers of variables")
    if f.degree != g.degree and not (f.is_zero() or g.is_zero()):
        raise DegreeMismatch(f"degrees {f.degree} and {g.degree} differ")
    diff = f - g
    margin = min(diff.terms.values(), default=Fraction(0))
    for e, c in diff.terms.items():
        if sign(c) < 0:
            return IneqReport(claim, params or {}, False, margin, {"monomial": list(e), "coefficient": c})
    return IneqReport(claim, params or {}, True, margin)


def valid_family_tuples(n: int) -> Iterator[Tuple[int, int, int, int]]:
    """All 0 <= i <= j <= k <= l <= n with i + l = j + k."""
    for i, j, k in itertools.combinations_with_replacement(range(n + 1), 3):
        l = j + k - i
        if k <= l <= n:
            yield (i, j, k, l)


def _check_tuple(i, j, k, l, n):
    if not (0 <= i <= j <= k <= l <= n and i + l == j + k):
        raise BadIndices(f"invalid index tuple {(i, j, k, l)} for n = {n}")


class PolyFamily:
    """Cached I_{q,nu;k}(x) polynomials and their pairwise products for one (nu, q)."""

    def __init__(self, nu: SetFunction, q, exact: bool = True):
        self.nu = nu
        self.q = q
        self.polys = [iq_poly(nu, q, k, exact) for k in range(nu.n + 1)]
        self._prod: Dict[Tuple[int, int], HomogPoly] = {}

    def product(self, a: int, b: int) -> HomogPoly:
        key = (min(a, b), max(a, b))
        if key not in self._prod:
            self._prod[key] = poly_mul(self.polys[key[0]], self.polys[key[1]])
        return self._prod[key]

    def check(self, i, j, k, l) -> IneqReport:
        _check_tuple(i, j, k, l, self.nu.n)
        f = self.product(j, k).scale(math.factorial(j) * math.factorial(k))
        g = self.product(i, l).scale(math.factorial(i) * math.factorial(l))
        return poly_geq(f, g, "poly_family", {"ijkl": [i, j, k, l], "q": format_rational(self.q)})

    def check_adjacent(self, k: int, weight=None) -> IneqReport:
        """I_k^2 >= w I_{k-1} I_{k+1}, default weight (1 + 1/k)."""
        w = 1 + Fraction(1, k) if weight is None else Fraction(weight)
        f = self.product(k, k)
        g = self.product(k - 1, k + 1).scale(w)
        return poly_geq(f, g, "thm_qpolynomial", {"k": k, "q": format_rational(self.q)})


def check_poly_family(nu: SetFunction, q, i: int, j: int, k: int, l: int, exact: bool = True) -> IneqReport:
    """j! I_j(x) k! I_k(x) >= i! I_i(x) l! I_l(x) coefficientwise."""
    _check_tuple(i, j, k, l, nu.n)
    return PolyFamily(nu, q, exact).check(i, j, k, l)


def _split_multiset(counts: Sequence[int]):
    if any(c > 2 for c in counts):
        raise MultiplicityTooHigh("a union of two sets has multiplicities at most 2")
    doubles = sum(1 << e for e, c in enumerate(counts) if c == 2)
    singles = [e for e, c in enumerate(counts) if c == 1]
    return doubles, singles


def n_s_coeff(nu: SetFunction, q, S, a: int, b: int, exact: bool = True):
    """Sum of q^(-nu(A) - nu(B)) over sets A, B with |A| = a, |B| = b and A + B = S."""
    counts = multiset_counts(S, nu.n)
    if a < 0 or b < 0 or a + b != sum(counts):
        raise BadSizes(f"need a + b = |S| = {sum(counts)}, got {a} + {b}")
    doubles, singles = _split_multiset(counts)
    nd = popcount(doubles)
    total = Fraction(0) if exact else 0.0
    if a < nd or b < nd:
        return total
    for X in itertools.combinations(singles, a - nd):
        A = doubles | sum(1 << e for e in X)
        B = doubles | sum(1 << e for e in singles if e not in X)
        va, vb = nu.values[A], nu.values[B]
        if is_neg_inf(va) or is_neg_inf(vb):
            continue
        total += q_neg_pow(q, va, exact) * q_neg_pow(q, vb, exact)
    return total


def check_lc4acoeff(nu: SetFunction, q, S, i: int, j: int, k: int, l: int, n: Optional[int] = None) -> IneqReport:
    """(n-j)!(n-k)! N^S(j,k) >= (n-i)!(n-l)! N^S(i,l) with i + l = j + k = |S|."""
    n = nu.n if n is None else n
    size = sum(multiset_counts(S, nu.n))
    if not (0 <= i <= j <= k <= l and i + l == j + k == size):
        raise BadIndices(f"invalid index tuple {(i, j, k, l)} for |S| = {size}")
    def side(a, b):
        # a set of size > n does not exist, so N^S vanishes there
        if a > n or b > n:
            return Fraction(0)
        return math.factorial(n - a) * math.factorial(n - b) * n_s_coeff(nu, q, S, a, b)

    lhs, rhs = side(j, k), side(i, l)
    margin = lhs - rhs
    ok = sign(margin) >= 0
    params = {"S": list(multiset_counts(S, nu.n)), "ijkl": [i, j, k, l], "q": format_rational(q)}
    return IneqReport("lc4acoeff", params, ok, margin, None if ok else {"lhs": lhs, "rhs": rhs})


def check_partition_weighted(nu: SetFunction, q, S, i: int, j: int, k: int, l: int) -> IneqReport:
    """j! k! N^S(j,k) >= i! l! N^S(i,l) with i + l = j + k = |S|."""
    size = sum(multiset_counts(S, nu.n))
    if not (0 <= i <= j <= k <= l and i + l == j + k == size):
        raise BadIndices(f"invalid index tuple {(i, j, k, l)} for |S| = {size}")
    f = math.factorial
    lhs = f(j) * f(k) * n_s_coeff(nu, q, S, j, k)
    rhs = f(i) * f(l) * n_s_coeff(nu, q, S, i, l)
    margin = lhs - rhs
    ok = sign(margin) >= 0
    params = {"S": list(multiset_counts(S, nu.n)), "ijkl": [i, j, k, l], "q": format_rational(q)}
    return IneqReport("ns_weighted", params, ok, margin, None if ok else {"lhs": lhs, "rhs": rhs})


def check_cor_partition(M: Matroid, i: int, j: int, k: int, l: int) -> IneqReport:
    """j! k! N_M(j,k) >= i! l! N_M(i,l) with i + l = j + k = n."""
    n = M.n
    if not (0 <= i <= j <= k <= l and i + l == j + k == n):
        raise BadIndices(f"invalid index tuple {(i, j, k, l)} for n = {n}")
    f = math.factorial
    lhs = f(j) * f(k) * n_partitions(M, j, k)
    rhs = f(i) * f(l) * n_partitions(M, i, l)
    ok = lhs >= rhs
    return IneqReport("cor_partition", {"ijkl": [i, j, k, l]}, ok, lhs - rhs, None if ok else {"lhs": lhs, "rhs": rhs})


def partition_tuples(n: int) -> Iterator[Tuple[int, int, int, int]]:
    """All 0 <= i <= j <= k <= l with i + l = j + k = n."""
    for i in range(n // 2 + 1):
        for j in range(i, n // 2 + 1):
            yield (i, j, n - j, n - i)


def multisets_of_size(n: int, size: int) -> Iterator[Tuple[int, ...]]:
    """Multiplicity vectors in {0,1,2}^n with the given total."""
    for counts in itertools.product(range(3), repeat=n):
        if sum(counts) == size:
            yield counts
