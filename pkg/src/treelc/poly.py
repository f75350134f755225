"""Sparse homogeneous polynomials with rational coefficients and the Lorentzian test.

Monomials are exponent tuples.  Terms are kept in lex term order with
x0 > x1 > ... (descending exponent tuples), and every witness search walks
that same order.
"""
from __future__ import annotations

import functools
import math
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import SizeCap
from .exactnum import is_neg_inf, q_neg_pow, sign
from .matroid import Matroid
from .setfn import SetFunction, from_matroid
from .symmat import Inertia, inertia, SymMatrix
from .verdict import Verdict, popcount

Exp = Tuple[int, ...]

DEFAULT_ALPHA_CAP = 10**6


def _lex(exps: Iterable[Exp]) -> List[Exp]:
    return sorted(exps, reverse=True)


def exp_factorial(a: Exp) -> int:
    out = 1
    for k in a:
        out *= math.factorial(k)
    return out


class HomogPoly:
    """Homogeneous polynomial: ``terms`` maps exponent tuples to nonzero coefficients."""

    __slots__ = ("nvars", "degree", "terms")

    def __init__(self, nvars: int, degree: int, terms: Optional[Mapping[Exp, object]] = None):
        clean: Dict[Exp, object] = {}
        for e, c in (terms or {}).items():
            e = tuple(int(k) for k in e)
            if len(e) != nvars:
                raise ValueError(f"exponent {e} has the wrong length for {nvars} variables")
            if any(k < 0 for k in e):
                raise ValueError(f"negative exponent in {e}")
            if sum(e) != degree:
                raise ValueError(f"exponent {e} does not have degree {degree}")
            if not isinstance(c, float):
                c = Fraction(c)
            if sign(c) != 0:
                clean[e] = clean.get(e, 0) + c
        self.nvars = nvars
        self.degree = degree
        self.terms = {e: clean[e] for e in _lex(clean) if sign(clean[e]) != 0}

    @classmethod
    def zero(cls, nvars: int, degree: int) -> "HomogPoly":
        return cls(nvars, degree, {})

    @classmethod
    def variable(cls, nvars: int, i: int) -> "HomogPoly":
        return cls(nvars, 1, {tuple(int(k == i) for k in range(nvars)): 1})

    def is_zero(self) -> bool:
        return not self.terms

    def coeff(self, e: Exp):
        return self.terms.get(tuple(e), Fraction(0))

    def support(self) -> List[Exp]:
        return list(self.terms)

    def __eq__(self, other):
        if not isinstance(other, HomogPoly):
            return NotImplemented
        if self.nvars != other.nvars:
            return False
        if self.is_zero() and other.is_zero():
            return True
        return self.degree == other.degree and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, self.degree, tuple(self.terms.items())))

    def _same_shape(self, other: "HomogPoly"):
        if self.nvars != other.nvars:
            raise ValueError("polynomials have different numbers of variables")
        if self.degree != other.degree and not (self.is_zero() or other.is_zero()):
            raise ValueError("polynomials have different degrees")

    def __add__(self, other: "HomogPoly") -> "HomogPoly":
        self._same_shape(other)
        d = self.degree if not self.is_zero() else other.degree
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t.get(e, 0) + c
        return HomogPoly(self.nvars, d, t)

    def __neg__(self) -> "HomogPoly":
        return HomogPoly(self.nvars, self.degree, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "HomogPoly") -> "HomogPoly":
        return self + (-other)

    def scale(self, c) -> "HomogPoly":
        return HomogPoly(self.nvars, self.degree, {e: c * v for e, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, HomogPoly):
            return poly_mul(self, other)
        return self.scale(other)

    __rmul__ = __mul__

    def __repr__(self):
        return f"HomogPoly({format_poly(self)})"

    def __str__(self):
        return format_poly(self)


def var_names(nvars: int) -> List[str]:
    return [f"x{i}" for i in range(nvars)]


def format_poly(f: HomogPoly, names: Optional[Sequence[str]] = None) -> str:
    if f.is_zero():
        return "0"
    names = names or var_names(f.nvars)
    parts = []
    for e, c in f.terms.items():
        mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k)
        if not mono:
            parts.append(str(c))
        elif c == 1:
            parts.append(mono)
        elif c == -1:
            parts.append(f"-{mono}")
        else:
            parts.append(f"{c}*{mono}")
    return " + ".join(parts).replace("+ -", "- ")


# --------------------------------------------------------------------------
# arithmetic and calculus


def poly_mul(f: HomogPoly, g: HomogPoly) -> HomogPoly:
    if f.nvars != g.nvars:
        raise ValueError("polynomials have different numbers of variables")
    t: Dict[Exp, object] = {}
    for e1, c1 in f.terms.items():
        for e2, c2 in g.terms.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            t[e] = t.get(e, 0) + c1 * c2
    return HomogPoly(f.nvars, f.degree + g.degree, t)


def partial(f: HomogPoly, i: int) -> HomogPoly:
    alpha = [0] * f.nvars
    alpha[i] = 1
    return partial_multi(f, alpha)


def partial_multi(f: HomogPoly, alpha: Sequence[int]) -> HomogPoly:
    """The iterated derivative prod_i d_i^alpha_i f."""
    alpha = tuple(alpha)
    if len(alpha) != f.nvars:
        raise ValueError("multi-index has the wrong length")
    k = sum(alpha)
    if k > f.degree:
        return HomogPoly.zero(f.nvars, 0)
    t = {}
    for e, c in f.terms.items():
        if all(a <= b for a, b in zip(alpha, e)):
            mult = 1
            for a, b in zip(alpha, e):
                mult *= math.perm(b, a)
            t[tuple(b - a for a, b in zip(alpha, e))] = c * mult
    return HomogPoly(f.nvars, f.degree - k, t)


def hessian(f: HomogPoly) -> SymMatrix:
    """Hessian of a quadratic form (constant matrix)."""
    if f.degree != 2:
        raise ValueError("hessian() expects a quadratic form")
    n = f.nvars
    H = [[Fraction(0)] * n for _ in range(n)]
    for e, c in f.terms.items():
        idx = [i for i in range(n) for _ in range(e[i])]
        i, j = idx
        if i == j:
            H[i][i] = 2 * c
        else:
            H[i][j] = H[j][i] = c
    return SymMatrix(H)


def specialize(f: HomogPoly, blocks: Sequence[Sequence[int]]) -> HomogPoly:
    """Substitute one fresh variable per block (blocks partition the variables)."""
    owner = {}
    for b, blk in enumerate(blocks):
        for v in blk:
            if v in owner:
                raise ValueError(f"variable {v} appears in two blocks")
            owner[v] = b
    if set(owner) != set(range(f.nvars)):
        raise ValueError("blocks must partition the variables")
    t: Dict[Exp, object] = {}
    for e, c in f.terms.items():
        new = [0] * len(blocks)
        for v, k in enumerate(e):
            new[owner[v]] += k
        key = tuple(new)
        t[key] = t.get(key, 0) + c
    return HomogPoly(len(blocks), f.degree, t)


def specialize_bivariate(f: HomogPoly, blocks: Sequence[Sequence[int]]) -> HomogPoly:
    if len(blocks) != 2:
        raise ValueError("bivariate specialization needs exactly two blocks")
    return specialize(f, blocks)


def coefficient_slices(f: HomogPoly, i: int) -> List[HomogPoly]:
    """(f_0, ..., f_d) with f = sum_k x_i^k f_k, each f_k free of x_i."""
    d = f.degree
    buckets: List[Dict[Exp, object]] = [{} for _ in range(d + 1)]
    for e, c in f.terms.items():
        buckets[e[i]][e[:i] + e[i + 1 :]] = c
    return [HomogPoly(f.nvars - 1, d - k, buckets[k]) for k in range(d + 1)]


# --------------------------------------------------------------------------
# M-convex sets and the Lorentzian test


def is_mconvex_set(J: Iterable[Sequence[int]]) -> Verdict:
    """Symmetric exchange check; witness (alpha, beta, i) is the first failure in lex order."""
    return _mconvex_cached(frozenset(tuple(a) for a in J))


@functools.lru_cache(maxsize=4096)
def _mconvex_cached(J: frozenset) -> Verdict:
    pts = _lex(J)
    if pts:
        n = len(pts[0])
        d = sum(pts[0])
        if any(len(a) != n or sum(a) != d for a in pts):
            raise ValueError("all points must lie in the same simplex")
    for a in pts:
        for b in pts:
            if a == b:
                continue
            for i in range(len(a)):
                if a[i] <= b[i]:
                    continue
                ok = False
                for j in range(len(a)):
                    if b[j] <= a[j]:
                        continue
                    a2 = list(a)
                    a2[j] += 1
                    a2[i] -= 1
                    if tuple(a2) not in J:
                        continue
                    b2 = list(b)
                    b2[i] += 1
                    b2[j] -= 1
                    if tuple(b2) in J:
                        ok = True
                        break
                if not ok:
                    return Verdict(False, (a, b, i), "symmetric exchange fails")
    return Verdict(True)


def _simplex_size(n: int, d: int) -> int:
    return math.comb(n + d - 1, d) if d >= 0 else 0


def codegree_two_hessians(f: HomogPoly) -> Dict[Exp, Dict[Tuple[int, int], object]]:
    """Nonzero Hessians of d^alpha f for alpha of degree d-2, keyed by alpha.

    The (i,j) entry of Hess(d^alpha f) equals c_gamma * gamma! with
    gamma = alpha + e_i + e_j.
    """
    out: Dict[Exp, Dict[Tuple[int, int], object]] = {}
    n = f.nvars
    for g, c in f.terms.items():
        w = c * exp_factorial(g)
        nz = [k for k in range(n) if g[k]]
        for a, i in enumerate(nz):
            for j in nz[a:]:
                if i == j and g[i] < 2:
                    continue
                alpha = list(g)
                alpha[i] -= 1
                alpha[j] -= 1
                out.setdefault(tuple(alpha), {})[(i, j)] = w
    return out


def _hessian_inertia(entries: Mapping[Tuple[int, int], object], nvars: int) -> Inertia:
    active = sorted({k for ij in entries for k in ij})
    pos = {v: a for a, v in enumerate(active)}
    m = len(active)
    rows = [[Fraction(0)] * m for _ in range(m)]
    for (i, j), w in entries.items():
        rows[pos[i]][pos[j]] = w
        rows[pos[j]][pos[i]] = w
    inner = inertia(SymMatrix(rows))
    return Inertia(inner.n_pos, inner.n_zero + nvars - m, inner.n_neg)


def is_lorentzian(f: HomogPoly, cap: int = DEFAULT_ALPHA_CAP) -> Verdict:
    """Lorentzian test: nonnegative coefficients, M-convex support and, for every
    alpha of degree d-2, a nonnegative Hessian of d^alpha f with at most one
    positive eigenvalue.

    Witnesses: ("coefficient", exp, c), ("exchange", alpha, beta, i) or
    ("hessian", alpha, inertia).
    """
    for e, c in f.terms.items():
        if sign(c) < 0:
            return Verdict(False, ("coefficient", e, c), "negative coefficient")
    if f.is_zero():
        return Verdict(True)
    ex = is_mconvex_set(f.terms)
    if not ex:
        return Verdict(False, ("exchange",) + ex.witness, "support is not M-convex")
    if f.degree <= 1:
        return Verdict(True)
    if _simplex_size(f.nvars, f.degree - 2) > cap:
        raise SizeCap(f"more than {cap} multi-indices of degree {f.degree - 2}")
    hs = codegree_two_hessians(f)
    for alpha in _lex(hs):
        entries = hs[alpha]
        if any(sign(w) < 0 for w in entries.values()):
            return Verdict(False, ("hessian-entry", alpha), "negative Hessian entry")
        if len(entries) == 1 and next(iter(entries))[0] == next(iter(entries))[1]:
            continue  # a single positive diagonal entry has one positive eigenvalue
        inn = _hessian_inertia(entries, f.nvars)
        if inn.n_pos > 1:
            return Verdict(False, ("hessian", alpha, inn), "Hessian has more than one positive eigenvalue")
    return Verdict(True)


def is_lorentzian_bivariate(f: HomogPoly) -> Verdict:
    """Normalized coefficients a_k / C(d,k) nonnegative, log-concave, no internal zeros.

    a_k is the coefficient of x0^k x1^(d-k); the witness names the failing k.
    """
    if f.nvars != 2:
        raise ValueError("expected a bivariate polynomial")
    d = f.degree
    b = [f.coeff((k, d - k)) / math.comb(d, k) for k in range(d + 1)]
    for k, x in enumerate(b):
        if sign(x) < 0:
            return Verdict(False, ("negative", k), "negative coefficient")
    nz = [k for k, x in enumerate(b) if sign(x) != 0]
    if nz:
        for k in range(nz[0], nz[-1] + 1):
            if sign(b[k]) == 0:
                return Verdict(False, ("internal-zero", k), "internal zero")
    for k in range(1, d):
        if sign(b[k] * b[k] - b[k - 1] * b[k + 1]) < 0:
            return Verdict(False, ("log-concavity", k), "not log-concave")
    return Verdict(True)


# --------------------------------------------------------------------------
# generating polynomials


def z_poly(nu: SetFunction, q, exact: bool = True) -> HomogPoly:
    """sum_S q^(-nu(S)) x^S y^(n-|S|); the variable y has index n."""
    n = nu.n
    t = {}
    for S, v in enumerate(nu.values):
        if is_neg_inf(v):
            continue
        e = tuple((S >> i) & 1 for i in range(n)) + (n - popcount(S),)
        t[e] = q_neg_pow(q, v, exact)
    return HomogPoly(n + 1, n, t)


def nz_poly(nu: SetFunction, q, exact: bool = True) -> HomogPoly:
    """Normalized version: the y-power term carries 1/(n-|S|)!."""
    n = nu.n
    z = z_poly(nu, q, exact)
    return HomogPoly(n + 1, n, {e: c / math.factorial(e[n]) for e, c in z.terms.items()})


def tutte_poly(M: Matroid, q, exact: bool = True) -> HomogPoly:
    return z_poly(from_matroid(M, "rank"), q, exact)


def indep_poly(M: Matroid) -> HomogPoly:
    return z_poly(from_matroid(M, "indicator"), 1)


class MConvexFunction:
    """Function on the simplex of degree d in n variables; absent points are +inf."""

    def __init__(self, n: int, d: int, values: Mapping[Sequence[int], object]):
        self.n = n
        self.d = d
        vals = {}
        for a, v in values.items():
            a = tuple(int(k) for k in a)
            if len(a) != n or sum(a) != d or min(a, default=0) < 0:
                raise ValueError(f"point {a} is not in the simplex")
            vals[a] = Fraction(v)
        self.values = {a: vals[a] for a in _lex(vals)}

    def dom(self) -> List[Exp]:
        return list(self.values)


def is_mconvex_function(nu: MConvexFunction) -> Verdict:
    """Exchange check: nu(a) + nu(b) >= nu(a + e_j - e_i) + nu(b + e_i - e_j) for some j."""
    inf = float("inf")
    vals = nu.values

    def val(a):
        return vals.get(a, inf)

    for a in vals:
        for b in vals:
            for i in range(nu.n):
                if a[i] <= b[i]:
                    continue
                ok = False
                for j in range(nu.n):
                    if b[j] <= a[j]:
                        continue
                    a2 = list(a)
                    a2[j] += 1
                    a2[i] -= 1
                    b2 = list(b)
                    b2[i] += 1
                    b2[j] -= 1
                    if vals[a] + vals[b] >= val(tuple(a2)) + val(tuple(b2)):
                        ok = True
                        break
                if not ok:
                    return Verdict(False, (a, b, i), "exchange fails")
    return Verdict(True)


def f_poly(nu: MConvexFunction, q, exact: bool = True) -> HomogPoly:
    """Normalized generating polynomial sum_a q^nu(a) x^a / a!."""
    return HomogPoly(nu.n, nu.d, {a: q_neg_pow(q, -v, exact) / exp_factorial(a) for a, v in nu.values.items()})


def set_family_poly(n: int, d: int, sets: Iterable[int]) -> HomogPoly:
    """0/1-exponent generating polynomial of a family of d-subsets (bitmasks)."""
    return HomogPoly(n, d, {tuple((S >> i) & 1 for i in range(n)): 1 for S in sets})


def generating_polynomial(source, kind: str, q=1, exact: bool = True) -> HomogPoly:
    kind = kind.lower()
    if kind == "z":
        return z_poly(source, q, exact)
    if kind == "nz":
        return nz_poly(source, q, exact)
    if kind == "t":
        return tutte_poly(source, q, exact)
    if kind == "i":
        return indep_poly(source)
    if kind in ("f", "f_mconvex"):
        return f_poly(source, q, exact)
    raise ValueError(f"unknown generating polynomial kind {kind!r}")
