"""Exact symmetric matrices: characteristic polynomial, inertia, PSD certificates.

The verdict path (``inertia``) goes through the exact characteristic
polynomial and Descartes' rule of signs, which counts roots exactly because a
symmetric matrix has only real eigenvalues.  Symmetric elimination is used
only to build certificates and witnesses (``is_psd``); the two paths are
cross-checked in the tests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import NonPositiveScale, NotSymmetric, SingularPivot, SizeCap
from .exactnum import Scalar, format_rational, sign

MAX_SIZE = 64


def _coerce(x) -> Scalar:
    if isinstance(x, float):
        return x
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x)


@dataclass(frozen=True)
class SymMatrix:
    """Dense symmetric matrix with Fraction (or, in float mode, float) entries."""

    rows: tuple

    def __init__(self, rows: Iterable[Iterable]):
        data = tuple(tuple(_coerce(x) for x in r) for r in rows)
        n = len(data)
        if n == 0:
            raise ValueError("empty matrix")
        if n > MAX_SIZE:
            raise SizeCap(f"matrix size {n} exceeds cap {MAX_SIZE}")
        for i, r in enumerate(data):
            if len(r) != n:
                raise ValueError("matrix is not square")
            for j in range(i):
                if r[j] != data[j][i]:
                    raise NotSymmetric(f"entries ({i},{j}) and ({j},{i}) differ")
        object.__setattr__(self, "rows", data)

    @classmethod
    def constant(cls, n: int, c) -> "SymMatrix":
        return cls([[c] * n for _ in range(n)])

    @classmethod
    def identity(cls, n: int) -> "SymMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def diagonal(cls, diag: Sequence) -> "SymMatrix":
        n = len(diag)
        return cls([[diag[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @property
    def size(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __add__(self, other: "SymMatrix") -> "SymMatrix":
        return SymMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: "SymMatrix") -> "SymMatrix":
        return SymMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self) -> "SymMatrix":
        return SymMatrix([[-a for a in r] for r in self.rows])

    def scale(self, c) -> "SymMatrix":
        c = _coerce(c)
        return SymMatrix([[c * a for a in r] for r in self.rows])

    def quad_form(self, v: Sequence) -> Scalar:
        n = self.size
        return sum(v[i] * self.rows[i][j] * v[j] for i in range(n) for j in range(n) if v[i] and v[j])

    def submatrix(self, idx: Sequence[int]) -> "SymMatrix":
        return SymMatrix([[self.rows[i][j] for j in idx] for i in idx])

    def permute(self, perm: Sequence[int]) -> "SymMatrix":
        return self.submatrix(perm)

    def to_lists(self) -> list:
        return [list(r) for r in self.rows]

    def to_json(self) -> list:
        return [[format_rational(x) if not isinstance(x, float) else x for x in r] for r in self.rows]

    def __repr__(self):
        body = "; ".join(" ".join(str(x) for x in r) for r in self.rows)
        return f"SymMatrix[{body}]"


@dataclass(frozen=True)
class Inertia:
    n_pos: int
    n_zero: int
    n_neg: int

    def __iter__(self):
        return iter((self.n_pos, self.n_zero, self.n_neg))

    def __add__(self, other: "Inertia") -> "Inertia":
        return Inertia(self.n_pos + other.n_pos, self.n_zero + other.n_zero, self.n_neg + other.n_neg)


# --------------------------------------------------------------------------
# characteristic polynomial and inertia


def _is_exact(M: SymMatrix) -> bool:
    return not any(isinstance(x, float) for r in M.rows for x in r)


def _integer_scaled(M: SymMatrix):
    """Return (B, s) with B = s*M an integer matrix and s a positive integer."""
    s = 1
    for r in M.rows:
        for x in r:
            s = s * x.denominator // math.gcd(s, x.denominator)
    B = [[int(x * s) for x in r] for r in M.rows]
    return B, s


def _faddeev_leverrier(A, exact_int: bool):
    n = len(A)
    coeffs = [1] + [0] * n
    Mk = [[0] * n for _ in range(n)]
    for k in range(1, n + 1):
        # Mk <- A*M_{k-1} + c_{k-1} I
        prev = coeffs[k - 1]
        AM = [[sum(A[i][t] * Mk[t][j] for t in range(n) if A[i][t]) for j in range(n)] for i in range(n)]
        for i in range(n):
            AM[i][i] += prev
        Mk = AM
        tr = sum(A[i][t] * Mk[t][i] for i in range(n) for t in range(n))
        if exact_int:
            q, r = divmod(-tr, k)
            assert r == 0, "Faddeev-LeVerrier division must be exact on integer input"
            coeffs[k] = q
        else:
            coeffs[k] = -tr / k
    return coeffs


def char_poly(M: SymMatrix) -> list:
    """Coefficients of det(lambda*I - M), highest degree first (leading 1)."""
    if _is_exact(M):
        B, s = _integer_scaled(M)
        c = _faddeev_leverrier(B, True)
        return [Fraction(ck, s**k) for k, ck in enumerate(c)]
    return _faddeev_leverrier([list(r) for r in M.rows], False)


def _sign_changes(seq) -> int:
    signs = [s for s in (sign(x) for x in seq) if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def inertia(M: SymMatrix) -> Inertia:
    """Exact eigenvalue sign counts via Descartes' rule on the char poly."""
    n = M.size
    if _is_exact(M):
        B, _ = _integer_scaled(M)
        c = _faddeev_leverrier(B, True)
    else:
        # positive scaling keeps eigenvalue signs; the tolerance becomes relative to the largest entry
        s = max((abs(x) for r in M.rows for x in r), default=0.0) or 1.0
        c = _faddeev_leverrier([[x / s for x in r] for r in M.rows], False)
    n_pos = _sign_changes(c)
    # p(-lambda): coefficient of lambda^(n-k) picks up (-1)^(n-k)
    n_neg = _sign_changes([ck if (n - k) % 2 == 0 else -ck for k, ck in enumerate(c)])
    n_zero = n - n_pos - n_neg
    trailing = 0
    for ck in reversed(c):
        if sign(ck) != 0:
            break
        trailing += 1
    if _is_exact(M):
        assert trailing == n_zero, "zero-root multiplicity mismatch"
    return Inertia(n_pos, n_zero, n_neg)


# --------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class RowOp:
    """Simultaneous row/column operation: row/col ``target`` += factor * row/col ``source``."""

    target: int
    source: int
    factor: Scalar


@dataclass(frozen=True)
class Relax:
    """Subtract ``amount`` (>= 0) from diagonal entry ``index``."""

    index: int
    amount: Scalar


def apply_steps(M: SymMatrix, steps: Sequence[Union[RowOp, Relax]]) -> list:
    A = M.to_lists()
    n = len(A)
    for st in steps:
        if isinstance(st, Relax):
            A[st.index][st.index] -= st.amount
            continue
        t, s, f = st.target, st.source, st.factor
        for k in range(n):
            A[t][k] += f * A[s][k]
        for k in range(n):
            A[k][t] += f * A[k][s]
    return A


@dataclass(frozen=True)
class Psd:
    """PSD certificate: replaying ``steps`` on M yields diag(pivots) with pivots >= 0.

    Relax steps subtract nonnegative diagonal amounts; each corresponds to
    dropping a PSD rank-one term, so a verified replay proves M is PSD.
    """

    steps: tuple
    pivots: tuple

    def __bool__(self):
        return True

    def replay(self, M: SymMatrix) -> bool:
        if any(sign(p) < 0 for p in self.pivots):
            return False
        if any(isinstance(s, Relax) and sign(s.amount) < 0 for s in self.steps):
            return False
        A = apply_steps(M, self.steps)
        n = len(A)
        return all(
            (sign(A[i][j] - self.pivots[i]) == 0) if i == j else sign(A[i][j]) == 0
            for i in range(n)
            for j in range(n)
        )


@dataclass(frozen=True)
class NotPsd:
    witness: tuple
    value: Scalar

    def __bool__(self):
        return False

    def replay(self, M: SymMatrix) -> bool:
        return sign(M.quad_form(self.witness)) < 0


PsdCertificate = Union[Psd, NotPsd]


def _primitive(v: Sequence) -> tuple:
    """Scale a nonzero rational vector to a primitive integer vector (same direction)."""
    if any(isinstance(x, float) for x in v):
        return tuple(v)
    v = [Fraction(x) for x in v]
    den = 1
    for x in v:
        den = den * x.denominator // math.gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    return tuple(Fraction(x // g) for x in ints)


def is_psd(M: SymMatrix) -> PsdCertificate:
    """Symmetric elimination producing a Psd certificate or a NotPsd witness."""
    n = M.size
    A = M.to_lists()
    P = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    steps = []
    for i in range(n):
        piv = A[i][i]
        s = sign(piv)
        if s < 0:
            v = _primitive(P[i])
            return NotPsd(v, M.quad_form(v))
        if s == 0:
            for j in range(i + 1, n):
                c = A[i][j]
                if sign(c) != 0:
                    # w = t e_i - sign(c) e_j gives w'Aw = A_jj - 2t|c| < 0
                    t = (abs(A[j][j]) + 1) / abs(c)
                    sc = sign(c)
                    w = [t * P[i][k] - sc * P[j][k] for k in range(n)]
                    v = _primitive(w)
                    return NotPsd(v, M.quad_form(v))
            continue
        for j in range(i + 1, n):
            if sign(A[j][i]) == 0:
                continue
            f = -A[j][i] / piv
            steps.append(RowOp(j, i, f))
            for k in range(n):
                A[j][k] += f * A[i][k]
            for k in range(n):
                A[k][j] += f * A[k][i]
            for k in range(n):
                P[j][k] += f * P[i][k]
    return Psd(tuple(steps), tuple(A[i][i] for i in range(n)))


# --------------------------------------------------------------------------
# block operations


def _inverse(rows: list) -> list:
    n = len(rows)
    A = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    for col in range(n):
        piv = next((r for r in range(col, n) if sign(A[r][col]) != 0), None)
        if piv is None:
            raise SingularPivot("pivot block is singular")
        A[col], A[piv] = A[piv], A[col]
        p = A[col][col]
        A[col] = [x / p for x in A[col]]
        for r in range(n):
            if r != col and sign(A[r][col]) != 0:
                f = A[r][col]
                A[r] = [a - f * b for a, b in zip(A[r], A[col])]
    return [r[n:] for r in A]


def schur_complement(M: SymMatrix, pivot_block: Iterable[int]) -> SymMatrix:
    """M_RR - M_RP M_PP^{-1} M_PR with R the complement of the pivot block."""
    P = sorted(set(pivot_block))
    R = [i for i in range(M.size) if i not in set(P)]
    if not P or not R:
        raise ValueError("pivot block must be a proper nonempty index subset")
    inv = _inverse([[M[i, j] for j in P] for i in P])
    X = [[sum(inv[a][b] * M[P[b], r] for b in range(len(P))) for r in R] for a in range(len(P))]
    return SymMatrix(
        [[M[r, s] - sum(M[r, P[a]] * X[a][js] for a in range(len(P))) for js, s in enumerate(R)] for r in R]
    )


def congruence_rescale(M: SymMatrix, d: Sequence) -> SymMatrix:
    d = [_coerce(x) for x in d]
    if len(d) != M.size:
        raise ValueError("scale vector has the wrong length")
    if any(sign(x) <= 0 for x in d):
        raise NonPositiveScale("all scale factors must be positive")
    n = M.size
    return SymMatrix([[d[i] * M[i, j] * d[j] for j in range(n)] for i in range(n)])
