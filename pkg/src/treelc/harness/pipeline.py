"""The Z -> Hessian -> Schur -> rescale -> tree-PSD trace for one (nu, q).

For a set function nu whose domain contains every set of size <= 2 the
steps are:

* ``dz``  = d_y^(n-2) Z / (n-2)!, a quadratic form in (x, y);
* ``A``   = its Hessian with y moved to index 0 and the y row/column divided
  by n-1;
* ``B``   = Schur complement of A on the pivot {0};
* ``C``   = q^(-nu(empty)) * diag(q^nu(i)) B diag(q^nu(i));
* ``D``   = the ultrametric built from nu, and T the tree realizing it.

The trace checks C = -[(1 - 1/n) ones - D/2] entrywise, the additive
inertia split inertia(A) = (1,0,0) + inertia(B), and that B NSD, C NSD and
the tree matrix PSD agree with each other and with n_pos(A) <= 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict

from ..errors import NonIntegerExponent
from ..exactnum import format_rational, q_neg_pow
from ..poly import hessian, partial_multi, z_poly
from ..setfn import SetFunction, ultrametric_from
from ..symmat import (
    Inertia,
    SymMatrix,
    congruence_rescale,
    inertia,
    is_psd,
    schur_complement,
)
from ..trees import UltrametricTree, angle, leaf_distance_matrix, thm_psd_matrix, tree_from_ultrametric


@dataclass(frozen=True)
class PipelineTrace:
    n: int
    q: Fraction
    A: SymMatrix
    B: SymMatrix
    C: SymMatrix
    D: SymMatrix
    tree: UltrametricTree
    inertia_A: Inertia
    inertia_B: Inertia
    b_nsd: bool
    c_nsd: bool
    tree_psd: bool
    c_matches_tree: bool
    tree_realizes_d: bool
    schur_bookkeeping: bool

    @property
    def a_one_positive(self) -> bool:
        return self.inertia_A.n_pos <= 1

    @property
    def ok(self) -> bool:
        """Every identity and equivalence the trace is meant to confirm."""
        return (
            self.c_matches_tree
            and self.tree_realizes_d
            and self.schur_bookkeeping
            and self.b_nsd == self.c_nsd == self.tree_psd == self.a_one_positive
        )

    def summary(self) -> Dict:
        return {
            "n": self.n,
            "q": format_rational(self.q),
            "inertia_A": list(self.inertia_A),
            "inertia_B": list(self.inertia_B),
            "b_nsd": self.b_nsd,
            "c_nsd": self.c_nsd,
            "tree_psd": self.tree_psd,
            "c_matches_tree": self.c_matches_tree,
            "tree_realizes_d": self.tree_realizes_d,
            "schur_bookkeeping": self.schur_bookkeeping,
        }


def _lift_to_radius_one(T: UltrametricTree) -> UltrametricTree:
    if T.radius == 1:
        return T
    if T.radius > 1:
        raise ValueError(f"tree radius {T.radius} exceeds 1")
    return UltrametricTree("lift", [("lift", T.root, 1 - T.radius)] + T.edges())


def a_of_nu(nu: SetFunction, q) -> SymMatrix:
    """Rescaled Hessian of d_y^(n-2) Z / (n-2)!, with y at index 0."""
    n = nu.n
    z = z_poly(nu, q)
    dz = partial_multi(z, [0] * n + [n - 2]).scale(Fraction(1, math.factorial(n - 2)))
    H = hessian(dz)
    H = H.permute([n] + list(range(n)))
    return congruence_rescale(H, [Fraction(1, n - 1)] + [Fraction(1)] * n)


def qlorentzian_trace(nu: SetFunction, q) -> PipelineTrace:
    n = nu.n
    if n < 2:
        raise ValueError("the trace needs a ground set with at least two elements")
    if not nu.is_integer_valued():
        raise NonIntegerExponent("exact pipeline needs integer values")
    q = Fraction(q)
    dmat = ultrametric_from(nu, q)  # raises DomainTooSmall / NotUltrametric
    A = a_of_nu(nu, q)
    B = schur_complement(A, [0])
    scale = [q_neg_pow(q, -nu.values[1 << i]) for i in range(n)]
    C = congruence_rescale(B, scale).scale(q_neg_pow(q, nu.values[0]))
    D = SymMatrix(dmat.d)

    target = -(SymMatrix.constant(n, angle(n)) - D.scale(Fraction(1, 2)))
    T = _lift_to_radius_one(tree_from_ultrametric(dmat))
    tree_realizes_d = leaf_distance_matrix(T) == D
    tree_mat = thm_psd_matrix(T)

    in_a, in_b = inertia(A), inertia(B)
    return PipelineTrace(
        n=n,
        q=q,
        A=A,
        B=B,
        C=C,
        D=D,
        tree=T,
        inertia_A=in_a,
        inertia_B=in_b,
        b_nsd=bool(is_psd(-B)),
        c_nsd=bool(is_psd(-C)),
        tree_psd=bool(is_psd(tree_mat)),
        c_matches_tree=C == target and -C == tree_mat,
        tree_realizes_d=tree_realizes_d,
        schur_bookkeeping=in_a == Inertia(1, 0, 0) + in_b,
    )
