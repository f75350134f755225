"""Exact verification of tree PSD bounds, M-natural concavity, Lorentzian
generating polynomials and matroid log-concavity inequalities."""

from .errors import TreeLCError
from .exactnum import NEG_INF, q_neg_pow
from .matroid import Matroid, ik_counts, n_partitions
from .poly import HomogPoly, is_lorentzian, z_poly
from .setfn import SetFunction, ValuatedMatroid, is_mnat_concave, is_valuated_matroid, murota_extension
from .symmat import SymMatrix, inertia, is_psd
from .trees import UltrametricTree, a_matrix, c_T, certify_a_psd, thm_psd_matrix
from .verdict import Verdict

__version__ = "0.1.0"

__all__ = [
    "NEG_INF",
    "HomogPoly",
    "Matroid",
    "SetFunction",
    "SymMatrix",
    "TreeLCError",
    "UltrametricTree",
    "ValuatedMatroid",
    "Verdict",
    "a_matrix",
    "c_T",
    "certify_a_psd",
    "ik_counts",
    "inertia",
    "is_lorentzian",
    "is_mnat_concave",
    "is_psd",
    "is_valuated_matroid",
    "murota_extension",
    "n_partitions",
    "q_neg_pow",
    "thm_psd_matrix",
    "z_poly",
]
