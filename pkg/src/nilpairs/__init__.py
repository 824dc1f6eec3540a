"""Canonical forms for commuting nilpotent pairs ``(A, B)`` with ``A ~ J_m ⊕ J_n``, ``m > n``."""

from .canon import (
    CanonResult,
    Form,
    appendix_oracle_m6n4,
    canonical_form,
    canonical_rank,
    canonicalize_pair,
    leading_pair_index,
    pairs_similar,
    try_eliminate,
)
from .exactmat import DenseMatrix, conjugate, jordan_basis, jordan_type, mat_inverse, mat_mul, mat_rank
from .field import GF, Q, Scalar, parse_field, scalar_arith, scalar_parse
from .orbit import OrbitReport, certify_classification, compute_orbits, enumerate_nilc, enumerate_stab
from .tacommutant import (
    ShortForm,
    StabShort,
    apply_stab,
    arm_length,
    commutant_check,
    compress,
    expand,
    is_ta_matrix,
    stab_expand,
)

__version__ = "0.1.0"
