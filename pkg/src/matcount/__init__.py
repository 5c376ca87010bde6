"""Exact counting experiments for matrices with polynomial entries.

Modules:

``polycore``   univariate integer polynomials, matrix specs, Ostrowski thresholds
``symrank``    exact rank and determinant (Bareiss, mod p, batched numpy kernels)
``symgroup``   partitions, symmetric-group characters, immanants, permanents
``countlab``   exhaustive box counts of rank, determinant and immanant conditions
``momentlab``  moments of Weyl-type sums and additive equations
``exponents``  exact rational exponents of the rank-counting bounds
``symbolic``   sparse multivariate polynomials and determinant identities
``harness``    configs, CSV output and verification suites
"""
from .polycore import IntPoly, PolyMatrixSpec, random_matrix_spec
from .symrank import IntMatrix, det, rank_mod_p, rank_rational
from .symgroup import CharacterTable, Partition, character_mn, immanant, permanent_ryser
from .countlab import (
    CountQuery,
    count_det_value,
    count_full_residue_zero,
    count_imm_zero_mod_p,
    count_rank,
    generate_low_rank,
)
from .momentlab import diophantine_count, even_moment_I, moment_J, value_distribution
from .exponents import Bound, BoundFormula, predicted_exponent
from .symbolic import MultiPoly, homogenize, minor_combination, specialize_block, symbolic_determinant

__version__ = "0.1.0"

__all__ = [
    "IntPoly", "PolyMatrixSpec", "random_matrix_spec",
    "IntMatrix", "det", "rank_mod_p", "rank_rational",
    "CharacterTable", "Partition", "character_mn", "immanant", "permanent_ryser",
    "CountQuery", "count_det_value", "count_full_residue_zero", "count_imm_zero_mod_p",
    "count_rank", "generate_low_rank",
    "diophantine_count", "even_moment_I", "moment_J", "value_distribution",
    "Bound", "BoundFormula", "predicted_exponent",
    "MultiPoly", "homogenize", "minor_combination", "specialize_block", "symbolic_determinant",
]
