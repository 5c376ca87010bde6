"""Rank statistics of matrices with polynomial entries.

Counts integer matrices in a box by exact rank, compares the full residue
box mod p with the closed rank-count formula, and samples low-rank matrices.
"""
from matcount.countlab import (count_det_value, count_full_residue_zero, count_rank,
                               generate_low_rank, invertible_count, rank_count_formula)
from matcount.polycore import PolyMatrixSpec, random_matrix_spec
from matcount.symrank import rank_rational


def main():
    lin2 = PolyMatrixSpec.linear(2)
    print("2x2 linear entries in [-1, 1]:")
    for r in range(3):
        print(f"  rank {r}: {count_rank(lin2, 1, r).count}")

    print("\nfull residue box mod p, 3x3 linear, singular matrices:")
    for p in (2, 3, 5):
        got = count_full_residue_zero(PolyMatrixSpec.linear(3), p).count
        print(f"  p={p}: counted {got}, formula {p ** 9 - invertible_count(3, p)}")

    print("\nrank distribution of 2x3 matrices over F_3:")
    print("  ", [rank_count_formula(2, 3, r, 3) for r in range(3)])

    spec = random_matrix_spec(1, 3, 3, 2, 4)
    print("\nrandom quadratic 3x3 spec, seed 1: det = a counts for H = 1, mod 5")
    print("  ", [count_det_value(spec, 1, a, 5).count for a in range(5)])

    mats, summary = generate_low_rank(PolyMatrixSpec.linear(4), 3, 2, 1000, seed=0)
    print(f"\nlow-rank sampling: {summary.accepted} matrices, max rank {max(rank_rational(M) for M in mats)}")


if __name__ == "__main__":
    main()
