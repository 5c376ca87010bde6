"""Symbolic determinant identities.

Expands determinants of polynomial matrices, shows the first-row
specialization identity, the reducible 2x2 square determinant, and the
homogenization of a minor combination.
"""
from matcount.polycore import PolyMatrixSpec, random_matrix_spec
from matcount.symbolic import (first_row_difference, homogenize, minor_combination, specialize_block,
                               square_monomial_factorization, symbolic_determinant)


def main():
    print("det, 2x2 linear:  ", symbolic_determinant(PolyMatrixSpec.linear(2)))
    D, P = square_monomial_factorization()
    print("det, 2x2 squares: ", D)
    print("as a product:     ", P, "| equal:", D == P)

    spec = random_matrix_spec(3, 4, 4, 3, 5)
    S = specialize_block(spec)
    print("\nspecialized random 4x4 det:", S)
    print("equals f11 - f12 - f13 - f14:", S == first_row_difference(spec))

    R = minor_combination(PolyMatrixSpec.linear(4), 3, [1, -1] + [0] * 14)
    print(f"\ntwo 3x3 minors combined: {len(R)} terms, degree {R.total_degree()}")
    Hm = homogenize(R + 1, 3)
    print("homogenized with a constant added:", Hm.is_homogeneous(3), "| last terms:", str(Hm)[-20:])


if __name__ == "__main__":
    main()
