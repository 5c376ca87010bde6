"""Point counts of det(x_ij^2) = 0 over F_p.

The count T(p) of 3x3 matrices of squares with zero determinant should be
p^8 (1 + O(p^(-1/2))).  This prints the ratio and the +-2/sqrt(p) band for the
primes within desk reach, showing a sizeable lower-order term at p = 7.
"""
import math

from matcount.countlab import count_full_residue_zero
from matcount.polycore import PolyMatrixSpec


def main():
    spec = PolyMatrixSpec.monomial(3, 3, 2)
    for p in (3, 5, 7):
        T = count_full_residue_zero(spec, p).count
        ratio = T / p ** 8
        band = 2 / math.sqrt(p)
        print(f"p={p}: T={T}, T/p^8={ratio:.4f}, band 1 +- {band:.4f}, inside: {abs(ratio - 1) <= band}")


if __name__ == "__main__":
    main()
