"""Characters of S_n and immanants.

Prints the character table of S_4, checks orthogonality, and evaluates the
immanants of a small matrix for every partition.
"""
import math

from matcount.symgroup import CharacterTable, Partition, immanant, partitions_of, permanent_ryser
from matcount.symrank import IntMatrix, det


def main():
    table = CharacterTable.build(4)
    print(table.format())
    rows = [table.row(lam) for lam in table.irreps]
    ok = all(table.inner(u, v) == (i == j) * math.factorial(4) for i, u in enumerate(rows) for j, v in enumerate(rows))
    print(f"\nrows orthonormal: {ok}")
    e = table.classes.index(Partition([1] * 4))
    print(f"sum of squared degrees = {sum(r[e] ** 2 for r in rows)} = 4! = {math.factorial(4)}")

    A = IntMatrix.from_rows([[1, 2, 0], [3, -1, 4], [2, 2, 5]])
    print("\nimmanants of [[1,2,0],[3,-1,4],[2,2,5]]:")
    for lam in partitions_of(3):
        print(f"  {lam}: {immanant(A, lam)}")
    print(f"det = {det(A)}, permanent = {permanent_ryser(A)}")


if __name__ == "__main__":
    main()
