import itertools
import math
import random

import pytest

from matcount.symgroup import (
    CharacterTable,
    Partition,
    character_mn,
    class_function,
    class_size,
    immanant,
    partitions_of,
    permanent_ryser,
)
from matcount.symrank import IntMatrix, det

P = Partition


def cycle_type(perm):
    seen, out = set(), []
    for i in range(len(perm)):
        if i in seen:
            continue
        j, L = i, 0
        while j not in seen:
            seen.add(j)
            j = perm[j]
            L += 1
        out.append(L)
    return tuple(sorted(out, reverse=True))


def naive_immanant(A, chi):
    n = A.rows
    total = 0
    for perm in itertools.permutations(range(n)):
        total += chi[cycle_type(perm)] * math.prod(A[i, perm[i]] for i in range(n))
    return total


def test_partition_validation_and_parse():
    assert P.parse("3,2,1") == P([3, 2, 1])
    assert P.parse("(2,1)") == P([2, 1])
    assert P.parse("1^4") == P([1, 1, 1, 1])
    assert str(P([2, 1])) == "(2,1)"
    with pytest.raises(ValueError):
        P([1, 2])
    with pytest.raises(ValueError):
        P([])
    with pytest.raises(ValueError):
        P([2, 0])


def test_partitions_of():
    assert partitions_of(3) == [P([3]), P([2, 1]), P([1, 1, 1])]
    assert len(partitions_of(4)) == 5
    assert partitions_of(1) == [P([1])]
    assert [len(partitions_of(n)) for n in range(1, 13)] == [1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77]
    for bad in (0, 13):
        with pytest.raises(ValueError):
            partitions_of(bad)


def test_class_sizes_against_enumeration():
    for n in range(1, 7):
        counts = {}
        for perm in itertools.permutations(range(n)):
            ct = cycle_type(perm)
            counts[ct] = counts.get(ct, 0) + 1
        for mu in partitions_of(n):
            assert class_size(mu) == counts[mu.parts]
    assert class_size(P([1, 1, 1])) == 1
    assert class_size(P([2, 1])) == 3
    assert class_size(P([3])) == 2


def test_character_examples():
    for mu in partitions_of(5):
        assert character_mn(P([5]), mu) == 1
        assert character_mn(P([1] * 5), mu) == (-1) ** (5 - len(mu))
    assert character_mn(P([2, 1]), P([3])) == -1
    assert character_mn(P([2, 1]), P([2, 1])) == 0
    assert character_mn(P([2, 1]), P([1, 1, 1])) == 2
    with pytest.raises(ValueError):
        character_mn(P([2, 1]), P([2]))


def test_s4_table_golden():
    T = CharacterTable.build(4)
    # classes (4), (3,1), (2,2), (2,1,1), (1^4)
    assert T.values == (
        (1, 1, 1, 1, 1),
        (-1, 0, -1, 1, 3),
        (0, -1, 2, 0, 2),
        (1, 0, -1, -1, 3),
        (-1, 1, 1, -1, 1),
    )


@pytest.mark.parametrize("n", range(1, 8))
def test_orthogonality_and_dimensions(n):
    T = CharacterTable.build(n)
    fact = math.factorial(n)
    assert sum(T.sizes) == fact
    for a, u in enumerate(T.values):
        for b, v in enumerate(T.values):
            assert T.inner(u, v) == (fact if a == b else 0)
    assert sum(row[-1] ** 2 for row in T.values) == fact
    assert all(row[-1] > 0 for row in T.values)


def test_table_format_has_header_and_rows():
    text = CharacterTable.build(3).format()
    lines = text.splitlines()
    assert "(2,1)" in lines[0] and "|class|" in lines[1]
    assert len(lines) == 6


def test_immanant_examples():
    assert immanant(IntMatrix.identity(3), P([2, 1])) == 2
    J = IntMatrix.from_rows([[1] * 4] * 4)
    assert immanant(J, P([4])) == 24
    with pytest.raises(ValueError):
        immanant(IntMatrix.identity(3), P([2, 2]))
    with pytest.raises(ValueError):
        immanant(IntMatrix.from_rows([[1, 2, 3]]), P([1]))


def test_immanant_sign_is_det_4x4():
    rng = random.Random(10)
    for _ in range(100):
        A = IntMatrix.from_rows([[rng.randint(-9, 9) for _ in range(4)] for _ in range(4)])
        assert immanant(A, P.sign(4)) == det(A)


def test_immanant_special_characters_5x5():
    rng = random.Random(11)
    for _ in range(100):
        A = IntMatrix.from_rows([[rng.randint(-9, 9) for _ in range(5)] for _ in range(5)])
        assert immanant(A, P.sign(5)) == det(A)
        assert immanant(A, P.trivial(5)) == permanent_ryser(A)


def test_immanant_against_naive_sum():
    rng = random.Random(12)
    for n in (3, 4, 5):
        for lam in partitions_of(n):
            A = IntMatrix.from_rows([[rng.randint(-4, 4) for _ in range(n)] for _ in range(n)])
            chi = class_function(lam, n)
            assert immanant(A, lam) == naive_immanant(A, chi)
            assert immanant(A, lam, 7) == naive_immanant(A, chi) % 7


def test_immanant_of_character_combination_is_linear():
    rng = random.Random(13)
    A = IntMatrix.from_rows([[rng.randint(-5, 5) for _ in range(4)] for _ in range(4)])
    combo = {P([3, 1]): 2, P([2, 2]): -1}
    assert immanant(A, combo) == 2 * immanant(A, P([3, 1])) - immanant(A, P([2, 2]))


def test_permanent_examples():
    assert permanent_ryser(IntMatrix.from_rows([[1] * 3] * 3)) == 6
    assert permanent_ryser(IntMatrix.identity(6)) == 1
    assert permanent_ryser(IntMatrix.from_rows([[1, 2], [3, 4]])) == 10
    with pytest.raises(ValueError):
        permanent_ryser(IntMatrix.from_rows([[1, 2]]))
