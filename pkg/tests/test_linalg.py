import numpy as np
import pytest
from sympy.matrices import Matrix
from sympy.matrices.normalforms import invariant_factors as sympy_invariant_factors

from barcalc.errors import ShapeMismatch, CompositionNotZero
from barcalc.linalg import (IntMatrix, FpMatrix, FGAbelianGroup, FpEchelon, snf, invariant_factors, rank_z,
                            rank_fp, kernel_fp, homology_z, homology_mod, homology_dims_fp)


def verify_snf(A, result):
    # U·A·V = S
    assert result.U @ A @ result.V == result.S

    # S is diagonal
    assert all(r == c for r, c, _ in result.S.triplets())

    # d_i divides d_(i+1)
    d = result.invariants
    for i in range(len(d) - 1):
        assert d[i + 1] % d[i] == 0


def test_snf_small_example():
    A = IntMatrix.from_dense([[2, 4], [6, 8]])
    result = snf(A)
    verify_snf(A, result)
    assert [abs(d) for d in result.diagonal] == [2, 4]


@pytest.mark.parametrize("shape", [(3, 3), (5, 7), (6, 2), (1, 4)])
def test_snf_random_against_sympy(shape):
    rng = np.random.default_rng(0)
    for _ in range(20):
        dense = rng.integers(-3, 4, size=shape).tolist()
        A = IntMatrix.from_dense(dense, shape[1])
        verify_snf(A, snf(A))
        expected = [abs(int(f)) for f in sympy_invariant_factors(Matrix(dense)) if f != 0]
        assert invariant_factors(A) == expected


def test_zero_and_empty_matrices():
    assert invariant_factors(IntMatrix.zero(3, 2)) == []
    assert rank_z(IntMatrix.zero(0, 4)) == 0
    verify_snf(IntMatrix.zero(2, 3), snf(IntMatrix.zero(2, 3)))


def test_construction_rejects_bad_entries():
    with pytest.raises(ShapeMismatch):
        IntMatrix(2, 2, [(2, 0, 1)])
    with pytest.raises(ShapeMismatch):
        IntMatrix(2, 2, [(0, 0, 1), (0, 0, 2)])
    with pytest.raises(ShapeMismatch):
        IntMatrix.from_dense([[1, 2], [3]])


def test_products_and_kron():
    A = IntMatrix.from_dense([[1, 2], [0, 1]])
    B = IntMatrix.from_dense([[0, 1], [1, 0]])
    assert (A @ B).to_dense() == [[2, 1], [1, 0]]
    assert A.kron(IntMatrix.identity(2)).shape == (4, 4)
    assert A.kron(B)[0, 3] == 2
    assert A.transpose().to_dense() == [[1, 0], [2, 1]]
    assert A.scale(3).mod(3).is_zero()


def test_fg_abelian_group_canonical_form():
    assert str(FGAbelianGroup.from_cyclic([2, 3])) == "Z/6"
    assert str(FGAbelianGroup.from_cyclic([4, 2, 0])) == "Z + Z/2 + Z/4"
    assert str(FGAbelianGroup()) == "0"
    assert FGAbelianGroup.parse("Z/2 + Z/4") == FGAbelianGroup(0, (2, 4))
    assert FGAbelianGroup.parse("Z/2 + Z/4").order == 8
    assert FGAbelianGroup(1).order is None


def test_homology_of_multiplication_complex():
    # 0 -> Z --2--> Z -> 0
    d1 = IntMatrix.from_dense([[2]])
    d0 = IntMatrix.zero(0, 1)
    assert str(homology_z(d1, d0)) == "Z/2"
    assert str(homology_z(IntMatrix.zero(1, 0), d1)) == "0"
    assert str(homology_mod(d1, d0, 2)) == "Z/2"
    assert str(homology_mod(IntMatrix.zero(1, 0), d1, 2)) == "Z/2"
    assert str(homology_mod(d1, d0, 3)) == "0"


def test_homology_mod_non_field():
    d1 = IntMatrix.from_dense([[4]])
    assert str(homology_mod(d1, IntMatrix.zero(0, 1), 6)) == "Z/2"
    assert str(homology_mod(d1, IntMatrix.zero(0, 1), 8)) == "Z/4"


def test_homology_requires_composable_zero():
    d = IntMatrix.from_dense([[1]])
    with pytest.raises(CompositionNotZero):
        homology_z(d, d)


def test_rank_and_kernel_over_fp():
    A = FpMatrix.from_dense(3, [[1, 1, 1], [1, 2, 0]])
    assert rank_fp(A) == 2
    kernel = kernel_fp(A)
    assert len(kernel) == 1
    v = kernel[0]
    for row in [[1, 1, 1], [1, 2, 0]]:
        assert sum(row[c] * x for c, x in v.items()) % 3 == 0

    B = FpMatrix.from_dense(2, [[1, 1, 0], [0, 1, 1], [1, 0, 1]])
    assert rank_fp(B) == 2


def test_homology_dims_fp():
    d1 = IntMatrix.from_dense([[2]])
    assert homology_dims_fp(d1, IntMatrix.zero(0, 1), 2) == 1
    assert homology_dims_fp(d1, IntMatrix.zero(0, 1), 5) == 0


def test_echelon_express():
    E = FpEchelon(5)
    assert E.insert({0: 1, 1: 1}, {0: 1})
    assert E.insert({1: 2}, {1: 1})
    assert not E.insert({0: 1, 1: 3})
    assert E.contains({0: 2, 1: 2})
    coefficients = E.express({0: 1, 1: 3})
    assert coefficients == {0: 1, 1: 1}
    with pytest.raises(ValueError):
        E.express({2: 1})
