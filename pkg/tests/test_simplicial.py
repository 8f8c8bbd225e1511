import pytest

from barcalc.bar import bar_simplicial_group, iterated_bar, levelwise_bar
from barcalc.errors import (TruncationMismatch, TruncationTooLow, CompositionNotZero, InfiniteLevel,
                            ResourceBudgetExceeded)
from barcalc.linalg import IntMatrix, FGAbelianGroup
from barcalc.rings import FiniteRing, RingSpec, Coefficients
from barcalc.simplicial import (ChainComplex, point, constant, cartesian_product, swap, diagonal, linearize,
                                tensor_product, counit, normalized_chains, unnormalized_chains, homotopy_groups,
                                homology, verify_identities, compare_modules, constant_bisimplicial)


def nerve(m, truncation=4):
    return bar_simplicial_group(FiniteRing.cyclic(m), truncation).as_set()


def test_point_and_constant_pass_identities():
    assert verify_identities(point(3), 3).ok
    X = constant(3, truncation=3)
    assert verify_identities(X, 3).ok
    C = normalized_chains(linearize(X), 3)
    assert C.ranks == [3, 0, 0, 0]


@pytest.mark.parametrize("m", [2, 3, 4])
def test_nerve_identities(m):
    assert verify_identities(nerve(m), 4).ok


def test_corrupted_face_is_reported():
    X = nerve(2).with_face(2, 1, 1, 0)
    report = verify_identities(X, 3)
    assert not report.ok
    assert all(v.witness is not None for v in report.violations)


def test_identities_above_truncation():
    with pytest.raises(TruncationTooLow):
        verify_identities(nerve(2, 2), 3)


def test_product_and_swap():
    X, Y = nerve(2, 3), nerve(3, 3)
    P = cartesian_product(X, Y)
    assert P.size(2) == 4 * 9
    assert verify_identities(P, 3).ok
    z = 3 * Y.size(2) + 7
    assert swap(X, Y, 2, z) == 7 * X.size(2) + 3


def test_product_truncation_mismatch():
    with pytest.raises(TruncationMismatch):
        cartesian_product(nerve(2, 3), nerve(2, 4))


def test_linearize_is_monoidal():
    k = Coefficients.parse("F3")
    X, Y = nerve(2, 3), nerve(3, 3)
    L = linearize(cartesian_product(X, Y), k)
    R = tensor_product(linearize(X, k), linearize(Y, k))
    assert compare_modules(L, R, 3) == []


def test_linearized_coalgebra():
    L = linearize(nerve(3, 2))
    assert L.comultiply(2, 5) == {(5, 5): 1}
    assert counit(2, 5) == 1


def test_linearize_infinite():
    with pytest.raises(InfiniteLevel):
        linearize(iterated_bar(RingSpec.parse("Z"), 1, 3))


def test_normalized_chains_of_nerve_mod_2():
    C = normalized_chains(linearize(nerve(2), Coefficients.parse("F2")), 3)
    assert C.ranks == [1, 1, 1, 1]
    assert all(C.differential(i).is_zero() for i in range(1, 4))


def test_normalized_chains_need_levels():
    with pytest.raises(TruncationTooLow):
        normalized_chains(linearize(nerve(2, 3)), 4)


def test_chain_complex_rejects_nonzero_composite():
    d = IntMatrix.from_dense([[1]])
    with pytest.raises(CompositionNotZero):
        ChainComplex(0, [1, 1, 1], {1: d, 2: d})


def test_chain_complex_homology_degrees():
    C = ChainComplex(0, [1, 1], {1: IntMatrix.from_dense([[3]])})
    assert str(C.homology(0)) == "Z/3"
    with pytest.raises(TruncationTooLow):
        C.homology(1)


def test_integral_homology_of_k_z2_1():
    groups = homology(nerve(2, 6), Coefficients.parse("Z"), 5)
    assert [str(g) for g in groups] == ["Z", "Z/2", "0", "Z/2", "0", "Z/2"]


def test_mod_3_homology_of_k_z3_1():
    groups = homology(nerve(3, 5), Coefficients.parse("F3"), 4)
    assert [g.dimension() for g in groups] == [1, 1, 1, 1, 1]


@pytest.mark.parametrize("m,k", [(2, "Z"), (3, "F3"), (4, "Z/4")])
def test_normalized_matches_unnormalized(m, k):
    k = Coefficients.parse(k)
    M = linearize(nerve(m), Coefficients(k.modulus, False))
    N, C = normalized_chains(M, 4), unnormalized_chains(M, 4)
    assert [str(N.homology(i, k)) for i in range(4)] == [str(C.homology(i, k)) for i in range(4)]


def test_homotopy_of_constant_group():
    groups = homotopy_groups(constant(FGAbelianGroup.parse("Z/2 + Z/4"), truncation=3), 2)
    assert [str(g) for g in groups] == ["Z/2 + Z/4", "0", "0"]


def test_degenerate_simplices_of_nerve():
    X = nerve(2, 3)
    assert X.nondegenerate(2) == [3]
    assert sorted(X.degenerate(2)) == [0, 1, 2]


def test_level_cap():
    X = bar_simplicial_group(FiniteRing.cyclic(5), 4, cap=100).as_set()
    with pytest.raises(ResourceBudgetExceeded):
        list(X.simplices(3))


def test_bisimplicial_levelwise_bar_and_diagonal():
    M = bar_simplicial_group(FiniteRing.cyclic(2), 3)
    D = levelwise_bar(M)
    assert verify_identities(D, 2).ok
    assert verify_identities(D.as_set(), 2).ok
    assert verify_identities(diagonal(D), 3).ok
    assert verify_identities(diagonal(D.as_set()), 3).ok


def test_constant_bisimplicial():
    Y = nerve(2, 3)
    V = constant_bisimplicial(Y, "vertical")
    assert verify_identities(V, 2).ok
    assert verify_identities(diagonal(V), 3).ok
