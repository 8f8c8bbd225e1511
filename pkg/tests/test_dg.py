import pytest

from barcalc.bar import bar_simplicial_group, levelwise_bar, iterated_algebra_bar
from barcalc.dg import (shuffles, ez_shuffle, alexander_whitney, tensor_complex, condense, dold_puppe_compare,
                        DGAlgebra, dg_bar, dg_homology_dims)
from barcalc.errors import TruncationTooLow
from barcalc.rings import FiniteRing, Coefficients, truncated_polynomial, ground_algebra
from barcalc.simplicial import linearize, normalized_chains, homotopy_groups, constant_bisimplicial


def nerve_module(m, prime, truncation=3):
    return linearize(bar_simplicial_group(FiniteRing.cyclic(m), truncation).as_set(), Coefficients(prime, True))


def test_shuffle_signs():
    assert sorted(shuffles(1, 1)) == [(-1, (1,), (0,)), (1, (0,), (1,))]
    assert len(list(shuffles(2, 2))) == 6
    assert sum(sign for sign, _, _ in shuffles(2, 2)) == 2
    assert list(shuffles(0, 3)) == [(1, (), (0, 1, 2))]


@pytest.mark.parametrize("m,prime", [(2, 2), (3, 3)])
def test_alexander_whitney_after_shuffle_is_identity(m, prime):
    X = nerve_module(m, prime)
    ez, aw = ez_shuffle(X, X, 3), alexander_whitney(X, X, 3)
    assert ez.failures() == []
    assert aw.failures() == []
    assert (aw @ ez).is_identity()


def test_shuffle_needs_levels():
    X = nerve_module(2, 2, truncation=2)
    with pytest.raises(TruncationTooLow):
        ez_shuffle(X, X, 3)


def test_tensor_complex_ranks():
    N = normalized_chains(nerve_module(3, 3), 3)
    T = tensor_complex(N, N, 3)
    assert T.complex.ranks[0] == N.ranks[0] ** 2
    assert T.complex.ranks[1] == 2 * N.ranks[0] * N.ranks[1]
    assert T.complex.ranks[2] == 2 * N.ranks[0] * N.ranks[2] + N.ranks[1] ** 2


@pytest.mark.parametrize("m,up_to", [(2, 2), (3, 2)])
def test_dold_puppe_on_levelwise_bar(m, up_to):
    X = linearize(levelwise_bar(bar_simplicial_group(FiniteRing.cyclic(m), up_to + 2)).as_set(),
                  Coefficients(m, True))
    report = dold_puppe_compare(X, up_to, m)
    assert report.agrees, report.mismatched_degrees()


def test_condense_of_vertical_constant():
    Y = nerve_module(2, 2)
    C = condense(constant_bisimplicial(Y, "vertical"), 3)
    assert C.ranks == normalized_chains(Y, 3).ranks


def test_algebra_as_dg_algebra():
    A = DGAlgebra.from_algebra(truncated_polynomial(3, 3), top=2)
    assert all(not witnesses for witnesses in A.check_axioms().values())
    assert A.multiply(0, {1: 1}, 0, {1: 1}) == {2: 1}


@pytest.mark.parametrize("prime", [2, 3])
def test_dg_bar_of_dual_numbers(prime):
    A = truncated_polynomial(prime, 2)
    B = dg_bar(A, 5)
    assert B.complex.ranks == [1, 1, 1, 1, 1, 1]
    assert dg_homology_dims(B, prime, 4) == [1, 1, 1, 1, 1]
    simplicial = [g.dimension() for g in homotopy_groups(iterated_algebra_bar(A, 1, 5), 4)]
    assert simplicial == [1, 1, 1, 1, 1]


@pytest.mark.parametrize("prime", [2, 3])
def test_dg_bar_is_commutative_dg_algebra(prime):
    B = dg_bar(truncated_polynomial(prime, 3), 4)
    report = B.check_axioms()
    assert all(not witnesses for witnesses in report.values()), report


def test_shuffle_product_signs():
    # [x]·[x] vanishes by graded commutativity; [x|x]·[x|x] = 2[x|x|x|x]
    B3 = dg_bar(truncated_polynomial(3, 2), 4)
    assert B3.multiply(1, {0: 1}, 1, {0: 1}) == {}
    assert B3.multiply(2, {0: 1}, 2, {0: 1}) == {0: 2}
    B2 = dg_bar(truncated_polynomial(2, 2), 4)
    assert B2.multiply(2, {0: 1}, 2, {0: 1}) == {}


def test_dg_bar_of_ground_ring():
    B = dg_bar(ground_algebra(5), 3)
    assert B.complex.ranks == [1, 0, 0, 0]


def test_iterated_dg_bar_matches_simplicial():
    A = truncated_polynomial(2, 2)
    dims = dg_homology_dims(dg_bar(dg_bar(A, 4), 4), 2, 3)
    assert dims == [1, 0, 1, 1]


@pytest.mark.parametrize("m,prime", [(2, 3), (4, 2)])
def test_alexander_whitney_is_a_chain_map(m, prime):
    X = nerve_module(m, prime)
    aw = alexander_whitney(X, X, 3)
    assert aw.failures() == []
    assert (aw @ ez_shuffle(X, X, 3)).is_identity()
