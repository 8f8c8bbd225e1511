import itertools

import pytest

from barcalc import utils
from barcalc.bar import level_elements, nest
from barcalc.cup import (cup_eval, cup_closed_form, cup_leaves, check_graded_ring_axioms, homology_circle_product,
                         algebra_cup, naturality_check, hopf_checks)
from barcalc.errors import ShapeMismatch, InvalidInput, ResourceBudgetExceeded
from barcalc.rings import FiniteRing, RingSpec, Coefficients, group_algebra, encode_tuple


def test_cup_base_cases():
    S = FiniteRing.cyclic(6)
    assert cup_eval(S, 0, 0, 1, 2, 5) == 4
    assert cup_eval(S, 0, 1, 2, 2, (3, 4)) == (0, 2)
    assert cup_eval(S, 1, 0, 2, (3, 4), 2) == (0, 2)


def test_cup_closed_form_example():
    S = FiniteRing.cyclic(2)
    assert cup_closed_form(S, 1, 1, 2, (1, 0), (1, 1)) == ((1, 1), (0, 0))
    assert cup_eval(S, 1, 1, 2, (1, 0), (1, 1)) == ((1, 1), (0, 0))


def test_cup_unit_and_zero():
    S = FiniteRing.cyclic(4)
    for X in level_elements(S, 2, 2):
        assert cup_eval(S, 0, 2, 2, S.one, X) == X
        assert set(cup_leaves(S, (0, 0), (1, 2, 3, 1))) == {0}


def test_cup_shape_errors():
    S = FiniteRing.cyclic(2)
    with pytest.raises(ShapeMismatch):
        cup_eval(S, 1, 1, 2, (1, 0, 1), (1, 1))


DEGREE_PAIRS = [(n, m) for n in range(4) for m in range(4) if n + m <= 3]


def level_sample(S, n, m, p, generator, exhaustive_limit=2 ** 14, count=200):
    if S.size ** (p ** n + p ** m) <= exhaustive_limit:
        return itertools.product(level_elements(S, n, p), level_elements(S, m, p))
    return [(nest([int(v) for v in generator.integers(0, S.size, p ** n)], n, p),
             nest([int(v) for v in generator.integers(0, S.size, p ** m)], m, p)) for _ in range(count)]


@pytest.mark.parametrize("n,m", DEGREE_PAIRS)
@pytest.mark.parametrize("text", ["Z/2", "Z/3", "Z/4", "Z/2 x Z/2"])
def test_recursion_matches_closed_form(text, n, m):
    S = RingSpec.parse(text).finite_ring()
    generator = utils.rng(n * 4 + m)
    for p in range(4):
        for Y, X in level_sample(S, n, m, p, generator):
            assert cup_eval(S, n, m, p, Y, X) == cup_closed_form(S, n, m, p, Y, X)


@pytest.mark.parametrize("text,n_max,p_max", [("Z/2", 2, 3), ("Z/4", 2, 3), ("Z/6", 2, 3), ("Z/2 x Z/2", 1, 2)])
def test_graded_ring_axioms(text, n_max, p_max):
    report = check_graded_ring_axioms(RingSpec.parse(text).finite_ring(), n_max, p_max)
    assert report.passed, report.failures()
    assert all(check.checked > 0 for check in report.axioms.values())


def test_graded_ring_axioms_sweep_modes():
    report = check_graded_ring_axioms(FiniteRing.cyclic(6), 2, 3)
    sweeps = report.measurements["sweeps"]
    assert sweeps["⌣_{0,0} at level 3"] == "exhaustive"
    assert sweeps["⌣_{0,2} at level 3"] == "generators"
    assert sweeps["associativity (0, 0, 2) at level 3"] == "generators"


def test_graded_ring_axioms_on_generators_detect_fault():
    S = FiniteRing.cyclic(6).with_swapped_entry(1, 1, 0)
    report = check_graded_ring_axioms(S, 2, 3, exhaustive_limit=0)
    assert set(report.measurements["sweeps"].values()) == {"generators"}
    assert not report.passed
    assert "left unit" in report.failures()


def test_graded_ring_axioms_detect_fault():
    S = FiniteRing.cyclic(3).with_swapped_entry(2, 2, 2)
    report = check_graded_ring_axioms(S, 1, 2)
    assert not report.passed
    failures = report.failures()
    assert "left distributivity" in failures or "right distributivity" in failures
    assert all(witnesses for witnesses in failures.values())


def test_graded_ring_axioms_cap():
    with pytest.raises(ResourceBudgetExceeded):
        check_graded_ring_axioms(FiniteRing.cyclic(3), 2, 3, cap=1000)


def test_circle_product_z2():
    pairing = homology_circle_product(FiniteRing.cyclic(2), Coefficients.parse("F2"), 1, 1, 1, 1, seed=0)
    assert pairing.source_dims == (1, 1)
    assert pairing.target_dim == 1
    assert pairing.matrix == [[1]]
    assert pairing.representative_independent
    assert pairing.to_dict()["target"] == [2, 2]


def test_circle_product_degree_zero_is_multiplication():
    S = FiniteRing.cyclic(3)
    pairing = homology_circle_product(S, Coefficients.parse("F3"), 0, 0, 0, 0)
    assert pairing.target_dim == 3
    for a, b in itertools.product(range(3), repeat=2):
        column = [row[a * 3 + b] for row in pairing.matrix]
        assert column == [int(r == S.mul[a][b]) for r in range(3)]


@pytest.mark.parametrize("prime,degrees,row", [
    (3, (1, 1, 0, 0), [0, 1, 2]),
    (3, (1, 2, 0, 0), [0, 1, 2]),
    (3, (0, 0, 1, 2), [0, 1, 2]),
    (3, (1, 3, 0, 0), [0, 1, 1]),
    (2, (0, 0, 1, 2), [0, 1]),
])
def test_circle_product_with_degree_zero_classes(prime, degrees, row):
    # the class of the vertex c acts on H_i(B(Z/p); F_p) by c^ceil(i/2); c = 1 is the unit
    n, i, m, j = degrees
    pairing = homology_circle_product(FiniteRing.cyclic(prime), Coefficients(prime, True), n=n, i=i, m=m, j=j)
    assert pairing.target == (n + m, i + j)
    assert pairing.target_dim == 1
    assert pairing.matrix == [row]
    assert pairing.representative_independent


def test_circle_product_needs_field():
    with pytest.raises(InvalidInput):
        homology_circle_product(FiniteRing.cyclic(2), Coefficients.parse("Z"), 1, 1, 1, 1)


def test_algebra_cup_matches_ring_on_basis():
    S = FiniteRing.cyclic(3)
    A = group_algebra(S, 3)
    y, x = 2, encode_tuple((1, 2), 3)
    assert algebra_cup(A, 0, 1, 2, y, x) == {encode_tuple((2, 1), 3): 1}
    assert algebra_cup(A, 1, 0, 2, x, y) == {encode_tuple((2, 1), 3): 1}


def test_naturality_small():
    report = naturality_check(FiniteRing.cyclic(3), Coefficients.parse("F3"), 1, 2)
    assert report.passed, report.mismatches
    assert report.checks["cup"] > 0


def test_naturality_detects_transposed_cup():
    report = naturality_check(FiniteRing.cyclic(2), Coefficients.parse("F2"), 2, 2, transpose_fault=True)
    assert not report.passed
    assert any("⌣" in text for text in report.mismatches)


def test_hopf_structure():
    report = hopf_checks(FiniteRing.cyclic(4), Coefficients.parse("F2"), 1, 2)
    assert report.passed, report.mismatches
    assert report.checks["bialgebra maps"] > 0
