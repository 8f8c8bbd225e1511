import json

import pytest

from barcalc.errors import InvalidInput, InvalidRing, InvalidAlgebra, InfiniteLevel
from barcalc.rings import (FiniteRing, RingSpec, Coefficients, AugCommAlgebra, TensorPowerAlgebra, group_algebra,
                           truncated_polynomial, ground_algebra, encode_tuple, decode_tuple, tensor_vectors)


def test_tuple_encoding_first_digit_most_significant():
    assert encode_tuple((1, 0, 1), 2) == 5
    assert decode_tuple(5, 2, 3) == (1, 0, 1)
    assert decode_tuple(0, 7, 0) == ()


@pytest.mark.parametrize("text,size,group", [
    ("Z/2", 2, "Z/2"),
    ("Z/6", 6, "Z/6"),
    ("Z/2 x Z/4", 8, "Z/2 + Z/4"),
    ("Z/2 x Z/3", 6, "Z/6"),
])
def test_ring_specs(text, size, group):
    spec = RingSpec.parse(text)
    assert spec.is_finite
    S = spec.finite_ring()
    assert S.size == size
    assert S.check_axioms() == []
    assert str(spec.additive_group()) == group
    assert str(S.additive_group()) == group


def test_integers_are_symbolic():
    spec = RingSpec.parse("Z")
    assert not spec.is_finite
    assert str(spec.additive_group()) == "Z"
    with pytest.raises(InfiniteLevel):
        spec.finite_ring()


def test_bad_ring_spec():
    with pytest.raises(InvalidInput):
        RingSpec.parse("Q")


def test_table_ring(tmp_path):
    path = tmp_path / "f4.json"
    # F_4 = {0, 1, a, a+1} with a^2 = a + 1
    add = [[a ^ b for b in range(4)] for a in range(4)]
    mul = [[0, 0, 0, 0], [0, 1, 2, 3], [0, 2, 3, 1], [0, 3, 1, 2]]
    path.write_text(json.dumps({"size": 4, "add": add, "mul": mul, "zero": 0, "one": 1}))
    S = RingSpec.parse(f"table:{path}").finite_ring()
    assert S.size == 4
    assert str(S.additive_group()) == "Z/2 + Z/2"


def test_table_ring_axioms_are_checked(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text(json.dumps({"size": 2, "add": [[0, 1], [1, 0]], "mul": [[0, 0], [0, 0]], "zero": 0, "one": 1}))
    with pytest.raises(InvalidRing):
        FiniteRing.from_table(path)


def test_swapped_entry_breaks_axioms():
    S = FiniteRing.cyclic(3).with_swapped_entry(2, 2, 2)
    assert S.check_axioms()


@pytest.mark.parametrize("text,modulus,field,rendered", [
    ("Z", 0, False, "Z"),
    ("F2", 2, True, "F2"),
    ("F_5", 5, True, "F5"),
    ("Z/4", 4, False, "Z/4"),
])
def test_coefficients(text, modulus, field, rendered):
    k = Coefficients.parse(text)
    assert (k.modulus, k.field) == (modulus, field)
    assert str(k) == rendered


def test_coefficients_reject_composite_field():
    with pytest.raises(InvalidInput):
        Coefficients.parse("F4")


def test_tensor_vectors():
    assert tensor_vectors([{0: 1, 1: 1}, {1: 2}], [2, 2], 0) == {1: 2, 3: 2}
    assert tensor_vectors([{0: 1, 1: 1}, {1: 2}], [2, 2], 2) == {}


def test_truncated_polynomial():
    A = truncated_polynomial(2, 3)
    assert A.product({1: 1}, {1: 1}) == {2: 1}
    assert A.product({1: 1}, {2: 1}) == {}
    assert A.augmentation == (1, 0, 0)


def test_invalid_algebra():
    with pytest.raises(InvalidAlgebra):
        AugCommAlgebra(2, 2, [[{0: 1}, {1: 1}], [{1: 1}, {0: 1}]], 0, (1, 0))


def test_algebra_from_json(tmp_path):
    path = tmp_path / "dual.json"
    path.write_text(json.dumps({"field": 2, "dimension": 2, "unit": 0, "augmentation": [1, 0],
                                "mul": [[[1, 0], [0, 1]], [[0, 1], [0, 0]]]}))
    A = AugCommAlgebra.from_json(path)
    assert A.dim == 2
    assert A.product({1: 1}, {1: 1}) == {}


def test_group_algebra_structure():
    S = FiniteRing.cyclic(4)
    A = group_algebra(S, 2)
    assert A.product({1: 1}, {3: 1}) == {0: 1}
    assert A.antipode[1] == {3: 1}
    assert A.circle[2][3] == {2: 1}


def test_tensor_power_algebra():
    A = group_algebra(FiniteRing.cyclic(3), 3)
    T = TensorPowerAlgebra(A, 2)
    assert T.dim == 9
    assert T.unit_index == 0
    assert T.multiply(encode_tuple((1, 2), 3), encode_tuple((1, 1), 3)) == {encode_tuple((2, 0), 3): 1}
    x = encode_tuple((2, 1), 3)
    assert T.comultiply(x) == {(x, x): 1}
    assert T.augment(x) == 1
    assert T.antipode(x) == {encode_tuple((1, 2), 3): 1}


def test_ground_algebra():
    k = ground_algebra(5)
    assert TensorPowerAlgebra(k, 3).dim == 1
