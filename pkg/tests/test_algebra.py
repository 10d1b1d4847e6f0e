"""Tables, products, serialization, subuniverses, isomorphisms."""

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from finalg.algebra import (
    ElementMap,
    FiniteAlgebra,
    Operation,
    close_in_product,
    dump_algebra,
    find_isomorphism,
    is_homomorphism,
    is_subuniverse,
    load_algebra,
    product,
    sg,
)
from finalg.errors import ResourceLimitError, SignatureError
from finalg.limits import Limits


def test_operation_validation_rejects_bad_tables():
    with pytest.raises(SignatureError):
        FiniteAlgebra("bad", 2, (Operation("f", 2, (0, 1, 2, 0)),))
    with pytest.raises(SignatureError):
        FiniteAlgebra("bad", 2, (Operation("f", 2, (0, 1)),))
    with pytest.raises(SignatureError):
        FiniteAlgebra("bad", 0, ())


def test_duplicate_op_names_rejected():
    op = Operation("f", 1, (0, 1))
    with pytest.raises(SignatureError):
        FiniteAlgebra("bad", 2, (op, op))


def test_eval_row_major(z4aff):
    # p(x, y, z) = x - y + z mod 4
    for x in range(4):
        for y in range(4):
            for z in range(4):
                assert z4aff.eval("p", (x, y, z)) == (x - y + z) % 4


def test_eval_argument_checks(z2aff):
    with pytest.raises(SignatureError):
        z2aff.eval("p", (0, 1))
    with pytest.raises(SignatureError):
        z2aff.eval("p", (0, 1, 2))
    with pytest.raises(SignatureError):
        z2aff.eval("q", (0, 0, 0))


def test_json_round_trip(z4aff, tmp_path):
    path = tmp_path / "a.json"
    dump_algebra(z4aff, str(path))
    back = load_algebra(str(path))
    assert back == z4aff
    assert back.name == "z4aff" and back.size == 4


def test_json_unknown_field_rejected(z2aff):
    data = z2aff.to_json()
    data["extra"] = 1
    with pytest.raises(SignatureError):
        FiniteAlgebra.from_json(data)


def test_load_respects_universe_limit(z4aff, tmp_path):
    path = tmp_path / "a.json"
    dump_algebra(z4aff, str(path))
    with pytest.raises(ResourceLimitError):
        load_algebra(str(path), limits=Limits(max_universe=3))


def test_product_signature_and_projection(z2aff, s2):
    with pytest.raises(SignatureError):
        product([z2aff, s2])  # different signatures
    prod = product([z2aff, z2aff], name="sq")
    assert prod.size == 4
    # componentwise: index = 2*a + b
    for a1 in range(2):
        for b1 in range(2):
            for a2 in range(2):
                for b2 in range(2):
                    for a3 in range(2):
                        for b3 in range(2):
                            got = prod.eval(
                                "p", (2 * a1 + b1, 2 * a2 + b2, 2 * a3 + b3)
                            )
                            want = 2 * ((a1 - a2 + a3) % 2) + (b1 - b2 + b3) % 2
                            assert got == want


def test_sg_and_is_subuniverse(s2, z3aff):
    # f = min: {1} generates itself, {0,1} is everything
    assert sg(s2, [1]) == frozenset({1})
    assert sg(s2, [0, 1]) == frozenset({0, 1})
    assert is_subuniverse(s2, [1])
    assert is_subuniverse(s2, [0])
    # affine: any two distinct elements generate the whole line
    assert sg(z3aff, [0, 1]) == frozenset({0, 1, 2})


def test_element_map_validation():
    with pytest.raises(SignatureError):
        ElementMap(2, 2, (0, 2))
    with pytest.raises(SignatureError):
        ElementMap(2, 2, (0,))
    m = ElementMap(2, 3, (2, 0))
    assert m(0) == 2 and m(1) == 0


def test_find_isomorphism_between_minmax():
    amin = FiniteAlgebra("amin", 2, (Operation("f", 2, (0, 0, 0, 1)),))
    amax = FiniteAlgebra("amax", 2, (Operation("f", 2, (0, 1, 1, 1)),))
    iso = find_isomorphism(amin, amax)
    assert iso is not None
    assert iso.values == (1, 0)  # the swap
    assert is_homomorphism(amin, amax, iso)


def test_find_isomorphism_negative(z2aff, z4aff, s2):
    assert find_isomorphism(z2aff, z4aff) is None  # sizes differ
    two_proj = FiniteAlgebra("proj", 2, (Operation("f", 2, (0, 0, 1, 1)),))
    assert find_isomorphism(s2, two_proj) is None


def test_close_in_product_matches_sg(z4aff):
    # one factor: closure in the product is exactly subuniverse generation
    ok, members = close_in_product([z4aff], [0, 2])
    assert ok
    assert set(int(m) for m in members) == set(sg(z4aff, [0, 2]))


def test_close_in_product_signature_mismatch(z2aff, s2):
    with pytest.raises(SignatureError):
        close_in_product([z2aff, s2], [0])


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=1, max_size=4))
def test_sg_is_a_fixed_point(seed):
    ops = (Operation("p", 3, tuple((x - y + z) % 4
                                   for x in range(4)
                                   for y in range(4)
                                   for z in range(4))),)
    alg = FiniteAlgebra("g", 4, ops)
    got = sg(alg, seed)
    assert set(seed) <= got
    assert sg(alg, sorted(got)) == got
    for x in got:
        for y in got:
            for z in got:
                assert alg.eval("p", (x, y, z)) in got


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 9 - 1))
def test_iso_is_reflexive_for_random_groupoids(bits):
    table = tuple((bits >> (2 * i)) % 3 for i in range(9))
    alg = FiniteAlgebra("r", 3, (Operation("f", 2, table),))
    iso = find_isomorphism(alg, alg)
    assert iso is not None  # identity always works
