"""Bit-packed binary and four-column relations."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from finalg.errors import SignatureError
from finalg.relations import BinRel, QuadRel, union_all

rel_bits = st.integers(0, 2 ** 9 - 1)


def _rel(bits: int, n: int = 3) -> BinRel:
    return BinRel(n, n, bits)


def test_from_pairs_and_contains():
    r = BinRel.from_pairs(3, 3, [(0, 1), (2, 2)])
    assert (0, 1) in r and (2, 2) in r and (1, 0) not in r
    assert len(r) == 2
    assert sorted(r.pairs()) == [(0, 1), (2, 2)]


def test_from_pairs_range_check():
    with pytest.raises(SignatureError):
        BinRel.from_pairs(2, 2, [(0, 2)])
    with pytest.raises(SignatureError):
        BinRel.from_pairs(2, 2, [(-1, 0)])


def test_identity_and_full():
    assert sorted(BinRel.identity(3).pairs()) == [(0, 0), (1, 1), (2, 2)]
    assert len(BinRel.full(2, 3)) == 6


def test_compose_oracle():
    r = BinRel.from_pairs(2, 3, [(0, 1), (1, 2)])
    s = BinRel.from_pairs(3, 2, [(1, 1), (2, 0)])
    assert sorted(r.compose(s).pairs()) == [(0, 1), (1, 0)]


def test_compose_shape_mismatch():
    r = BinRel.from_pairs(2, 3, [(0, 0)])
    with pytest.raises(SignatureError):
        r.compose(BinRel.from_pairs(2, 2, [(0, 0)]))


def test_transitive_closure_oracle():
    r = BinRel.from_pairs(3, 3, [(0, 1), (1, 2)])
    tc = r.transitive_closure()
    assert sorted(tc.pairs()) == [(0, 1), (0, 2), (1, 2)]
    eq = r.equivalence_closure()
    assert eq.is_reflexive() and eq.is_symmetric() and eq.is_transitive()
    assert len(eq) == 9


def test_format_parse_round_trip():
    r = BinRel.from_pairs(3, 3, [(2, 0), (0, 1)])
    assert BinRel.parse(r.format(), 3).bits == r.bits
    assert BinRel.parse("", 3).bits == 0


@settings(max_examples=60, deadline=None)
@given(rel_bits)
def test_converse_involution(bits):
    r = _rel(bits)
    assert r.converse().converse().bits == r.bits


@settings(max_examples=60, deadline=None)
@given(rel_bits, rel_bits, rel_bits)
def test_compose_associative(b1, b2, b3):
    r, s, t = _rel(b1), _rel(b2), _rel(b3)
    assert r.compose(s).compose(t).bits == r.compose(s.compose(t)).bits


@settings(max_examples=60, deadline=None)
@given(rel_bits, rel_bits)
def test_converse_antidistributes_over_compose(b1, b2):
    r, s = _rel(b1), _rel(b2)
    assert r.compose(s).converse().bits == s.converse().compose(r.converse()).bits


@settings(max_examples=60, deadline=None)
@given(rel_bits)
def test_transitive_closure_is_idempotent(bits):
    tc = _rel(bits).transitive_closure()
    assert tc.transitive_closure().bits == tc.bits
    assert tc.is_transitive()


@settings(max_examples=40, deadline=None)
@given(st.lists(rel_bits, min_size=1, max_size=4))
def test_union_all_matches_pairwise(bs):
    rels = [_rel(b) for b in bs]
    acc = rels[0]
    for r in rels[1:]:
        acc = acc.union(r)
    assert union_all(rels).bits == acc.bits


# -- four-column relations -------------------------------------------------

def test_quadrel_round_trip_and_projections():
    t = QuadRel.from_quads(2, 3, [(0, 1, 2, 0), (1, 1, 1, 1)])
    assert (0, 1, 2, 0) in t and (0, 1, 0, 2) not in t
    assert t.sorted_quads() == [(0, 1, 2, 0), (1, 1, 1, 1)]
    assert sorted(t.pr12().pairs()) == [(0, 1), (1, 1)]
    assert sorted(t.pr34().pairs()) == [(1, 1), (2, 0)]


def test_quadrel_range_check():
    with pytest.raises(SignatureError):
        QuadRel.from_quads(2, 2, [(0, 2, 0, 0)])
    with pytest.raises(SignatureError):
        QuadRel.from_quads(2, 2, [(0, 0, 0, 2)])


def test_quadrel_trace():
    t = QuadRel.from_quads(2, 2, [(0, 0, 1, 1), (0, 1, 0, 1), (1, 1, 1, 1)])
    assert sorted(t.trace().pairs()) == [(0, 1), (1, 1)]


def test_quadrel_converse_swaps_pair_blocks():
    t = QuadRel.from_quads(2, 3, [(0, 1, 2, 0)])
    assert t.converse().sorted_quads() == [(2, 0, 0, 1)]
    assert t.converse().n_a == 3 and t.converse().n_b == 2


def test_quadrel_swaps():
    t = QuadRel.from_quads(2, 3, [(0, 1, 2, 0)])
    assert t.swap12().sorted_quads() == [(1, 0, 2, 0)]
    assert t.swap34().sorted_quads() == [(0, 1, 0, 2)]


def test_quadrel_compose_oracle():
    t1 = QuadRel.from_quads(2, 2, [(0, 1, 1, 0)])
    t2 = QuadRel.from_quads(2, 3, [(1, 0, 2, 2), (0, 0, 1, 1)])
    assert t1.compose(t2).sorted_quads() == [(0, 1, 2, 2)]


quad_bits = st.integers(0, 2 ** 16 - 1)


@settings(max_examples=40, deadline=None)
@given(quad_bits)
def test_quad_converse_involution(bits):
    t = QuadRel(2, 2, bits)
    assert t.converse().converse().bits == t.bits


@settings(max_examples=40, deadline=None)
@given(quad_bits, quad_bits)
def test_quad_compose_trace_submultiplicative(b1, b2):
    # raw relations only compose traces one way: the composite's trace
    # contains the composition of the traces exactly when both are links,
    # but containment in the other direction always holds
    t1, t2 = QuadRel(2, 2, b1), QuadRel(2, 2, b2)
    lhs = t1.trace().compose(t2.trace())
    rhs = t1.compose(t2).trace()
    assert lhs.bits & rhs.bits == lhs.bits
