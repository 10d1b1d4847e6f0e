"""Congruence lattices: partitions, generation, covers, irreducibility."""

import pytest

from finalg.algebra import quotient
from finalg.congruences import (
    Congruence,
    bar_rho,
    cg,
    con_lattice,
    cov,
    cov_plus,
    format_partition,
    is_irreducible,
    lift_congruence,
    meet_irreducibles,
    parse_partition,
    push_congruence,
    quotient_of,
    saturate_generate,
)
from finalg.errors import HypothesisError, NotACongruence
from finalg.relations import BinRel


def P(text, size):
    return parse_partition(text, size)


# -- partitions ------------------------------------------------------------

def test_partition_round_trip():
    for text, size in (("|0|1|", 2), ("|0 2|1 3|", 4), ("|0 1 2 3|", 4),
                       ("|0 2|1|3|", 4)):
        assert format_partition(parse_partition(text, size)) == text


def test_parse_partition_rejects_malformed():
    for bad, size in (("0 1", 2), ("||", 2), ("|0|1|", 3), ("|0|0 1|", 2),
                      ("|0|2|", 2), ("|0|x|", 2), ("|0 1| |", 2)):
        with pytest.raises(HypothesisError):
            parse_partition(bad, size)


def test_congruence_shape_validation():
    with pytest.raises(HypothesisError):
        Congruence(3, (0, 0))            # wrong length
    with pytest.raises(HypothesisError):
        Congruence(2, (1, 1))            # representative above element
    with pytest.raises(HypothesisError):
        Congruence(3, (0, 0, 1))         # 1 does not represent itself


def test_congruence_basics():
    eta = P("|0 2|1 3|", 4)
    assert eta.related(0, 2) and not eta.related(0, 1)
    assert eta.n_classes() == 2
    assert eta.classes() == ((0, 2), (1, 3))
    assert eta.cls(3) == (1, 3)
    rel = eta.as_binrel()
    assert (0, 2) in rel and (2, 0) in rel and (0, 1) not in rel
    assert Congruence.zero(4) == P("|0|1|2|3|", 4)
    assert Congruence.one(4) == P("|0 1 2 3|", 4)
    assert Congruence.from_blocks(4, [(1, 3), (0, 2)]) == eta


def test_meet_join_lattice_laws(z2s2):
    cons = con_lattice(z2s2).congruences
    assert len(cons) == 5
    for a in cons:
        for b in cons:
            assert a.meet(b) == b.meet(a)
            assert a.join(b) == b.join(a)
            assert a.meet(a.join(b)) == a
            assert a.join(a.meet(b)) == a
            assert a.meet(b).is_refinement(a)
            assert a.is_refinement(a.join(b))


def test_peer_size_check():
    with pytest.raises(HypothesisError):
        P("|0|1|", 2).meet(P("|0|1|2|", 3))


# -- generation ------------------------------------------------------------

def test_cg_oracles(z4aff, z2s2):
    assert format_partition(cg(z4aff, [(0, 2)])) == "|0 2|1 3|"
    assert format_partition(cg(z4aff, [(0, 1)])) == "|0 1 2 3|"
    assert format_partition(cg(z4aff, [])) == "|0|1|2|3|"
    assert format_partition(cg(z2s2, [(0, 2)])) == "|0 2|1|3|"
    assert format_partition(cg(z2s2, [(0, 1)])) == "|0 1|2 3|"


def test_cg_is_least(z2s2):
    # cg(pairs) refines every congruence containing pairs
    cons = con_lattice(z2s2).congruences
    for pairs in ([(0, 2)], [(0, 1)], [(1, 3)], [(0, 3)]):
        c = cg(z2s2, pairs)
        for other in cons:
            if all(other.related(a, b) for a, b in pairs):
                assert c.is_refinement(other)


# -- full lattices (frozen) ------------------------------------------------

CON_ORACLE = {
    "z2aff": {"|0|1|", "|0 1|"},
    "z3aff": {"|0|1|2|", "|0 1 2|"},
    "z4aff": {"|0|1|2|3|", "|0 2|1 3|", "|0 1 2 3|"},
    "s2": {"|0|1|", "|0 1|"},
    "lat2": {"|0|1|", "|0 1|"},
    "z2aff_sq": {"|0|1|2|3|", "|0 1|2 3|", "|0 2|1 3|", "|0 3|1 2|",
                 "|0 1 2 3|"},
    "z2s2": {"|0|1|2|3|", "|0 2|1|3|", "|0 1|2 3|", "|0 2|1 3|",
             "|0 1 2 3|"},
}

MI_ORACLE = {
    "z2aff": {("|0|1|", "|0 1|")},
    "z3aff": {("|0|1|2|", "|0 1 2|")},
    "z4aff": {("|0|1|2|3|", "|0 2|1 3|"), ("|0 2|1 3|", "|0 1 2 3|")},
    "s2": {("|0|1|", "|0 1|")},
    "lat2": {("|0|1|", "|0 1|")},
    "z2aff_sq": {("|0 1|2 3|", "|0 1 2 3|"), ("|0 2|1 3|", "|0 1 2 3|"),
                 ("|0 3|1 2|", "|0 1 2 3|")},
    "z2s2": {("|0 2|1|3|", "|0 2|1 3|"), ("|0 1|2 3|", "|0 1 2 3|"),
             ("|0 2|1 3|", "|0 1 2 3|")},
}

MONOLITH_ORACLE = {
    "z2aff": "|0 1|", "z3aff": "|0 1 2|", "z4aff": "|0 2|1 3|",
    "s2": "|0 1|", "lat2": "|0 1|", "z2aff_sq": None, "z2s2": None,
}


def test_con_lattice_frozen(corpus):
    for entry in corpus:
        alg = entry.algebra
        lat = con_lattice(alg)
        assert {format_partition(c) for c in lat.congruences} == CON_ORACLE[alg.name]
        got = {(format_partition(r), format_partition(rp))
               for r, rp in lat.meet_irreducibles()}
        assert got == MI_ORACLE[alg.name]
        mono = lat.monolith()
        want = MONOLITH_ORACLE[alg.name]
        assert (format_partition(mono) if mono is not None else None) == want
        assert lat.is_si() == (want is not None)


def test_upper_covers(z4aff, z2s2):
    lat = con_lattice(z4aff)
    eta = P("|0 2|1 3|", 4)
    assert lat.upper_covers(lat.zero()) == (eta,)
    assert lat.upper_covers(eta) == (lat.one(),)
    assert lat.upper_covers(lat.one()) == ()
    # z2s2's zero has two upper covers
    lat2 = con_lattice(z2s2)
    ups = {format_partition(c) for c in lat2.upper_covers(lat2.zero())}
    assert ups == {"|0 2|1|3|", "|0 1|2 3|"}


def test_meet_irreducibles_have_unique_cover(corpus):
    for entry in corpus:
        alg = entry.algebra
        lat = con_lattice(alg)
        mi = dict(lat.meet_irreducibles())
        for rho, rho_plus in mi.items():
            assert lat.upper_covers(rho) == (rho_plus,)
        # everything not listed is full or has several covers
        for c in lat.congruences:
            if c not in mi and c != lat.one():
                assert len(lat.upper_covers(c)) > 1


# -- quotients and transport -----------------------------------------------

def test_quotient_of_oracle(z4aff):
    q_alg, q = quotient_of(z4aff, P("|0 2|1 3|", 4))
    assert q_alg.size == 2
    assert q.values == (0, 1, 0, 1)
    assert [(op.name, op.arity) for op in q_alg.ops] == [("p", 3)]
    # induced operation is x - y + z mod 2
    assert q_alg.ops[0].table == (0, 1, 1, 0, 1, 0, 0, 1)


def test_quotient_rejects_incompatible(z4aff):
    with pytest.raises(NotACongruence):
        quotient(z4aff, P("|0 1|2 3|", 4))


def test_push_lift_congruence(z4aff):
    eta = P("|0 2|1 3|", 4)
    _, q = quotient_of(z4aff, eta)
    assert push_congruence(q, eta) == Congruence.zero(2)
    assert push_congruence(q, Congruence.one(4)) == Congruence.one(2)
    assert lift_congruence(q, Congruence.zero(2)) == eta
    assert lift_congruence(q, Congruence.one(2)) == Congruence.one(4)
    with pytest.raises(HypothesisError):
        push_congruence(q, Congruence.zero(4))  # does not contain ker(q)


# -- saturation, covers, bar -----------------------------------------------

def test_saturate_generate(z4aff):
    eta = P("|0 2|1 3|", 4)
    seed = BinRel.from_pairs(4, 4, [(0, 1)])
    got = saturate_generate(z4aff, eta, seed)
    # eta-saturated: membership constant on eta-class blocks
    for a, b in got.pairs():
        for a2 in eta.cls(a):
            for b2 in eta.cls(b):
                assert (a2, b2) in got
    assert (0, 1) in got
    # the seed block is closed by itself: p is idempotent coordinatewise
    assert set(got.pairs()) == {(a, b) for a in (0, 2) for b in (1, 3)}


def test_cov_oracles(z2aff, s2, z4aff):
    assert [r.bits for r in cov(z2aff, P("|0|1|", 2))] == [15]
    assert sorted(r.bits for r in cov(s2, P("|0|1|", 2))) == [11, 13]
    assert [r.bits for r in cov(z4aff, P("|0|1|2|3|", 4))] == [42405]
    assert [r.bits for r in cov(z4aff, P("|0 2|1 3|", 4))] == [65535]
    with pytest.raises(HypothesisError):
        cov(z2aff, P("|0 1|", 2))


def test_cov_plus_matches_cov_here(z2aff, s2, z4aff):
    # for these algebras every minimal saturated cover already sits below rho+
    for alg, rho in ((z2aff, P("|0|1|", 2)), (s2, P("|0|1|", 2)),
                     (z4aff, P("|0|1|2|3|", 4)), (z4aff, P("|0 2|1 3|", 4))):
        assert cov_plus(alg, rho) == cov(alg, rho)


def test_cov_plus_converse_pair(s2):
    rho = P("|0|1|", 2)
    members = cov_plus(s2, rho)
    assert len(members) == 2
    a, b = members
    assert a.converse() == b
    assert a.intersection(b) == rho.as_binrel()
    assert a.union(b).bits == 15


def test_bar_rho_oracles(z2aff, s2, z4aff):
    assert bar_rho(z2aff, P("|0|1|", 2)).bits == 15
    assert bar_rho(s2, P("|0|1|", 2)).bits == 15
    assert bar_rho(z4aff, P("|0|1|2|3|", 4)).bits == 42405
    assert bar_rho(z4aff, P("|0 2|1 3|", 4)).bits == 65535


def test_bar_rho_equals_plus_when_abelian(z4aff):
    # abelian cover: bar collapses to rho+ itself
    eta = P("|0 2|1 3|", 4)
    assert bar_rho(z4aff, Congruence.zero(4)) == eta.as_binrel()


# -- irreducibility --------------------------------------------------------

IRR_ORACLE = {
    ("z2aff", "|0|1|"): True,
    ("z3aff", "|0|1|2|"): True,
    ("z4aff", "|0|1|2|3|"): True,
    ("z4aff", "|0 2|1 3|"): True,
    ("s2", "|0|1|"): False,
    ("lat2", "|0|1|"): False,
    ("z2aff_sq", "|0 1|2 3|"): True,
    ("z2aff_sq", "|0 2|1 3|"): True,
    ("z2aff_sq", "|0 3|1 2|"): True,
    ("z2s2", "|0 2|1|3|"): False,
    ("z2s2", "|0 1|2 3|"): True,
    ("z2s2", "|0 2|1 3|"): False,
}


def test_is_irreducible_frozen(corpus):
    seen = set()
    for entry in corpus:
        alg = entry.algebra
        for rho, _ in meet_irreducibles(alg):
            key = (alg.name, format_partition(rho))
            flag, witness = is_irreducible(alg, rho)
            assert flag == IRR_ORACLE[key]
            if flag:
                assert witness == cov(alg, rho)[0]
            else:
                assert witness is None
            seen.add(key)
    assert seen == set(IRR_ORACLE)


def test_is_irreducible_rejects_full(z2aff):
    with pytest.raises(HypothesisError):
        is_irreducible(z2aff, Congruence.one(2))
