"""Term-condition centrality, centralizers, and class groups."""

import itertools

import pytest

from finalg.commutator import (
    Matrix2x2,
    centralizer,
    centralizes,
    centrality_violation,
    class_group,
    is_abelian,
    is_abelian_algebra,
    is_abelian_modulo,
    term_condition_sample,
)
from finalg.congruences import Congruence, con_lattice, format_partition, parse_partition
from finalg.errors import HypothesisError
from finalg.terms import parse_term


def P(text, size):
    return parse_partition(text, size)


def test_matrix2x2_views():
    m = Matrix2x2(1, 2, 3, 4)
    assert m.columns == ((1, 2), (3, 4))
    assert m.rows == ((1, 3), (2, 4))
    t = m.transpose()
    assert t.columns == m.rows and t.rows == m.columns


def test_abelian_algebra_oracles(corpus):
    want = {"z2aff": True, "z3aff": True, "z4aff": True, "s2": False,
            "lat2": False, "z2aff_sq": True, "z2s2": False}
    for entry in corpus:
        assert is_abelian_algebra(entry.algebra) == want[entry.algebra.name]


def test_abelian_congruence_oracles(z2s2):
    flags = {"|0|1|2|3|": True, "|0 2|1|3|": True, "|0 1|2 3|": False,
             "|0 2|1 3|": True, "|0 1 2 3|": False}
    for text, want in flags.items():
        assert is_abelian(z2s2, P(text, 4)) == want


def test_abelian_modulo(z4aff):
    eta = P("|0 2|1 3|", 4)
    assert is_abelian_modulo(z4aff, Congruence.one(4), eta)
    with pytest.raises(HypothesisError):
        is_abelian_modulo(z4aff, eta, Congruence.one(4))


def test_cross_check_never_disagrees(z2s2, s2):
    # row and column forms agree on every congruence triple
    for alg in (z2s2, s2):
        cons = con_lattice(alg).congruences
        for phi, theta, delta in itertools.product(cons, repeat=3):
            centralizes(alg, phi, theta, delta, cross_check=True)


def test_centralizer_oracles(z4aff, s2, lat2, z2s2):
    zero4 = Congruence.zero(4)
    eta = P("|0 2|1 3|", 4)
    cases = [
        (z4aff, eta, zero4, "|0 1 2 3|"),
        (z4aff, Congruence.one(4), eta, "|0 1 2 3|"),
        (s2, Congruence.one(2), Congruence.zero(2), "|0|1|"),
        (lat2, Congruence.one(2), Congruence.zero(2), "|0|1|"),
        (z2s2, P("|0 2|1|3|", 4), zero4, "|0 1 2 3|"),
        (z2s2, P("|0 1|2 3|", 4), zero4, "|0 2|1 3|"),
        (z2s2, Congruence.one(4), zero4, "|0 2|1 3|"),
    ]
    for alg, theta, delta, want in cases:
        assert format_partition(centralizer(alg, theta, delta)) == want


def test_centralizer_is_largest(z2s2):
    # (delta : theta) centralizes, and dominates every lattice member that does
    cons = con_lattice(z2s2).congruences
    for theta in cons:
        for delta in cons:
            c = centralizer(z2s2, theta, delta)
            assert centralizes(z2s2, c, theta, delta)
            for phi in cons:
                if centralizes(z2s2, phi, theta, delta):
                    assert phi.is_refinement(c)


def test_centrality_violation(s2, z4aff):
    one2, zero2 = Congruence.one(2), Congruence.zero(2)
    assert centrality_violation(s2, one2, one2, zero2) == Matrix2x2(0, 0, 0, 1)
    assert centrality_violation(
        z4aff, Congruence.one(4), Congruence.one(4), Congruence.zero(4)) is None


def test_violation_consistent_with_centralizes(z2s2):
    cons = con_lattice(z2s2).congruences
    for phi, theta, delta in itertools.product(cons, repeat=3):
        has_violation = centrality_violation(z2s2, phi, theta, delta) is not None
        row_ok = centralizes(z2s2, phi, theta, delta, cross_check=False)
        assert has_violation == (not row_ok)


def test_class_group_full(z4aff):
    d = parse_term("(p x0 x1 x2)", z4aff)
    g = class_group(z4aff, Congruence.one(4), d, 0)
    assert g.carrier == (0, 1, 2, 3)
    assert g.zero == 0
    assert g.add == ((0, 1, 2, 3), (1, 2, 3, 0), (2, 3, 0, 1), (3, 0, 1, 2))
    assert g.neg == (0, 3, 2, 1)
    # shifting the zero element shifts the whole table
    g1 = class_group(z4aff, Congruence.one(4), d, 1)
    assert g1.zero == 1
    assert g1.element_add(3, 2) == (3 - 1 + 2) % 4
    assert g1.element_neg(3) == (1 - (3 - 1)) % 4


def test_class_group_on_monolith_classes(z4aff, z2s2):
    d4 = parse_term("(p x0 x1 x2)", z4aff)
    eta = P("|0 2|1 3|", 4)
    g = class_group(z4aff, eta, d4, 0)
    assert g.carrier == (0, 2) and g.zero == 0
    assert g.add == ((0, 1), (1, 0)) and g.neg == (0, 1)
    g = class_group(z4aff, eta, d4, 1)
    assert g.carrier == (1, 3) and g.carrier[g.zero] == 1
    dz = parse_term("(p x0 x1 x2)", z2s2)
    g = class_group(z2s2, P("|0 2|1|3|", 4), dz, 0)
    assert g.carrier == (0, 2) and g.add == ((0, 1), (1, 0))


def test_class_group_input_checks(z4aff, z2s2):
    d = parse_term("(p x0 x1 x2)", z4aff)
    with pytest.raises(HypothesisError):
        class_group(z4aff, Congruence.one(4), "(p x0 x1 x2)", 0)  # not a term
    with pytest.raises(HypothesisError):
        # kerB is not abelian in z2s2
        dz = parse_term("(p x0 x1 x2)", z2s2)
        class_group(z2s2, P("|0 1|2 3|", 4), dz, 0)
    with pytest.raises(HypothesisError):
        # projection-like term is no weak difference term
        bad = parse_term("(p x0 x0 x0)", z4aff)
        class_group(z4aff, Congruence.one(4), bad, 0)


def test_term_sample_probe(z4aff, s2):
    # matrix centrality implies the direct term-operation condition
    for alg in (z4aff, s2):
        cons = con_lattice(alg).congruences
        for phi, theta, delta in itertools.product(cons, repeat=3):
            if centralizes(alg, phi, theta, delta):
                assert term_condition_sample(alg, phi, theta, delta)
