"""Self-links and cross-links between congruence steps, end to end."""

import pytest

from finalg.bridges import (
    adjacency_search,
    bridge_from_json,
    bridge_to_json,
    certify_bridge,
    compact_restrict,
    converse,
    cross_cover_bridge,
    extract_b3,
    good_bridge_between,
    identity_bridge,
    induced_iso,
    is_bridge,
    lift_bridge,
    opt,
    opt_bridge,
    opt_bruteforce,
    project_bridge,
    quad_generate,
)
from finalg.congruences import Congruence, cov, cov_plus, format_partition, parse_partition
from finalg.errors import HypothesisError, SignatureError
from finalg.relations import BinRel, QuadRel


def P(text, size):
    return parse_partition(text, size)


ETA = P("|0 2|1 3|", 4)
ZERO2 = Congruence.zero(2)
ZERO4 = Congruence.zero(4)


# -- generation and validation ---------------------------------------------

def test_quad_generate(z2aff):
    qg = quad_generate(z2aff, ZERO2, z2aff, ZERO2,
                       [(0, 0, 0, 0), (1, 1, 1, 1), (0, 1, 0, 1)])
    assert sorted(qg.quads()) == [(0, 0, 0, 0), (0, 1, 0, 1),
                                  (1, 0, 1, 0), (1, 1, 1, 1)]


def test_is_bridge_rejections(z2aff):
    # not closed under the operations
    T = QuadRel.from_quads(2, 2, [(0, 0, 0, 0), (1, 1, 1, 1), (0, 1, 0, 1)])
    cert, viol = is_bridge(z2aff, ZERO2, z2aff, ZERO2, T)
    assert cert is None
    assert viol["condition"] == "not closed under the operations"
    assert viol["missing_quad"] == (1, 0, 1, 0)
    # diagonal only: projections never leave the classes
    diag = QuadRel.from_quads(2, 2, ((a, a, b, b) for a in range(2)
                                     for b in range(2)))
    cert, viol = is_bridge(z2aff, ZERO2, z2aff, ZERO2, diag)
    assert cert is None
    assert viol["condition"] == "left projection does not exceed the classes"
    # full box: the class pattern breaks
    full = QuadRel.from_quads(2, 2, ((a, b, c, d) for a in range(2)
                                     for b in range(2) for c in range(2)
                                     for d in range(2)))
    cert, viol = is_bridge(z2aff, ZERO2, z2aff, ZERO2, full)
    assert cert is None
    assert viol["condition"] == "class pattern broken"


def test_certify_bridge_raises_on_bad_input(z2aff):
    T = QuadRel.from_quads(2, 2, [(0, 0, 0, 0)])
    with pytest.raises(HypothesisError):
        certify_bridge(z2aff, ZERO2, z2aff, ZERO2, T)


def test_identity_bridge(s2):
    tau = cov(s2, ZERO2)[0]
    ib = identity_bridge(s2, ZERO2, tau)
    assert sorted(ib.quads()) == [(0, 0, 0, 0), (0, 1, 0, 1), (1, 1, 1, 1)]
    cert = certify_bridge(s2, ZERO2, s2, ZERO2, ib)
    assert cert.reflexive and cert.compact and cert.good and cert.b3
    assert cert.trace == ZERO2.as_binrel()
    assert cert.left_anchor == tau and cert.right_anchor == tau
    # anchors must properly contain the class relation
    with pytest.raises(HypothesisError):
        identity_bridge(s2, ZERO2, ZERO2.as_binrel())


# -- optimal traces and self-links -----------------------------------------

OPT_ORACLE = [
    ("z2aff", "|0|1|", "|0 1|"),
    ("s2", "|0|1|", "|0|1|"),
    ("lat2", "|0|1|", "|0|1|"),
    ("z4aff", "|0|1|2|3|", "|0 1 2 3|"),
    ("z4aff", "|0 2|1 3|", "|0 1 2 3|"),
    ("z2s2", "|0 1|2 3|", "|0 1 2 3|"),
    ("z2s2", "|0 2|1 3|", "|0 2|1 3|"),
]


def test_opt_oracles(by_name):
    for name, rho_text, want in OPT_ORACLE:
        alg = by_name[name]
        assert format_partition(opt(alg, P(rho_text, alg.size))) == want


def test_opt_needs_witness(by_name):
    from finalg.algebra import FiniteAlgebra
    s2 = by_name["s2"]
    bare = FiniteAlgebra("bare", s2.size, s2.ops, None)
    with pytest.raises(HypothesisError):
        opt(bare, ZERO2)


def test_opt_bridge_abelian(z2aff, z4aff):
    r = opt_bridge(z2aff, ZERO2)
    assert r.abelian
    assert sorted(r.cert.T.quads()) == [
        (0, 0, 0, 0), (0, 0, 1, 1), (0, 1, 0, 1), (0, 1, 1, 0),
        (1, 0, 0, 1), (1, 0, 1, 0), (1, 1, 0, 0), (1, 1, 1, 1)]
    assert r.cert.trace.bits == 15
    assert r.cert.reflexive and r.cert.good and r.cert.b3
    r4 = opt_bridge(z4aff, ZERO4)
    assert r4.abelian and len(r4.cert.T) == 32
    assert all((a - b) % 4 == (c - d) % 4 for a, b, c, d in r4.cert.T.quads())
    assert r4.cert.trace.bits == 65535
    assert r4.cert.left_anchor == ETA.as_binrel()


def test_opt_bridge_nonabelian(s2):
    r = opt_bridge(s2, ZERO2)
    assert not r.abelian
    assert sorted(r.cert.T.quads()) == [(0, 0, 0, 0), (0, 1, 0, 1), (1, 1, 1, 1)]
    assert r.cert.trace == ZERO2.as_binrel()


def test_bruteforce_oracles(z2aff, s2, z4aff):
    b = opt_bruteforce(z2aff, ZERO2, BinRel.full(2, 2), 2)
    assert (b.trace.bits, b.exhaustive, b.composed) == (15, True, False)
    assert (b.n_candidates, b.n_bridges) == (4, 2)
    assert b.witness_quads == ((0, 0, 1, 1),)
    b = opt_bruteforce(s2, ZERO2, cov_plus(s2, ZERO2)[0], 3)
    assert (b.trace.bits, b.exhaustive, b.composed) == (9, True, False)
    assert (b.n_candidates, b.n_bridges) == (2, 1)
    assert b.witness_quads == ()
    b = opt_bruteforce(z4aff, ZERO4, ETA.as_binrel(), 2)
    assert (b.trace.bits, b.exhaustive, b.composed) == (65535, True, False)
    assert (b.n_candidates, b.n_bridges) == (24, 3)


def test_bruteforce_never_beats_opt(by_name):
    for name, rho_text, _ in OPT_ORACLE:
        alg = by_name[name]
        rho = P(rho_text, alg.size)
        best = opt(alg, rho).as_binrel()
        for left in cov_plus(alg, rho):
            got = opt_bruteforce(alg, rho, left, 2).trace
            assert got.is_subset(best)


# -- cover-to-cover links --------------------------------------------------

def test_cross_cover_bridge(s2):
    tau, tau_prime = cov_plus(s2, ZERO2)
    T = cross_cover_bridge(s2, ZERO2, tau, tau_prime)
    cert = certify_bridge(s2, ZERO2, s2, ZERO2, T)
    assert cert.reflexive
    assert cert.left_anchor == tau and cert.right_anchor == tau_prime
    assert cert.trace == ZERO2.as_binrel()
    # same-cover case degenerates to the identity construction
    same = cross_cover_bridge(s2, ZERO2, tau, tau)
    assert same.bits == identity_bridge(s2, ZERO2, tau).bits
    with pytest.raises(HypothesisError):
        cross_cover_bridge(s2, ZERO2, tau, BinRel.full(2, 2))


# -- converse, composition, transport --------------------------------------

def test_converse_and_compose(z4aff):
    T = opt_bridge(z4aff, ZERO4).cert.T
    assert converse(converse(T)).bits == T.bits
    # this self-link is idempotent under composition
    assert T.compose(T).bits == T.bits


def test_project_lift_round_trip(z4aff, z2aff):
    T = opt_bridge(z4aff, ETA).cert.T
    down = project_bridge(z4aff, ETA, z4aff, ETA, T)
    assert sorted(down.quads()) == sorted(opt_bridge(z2aff, ZERO2).cert.T.quads())
    assert lift_bridge(z4aff, ETA, z4aff, ETA, down).bits == T.bits


# -- cross-algebra links ---------------------------------------------------

GB_Z2_Z4 = [
    (0, 0, 0, 0), (0, 0, 1, 1), (0, 0, 2, 2), (0, 0, 3, 3),
    (0, 1, 0, 2), (0, 1, 1, 3), (0, 1, 2, 0), (0, 1, 3, 1),
    (1, 0, 0, 2), (1, 0, 1, 3), (1, 0, 2, 0), (1, 0, 3, 1),
    (1, 1, 0, 0), (1, 1, 1, 1), (1, 1, 2, 2), (1, 1, 3, 3),
]


def test_good_bridge_between_similar(z2aff, z4aff):
    T = good_bridge_between(z2aff, ZERO2, z4aff, ZERO4)
    assert sorted(T.quads()) == GB_Z2_Z4
    cert = certify_bridge(z2aff, ZERO2, z4aff, ZERO4, T)
    assert cert.good and cert.b3
    assert cert.left_anchor.bits == 15 and cert.right_anchor.bits == 42405


def test_good_bridge_between_dissimilar(z2aff, z3aff, s2, lat2):
    assert good_bridge_between(z2aff, ZERO2, z3aff, Congruence.zero(3)) is None
    with pytest.raises(HypothesisError):
        good_bridge_between(s2, ZERO2, lat2, ZERO2)  # signatures differ


def test_compact_restrict_and_induced_iso(z2aff, z4aff):
    T = good_bridge_between(z2aff, ZERO2, z4aff, ZERO4)
    cert = compact_restrict(z2aff, ZERO2, z4aff, ZERO4, T, cov(z2aff, ZERO2)[0])
    assert cert.compact
    assert cert.left_anchor.bits == 15 and cert.right_anchor.bits == 42405
    assert len(cert.T) == 16
    gamma = induced_iso(z2aff, ZERO2, z4aff, ZERO4, cert.T)
    # both optimal traces are full here, so the quotients collapse to a point
    assert gamma.values == (0,) and gamma.dom_size == 1 and gamma.cod_size == 1


def test_compact_restrict_rejects_bad_target(z2aff, z4aff):
    T = good_bridge_between(z2aff, ZERO2, z4aff, ZERO4)
    with pytest.raises(HypothesisError):
        compact_restrict(z2aff, ZERO2, z4aff, ZERO4, T, ZERO2.as_binrel())


# -- adjacency -------------------------------------------------------------

def test_adjacency_witness(z4aff):
    r = adjacency_search(z4aff, ZERO4, ETA, 1)
    assert r.status == "witness" and len(r.bridge) == 64
    cert = certify_bridge(z4aff, ZERO4, z4aff, ETA, r.bridge)
    assert cert.reflexive and cert.good


def test_adjacency_refusals(z2s2):
    a, b = P("|0 2|1|3|", 4), P("|0 1|2 3|", 4)
    r = adjacency_search(z2s2, a, b, 1)
    assert r.status == "none" and r.reason == "optimal traces differ"
    assert r.bridge is None
    r = adjacency_search(z2s2, b, ETA, 1)
    assert r.status == "none" and r.reason == "optimal traces differ"
    r = adjacency_search(z2s2, a, ETA, 1)
    assert r.status == "none"
    assert r.reason == "a collapsed optimal trace forbids linking distinct congruences"


def test_adjacency_same_congruence(s2):
    r = adjacency_search(s2, ZERO2, ZERO2, 1)
    assert r.status == "witness"
    cert = certify_bridge(s2, ZERO2, s2, ZERO2, r.bridge)
    assert cert.reflexive and cert.good


# -- traced-column extraction ----------------------------------------------

def test_extract_b3(z4aff):
    T = opt_bridge(z4aff, ZERO4).cert.T
    ex = extract_b3(z4aff, ZERO4, z4aff, ZERO4, T.compose(T))
    assert len(ex) == 32 and ex.is_subset(T.compose(T))
    cert = certify_bridge(z4aff, ZERO4, z4aff, ZERO4, ex)
    assert cert.b3 and cert.trace.bits == 65535


def test_extract_b3_needs_abelian_covers(s2):
    T = opt_bridge(s2, ZERO2).cert.T
    with pytest.raises(HypothesisError):
        extract_b3(s2, ZERO2, s2, ZERO2, T)


# -- file format -----------------------------------------------------------

def test_bridge_json_round_trip(z2aff, z4aff):
    T = good_bridge_between(z2aff, ZERO2, z4aff, ZERO4)
    data = bridge_to_json(z2aff, ZERO2, z4aff, ZERO4, T)
    assert data["algA"] == "z2aff" and data["algB"] == "z4aff"
    assert data["rho"] == "|0|1|" and data["sigma"] == "|0|1|2|3|"
    rho, sigma, T2 = bridge_from_json(data, z2aff, z4aff)
    assert rho == ZERO2 and sigma == ZERO4 and T2.bits == T.bits


def test_bridge_json_rejects_malformed(z2aff, z4aff):
    T = good_bridge_between(z2aff, ZERO2, z4aff, ZERO4)
    data = bridge_to_json(z2aff, ZERO2, z4aff, ZERO4, T)
    with pytest.raises(SignatureError):
        bridge_from_json([], z2aff, z4aff)
    with pytest.raises(SignatureError):
        bridge_from_json({k: v for k, v in data.items() if k != "quads"},
                         z2aff, z4aff)
    with pytest.raises(SignatureError):
        bridge_from_json(data, z4aff, z2aff)  # wrong algebra names
    bad = dict(data, quads=[[0, 0, 0]])
    with pytest.raises(SignatureError):
        bridge_from_json(bad, z2aff, z4aff)
