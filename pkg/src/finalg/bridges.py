"""Certified quadruple relations linking congruences on two algebras.

A linking relation T lives in A x A x B x B and couples a proper congruence
rho on the left algebra with sigma on the right.  Certification demands four
facts, each re-checkable on its own: T is a subuniverse of the fourth power;
T absorbs class replacement (swapping either left coordinate inside its rho
class, or either right coordinate inside its sigma class, stays in T); both
projections properly exceed their class relations; and a left pair falls
inside rho exactly when its right companion falls inside sigma.

Class-replacement closure means T is the full preimage of its image over the
two quotient squares.  That observation powers quad_generate, the one
closure routine everything else here is built on: push the seed down to the
quotients, close under the operations there, and pull back.

Constructions whose properties follow from verified theory are re-checked
after being built; a failed consequence raises TheoremViolation with a
finite witness rather than returning quietly.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable

from .algebra import (
    ElementMap,
    FiniteAlgebra,
    _cache,
    close_in_product,
    find_isomorphism,
    is_homomorphism,
)
from .commutator import (
    _check_congruence,
    centralizer,
    is_abelian_modulo,
)
from .congruences import (
    Congruence,
    _has_taylor_witness,
    _mi_upper_cover,
    cov,
    cov_plus,
    format_partition,
    meet_irreducibles,
    monolith,
    parse_partition,
    quotient_of,
    rel_lift,
    rel_push,
    saturate_generate,
)
from .deltasim import build_T_DA, build_theta_algebra, delta, is_similar
from .errors import HypothesisError, ResourceLimitError, SignatureError, TheoremViolation
from .limits import DEFAULT_LIMITS, Limits
from .relations import BinRel, QuadRel

Quad = tuple[int, int, int, int]


# -- context plumbing --------------------------------------------------------

def _check_context(
    alg_a: FiniteAlgebra,
    rho: Congruence,
    alg_b: FiniteAlgebra,
    sigma: Congruence,
    T: QuadRel | None,
    limits: Limits,
) -> None:
    if not alg_a.same_signature(alg_b):
        raise HypothesisError("the two algebras must share a signature")
    if rho.size != alg_a.size or sigma.size != alg_b.size:
        raise HypothesisError("congruences over the wrong universes")
    if rho.n_classes() == 1 or sigma.n_classes() == 1:
        raise HypothesisError("the full congruence cannot anchor a linking relation")
    _check_congruence(alg_a, rho, limits)
    _check_congruence(alg_b, sigma, limits)
    if T is not None and (T.n_a != alg_a.size or T.n_b != alg_b.size):
        raise HypothesisError("quadruple relation over the wrong universes")


def _push_quads(qa: ElementMap, qb: ElementMap, T: QuadRel) -> QuadRel:
    return QuadRel.from_quads(
        qa.cod_size,
        qb.cod_size,
        ((qa(a1), qa(a2), qb(b1), qb(b2)) for a1, a2, b1, b2 in T.quads()),
    )


def _lift_quads(qa: ElementMap, qb: ElementMap, T: QuadRel) -> QuadRel:
    na, nb = qa.dom_size, qb.dom_size
    return QuadRel.from_quads(
        na,
        nb,
        (
            q
            for q in itertools.product(range(na), range(na), range(nb), range(nb))
            if (qa(q[0]), qa(q[1]), qb(q[2]), qb(q[3])) in T
        ),
    )


def _quad_closure(
    alg_a: FiniteAlgebra, alg_b: FiniteAlgebra, T: QuadRel, limits: Limits
) -> QuadRel:
    """Subuniverse of A x A x B x B generated by the quadruples (no saturation)."""
    n, m = alg_a.size, alg_b.size
    packed = [
        ((a1 * n + a2) * m + b1) * m + b2 for a1, a2, b1, b2 in T.quads()
    ]
    ok, members = close_in_product([alg_a, alg_a, alg_b, alg_b], packed, limits=limits)
    assert ok  # no membership mask in play
    bits = 0
    for v in members:
        bits |= 1 << int(v)
    return QuadRel(n, m, bits)


def _saturation(rho: Congruence, sigma: Congruence, T: QuadRel) -> QuadRel:
    """Close the quadruple set under class replacement on both sides."""
    n, m = T.n_a, T.n_b
    bits = 0
    for a1, a2, b1, b2 in T.quads():
        right = [y1 * m + y2 for y1 in sigma.cls(b1) for y2 in sigma.cls(b2)]
        for x1 in rho.cls(a1):
            for x2 in rho.cls(a2):
                base = (x1 * n + x2) * m * m
                for off in right:
                    bits |= 1 << (base + off)
    return QuadRel(n, m, bits)


def _first_extra_quad(bigger: QuadRel, smaller: QuadRel) -> Quad:
    diff = bigger.bits & ~smaller.bits
    low = diff & -diff
    i = low.bit_length() - 1
    m = bigger.n_b
    i, b2 = divmod(i, m)
    i, b1 = divmod(i, m)
    a1, a2 = divmod(i, bigger.n_a)
    return (a1, a2, b1, b2)


def quad_generate(
    alg_a: FiniteAlgebra,
    rho: Congruence,
    alg_b: FiniteAlgebra,
    sigma: Congruence,
    quads: QuadRel | Iterable[Quad],
    *,
    limits: Limits = DEFAULT_LIMITS,
) -> QuadRel:
    """Least class-replacement-closed subuniverse containing the seed.

    Works over the quotient squares and pulls the result back, which is
    exactly the fixpoint of alternating subuniverse generation with
    saturation.
    """
    if not isinstance(quads, QuadRel):
        quads = QuadRel.from_quads(alg_a.size, alg_b.size, quads)
    _check_context(alg_a, rho, alg_b, sigma, quads, limits)
    aq, qa = quotient_of(alg_a, rho, limits=limits)
    bq, qb = quotient_of(alg_b, sigma, limits=limits)
    closed = _quad_closure(aq, bq, _push_quads(qa, qb, quads), limits)
    return _lift_quads(qa, qb, closed)


# -- certification -----------------------------------------------------------

@dataclass(frozen=True)
class BridgeCert:
    """Anchors, trace and recomputable flags of a certified linking relation.

    good is None when either congruence has no unique upper cover, since
    the test needs one on each side.
    """

    alg_a: FiniteAlgebra
    alg_b: FiniteAlgebra
    rho: Congruence
    sigma: Congruence
    T: QuadRel
    left_anchor: BinRel
    right_anchor: BinRel
    trace: BinRel
    reflexive: bool
    compact: bool
    good: bool | None
    b3: bool


def _good_test(
    rho: Congruence,
    rho_plus: Congruence,
    sigma: Congruence,
    sigma_plus: Congruence,
    T: QuadRel,
) -> bool:
    core = (
        q
        for q in T.quads()
        if rho_plus.related(q[0], q[1]) and sigma_plus.related(q[2], q[3])
    )
    pr = BinRel.from_pairs(T.n_a, T.n_a, ((q[0], q[1]) for q in core))
    return pr.bits != rho.as_binrel().bits


def is_bridge(
    alg_a: FiniteAlgebra,
    rho: Congruence,
    alg_b: FiniteAlgebra,
    sigma: Congruence,
    T: QuadRel,
    *,
    limits: Limits = DEFAULT_LIMITS,
) -> tuple[BridgeCert | None, dict | None]:
    """Validate every condition; (cert, None) on success, (None, violation) else.

    The violation dict names the failed condition and carries a least
    witness (a quadruple or a pair) in the fixed check order: operation
    closure, class-replacement closure, left projection, right projection,
    class pattern.
    """
    _check_context(alg_a, rho, alg_b, sigma, T, limits)

    closed = _quad_closure(alg_a, alg_b, T, limits)
    if closed.bits != T.bits:
        return None, {
            "condition": "not closed under the operations",
            "missing_quad": _first_extra_quad(closed, T),
        }
    sat = _saturation(rho, sigma, T)
    if sat.bits != T.bits:
        return None, {
            "condition": "not closed under class replacement",
            "missing_quad": _first_extra_quad(sat, T),
        }

    left, right = T.pr12(), T.pr34()
    rho_rel, sigma_rel = rho.as_binrel(), sigma.as_binrel()
    if not rho_rel.is_subset(left):
        return None, {
            "condition": "left projection misses a class pair",
            "pair": min(rho_rel.difference(left).pairs()),
        }
    if left.bits == rho_rel.bits:
        return None, {"condition": "left projection does not exceed the classes"}
    if not sigma_rel.is_subset(right):
        return None, {
            "condition": "right projection misses a class pair",
            "pair": min(sigma_rel.difference(right).pairs()),
        }
    if right.bits == sigma_rel.bits:
        return None, {"condition": "right projection does not exceed the classes"}

    for q in T.sorted_quads():
        if rho.related(q[0], q[1]) != sigma.related(q[2], q[3]):
            return None, {"condition": "class pattern broken", "quad": q}

    trace = T.trace()
    reflexive = alg_a == alg_b and BinRel.identity(alg_a.size).is_subset(trace)
    compact = any(
        left.bits == r.bits for r in cov(alg_a, rho, limits=limits)
    ) and any(right.bits == r.bits for r in cov(alg_b, sigma, limits=limits))
    good: bool | None = None
    mi_a = dict(meet_irreducibles(alg_a, limits=limits))
    mi_b = dict(meet_irreducibles(alg_b, limits=limits))
    if rho in mi_a and sigma in mi_b:
        good = _good_test(rho, mi_a[rho], sigma, mi_b[sigma], T)
    b3 = all(
        (q[0], q[2]) in trace and (q[1], q[3]) in trace for q in T.quads()
    )
    cert = BridgeCert(
        alg_a, alg_b, rho, sigma, T,
        left, right, trace, reflexive, compact, good, b3,
    )
    return cert, None


def certify_bridge(
    alg_a: FiniteAlgebra,
    rho: Congruence,
    alg_b: FiniteAlgebra,
    sigma: Congruence,
    T: QuadRel,
    *,
    limits: Limits = DEFAULT_LIMITS,
) -> BridgeCert:
    """is_bridge, but a failed condition raises HypothesisError."""
    cert, violation = is_bridge(alg_a, rho, alg_b, sigma, T, limits=limits)
    if cert is None:
        assert violation is not None
        raise HypothesisError(
            f"not a linking relation: {violation['condition']} (witness {violation})"
        )
    return cert


def _must_certify(
    alg_a: FiniteAlgebra,
    rho: Congruence,
    alg_b: FiniteAlgebra,
    sigma: Congruence,
    T: QuadRel,
    what: str,
    limits: Limits,
) -> BridgeCert:
    # for relations whose bridge property is a proven consequence
    cert, violation = is_bridge(alg_a, rho, alg_b, sigma, T, limits=limits)
    if cert is None:
        assert violation is not None
        raise TheoremViolation(
            f"{what} failed certification: {violation['condition']}",
            witness={
                "construction": what,
                **{k: str(v) for k, v in violation.items()},
            },
        )
    return cert


def _expect(condition: bool, what: str, reason: str, **extra: str) -> None:
    if not condition:
        raise TheoremViolation(
            f"{what}: {reason}",
            witness={"construction": what, "reason": reason, **extra},
        )


# -- elementary constructions ------------------------------------------------

def identity_bridge(
    alg: FiniteAlgebra,
    rho: Congruence,
    left: BinRel,
    *,
    limits: Limits = DEFAULT_LIMITS,
) -> QuadRel:
    """Quadruples with both pairs in the anchor and related columns.

    left must be a class-replacement-closed subuniverse of the square
    properly containing rho's relation.
    """
    _check_context(alg, rho, alg, rho, None, limits)
    if left.n_left != alg.size or left.n_right != alg.size:
        raise HypothesisError("anchor must live on the algebra's square")
    rho_rel = rho.as_binrel()
    if not rho_rel.is_subset(left) or left.bits == rho_rel.bits:
        raise HypothesisError("anchor must properly contain the class relation")
    if saturate_generate(alg, rho, left, limits=limits).bits != left.bits:
        raise HypothesisError(
            "anchor must be a class-replacement-closed subuniverse"
        )
    lp = list(left.pairs())
    return QuadRel.from_quads(
        alg.size,
        alg.size,
        (
            (a1, a2, b1, b2)
            for a1, a2 in lp
            for b1, b2 in lp
            if rho.related(a1, b1) and rho.related(a2, b2)
        ),
    )


def converse(T: QuadRel) -> QuadRel:
    return T.converse()


def compose(T: QuadRel, other: QuadRel) -> QuadRel:
    """Relational join on the middle pair universe; certification is the
    caller's job, since the result can fail the projection condition."""
    return T.compose(other)


def project_bridge(
    alg_a: FiniteAlgebra,
    rho: Congruence,
    alg_b: FiniteAlgebra,
    sigma: Congruence,
    T: QuadRel,
    *,
    limits: Limits = DEFAULT_LIMITS,
) -> QuadRel:
    """Image over the two quotient algebras; demands class-replacement closure."""
    _check_context(alg_a, rho, alg_b, sigma, T, limits)
    sat = _saturation(rho, sigma, T)
    if sat.bits != T.bits:
        raise HypothesisError(
            "not closed under class replacement; first missing quadruple "
            f"{_first_extra_quad(sat, T)}"
        )
    _, qa = quotient_of(alg_a, rho, limits=limits)
    _, qb = quotient_of(alg_b, sigma, limits=limits)
    return _push_quads(qa, qb, T)


def lift_bridge(
    alg_a: FiniteAlgebra,
    rho: Congruence,
    alg_b: FiniteAlgebra,
    sigma: Congruence,
    T_quotient: QuadRel,
    *,
    limits: Limits = DEFAULT_LIMITS,
) -> QuadRel:
    """Full preimage under the natural maps; inverse of project_bridge."""
    _check_context(alg_a, rho, alg_b, sigma, None, limits)
    aq, qa = quotient_of(alg_a, rho, limits=limits)
    bq, qb = quotient_of(alg_b, sigma, limits=limits)
    if T_quotient.n_a != aq.size or T_quotient.n_b != bq.size:
        raise HypothesisError("quadruple relation over the wrong quotient universes")
    return _lift_quads(qa, qb, T_quotient)


def compact_restrict(
    alg_a: FiniteAlgebra,
    rho: Congruence,
    alg_b: FiniteAlgebra,
    sigma: Congruence,
    T: QuadRel,
    left: BinRel,
    *,
    limits: Limits = DEFAULT_LIMITS,
) -> BridgeCert:
    """Shrink both anchors to minimal covers without touching the trace.

    First keep only quadruples whose left pair lies in left, then only
    those whose right pair lies in the least minimal cover inside the
    restricted right projection.  Every property this two-step restriction
    is known to preserve is re-checked.
    """
    cert = certify_bridge(alg_a, rho, alg_b, sigma, T, limits=limits)
    if not any(left.bits == r.bits for r in cov(alg_a, rho, limits=limits)):
        raise HypothesisError("restriction target is not a minimal saturated cover")
    if not left.is_subset(cert.left_anchor):
        raise HypothesisError("restriction target is not inside the left anchor")

    what = "compact restriction"
    n, m = T.n_a, T.n_b
    t1 = QuadRel.from_quads(
        n, m, (q for q in T.quads() if (q[0], q[1]) in left)
    )
    r34 = t1.pr34()
    inner = [r for r in cov(alg_b, sigma, limits=limits) if r.is_subset(r34)]
    _expect(
        bool(inner), what,
        "no minimal saturated cover inside the restricted right projection",
        right_projection=r34.format(),
    )
    right = inner[0]
    t2 = QuadRel.from_quads(
        n, m, (q for q in t1.quads() if (q[2], q[3]) in right)
    )
    cert2 = _must_certify(alg_a, rho, alg_b, sigma, t2, what, limits)
    _expect(cert2.compact, what, "result is not compact")
    _expect(
        cert2.left_anchor.bits == left.bits, what,
        "left anchor moved off the requested cover",
    )
    _expect(
        cert2.right_anchor.bits == right.bits, what,
        "right anchor moved off the chosen cover",
    )
    _expect(
        cert2.trace.bits == cert.trace.bits, what,
        "trace changed under restriction",
        before=cert.trace.format(),
        after=cert2.trace.format(),
    )
    return cert2


def is_good(
    alg_a: FiniteAlgebra,
    rho: Congruence,
    alg_b: FiniteAlgebra,
    sigma: Congruence,
    T: QuadRel,
    *,
    limits: Limits = DEFAULT_LIMITS,
) -> bool:
    """Does the part of T between the upper covers project beyond rho?"""
    rho_plus = _mi_upper_cover(alg_a, rho, limits)
    sigma_plus = _mi_upper_cover(alg_b, sigma, limits)
    return _good_test(rho, rho_plus, sigma, sigma_plus, T)


# -- the optimal trace -------------------------------------------------------

def opt(
    alg: FiniteAlgebra, rho: Congruence, *, limits: Limits = DEFAULT_LIMITS
) -> Congruence:
    """Largest congruence centralizing the unique upper cover over rho.

    This equals the best trace attainable by a reflexive self-linking
    relation anchored at a minimal cover, so it caps every brute-force
    search.  Refuses to run without a verified idempotent-symmetric
    witness term, which the underlying theory assumes.  As a standing
    cross-check, the cover is abelian over rho exactly when the result
    exceeds rho.
    """

    def build() -> Congruence:
        if not _has_taylor_witness(alg):
            raise HypothesisError(
                f"{alg.name} carries no verified near-unanimity-style witness "
                "term (key 'wnu')"
            )
        rho_plus = _mi_upper_cover(alg, rho, limits)
        result = centralizer(alg, rho_plus, rho, limits=limits)
        abelian = is_abelian_modulo(alg, rho_plus, rho, limits=limits)
        _expect(
            abelian == (result != rho),
            "optimal trace",
            "abelian step disagrees with a growing centralizer",
            rho=format_partition(rho),
            centralizer=format_partition(result),
        )
        return result

    return _cache(alg, ("opt_trace", rho.least), build)


@dataclass(frozen=True)
class OptBridgeResult:
    cert: BridgeCert
    abelian: bool  # False means the identity construction is already optimal


def opt_bridge(
    alg: FiniteAlgebra, rho: Congruence, *, limits: Limits = DEFAULT_LIMITS
) -> OptBridgeResult:
    """Best reflexive self-linking relation over rho, certified.

    Abelian cover: sandwich the diagonal-generated pair congruence of the
    upper cover between two identity constructions; its trace is the full
    centralizer.  Nonabelian cover: the identity construction on the least
    minimal cover inside the upper cover already attains the (collapsed)
    optimal trace.
    """

    def build() -> OptBridgeResult:
        what = "optimal linking construction"
        alpha = opt(alg, rho, limits=limits)
        rho_plus = _mi_upper_cover(alg, rho, limits)
        abelian = alpha != rho
        if abelian:
            _expect(
                rho_plus.is_refinement(alpha), what,
                "upper cover escapes its own centralizer",
                rho=format_partition(rho),
            )
            ta = build_theta_algebra(alg, rho_plus, limits=limits)
            dl = delta(alg, rho_plus, alpha, limits=limits)
            npairs = len(ta.pairs)
            flat = QuadRel.from_quads(
                alg.size,
                alg.size,
                (
                    ta.pairs[i] + ta.pairs[j]
                    for i in range(npairs)
                    for j in range(npairs)
                    if dl.related(i, j)
                ),
            )
            ident = identity_bridge(alg, rho, rho_plus.as_binrel(), limits=limits)
            T = ident.compose(flat).compose(ident)
            cert = _must_certify(alg, rho, alg, rho, T, what, limits)
            plus_rel = rho_plus.as_binrel()
            _expect(
                cert.left_anchor.bits == plus_rel.bits
                and cert.right_anchor.bits == plus_rel.bits,
                what, "anchors differ from the upper cover",
            )
            _expect(
                cert.trace.bits == alpha.as_binrel().bits, what,
                "trace differs from the optimal trace",
                trace=cert.trace.format(),
                expected=alpha.as_binrel().format(),
            )
        else:
            taus = cov_plus(alg, rho, limits=limits)
            _expect(
                bool(taus), what,
                "no minimal saturated cover inside the upper cover",
                rho=format_partition(rho),
            )
            T = identity_bridge(alg, rho, taus[0], limits=limits)
            cert = _must_certify(alg, rho, alg, rho, T, what, limits)
            _expect(
                cert.trace.bits == rho.as_binrel().bits, what,
                "identity construction has an unexpected trace",
            )
        _expect(cert.reflexive, what, "result is not reflexive")
        _expect(cert.good is True, what, "result fails the goodness test")
        return OptBridgeResult(cert, abelian)

    return _cache(alg, ("opt_bridge", rho.least), build)


# -- brute-force search for the optimal trace --------------------------------

@dataclass(frozen=True)
class BruteResult:
    """Outcome of the bounded generator sweep.

    trace is a certified lower bound for the optimal trace; it is exact
    when exhaustive is True.  witness_quads generate (together with the
    identity construction) a found relation attaining the best found
    trace; empty when the identity construction alone already does, or
    when the reported trace arises only through composition of found
    traces (then composed is True).
    """

    trace: BinRel
    witness_quads: tuple[Quad, ...]
    exhaustive: bool
    composed: bool
    n_candidates: int
    n_bridges: int


def opt_bruteforce(
    alg: FiniteAlgebra,
    rho: Congruence,
    left: BinRel,
    budget: int,
    *,
    limits: Limits = DEFAULT_LIMITS,
) -> BruteResult:
    """Sweep closures of the identity construction plus up to budget quadruples.

    Generator sets are enumerated over the quotient square (distinct seeds
    with the same saturation collapse there), level by level: level j holds
    closures needing j generators.  A closure is discarded, along with every
    superset, as soon as it breaks the class pattern or pushes an anchor
    beyond left; both defects are inherited upward, so the pruning loses
    nothing.  Surviving closures are exactly the reflexive self-linking
    relations with both anchors equal to left.  Their traces are then closed
    under composition and inversion, which bridges themselves support, and
    the absorbing trace of that closed set is returned.

    exhaustive means the join sweep reached a fixpoint within the budget;
    then every generator set of every size has been accounted for.
    """
    if budget < 0:
        raise HypothesisError("budget must be nonnegative")
    _check_context(alg, rho, alg, rho, None, limits)
    if not any(left.bits == r.bits for r in cov(alg, rho, limits=limits)):
        raise HypothesisError("anchor must be a minimal saturated cover")

    aq, qa = quotient_of(alg, rho, limits=limits)
    nq = aq.size
    left_q = rel_push(qa, qa, left)
    lbits = left_q.bits

    base = _quad_closure(
        aq, aq,
        QuadRel.from_quads(nq, nq, ((x, y, x, y) for x, y in left_q.pairs())),
        limits,
    )
    _expect(
        all((q[0], q[1]) in left_q and q[0] == q[2] and q[1] == q[3]
            for q in base.quads()),
        "generator sweep", "identity core is not closed as constructed",
    )

    def anchors_escape(t: QuadRel) -> bool:
        return (t.pr12().bits | lbits) != lbits or (t.pr34().bits | lbits) != lbits

    def pattern_broken(t: QuadRel) -> bool:
        return any((q[0] == q[1]) != (q[2] == q[3]) for q in t.quads())

    candidates = [
        q
        for q in itertools.product(range(nq), repeat=4)
        if q not in base
        and (q[0], q[1]) in left_q
        and (q[2], q[3]) in left_q
        and (q[0] == q[1]) == (q[2] == q[3])
    ]

    singles: dict[int, tuple[Quad, ...]] = {}
    for q in candidates:
        t = _quad_closure(aq, aq, base.union(QuadRel.from_quads(nq, nq, [q])), limits)
        if anchors_escape(t) or pattern_broken(t):
            continue
        singles.setdefault(t.bits, (q,))

    # join sweep to fixpoint, remembering the level where each closure appears
    level_of: dict[int, int] = {base.bits: 0}
    gens_of: dict[int, tuple[Quad, ...]] = {base.bits: ()}
    for bits, gens in sorted(singles.items(), key=lambda kv: kv[1]):
        if bits not in level_of:
            level_of[bits] = 1
            gens_of[bits] = gens
    frontier = [b for b in level_of if level_of[b] == 1]
    level = 1
    while frontier:
        level += 1
        fresh: dict[int, tuple[Quad, ...]] = {}
        for bits in sorted(frontier, key=lambda b: gens_of[b]):
            for sbits, sgens in sorted(singles.items(), key=lambda kv: kv[1]):
                if sbits & ~bits == 0:
                    continue
                merged = QuadRel(nq, nq, bits | sbits)
                t = _quad_closure(aq, aq, merged, limits)
                if t.bits in level_of or t.bits in fresh:
                    continue
                if anchors_escape(t) or pattern_broken(t):
                    continue
                fresh[t.bits] = tuple(sorted(set(gens_of[bits]) | set(sgens)))
        for bits, gens in fresh.items():
            level_of[bits] = level
            gens_of[bits] = gens
        if len(level_of) > limits.max_lattice:
            raise ResourceLimitError(
                f"generator sweep found more than {limits.max_lattice} closures"
            )
        frontier = list(fresh)
    fixpoint_level = max(level_of.values())
    exhaustive = fixpoint_level <= budget

    allowed = sorted(
        (lvl, gens_of[bits], bits)
        for bits, lvl in level_of.items()
        if lvl <= budget
    )
    trace_attain: dict[int, tuple[tuple[Quad, ...], int]] = {}
    for _, gens, bits in allowed:
        t = QuadRel(nq, nq, bits).trace()
        trace_attain.setdefault(t.bits, (gens, bits))

    # composition and inversion closure of the trace set
    tset = set(trace_attain)
    work = list(tset)
    while work:
        tb = work.pop()
        t = BinRel(nq, nq, tb)
        for ob in list(tset):
            for new in (t.compose(BinRel(nq, nq, ob)), BinRel(nq, nq, ob).compose(t)):
                if new.bits not in tset:
                    tset.add(new.bits)
                    work.append(new.bits)
        inv = t.converse()
        if inv.bits not in tset:
            tset.add(inv.bits)
            work.append(inv.bits)
    _expect(
        not (exhaustive and tset != set(trace_attain)),
        "generator sweep",
        "exhaustive sweep produced a trace set not already closed under "
        "composition and inversion",
    )

    # every trace is reflexive, so iterated composition reaches an absorbing
    # element that contains all of them
    top = BinRel.identity(nq)
    changed = True
    while changed:
        changed = False
        for tb in tset:
            nxt = top.compose(BinRel(nq, nq, tb))
            if nxt.bits != top.bits:
                top = nxt
                changed = True
    _expect(
        top.bits in tset and all(BinRel(nq, nq, tb).is_subset(top) for tb in tset),
        "generator sweep", "no absorbing trace in the closed trace set",
    )
    _expect(
        top.is_symmetric() and top.is_transitive() and top.is_reflexive(),
        "generator sweep", "absorbing trace is not an equivalence",
    )

    composed = top.bits not in trace_attain
    witness: tuple[Quad, ...] = ()
    if not composed:
        gens, attain_bits = trace_attain[top.bits]
        cert_q, violation = is_bridge(
            aq, Congruence.zero(nq), aq, Congruence.zero(nq),
            QuadRel(nq, nq, attain_bits), limits=limits,
        )
        _expect(
            cert_q is not None and cert_q.reflexive, "generator sweep",
            "attaining closure fails certification",
            detail=str(violation),
        )

        def lift_quad(q: Quad) -> Quad:
            a1, a2, b1, b2 = (
                min(a for a in range(alg.size) if qa(a) == x) for x in q
            )
            return (a1, a2, b1, b2)

        witness = tuple(lift_quad(q) for q in gens)
    return BruteResult(
        trace=rel_lift(qa, qa, top),
        witness_quads=witness,
        exhaustive=exhaustive,
        composed=composed,
        n_candidates=len(candidates),
        n_bridges=len(allowed),
    )


# -- cross-cover and induced isomorphisms ------------------------------------

def cross_cover_bridge(
    alg: FiniteAlgebra,
    rho: Congruence,
    tau: BinRel,
    tau_prime: BinRel,
    *,
    limits: Limits = DEFAULT_LIMITS,
) -> QuadRel:
    """Reflexive link between two minimal covers inside the upper cover.

    Equal covers get the identity construction; mutually converse covers
    get its last-two-coordinates swap.  Any other pair of covers would
    contradict the two-member structure of the cover set and is reported
    as a violation.
    """
    taus = cov_plus(alg, rho, limits=limits)
    for t in (tau, tau_prime):
        if not any(t.bits == r.bits for r in taus):
            raise HypothesisError(
                "both relations must be minimal saturated covers inside "
                "the upper cover"
            )
    ident = identity_bridge(alg, rho, tau, limits=limits)
    what = "cross-cover construction"
    if tau_prime.bits == tau.bits:
        T = ident
    elif tau_prime.bits == tau.converse().bits:
        T = ident.swap34()
    else:
        raise TheoremViolation(
            "two minimal covers inside the upper cover are neither equal "
            "nor mutually converse",
            witness={"tau": tau.format(), "tau_prime": tau_prime.format()},
        )
    cert = _must_certify(alg, rho, alg, rho, T, what, limits)
    _expect(cert.reflexive, what, "result is not reflexive")
    _expect(
        cert.left_anchor.bits == tau.bits
        and cert.right_anchor.bits == tau_prime.bits,
        what, "anchors moved off the requested covers",
    )
    return T


def induced_iso(
    alg_a: FiniteAlgebra,
    rho: Congruence,
    alg_b: FiniteAlgebra,
    sigma: Congruence,
    T: QuadRel,
    *,
    limits: Limits = DEFAULT_LIMITS,
) -> ElementMap:
    """Isomorphism between the optimal-trace quotients read off a compact link.

    Composing each side's optimal trace around the trace of T must relate
    the classes one to one; anything less is a violation.  Only anchors
    inside the upper covers are supported, because that is the regime where
    the optimal trace has a certified formula.
    """
    cert = certify_bridge(alg_a, rho, alg_b, sigma, T, limits=limits)
    if not cert.compact:
        raise HypothesisError("induced isomorphisms need a compact link")
    _mi_upper_cover(alg_a, rho, limits)
    _mi_upper_cover(alg_b, sigma, limits)
    if not any(
        cert.left_anchor.bits == t.bits for t in cov_plus(alg_a, rho, limits=limits)
    ) or not any(
        cert.right_anchor.bits == t.bits for t in cov_plus(alg_b, sigma, limits=limits)
    ):
        raise HypothesisError(
            "anchors outside the upper covers have no certified optimal trace"
        )
    alpha = opt(alg_a, rho, limits=limits)
    beta = opt(alg_b, sigma, limits=limits)
    link = alpha.as_binrel().compose(cert.trace).compose(beta.as_binrel())

    what = "induced isomorphism"
    aq, qa = quotient_of(alg_a, alpha, limits=limits)
    bq, qb = quotient_of(alg_b, beta, limits=limits)
    values: list[int | None] = [None] * aq.size
    for a, b in link.pairs():
        x, y = qa(a), qb(b)
        if values[x] is None:
            values[x] = y
        elif values[x] != y:
            raise TheoremViolation(
                f"{what}: a class links to two distinct classes",
                witness={"class": str(x), "targets": f"{values[x]},{y}"},
            )
    _expect(all(v is not None for v in values), what, "some class is unlinked")
    _expect(
        aq.size == bq.size and len(set(values)) == bq.size,
        what, "linked classes do not match up one to one",
    )
    gamma = ElementMap(aq.size, bq.size, tuple(values), bijective=True)  # type: ignore[arg-type]
    _expect(
        is_homomorphism(aq, bq, gamma), what,
        "induced map is not a homomorphism",
    )
    return gamma


# -- adjacency ---------------------------------------------------------------

@dataclass(frozen=True)
class AdjacencyResult:
    """status is 'witness', 'none' or 'exhausted'; none is theorem-backed."""

    status: str
    bridge: QuadRel | None
    reason: str


def adjacency_search(
    alg: FiniteAlgebra,
    rho: Congruence,
    sigma: Congruence,
    budget: int,
    *,
    limits: Limits = DEFAULT_LIMITS,
) -> AdjacencyResult:
    """Look for a reflexive good self-link between two meet-irreducibles.

    Tries, in order: the identity construction when the congruences agree;
    theorem-backed refusals (distinct congruences cannot be linked when the
    optimal traces differ, or when either optimal trace collapses, or when
    the quotients are not similar); the canonical similarity route when it
    happens to be reflexive; finally a bounded generator sweep with mixed
    sides.  Budget exhaustion is reported as such, never as nonexistence.
    """
    if budget < 0:
        raise HypothesisError("budget must be nonnegative")
    _check_context(alg, rho, alg, sigma, None, limits)
    rho_plus = _mi_upper_cover(alg, rho, limits)
    sigma_plus = _mi_upper_cover(alg, sigma, limits)

    what = "adjacency search"
    if rho == sigma:
        taus = cov_plus(alg, rho, limits=limits)
        T = identity_bridge(alg, rho, taus[0], limits=limits)
        cert = _must_certify(alg, rho, alg, sigma, T, what, limits)
        _expect(cert.reflexive and cert.good is True, what,
                "identity construction is not a reflexive good link")
        return AdjacencyResult("witness", T, "identity construction")

    taylor = _has_taylor_witness(alg)
    if taylor:
        opt_r = opt(alg, rho, limits=limits)
        opt_s = opt(alg, sigma, limits=limits)
        if opt_r != opt_s:
            return AdjacencyResult("none", None, "optimal traces differ")
        if opt_r == rho or opt_s == sigma:
            return AdjacencyResult(
                "none", None,
                "a collapsed optimal trace forbids linking distinct congruences",
            )
        aq, _ = quotient_of(alg, rho, limits=limits)
        bq, _ = quotient_of(alg, sigma, limits=limits)
        try:
            similar = is_similar(aq, bq, limits=limits)
        except HypothesisError:
            similar = None  # missing witness terms on the quotients
        if similar is False:
            return AdjacencyResult(
                "none", None, "the quotients are not similar"
            )
        if similar:
            try:
                T = good_bridge_between(alg, rho, alg, sigma, limits=limits)
            except HypothesisError:
                T = None
            if T is not None:
                cert, _violation = is_bridge(alg, rho, alg, sigma, T, limits=limits)
                if cert is not None and cert.reflexive and cert.good is True:
                    return AdjacencyResult("witness", T, "similarity route")

    # bounded generator sweep over the two quotient squares
    aq2, qa = quotient_of(alg, rho, limits=limits)
    bq2, qb = quotient_of(alg, sigma, limits=limits)
    na, nb = aq2.size, bq2.size
    core = QuadRel.from_quads(
        na, nb, ((qa(a), qa(a), qb(a), qb(a)) for a in range(alg.size))
    )
    base = _quad_closure(aq2, bq2, core, limits)

    def pattern_broken(t: QuadRel) -> bool:
        return any((q[0] == q[1]) != (q[2] == q[3]) for q in t.quads())

    if pattern_broken(base):
        return AdjacencyResult(
            "none", None,
            "the closure of the reflexive core already breaks the class "
            "pattern, and every reflexive link contains it",
        )

    mu_a = rel_push(qa, qa, rho_plus.as_binrel())
    mu_b = rel_push(qb, qb, sigma_plus.as_binrel())

    def certified_witness(t: QuadRel) -> QuadRel | None:
        cert_q, _ = is_bridge(
            aq2, Congruence.zero(na), bq2, Congruence.zero(nb), t, limits=limits
        )
        if cert_q is None:
            return None
        good_q = any(
            q[0] != q[1] and (q[0], q[1]) in mu_a and (q[2], q[3]) in mu_b
            for q in t.quads()
        )
        if not good_q:
            return None
        lifted = _lift_quads(qa, qb, t)
        cert = _must_certify(alg, rho, alg, sigma, lifted,
                             "adjacency witness", limits)
        _expect(cert.reflexive and cert.good is True, what,
                "lifted witness lost reflexivity or goodness")
        return lifted

    candidates = [
        q
        for q in itertools.product(range(na), range(na), range(nb), range(nb))
        if q not in base and (q[0] == q[1]) == (q[2] == q[3])
    ]
    singles: dict[int, tuple[Quad, ...]] = {}
    for q in candidates:
        t = _quad_closure(
            aq2, bq2, base.union(QuadRel.from_quads(na, nb, [q])), limits
        )
        if pattern_broken(t):
            continue
        singles.setdefault(t.bits, (q,))

    level_of: dict[int, int] = {base.bits: 0}
    gens_of: dict[int, tuple[Quad, ...]] = {base.bits: ()}
    for bits, gens in sorted(singles.items(), key=lambda kv: kv[1]):
        if bits not in level_of:
            level_of[bits] = 1
            gens_of[bits] = gens
    frontier = [b for b in level_of if level_of[b] == 1]
    level = 1
    while frontier:
        level += 1
        fresh: dict[int, tuple[Quad, ...]] = {}
        for bits in sorted(frontier, key=lambda b: gens_of[b]):
            for sbits, sgens in sorted(singles.items(), key=lambda kv: kv[1]):
                if sbits & ~bits == 0:
                    continue
                t = _quad_closure(aq2, bq2, QuadRel(na, nb, bits | sbits), limits)
                if t.bits in level_of or t.bits in fresh:
                    continue
                if pattern_broken(t):
                    continue
                fresh[t.bits] = tuple(sorted(set(gens_of[bits]) | set(sgens)))
        for bits, gens in fresh.items():
            level_of[bits] = level
            gens_of[bits] = gens
        if len(level_of) > limits.max_lattice:
            raise ResourceLimitError(
                f"generator sweep found more than {limits.max_lattice} closures"
            )
        frontier = list(fresh)
    fixpoint_level = max(level_of.values())

    for bits, lvl in sorted(level_of.items(), key=lambda kv: (kv[1], gens_of[kv[0]])):
        if lvl > budget:
            continue
        lifted = certified_witness(QuadRel(na, nb, bits))
        if lifted is not None:
            return AdjacencyResult("witness", lifted, f"generator sweep, level {lvl}")

    if fixpoint_level <= budget:
        return AdjacencyResult(
            "none", None,
            "exhaustive generator sweep found no reflexive good link",
        )
    return AdjacencyResult(
        "exhausted", None,
        f"no witness within budget {budget}; sweep fixpoint needs level "
        f"{fixpoint_level}",
    )


# -- similarity-backed constructions -----------------------------------------

def good_bridge_between(
    alg_a: FiniteAlgebra,
    rho: Congruence,
    alg_b: FiniteAlgebra,
    sigma: Congruence,
    *,
    limits: Limits = DEFAULT_LIMITS,
) -> QuadRel | None:
    """A certified good link, or None when the quotients are not similar.

    Isomorphic quotients give the graph construction directly.  Similar
    quotients with abelian monoliths route through the central quotients:
    canonical link of the left quotient, graph of an isomorphism between
    the central quotients restricted to monolith pairs, converse canonical
    link of the right quotient, then the preimage at the base level.  The
    result is certified good, and in the abelian route also certified to
    relate traced columns only.
    """
    _check_context(alg_a, rho, alg_b, sigma, None, limits)
    rho_plus = _mi_upper_cover(alg_a, rho, limits)
    sigma_plus = _mi_upper_cover(alg_b, sigma, limits)

    what = "similarity route"
    aq, qa = quotient_of(alg_a, rho, limits=limits)
    bq, qb = quotient_of(alg_b, sigma, limits=limits)
    if not is_similar(aq, bq, limits=limits):
        return None

    abelian_a = is_abelian_modulo(alg_a, rho_plus, rho, limits=limits)
    abelian_b = is_abelian_modulo(alg_b, sigma_plus, sigma, limits=limits)
    _expect(
        abelian_a == abelian_b, what,
        "similar quotients with one abelian and one nonabelian cover",
        left=alg_a.name, right=alg_b.name,
    )

    if not abelian_a:
        gamma = find_isomorphism(aq, bq, limits=limits)
        _expect(
            gamma is not None, what,
            "similar quotients with nonabelian monoliths admit no isomorphism",
        )
        assert gamma is not None
        T = QuadRel.from_quads(
            alg_a.size,
            alg_b.size,
            (
                (a1, a2, b1, b2)
                for a1 in range(alg_a.size)
                for a2 in range(alg_a.size)
                for b1 in range(alg_b.size)
                for b2 in range(alg_b.size)
                if gamma(qa(a1)) == qb(b1) and gamma(qa(a2)) == qb(b2)
            ),
        )
        cert = _must_certify(alg_a, rho, alg_b, sigma, T, what, limits)
        _expect(cert.good is True, what, "graph construction is not good")
        return T

    t_da, dres_a = build_T_DA(aq, limits=limits)
    t_db, dres_b = build_T_DA(bq, limits=limits)
    phi = find_isomorphism(dres_a.D, dres_b.D, limits=limits)
    _expect(
        phi is not None, what,
        "similar quotients with non-isomorphic central quotients",
    )
    assert phi is not None
    gamma_quads = QuadRel.from_quads(
        dres_a.D.size,
        dres_b.D.size,
        (
            (d1, d2, phi(d1), phi(d2))
            for d1, d2 in dres_a.monolith.as_binrel().pairs()
        ),
    )
    tq = t_da.compose(gamma_quads).compose(t_db.converse())
    cert_q = _must_certify(
        aq, Congruence.zero(aq.size), bq, Congruence.zero(bq.size),
        tq, what, limits,
    )
    mu_a = monolith(aq, limits=limits)
    mu_b = monolith(bq, limits=limits)
    assert mu_a is not None and mu_b is not None
    _expect(
        cert_q.left_anchor.bits == mu_a.as_binrel().bits
        and cert_q.right_anchor.bits == mu_b.as_binrel().bits,
        what, "composite anchors differ from the monoliths",
    )
    _expect(cert_q.b3 is True, what,
            "composite relates an untraced column")
    T = _lift_quads(qa, qb, tq)
    cert = _must_certify(alg_a, rho, alg_b, sigma, T, what, limits)
    _expect(
        cert.left_anchor.bits == rho_plus.as_binrel().bits
        and cert.right_anchor.bits == sigma_plus.as_binrel().bits,
        what, "lifted anchors differ from the upper covers",
    )
    _expect(cert.good is True, what, "lifted construction is not good")
    _expect(cert.b3 is True, what, "lifted construction lost traced columns")
    return T


def extract_b3(
    alg_a: FiniteAlgebra,
    rho: Congruence,
    alg_b: FiniteAlgebra,
    sigma: Congruence,
    T: QuadRel,
    *,
    limits: Limits = DEFAULT_LIMITS,
) -> QuadRel:
    """Shrink an upper-cover-anchored link to one relating traced columns only.

    Composes the two optimal self-links around T, picks the least quadruple
    whose left pair leaves rho while its first column is traced, and
    generates from the diagonal of the trace plus that quadruple.  The
    result must sit inside the composite, keep its anchors and trace, and
    relate traced columns; any shortfall is a violation, since the
    underlying theorem guarantees a qualifying quadruple exists and that
    any qualifying choice works.
    """
    cert = certify_bridge(alg_a, rho, alg_b, sigma, T, limits=limits)
    rho_plus = _mi_upper_cover(alg_a, rho, limits)
    sigma_plus = _mi_upper_cover(alg_b, sigma, limits)
    if not is_abelian_modulo(alg_a, rho_plus, rho, limits=limits) or not (
        is_abelian_modulo(alg_b, sigma_plus, sigma, limits=limits)
    ):
        raise HypothesisError("both upper covers must be abelian over their congruences")
    if (
        cert.left_anchor.bits != rho_plus.as_binrel().bits
        or cert.right_anchor.bits != sigma_plus.as_binrel().bits
    ):
        raise HypothesisError("anchors must be exactly the upper covers")

    what = "traced-column extraction"
    t_left = opt_bridge(alg_a, rho, limits=limits).cert.T
    t_right = opt_bridge(alg_b, sigma, limits=limits).cert.T
    composite = t_left.compose(T).compose(t_right)
    tr = composite.trace()

    quad = next(
        (
            q
            for q in composite.sorted_quads()
            if not rho.related(q[0], q[1]) and (q[0], q[2]) in tr
        ),
        None,
    )
    if quad is None:
        raise TheoremViolation(
            "no quadruple leaves rho with a traced first column",
            witness={
                "construction": what,
                "alg_a": alg_a.name,
                "alg_b": alg_b.name,
                "rho": format_partition(rho),
                "sigma": format_partition(sigma),
            },
        )

    gens = [(a, a, b, b) for a, b in tr.pairs()]
    gens.append(quad)
    extracted = quad_generate(alg_a, rho, alg_b, sigma, gens, limits=limits)
    _expect(
        extracted.is_subset(composite), what,
        "extraction escapes the composite",
    )
    cert1 = _must_certify(alg_a, rho, alg_b, sigma, extracted, what, limits)
    _expect(
        cert1.left_anchor.bits == rho_plus.as_binrel().bits
        and cert1.right_anchor.bits == sigma_plus.as_binrel().bits,
        what, "extracted anchors differ from the upper covers",
    )
    _expect(
        cert1.trace.bits == tr.bits, what,
        "extracted trace differs from the composite trace",
    )
    _expect(cert1.b3 is True, what, "extraction still relates an untraced column")
    return extracted


# -- file format -------------------------------------------------------------

def bridge_to_json(
    alg_a: FiniteAlgebra,
    rho: Congruence,
    alg_b: FiniteAlgebra,
    sigma: Congruence,
    T: QuadRel,
) -> dict:
    return {
        "algA": alg_a.name,
        "algB": alg_b.name,
        "rho": format_partition(rho),
        "sigma": format_partition(sigma),
        "quads": [list(q) for q in T.sorted_quads()],
    }


def bridge_from_json(
    data: dict, alg_a: FiniteAlgebra, alg_b: FiniteAlgebra
) -> tuple[Congruence, Congruence, QuadRel]:
    if not isinstance(data, dict):
        raise SignatureError("bridge data must be a JSON object")
    for key in ("algA", "algB", "rho", "sigma", "quads"):
        if key not in data:
            raise SignatureError(f"bridge data lacks the {key!r} field")
    if data["algA"] != alg_a.name or data["algB"] != alg_b.name:
        raise SignatureError(
            f"bridge names algebras {data['algA']!r}, {data['algB']!r}, "
            f"got {alg_a.name!r}, {alg_b.name!r}"
        )
    rho = parse_partition(data["rho"], alg_a.size)
    sigma = parse_partition(data["sigma"], alg_b.size)
    quads = []
    for q in data["quads"]:
        if not isinstance(q, (list, tuple)) or len(q) != 4:
            raise SignatureError(f"malformed quadruple {q!r}")
        quads.append(tuple(int(x) for x in q))
    return rho, sigma, QuadRel.from_quads(alg_a.size, alg_b.size, quads)
