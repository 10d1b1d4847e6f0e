"""Pair algebras, the diagonal-generated congruence, and similarity.

For a congruence theta of A, the pair set of theta is a subalgebra of A^2
(componentwise operations).  Generating a congruence of that pair algebra
from the diagonal copies of a congruence alpha >= theta yields the central
quotient construction: D = pairs(theta) / delta, which for a minimal
abelian theta is subdirectly irreducible with abelian monolith and comes
with a transversal subuniverse, the image of the diagonal.  Similarity of
subdirectly irreducible algebras is isomorphism of their D's, and the
canonical quadruple relation T_DA bridges A to D(A).  The zeta
construction packages the same data as a subdirect three-column relation
with a simple affine third column.

Every structural claim consumed downstream is re-verified here at
construction time; failures raise TheoremViolation with a witness.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .algebra import (
    DEFAULT_LIMITS,
    ElementMap,
    FiniteAlgebra,
    Limits,
    Operation,
    _cache,
    close_in_product,
    find_isomorphism,
    is_homomorphism,
    is_subuniverse,
    sg,
)
from .commutator import (
    centralizer,
    is_abelian,
    is_abelian_algebra,
)
from .congruences import (
    Congruence,
    cg,
    con_lattice,
    format_partition,
    lift_congruence,
    monolith,
    push_congruence,
    quotient_of,
)
from .errors import HypothesisError, TheoremViolation
from .relations import BinRel, QuadRel


@dataclass(frozen=True)
class ThetaAlgebra:
    """The pairs of a congruence as an algebra under componentwise ops.

    pairs is sorted; element i of alg is the pair pairs[i].
    """

    base: FiniteAlgebra
    theta: Congruence
    alg: FiniteAlgebra
    pairs: tuple[tuple[int, int], ...]
    _index: dict = field(compare=False, repr=False, hash=False)

    def index_of(self, a: int, a2: int) -> int:
        try:
            return self._index[(a, a2)]
        except KeyError:
            raise HypothesisError(f"({a},{a2}) is not a pair of theta") from None

    def pair_of(self, i: int) -> tuple[int, int]:
        return self.pairs[i]


def build_theta_algebra(
    alg: FiniteAlgebra, theta: Congruence, *, limits: Limits = DEFAULT_LIMITS
) -> ThetaAlgebra:
    if theta.size != alg.size:
        raise HypothesisError("congruence over the wrong universe")

    def build() -> ThetaAlgebra:
        pairs = tuple(
            (a, b)
            for a in range(alg.size)
            for b in range(alg.size)
            if theta.related(a, b)
        )
        index = {p: i for i, p in enumerate(pairs)}
        m = len(pairs)
        ops = []
        for op in alg.ops:
            k = op.arity
            table = []
            idxs = [0] * k
            for flat in range(m**k):
                rem = flat
                for j in range(k - 1, -1, -1):
                    idxs[j] = rem % m
                    rem //= m
                left = alg.eval(op.name, [pairs[idxs[j]][0] for j in range(k)])
                right = alg.eval(op.name, [pairs[idxs[j]][1] for j in range(k)])
                table.append(index[(left, right)])
            ops.append(Operation(op.name, k, tuple(table)))
        pair_alg = FiniteAlgebra(
            f"{alg.name}.pairs", m, tuple(ops), witnesses=alg.witnesses
        )
        return ThetaAlgebra(alg, theta, pair_alg, pairs, index)

    return _cache(alg, ("theta_algebra", theta.least), build)


def delta(
    alg: FiniteAlgebra,
    theta: Congruence,
    alpha: Congruence,
    *,
    limits: Limits = DEFAULT_LIMITS,
) -> Congruence:
    """Congruence of the pair algebra generated by diagonal alpha-pairs."""
    if not theta.is_refinement(alpha):
        raise HypothesisError("theta must lie below alpha")

    def build() -> Congruence:
        ta = build_theta_algebra(alg, theta, limits=limits)
        gens = [
            (ta.index_of(a, a), ta.index_of(b, b))
            for a in range(alg.size)
            for b in range(alg.size)
            if alpha.related(a, b)
        ]
        return cg(ta.alg, gens, limits=limits)

    return _cache(alg, ("delta", theta.least, alpha.least), build)


def delta_via_matrices(
    alg: FiniteAlgebra,
    theta: Congruence,
    alpha: Congruence,
    *,
    limits: Limits = DEFAULT_LIMITS,
) -> Congruence:
    """Alternate route to the same congruence, used as a cross-check.

    Pairs (a,a2), (b,b2) are linked when the quadruple (a,a2,b,b2) lies in
    the generated matrix set for (theta, alpha); the transitive closure of
    that link relation is the diagonal-generated congruence.
    """
    from .commutator import _matrix_quads

    ta = build_theta_algebra(alg, theta, limits=limits)
    m = len(ta.pairs)
    quads = _matrix_quads(alg, theta, alpha, limits)
    link = BinRel.from_pairs(
        m,
        m,
        (
            (i, j)
            for i, (a, a2) in enumerate(ta.pairs)
            for j, (b, b2) in enumerate(ta.pairs)
            if (a, a2, b, b2) in quads
        ),
    )
    closed = link.equivalence_closure()
    reps: dict[int, int] = {}
    least = []
    for i in range(m):
        row = closed.row(i)
        r = (row & -row).bit_length() - 1  # least linked index
        least.append(reps.setdefault(r, i))
    return Congruence(m, tuple(least))


def alpha_bar(
    alg: FiniteAlgebra,
    theta: Congruence,
    alpha: Congruence,
    *,
    limits: Limits = DEFAULT_LIMITS,
) -> Congruence:
    """Kernel of first-projection-then-alpha on the pair algebra."""
    ta = build_theta_algebra(alg, theta, limits=limits)
    proj = ElementMap(len(ta.pairs), alg.size, tuple(p[0] for p in ta.pairs))
    return lift_congruence(proj, alpha)


# -- the D construction ----------------------------------------------------

@dataclass(frozen=True)
class DResult:
    """Certified payload of the central quotient construction."""

    base: FiniteAlgebra
    theta: Congruence
    alpha: Congruence
    theta_algebra: ThetaAlgebra
    delta: Congruence
    D: FiniteAlgebra
    h: ElementMap
    monolith: Congruence
    h_star: ElementMap
    d_o: tuple[int, ...]

    def h_pair(self, a: int, b: int) -> int:
        return self.h(self.theta_algebra.index_of(a, b))


def _verified_wd_term(alg: FiniteAlgebra, limits: Limits):
    from .terms import is_weak_difference_term, parse_term

    if not alg.witnesses or "weak_difference" not in alg.witnesses:
        raise HypothesisError(
            f"{alg.name} carries no weak-difference witness term"
        )
    d = parse_term(alg.witnesses["weak_difference"], alg)
    if not is_weak_difference_term(alg, d, limits=limits):
        raise HypothesisError(
            f"declared weak-difference witness fails verification on {alg.name}"
        )
    return d


def build_D(
    alg: FiniteAlgebra, theta: Congruence, *, limits: Limits = DEFAULT_LIMITS
) -> DResult:
    """Quotient of the pair algebra by the diagonal-generated congruence.

    Requires theta to be an atom of the congruence lattice, abelian, and
    the algebra to carry a verified weak-difference witness.  All claimed
    properties of the result are checked; failures raise TheoremViolation.
    """

    def build() -> DResult:
        lat = con_lattice(alg, limits=limits)
        atoms = lat.upper_covers(lat.zero())
        if theta not in atoms:
            raise HypothesisError("theta must be minimal nonzero")
        if not is_abelian(alg, theta, limits=limits):
            raise HypothesisError("theta must be abelian")
        _verified_wd_term(alg, limits)

        alpha = centralizer(alg, theta, Congruence.zero(alg.size), limits=limits)
        if not theta.is_refinement(alpha):
            raise TheoremViolation(
                "abelian congruence does not lie below its own centralizer",
                witness={
                    "theta": format_partition(theta),
                    "alpha": format_partition(alpha),
                },
            )
        ta = build_theta_algebra(alg, theta, limits=limits)
        dcong = delta(alg, theta, alpha, limits=limits)
        abar = alpha_bar(alg, theta, alpha, limits=limits)

        def fail(reason: str, **extra: str):
            w = {
                "alg": alg.name,
                "theta": format_partition(theta),
                "reason": reason,
            }
            w.update(extra)
            return TheoremViolation(
                "central quotient certification failed: " + reason, witness=w
            )

        if not dcong.is_refinement(abar):
            raise fail("diagonal-generated congruence leaves the projection kernel")

        D, h = quotient_of(ta.alg, dcong, limits=limits)
        dmon = push_congruence(h, abar)

        # subdirect irreducibility with the expected monolith
        dlat = con_lattice(D, limits=limits)
        dm = dlat.monolith()
        if dm is None or dm != dmon:
            raise fail(
                "quotient monolith mismatch",
                expected=format_partition(dmon),
                got="none" if dm is None else format_partition(dm),
            )
        if not is_abelian(D, dmon, limits=limits):
            raise fail("monolith of the quotient is not abelian")
        cent = centralizer(D, dmon, Congruence.zero(D.size), limits=limits)
        if cent != dmon:
            raise fail(
                "monolith is not self-centralizing",
                centralizer=format_partition(cent),
            )

        # transversal subuniverse: the image of the diagonal
        diag = sorted({h(ta.index_of(a, a)) for a in range(alg.size)})
        d_o = tuple(diag)
        if not is_subuniverse(D, d_o, limits=limits):
            raise fail("diagonal image is not a subuniverse")
        for c in dmon.classes():
            if len([x for x in c if x in diag]) != 1:
                raise fail(
                    "diagonal image is not a monolith transversal",
                    cls=str(c),
                )
        pre = sorted(i for i in range(len(ta.pairs)) if h(i) in diag)
        if pre != sorted(ta.index_of(a, a) for a in range(alg.size)):
            raise fail("preimage of the diagonal image exceeds the diagonal")

        # induced isomorphism on the quotients
        aq, qa = quotient_of(alg, alpha, limits=limits)
        dq, qd = quotient_of(D, dmon, limits=limits)
        values = [0] * aq.size
        seen = [False] * aq.size
        for a in range(alg.size):
            x = qa(a)
            v = qd(h(ta.index_of(a, a)))
            if seen[x] and values[x] != v:
                raise fail("induced quotient map ill-defined", element=str(a))
            values[x], seen[x] = v, True
        h_star = ElementMap(aq.size, dq.size, tuple(values), bijective=True)
        if len(set(values)) != dq.size or aq.size != dq.size:
            raise fail("induced quotient map is not bijective")
        if not is_homomorphism(aq, dq, h_star):
            raise fail("induced quotient map is not a homomorphism")
        for i, (a, b) in enumerate(ta.pairs):
            if qd(h(i)) != h_star(qa(a)):
                raise fail(
                    "pair image disagrees with the induced map",
                    pair=f"({a},{b})",
                )

        return DResult(
            alg, theta, alpha, ta, dcong, D, h, dmon, h_star, d_o
        )

    return _cache(alg, ("build_D", theta.least), build)


def check_transversal_maximal(
    dres: DResult, *, limits: Limits = DEFAULT_LIMITS
) -> bool:
    """The diagonal image is a maximal proper subuniverse of D."""
    D = dres.D
    base = set(dres.d_o)
    if len(base) == D.size:
        return False
    for x in range(D.size):
        if x in base:
            continue
        if len(sg(D, base | {x}, limits=limits)) != D.size:
            return False
    return True


def build_D_of_SI(
    alg: FiniteAlgebra, *, limits: Limits = DEFAULT_LIMITS
) -> FiniteAlgebra:
    """D(A): the algebra itself for a nonabelian monolith, else build_D's D."""
    mu = monolith(alg, limits=limits)
    if mu is None:
        raise HypothesisError(f"{alg.name} is not subdirectly irreducible")
    if not is_abelian(alg, mu, limits=limits):
        return alg
    return build_D(alg, mu, limits=limits).D


def is_similar(
    a: FiniteAlgebra, b: FiniteAlgebra, *, limits: Limits = DEFAULT_LIMITS
) -> bool:
    da = build_D_of_SI(a, limits=limits)
    db = build_D_of_SI(b, limits=limits)
    if not da.same_signature(db):
        return False
    return find_isomorphism(da, db, limits=limits) is not None


# -- similarity bridges ----------------------------------------------------

def check_similarity_bridge(
    a: FiniteAlgebra,
    b: FiniteAlgebra,
    T: QuadRel,
    *,
    limits: Limits = DEFAULT_LIMITS,
) -> tuple[bool, dict | None]:
    """Exhaustive check of the three bridge conditions between SI algebras.

    Returns (ok, witness); the witness names the first failing condition
    in a fixed order (projection equality with the monoliths, then the
    equality equivalence, then diagonal membership).
    """
    mu_a = monolith(a, limits=limits)
    mu_b = monolith(b, limits=limits)
    if mu_a is None or mu_b is None:
        raise HypothesisError("both algebras must be subdirectly irreducible")
    if T.n_a != a.size or T.n_b != b.size:
        raise HypothesisError("quadruple relation over the wrong universes")

    quads = T.sorted_quads()
    n, m = a.size, b.size
    packed = [((q[0] * n + q[1]) * m + q[2]) * m + q[3] for q in quads]
    ok, members = close_in_product([a, a, b, b], packed, limits=limits)
    assert ok
    if len(members) != len(quads):
        raise HypothesisError("quadruple relation is not a subuniverse")

    if T.pr12().bits != mu_a.as_binrel().bits:
        return False, {
            "condition": "left projection differs from the monolith",
            "got": T.pr12().format(),
            "expected": mu_a.as_binrel().format(),
        }
    if T.pr34().bits != mu_b.as_binrel().bits:
        return False, {
            "condition": "right projection differs from the monolith",
            "got": T.pr34().format(),
            "expected": mu_b.as_binrel().format(),
        }
    for a1, a2, b1, b2 in quads:
        if (a1 == a2) != (b1 == b2):
            return False, {
                "condition": "equality pattern broken",
                "quad": str((a1, a2, b1, b2)),
            }
    for a1, a2, b1, b2 in quads:
        for ai, bi in ((a1, b1), (a2, b2)):
            if (ai, ai, bi, bi) not in T:
                return False, {
                    "condition": "diagonal companion missing",
                    "quad": str((a1, a2, b1, b2)),
                    "missing": str((ai, ai, bi, bi)),
                }
    return True, None


def build_T_DA(
    alg: FiniteAlgebra, *, limits: Limits = DEFAULT_LIMITS
) -> tuple[QuadRel, DResult]:
    """Canonical bridge from an SI algebra with abelian monolith to its D."""
    mu = monolith(alg, limits=limits)
    if mu is None:
        raise HypothesisError(f"{alg.name} is not subdirectly irreducible")
    if not is_abelian(alg, mu, limits=limits):
        raise HypothesisError("monolith must be abelian")
    dres = build_D(alg, mu, limits=limits)

    quads = set()
    for a in range(alg.size):
        for b in range(alg.size):
            if not mu.related(a, b):
                continue
            for e in range(alg.size):
                if not mu.related(a, e):
                    continue
                quads.add((a, b, dres.h_pair(a, e), dres.h_pair(b, e)))
    T = QuadRel.from_quads(alg.size, dres.D.size, quads)
    ok, witness = check_similarity_bridge(alg, dres.D, T, limits=limits)
    if not ok:
        raise TheoremViolation(
            "canonical bridge to the central quotient fails certification",
            witness={"alg": alg.name, **(witness or {})},
        )
    return T, dres


# -- the three-column packaging --------------------------------------------

@dataclass(frozen=True)
class ZetaResult:
    Z: FiniteAlgebra
    zero: int
    triples: frozenset[tuple[int, int, int]]
    rho_star: BinRel


def build_zeta(
    alg: FiniteAlgebra, rho: Congruence, *, limits: Limits = DEFAULT_LIMITS
) -> ZetaResult:
    """Subdirect three-column relation with simple affine third column.

    Requires rho irreducible with full centralizer of its upper cover.
    Certifies: simple, abelian, Maltsev-term-bearing third column; the
    zero's singleton subuniverse; left projection onto the unique
    saturated cover; and the zero-slice equivalence.
    """

    def build() -> ZetaResult:
        from .bridges import opt
        from .congruences import is_irreducible
        from .terms import search_term

        irr, rho_star = is_irreducible(alg, rho, limits=limits)
        if not irr:
            raise HypothesisError("rho must be irreducible")
        opt_rho = opt(alg, rho, limits=limits)
        if opt_rho.n_classes() != 1:
            raise HypothesisError(
                "the centralizer of the upper cover must be the full congruence"
            )

        from .congruences import meet_irreducibles

        mi = dict(meet_irreducibles(alg, limits=limits))
        if rho not in mi:
            raise TheoremViolation(
                "irreducible congruence lacks a unique upper cover",
                witness={"alg": alg.name, "rho": format_partition(rho)},
            )
        rho_plus = mi[rho]

        aq, q = quotient_of(alg, rho, limits=limits)
        mu = monolith(aq, limits=limits)
        if mu is None:
            raise TheoremViolation(
                "quotient by an irreducible congruence is not subdirectly "
                "irreducible",
                witness={"alg": alg.name, "rho": format_partition(rho)},
            )
        if mu != push_congruence(q, rho_plus):
            raise TheoremViolation(
                "quotient monolith differs from the pushed upper cover",
                witness={"alg": alg.name, "rho": format_partition(rho)},
            )
        if not is_abelian(aq, mu, limits=limits):
            raise TheoremViolation(
                "full centralizer with a nonabelian quotient monolith",
                witness={"alg": alg.name, "rho": format_partition(rho)},
            )
        dres = build_D(aq, mu, limits=limits)
        Z = dres.D

        def fail(reason: str, **extra: str):
            w = {
                "alg": alg.name,
                "rho": format_partition(rho),
                "reason": reason,
            }
            w.update(extra)
            return TheoremViolation(
                "three-column packaging failed: " + reason, witness=w
            )

        zlat = con_lattice(Z, limits=limits)
        if Z.size < 2 or len(zlat.congruences) != 2:
            raise fail("third column is not simple")
        if not is_abelian_algebra(Z, limits=limits):
            raise fail("third column is not abelian")
        if search_term(Z, "maltsev", 3, limits=limits) is None:
            raise fail("no Maltsev term found within depth 3")
        if len(dres.d_o) != 1:
            raise fail(
                "diagonal image is not a singleton", d_o=str(dres.d_o)
            )
        zero = dres.d_o[0]
        if sg(Z, [zero], limits=limits) != {zero}:
            raise fail("zero does not form a singleton subuniverse")

        triples = set()
        for a in range(alg.size):
            for a2 in range(alg.size):
                if not rho_plus.related(a, a2):
                    continue
                triples.add((a, a2, dres.h_pair(q(a), q(a2))))

        # left pair columns must land exactly on the unique saturated cover
        left = BinRel.from_pairs(
            alg.size, alg.size, ((t[0], t[1]) for t in triples)
        )
        if rho_star is None or left.bits != rho_star.bits:
            raise fail("left projection misses the saturated cover")
        for col, size in ((0, alg.size), (1, alg.size), (2, Z.size)):
            if len({t[col] for t in triples}) != size:
                raise fail("relation is not subdirect", column=str(col))

        packed = [
            (t[0] * alg.size + t[1]) * Z.size + t[2] for t in triples
        ]
        ok, members = close_in_product([alg, alg, Z], packed, limits=limits)
        assert ok
        if len(members) != len(triples):
            raise fail("triple relation is not a subuniverse")

        for a, a2, b in sorted(triples):
            if rho.related(a, a2) != (b == zero):
                raise fail(
                    "zero slice does not match the congruence",
                    triple=str((a, a2, b)),
                )

        return ZetaResult(Z, zero, frozenset(triples), rho_star)

    return _cache(alg, ("zeta", rho.least), build)
