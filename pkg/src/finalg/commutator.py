"""Term-condition centrality: matrices, centralizers, abelianness.

The 2x2 matrices over a congruence pair drive everything here.  Encoding
convention, fixed once to avoid the classic transposition bug:

    quadruple (a1, a2, a3, a4)  <->  matrix  [ a1  a3 ]
                                             [ a2  a4 ]

    columns: (a1, a2) and (a3, a4)      rows: (a1, a3) and (a2, a4)

matrix_set(alg, theta, phi) generates from (c,d) in theta the quadruple
(c, d, c, d) (equal rows (c,c),(d,d), columns theta-related) and from
(a,b) in phi the quadruple (a, a, b, b) (equal columns, rows phi-related
in the row direction).  The centrality condition "one row inside delta
forces the other row inside delta" is checked on matrix_set(phi, theta)
and cross-checked via the column form on matrix_set(theta, phi); the two
are equivalent for congruences, and any disagreement is raised as a
theorem violation rather than silently resolved.
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import (
    DEFAULT_LIMITS,
    FiniteAlgebra,
    Limits,
    _cache,
    close_in_product,
)
from .congruences import Congruence, cg, con_lattice, format_partition
from .errors import HypothesisError, TheoremViolation


@dataclass(frozen=True)
class Matrix2x2:
    a1: int
    a2: int
    a3: int
    a4: int

    @property
    def columns(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return ((self.a1, self.a2), (self.a3, self.a4))

    @property
    def rows(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return ((self.a1, self.a3), (self.a2, self.a4))

    def transpose(self) -> "Matrix2x2":
        return Matrix2x2(self.a1, self.a3, self.a2, self.a4)


def _matrix_quads(
    alg: FiniteAlgebra, theta: Congruence, phi: Congruence, limits: Limits
) -> frozenset[tuple[int, int, int, int]]:
    """Packed quadruples of matrix_set, memoized per (theta, phi)."""

    def build() -> frozenset[tuple[int, int, int, int]]:
        n = alg.size
        seed = []
        for c in range(n):
            for d in range(n):
                if theta.related(c, d):
                    seed.append(((c * n + d) * n + c) * n + d)
                if phi.related(c, d):
                    seed.append(((c * n + c) * n + d) * n + d)
        ok, members = close_in_product([alg] * 4, seed, limits=limits)
        assert ok
        out = set()
        for v in members:
            v = int(v)
            a4 = v % n
            a3 = (v // n) % n
            a2 = (v // (n * n)) % n
            a1 = v // (n * n * n)
            out.add((a1, a2, a3, a4))
        return frozenset(out)

    return _cache(alg, ("matrix_set", theta.least, phi.least), build)


def matrix_set(
    alg: FiniteAlgebra,
    theta: Congruence,
    phi: Congruence,
    *,
    limits: Limits = DEFAULT_LIMITS,
) -> frozenset[Matrix2x2]:
    """Subuniverse of A^4 generated by the (theta, phi) matrix generators."""
    _check_congruence(alg, theta, limits)
    _check_congruence(alg, phi, limits)
    return frozenset(
        Matrix2x2(*q) for q in _matrix_quads(alg, theta, phi, limits)
    )


def _check_congruence(alg: FiniteAlgebra, c: Congruence, limits: Limits) -> None:
    if c.size != alg.size:
        raise HypothesisError("congruence over the wrong universe")
    regen = cg(
        alg,
        [(i, c.least[i]) for i in range(c.size)],
        limits=limits,
    )
    if regen != c:
        raise HypothesisError(
            f"partition {format_partition(c)} is not a congruence of {alg.name}"
        )


def centralizes(
    alg: FiniteAlgebra,
    phi: Congruence,
    theta: Congruence,
    delta: Congruence,
    *,
    limits: Limits = DEFAULT_LIMITS,
    cross_check: bool = True,
) -> bool:
    """phi centralizes theta modulo delta, by the term condition.

    Primary form: rows of the (phi, theta) matrices; if one row lies in
    delta so does the other.  Cross-check form: columns of the
    (theta, phi) matrices.  Disagreement between the two is fatal.
    """
    row_ok = _rows_centralize(alg, phi, theta, delta, limits)
    if cross_check:
        col_ok = _cols_centralize(alg, theta, phi, delta, limits)
        if row_ok != col_ok:
            raise TheoremViolation(
                "row and column forms of the term condition disagree",
                witness={
                    "phi": format_partition(phi),
                    "theta": format_partition(theta),
                    "delta": format_partition(delta),
                    "rows": str(row_ok),
                    "columns": str(col_ok),
                },
            )
    return row_ok


def _rows_centralize(alg, phi, theta, delta, limits) -> bool:
    for (a1, a2, a3, a4) in _matrix_quads(alg, phi, theta, limits):
        top = delta.related(a1, a3)
        bottom = delta.related(a2, a4)
        if top != bottom:
            return False
    return True


def _cols_centralize(alg, theta, phi, delta, limits) -> bool:
    for (a1, a2, a3, a4) in _matrix_quads(alg, theta, phi, limits):
        left = delta.related(a1, a2)
        right = delta.related(a3, a4)
        if left != right:
            return False
    return True


def centrality_violation(
    alg: FiniteAlgebra,
    phi: Congruence,
    theta: Congruence,
    delta: Congruence,
    *,
    limits: Limits = DEFAULT_LIMITS,
) -> Matrix2x2 | None:
    """First matrix witnessing failure of the row condition, if any."""
    for q in sorted(_matrix_quads(alg, phi, theta, limits)):
        a1, a2, a3, a4 = q
        if delta.related(a1, a3) != delta.related(a2, a4):
            return Matrix2x2(*q)
    return None


def centralizer(
    alg: FiniteAlgebra,
    theta: Congruence,
    delta: Congruence,
    *,
    limits: Limits = DEFAULT_LIMITS,
) -> Congruence:
    """Largest congruence centralizing theta modulo delta, written (delta : theta).

    Computed as the join of the qualifying principal congruences.  That the
    join still qualifies is a cited meta-fact, so the result is re-verified
    here and failure raises a theorem violation.
    """

    def build() -> Congruence:
        out = Congruence.zero(alg.size)
        for a in range(alg.size):
            for b in range(a + 1, alg.size):
                p = cg(alg, [(a, b)], limits=limits)
                if centralizes(alg, p, theta, delta, limits=limits):
                    out = out.join(p)
        if not centralizes(alg, out, theta, delta, limits=limits):
            raise TheoremViolation(
                "join of centralizing principal congruences fails to centralize",
                witness={
                    "theta": format_partition(theta),
                    "delta": format_partition(delta),
                    "join": format_partition(out),
                },
            )
        return out

    return _cache(alg, ("centralizer", theta.least, delta.least), build)


def is_abelian(
    alg: FiniteAlgebra, theta: Congruence, *, limits: Limits = DEFAULT_LIMITS
) -> bool:
    return centralizes(
        alg, theta, theta, Congruence.zero(alg.size), limits=limits
    )


def is_abelian_modulo(
    alg: FiniteAlgebra,
    theta: Congruence,
    delta: Congruence,
    *,
    limits: Limits = DEFAULT_LIMITS,
) -> bool:
    if not delta.is_refinement(theta):
        raise HypothesisError("delta must lie below theta")
    return centralizes(alg, theta, theta, delta, limits=limits)


def is_abelian_algebra(
    alg: FiniteAlgebra, *, limits: Limits = DEFAULT_LIMITS
) -> bool:
    return is_abelian(alg, Congruence.one(alg.size), limits=limits)


# -- the group on a class of an abelian congruence -------------------------

@dataclass(frozen=True)
class ClassGroup:
    """Abelian group structure on one class of an abelian congruence.

    carrier lists the class ascending; add/neg are tables indexed by
    carrier position; zero is the position of the chosen zero element.
    """

    carrier: tuple[int, ...]
    zero: int
    add: tuple[tuple[int, ...], ...]
    neg: tuple[int, ...]

    def element_add(self, x: int, y: int) -> int:
        return self.carrier[
            self.add[self.carrier.index(x)][self.carrier.index(y)]
        ]

    def element_neg(self, x: int) -> int:
        return self.carrier[self.neg[self.carrier.index(x)]]


def class_group(
    alg: FiniteAlgebra,
    theta: Congruence,
    d,
    e: int,
    *,
    limits: Limits = DEFAULT_LIMITS,
) -> ClassGroup:
    """The group (e/theta, x+y = d(x,e,y), e) of an abelian theta.

    Verifies closure, the abelian group axioms, -x = d(e,x,e), and
    d(x,y,z) = x-y+z on the class.  Any failure contradicts the group
    lemma for weak difference terms, so it raises a theorem violation.
    """
    from .terms import App, Var, eval_term, is_weak_difference_term

    if not isinstance(d, (Var, App)):
        raise HypothesisError("d must be a term")
    if not is_abelian(alg, theta, limits=limits):
        raise HypothesisError("theta must be abelian")
    if not is_weak_difference_term(alg, d, limits=limits):
        raise HypothesisError("d must be a verified weak difference term")

    carrier = theta.cls(e)
    pos = {x: i for i, x in enumerate(carrier)}
    k = len(carrier)

    def dd(x: int, y: int, z: int) -> int:
        return eval_term(alg, d, (x, y, z))

    def fail(reason: str, **extra: str) -> TheoremViolation:
        w = {"theta": format_partition(theta), "e": str(e), "reason": reason}
        w.update(extra)
        return TheoremViolation(
            "class group construction failed: " + reason, witness=w
        )

    add_elems = [[dd(x, e, y) for y in carrier] for x in carrier]
    for i, x in enumerate(carrier):
        for j, y in enumerate(carrier):
            if add_elems[i][j] not in pos:
                raise fail("sum leaves the class", x=str(x), y=str(y))
    add = tuple(
        tuple(pos[v] for v in row) for row in add_elems
    )
    neg_elems = [dd(e, x, e) for x in carrier]
    for x, v in zip(carrier, neg_elems):
        if v not in pos:
            raise fail("negation leaves the class", x=str(x))
    neg = tuple(pos[v] for v in neg_elems)

    ze = pos[e]
    for i in range(k):
        if add[i][ze] != i or add[ze][i] != i:
            raise fail("zero law fails", x=str(carrier[i]))
        if add[i][neg[i]] != ze:
            raise fail("inverse law fails", x=str(carrier[i]))
        for j in range(k):
            if add[i][j] != add[j][i]:
                raise fail("commutativity fails", x=str(carrier[i]), y=str(carrier[j]))
            for l in range(k):
                if add[add[i][j]][l] != add[i][add[j][l]]:
                    raise fail(
                        "associativity fails",
                        x=str(carrier[i]),
                        y=str(carrier[j]),
                        z=str(carrier[l]),
                    )
    # d acts as x - y + z throughout the class
    for x in carrier:
        for y in carrier:
            for z in carrier:
                expect = carrier[add[add[pos[x]][neg[pos[y]]]][pos[z]]]
                if dd(x, y, z) != expect:
                    raise fail(
                        "d(x,y,z) differs from x-y+z",
                        x=str(x), y=str(y), z=str(z),
                    )
    return ClassGroup(carrier, ze, add, neg)


# -- depth-bounded sampled check of the term-operation form ----------------

def term_condition_sample(
    alg: FiniteAlgebra,
    phi: Congruence,
    theta: Congruence,
    delta: Congruence,
    max_depth: int = 2,
    *,
    limits: Limits = DEFAULT_LIMITS,
) -> bool:
    """Direct term-operation centrality over all terms up to max_depth.

    For every term t, slot split (first slot phi-pair (a,a'), remaining
    slots theta-pairs c/d), checks that t(a,c) ~delta t(a,d) implies
    t(a',c) ~delta t(a',d).  Used only as a one-sided consistency probe
    of the matrix form; it can never certify centrality by itself.
    """
    import itertools

    from .terms import App, Var, term_table

    n = alg.size
    # depth-bounded term tables in up to 3 slots, deduplicated
    tabs: dict[tuple[int, ...], None] = {}
    pool: list = [Var(i) for i in range(3)]
    for t in pool:
        tabs.setdefault(term_table(alg, t, 3), None)
    for _ in range(max_depth):
        fresh = []
        for op_idx, op in enumerate(alg.ops):
            if op.arity == 0:
                continue
            for combo in itertools.product(pool, repeat=op.arity):
                t = App(op_idx, combo)
                tab = term_table(alg, t, 3)
                if tab not in tabs:
                    tabs[tab] = None
                    fresh.append(t)
        pool.extend(fresh)

    for tab in tabs:
        for a in range(n):
            for ap in range(n):
                if not phi.related(a, ap):
                    continue
                for c1 in range(n):
                    for d1 in range(n):
                        if not theta.related(c1, d1):
                            continue
                        for c2 in range(n):
                            for d2 in range(n):
                                if not theta.related(c2, d2):
                                    continue
                                tac = tab[(a * n + c1) * n + c2]
                                tad = tab[(a * n + d1) * n + d2]
                                tpc = tab[(ap * n + c1) * n + c2]
                                tpd = tab[(ap * n + d1) * n + d2]
                                if delta.related(tac, tad) and not delta.related(
                                    tpc, tpd
                                ):
                                    return False
    return True
