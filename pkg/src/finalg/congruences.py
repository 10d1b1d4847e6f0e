"""Partitions, congruence generation, and the congruence lattice.

Congruences are canonicalized as least-representative arrays; binary
relations keep their dense bitset form from :mod:`finalg.relations`.  On
top of the lattice this module builds the saturation machinery (least
saturated subuniverses of the square, their inclusion-minimal members
above a congruence, irreducibility) and the fragment of minimal-set
analysis the theorem suites need.  Minimal sets and traces follow the
standard localization definitions; only abelian/nonabelian distinctions
are consumed downstream, never a full type label.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass

from .algebra import (
    DEFAULT_LIMITS,
    ElementMap,
    FiniteAlgebra,
    Limits,
    _cache,
    close_in_product,
    pol1,
    quotient,
)
from .errors import HypothesisError, ResourceLimitError, TheoremViolation
from .relations import BinRel


@dataclass(frozen=True)
class Congruence:
    """Partition of {0..size-1} by least class representative.

    least[i] is the smallest member of i's class.  The constructor checks
    the shape invariants only; compatibility with an algebra is enforced
    at the entry points that produce congruences (cg, con_lattice,
    quotient construction).
    """

    size: int
    least: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.least) != self.size:
            raise HypothesisError("least array length must equal size")
        for i, r in enumerate(self.least):
            if not (0 <= r <= i):
                raise HypothesisError("least representative above element")
            if self.least[r] != r:
                raise HypothesisError("representative must represent itself")

    @staticmethod
    def zero(size: int) -> "Congruence":
        return Congruence(size, tuple(range(size)))

    @staticmethod
    def one(size: int) -> "Congruence":
        return Congruence(size, (0,) * size) if size else Congruence(0, ())

    @staticmethod
    def from_blocks(size: int, blocks) -> "Congruence":
        least = [-1] * size
        for block in blocks:
            m = min(block)
            for x in block:
                if not (0 <= x < size):
                    raise HypothesisError(f"element {x} outside universe")
                if least[x] != -1:
                    raise HypothesisError(f"element {x} in two blocks")
                least[x] = m
        if -1 in least:
            missing = least.index(-1)
            raise HypothesisError(f"element {missing} missing from blocks")
        return Congruence(size, tuple(least))

    def related(self, a: int, b: int) -> bool:
        return self.least[a] == self.least[b]

    def n_classes(self) -> int:
        return len(set(self.least))

    def classes(self) -> tuple[tuple[int, ...], ...]:
        by_rep: dict[int, list[int]] = {}
        for i, r in enumerate(self.least):
            by_rep.setdefault(r, []).append(i)
        return tuple(tuple(by_rep[r]) for r in sorted(by_rep))

    def cls(self, a: int) -> tuple[int, ...]:
        r = self.least[a]
        return tuple(i for i in range(self.size) if self.least[i] == r)

    def as_binrel(self) -> BinRel:
        return BinRel.from_pairs(
            self.size,
            self.size,
            (
                (a, b)
                for a in range(self.size)
                for b in range(self.size)
                if self.least[a] == self.least[b]
            ),
        )

    def meet(self, other: "Congruence") -> "Congruence":
        self._check_peer(other)
        rep: dict[tuple[int, int], int] = {}
        least = []
        for i in range(self.size):
            key = (self.least[i], other.least[i])
            least.append(rep.setdefault(key, i))
        return Congruence(self.size, tuple(least))

    def join(self, other: "Congruence") -> "Congruence":
        self._check_peer(other)
        parent = list(range(self.size))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i in range(self.size):
            for r in (self.least[i], other.least[i]):
                ri, rr = find(i), find(r)
                if ri != rr:
                    parent[max(ri, rr)] = min(ri, rr)
        return Congruence(self.size, tuple(find(i) for i in range(self.size)))

    def is_refinement(self, other: "Congruence") -> bool:
        """True when every class of self lies inside a class of other."""
        self._check_peer(other)
        return all(
            other.least[i] == other.least[self.least[i]] for i in range(self.size)
        )

    def _check_peer(self, other: "Congruence") -> None:
        if self.size != other.size:
            raise HypothesisError("congruences over different universes")

    def __str__(self) -> str:
        return format_partition(self)


def format_partition(cong: Congruence) -> str:
    blocks = [" ".join(str(x) for x in c) for c in cong.classes()]
    return "|" + "|".join(blocks) + "|"


def parse_partition(text: str, size: int) -> Congruence:
    """Parse the block format ``|0 2|1 3|``; every element must appear once."""
    body = text.strip()
    if not body.startswith("|") or not body.endswith("|"):
        raise HypothesisError("partition text must be wrapped in '|'")
    blocks = []
    for chunk in body[1:-1].split("|"):
        names = chunk.split()
        if not names:
            raise HypothesisError("empty block in partition text")
        try:
            blocks.append([int(x) for x in names])
        except ValueError:
            raise HypothesisError(f"non-integer element in {chunk!r}") from None
    return Congruence.from_blocks(size, blocks)


# -- generation ------------------------------------------------------------

def cg(alg: FiniteAlgebra, pairs, *, limits: Limits = DEFAULT_LIMITS) -> Congruence:
    """Congruence generated by the given element pairs.

    Union-find plus a worklist of merged pairs; each merged pair is pushed
    through every unary translation of every basic operation.  Chaining
    single-coordinate changes covers the general compatibility condition.
    """
    n = alg.size
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: int, b: int) -> bool:
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        parent[max(ra, rb)] = min(ra, rb)
        return True

    work: deque[tuple[int, int]] = deque()
    for a, b in pairs:
        if not (0 <= a < n and 0 <= b < n):
            raise HypothesisError(f"pair ({a},{b}) outside universe")
        if union(a, b):
            work.append((a, b))

    tables = alg.np_tables()
    while work:
        a, b = work.popleft()
        for idx, op in enumerate(alg.ops):
            k = op.arity
            if k == 0:
                continue
            tab = tables[idx]
            for j in range(k):
                for rest in itertools.product(range(n), repeat=k - 1):
                    ia = 0
                    ib = 0
                    pos = 0
                    for slot in range(k):
                        if slot == j:
                            ia = ia * n + a
                            ib = ib * n + b
                        else:
                            ia = ia * n + rest[pos]
                            ib = ib * n + rest[pos]
                            pos += 1
                    fa, fb = int(tab[ia]), int(tab[ib])
                    if union(fa, fb):
                        work.append((fa, fb))

    root_min: dict[int, int] = {}
    for i in range(n):
        r = find(i)
        root_min.setdefault(r, i)
    return Congruence(n, tuple(root_min[find(i)] for i in range(n)))


def principal_congruences(
    alg: FiniteAlgebra, *, limits: Limits = DEFAULT_LIMITS
) -> tuple[Congruence, ...]:
    def build() -> tuple[Congruence, ...]:
        out: dict[tuple[int, ...], Congruence] = {}
        for a in range(alg.size):
            for b in range(a + 1, alg.size):
                c = cg(alg, [(a, b)], limits=limits)
                out.setdefault(c.least, c)
        return tuple(sorted(out.values(), key=lambda c: c.least))

    return _cache(alg, ("principal_congruences",), build)


@dataclass(frozen=True)
class ConLattice:
    """All congruences plus the covering relation.

    congruences are sorted finest first (0 first, 1 last); covers holds
    index pairs (i, j) with congruences[i] covered by congruences[j].
    """

    congruences: tuple[Congruence, ...]
    covers: tuple[tuple[int, int], ...]

    def index(self, c: Congruence) -> int:
        for i, x in enumerate(self.congruences):
            if x == c:
                return i
        raise HypothesisError("congruence not in this lattice")

    def zero(self) -> Congruence:
        return self.congruences[0]

    def one(self) -> Congruence:
        return self.congruences[-1]

    def upper_covers(self, c: Congruence) -> tuple[Congruence, ...]:
        i = self.index(c)
        return tuple(self.congruences[j] for k, j in self.covers if k == i)

    def meet_irreducibles(self) -> tuple[tuple[Congruence, Congruence], ...]:
        out = []
        for i, c in enumerate(self.congruences):
            ups = [j for k, j in self.covers if k == i]
            if len(ups) == 1:
                out.append((c, self.congruences[ups[0]]))
        return tuple(out)

    def monolith(self) -> Congruence | None:
        """Least nonzero congruence, present exactly when 0 has one atom."""
        atoms = self.upper_covers(self.congruences[0])
        if len(atoms) == 1 and self.congruences[0].n_classes() > 1:
            return atoms[0]
        return None

    def is_si(self) -> bool:
        return self.monolith() is not None

    def to_dot(self, name: str = "con") -> str:
        mi = {self.index(rho) for rho, _ in self.meet_irreducibles()}
        lines = [f"digraph {name} {{", "  rankdir=BT;"]
        for i, c in enumerate(self.congruences):
            shape = "box" if i in mi else "ellipse"
            label = format_partition(c).replace("|", "\\|")
            lines.append(f'  n{i} [shape={shape} label="{label}"];')
        for i, j in self.covers:
            lines.append(f"  n{i} -> n{j};")
        lines.append("}")
        return "\n".join(lines)


def con_lattice(alg: FiniteAlgebra, *, limits: Limits = DEFAULT_LIMITS) -> ConLattice:
    return _cache(alg, ("con_lattice",), lambda: _con_lattice(alg, limits))


def _con_lattice(alg: FiniteAlgebra, limits: Limits) -> ConLattice:
    n = alg.size
    found: dict[tuple[int, ...], Congruence] = {}
    zero = Congruence.zero(n)
    found[zero.least] = zero
    for c in principal_congruences(alg, limits=limits):
        found[c.least] = c
    # join closure
    frontier = list(found.values())
    while frontier:
        fresh: list[Congruence] = []
        current = list(found.values())
        for a in frontier:
            for b in current:
                j = a.join(b)
                if j.least not in found:
                    found[j.least] = j
                    fresh.append(j)
                    if len(found) > limits.max_lattice:
                        raise ResourceLimitError(
                            f"congruence lattice exceeds {limits.max_lattice}"
                        )
        frontier = fresh
    one = Congruence.one(n)
    found.setdefault(one.least, one)

    congs = sorted(found.values(), key=lambda c: (-c.n_classes(), c.least))
    below = [
        [i for i in range(len(congs)) if congs[i].is_refinement(congs[j])]
        for j in range(len(congs))
    ]
    covers = []
    for j in range(len(congs)):
        for i in below[j]:
            if i == j:
                continue
            # cover iff the open interval (i, j) is empty
            if not any(
                k != i and k != j and k in below[j] and i in below[k]
                for k in range(len(congs))
            ):
                covers.append((i, j))
    return ConLattice(tuple(congs), tuple(covers))


def upper_covers(
    alg: FiniteAlgebra, rho: Congruence, *, limits: Limits = DEFAULT_LIMITS
) -> tuple[Congruence, ...]:
    return con_lattice(alg, limits=limits).upper_covers(rho)


def meet_irreducibles(
    alg: FiniteAlgebra, *, limits: Limits = DEFAULT_LIMITS
) -> tuple[tuple[Congruence, Congruence], ...]:
    """All rho != 1 with a unique upper cover, paired with that cover."""
    return con_lattice(alg, limits=limits).meet_irreducibles()


def monolith(alg: FiniteAlgebra, *, limits: Limits = DEFAULT_LIMITS) -> Congruence | None:
    return con_lattice(alg, limits=limits).monolith()


def is_si(alg: FiniteAlgebra, *, limits: Limits = DEFAULT_LIMITS) -> bool:
    return con_lattice(alg, limits=limits).is_si()


# -- maps between quotients ------------------------------------------------

def quotient_of(
    alg: FiniteAlgebra, rho: Congruence, *, limits: Limits = DEFAULT_LIMITS
) -> tuple[FiniteAlgebra, ElementMap]:
    """Memoized quotient algebra plus its natural map."""
    return _cache(alg, ("quotient", rho.least), lambda: quotient(alg, rho))


def push_congruence(q: ElementMap, theta: Congruence) -> Congruence:
    """Image of theta >= ker(q) under the surjection q."""
    if theta.size != q.dom_size:
        raise HypothesisError("congruence and map domain disagree")
    pre: dict[int, int] = {}
    for i in range(q.dom_size):
        pre.setdefault(q(i), i)
    if len(pre) != q.cod_size:
        raise HypothesisError("map is not surjective")
    for i in range(q.dom_size):
        if not theta.related(i, pre[q(i)]):
            raise HypothesisError("congruence does not contain the map kernel")
    reps: dict[int, int] = {}
    least = []
    for c in range(q.cod_size):
        least.append(reps.setdefault(theta.least[pre[c]], c))
    return Congruence(q.cod_size, tuple(least))


def lift_congruence(q: ElementMap, phi: Congruence) -> Congruence:
    """Preimage of phi under q; always a congruence containing ker(q)."""
    if phi.size != q.cod_size:
        raise HypothesisError("congruence and map codomain disagree")
    by_rep: dict[int, int] = {}
    least = []
    for i in range(q.dom_size):
        least.append(by_rep.setdefault(phi.least[q(i)], i))
    return Congruence(q.dom_size, tuple(least))


def rel_push(q_left: ElementMap, q_right: ElementMap, rel: BinRel) -> BinRel:
    if rel.n_left != q_left.dom_size or rel.n_right != q_right.dom_size:
        raise HypothesisError("relation and map domains disagree")
    return BinRel.from_pairs(
        q_left.cod_size,
        q_right.cod_size,
        ((q_left(a), q_right(b)) for a, b in rel.pairs()),
    )


def rel_lift(q_left: ElementMap, q_right: ElementMap, rel: BinRel) -> BinRel:
    if rel.n_left != q_left.cod_size or rel.n_right != q_right.cod_size:
        raise HypothesisError("relation and map codomains disagree")
    return BinRel.from_pairs(
        q_left.dom_size,
        q_right.dom_size,
        (
            (a, b)
            for a in range(q_left.dom_size)
            for b in range(q_right.dom_size)
            if (q_left(a), q_right(b)) in rel
        ),
    )


# -- saturation ------------------------------------------------------------

def saturate_generate(
    alg: FiniteAlgebra,
    rho: Congruence,
    seed: BinRel,
    *,
    limits: Limits = DEFAULT_LIMITS,
) -> BinRel:
    """Least rho-saturated subuniverse of the square containing seed.

    A saturated set is a union of (rho-class x rho-class) blocks, so the
    saturated subuniverses are exactly the preimages of subuniverses of
    (A/rho)^2; generate there and pull back.
    """
    if seed.n_left != alg.size or seed.n_right != alg.size:
        raise HypothesisError("seed must live on the algebra's square")
    q_alg, q = quotient_of(alg, rho, limits=limits)
    seed_q = rel_push(q, q, seed)
    m = q_alg.size
    ok, members = close_in_product(
        [q_alg, q_alg], (a * m + b for a, b in seed_q.pairs()), limits=limits
    )
    assert ok
    rel_q = BinRel.from_pairs(m, m, ((int(x) // m, int(x) % m) for x in members))
    return rel_lift(q, q, rel_q)


def cov(
    alg: FiniteAlgebra, rho: Congruence, *, limits: Limits = DEFAULT_LIMITS
) -> tuple[BinRel, ...]:
    """Inclusion-minimal rho-saturated subuniverses properly containing rho.

    Every saturated subuniverse strictly above rho contains the saturated
    closure of rho plus one extra pair, so scanning principal closures
    finds every minimal member.
    """
    if rho.n_classes() <= 1:
        raise HypothesisError("the full congruence has no saturated covers")

    def build() -> tuple[BinRel, ...]:
        q_alg, q = quotient_of(alg, rho, limits=limits)
        m = q_alg.size
        diag = [x * m + x for x in range(m)]
        results: dict[int, BinRel] = {}
        for x in range(m):
            for y in range(m):
                if x == y:
                    continue
                ok, members = close_in_product(
                    [q_alg, q_alg], diag + [x * m + y], limits=limits
                )
                assert ok
                rel = BinRel.from_pairs(
                    m, m, ((int(v) // m, int(v) % m) for v in members)
                )
                results.setdefault(rel.bits, rel)
        rels = list(results.values())
        minimal = [
            r
            for r in rels
            if not any(s.bits != r.bits and s.is_subset(r) for s in rels)
        ]
        lifted = [rel_lift(q, q, r) for r in minimal]
        return tuple(sorted(lifted, key=lambda r: r.bits))

    return _cache(alg, ("cov", rho.least), build)


def cov_plus(
    alg: FiniteAlgebra, rho: Congruence, *, limits: Limits = DEFAULT_LIMITS
) -> tuple[BinRel, ...]:
    """Members of cov lying inside the unique upper cover of rho."""
    rho_plus = _mi_upper_cover(alg, rho, limits)
    bound = rho_plus.as_binrel()
    return tuple(r for r in cov(alg, rho, limits=limits) if r.is_subset(bound))


def _mi_upper_cover(alg: FiniteAlgebra, rho: Congruence, limits: Limits) -> Congruence:
    for c, c_plus in meet_irreducibles(alg, limits=limits):
        if c == rho:
            return c_plus
    raise HypothesisError("congruence is not meet-irreducible")


# -- minimal sets and traces -----------------------------------------------

def minimal_sets(
    alg: FiniteAlgebra,
    alpha: Congruence,
    beta: Congruence,
    *,
    limits: Limits = DEFAULT_LIMITS,
) -> tuple[tuple[int, ...], ...]:
    """Inclusion-minimal images f(A), f unary polynomial, with f(beta) off alpha."""
    _require_cover(alg, alpha, beta, limits)
    images: dict[frozenset[int], tuple[int, ...]] = {}
    for f in pol1(alg, limits=limits):
        if not _moves(f, alpha, beta):
            continue
        img = frozenset(f)
        if img not in images:
            images[img] = tuple(sorted(img))
    sets = list(images.values())
    minimal = [
        u
        for u in sets
        if not any(v != u and set(v) <= set(u) for v in sets)
    ]
    return tuple(sorted(minimal))


def traces(
    alg: FiniteAlgebra,
    alpha: Congruence,
    beta: Congruence,
    *,
    limits: Limits = DEFAULT_LIMITS,
) -> tuple[tuple[int, ...], ...]:
    """Sets U∩C, U minimal and C a beta-class, whose square leaves alpha."""
    out = set()
    for u in minimal_sets(alg, alpha, beta, limits=limits):
        for c in beta.classes():
            inter = tuple(x for x in u if x in c)
            if any(
                not alpha.related(x, y) for x in inter for y in inter
            ):
                out.add(inter)
    return tuple(sorted(out))


def _moves(f: tuple[int, ...], alpha: Congruence, beta: Congruence) -> bool:
    return any(
        beta.related(x, y) and not alpha.related(f[x], f[y])
        for x in range(len(f))
        for y in range(x + 1, len(f))
    )


def _require_cover(alg, alpha: Congruence, beta: Congruence, limits: Limits) -> None:
    lat = con_lattice(alg, limits=limits)
    i, j = lat.index(alpha), lat.index(beta)
    if (i, j) not in lat.covers:
        raise HypothesisError("second congruence must cover the first")


def bar_rho(
    alg: FiniteAlgebra, rho: Congruence, *, limits: Limits = DEFAULT_LIMITS
) -> BinRel:
    """rho ∘ (0_A ∪ ⋃ N²) ∘ rho over the (rho, rho⁺)-traces N."""
    rho_plus = _mi_upper_cover(alg, rho, limits)
    n = alg.size
    middle = BinRel.identity(n)
    for tr in traces(alg, rho, rho_plus, limits=limits):
        middle = middle.union(
            BinRel.from_pairs(n, n, ((x, y) for x in tr for y in tr))
        )
    rho_rel = rho.as_binrel()
    return rho_rel.compose(middle).compose(rho_rel)


# -- irreducibility --------------------------------------------------------

def is_irreducible(
    alg: FiniteAlgebra, rho: Congruence, *, limits: Limits = DEFAULT_LIMITS
) -> tuple[bool, BinRel | None]:
    """Decide |cov| = 1; the unique member is returned as the witness.

    When the algebra carries a verified Taylor witness term, the answer is
    cross-checked against the polynomial characterization (unique saturated
    cover inside rho⁺ plus unary-polynomial contraction of every pair
    outside rho⁺); disagreement is a fatal internal error.
    """
    if rho.n_classes() <= 1:
        raise HypothesisError("the full congruence is never irreducible")
    members = cov(alg, rho, limits=limits)
    direct = len(members) == 1
    witness = members[0] if direct else None

    if _has_taylor_witness(alg):
        mi_pairs = dict(meet_irreducibles(alg, limits=limits))
        if rho not in mi_pairs:
            if direct:
                raise TheoremViolation(
                    "unique saturated cover over a congruence that is not "
                    "meet-irreducible",
                    witness={"rho": format_partition(rho)},
                )
        else:
            rho_plus = mi_pairs[rho]
            plus_rel = rho_plus.as_binrel()
            singleton_plus = (
                len(cov_plus(alg, rho, limits=limits)) == 1
            )
            contraction = all(
                _contracts(alg, rho, plus_rel, a, b, limits)
                for a in range(alg.size)
                for b in range(alg.size)
                if (a, b) not in plus_rel
            )
            if direct != (singleton_plus and contraction):
                raise TheoremViolation(
                    "saturated-cover count disagrees with the polynomial "
                    "irreducibility characterization",
                    witness={
                        "rho": format_partition(rho),
                        "cov_count": str(len(members)),
                        "cov_plus_singleton": str(singleton_plus),
                        "contraction": str(contraction),
                    },
                )
    return direct, witness


def _contracts(alg, rho: Congruence, plus_rel: BinRel, a: int, b: int,
               limits: Limits) -> bool:
    for f in pol1(alg, limits=limits):
        fa, fb = f[a], f[b]
        if (fa, fb) in plus_rel and not rho.related(fa, fb):
            return True
    return False


def _has_taylor_witness(alg: FiniteAlgebra) -> bool:
    """Verified WNU witness on the algebra (memoized)."""
    if not alg.witnesses or "wnu" not in alg.witnesses:
        return False

    def check() -> bool:
        from .terms import is_wnu, parse_term

        try:
            return is_wnu(alg, parse_term(alg.witnesses["wnu"], alg))
        except HypothesisError:
            return False

    return _cache(alg, ("taylor_witness_ok",), check)
