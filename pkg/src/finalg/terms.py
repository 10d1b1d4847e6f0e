"""Term syntax, evaluation, and identity-class checks.

Terms are formal recipes over an algebra's signature: variables ``x<k>``
and operation applications.  The checks here certify the identity classes
the theorem machinery needs (idempotent, Taylor via an explicit scheme,
weak near-unanimity, Maltsev, weak difference), and a bounded
breadth-first search exhibits witness terms at desk scale.

Terms carry no fixed arity; a predicate interprets a term in as many
variable slots as it needs (Maltsev and weak-difference checks always use
three).  Text format is the s-expression ``(p x0 (p x1 x1 x2) x2)``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Callable, Sequence, Union

from .algebra import FiniteAlgebra, pack
from .errors import HypothesisError, ResourceLimitError
from .limits import DEFAULT_LIMITS, Limits


@dataclass(frozen=True)
class Var:
    index: int

    def __post_init__(self) -> None:
        if self.index < 0:
            raise HypothesisError("variable index must be non-negative")


@dataclass(frozen=True)
class App:
    op_index: int
    children: tuple["Term", ...]


Term = Union[Var, App]


# -- text format -----------------------------------------------------------

_TOKEN = re.compile(r"\(|\)|[^\s()]+")
_VAR = re.compile(r"x(\d+)$")


def parse_term(text: str, alg: FiniteAlgebra) -> Term:
    """Parse an s-expression term, resolving operation names in alg."""
    tokens = _TOKEN.findall(text)
    pos = 0

    def take() -> str:
        nonlocal pos
        if pos >= len(tokens):
            raise HypothesisError("unexpected end of term text")
        tok = tokens[pos]
        pos += 1
        return tok

    def parse_one() -> Term:
        tok = take()
        if tok == "(":
            name = take()
            if name in ("(", ")"):
                raise HypothesisError("operation name expected after '('")
            op = alg.op_index(name)
            arity = alg.ops[op].arity
            children = []
            while True:
                if pos >= len(tokens):
                    raise HypothesisError("missing ')' in term text")
                if tokens[pos] == ")":
                    take()
                    break
                children.append(parse_one())
            if len(children) != arity:
                raise HypothesisError(
                    f"operation {name} expects {arity} arguments, got {len(children)}"
                )
            return App(op, tuple(children))
        if tok == ")":
            raise HypothesisError("unexpected ')' in term text")
        m = _VAR.match(tok)
        if not m:
            raise HypothesisError(f"expected variable x<k> or '(', got {tok!r}")
        return Var(int(m.group(1)))

    term = parse_one()
    if pos != len(tokens):
        raise HypothesisError("trailing tokens after term")
    return term


def format_term(term: Term, alg: FiniteAlgebra) -> str:
    if isinstance(term, Var):
        return f"x{term.index}"
    name = alg.ops[term.op_index].name
    inner = " ".join(format_term(c, alg) for c in term.children)
    return f"({name} {inner})" if inner else f"({name})"


# -- evaluation ------------------------------------------------------------

def term_arity(term: Term) -> int:
    """Number of variable slots: one past the largest index used."""
    if isinstance(term, Var):
        return term.index + 1
    return max((term_arity(c) for c in term.children), default=0)


def eval_term(alg: FiniteAlgebra, term: Term, env: Sequence[int]) -> int:
    if isinstance(term, Var):
        if term.index >= len(env):
            raise HypothesisError(
                f"environment of length {len(env)} lacks x{term.index}"
            )
        return env[term.index]
    args = [eval_term(alg, c, env) for c in term.children]
    return alg.eval(term.op_index, args)


def term_table(alg: FiniteAlgebra, term: Term, nvars: int | None = None) -> tuple[int, ...]:
    """Row-major table of the term operation in nvars slots."""
    n = alg.size
    if nvars is None:
        nvars = term_arity(term)
    if nvars < term_arity(term):
        raise HypothesisError("nvars smaller than the term's variable span")
    return tuple(
        eval_term(alg, term, env)
        for env in itertools.product(range(n), repeat=nvars)
    )


def _table_fn(alg: FiniteAlgebra, term: Term, nvars: int) -> Callable[..., int]:
    tab = term_table(alg, term, nvars)
    n = alg.size
    sizes = [n] * nvars

    def fn(*args: int) -> int:
        return tab[pack(sizes, args)]

    return fn


# -- identity classes ------------------------------------------------------

def is_idempotent(alg: FiniteAlgebra, term: Term) -> bool:
    n = max(term_arity(term), 1)
    return all(
        eval_term(alg, term, (a,) * n) == a for a in range(alg.size)
    )


@dataclass(frozen=True)
class IdentityScheme:
    """Rows of word pairs over {x,y}; row i must separate position i.

    Encodes the per-coordinate identities t(u̅) ≈ t(v̅) certifying that a
    term avoids projection-like behaviour in every coordinate.
    """

    rows: tuple[tuple[str, str], ...]

    def __post_init__(self) -> None:
        for i, (u, v) in enumerate(self.rows):
            if len(u) != len(self.rows) or len(v) != len(self.rows):
                raise HypothesisError("scheme words must have one letter per row")
            if set(u + v) - {"x", "y"}:
                raise HypothesisError("scheme words draw letters from {x,y} only")
            if {u[i], v[i]} != {"x", "y"}:
                raise HypothesisError(
                    f"scheme row {i} must take both letters at position {i}"
                )


def rotation_scheme(n: int) -> IdentityScheme:
    """Canonical scheme induced by the weak near-unanimity rotations."""
    if n < 2:
        raise HypothesisError("rotation scheme needs at least two slots")

    def rot(i: int) -> str:
        return "".join("y" if j == i else "x" for j in range(n))

    rows = [(rot(0), rot(1))]
    rows += [(rot(0), rot(i)) for i in range(1, n)]
    return IdentityScheme(tuple(rows[:n]))


def is_taylor(alg: FiniteAlgebra, term: Term, scheme: IdentityScheme) -> bool:
    n = len(scheme.rows)
    if term_arity(term) > n:
        raise HypothesisError("scheme row count below the term's variable span")
    if not is_idempotent(alg, term):
        return False
    for u, v in scheme.rows:
        for x, y in itertools.product(range(alg.size), repeat=2):
            sub = {"x": x, "y": y}
            lhs = eval_term(alg, term, [sub[c] for c in u])
            rhs = eval_term(alg, term, [sub[c] for c in v])
            if lhs != rhs:
                return False
    return True


def is_wnu(alg: FiniteAlgebra, term: Term) -> bool:
    n = term_arity(term)
    if n < 2:
        raise HypothesisError("weak near-unanimity needs at least two slots")
    if not is_idempotent(alg, term):
        return False
    for x, y in itertools.product(range(alg.size), repeat=2):
        envs = [
            [y if j == i else x for j in range(n)] for i in range(n)
        ]
        vals = {eval_term(alg, term, env) for env in envs}
        if len(vals) != 1:
            return False
    return True


def is_maltsev(alg: FiniteAlgebra, term: Term) -> bool:
    if term_arity(term) > 3:
        raise HypothesisError("Maltsev check interprets terms in three slots")
    for x, y in itertools.product(range(alg.size), repeat=2):
        if eval_term(alg, term, (x, x, y)) != y:
            return False
        if eval_term(alg, term, (y, x, x)) != y:
            return False
    return True


def _abelian_quotient_pairs(alg: FiniteAlgebra, limits: Limits):
    """All (delta, theta) with delta <= theta and theta/delta abelian."""
    from .commutator import is_abelian_modulo
    from .congruences import con_lattice

    lat = con_lattice(alg, limits=limits).congruences
    out = []
    for theta in lat:
        for delta in lat:
            if delta.is_refinement(theta) and is_abelian_modulo(
                alg, theta, delta, limits=limits
            ):
                out.append((delta, theta))
    return out


def is_weak_difference_term(
    alg: FiniteAlgebra, term: Term, *, limits: Limits = DEFAULT_LIMITS
) -> bool:
    if term_arity(term) > 3:
        raise HypothesisError(
            "weak difference check interprets terms in three slots"
        )
    if not is_idempotent(alg, term):
        return False
    d = _table_fn(alg, term, 3)
    for delta, theta in _abelian_quotient_pairs(alg, limits):
        for a in range(alg.size):
            for b in range(alg.size):
                if not theta.related(a, b):
                    continue
                if not delta.related(d(a, a, b), b):
                    return False
                if not delta.related(d(b, a, a), b):
                    return False
    return True


# -- bounded search --------------------------------------------------------

_PREDICATES = ("wnu", "maltsev", "weak_difference")


def search_term(
    alg: FiniteAlgebra,
    predicate: str,
    max_depth: int,
    *,
    limits: Limits = DEFAULT_LIMITS,
) -> Term | None:
    """First term (breadth-first, deduplicated by induced table) passing the
    predicate, or None when no term up to max_depth qualifies.  Absence within
    the bound never certifies nonexistence.
    """
    if predicate not in _PREDICATES:
        raise HypothesisError(f"unknown predicate {predicate!r}")
    if max_depth < 1:
        raise HypothesisError("max_depth must be at least 1")

    if predicate == "wnu":
        slot_counts: tuple[int, ...] = (2, 3)
    else:
        slot_counts = (3,)

    if predicate == "weak_difference":
        pairs = _abelian_quotient_pairs(alg, limits)

        def accept(tab: tuple[int, ...], n: int) -> bool:
            if n != 3:
                return False
            sizes = [alg.size] * 3
            if any(tab[pack(sizes, (a, a, a))] != a for a in range(alg.size)):
                return False
            for delta, theta in pairs:
                for a in range(alg.size):
                    for b in range(alg.size):
                        if not theta.related(a, b):
                            continue
                        if not delta.related(tab[pack(sizes, (a, a, b))], b):
                            return False
                        if not delta.related(tab[pack(sizes, (b, a, a))], b):
                            return False
            return True
    elif predicate == "maltsev":

        def accept(tab: tuple[int, ...], n: int) -> bool:
            if n != 3:
                return False
            sizes = [alg.size] * 3
            for x in range(alg.size):
                for y in range(alg.size):
                    if tab[pack(sizes, (x, x, y))] != y:
                        return False
                    if tab[pack(sizes, (y, x, x))] != y:
                        return False
            return True
    else:

        def accept(tab: tuple[int, ...], n: int) -> bool:
            size = alg.size
            sizes = [size] * n
            if any(tab[pack(sizes, (a,) * n)] != a for a in range(size)):
                return False
            for x in range(size):
                for y in range(size):
                    vals = {
                        tab[pack(sizes, [y if j == i else x for j in range(n)])]
                        for i in range(n)
                    }
                    if len(vals) != 1:
                        return False
            return True

    for n in slot_counts:
        found = _search_slots(alg, n, max_depth, accept, limits)
        if found is not None:
            return found
    return None


def _search_slots(alg, n, max_depth, accept, limits):
    # pool holds (term, table) in discovery order; tables key the dedup
    seen: dict[tuple[int, ...], int] = {}
    pool: list[tuple[Term, tuple[int, ...]]] = []
    for i in range(n):
        t: Term = Var(i)
        tab = term_table(alg, t, n)
        if tab not in seen:
            seen[tab] = len(pool)
            pool.append((t, tab))
            if accept(tab, n):
                return t
    level_start = 0
    for _depth in range(1, max_depth + 1):
        next_start = len(pool)
        if level_start == next_start and _depth > 1:
            break
        for op_idx, op in enumerate(alg.ops):
            k = op.arity
            if k == 0:
                continue
            for pos in range(k):
                # slot pos draws from the newest level, earlier slots from
                # strictly older terms, later slots from anything current
                ranges = []
                for j in range(k):
                    if j == pos:
                        ranges.append(range(level_start, next_start))
                    elif j < pos:
                        ranges.append(range(level_start))
                    else:
                        ranges.append(range(next_start))
                for combo in itertools.product(*ranges):
                    if len(pool) > limits.max_terms:
                        raise ResourceLimitError(
                            f"term enumeration exceeded {limits.max_terms} tables"
                        )
                    children = tuple(pool[c][0] for c in combo)
                    child_tabs = [pool[c][1] for c in combo]
                    tab = tuple(
                        op.table[
                            pack(
                                [alg.size] * k,
                                [child_tabs[j][idx] for j in range(k)],
                            )
                        ]
                        for idx in range(alg.size ** n)
                    )
                    if tab in seen:
                        continue
                    term = App(op_idx, children)
                    seen[tab] = len(pool)
                    pool.append((term, tab))
                    if accept(tab, n):
                        return term
        level_start = next_start
    return None
