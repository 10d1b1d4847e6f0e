"""Finite algebras with named finitary operations on {0, ..., n-1}.

Operation tables are flat row-major tuples: f(a1, ..., ak) sits at index
a1*n^(k-1) + a2*n^(k-2) + ... + ak, first argument most significant.  Product
universes use the same mixed-radix convention over the factor sizes.  All
public containers are immutable and hashable; derived results are memoized on
the instance, keyed by small canonical tuples.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import HypothesisError, NotACongruence, ResourceLimitError, SignatureError
from .limits import DEFAULT_LIMITS, Limits

# The closure kernels unroll argument loops per arity; nothing desk-scale
# needs more than ternary operations.
MAX_ARITY = 3


def pack(sizes: Sequence[int], coords: Sequence[int]) -> int:
    """Mixed-radix encode, first coordinate most significant."""
    idx = 0
    for n, c in zip(sizes, coords):
        idx = idx * n + c
    return idx


def unpack(sizes: Sequence[int], index: int) -> tuple[int, ...]:
    """Inverse of pack."""
    out = []
    for n in reversed(sizes):
        out.append(index % n)
        index //= n
    return tuple(reversed(out))


def _cache(obj, key, fn):
    # per-instance memo; keys are small canonical tuples, never whole tables
    d = obj.__dict__.setdefault("_memo", {})
    if key not in d:
        d[key] = fn()
    return d[key]


@dataclass(frozen=True)
class Operation:
    name: str
    arity: int
    table: tuple[int, ...]

    def validate(self, size: int) -> None:
        if not self.name or not isinstance(self.name, str):
            raise SignatureError("operation name must be a nonempty string")
        if not 0 <= self.arity <= MAX_ARITY:
            raise SignatureError(
                f"operation {self.name!r}: arity {self.arity} outside supported range 0..{MAX_ARITY}"
            )
        if len(self.table) != size**self.arity:
            raise SignatureError(
                f"operation {self.name!r}: table length {len(self.table)}, expected {size**self.arity}"
            )
        for v in self.table:
            if not isinstance(v, int) or not 0 <= v < size:
                raise SignatureError(f"operation {self.name!r}: table value {v!r} outside universe")


@dataclass(frozen=True)
class FiniteAlgebra:
    """Universe {0..size-1} plus a tuple of operations.

    witnesses, when present, maps predicate names ("wnu", "maltsev",
    "weak_difference") to s-expression term strings; it is carried along by
    product/quotient/subalgebra (same signature, so the terms still parse) and
    is excluded from equality and hashing.
    """

    name: str
    size: int
    ops: tuple[Operation, ...]
    witnesses: Mapping[str, str] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.size < 1:
            raise SignatureError("universe must be nonempty")
        seen = set()
        for op in self.ops:
            op.validate(self.size)
            if op.name in seen:
                raise SignatureError(f"duplicate operation name {op.name!r}")
            seen.add(op.name)

    # -- signature ---------------------------------------------------------

    def signature(self) -> tuple[tuple[str, int], ...]:
        return tuple((op.name, op.arity) for op in self.ops)

    def same_signature(self, other: "FiniteAlgebra") -> bool:
        return self.signature() == other.signature()

    def op_index(self, name: str) -> int:
        for i, op in enumerate(self.ops):
            if op.name == name:
                return i
        raise SignatureError(f"algebra {self.name!r} has no operation {name!r}")

    # -- evaluation --------------------------------------------------------

    def eval(self, op: int | str, args: Sequence[int]) -> int:
        i = op if isinstance(op, int) else self.op_index(op)
        o = self.ops[i]
        if len(args) != o.arity:
            raise SignatureError(f"operation {o.name!r} expects {o.arity} arguments, got {len(args)}")
        idx = 0
        for a in args:
            if not 0 <= a < self.size:
                raise SignatureError(f"argument {a} outside universe of {self.name!r}")
            idx = idx * self.size + a
        return o.table[idx]

    def np_tables(self) -> list[np.ndarray]:
        return _cache(self, ("np_tables",), lambda: [
            np.asarray(op.table, dtype=np.int32) for op in self.ops
        ])

    def rename(self, name: str) -> "FiniteAlgebra":
        return FiniteAlgebra(name, self.size, self.ops, self.witnesses)

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "size": self.size,
            "operations": [
                {"name": op.name, "arity": op.arity, "table": list(op.table)} for op in self.ops
            ],
        }

    @staticmethod
    def from_json(data: dict, *, limits: Limits = DEFAULT_LIMITS) -> "FiniteAlgebra":
        if not isinstance(data, dict):
            raise SignatureError("algebra document must be a JSON object")
        extra = set(data) - {"name", "size", "operations"}
        if extra:
            raise SignatureError(f"unknown fields in algebra document: {sorted(extra)}")
        for k in ("name", "size", "operations"):
            if k not in data:
                raise SignatureError(f"algebra document missing field {k!r}")
        size = data["size"]
        if not isinstance(size, int):
            raise SignatureError("size must be an integer")
        if size > limits.max_universe:
            raise ResourceLimitError(
                f"universe size {size} exceeds max_universe={limits.max_universe}"
            )
        ops = []
        for od in data["operations"]:
            extra = set(od) - {"name", "arity", "table"}
            if extra:
                raise SignatureError(f"unknown fields in operation document: {sorted(extra)}")
            ops.append(Operation(od.get("name"), od.get("arity"), tuple(od.get("table", ()))))
        return FiniteAlgebra(data["name"], size, tuple(ops))


def eval_op(alg: FiniteAlgebra, op: int | str, args: Sequence[int]) -> int:
    return alg.eval(op, args)


def load_algebra(path: str, *, limits: Limits = DEFAULT_LIMITS) -> FiniteAlgebra:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return FiniteAlgebra.from_json(data, limits=limits)


def dump_algebra(alg: FiniteAlgebra, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(alg.to_json(), fh, indent=2, sort_keys=False)
        fh.write("\n")


@dataclass(frozen=True)
class ElementMap:
    """A total map between two universes, optionally flagged bijective."""

    dom_size: int
    cod_size: int
    values: tuple[int, ...]
    bijective: bool = False

    def __post_init__(self):
        if len(self.values) != self.dom_size:
            raise SignatureError("element map length mismatch")
        for v in self.values:
            if not 0 <= v < self.cod_size:
                raise SignatureError("element map value outside codomain")
        if self.bijective:
            if self.dom_size != self.cod_size or len(set(self.values)) != self.dom_size:
                raise SignatureError("map flagged bijective is not a bijection")

    def __call__(self, x: int) -> int:
        return self.values[x]

    def compose(self, then: "ElementMap") -> "ElementMap":
        if self.cod_size != then.dom_size:
            raise SignatureError("element maps do not compose")
        return ElementMap(
            self.dom_size,
            then.cod_size,
            tuple(then.values[v] for v in self.values),
            self.bijective and then.bijective,
        )

    def inverse(self) -> "ElementMap":
        if not self.bijective:
            raise HypothesisError("only bijective maps invert")
        inv = [0] * self.cod_size
        for x, v in enumerate(self.values):
            inv[v] = x
        return ElementMap(self.cod_size, self.dom_size, tuple(inv), True)


def is_homomorphism(a: FiniteAlgebra, b: FiniteAlgebra, f: ElementMap) -> bool:
    if not a.same_signature(b) or f.dom_size != a.size or f.cod_size != b.size:
        return False
    for i, op in enumerate(a.ops):
        for args in itertools.product(range(a.size), repeat=op.arity):
            if f(a.eval(i, args)) != b.eval(i, [f(x) for x in args]):
                return False
    return True


# -- closure over products -------------------------------------------------

def close_in_product(
    factors: Sequence[FiniteAlgebra],
    seed: Iterable[int],
    allowed: np.ndarray | None = None,
    *,
    limits: Limits = DEFAULT_LIMITS,
) -> tuple[bool, np.ndarray]:
    """Least subuniverse of the (componentwise) product containing seed.

    factors must share a signature; they are NOT materialized into a product
    table, the kernel evaluates componentwise.  When allowed (a uint8 mask
    over the product universe) is given and the closure would leave it, the
    call returns (False, empty); violations only grow, so that early exit is
    sound for any "stays inside the mask" filter.  Returns sorted indices.
    """
    from ._kernels import close_product  # selected backend

    sig = factors[0].signature()
    for f in factors[1:]:
        if f.signature() != sig:
            raise SignatureError("product factors must share a signature")
    sizes = np.asarray([f.size for f in factors], dtype=np.int32)
    arities = np.asarray([op.arity for op in factors[0].ops], dtype=np.int32)
    tables = [[f.np_tables()[i] for f in factors] for i in range(len(arities))]
    seed_arr = np.asarray(sorted(set(seed)), dtype=np.int64)
    n_total = int(np.prod(sizes.astype(np.int64)))
    if seed_arr.size and (seed_arr.min() < 0 or seed_arr.max() >= n_total):
        raise SignatureError("seed element outside product universe")
    return close_product(sizes, arities, tables, seed_arr, allowed, limits.max_closure_steps)


def sg(alg: FiniteAlgebra, seed: Iterable[int], *, limits: Limits = DEFAULT_LIMITS) -> frozenset[int]:
    """Subuniverse generated by seed."""
    ok, members = close_in_product([alg], seed, limits=limits)
    assert ok
    return frozenset(int(x) for x in members)


def is_subuniverse(alg: FiniteAlgebra, subset: Iterable[int], *, limits: Limits = DEFAULT_LIMITS) -> bool:
    s = frozenset(subset)
    return sg(alg, s, limits=limits) == s


# -- derived algebras ------------------------------------------------------

def product(
    factors: Sequence[FiniteAlgebra],
    name: str | None = None,
    *,
    limits: Limits = DEFAULT_LIMITS,
) -> FiniteAlgebra:
    """Componentwise product with mixed-radix universe (first factor most
    significant).  Materializes tables, so it is capped by max_product_cells;
    closure work on large products goes through close_in_product instead.
    """
    if not factors:
        raise SignatureError("product of zero factors is not supported")
    sig = factors[0].signature()
    for f in factors[1:]:
        if f.signature() != sig:
            raise SignatureError("product factors must share a signature")
    sizes = [f.size for f in factors]
    n = 1
    for s in sizes:
        n *= s
    cells = sum(n**op.arity for op in factors[0].ops)
    if cells > limits.max_product_cells:
        raise ResourceLimitError(
            f"product would materialize {cells} table cells, cap is {limits.max_product_cells}"
        )
    coords = [unpack(sizes, i) for i in range(n)]
    ops = []
    for oi, (opname, k) in enumerate(sig):
        table = []
        for args in itertools.product(range(n), repeat=k):
            argc = [coords[a] for a in args]
            val = [f.eval(oi, [argc[j][fi] for j in range(k)]) for fi, f in enumerate(factors)]
            table.append(pack(sizes, val))
        ops.append(Operation(opname, k, tuple(table)))
    pname = name or "(" + " x ".join(f.name for f in factors) + ")"
    wit = factors[0].witnesses if all(f.witnesses == factors[0].witnesses for f in factors) else None
    return FiniteAlgebra(pname, n, tuple(ops), wit)


def quotient(alg: FiniteAlgebra, part, name: str | None = None) -> tuple[FiniteAlgebra, ElementMap]:
    """Quotient modulo a congruence.

    part is anything exposing a least-representative array (attribute
    ``least`` or a plain sequence): least[i] is the least element of i's
    class.  Compatibility is verified; classes are numbered by ascending
    least representative.
    """
    least = tuple(getattr(part, "least", part))
    if len(least) != alg.size:
        raise NotACongruence("partition length mismatch")
    reps = sorted(set(least))
    idx = {r: i for i, r in enumerate(reps)}
    cls = tuple(idx[least[x]] for x in range(alg.size))
    m = len(reps)
    ops = []
    for oi, op in enumerate(alg.ops):
        table = []
        for args in itertools.product(range(m), repeat=op.arity):
            table.append(cls[alg.eval(oi, [reps[a] for a in args])])
        ops.append(Operation(op.name, op.arity, tuple(table)))
    # compatibility: the class of f(x...) must not depend on representatives
    for oi, op in enumerate(alg.ops):
        for args in itertools.product(range(alg.size), repeat=op.arity):
            v = cls[alg.eval(oi, args)]
            w = ops[oi].table[pack([m] * op.arity, [cls[a] for a in args])]
            if v != w:
                raise NotACongruence(
                    f"partition not compatible with {op.name!r}", witness=(op.name, args)
                )
    qname = name or f"{alg.name}/~"
    q = FiniteAlgebra(qname, m, tuple(ops), alg.witnesses)
    return q, ElementMap(alg.size, m, cls)


def subalgebra(alg: FiniteAlgebra, subset: Iterable[int], name: str | None = None,
               *, limits: Limits = DEFAULT_LIMITS) -> tuple[FiniteAlgebra, ElementMap]:
    """Restriction to a subset, which must already be closed (else error).

    Elements are renumbered in ascending order; the returned map embeds the
    new universe into the old one.
    """
    elems = sorted(set(subset))
    if not elems:
        raise HypothesisError("subuniverse must be nonempty")
    s = frozenset(elems)
    if not is_subuniverse(alg, s, limits=limits):
        raise HypothesisError("subset is not closed under the operations")
    pos = {e: i for i, e in enumerate(elems)}
    m = len(elems)
    ops = []
    for oi, op in enumerate(alg.ops):
        table = []
        for args in itertools.product(elems, repeat=op.arity):
            table.append(pos[alg.eval(oi, args)])
        ops.append(Operation(op.name, op.arity, tuple(table)))
    sname = name or f"{alg.name}|sub"
    sub = FiniteAlgebra(sname, m, tuple(ops), alg.witnesses)
    return sub, ElementMap(m, alg.size, tuple(elems))


# -- unary polynomials -----------------------------------------------------

def pol1(alg: FiniteAlgebra, *, limits: Limits = DEFAULT_LIMITS) -> tuple[tuple[int, ...], ...]:
    """Unary polynomial clone: least set of self-maps containing the identity
    and all constants, closed under u -> f(p1(u), ..., pk(u)).

    Returned sorted lexicographically (deterministic).
    """
    return _cache(alg, ("pol1",), lambda: _pol1(alg, limits))


def _pol1(alg: FiniteAlgebra, limits: Limits) -> tuple[tuple[int, ...], ...]:
    n = alg.size
    maps: dict[tuple[int, ...], None] = {}
    maps[tuple(range(n))] = None
    for c in range(n):
        maps[(c,) * n] = None
    frontier = list(maps)
    while frontier:
        current = list(maps)
        new_frontier = []
        for op in alg.ops:
            k = op.arity
            if k == 0:
                continue
            # at least one argument from the latest frontier
            for pos in range(k):
                pools = [current] * k
                pools[pos] = frontier
                for combo in itertools.product(*pools):
                    g = tuple(
                        op.table[pack([n] * k, [combo[j][x] for j in range(k)])]
                        for x in range(n)
                    )
                    if g not in maps:
                        maps[g] = None
                        new_frontier.append(g)
                        if len(maps) > limits.max_pol1:
                            raise ResourceLimitError(
                                f"pol1 exceeded cap {limits.max_pol1}"
                            )
        frontier = new_frontier
    return tuple(sorted(maps))


# -- isomorphism search ----------------------------------------------------

def _generating_sequence(alg: FiniteAlgebra, *, limits: Limits = DEFAULT_LIMITS) -> list[int]:
    gens: list[int] = []
    have: frozenset[int] = frozenset()
    while len(have) < alg.size:
        nxt = min(x for x in range(alg.size) if x not in have)
        gens.append(nxt)
        have = sg(alg, gens, limits=limits)
    return gens


def find_isomorphism(a: FiniteAlgebra, b: FiniteAlgebra,
                     *, limits: Limits = DEFAULT_LIMITS) -> ElementMap | None:
    """Deterministic backtracking over images of a small generating set.

    Returns the least isomorphism (by image tuple of the generating
    sequence) or None.
    """
    if a.size != b.size or not a.same_signature(b):
        return None
    gens = _generating_sequence(a, limits=limits)

    def propagate(partial: dict[int, int]) -> dict[int, int] | None:
        # close the partial map under all operations; None on conflict
        m = dict(partial)
        if len(set(m.values())) != len(m):
            return None
        changed = True
        while changed:
            changed = False
            known = list(m)
            for oi, op in enumerate(a.ops):
                for args in itertools.product(known, repeat=op.arity):
                    x = a.eval(oi, args)
                    y = b.eval(oi, [m[t] for t in args])
                    if x in m:
                        if m[x] != y:
                            return None
                    else:
                        if y in m.values():
                            return None
                        m[x] = y
                        changed = True
        return m

    def extend(i: int, partial: dict[int, int]) -> dict[int, int] | None:
        if i == len(gens):
            return partial if len(partial) == a.size else None
        g = gens[i]
        if g in partial:
            return extend(i + 1, partial)
        used = set(partial.values())
        for img in range(b.size):
            if img in used:
                continue
            nxt = propagate({**partial, g: img})
            if nxt is None:
                continue
            res = extend(i + 1, nxt)
            if res is not None:
                return res
        return None

    base = propagate({})
    if base is None:
        return None
    full = extend(0, base)
    if full is None:
        return None
    values = tuple(full[x] for x in range(a.size))
    f = ElementMap(a.size, b.size, values, bijective=True)
    assert is_homomorphism(a, b, f)
    return f
