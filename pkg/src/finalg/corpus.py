"""Study corpus: built-in algebras, bounded enumeration, directory loading.

Every corpus entry carries declared witness terms (weak near-unanimity,
Maltsev, weak difference) that are verified here, before any downstream
check runs.  An entry with a failing declared witness is excluded and the
reason logged; nothing downstream ever trusts an unverified term.
"""
from __future__ import annotations

import itertools
import json
import logging
import os
from dataclasses import dataclass
from typing import Mapping

from .algebra import FiniteAlgebra, Operation, dump_algebra, find_isomorphism, load_algebra, product
from .errors import HypothesisError, SignatureError
from .limits import DEFAULT_LIMITS, Limits
from .terms import is_maltsev, is_weak_difference_term, is_wnu, parse_term

logger = logging.getLogger("finalg.corpus")

PREDICATES = ("wnu", "maltsev", "weak_difference")


@dataclass(frozen=True)
class CorpusEntry:
    """An algebra with verified witness terms and a provenance note."""

    algebra: FiniteAlgebra
    witness_status: Mapping[str, bool]
    note: str


def verify_witnesses(
    alg: FiniteAlgebra,
    declared: Mapping[str, str],
    *,
    limits: Limits = DEFAULT_LIMITS,
) -> dict[str, bool]:
    """Run each declared term through its predicate checker."""
    status: dict[str, bool] = {}
    for pred, text in declared.items():
        if pred not in PREDICATES:
            raise SignatureError(f"unknown witness predicate {pred!r}")
        term = parse_term(text, alg)
        if pred == "wnu":
            status[pred] = is_wnu(alg, term)
        elif pred == "maltsev":
            status[pred] = is_maltsev(alg, term)
        else:
            status[pred] = is_weak_difference_term(alg, term, limits=limits)
    return status


def make_entry(
    name: str,
    size: int,
    ops: tuple[Operation, ...],
    declared: Mapping[str, str],
    note: str,
    *,
    limits: Limits = DEFAULT_LIMITS,
) -> CorpusEntry | None:
    """Verify the declared witnesses and attach them; None if any fails."""
    bare = FiniteAlgebra(name, size, ops)
    status = verify_witnesses(bare, declared, limits=limits)
    bad = sorted(p for p, ok in status.items() if not ok)
    if bad:
        logger.warning(
            "excluding %s: declared witness(es) %s failed verification",
            name, ", ".join(bad),
        )
        return None
    alg = FiniteAlgebra(name, size, ops, witnesses=dict(declared))
    return CorpusEntry(alg, status, note)


# -- built-in algebras -------------------------------------------------------

def _affine_op(n: int) -> Operation:
    # p(x, y, z) = x - y + z in Z_n
    table = tuple(
        (x - y + z) % n
        for x in range(n) for y in range(n) for z in range(n)
    )
    return Operation("p", 3, table)


def _min3_op() -> Operation:
    table = tuple(
        min(x, y, z) for x in range(2) for y in range(2) for z in range(2)
    )
    return Operation("p", 3, table)


# Weak near-unanimity over p = x - y + z needs a coefficient pattern whose
# row sum is 1 and whose single-slot deviation is position-independent.
# x + y + z works in Z_2; Z_3 needs four slots summing each variable once;
# Z_4 uses 3x + 3y + 3z.
_WNU_BY_MODULUS = {
    2: "(p x0 x1 x2)",
    3: "(p (p x0 x1 x2) x1 x3)",
    4: "(p x1 (p x0 x1 x2) x1)",
}


def builtin_corpus(*, limits: Limits = DEFAULT_LIMITS) -> list[CorpusEntry]:
    entries: list[CorpusEntry | None] = []

    for n in (2, 3, 4):
        decl = {
            "wnu": _WNU_BY_MODULUS[n],
            "maltsev": "(p x0 x1 x2)",
            "weak_difference": "(p x0 x1 x2)",
        }
        entries.append(make_entry(
            f"z{n}aff", n, (_affine_op(n),), decl,
            f"builtin: affine Z_{n} with p(x,y,z) = x-y+z", limits=limits,
        ))

    entries.append(make_entry(
        "s2", 2, (Operation("f", 2, (0, 0, 0, 1)),),
        {"wnu": "(f x0 x1)"},
        "builtin: two-element meet semilattice", limits=limits,
    ))
    entries.append(make_entry(
        "lat2", 2,
        (Operation("meet", 2, (0, 0, 0, 1)), Operation("join", 2, (0, 1, 1, 1))),
        {"wnu": "(meet x0 x1)"},
        "builtin: two-element lattice", limits=limits,
    ))

    z2 = FiniteAlgebra("z2", 2, (_affine_op(2),))
    s2t = FiniteAlgebra("s2t", 2, (_min3_op(),))
    sq = product([z2, z2], limits=limits)
    mixed = product([z2, s2t], limits=limits)
    entries.append(make_entry(
        "z2aff_sq", sq.size, sq.ops,
        {
            "wnu": "(p x0 x1 x2)",
            "maltsev": "(p x0 x1 x2)",
            "weak_difference": "(p x0 x1 x2)",
        },
        "builtin: square of affine Z_2", limits=limits,
    ))
    entries.append(make_entry(
        "z2s2", mixed.size, mixed.ops,
        {"wnu": "(p x0 x1 x2)", "weak_difference": "(p x0 x1 x2)"},
        "builtin: affine Z_2 times ternary-min semilattice", limits=limits,
    ))

    return [e for e in entries if e is not None]


# -- bounded enumeration -----------------------------------------------------

def _commutative_idempotent_tables(size: int):
    """All binary commutative idempotent tables on {0..size-1}, row-major."""
    pairs = [(a, b) for a in range(size) for b in range(a + 1, size)]
    for vals in itertools.product(range(size), repeat=len(pairs)):
        table = [0] * (size * size)
        for a in range(size):
            table[a * size + a] = a
        for (a, b), v in zip(pairs, vals):
            table[a * size + b] = v
            table[b * size + a] = v
        yield tuple(table)


def enumerate_groupoids(
    size: int, *, limits: Limits = DEFAULT_LIMITS
) -> list[CorpusEntry]:
    """Isomorphism classes of commutative idempotent groupoids of the size.

    The single operation is its own weak near-unanimity witness; it is
    still verified rather than trusted.
    """
    if size < 2:
        raise HypothesisError("enumeration needs at least two elements")
    if size > limits.max_universe:
        raise HypothesisError(f"enumeration size {size} exceeds the universe cap")
    reps: list[tuple[int, ...]] = []
    for table in _commutative_idempotent_tables(size):
        alg = FiniteAlgebra("candidate", size, (Operation("f", 2, table),))
        if any(
            find_isomorphism(
                FiniteAlgebra("rep", size, (Operation("f", 2, r),)),
                alg, limits=limits,
            ) is not None
            for r in reps
        ):
            continue
        reps.append(table)
    entries = []
    for i, table in enumerate(reps):
        e = make_entry(
            f"cig{size}_{i}", size, (Operation("f", 2, table),),
            {"wnu": "(f x0 x1)"},
            f"enumerated: commutative idempotent groupoid, size {size}, class {i}",
            limits=limits,
        )
        if e is not None:
            entries.append(e)
    return entries


# -- directory format --------------------------------------------------------

def load_corpus_dir(path: str, *, limits: Limits = DEFAULT_LIMITS) -> list[CorpusEntry]:
    """One algebra JSON per file plus witnesses.json keyed by algebra name."""
    wfile = os.path.join(path, "witnesses.json")
    declared_by_name: dict[str, dict[str, str]] = {}
    if os.path.exists(wfile):
        with open(wfile, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        if not isinstance(raw, dict):
            raise SignatureError("witnesses.json must map algebra names to terms")
        declared_by_name = {k: dict(v) for k, v in raw.items()}

    entries = []
    for fname in sorted(os.listdir(path)):
        if not fname.endswith(".json") or fname == "witnesses.json":
            continue
        alg = load_algebra(os.path.join(path, fname), limits=limits)
        decl = declared_by_name.get(alg.name, {})
        e = make_entry(
            alg.name, alg.size, alg.ops, decl,
            f"loaded from {fname}", limits=limits,
        )
        if e is not None:
            entries.append(e)
    return entries


def write_corpus_dir(entries: list[CorpusEntry], path: str) -> None:
    os.makedirs(path, exist_ok=True)
    witnesses = {}
    for e in entries:
        dump_algebra(e.algebra, os.path.join(path, f"{e.algebra.name}.json"))
        if e.algebra.witnesses:
            witnesses[e.algebra.name] = dict(e.algebra.witnesses)
    with open(os.path.join(path, "witnesses.json"), "w", encoding="utf-8") as fh:
        json.dump(witnesses, fh, indent=2, sort_keys=True)
        fh.write("\n")


def build_corpus(spec: str, *, limits: Limits = DEFAULT_LIMITS) -> list[CorpusEntry]:
    """Resolve a corpus description: a generation mode or a directory.

    Modes: "builtin" (the seven fixed algebras), "enum2"/"enum3" (bounded
    enumeration), "all" (builtin plus both enumerations).  Anything else is
    treated as a directory path.
    """
    if spec == "builtin":
        return builtin_corpus(limits=limits)
    if spec in ("enum2", "enum3"):
        return enumerate_groupoids(int(spec[-1]), limits=limits)
    if spec == "all":
        return (
            builtin_corpus(limits=limits)
            + enumerate_groupoids(2, limits=limits)
            + enumerate_groupoids(3, limits=limits)
        )
    if os.path.isdir(spec):
        return load_corpus_dir(spec, limits=limits)
    raise HypothesisError(
        f"corpus spec {spec!r} is neither a known mode nor a directory"
    )
