"""Command-line surface.

Layout: one subcommand per task family.  Algebras come from JSON files;
when a ``witnesses.json`` sits next to the file and has an entry for the
algebra's name, its verified terms are attached, which is what unlocks the
trace and similarity machinery.  Partitions are written ``|0 2|1 3|``.

Exit codes: 0 when every requested check holds, 1 when a check fails or a
certified fact is contradicted, 2 for usage errors and unmet hypotheses.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .algebra import FiniteAlgebra, dump_algebra, load_algebra, product
from .bridges import (
    bridge_from_json,
    bridge_to_json,
    compose,
    extract_b3,
    good_bridge_between,
    is_bridge,
    opt,
    opt_bruteforce,
)
from .commutator import centralizer, is_abelian, is_abelian_modulo
from .congruences import (
    Congruence,
    cg,
    con_lattice,
    cov,
    cov_plus,
    format_partition,
    is_irreducible,
    parse_partition,
    quotient_of,
)
from .corpus import build_corpus, verify_witnesses, write_corpus_dir
from .deltasim import build_D, build_zeta, is_similar
from .errors import (
    HypothesisError,
    NotACongruence,
    ResourceLimitError,
    SignatureError,
    TheoremViolation,
)
from .terms import (
    format_term,
    is_idempotent,
    is_maltsev,
    is_weak_difference_term,
    is_wnu,
    parse_term,
    search_term,
    term_arity,
)
from .verify import SUITE_ORDER, report_to_json, verify_all

logger = logging.getLogger("finalg.cli")

USAGE_ERROR = 2
CHECK_FAILED = 1


def _load_alg(path: str) -> FiniteAlgebra:
    """Load one algebra file, attaching verified sidecar witnesses if any."""
    alg = load_algebra(path)
    sidecar = Path(path).parent / "witnesses.json"
    if sidecar.is_file():
        with open(sidecar, "r", encoding="utf-8") as fh:
            declared = json.load(fh)
        terms = declared.get(alg.name)
        if terms:
            status = verify_witnesses(alg, terms)
            kept = {k: v for k, v in terms.items() if status.get(k)}
            if kept:
                alg = FiniteAlgebra(alg.name, alg.size, alg.ops, kept)
            dropped = sorted(set(terms) - set(kept))
            if dropped:
                logger.warning(
                    "%s: dropped unverified witnesses: %s",
                    alg.name, ", ".join(dropped),
                )
    return alg


def _parse_part(text: str, size: int) -> Congruence:
    return parse_partition(text, size)


def _emit(line: str) -> None:
    print(line)


# -- alg -------------------------------------------------------------------

def _cmd_alg_info(args) -> int:
    alg = _load_alg(args.alg)
    _emit(f"name: {alg.name}")
    _emit(f"size: {alg.size}")
    for op in alg.ops:
        _emit(f"op: {op.name}/{op.arity}")
    for pred in sorted(alg.witnesses or ()):
        _emit(f"witness {pred}: {alg.witnesses[pred]}")
    lat = con_lattice(alg)
    _emit(f"congruences: {len(lat.congruences)}")
    return 0


def _cmd_alg_product(args) -> int:
    factors = [_load_alg(p) for p in args.alg]
    if len(factors) < 2:
        raise HypothesisError("product needs at least two --alg files")
    prod = product(factors, name=args.name)
    if args.out:
        dump_algebra(prod, args.out)
        _emit(f"wrote {args.out}")
    else:
        _emit(json.dumps(prod.to_json(), indent=2))
    return 0


def _cmd_alg_quotient(args) -> int:
    alg = _load_alg(args.alg)
    rho = _parse_part(args.rho, alg.size)
    q, _ = quotient_of(alg, rho)
    if args.out:
        dump_algebra(q, args.out)
        _emit(f"wrote {args.out}")
    else:
        _emit(json.dumps(q.to_json(), indent=2))
    return 0


# -- con -------------------------------------------------------------------

def _cmd_con_lattice(args) -> int:
    alg = _load_alg(args.alg)
    for c in con_lattice(alg).congruences:
        _emit(format_partition(c))
    return 0


def _cmd_con_cg(args) -> int:
    alg = _load_alg(args.alg)
    pairs = []
    for chunk in args.pairs.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        a, b = chunk.split(",")
        pairs.append((int(a), int(b)))
    _emit(format_partition(cg(alg, pairs)))
    return 0


def _cmd_con_cov(args) -> int:
    alg = _load_alg(args.alg)
    rho = _parse_part(args.rho, alg.size)
    for rel in cov(alg, rho):
        _emit(rel.format())
    return 0


def _cmd_con_covplus(args) -> int:
    alg = _load_alg(args.alg)
    rho = _parse_part(args.rho, alg.size)
    for rel in cov_plus(alg, rho):
        _emit(rel.format())
    return 0


def _cmd_con_irreducible(args) -> int:
    alg = _load_alg(args.alg)
    rho = _parse_part(args.rho, alg.size)
    irr, witness = is_irreducible(alg, rho)
    if irr:
        _emit("irreducible")
        if witness is not None:
            _emit(witness.format())
        return 0
    _emit("not irreducible")
    return CHECK_FAILED


# -- scalar queries --------------------------------------------------------

def _cmd_centralizer(args) -> int:
    alg = _load_alg(args.alg)
    theta = _parse_part(args.theta, alg.size)
    delta = _parse_part(args.delta, alg.size)
    _emit(format_partition(centralizer(alg, theta, delta)))
    return 0


def _cmd_abelian(args) -> int:
    alg = _load_alg(args.alg)
    theta = (
        _parse_part(args.theta, alg.size)
        if args.theta
        else Congruence.one(alg.size)
    )
    if args.modulo:
        delta = _parse_part(args.modulo, alg.size)
        ok = is_abelian_modulo(alg, theta, delta)
    else:
        ok = is_abelian(alg, theta)
    _emit("abelian" if ok else "not abelian")
    return 0 if ok else CHECK_FAILED


# -- term ------------------------------------------------------------------

_TERM_CHECKS = {
    "wnu": is_wnu,
    "maltsev": is_maltsev,
    "weak_difference": is_weak_difference_term,
    "idempotent": is_idempotent,
}


def _cmd_term_check(args) -> int:
    alg = _load_alg(args.alg)
    term = parse_term(args.term, alg)
    checker = _TERM_CHECKS[args.predicate]
    ok = checker(alg, term)
    _emit(f"{args.predicate}: {'yes' if ok else 'no'} (arity {term_arity(term)})")
    return 0 if ok else CHECK_FAILED


def _cmd_term_search(args) -> int:
    alg = _load_alg(args.alg)
    term = search_term(alg, args.predicate, args.max_depth)
    if term is None:
        _emit("none found within depth bound")
        return CHECK_FAILED
    _emit(format_term(term, alg))
    return 0


# -- structure -------------------------------------------------------------

def _cmd_dalg(args) -> int:
    alg = _load_alg(args.alg)
    from .congruences import monolith

    mu = monolith(alg)
    if mu is None:
        raise HypothesisError(f"{alg.name} is not subdirectly irreducible")
    dres = build_D(alg, mu)
    _emit(f"D size: {dres.D.size}")
    _emit(f"monolith: {format_partition(dres.monolith)}")
    _emit(f"alpha: {format_partition(dres.alpha)}")
    if args.out:
        dump_algebra(dres.D, args.out)
        _emit(f"wrote {args.out}")
    return 0


def _cmd_similar(args) -> int:
    a = _load_alg(args.alg)
    b = _load_alg(args.other)
    ok = is_similar(a, b)
    _emit("similar" if ok else "not similar")
    return 0 if ok else CHECK_FAILED


def _cmd_zeta(args) -> int:
    alg = _load_alg(args.alg)
    rho = _parse_part(args.rho, alg.size)
    zr = build_zeta(alg, rho)
    _emit(f"Z size: {zr.Z.size}")
    _emit(f"zero: {zr.zero}")
    _emit(f"triples: {len(zr.triples)}")
    _emit(f"rho_star: {zr.rho_star.format()}")
    return 0


# -- bridge ----------------------------------------------------------------

def _load_bridge(args):
    alg_a = _load_alg(args.alg)
    alg_b = _load_alg(args.other) if args.other else alg_a
    with open(args.bridge, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    rho, sigma, T = bridge_from_json(data, alg_a, alg_b)
    return alg_a, rho, alg_b, sigma, T


def _cmd_bridge_verify(args) -> int:
    alg_a, rho, alg_b, sigma, T = _load_bridge(args)
    cert, problem = is_bridge(alg_a, rho, alg_b, sigma, T)
    if cert is None:
        _emit("not a certified link")
        for k, v in (problem or {}).items():
            _emit(f"  {k}: {v}")
        return CHECK_FAILED
    _emit(f"quads: {len(cert.T)}")
    _emit(f"trace: {cert.trace.format()}")
    _emit(f"reflexive: {cert.reflexive}")
    _emit(f"compact: {cert.compact}")
    _emit(f"good: {cert.good}")
    _emit(f"column-traced: {cert.b3}")
    return 0


def _cmd_bridge_opt(args) -> int:
    alg = _load_alg(args.alg)
    rho = _parse_part(args.rho, alg.size)
    _emit(format_partition(opt(alg, rho)))
    return 0


def _cmd_bridge_brute(args) -> int:
    alg = _load_alg(args.alg)
    rho = _parse_part(args.rho, alg.size)
    lefts = cov_plus(alg, rho)
    left = lefts[args.cover]
    res = opt_bruteforce(alg, rho, left, args.budget)
    _emit(f"trace: {res.trace.format()}")
    _emit(f"exhaustive: {res.exhaustive}")
    _emit(f"composed: {res.composed}")
    _emit(f"links seen: {res.n_bridges}")
    return 0


def _cmd_bridge_between(args) -> int:
    alg_a = _load_alg(args.alg)
    alg_b = _load_alg(args.other)
    rho = _parse_part(args.rho, alg_a.size)
    sigma = _parse_part(args.sigma, alg_b.size)
    T = good_bridge_between(alg_a, rho, alg_b, sigma)
    if T is None:
        _emit("no good link: quotients not similar")
        return CHECK_FAILED
    payload = bridge_to_json(alg_a, rho, alg_b, sigma, T)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
        _emit(f"wrote {args.out}")
    else:
        _emit(json.dumps(payload, indent=2))
    return 0


def _cmd_bridge_extract(args) -> int:
    alg_a, rho, alg_b, sigma, T = _load_bridge(args)
    shrunk = extract_b3(alg_a, rho, alg_b, sigma, T)
    payload = bridge_to_json(alg_a, rho, alg_b, sigma, shrunk)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
        _emit(f"wrote {args.out}")
    else:
        _emit(json.dumps(payload, indent=2))
    return 0


def _cmd_bridge_compose(args) -> int:
    alg_a = _load_alg(args.alg)
    alg_m = _load_alg(args.mid)
    alg_b = _load_alg(args.other)
    with open(args.left, "r", encoding="utf-8") as fh:
        rho, tau, T1 = bridge_from_json(json.load(fh), alg_a, alg_m)
    with open(args.right, "r", encoding="utf-8") as fh:
        tau2, sigma, T2 = bridge_from_json(json.load(fh), alg_m, alg_b)
    if tau != tau2:
        raise HypothesisError("middle congruences of the two links differ")
    T = compose(T1, T2)
    cert, _problem = is_bridge(alg_a, rho, alg_b, sigma, T)
    payload = bridge_to_json(alg_a, rho, alg_b, sigma, T)
    _emit(f"certified: {cert is not None}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
        _emit(f"wrote {args.out}")
    return 0


# -- corpus / verify-paper -------------------------------------------------

def _cmd_corpus_build(args) -> int:
    entries = build_corpus(args.spec)
    _emit(f"{len(entries)} entries")
    for e in entries:
        preds = ",".join(sorted(p for p, ok in e.witness_status.items() if ok))
        _emit(f"  {e.algebra.name} size={e.algebra.size} witnesses={preds or '-'}")
    if args.out:
        write_corpus_dir(entries, args.out)
        _emit(f"wrote {args.out}")
    return 0


def _cmd_verify_paper(args) -> int:
    entries = build_corpus(args.corpus)
    if not entries:
        raise HypothesisError(f"corpus {args.corpus!r} produced no entries")
    names = SUITE_ORDER if args.suite == "all" else (args.suite,)
    reports = verify_all(
        entries,
        suites=names,
        budget=args.budget,
        rng_seed=args.seed,
        workers=args.workers,
    )
    records = report_to_json(reports)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(records, fh, indent=2)
            fh.write("\n")
    totals: dict[str, int] = {}
    for rep in reports:
        for status, k in rep.counts().items():
            totals[status] = totals.get(status, 0) + k
    for rep, name in zip(reports, names):
        c = rep.counts()
        line = " ".join(f"{s}={c[s]}" for s in sorted(c))
        _emit(f"{name}: {line}")
        for rec in rep.failures:
            _emit(f"  FAIL {rec.instance}: {rec.witness}")
    _emit(
        "total: " + " ".join(f"{s}={totals[s]}" for s in sorted(totals))
    )
    return 0 if all(rep.ok for rep in reports) else CHECK_FAILED


# -- parser ----------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="finalg",
        description="finite algebra toolkit: congruences, traces, links",
    )
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    alg = sub.add_parser("alg", help="inspect and build algebras")
    alg_sub = alg.add_subparsers(dest="subcommand", required=True)
    q = alg_sub.add_parser("info", help="summary of one algebra file")
    q.add_argument("--alg", required=True)
    q.set_defaults(fn=_cmd_alg_info)
    q = alg_sub.add_parser("product", help="direct product of algebra files")
    q.add_argument("--alg", action="append", required=True)
    q.add_argument("--name")
    q.add_argument("--out")
    q.set_defaults(fn=_cmd_alg_product)
    q = alg_sub.add_parser("quotient", help="quotient by a congruence")
    q.add_argument("--alg", required=True)
    q.add_argument("--rho", required=True)
    q.add_argument("--out")
    q.set_defaults(fn=_cmd_alg_quotient)

    con = sub.add_parser("con", help="congruence lattice queries")
    con_sub = con.add_subparsers(dest="subcommand", required=True)
    q = con_sub.add_parser("lattice", help="all congruences, one per line")
    q.add_argument("--alg", required=True)
    q.set_defaults(fn=_cmd_con_lattice)
    q = con_sub.add_parser("cg", help="congruence generated by pairs a,b;c,d")
    q.add_argument("--alg", required=True)
    q.add_argument("--pairs", required=True)
    q.set_defaults(fn=_cmd_con_cg)
    q = con_sub.add_parser("cov", help="minimal saturated covers")
    q.add_argument("--alg", required=True)
    q.add_argument("--rho", required=True)
    q.set_defaults(fn=_cmd_con_cov)
    q = con_sub.add_parser("covplus", help="minimal saturated covers inside the upper cover")
    q.add_argument("--alg", required=True)
    q.add_argument("--rho", required=True)
    q.set_defaults(fn=_cmd_con_covplus)
    q = con_sub.add_parser("irreducible", help="unique-cover test")
    q.add_argument("--alg", required=True)
    q.add_argument("--rho", required=True)
    q.set_defaults(fn=_cmd_con_irreducible)

    q = sub.add_parser("centralizer", help="largest phi with C(phi,theta;delta)")
    q.add_argument("--alg", required=True)
    q.add_argument("--theta", required=True)
    q.add_argument("--delta", required=True)
    q.set_defaults(fn=_cmd_centralizer)

    q = sub.add_parser("abelian", help="term condition check")
    q.add_argument("--alg", required=True)
    q.add_argument("--theta")
    q.add_argument("--modulo")
    q.set_defaults(fn=_cmd_abelian)

    term = sub.add_parser("term", help="term predicates")
    term_sub = term.add_subparsers(dest="subcommand", required=True)
    q = term_sub.add_parser("check", help="check one term against a predicate")
    q.add_argument("--alg", required=True)
    q.add_argument("--term", required=True)
    q.add_argument("--predicate", required=True, choices=sorted(_TERM_CHECKS))
    q.set_defaults(fn=_cmd_term_check)
    q = term_sub.add_parser("search", help="breadth-first term search")
    q.add_argument("--alg", required=True)
    q.add_argument(
        "--predicate", required=True,
        choices=("wnu", "maltsev", "weak_difference"),
    )
    q.add_argument("--max-depth", type=int, default=3)
    q.set_defaults(fn=_cmd_term_search)

    q = sub.add_parser("dalg", help="central quotient of an SI algebra")
    q.add_argument("--alg", required=True)
    q.add_argument("--out")
    q.set_defaults(fn=_cmd_dalg)

    q = sub.add_parser("similar", help="similarity of two SI algebras")
    q.add_argument("--alg", required=True)
    q.add_argument("--other", required=True)
    q.set_defaults(fn=_cmd_similar)

    q = sub.add_parser("zeta", help="three-column construction over an irreducible")
    q.add_argument("--alg", required=True)
    q.add_argument("--rho", required=True)
    q.set_defaults(fn=_cmd_zeta)

    br = sub.add_parser("bridge", help="link constructions and checks")
    br_sub = br.add_subparsers(dest="subcommand", required=True)
    q = br_sub.add_parser("verify", help="certify a link file")
    q.add_argument("--alg", required=True)
    q.add_argument("--other")
    q.add_argument("--bridge", required=True)
    q.set_defaults(fn=_cmd_bridge_verify)
    q = br_sub.add_parser("opt", help="optimal trace of a meet-irreducible")
    q.add_argument("--alg", required=True)
    q.add_argument("--rho", required=True)
    q.set_defaults(fn=_cmd_bridge_opt)
    q = br_sub.add_parser("brute", help="bounded generator sweep for traces")
    q.add_argument("--alg", required=True)
    q.add_argument("--rho", required=True)
    q.add_argument("--budget", type=int, default=2)
    q.add_argument("--cover", type=int, default=0)
    q.set_defaults(fn=_cmd_bridge_brute)
    q = br_sub.add_parser("between", help="good link between two instances")
    q.add_argument("--alg", required=True)
    q.add_argument("--rho", required=True)
    q.add_argument("--other", required=True)
    q.add_argument("--sigma", required=True)
    q.add_argument("--out")
    q.set_defaults(fn=_cmd_bridge_between)
    q = br_sub.add_parser("extract-b3", help="shrink onto traced columns")
    q.add_argument("--alg", required=True)
    q.add_argument("--other")
    q.add_argument("--bridge", required=True)
    q.add_argument("--out")
    q.set_defaults(fn=_cmd_bridge_extract)
    q = br_sub.add_parser("compose", help="relational composite of two link files")
    q.add_argument("--alg", required=True)
    q.add_argument("--mid", required=True)
    q.add_argument("--other", required=True)
    q.add_argument("--left", required=True)
    q.add_argument("--right", required=True)
    q.add_argument("--out")
    q.set_defaults(fn=_cmd_bridge_compose)

    q = sub.add_parser("corpus", help="build and write corpora")
    corpus_sub = q.add_subparsers(dest="subcommand", required=True)
    q = corpus_sub.add_parser("build", help="materialize a corpus")
    q.add_argument(
        "--spec", default="builtin",
        help="builtin, enum2, enum3, all, or a directory path",
    )
    q.add_argument("--out")
    q.set_defaults(fn=_cmd_corpus_build)

    q = sub.add_parser("verify-paper", help="run the verification suites")
    q.add_argument("--suite", default="all", choices=("all",) + SUITE_ORDER)
    q.add_argument(
        "--corpus", default="builtin",
        help="builtin, enum2, enum3, all, or a corpus directory",
    )
    q.add_argument("--report", help="write the JSON record array here")
    q.add_argument("--budget", type=int, default=2)
    q.add_argument("--seed", type=int, default=1729)
    q.add_argument("--workers", type=int, default=1)
    q.set_defaults(fn=_cmd_verify_paper)

    return p


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help; keep both
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(name)s: %(message)s",
    )
    try:
        return args.fn(args)
    except TheoremViolation as exc:
        print(f"theorem violation: {exc}", file=sys.stderr)
        if exc.witness:
            for k, v in exc.witness.items():
                print(f"  {k}: {v}", file=sys.stderr)
        return CHECK_FAILED
    except (HypothesisError, NotACongruence, SignatureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except json.JSONDecodeError as exc:
        print(f"error: malformed JSON: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
