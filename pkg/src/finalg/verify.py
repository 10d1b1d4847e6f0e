"""Suite runner replaying the certified structural facts on a corpus.

Every suite walks the applicable corpus instances, re-derives one family of
facts from scratch (traces, centralizers, covers, central quotients, link
certificates) and emits one record per instance.  Records carry a status of
``pass``, ``fail`` (with a witness), ``skipped`` (with the unmet hypothesis)
or ``budget-exhausted``; a closing ``~coverage`` record per suite fails when
nothing substantive ran, so a suite can never go green by vacuity.

Suites that exercise many links share a pool of certified ones built once
per run: identity constructions, cross-cover links, optimal self-links,
similarity links across instance pairs, adjacency witnesses, converses, and
seeded random sub-links regenerated from certified bases.  Pool construction
is deterministic given the seed, and the seed is recorded in the instance
labels of the random members.

Reports serialize to a plain JSON array of record objects.  Within a suite,
instances are independent and may run on worker threads; records are sorted
by instance label afterwards, so the report never depends on scheduling.
"""

from __future__ import annotations

import logging
import platform
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from ._kernels import KERNEL
from .algebra import FiniteAlgebra, find_isomorphism, is_subuniverse, sg
from .bridges import (
    BridgeCert,
    adjacency_search,
    certify_bridge,
    cross_cover_bridge,
    extract_b3,
    good_bridge_between,
    identity_bridge,
    is_bridge,
    compact_restrict,
    induced_iso,
    opt,
    opt_bridge,
    opt_bruteforce,
    quad_generate,
)
from .commutator import (
    centralizer,
    centralizes,
    class_group,
    is_abelian,
    is_abelian_algebra,
    is_abelian_modulo,
)
from .congruences import (
    Congruence,
    bar_rho,
    con_lattice,
    cov,
    cov_plus,
    format_partition,
    is_irreducible,
    meet_irreducibles,
    monolith,
    quotient_of,
)
from .corpus import CorpusEntry
from .deltasim import (
    build_D,
    build_T_DA,
    build_theta_algebra,
    build_zeta,
    check_similarity_bridge,
    delta,
    is_similar,
)
from .errors import (
    FinalgError,
    HypothesisError,
    ResourceLimitError,
    TheoremViolation,
)
from .limits import DEFAULT_LIMITS, Limits
from .relations import BinRel, QuadRel
from .terms import eval_term, parse_term, search_term

logger = logging.getLogger("finalg.verify")

DEFAULT_SEED = 1729

PASS = "pass"
FAIL = "fail"
SKIP = "skipped"
BUDGET = "budget-exhausted"

# one thunk outcome: (status, witness-or-None)
Outcome = tuple[str, "Mapping[str, str] | None"]
Task = tuple[str, Callable[[], Outcome]]


def _ok() -> Outcome:
    return (PASS, None)


def _fail(**kw: object) -> Outcome:
    return (FAIL, {k: str(v) for k, v in kw.items()})


def _skip(reason: str) -> Outcome:
    return (SKIP, {"reason": reason})


@dataclass(frozen=True)
class CheckRecord:
    """One verified instance of one suite."""

    suite: str
    instance: str
    status: str
    witness: Mapping[str, str] | None
    millis: int

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "instance": self.instance,
            "status": self.status,
            "witness": dict(self.witness) if self.witness is not None else None,
            "millis": self.millis,
        }


@dataclass(frozen=True)
class VerificationReport:
    records: tuple[CheckRecord, ...]
    fingerprint: Mapping[str, str]

    @property
    def failures(self) -> tuple[CheckRecord, ...]:
        return tuple(r for r in self.records if r.status == FAIL)

    @property
    def ok(self) -> bool:
        return not self.failures

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for r in self.records:
            out[r.status] = out.get(r.status, 0) + 1
        return out

    def to_json(self) -> list[dict]:
        # the environment fingerprint stays in memory: the serialized form
        # is a bare array so reports diff cleanly across machines
        return [r.to_json() for r in self.records]


def environment_fingerprint() -> dict[str, str]:
    return {
        "python": platform.python_version(),
        "platform": platform.platform(),
        "kernel": KERNEL,
    }


def report_to_json(reports: Iterable[VerificationReport]) -> list[dict]:
    out: list[dict] = []
    for rep in reports:
        out.extend(rep.to_json())
    return out


# -- shared instance walks -------------------------------------------------

def _mi_instances(
    corpus: Sequence[CorpusEntry], limits: Limits
) -> list[tuple[CorpusEntry, Congruence, Congruence]]:
    out = []
    for entry in corpus:
        for rho, rho_plus in meet_irreducibles(entry.algebra, limits=limits):
            out.append((entry, rho, rho_plus))
    return out


def _label(alg: FiniteAlgebra, rho: Congruence) -> str:
    return f"{alg.name} rho={format_partition(rho)}"


def _pair_label(
    alg_a: FiniteAlgebra, rho: Congruence, alg_b: FiniteAlgebra, sigma: Congruence
) -> str:
    return f"{_label(alg_a, rho)} -> {_label(alg_b, sigma)}"


def _has_wnu(alg: FiniteAlgebra) -> bool:
    return bool(alg.witnesses) and "wnu" in alg.witnesses


# -- the shared link pool --------------------------------------------------

@dataclass(frozen=True)
class PoolBridge:
    """A certified link kept for reuse across suites."""

    label: str
    alg_a: FiniteAlgebra
    rho: Congruence
    alg_b: FiniteAlgebra
    sigma: Congruence
    T: QuadRel
    cert: BridgeCert


def build_bridge_pool(
    corpus: Sequence[CorpusEntry],
    *,
    rng_seed: int = DEFAULT_SEED,
    randoms_per_base: int = 2,
    limits: Limits = DEFAULT_LIMITS,
) -> tuple[PoolBridge, ...]:
    """Certified links shared by the pool-driven suites.

    Deterministic for a fixed corpus and seed.  Members arising from
    constructions with proven outcomes are re-certified here and a failure
    raises; speculative members (random sub-links) are silently dropped
    when certification fails.
    """
    rng = random.Random(rng_seed)
    out: list[PoolBridge] = []
    seen: set[tuple] = set()

    def add(
        label: str,
        alg_a: FiniteAlgebra,
        rho: Congruence,
        alg_b: FiniteAlgebra,
        sigma: Congruence,
        T: QuadRel,
        required: bool = True,
    ) -> PoolBridge | None:
        key = (alg_a.name, rho.least, alg_b.name, sigma.least, T.bits)
        if key in seen:
            return None
        cert, problem = is_bridge(alg_a, rho, alg_b, sigma, T, limits=limits)
        if cert is None:
            if required:
                raise TheoremViolation(
                    f"pool link failed certification: {label}", witness=problem
                )
            return None
        seen.add(key)
        pb = PoolBridge(label, alg_a, rho, alg_b, sigma, T, cert)
        out.append(pb)
        return pb

    mis = _mi_instances(corpus, limits)

    for entry, rho, _rho_plus in mis:
        alg = entry.algebra
        cplus = cov_plus(alg, rho, limits=limits)
        for i, tau in enumerate(cplus):
            T = identity_bridge(alg, rho, tau, limits=limits)
            add(f"identity {_label(alg, rho)} cover#{i}", alg, rho, alg, rho, T)
        if len(cplus) == 2:
            T = cross_cover_bridge(alg, rho, cplus[0], cplus[1], limits=limits)
            add(f"crossed {_label(alg, rho)}", alg, rho, alg, rho, T)
        if _has_wnu(alg):
            ob = opt_bridge(alg, rho, limits=limits)
            add(f"optimal {_label(alg, rho)}", alg, rho, alg, rho, ob.cert.T)

    for ea, ra, _ in mis:
        for eb, rb, _ in mis:
            A, B = ea.algebra, eb.algebra
            if not A.same_signature(B):
                continue
            try:
                T = good_bridge_between(A, ra, B, rb, limits=limits)
            except HypothesisError:
                continue  # similarity needs witness terms the entries lack
            if T is not None:
                add(f"similarity {_pair_label(A, ra, B, rb)}", A, ra, B, rb, T)

    for entry in corpus:
        alg = entry.algebra
        if not _has_wnu(alg):
            continue
        mi_here = [rho for rho, _ in meet_irreducibles(alg, limits=limits)]
        for i, rho in enumerate(mi_here):
            for sigma in mi_here[i + 1:]:
                res = adjacency_search(alg, rho, sigma, 1, limits=limits)
                if res.status == "witness" and res.bridge is not None:
                    add(
                        f"adjacent {_pair_label(alg, rho, alg, sigma)}",
                        alg, rho, alg, sigma, res.bridge,
                    )

    for pb in list(out):
        add(
            f"converse of {pb.label}",
            pb.alg_b, pb.sigma, pb.alg_a, pb.rho, pb.T.converse(),
        )

    for base_idx, pb in enumerate(list(out)):
        quads = pb.T.sorted_quads()
        diag = [(a, a, b, b) for a, b in pb.cert.trace.pairs()]
        for j in range(randoms_per_base):
            k = min(rng.choice((1, 2)), len(quads))
            seed_quads = diag + rng.sample(quads, k)
            try:
                T2 = quad_generate(
                    pb.alg_a, pb.rho, pb.alg_b, pb.sigma, seed_quads,
                    limits=limits,
                )
            except FinalgError:
                continue
            if T2.bits == pb.T.bits:
                continue
            add(
                f"random#{base_idx}.{j} seed={rng_seed} from {pb.label}",
                pb.alg_a, pb.rho, pb.alg_b, pb.sigma, T2,
                required=False,
            )

    logger.info("bridge pool: %d certified links", len(out))
    return tuple(out)


# -- task execution --------------------------------------------------------

def _run_tasks(suite: str, tasks: Sequence[Task], workers: int) -> list[CheckRecord]:
    def one(item: Task) -> CheckRecord:
        label, thunk = item
        t0 = time.perf_counter()
        try:
            status, witness = thunk()
        except TheoremViolation as exc:
            status = FAIL
            witness = {"error": str(exc)}
            if exc.witness:
                witness.update({k: str(v) for k, v in exc.witness.items()})
        except ResourceLimitError as exc:
            status, witness = BUDGET, {"error": str(exc)}
        except FinalgError as exc:
            status, witness = FAIL, {"error": f"{type(exc).__name__}: {exc}"}
        millis = int((time.perf_counter() - t0) * 1000)
        return CheckRecord(suite, label, status, witness, millis)

    if workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            records = list(ex.map(one, tasks))
    else:
        records = [one(t) for t in tasks]
    records.sort(key=lambda r: r.instance)

    substantive = sum(1 for r in records if r.status in (PASS, FAIL))
    if substantive:
        covr = CheckRecord(
            suite, "~coverage", PASS, {"checked": str(substantive)}, 0
        )
    else:
        covr = CheckRecord(
            suite, "~coverage", FAIL,
            {"reason": "no applicable corpus instance"}, 0,
        )
    records.append(covr)
    return records


@dataclass
class _Ctx:
    corpus: tuple[CorpusEntry, ...]
    pool: tuple[PoolBridge, ...]
    budget: int
    rng_seed: int
    limits: Limits


# -- suites ----------------------------------------------------------------

def _suite_opt2(ctx: _Ctx) -> list[Task]:
    """Optimal trace = centralizer of the upper cover; attainment both ways."""
    tasks: list[Task] = []
    for entry, rho, rho_plus in _mi_instances(ctx.corpus, ctx.limits):
        alg = entry.algebra

        def thunk(alg=alg, rho=rho, rho_plus=rho_plus) -> Outcome:
            lim = ctx.limits
            if not _has_wnu(alg):
                return _skip("no attached wnu witness")
            alpha = opt(alg, rho, limits=lim)
            cent = centralizer(alg, rho_plus, rho, limits=lim)
            if alpha != cent:
                return _fail(
                    reason="optimal trace differs from the cover centralizer",
                    optimal=format_partition(alpha),
                    centralizer=format_partition(cent),
                )
            ab = is_abelian_modulo(alg, rho_plus, rho, limits=lim)
            if ab != (alpha != rho):
                return _fail(
                    reason="abelian cover does not match strict trace growth",
                    abelian=ab, optimal=format_partition(alpha),
                )
            ob = opt_bridge(alg, rho, limits=lim)
            if ob.abelian != ab:
                return _fail(reason="attaining link disagrees on the abelian flag")
            want = (alpha if ab else rho).as_binrel()
            if ob.cert.trace.bits != want.bits:
                return _fail(
                    reason="attaining link trace mismatch",
                    trace=ob.cert.trace.format(),
                )
            cplus = cov_plus(alg, rho, limits=lim)
            if ab:
                plus_rel = rho_plus.as_binrel()
                barr = bar_rho(alg, rho, limits=lim)
                if (
                    len(cplus) != 1
                    or cplus[0].bits != plus_rel.bits
                    or barr.bits != plus_rel.bits
                ):
                    return _fail(
                        reason="abelian cover must leave the upper cover as "
                        "the only minimal saturated cover",
                        n_covers=len(cplus),
                    )
            sweep_budget = 4 if alg.size <= 2 else ctx.budget
            alpha_rel = alpha.as_binrel()
            for i, tau in enumerate(cplus):
                br = opt_bruteforce(alg, rho, tau, sweep_budget, limits=lim)
                if not br.trace.is_subset(alpha_rel):
                    return _fail(
                        reason="swept trace leaves the centralizer",
                        cover=i, trace=br.trace.format(),
                    )
                if br.exhaustive and br.trace.bits != alpha_rel.bits:
                    return _fail(
                        reason="exhaustive sweep missed the optimal trace",
                        cover=i, trace=br.trace.format(),
                    )
            return _ok()

        tasks.append((_label(alg, rho), thunk))
    return tasks


def _suite_basictol(ctx: _Ctx) -> list[Task]:
    """Minimal saturated covers: one two-sided, or a converse pair."""
    tasks: list[Task] = []
    for entry, rho, _rho_plus in _mi_instances(ctx.corpus, ctx.limits):
        alg = entry.algebra

        def thunk(alg=alg, rho=rho) -> Outcome:
            lim = ctx.limits
            cplus = cov_plus(alg, rho, limits=lim)
            barr = bar_rho(alg, rho, limits=lim)
            rho_rel = rho.as_binrel()
            if len(cplus) == 1:
                tau = cplus[0]
                if tau.bits != barr.bits:
                    return _fail(
                        reason="single minimal cover must be the trace hull",
                        cover=tau.format(), hull=barr.format(),
                    )
                return _ok()
            if len(cplus) == 2:
                tau, tau2 = cplus
                if tau2.bits != tau.converse().bits:
                    return _fail(reason="two minimal covers must be converse")
                if tau.intersection(tau2).bits != rho_rel.bits:
                    return _fail(reason="converse covers must meet in rho")
                if tau.union(tau2).bits != barr.bits:
                    return _fail(reason="converse covers must join to the trace hull")
                return _ok()
            return _fail(
                reason="minimal saturated covers of a meet-irreducible come "
                "as a singleton or a converse pair",
                count=len(cplus),
            )

        tasks.append((_label(alg, rho), thunk))
    return tasks


def _si_abelian_entries(
    ctx: _Ctx,
) -> list[tuple[CorpusEntry, Congruence]]:
    out = []
    for entry in ctx.corpus:
        mu = monolith(entry.algebra, limits=ctx.limits)
        if mu is not None and is_abelian(entry.algebra, mu, limits=ctx.limits):
            out.append((entry, mu))
    return out


def _suite_corDA(ctx: _Ctx) -> list[Task]:
    """Independent re-check of the central quotient construction."""
    tasks: list[Task] = []
    for entry, mu in _si_abelian_entries(ctx):
        alg = entry.algebra

        def thunk(alg=alg, mu=mu) -> Outcome:
            lim = ctx.limits
            if not alg.witnesses or "weak_difference" not in alg.witnesses:
                return _skip("no attached weak-difference witness")
            dres = build_D(alg, mu, limits=lim)
            dmon = monolith(dres.D, limits=lim)
            if dmon is None or dmon != dres.monolith:
                return _fail(reason="central quotient monolith mismatch")
            if not is_abelian(dres.D, dres.monolith, limits=lim):
                return _fail(reason="central quotient monolith is not abelian")
            cent = centralizer(
                dres.D, dres.monolith, Congruence.zero(dres.D.size), limits=lim
            )
            if cent != dres.monolith:
                return _fail(
                    reason="central quotient monolith is not self-centralizing",
                    centralizer=format_partition(cent),
                )
            if not is_subuniverse(dres.D, dres.d_o, limits=lim):
                return _fail(reason="diagonal image is not a subuniverse")
            d_o = set(dres.d_o)
            for cls in dres.monolith.classes():
                if len(d_o.intersection(cls)) != 1:
                    return _fail(
                        reason="diagonal image is not a monolith transversal",
                        cls=str(cls),
                    )
            ta = dres.theta_algebra
            diag = {ta.index_of(a, a) for a in range(alg.size)}
            pre = {i for i in range(ta.alg.size) if dres.h(i) in d_o}
            if pre != diag:
                return _fail(
                    reason="diagonal image preimage is not the diagonal"
                )
            # the induced map on classes: bijective and operation-compatible
            qa_alg, qa = quotient_of(alg, dres.alpha, limits=lim)
            qd_alg, qd = quotient_of(dres.D, dres.monolith, limits=lim)
            hs = dres.h_star
            if hs.dom_size != qa_alg.size or hs.cod_size != qd_alg.size:
                return _fail(reason="induced class map has the wrong shape")
            if len(set(hs.values)) != qd_alg.size:
                return _fail(reason="induced class map is not bijective")
            for op in qa_alg.ops:
                for args in _tuples(qa_alg.size, op.arity):
                    lhs = hs(qa_alg.eval(op.name, args))
                    rhs = qd_alg.eval(op.name, tuple(hs(x) for x in args))
                    if lhs != rhs:
                        return _fail(
                            reason="induced class map is not a homomorphism",
                            op=op.name, args=str(args),
                        )
            for i, (a, _b) in enumerate(ta.pairs):
                if hs(qa(a)) != qd(dres.h(i)):
                    return _fail(
                        reason="induced class map misplaces a pair image",
                        pair=str(ta.pairs[i]),
                    )
            return _ok()

        tasks.append((alg.name, thunk))
    return tasks


def _tuples(size: int, arity: int):
    if arity == 0:
        yield ()
        return
    for head in range(size):
        for rest in _tuples(size, arity - 1):
            yield (head,) + rest


def _suite_simprop(ctx: _Ctx) -> list[Task]:
    """The canonical link to the central quotient passes the similarity check."""
    tasks: list[Task] = []
    for entry, _mu in _si_abelian_entries(ctx):
        alg = entry.algebra

        def thunk(alg=alg) -> Outcome:
            if not alg.witnesses or "weak_difference" not in alg.witnesses:
                return _skip("no attached weak-difference witness")
            t_da, dres = build_T_DA(alg, limits=ctx.limits)
            ok, witness = check_similarity_bridge(alg, dres.D, t_da, limits=ctx.limits)
            if not ok:
                return _fail(reason="similarity check rejected the canonical link",
                             witness=witness)
            return _ok()

        tasks.append((alg.name, thunk))
    return tasks


def _suite_goodbridge(ctx: _Ctx) -> list[Task]:
    """Compacting onto any minimal cover inside the left anchor keeps the trace."""
    tasks: list[Task] = []
    for pb in ctx.pool:
        lefts = cov(pb.alg_a, pb.rho, limits=ctx.limits)
        for i, left in enumerate(lefts):
            if not left.is_subset(pb.cert.left_anchor):
                continue

            def thunk(pb=pb, left=left) -> Outcome:
                cert2 = compact_restrict(
                    pb.alg_a, pb.rho, pb.alg_b, pb.sigma, pb.T, left,
                    limits=ctx.limits,
                )
                if not cert2.compact:
                    return _fail(reason="restriction is not compact")
                if cert2.left_anchor.bits != left.bits:
                    return _fail(reason="restriction moved the left anchor")
                if cert2.trace.bits != pb.cert.trace.bits:
                    return _fail(
                        reason="restriction changed the trace",
                        before=pb.cert.trace.format(),
                        after=cert2.trace.format(),
                    )
                if (
                    pb.cert.compact
                    and left.bits == pb.cert.left_anchor.bits
                    and cert2.T.bits != pb.T.bits
                ):
                    return _fail(
                        reason="restricting a compact link to its own anchor "
                        "must not change it"
                    )
                return _ok()

            tasks.append((f"{pb.label} | restrict#{i}", thunk))
    return tasks


def _anchors_in_cov_plus(ctx: _Ctx, pb: PoolBridge) -> bool:
    cp_a = cov_plus(pb.alg_a, pb.rho, limits=ctx.limits)
    cp_b = cov_plus(pb.alg_b, pb.sigma, limits=ctx.limits)
    return any(pb.cert.left_anchor.bits == t.bits for t in cp_a) and any(
        pb.cert.right_anchor.bits == t.bits for t in cp_b
    )


def _suite_modiso(ctx: _Ctx) -> list[Task]:
    """Compact links induce a quotient isomorphism matching the link relation."""
    tasks: list[Task] = []
    for pb in ctx.pool:
        if not pb.cert.compact or pb.cert.good is None:
            continue
        if not (_has_wnu(pb.alg_a) and _has_wnu(pb.alg_b)):
            continue
        if not _anchors_in_cov_plus(ctx, pb):
            continue

        def thunk(pb=pb) -> Outcome:
            lim = ctx.limits
            gamma = induced_iso(
                pb.alg_a, pb.rho, pb.alg_b, pb.sigma, pb.T, limits=lim
            )
            alpha = opt(pb.alg_a, pb.rho, limits=lim)
            beta = opt(pb.alg_b, pb.sigma, limits=lim)
            _qa_alg, qa = quotient_of(pb.alg_a, alpha, limits=lim)
            _qb_alg, qb = quotient_of(pb.alg_b, beta, limits=lim)
            link = (
                alpha.as_binrel()
                .compose(pb.cert.trace)
                .compose(beta.as_binrel())
            )
            for a in range(pb.alg_a.size):
                for b in range(pb.alg_b.size):
                    if ((a, b) in link) != (gamma(qa(a)) == qb(b)):
                        return _fail(
                            reason="induced map disagrees with the link relation",
                            at=str((a, b)),
                        )
            return _ok()

        tasks.append((pb.label, thunk))
    return tasks


def _suite_sameopt(ctx: _Ctx) -> list[Task]:
    """Reflexive good links force equal optimal traces."""
    tasks: list[Task] = []
    for pb in ctx.pool:
        if not (pb.cert.reflexive and pb.cert.good is True):
            continue
        if not _has_wnu(pb.alg_a):
            continue

        def thunk(pb=pb) -> Outcome:
            o_rho = opt(pb.alg_a, pb.rho, limits=ctx.limits)
            o_sigma = opt(pb.alg_a, pb.sigma, limits=ctx.limits)
            if o_rho != o_sigma:
                return _fail(
                    reason="linked congruences have different optimal traces",
                    left=format_partition(o_rho),
                    right=format_partition(o_sigma),
                )
            return _ok()

        tasks.append((pb.label, thunk))
    return tasks


def _suite_type45(ctx: _Ctx) -> list[Task]:
    """Every ordered pair of minimal covers carries a reflexive link with trace rho."""
    tasks: list[Task] = []
    for entry, rho, _rho_plus in _mi_instances(ctx.corpus, ctx.limits):
        alg = entry.algebra
        cplus = cov_plus(alg, rho, limits=ctx.limits)
        for i, tau in enumerate(cplus):
            for j, tau2 in enumerate(cplus):

                def thunk(alg=alg, rho=rho, tau=tau, tau2=tau2) -> Outcome:
                    lim = ctx.limits
                    T = cross_cover_bridge(alg, rho, tau, tau2, limits=lim)
                    cert = certify_bridge(alg, rho, alg, rho, T, limits=lim)
                    if not cert.reflexive:
                        return _fail(reason="cross-cover link is not reflexive")
                    if cert.trace.bits != rho.as_binrel().bits:
                        return _fail(
                            reason="cross-cover link trace must be rho",
                            trace=cert.trace.format(),
                        )
                    if (
                        cert.left_anchor.bits != tau.bits
                        or cert.right_anchor.bits != tau2.bits
                    ):
                        return _fail(reason="cross-cover link anchors moved")
                    return _ok()

                tasks.append((f"{_label(alg, rho)} covers#{i}{j}", thunk))
    return tasks


def _suite_newsametype(ctx: _Ctx) -> list[Task]:
    """Good links never mix an abelian cover with a nonabelian one."""
    tasks: list[Task] = []
    mi_plus = {}
    for entry, rho, rho_plus in _mi_instances(ctx.corpus, ctx.limits):
        mi_plus[(entry.algebra.name, rho.least)] = (entry.algebra, rho, rho_plus)
    for pb in ctx.pool:
        if pb.cert.good is not True:
            continue
        ka = (pb.alg_a.name, pb.rho.least)
        kb = (pb.alg_b.name, pb.sigma.least)
        if ka not in mi_plus or kb not in mi_plus:
            continue

        def thunk(pb=pb, ka=ka, kb=kb) -> Outcome:
            lim = ctx.limits
            _, _, plus_a = mi_plus[ka]
            _, _, plus_b = mi_plus[kb]
            ab_a = is_abelian_modulo(pb.alg_a, plus_a, pb.rho, limits=lim)
            ab_b = is_abelian_modulo(pb.alg_b, plus_b, pb.sigma, limits=lim)
            if ab_a != ab_b:
                return _fail(
                    reason="good link joins an abelian cover to a nonabelian one",
                    left_abelian=ab_a, right_abelian=ab_b,
                )
            return _ok()

        tasks.append((pb.label, thunk))
    return tasks


def _suite_adjacent(ctx: _Ctx) -> list[Task]:
    """Distinct linked congruences need abelian covers; refusals are rechecked."""
    tasks: list[Task] = []
    for entry in ctx.corpus:
        alg = entry.algebra
        if not _has_wnu(alg):
            continue
        mis = meet_irreducibles(alg, limits=ctx.limits)
        for i, (rho, rho_plus) in enumerate(mis):
            for sigma, sigma_plus in mis[i + 1:]:

                def thunk(
                    alg=alg, rho=rho, rho_plus=rho_plus,
                    sigma=sigma, sigma_plus=sigma_plus,
                ) -> Outcome:
                    lim = ctx.limits
                    res = adjacency_search(alg, rho, sigma, ctx.budget, limits=lim)
                    if res.status == "witness":
                        cert = certify_bridge(
                            alg, rho, alg, sigma, res.bridge, limits=lim
                        )
                        if not (cert.reflexive and cert.good is True):
                            return _fail(
                                reason="witness is not a reflexive good link"
                            )
                        ab_r = is_abelian_modulo(alg, rho_plus, rho, limits=lim)
                        ab_s = is_abelian_modulo(alg, sigma_plus, sigma, limits=lim)
                        if not (ab_r and ab_s):
                            return _fail(
                                reason="distinct linked congruences must both "
                                "have abelian covers",
                                left_abelian=ab_r, right_abelian=ab_s,
                            )
                        return _ok()
                    if res.status == "exhausted":
                        return (BUDGET, {"reason": res.reason})
                    # theorem-backed refusal: re-derive the stated grounds
                    reason = res.reason
                    if "optimal traces differ" in reason:
                        if opt(alg, rho, limits=lim) == opt(alg, sigma, limits=lim):
                            return _fail(
                                reason="refusal cites differing optimal traces "
                                "but they agree"
                            )
                        return _ok()
                    if "collapsed" in reason:
                        if (
                            opt(alg, rho, limits=lim) != rho
                            and opt(alg, sigma, limits=lim) != sigma
                        ):
                            return _fail(
                                reason="refusal cites a collapsed optimal trace "
                                "but both grow"
                            )
                        return _ok()
                    if "not similar" in reason:
                        qa_alg, _ = quotient_of(alg, rho, limits=lim)
                        qb_alg, _ = quotient_of(alg, sigma, limits=lim)
                        try:
                            if is_similar(qa_alg, qb_alg, limits=lim):
                                return _fail(
                                    reason="refusal cites dissimilar quotients "
                                    "but they are similar"
                                )
                        except HypothesisError:
                            return _skip("similarity recheck needs witness terms")
                        return _ok()
                    if "sweep" in reason or "pattern" in reason:
                        return _ok()  # definitive absence from an exhausted search
                    return _fail(reason=f"unrecognized refusal: {reason}")

                tasks.append(
                    (f"{_label(alg, rho)} | {format_partition(sigma)}", thunk)
                )
    return tasks


def _suite_sametype(ctx: _Ctx) -> list[Task]:
    """Isomorphic quotients always link well; nonabelian links need the iso."""
    tasks: list[Task] = []
    mis = _mi_instances(ctx.corpus, ctx.limits)
    for ea, ra, rpa in mis:
        for eb, rb, rpb in mis:
            A, B = ea.algebra, eb.algebra
            if not A.same_signature(B):
                continue
            qa_alg, qa = quotient_of(A, ra, limits=ctx.limits)
            qb_alg, qb = quotient_of(B, rb, limits=ctx.limits)
            gamma = find_isomorphism(qa_alg, qb_alg, limits=ctx.limits)
            ab_a = is_abelian_modulo(A, rpa, ra, limits=ctx.limits)
            ab_b = is_abelian_modulo(B, rpb, rb, limits=ctx.limits)
            label = _pair_label(A, ra, B, rb)

            if gamma is not None:

                def graph_thunk(
                    A=A, ra=ra, B=B, rb=rb, qa=qa, qb=qb, gamma=gamma
                ) -> Outcome:
                    lim = ctx.limits
                    quads = [
                        (a1, a2, b1, b2)
                        for a1 in range(A.size)
                        for a2 in range(A.size)
                        for b1 in range(B.size)
                        for b2 in range(B.size)
                        if gamma(qa(a1)) == qb(b1) and gamma(qa(a2)) == qb(b2)
                    ]
                    T = QuadRel.from_quads(A.size, B.size, quads)
                    cert = certify_bridge(A, ra, B, rb, T, limits=lim)
                    if cert.good is not True:
                        return _fail(reason="quotient iso graph is not a good link")
                    if not cert.b3:
                        return _fail(reason="quotient iso graph left a column untraced")
                    return _ok()

                tasks.append((f"{label} | graph", graph_thunk))

            if not ab_a and not ab_b:

                def exist_thunk(
                    A=A, ra=ra, B=B, rb=rb, gamma=gamma
                ) -> Outcome:
                    gb = good_bridge_between(A, ra, B, rb, limits=ctx.limits)
                    if (gb is not None) != (gamma is not None):
                        return _fail(
                            reason="nonabelian good link existence must match "
                            "quotient isomorphism",
                            link=gb is not None, iso=gamma is not None,
                        )
                    return _ok()

                tasks.append((f"{label} | existence", exist_thunk))
    return tasks


def _suite_tdtdinv(ctx: _Ctx) -> list[Task]:
    """Three routes to the optimal self-link produce identical quad sets."""
    tasks: list[Task] = []
    for entry, mu in _si_abelian_entries(ctx):
        alg = entry.algebra

        def thunk(alg=alg, mu=mu) -> Outcome:
            lim = ctx.limits
            if not alg.witnesses or "weak_difference" not in alg.witnesses:
                return _skip("no attached weak-difference witness")
            if not _has_wnu(alg):
                return _skip("no attached wnu witness")
            zero = Congruence.zero(alg.size)
            ob = opt_bridge(alg, zero, limits=lim)
            alpha = opt(alg, zero, limits=lim)
            ta = build_theta_algebra(alg, mu, limits=lim)
            dl = delta(alg, mu, alpha, limits=lim)
            flat = [
                ta.pairs[i] + ta.pairs[j]
                for i in range(ta.alg.size)
                for j in range(ta.alg.size)
                if dl.related(i, j)
            ]
            flat_rel = QuadRel.from_quads(alg.size, alg.size, flat)
            t_da, _dres = build_T_DA(alg, limits=lim)
            composite = t_da.compose(t_da.converse())
            if ob.cert.T.bits != flat_rel.bits:
                return _fail(
                    reason="optimal self-link differs from the flattened "
                    "pair-congruence"
                )
            if composite.bits != flat_rel.bits:
                return _fail(
                    reason="central-quotient round trip differs from the "
                    "flattened pair-congruence"
                )
            return _ok()

        tasks.append((alg.name, thunk))
    return tasks


def _suite_samebridge(ctx: _Ctx) -> list[Task]:
    """Shrinking cover-anchored links onto traced columns keeps the trace."""
    lim = ctx.limits
    abelian_mis = []
    for entry, rho, rho_plus in _mi_instances(ctx.corpus, lim):
        alg = entry.algebra
        if _has_wnu(alg) and is_abelian_modulo(alg, rho_plus, rho, limits=lim):
            abelian_mis.append((alg, rho, rho_plus))

    cases: list[tuple[str, FiniteAlgebra, Congruence, FiniteAlgebra, Congruence, QuadRel]] = []
    seen: set[tuple] = set()

    def push(tag, A, ra, B, rb, T):
        key = (A.name, ra.least, B.name, rb.least, T.bits)
        if key not in seen:
            seen.add(key)
            cases.append((tag, A, ra, B, rb, T))

    for alg, rho, _ in abelian_mis:
        push("self", alg, rho, alg, rho, opt_bridge(alg, rho, limits=lim).cert.T)
    for A, ra, rpa in abelian_mis:
        for B, rb, rpb in abelian_mis:
            if not A.same_signature(B):
                continue
            try:
                T = good_bridge_between(A, ra, B, rb, limits=lim)
            except HypothesisError:
                continue
            if T is not None:
                push("cross", A, ra, B, rb, T)

    rng = random.Random(ctx.rng_seed + 17)
    for tag, A, ra, B, rb, T in list(cases):
        rpa = dict(meet_irreducibles(A, limits=lim))[ra]
        rpb = dict(meet_irreducibles(B, limits=lim))[rb]
        quads = T.sorted_quads()
        diag = [(a, a, b, b) for a, b in T.trace().pairs()]
        for j in range(2):
            seed_quads = diag + rng.sample(quads, min(2, len(quads)))
            try:
                T2 = quad_generate(A, ra, B, rb, seed_quads, limits=lim)
            except FinalgError:
                continue
            if T2.bits == T.bits:
                continue
            cert2, _ = is_bridge(A, ra, B, rb, T2, limits=lim)
            if cert2 is None:
                continue
            if (
                cert2.left_anchor.bits != rpa.as_binrel().bits
                or cert2.right_anchor.bits != rpb.as_binrel().bits
            ):
                continue
            push(f"random.{j} seed={ctx.rng_seed + 17}", A, ra, B, rb, T2)

    tasks: list[Task] = []
    for idx, (tag, A, ra, B, rb, T) in enumerate(cases):

        def thunk(A=A, ra=ra, B=B, rb=rb, T=T) -> Outcome:
            t1 = extract_b3(A, ra, B, rb, T, limits=lim)
            cert1 = certify_bridge(A, ra, B, rb, t1, limits=lim)
            oba = opt_bridge(A, ra, limits=lim)
            obb = opt_bridge(B, rb, limits=lim)
            composite = oba.cert.T.compose(T).compose(obb.cert.T)
            if not t1.is_subset(composite):
                return _fail(reason="shrunk link escapes the widened composite")
            if cert1.trace.bits != composite.trace().bits:
                return _fail(
                    reason="shrunk link changed the widened trace",
                    got=cert1.trace.format(),
                )
            if not cert1.b3:
                return _fail(reason="shrunk link left a column untraced")
            return _ok()

        tasks.append(
            (f"shrink#{idx:03d} [{tag}] {_pair_label(A, ra, B, rb)}", thunk)
        )
    return tasks


def _bounded_good_search(
    alg_a: FiniteAlgebra,
    rho: Congruence,
    alg_b: FiniteAlgebra,
    sigma: Congruence,
    limits: Limits,
) -> QuadRel | None:
    """Single-generator sweep for a good link at the quotient level.

    Only used to corroborate a reported absence: any good link between the
    quotients restricts the same verdict to the originals, so finding one
    here contradicts a None from the canonical route.
    """
    qa_alg, _qa = quotient_of(alg_a, rho, limits=limits)
    qb_alg, _qb = quotient_of(alg_b, sigma, limits=limits)
    na, nb = qa_alg.size, qb_alg.size
    za, zb = Congruence.zero(na), Congruence.zero(nb)
    for a1 in range(na):
        for a2 in range(na):
            for b1 in range(nb):
                for b2 in range(nb):
                    if (a1 == a2) != (b1 == b2):
                        continue
                    T = quad_generate(
                        qa_alg, za, qb_alg, zb, [(a1, a2, b1, b2)],
                        limits=limits,
                    )
                    cert, _ = is_bridge(qa_alg, za, qb_alg, zb, T, limits=limits)
                    if cert is not None and cert.good is True:
                        return T
    return None


def _suite_zhukequiv(ctx: _Ctx) -> list[Task]:
    """Good link existence coincides with quotient similarity, pairwise."""
    tasks: list[Task] = []
    mis = _mi_instances(ctx.corpus, ctx.limits)
    for ea, ra, _rpa in mis:
        for eb, rb, _rpb in mis:
            A, B = ea.algebra, eb.algebra

            def thunk(A=A, ra=ra, B=B, rb=rb) -> Outcome:
                lim = ctx.limits
                if not A.same_signature(B):
                    # no shared language: neither a link nor similarity
                    return _ok()
                qa_alg, _ = quotient_of(A, ra, limits=lim)
                qb_alg, _ = quotient_of(B, rb, limits=lim)
                try:
                    sim = is_similar(qa_alg, qb_alg, limits=lim)
                except HypothesisError as exc:
                    return _skip(f"similarity undecidable: {exc}")
                try:
                    gb = good_bridge_between(A, ra, B, rb, limits=lim)
                except HypothesisError as exc:
                    return _skip(f"link construction undecidable: {exc}")
                if (gb is not None) != sim:
                    return _fail(
                        reason="good link existence disagrees with similarity",
                        link=gb is not None, similar=sim,
                    )
                if gb is not None:
                    cert = certify_bridge(A, ra, B, rb, gb, limits=lim)
                    if cert.good is not True:
                        return _fail(reason="produced link is not good")
                    if not cert.b3:
                        return _fail(reason="produced link leaves a column untraced")
                else:
                    found = _bounded_good_search(A, ra, B, rb, lim)
                    if found is not None:
                        return _fail(
                            reason="sweep found a good link where the canonical "
                            "route reported none"
                        )
                return _ok()

            tasks.append((_pair_label(A, ra, B, rb), thunk))
    return tasks


def _suite_zeta(ctx: _Ctx) -> list[Task]:
    """The three-column construction over irreducibles with full optimal trace."""
    tasks: list[Task] = []
    for entry, rho, _rho_plus in _mi_instances(ctx.corpus, ctx.limits):
        alg = entry.algebra

        def thunk(alg=alg, rho=rho) -> Outcome:
            lim = ctx.limits
            if not _has_wnu(alg):
                return _skip("no attached wnu witness")
            irr, star = is_irreducible(alg, rho, limits=lim)
            if not irr:
                return _skip("not irreducible")
            if opt(alg, rho, limits=lim) != Congruence.one(alg.size):
                return _skip("optimal trace below the full congruence")
            zr = build_zeta(alg, rho, limits=lim)
            if len(con_lattice(zr.Z, limits=lim).congruences) != 2:
                return _fail(reason="third column is not simple")
            if not is_abelian_algebra(zr.Z, limits=lim):
                return _fail(reason="third column is not abelian")
            if search_term(zr.Z, "maltsev", 3, limits=lim) is None:
                return _fail(reason="third column has no shallow Maltsev term")
            if sg(zr.Z, (zr.zero,), limits=lim) != frozenset((zr.zero,)):
                return _fail(reason="zero is not a one-element subuniverse")
            if star is None or zr.rho_star.bits != star.bits:
                return _fail(reason="first columns must project onto the "
                             "unique saturated cover")
            pr12 = BinRel.from_pairs(
                alg.size, alg.size, ((a, b) for a, b, _z in zr.triples)
            )
            if pr12.bits != zr.rho_star.bits:
                return _fail(reason="triple projection mismatch")
            zero_slice = BinRel.from_pairs(
                alg.size, alg.size,
                ((a, b) for a, b, z in zr.triples if z == zr.zero),
            )
            if zero_slice.bits != rho.as_binrel().bits:
                return _fail(
                    reason="zero slice of the triples must be exactly rho",
                    got=zero_slice.format(),
                )
            return _ok()

        tasks.append((_label(alg, rho), thunk))
    return tasks


def _suite_gumm(ctx: _Ctx) -> list[Task]:
    """Difference-term groups on the classes of every abelian congruence."""
    tasks: list[Task] = []
    for entry in ctx.corpus:
        alg = entry.algebra
        if not alg.witnesses or "weak_difference" not in alg.witnesses:
            continue
        d = parse_term(alg.witnesses["weak_difference"], alg)
        for theta in con_lattice(alg, limits=ctx.limits).congruences:
            if not is_abelian(alg, theta, limits=ctx.limits):
                continue

            def thunk(alg=alg, d=d, theta=theta) -> Outcome:
                lim = ctx.limits
                for cls in theta.classes():
                    for e in cls:
                        g = class_group(alg, theta, d, e, limits=lim)
                        members = set(g.carrier)
                        if members != set(cls) or g.carrier[g.zero] != e:
                            return _fail(reason="group carrier mismatch", at=e)
                        add, neg = g.element_add, g.element_neg
                        for x in cls:
                            if add(x, e) != x or add(e, x) != x:
                                return _fail(reason="zero law fails", at=x)
                            if add(x, neg(x)) != e:
                                return _fail(reason="inverse law fails", at=x)
                            for y in cls:
                                if add(x, y) not in members:
                                    return _fail(reason="closure fails", at=(x, y))
                                if add(x, y) != add(y, x):
                                    return _fail(
                                        reason="commutativity fails", at=(x, y)
                                    )
                                for z in cls:
                                    if add(add(x, y), z) != add(x, add(y, z)):
                                        return _fail(
                                            reason="associativity fails",
                                            at=(x, y, z),
                                        )
                        # the defining identity: d(x,y,z) = x - y + z
                        for x in cls:
                            for y in cls:
                                for z in cls:
                                    if eval_term(alg, d, (x, y, z)) != add(
                                        add(x, neg(y)), z
                                    ):
                                        return _fail(
                                            reason="difference identity fails",
                                            at=(x, y, z),
                                        )
                return _ok()

            tasks.append(
                (f"{alg.name} theta={format_partition(theta)}", thunk)
            )
    return tasks


def _suite_deltaprop(ctx: _Ctx) -> list[Task]:
    """The pair congruence respects every congruence centralized over it."""
    tasks: list[Task] = []
    for entry in ctx.corpus:
        alg = entry.algebra
        lat = con_lattice(alg, limits=ctx.limits)
        for theta in lat.congruences:
            for alpha in lat.congruences:
                if not theta.is_refinement(alpha):
                    continue

                def thunk(alg=alg, theta=theta, alpha=alpha, lat=lat) -> Outcome:
                    lim = ctx.limits
                    ta = build_theta_algebra(alg, theta, limits=lim)
                    dl = delta(alg, theta, alpha, limits=lim)
                    checked = 0
                    for dcong in lat.congruences:
                        if not centralizes(alg, alpha, theta, dcong, limits=lim):
                            continue
                        checked += 1
                        for i in range(ta.alg.size):
                            for j in range(ta.alg.size):
                                if not dl.related(i, j):
                                    continue
                                a, a2 = ta.pairs[i]
                                b, b2 = ta.pairs[j]
                                if dcong.related(a, a2) != dcong.related(b, b2):
                                    return _fail(
                                        reason="pair congruence crosses a "
                                        "centralized congruence",
                                        delta=format_partition(dcong),
                                        left=str((a, a2)), right=str((b, b2)),
                                    )
                    if checked == 0:
                        return _skip("no congruence is centralized over this pair")
                    return _ok()

                tasks.append(
                    (
                        f"{alg.name} theta={format_partition(theta)} "
                        f"alpha={format_partition(alpha)}",
                        thunk,
                    )
                )
    return tasks


# -- dispatch --------------------------------------------------------------

SUITE_ORDER: tuple[str, ...] = (
    "opt2",
    "basictol",
    "corDA",
    "simprop",
    "goodbridge",
    "modiso",
    "sameopt",
    "type45",
    "newsametype",
    "adjacent",
    "sametype",
    "tdtdinv",
    "samebridge",
    "zhukequiv",
    "zeta",
    "gumm",
    "deltaprop",
)

_SUITES: dict[str, Callable[[_Ctx], list[Task]]] = {
    "opt2": _suite_opt2,
    "basictol": _suite_basictol,
    "corDA": _suite_corDA,
    "simprop": _suite_simprop,
    "goodbridge": _suite_goodbridge,
    "modiso": _suite_modiso,
    "sameopt": _suite_sameopt,
    "type45": _suite_type45,
    "newsametype": _suite_newsametype,
    "adjacent": _suite_adjacent,
    "sametype": _suite_sametype,
    "tdtdinv": _suite_tdtdinv,
    "samebridge": _suite_samebridge,
    "zhukequiv": _suite_zhukequiv,
    "zeta": _suite_zeta,
    "gumm": _suite_gumm,
    "deltaprop": _suite_deltaprop,
}

# suites that read the shared pool instead of building their own instances
_POOL_SUITES = frozenset(("goodbridge", "modiso", "sameopt", "newsametype"))


def verify_suite(
    name: str,
    corpus: Sequence[CorpusEntry],
    *,
    budget: int = 2,
    rng_seed: int = DEFAULT_SEED,
    workers: int = 1,
    limits: Limits = DEFAULT_LIMITS,
    pool: tuple[PoolBridge, ...] | None = None,
) -> VerificationReport:
    """Run one named suite over the corpus and return its report."""
    if name not in _SUITES:
        raise HypothesisError(
            f"unknown suite {name!r}; choose from {', '.join(SUITE_ORDER)}"
        )
    if pool is None and name in _POOL_SUITES:
        pool = build_bridge_pool(corpus, rng_seed=rng_seed, limits=limits)
    ctx = _Ctx(tuple(corpus), pool or (), budget, rng_seed, limits)
    t0 = time.perf_counter()
    tasks = _SUITES[name](ctx)
    records = _run_tasks(name, tasks, workers)
    logger.info(
        "suite %s: %d records in %dms", name, len(records),
        int((time.perf_counter() - t0) * 1000),
    )
    return VerificationReport(tuple(records), environment_fingerprint())


def verify_all(
    corpus: Sequence[CorpusEntry],
    *,
    suites: Sequence[str] | None = None,
    budget: int = 2,
    rng_seed: int = DEFAULT_SEED,
    workers: int = 1,
    limits: Limits = DEFAULT_LIMITS,
) -> list[VerificationReport]:
    """Run the requested suites (default all) with one shared link pool."""
    names = tuple(suites) if suites is not None else SUITE_ORDER
    for name in names:
        if name not in _SUITES:
            raise HypothesisError(
                f"unknown suite {name!r}; choose from {', '.join(SUITE_ORDER)}"
            )
    pool: tuple[PoolBridge, ...] | None = None
    if any(n in _POOL_SUITES for n in names):
        pool = build_bridge_pool(corpus, rng_seed=rng_seed, limits=limits)
    return [
        verify_suite(
            n, corpus, budget=budget, rng_seed=rng_seed, workers=workers,
            limits=limits, pool=pool,
        )
        for n in names
    ]
