"""Actual-cause search with counterfactual certificates, causal chains, and
intervention effect classification.

A candidate cause of an observed outcome is a component subset judged by
three clauses:

AC1 (actuality).  Some transition path leads from the start configuration
to the end configuration along which every candidate component, once it
first reaches its end-state behaviour, keeps it for the rest of the path,
and at least one effect component updates somewhere along the path: the
effect must be realized by the run, not merely stand from the start (a
standing condition has no cause in the episode, and no counterfactual
replay could ever refute it).  Strict mode additionally requires the
candidate components to carry the same behaviour in the start and end
configurations.

AC2 (counterfactual dependence).  Two conditions.  First, a raw but-for
contrast: some deviation of the candidate components away from their
end-state behaviours, applied to the start configuration with nothing
clamped, makes the effect unreachable; without such a contrast the effect
does not depend on the candidate through any mechanism at all.  Second, a
witness set W exists such that for every deviation of the candidate
components outside W, the effect can no longer be produced: components of
W are clamped to their end-state behaviours immediately and stably, the
deviating components are set to the deviated behaviours, the remaining
components resume from the start configuration, and no configuration
reachable from that counterfactual start satisfies the effect formula.
A witness qualifies only if at least one deviation exists, so components
with nowhere to deviate to never certify vacuously.

AC3 (minimality).  No proper subset of the candidate passes AC1 and AC2.

Certificates carry replayable evidence for all three clauses.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product

from .model import (
    DEFAULT_OPTIONS,
    Configuration,
    Intervention,
    ModelError,
    Options,
    SystemModel,
    apply_intervention,
    clamping_intervention,
    reachable,
    successors,
)


@dataclass(frozen=True)
class CauseQuery:
    """Start and end configurations plus the effect components.

    The effect formula is the conjunction of component=behaviour atoms
    pinning each effect component to its end-state behaviour; it is always
    derived from ``end``, never stored separately.
    """

    start: Configuration
    end: Configuration
    effect_components: tuple[str, ...]

    def effect_values(self) -> dict[str, str]:
        return {c: self.end[c] for c in self.effect_components}


@dataclass(frozen=True)
class DeviationCheck:
    """Evidence for one counterfactual deviation under a witness set."""

    deviation: tuple[tuple[str, str], ...]
    start: Configuration
    ok: bool
    counterexample: Configuration | None = None


@dataclass(frozen=True)
class SubsetRefutation:
    subset: tuple[str, ...]
    failed_clause: str


@dataclass(frozen=True)
class CauseCertificate:
    cause_set: tuple[str, ...]
    witness_set: tuple[str, ...] | None
    clamp: Intervention | None
    ac1: bool
    ac2: bool
    ac3: bool
    mode: str
    ac1_path: tuple[Configuration, ...] | None = None
    contrast_deviation: tuple[tuple[str, str], ...] | None = None
    ac2_checks: tuple[DeviationCheck, ...] = ()
    ac3_refutations: tuple[SubsetRefutation, ...] = ()

    @property
    def is_cause(self) -> bool:
        return self.ac1 and self.ac2 and self.ac3

    def to_dict(self) -> dict:
        return {
            "cause_set": list(self.cause_set),
            "witness_set": list(self.witness_set) if self.witness_set is not None else None,
            "clamp": self.clamp.name if self.clamp else None,
            "ac1": self.ac1,
            "ac2": self.ac2,
            "ac3": self.ac3,
            "mode": self.mode,
            "contrast_deviation": dict(self.contrast_deviation) if self.contrast_deviation else None,
            "ac1_path": [g.as_dict() for g in self.ac1_path] if self.ac1_path else None,
            "ac2_checks": [
                {
                    "deviation": dict(c.deviation),
                    "start": c.start.as_dict(),
                    "ok": c.ok,
                    "counterexample": c.counterexample.as_dict() if c.counterexample else None,
                }
                for c in self.ac2_checks
            ],
            "ac3_refutations": [
                {"subset": list(r.subset), "failed_clause": r.failed_clause}
                for r in self.ac3_refutations
            ],
        }


# ---------------------------------------------------------------------------
# clause checks


def _satisfies_effect(g: Configuration, effect: dict[str, str]) -> bool:
    return all(g[c] == b for c, b in effect.items())


def _ac1(model, q: CauseQuery, cause, mode, options):
    """Path search over hold-admissible edges.

    An edge is admissible when no candidate component abandons its
    end-state behaviour after having reached it; reaching the end
    configuration through admissible edges realises the
    hold-from-first-attainment requirement.  The search runs over
    (configuration, effect-realized) pairs so that the found path always
    contains an effect-component update.
    """
    if mode == "strict" and any(q.start[c] != q.end[c] for c in cause):
        return False, None
    end_vals = {c: q.end[c] for c in cause}
    effect = set(q.effect_components)

    def admissible(f: Configuration, g: Configuration) -> bool:
        return all(g[c] == b for c, b in end_vals.items() if f[c] == b)

    def touches_effect(f: Configuration, g: Configuration) -> bool:
        return any(f[c] != g[c] for c in effect)

    parent: dict = {}
    queue: list = []

    def push(state, prev):
        if state not in parent:
            parent[state] = prev
            queue.append(state)

    for g in successors(model, q.start, options):
        if admissible(q.start, g):
            push((g, touches_effect(q.start, g)), None)
    i = 0
    while i < len(queue):
        state = queue[i]
        f, got_effect = state
        i += 1
        if f == q.end and got_effect:
            path = [f]
            cursor = state
            while parent[cursor] is not None:
                cursor = parent[cursor]
                path.append(cursor[0])
            path.append(q.start)
            return True, tuple(reversed(path))
        if len(parent) > 2 * options.max_states:
            raise ModelError("AC1 path search exceeded the state cap")
        for g in successors(model, f, options):
            if admissible(f, g):
                push((g, got_effect or touches_effect(f, g)), state)
    return False, None


def _deviations(model, q: CauseQuery, free: tuple[str, ...]):
    """Assignments to the non-witness candidate components with at least one
    component off its end-state behaviour."""
    domains = [model.behaviours(c) for c in free]
    for combo in product(*domains):
        if any(v != q.end[c] for c, v in zip(free, combo)):
            yield tuple(zip(free, combo))


def _ac2_for_witness(model, q, cause, witness, options):
    """All-deviations check for one witness set; returns (ok, evidence, clamp)."""
    free = tuple(c for c in cause if c not in witness)
    devs = list(_deviations(model, q, free))
    if not devs:
        return False, (), None
    clamp = None
    checked_model = model
    if witness:
        clamp = clamping_intervention(model, witness, {w: q.end[w] for w in witness})
        checked_model = apply_intervention(model, clamp)
    effect = q.effect_values()
    pinned = set(witness) | set(free)
    evidence = []
    ok = True
    for dev in devs:
        assignment = {c: q.start[c] for c in model.component_order if c not in pinned}
        assignment.update({w: q.end[w] for w in witness})
        assignment.update(dict(dev))
        start = model.configuration(assignment)
        counterexample = _first_effect_reachable(checked_model, start, effect, options)
        hit = counterexample is None
        evidence.append(
            DeviationCheck(deviation=dev, start=start, ok=hit, counterexample=counterexample)
        )
        if not hit:
            ok = False
            break
    return ok, tuple(evidence), clamp


def _first_effect_reachable(model, start, effect, options) -> Configuration | None:
    """First configuration strictly reachable from ``start`` satisfying the effect."""
    visited = {start}
    queue = list(successors(model, start, options))
    for g in queue:
        visited.add(g)
    i = 0
    while i < len(queue):
        g = queue[i]
        i += 1
        if _satisfies_effect(g, effect):
            return g
        if len(visited) > options.max_states:
            raise ModelError("counterfactual reachability exceeded the state cap")
        for h in successors(model, g, options):
            if h not in visited:
                visited.add(h)
                queue.append(h)
    return None


def _witness_candidates(model, cause):
    # witnesses are disjoint from the candidate, mirroring the clamp-versus-
    # deviate partition of the counterfactual test
    names = [n for n in model.component_order if n not in set(cause)]
    for k in range(len(names) + 1):
        for combo in combinations(names, k):
            yield combo


def _raw_contrast(model, q, cause, options):
    """First deviation of the whole candidate that, from the unclamped start
    configuration, neither satisfies nor ever reaches the effect."""
    effect = q.effect_values()
    for dev in _deviations(model, q, cause):
        assignment = {c: q.start[c] for c in model.component_order}
        assignment.update(dict(dev))
        start = model.configuration(assignment)
        if _satisfies_effect(start, effect):
            continue
        if _first_effect_reachable(model, start, effect, options) is None:
            return dev
    return None


def _ac2(model, q, cause, options):
    contrast = _raw_contrast(model, q, cause, options)
    if contrast is None:
        return False, None, None, (), None
    for witness in _witness_candidates(model, cause):
        ok, evidence, clamp = _ac2_for_witness(model, q, cause, witness, options)
        if ok:
            return True, witness, clamp, evidence, contrast
    return False, None, None, (), contrast


def check_cause(
    model: SystemModel,
    q: CauseQuery,
    cause,
    mode: str = "example",
    options: Options = DEFAULT_OPTIONS,
    _memo: dict | None = None,
) -> CauseCertificate:
    """Certificate for one candidate cause, with all three clause verdicts.

    ``mode`` is "example" (default) or "strict"; strict adds the literal
    start-equals-end requirement to AC1.
    """
    cause = tuple(dict.fromkeys(cause))
    if not cause:
        raise ModelError("empty candidate cause set")
    for c in cause:
        model.component(c)
    model.validate_configuration(q.start)
    model.validate_configuration(q.end)
    if mode not in ("example", "strict"):
        raise ModelError(f"unknown cause-check mode {mode!r}")

    memo = _memo if _memo is not None else {}

    def core(subset):
        key = tuple(sorted(subset))
        if key in memo:
            return memo[key]
        ok1, path = _ac1(model, q, subset, mode, options)
        if not ok1:
            memo[key] = (False, None, False, None, None, (), None)
            return memo[key]
        ok2, witness, clamp, evidence, contrast = _ac2(model, q, subset, options)
        memo[key] = (True, path, ok2, witness, clamp, evidence, contrast)
        return memo[key]

    ac1, path, ac2, witness, clamp, evidence, contrast = core(cause)
    refutations: list[SubsetRefutation] = []
    ac3 = True
    if ac1 and ac2:
        for k in range(1, len(cause)):
            for sub in combinations(cause, k):
                s1, _, s2, _, _, _, _ = core(sub)
                if s1 and s2:
                    ac3 = False
                    refutations.append(SubsetRefutation(subset=sub, failed_clause="none"))
                else:
                    refutations.append(
                        SubsetRefutation(subset=sub, failed_clause="AC1" if not s1 else "AC2")
                    )
    return CauseCertificate(
        cause_set=cause,
        witness_set=witness,
        clamp=clamp,
        ac1=ac1,
        ac2=ac2,
        ac3=ac3,
        mode=mode,
        ac1_path=path,
        contrast_deviation=contrast,
        ac2_checks=evidence,
        ac3_refutations=tuple(refutations),
    )


def find_causes(
    model: SystemModel,
    q: CauseQuery,
    mode: str = "example",
    options: Options = DEFAULT_OPTIONS,
) -> list[CauseCertificate]:
    """All inclusion-minimal certified causes, in canonical order.

    Candidates range over components disjoint from the effect: a component
    of the effect would witness counterfactual dependence of the effect on
    itself, which certifies nothing.
    """
    model.validate_configuration(q.start)
    model.validate_configuration(q.end)
    effect = set(q.effect_components)
    names = tuple(n for n in model.component_order if n not in effect)
    memo: dict = {}
    certified: list[CauseCertificate] = []

    def has_certified_subset(cand) -> bool:
        cs = set(cand)
        return any(set(c.cause_set) < cs for c in certified)

    for k in range(1, len(names) + 1):
        for combo in combinations(range(len(names)), k):
            cand = tuple(names[i] for i in combo)
            if has_certified_subset(cand):
                continue
            cert = check_cause(model, q, cand, mode=mode, options=options, _memo=memo)
            if cert.is_cause:
                certified.append(cert)
    return certified


# ---------------------------------------------------------------------------
# causal chains and projections


@dataclass(frozen=True)
class ChainLink:
    effect_components: tuple[str, ...]
    certificate: CauseCertificate


@dataclass(frozen=True)
class CausalChain:
    """Waypoint sequence where every consecutive pair is causally certified
    and no waypoint can be dropped without breaking certification."""

    configurations: tuple[Configuration, ...]
    links: tuple[ChainLink, ...]

    def to_dict(self) -> dict:
        return {
            "configurations": [g.as_dict() for g in self.configurations],
            "links": [
                {"effect_components": list(l.effect_components), "certificate": l.certificate.to_dict()}
                for l in self.links
            ],
        }


@dataclass(frozen=True)
class CausalProjection:
    configurations: tuple[Configuration, ...]
    edges: tuple[tuple[Configuration, Configuration], ...]
    atom_restriction: tuple[tuple[str, tuple[Configuration, ...]], ...]
    acyclic: bool

    def to_dict(self) -> dict:
        return {
            "configurations": [g.as_dict() for g in self.configurations],
            "edges": [[a.as_dict(), b.as_dict()] for a, b in self.edges],
            "atoms": {name: [g.as_dict() for g in ext] for name, ext in self.atom_restriction},
            "acyclic": self.acyclic,
        }

    def to_dot(self) -> str:
        idx = {g: i for i, g in enumerate(self.configurations)}
        lines = ["digraph causal_projection {"]
        for g, i in idx.items():
            label = str(g).replace('"', "'")
            lines.append(f'  n{i} [label="{label}"];')
        for a, b in self.edges:
            lines.append(f"  n{idx[a]} -> n{idx[b]};")
        lines.append("}")
        return "\n".join(lines)


def _changed_components(a: Configuration, b: Configuration) -> tuple[str, ...]:
    return tuple(c for c in a.components if a[c] != b[c])


def _in_transitive_closure(model, a, b, options) -> bool:
    return b in reachable(model, a, options)


def _certify_link(model, a, b, effect_components, mode, options) -> CauseCertificate | None:
    """First (canonically smallest) certified cause of b from a, or None."""
    if a == b or not _in_transitive_closure(model, a, b, options):
        return None
    effect = effect_components or _changed_components(a, b)
    if not effect:
        return None
    q = CauseQuery(start=a, end=b, effect_components=tuple(effect))
    names = tuple(n for n in model.component_order if n not in set(effect))
    memo: dict = {}
    for k in range(1, len(names) + 1):
        for combo in combinations(range(len(names)), k):
            cand = tuple(names[i] for i in combo)
            cert = check_cause(model, q, cand, mode=mode, options=options, _memo=memo)
            if cert.is_cause:
                return cert
    return None


def find_causal_chains(
    model: SystemModel,
    f_start: Configuration,
    f_end: Configuration,
    max_len: int = 4,
    effect_components=None,
    mode: str = "example",
    options: Options = DEFAULT_OPTIONS,
) -> list[CausalChain]:
    """All minimal certified chains from f_start to f_end with at most max_len waypoints.

    The explicit effect components, when given, apply to the final link;
    interior links use the components changed across the link.  Chains with
    equal endpoints are empty by definition (at least two distinct
    waypoints are required).
    """
    if max_len < 2:
        raise ModelError("max_len must be at least 2")
    model.validate_configuration(f_start)
    model.validate_configuration(f_end)
    if f_start == f_end:
        return []
    effect_components = tuple(effect_components) if effect_components else None

    link_cache: dict[tuple[Configuration, Configuration, bool], CauseCertificate | None] = {}

    def link(a, b, final: bool):
        key = (a, b, final and effect_components is not None)
        if key not in link_cache:
            eff = effect_components if (final and effect_components is not None) else None
            link_cache[key] = _certify_link(model, a, b, eff, mode, options)
        return link_cache[key]

    def is_chain(seq) -> bool:
        return all(
            link(seq[i], seq[i + 1], i == len(seq) - 2) is not None for i in range(len(seq) - 1)
        )

    def minimal(seq) -> bool:
        for i in range(1, len(seq) - 1):
            if is_chain(seq[:i] + seq[i + 1 :]):
                return False
        return True

    forward = reachable(model, f_start, options)
    if f_end not in set(forward):
        return []

    out: list[CausalChain] = []
    # waypoint middles must sit between the endpoints in the closure
    middles = [g for g in forward if g not in (f_start, f_end)]
    middles = [g for g in middles if f_end in set(reachable(model, g, options))]

    def emit(seq):
        links = tuple(
            ChainLink(
                effect_components=(
                    effect_components
                    if (i == len(seq) - 2 and effect_components is not None)
                    else _changed_components(seq[i], seq[i + 1])
                ),
                certificate=link(seq[i], seq[i + 1], i == len(seq) - 2),
            )
            for i in range(len(seq) - 1)
        )
        out.append(CausalChain(configurations=tuple(seq), links=links))

    for n in range(2, max_len + 1):
        if n == 2:
            seq = (f_start, f_end)
            if is_chain(seq):
                emit(seq)
            continue
        for interior in product(middles, repeat=n - 2):
            if len(set(interior)) != len(interior):
                continue
            seq = (f_start,) + interior + (f_end,)
            if is_chain(seq) and minimal(seq):
                emit(seq)
    return out


def causal_projection(
    model: SystemModel, chains, options: Options = DEFAULT_OPTIONS
) -> CausalProjection:
    """Restriction of the model to configurations on the given chains."""
    configs: dict[Configuration, None] = {}
    for chain in chains:
        for g in chain.configurations:
            configs[g] = None
    ordered = tuple(configs)
    members = set(ordered)
    edges = []
    for g in ordered:
        for h in successors(model, g, options):
            if h in members:
                edges.append((g, h))
    atoms = tuple(
        (a.name, tuple(g for g in ordered if a.holds(g))) for a in model.atoms
    )
    return CausalProjection(
        configurations=ordered,
        edges=tuple(edges),
        atom_restriction=atoms,
        acyclic=_is_acyclic(ordered, edges),
    )


def _is_acyclic(nodes, edges) -> bool:
    adj: dict = {n: [] for n in nodes}
    for a, b in edges:
        adj[a].append(b)
    WHITE, GREY, BLACK = 0, 1, 2
    colour = {n: WHITE for n in nodes}

    def visit(n) -> bool:
        colour[n] = GREY
        for m in adj[n]:
            if colour[m] == GREY:
                return False
            if colour[m] == WHITE and not visit(m):
                return False
        colour[n] = BLACK
        return True

    return all(colour[n] != WHITE or visit(n) for n in nodes)


# ---------------------------------------------------------------------------
# intervention effect on chains


@dataclass(frozen=True)
class ChainClassification:
    verdict: str  # preserved | disrupted | indeterminate
    detail: str
    link_causes: tuple[tuple[str, ...], ...]
    recertified: tuple[CauseCertificate, ...] = ()
    broken_link: int | None = None

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "detail": self.detail,
            "link_causes": [list(c) for c in self.link_causes],
            "recertified": [c.to_dict() for c in self.recertified],
            "broken_link": self.broken_link,
        }


def classify_intervention_effect(
    model: SystemModel,
    chain: CausalChain,
    iv: Intervention,
    mode: str = "example",
    options: Options = DEFAULT_OPTIONS,
) -> ChainClassification:
    """Preserved, disrupted, or indeterminate fate of a chain under an intervention.

    The per-link cause set is the union of all minimal causes of the link;
    preserved requires no overlap with the targets plus full
    re-certification in the intervened model, disrupted requires an
    overlapping link whose closure transition disappears, and anything in
    between is reported as indeterminate rather than guessed.
    """
    seq = chain.configurations
    for g in seq:
        model.validate_configuration(g)
    link_cause_union: list[tuple[str, ...]] = []
    for i in range(len(seq) - 1):
        q = CauseQuery(seq[i], seq[i + 1], chain.links[i].effect_components)
        union: dict[str, None] = {}
        for cert in find_causes(model, q, mode=mode, options=options):
            for c in cert.cause_set:
                union[c] = None
        link_cause_union.append(tuple(union))
    targets = set(iv.targets)
    overlaps = [i for i, u in enumerate(link_cause_union) if targets & set(u)]
    intervened = apply_intervention(model, iv)

    if not overlaps:
        recerts = []
        for i in range(len(seq) - 1):
            if seq[i + 1] not in set(reachable(intervened, seq[i], options)):
                return ChainClassification(
                    verdict="indeterminate",
                    detail=f"no cause overlap, but link {i} is no longer realizable after {iv.name}",
                    link_causes=tuple(link_cause_union),
                    broken_link=i,
                )
            cert = _certify_link(
                intervened, seq[i], seq[i + 1], chain.links[i].effect_components, mode, options
            )
            if cert is None:
                return ChainClassification(
                    verdict="indeterminate",
                    detail=f"no cause overlap, but link {i} fails to re-certify after {iv.name}",
                    link_causes=tuple(link_cause_union),
                    broken_link=i,
                )
            recerts.append(cert)
        return ChainClassification(
            verdict="preserved",
            detail=f"no link cause overlaps targets of {iv.name}; chain re-certified",
            link_causes=tuple(link_cause_union),
            recertified=tuple(recerts),
        )

    for i in overlaps:
        if seq[i + 1] not in set(reachable(intervened, seq[i], options)):
            return ChainClassification(
                verdict="disrupted",
                detail=f"link {i} overlaps targets of {iv.name} and is invalidated",
                link_causes=tuple(link_cause_union),
                broken_link=i,
            )
    return ChainClassification(
        verdict="indeterminate",
        detail=f"targets of {iv.name} overlap link causes but every link transition survives",
        link_causes=tuple(link_cause_union),
    )
