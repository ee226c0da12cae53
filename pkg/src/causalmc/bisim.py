"""Bisimulation under intervention, decided by colour refinement.

The state space is the product of model variants (reachable by applying
declared interventions in any sequence) and configurations.  Moves are
labelled: a plain transition step, or a named intervention followed by one
step in the intervened variant, mirroring the step semantics of the named
intervention modality.  Two pointed models are bisimilar when the greatest
fixpoint of the refinement relates their roots: equal declared-atom
valuations, and matching moves per label in both directions.

On failure the checker produces a star-free distinguishing formula in the
Hennessy-Milner style, preferring minimal modal depth with canonical tie
breaks, satisfied by the left point and refuted by the right.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import formulas as F
from .model import (
    DEFAULT_OPTIONS,
    CapExceeded,
    Configuration,
    ModelError,
    Options,
    SystemModel,
    apply_intervention,
    successors,
)

STEP = "step"


class VocabularyMismatch(ModelError):
    """The two models disagree on atom names or declared intervention names."""


@dataclass(frozen=True)
class PointedModel:
    model: SystemModel
    point: Configuration

    def __post_init__(self):
        self.model.validate_configuration(self.point)


@dataclass(frozen=True)
class VariantGraph:
    """Model variants reachable through declared interventions.

    Node 0 is the original model; edges are labelled with intervention
    names and deduplicated by canonical serialization, so the graph is
    finite whenever the declared set is.
    """

    models: tuple[SystemModel, ...]
    edges: tuple[tuple[int, str, int], ...]

    @property
    def root(self) -> int:
        return 0

    def edge_map(self) -> dict[tuple[int, str], int]:
        return {(a, name): b for a, name, b in self.edges}

    def to_dot(self) -> str:
        lines = ["digraph variants {"]
        for i in range(len(self.models)):
            label = "original" if i == 0 else f"variant {i}"
            lines.append(f'  v{i} [label="{label}"];')
        for a, name, b in self.edges:
            lines.append(f'  v{a} -> v{b} [label="{name}"];')
        lines.append("}")
        return "\n".join(lines)


def intervention_closure(model: SystemModel, cap: int = 4096) -> VariantGraph:
    """All variants reachable by applying declared interventions in sequence."""
    names = [iv.name for iv in model.interventions]
    models = [model]
    index = {model.canonical_json(): 0}
    edges: list[tuple[int, str, int]] = []
    frontier = [0]
    while frontier:
        nxt: list[int] = []
        for i in frontier:
            for name in names:
                iv = models[i].intervention_map[name]
                variant = apply_intervention(models[i], iv)
                key = variant.canonical_json()
                j = index.get(key)
                if j is None:
                    if len(models) >= cap:
                        raise CapExceeded(cap, len(models) + 1, "intervention closure")
                    j = len(models)
                    index[key] = j
                    models.append(variant)
                    nxt.append(j)
                edges.append((i, name, j))
        frontier = nxt
    return VariantGraph(models=tuple(models), edges=tuple(edges))


@dataclass(frozen=True)
class BisimRelation:
    """Pairs of (variant index, configuration) states related across the two sides."""

    pairs: tuple[tuple[tuple[int, Configuration], tuple[int, Configuration]], ...]

    def __contains__(self, pair) -> bool:
        return pair in set(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class BisimResult:
    bisimilar: bool
    relation: BisimRelation | None
    distinguishing: F.Formula | None
    left_states: int
    right_states: int


class _Lts:
    """Reachable labelled transition system over (variant, configuration) states."""

    def __init__(self, model: SystemModel, point: Configuration, labels, options: Options):
        self.graph = intervention_closure(model)
        edge_map = self.graph.edge_map()
        self.labels = labels
        self.root = (self.graph.root, point)
        self.moves: dict[tuple[int, Configuration], dict[str, list]] = {}
        atom_names = sorted(model.atom_map)
        self.atoms: dict[tuple[int, Configuration], tuple[bool, ...]] = {}
        frontier = [self.root]
        seen = {self.root}
        while frontier:
            state = frontier.pop()
            variant, f = state
            m = self.graph.models[variant]
            self.atoms[state] = tuple(m.atom_map[a].holds(f) for a in atom_names)
            row: dict[str, list] = {}
            row[STEP] = [(variant, g) for g in successors(m, f, options)]
            for name in labels:
                if name == STEP:
                    continue
                tgt = edge_map[(variant, name)]
                row[name] = [(tgt, g) for g in successors(self.graph.models[tgt], f, options)]
            self.moves[state] = row
            for dests in row.values():
                for s in dests:
                    if s not in seen:
                        seen.add(s)
                        frontier.append(s)
            if len(seen) > options.max_states:
                raise CapExceeded(options.max_states, len(seen), "bisimulation state space")
        self.states = list(self.moves)


def check_bisim(
    a: PointedModel, b: PointedModel, options: Options = DEFAULT_OPTIONS
) -> BisimResult:
    """Relation when the pointed models are bisimilar, otherwise a star-free
    distinguishing formula (left satisfies it, right does not)."""
    left_atoms = sorted(a.model.atom_map)
    right_atoms = sorted(b.model.atom_map)
    if left_atoms != right_atoms:
        raise VocabularyMismatch(
            f"atom vocabularies differ: {left_atoms} vs {right_atoms}"
        )
    left_ivs = sorted(a.model.intervention_map)
    right_ivs = sorted(b.model.intervention_map)
    if left_ivs != right_ivs:
        raise VocabularyMismatch(
            f"declared intervention names differ: {left_ivs} vs {right_ivs}"
        )
    labels = [STEP] + left_ivs
    lts_a = _Lts(a.model, a.point, labels, options)
    lts_b = _Lts(b.model, b.point, labels, options)

    # joint colour refinement; colours compare structurally across both sides
    colour: dict = {}
    for lts in (lts_a, lts_b):
        for s in lts.states:
            colour[(id(lts), s)] = lts.atoms[s]
    history = [dict(colour)]
    while True:
        fresh: dict = {}
        for lts in (lts_a, lts_b):
            for s in lts.states:
                fresh[(id(lts), s)] = (
                    colour[(id(lts), s)],
                    tuple(
                        frozenset(colour[(id(lts), t)] for t in lts.moves[s][l]) for l in labels
                    ),
                )
        if _partition_stable(colour, fresh):
            break
        colour = fresh
        history.append(dict(colour))

    root_a = (id(lts_a), lts_a.root)
    root_b = (id(lts_b), lts_b.root)
    if colour[root_a] == colour[root_b]:
        pairs = tuple(
            (sa, sb)
            for sa in lts_a.states
            for sb in lts_b.states
            if colour[(id(lts_a), sa)] == colour[(id(lts_b), sb)]
        )
        return BisimResult(
            bisimilar=True,
            relation=BisimRelation(pairs=pairs),
            distinguishing=None,
            left_states=len(lts_a.states),
            right_states=len(lts_b.states),
        )
    phi = _distinguish(lts_a, lts_b, history, labels, sorted(a.model.atom_map))
    return BisimResult(
        bisimilar=False,
        relation=None,
        distinguishing=phi,
        left_states=len(lts_a.states),
        right_states=len(lts_b.states),
    )


def _partition_stable(old: dict, new: dict) -> bool:
    by_old: dict = {}
    for k, c in old.items():
        by_old.setdefault(c, set()).add(k)
    by_new: dict = {}
    for k, c in new.items():
        by_new.setdefault(c, set()).add(k)
    return {frozenset(v) for v in by_old.values()} == {frozenset(v) for v in by_new.values()}


def _distinguish(lts_a, lts_b, history, labels, atom_names) -> F.Formula:
    """Minimal-depth distinguishing formula from the refinement history."""

    def level(sa, sb) -> int | None:
        for k, col in enumerate(history):
            if col[(id(lts_a), sa)] != col[(id(lts_b), sb)]:
                return k
        return None

    def build(sa, sb, k) -> F.Formula:
        # invariant: colours of sa and sb differ at level k, agree below
        if k == 0:
            va, vb = lts_a.atoms[sa], lts_b.atoms[sb]
            for name, xa, xb in zip(atom_names, va, vb):
                if xa != xb:
                    return F.Atom(name) if xa else F.Not(F.Atom(name))
            raise ModelError("refinement produced no atomic difference at level 0")
        col = history[k - 1]
        for label in labels:
            moves_a = lts_a.moves[sa][label]
            moves_b = lts_b.moves[sb][label]
            cols_a = {col[(id(lts_a), t)] for t in moves_a}
            cols_b = {col[(id(lts_b), t)] for t in moves_b}
            extra_a = cols_a - cols_b
            if extra_a:
                ta = _pick(moves_a, lts_a, col, extra_a)
                parts = []
                for tb in moves_b:
                    kk = level(ta, tb)
                    parts.append(build(ta, tb, kk))
                return _wrap(label, F.conj(_dedup(parts)))
            extra_b = cols_b - cols_a
            if extra_b:
                tb = _pick(moves_b, lts_b, col, extra_b)
                parts = []
                for ta in moves_a:
                    kk = _mirror_level(history, lts_a, lts_b, ta, tb)
                    parts.append(_mirror_build(build, ta, tb, kk))
                return F.Not(_wrap(label, F.conj(_dedup(parts))))
        raise ModelError("refinement split a pair without a divergent move")

    def _mirror_level(history, lts_a, lts_b, ta, tb):
        for k, col in enumerate(history):
            if col[(id(lts_a), ta)] != col[(id(lts_b), tb)]:
                return k
        return None

    def _mirror_build(build, ta, tb, k):
        # formula true on the right successor, false on the left: negate
        # the left-oriented distinction
        return F.Not(build(ta, tb, k))

    k = level(lts_a.root, lts_b.root)
    return build(lts_a.root, lts_b.root, k)


def _pick(moves, lts, col, wanted_colours):
    for t in moves:
        if col[(id(lts), t)] in wanted_colours:
            return t
    raise ModelError("internal: no successor of the recorded colour")


def _dedup(parts):
    seen = set()
    out = []
    for p in parts:
        key = F.pretty(p)
        if key not in seen:
            seen.add(key)
            out.append(p)
    out.sort(key=F.canonical_key)
    return out


def _wrap(label: str, body: F.Formula) -> F.Formula:
    if label == STEP:
        return F.Diamond(body)
    return F.Intervene(label, body)


# ---------------------------------------------------------------------------
# formula suite used by the metatheory tests


def generate_formula_suite(
    atom_names, intervention_names, depth: int = 3, include_star: bool = True
) -> list[F.Formula]:
    """Canonical finite suite of formulas up to the given modal depth.

    Literals over the shared atoms, all modal prefixes applied levelwise,
    capped pairwise conjunctions and disjunctions at each level, and
    separating conjunctions of literal pairs when requested.
    """
    atoms = sorted(atom_names)
    ivs = sorted(intervention_names)
    level: list[F.Formula] = []
    for a in atoms:
        level.append(F.Atom(a))
        level.append(F.Not(F.Atom(a)))
    suite: list[F.Formula] = list(level)
    if include_star:
        for a in atoms:
            for b in atoms:
                suite.append(F.Star(F.Atom(a), F.Atom(b)))
    for _ in range(depth):
        nxt: list[F.Formula] = []
        for phi in level:
            nxt.append(F.Diamond(phi))
            nxt.append(F.Box(phi))
            for name in ivs:
                nxt.append(F.Intervene(name, phi))
        # closure modalities and booleans are sampled rather than closed over,
        # to keep the suite finite and quick
        for phi in level[:4]:
            nxt.append(F.DiamondPlus(phi))
            nxt.append(F.BoxPlus(phi))
            if ivs:
                nxt.append(F.InterveneExists(phi))
        for i in range(0, len(level) - 1, 2):
            nxt.append(F.And(level[i], level[i + 1]))
            nxt.append(F.Or(level[i], level[i + 1]))
        suite.extend(nxt)
        level = nxt
    return suite
