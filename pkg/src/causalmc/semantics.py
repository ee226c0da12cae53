"""Satisfaction relation over pointed (possibly partial) system models.

The classical clauses are standard.  The modal clauses quantify over the
one-step transition relation (box, diamond) or its transitive closure
(the plus variants, strict: the current configuration counts only when it
lies on a cycle).  The named intervention modality applies the declared
intervention and then takes exactly one step in the intervened model.  The
existential intervention modality ranges over the model's declared
intervention set only.  The separating conjunction searches proper
interface splits in canonical order and reports the first witnessing
split.

On a partial model, a behaviour atom whose component is outside the
partial domain evaluates to false rather than raising; this keeps
separation queries total.
"""

from __future__ import annotations

from itertools import product

from . import formulas as F
from .model import (
    DEFAULT_OPTIONS,
    CapExceeded,
    Configuration,
    InterfaceSplit,
    Options,
    PartialConfiguration,
    SystemModel,
    UnknownNameError,
    apply_intervention,
    check_interface,
    conjugate_decompose,
    reachable,
    successors,
)


def evaluate(
    model: SystemModel,
    f,
    phi: F.Formula,
    options: Options = DEFAULT_OPTIONS,
    witnesses: list | None = None,
) -> bool:
    """Whether the pointed model (model, f) satisfies ``phi``.

    ``witnesses``, when given, collects evidence entries for every
    satisfied intervention or separation subformula: the chosen successor
    for a named intervention, the chosen name for the existential form,
    and the witnessing split for a separating conjunction.
    """
    if isinstance(f, PartialConfiguration):
        f = model.configuration(f.as_dict())
    else:
        model.validate_configuration(f)
    return _eval(model, f, phi, options, witnesses)


def _atom_holds(model: SystemModel, f: Configuration, name: str) -> bool:
    decl = model.atom_map.get(name)
    if decl is None:
        raise UnknownNameError(f"unresolved atom {name!r}")
    return decl.holds(f)


def _behaviour_atom_holds(model: SystemModel, f: Configuration, comp: str, beh: str) -> bool:
    if comp not in model.component_map:
        if model.partial:
            return False
        raise UnknownNameError(f"unresolved atom p[{comp}={beh}]")
    return f[comp] == beh


def _eval(model, f, phi, options, witnesses) -> bool:
    if isinstance(phi, F.Top):
        return True
    if isinstance(phi, F.Bot):
        return False
    if isinstance(phi, F.Atom):
        return _atom_holds(model, f, phi.name)
    if isinstance(phi, F.BehaviourAtom):
        return _behaviour_atom_holds(model, f, phi.component, phi.behaviour)
    if isinstance(phi, F.Not):
        return not _eval(model, f, phi.sub, options, witnesses)
    if isinstance(phi, F.And):
        return _eval(model, f, phi.left, options, witnesses) and _eval(
            model, f, phi.right, options, witnesses
        )
    if isinstance(phi, F.Or):
        return _eval(model, f, phi.left, options, witnesses) or _eval(
            model, f, phi.right, options, witnesses
        )
    if isinstance(phi, F.Implies):
        return (not _eval(model, f, phi.left, options, witnesses)) or _eval(
            model, f, phi.right, options, witnesses
        )
    if isinstance(phi, F.Box):
        return all(_eval(model, g, phi.sub, options, witnesses) for g in successors(model, f, options))
    if isinstance(phi, F.Diamond):
        return any(_eval(model, g, phi.sub, options, witnesses) for g in successors(model, f, options))
    if isinstance(phi, F.BoxPlus):
        return all(_eval(model, g, phi.sub, options, witnesses) for g in reachable(model, f, options))
    if isinstance(phi, F.DiamondPlus):
        return any(_eval(model, g, phi.sub, options, witnesses) for g in reachable(model, f, options))
    if isinstance(phi, F.Intervene):
        iv = model.intervention_map.get(phi.name)
        if iv is None:
            raise UnknownNameError(f"unresolved intervention name {phi.name!r}")
        intervened = apply_intervention(model, iv)
        for g in successors(intervened, f, options):
            if _eval(intervened, g, phi.sub, options, witnesses):
                if witnesses is not None:
                    witnesses.append(
                        {"op": "intervention", "name": phi.name, "successor": g.as_dict()}
                    )
                return True
        return False
    if isinstance(phi, F.InterveneExists):
        for iv in model.interventions:
            if _eval(model, f, F.Intervene(iv.name, phi.sub), options, witnesses):
                if witnesses is not None:
                    witnesses.append({"op": "exists-intervention", "name": iv.name})
                return True
        return False
    if isinstance(phi, F.Star):
        for split in candidate_splits(model, options):
            left_m, right_m = conjugate_decompose(model, split)
            lf = _project(left_m, f, split.left)
            rf = _project(right_m, f, split.right)
            if _eval(left_m, lf, phi.left, options, witnesses) and _eval(
                right_m, rf, phi.right, options, witnesses
            ):
                if witnesses is not None:
                    witnesses.append(
                        {"op": "star", "left": list(split.left), "right": list(split.right)}
                    )
                return True
        return False
    raise TypeError(f"not a formula: {phi!r}")


def _project(side_model: SystemModel, f: Configuration, side) -> Configuration:
    side_set = set(side)
    return Configuration(tuple(p for p in f.pairs if p[0] in side_set))


def candidate_splits(model: SystemModel, options: Options = DEFAULT_OPTIONS):
    """Valid interface splits in canonical order.

    Each component is placed left, right, or on both sides; placements are
    enumerated in declaration order.  Non-proper covers are admitted only
    under the trivial-split flag.
    """
    names = model.component_order
    out: list[InterfaceSplit] = []
    for placement in product(("L", "R", "B"), repeat=len(names)):
        left = tuple(n for n, p in zip(names, placement) if p in ("L", "B"))
        right = tuple(n for n, p in zip(names, placement) if p in ("R", "B"))
        if not left or not right:
            continue
        split = check_interface(model, left, right, allow_trivial=options.allow_trivial_split)
        if split is not None:
            out.append(split)
    return out


def sat_set(
    model: SystemModel, phi: F.Formula, options: Options = DEFAULT_OPTIONS
) -> list[Configuration]:
    """All configurations satisfying ``phi``, enumerated from the domain product."""
    total = model.configuration_count()
    if total > options.max_states:
        raise CapExceeded(options.max_states, total, "configuration space")
    return [f for f in model.enumerate_configurations(options) if _eval(model, f, phi, options, None)]
