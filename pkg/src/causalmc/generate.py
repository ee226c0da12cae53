"""Random model generation for agreement sweeps and metatheory tests."""

from __future__ import annotations

import random
from dataclasses import replace

from .model import (
    AtomDecl,
    ComponentDecl,
    Configuration,
    Intervention,
    RuleRow,
    RuleTable,
    SystemModel,
    constant_table,
)


def random_system_model(
    rng: random.Random,
    max_components: int = 3,
    max_behaviours: int = 3,
    max_rows: int = 4,
    n_atoms: int = 3,
    n_interventions: int = 1,
    acyclic_contexts: bool = False,
) -> SystemModel:
    n = rng.randint(1, max_components)
    comps: list[ComponentDecl] = []
    names = [f"c{i}" for i in range(n)]
    domains = {
        name: tuple(f"{name}b{j}" for j in range(rng.randint(1, max_behaviours))) for name in names
    }
    for i, name in enumerate(names):
        pool = names[:i] if acyclic_contexts else [m for m in names if m != name]
        k = rng.randint(0, len(pool))
        context = tuple(sorted(rng.sample(pool, k)))
        rows = []
        for _ in range(rng.randint(0, max_rows)):
            own = rng.choice((None,) + domains[name])
            ctx = tuple(rng.choice((None,) + domains[d]) for d in context)
            rows.append(RuleRow(own=own, context=ctx, output=rng.choice(domains[name])))
        comps.append(
            ComponentDecl(name=name, domain=domains[name], context=context, rule=RuleTable(tuple(rows)))
        )
    atoms = []
    for j in range(rng.randint(1, n_atoms)):
        comp = rng.choice(names)
        atoms.append(
            AtomDecl(name=f"p{j}", component=comp, behaviour=rng.choice(domains[comp]))
        )
    interventions = []
    for j in range(rng.randint(0, n_interventions)):
        target = rng.choice(comps)
        interventions.append(
            Intervention(
                name=f"theta{j}",
                targets=(target.name,),
                rules=((target.name, constant_table(len(target.context), rng.choice(target.domain))),),
                cost=float(rng.randint(1, 9)),
                penalty=float(rng.randint(0, 5)),
            )
        )
    return SystemModel(
        components=tuple(comps), atoms=tuple(atoms), interventions=tuple(interventions)
    )


def random_configuration(rng: random.Random, model: SystemModel) -> Configuration:
    return Configuration(tuple((c.name, rng.choice(c.domain)) for c in model.components))


def rename_component_behaviours(model: SystemModel, component: str, suffix: str = "_r") -> tuple:
    """Model with one component's behaviours bijectively renamed, plus the mapping.

    Rule rows, atoms, and intervention tables referencing the renamed
    behaviours are rewritten; atom names stay fixed, so the renamed model
    shares the original's vocabulary.
    """
    target = model.component(component)
    mapping = {b: b + suffix for b in target.domain}

    def map_own(comp: ComponentDecl, value):
        if value is None:
            return None
        return mapping.get(value, value) if comp.name == component else value

    def map_ctx(comp: ComponentDecl, i, value):
        if value is None:
            return None
        return mapping.get(value, value) if comp.context[i] == component else value

    comps = []
    for c in model.components:
        domain = tuple(mapping[b] for b in c.domain) if c.name == component else c.domain
        rows = tuple(
            RuleRow(
                own=map_own(c, r.own),
                context=tuple(map_ctx(c, i, v) for i, v in enumerate(r.context)),
                output=mapping[r.output] if c.name == component else r.output,
            )
            for r in c.rule.rows
        )
        comps.append(replace(c, domain=domain, rule=RuleTable(rows)))
    atoms = tuple(
        replace(a, behaviour=mapping.get(a.behaviour, a.behaviour))
        if a.is_predicate and a.component == component
        else a
        for a in model.atoms
    )
    ivs = []
    for iv in model.interventions:
        tables = []
        for t, table in iv.rules:
            decl = model.component(t)
            rows = tuple(
                RuleRow(
                    own=map_own(decl, r.own),
                    context=tuple(map_ctx(decl, i, v) for i, v in enumerate(r.context)),
                    output=mapping[r.output] if t == component else r.output,
                )
                for r in table.rows
            )
            tables.append((t, RuleTable(rows)))
        ivs.append(replace(iv, rules=tuple(tables)))
    renamed = SystemModel(
        components=tuple(comps), atoms=atoms, interventions=tuple(ivs), mode=model.mode
    )

    def rename_config(f: Configuration) -> Configuration:
        return Configuration(
            tuple((c, mapping[b] if c == component else b) for c, b in f.pairs)
        )

    return renamed, rename_config


def perturb_model(rng: random.Random, model: SystemModel) -> SystemModel:
    """A structurally changed copy: one rule row output redirected, or a row
    dropped or appended.  The vocabulary is untouched."""
    candidates = [c for c in model.components if len(c.domain) > 1]
    if not candidates:
        return model
    target = rng.choice(candidates)
    rows = list(target.rule.rows)
    action = rng.choice(("redirect", "drop", "append")) if rows else "append"
    if action == "redirect":
        i = rng.randrange(len(rows))
        row = rows[i]
        alternatives = [b for b in target.domain if b != row.output]
        rows[i] = replace(row, output=rng.choice(alternatives))
    elif action == "drop":
        rows.pop(rng.randrange(len(rows)))
    else:
        own = rng.choice((None,) + target.domain)
        ctx = tuple(rng.choice((None,) + model.behaviours(d)) for d in target.context)
        rows.append(RuleRow(own=own, context=ctx, output=rng.choice(target.domain)))
    comps = tuple(
        replace(c, rule=RuleTable(tuple(rows))) if c.name == target.name else c
        for c in model.components
    )
    return replace(model, components=comps)
