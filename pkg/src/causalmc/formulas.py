"""Formula AST for the modal language with interventions and separation.

Concrete syntax (produced by ``pretty`` and read by the DSL parser):

    true false p[comp=behaviour] name
    ! f      [] f      <> f      []+ f      <>+ f      <name> f      <?> f
    (f & g)  (f | g)  (f -> g)  ((f) * (g))
"""

from __future__ import annotations

from dataclasses import dataclass


class Formula:
    """Base class; all nodes are frozen dataclasses."""

    def __str__(self) -> str:
        return pretty(self)


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bot(Formula):
    pass


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class BehaviourAtom(Formula):
    component: str
    behaviour: str


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Box(Formula):
    sub: Formula


@dataclass(frozen=True)
class Diamond(Formula):
    sub: Formula


@dataclass(frozen=True)
class BoxPlus(Formula):
    sub: Formula


@dataclass(frozen=True)
class DiamondPlus(Formula):
    sub: Formula


@dataclass(frozen=True)
class Intervene(Formula):
    """After applying the named intervention and taking one step, the body holds."""

    name: str
    sub: Formula


@dataclass(frozen=True)
class InterveneExists(Formula):
    """Some declared intervention, applied with one step, makes the body hold."""

    sub: Formula


@dataclass(frozen=True)
class Star(Formula):
    """Separating conjunction across an interface-admitting split."""

    left: Formula
    right: Formula


TRUE = Top()
FALSE = Bot()


def conj(parts) -> Formula:
    parts = list(parts)
    if not parts:
        return TRUE
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(parts) -> Formula:
    parts = list(parts)
    if not parts:
        return FALSE
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def chi(config) -> Formula:
    """Characteristic formula: holds exactly at ``config``."""
    return conj(BehaviourAtom(c, b) for c, b in config.pairs)


def pretty(phi: Formula) -> str:
    if isinstance(phi, Top):
        return "true"
    if isinstance(phi, Bot):
        return "false"
    if isinstance(phi, Atom):
        return phi.name
    if isinstance(phi, BehaviourAtom):
        return f"p[{phi.component}={phi.behaviour}]"
    if isinstance(phi, Not):
        return f"! {pretty(phi.sub)}"
    if isinstance(phi, And):
        return f"({pretty(phi.left)} & {pretty(phi.right)})"
    if isinstance(phi, Or):
        return f"({pretty(phi.left)} | {pretty(phi.right)})"
    if isinstance(phi, Implies):
        return f"({pretty(phi.left)} -> {pretty(phi.right)})"
    if isinstance(phi, Box):
        return f"[] {pretty(phi.sub)}"
    if isinstance(phi, Diamond):
        return f"<> {pretty(phi.sub)}"
    if isinstance(phi, BoxPlus):
        return f"[]+ {pretty(phi.sub)}"
    if isinstance(phi, DiamondPlus):
        return f"<>+ {pretty(phi.sub)}"
    if isinstance(phi, Intervene):
        return f"<{phi.name}> {pretty(phi.sub)}"
    if isinstance(phi, InterveneExists):
        return f"<?> {pretty(phi.sub)}"
    if isinstance(phi, Star):
        return f"(({pretty(phi.left)}) * ({pretty(phi.right)}))"
    raise TypeError(f"not a formula: {phi!r}")


def modal_depth(phi: Formula) -> int:
    if isinstance(phi, (Top, Bot, Atom, BehaviourAtom)):
        return 0
    if isinstance(phi, Not):
        return modal_depth(phi.sub)
    if isinstance(phi, (And, Or, Implies, Star)):
        return max(modal_depth(phi.left), modal_depth(phi.right))
    if isinstance(phi, (Box, Diamond, BoxPlus, DiamondPlus, Intervene, InterveneExists)):
        return 1 + modal_depth(phi.sub)
    raise TypeError(f"not a formula: {phi!r}")


def size(phi: Formula) -> int:
    if isinstance(phi, (Top, Bot, Atom, BehaviourAtom)):
        return 1
    if isinstance(phi, (Not, Box, Diamond, BoxPlus, DiamondPlus, Intervene, InterveneExists)):
        return 1 + size(phi.sub)
    if isinstance(phi, (And, Or, Implies, Star)):
        return 1 + size(phi.left) + size(phi.right)
    raise TypeError(f"not a formula: {phi!r}")


def is_star_free(phi: Formula) -> bool:
    if isinstance(phi, Star):
        return False
    if isinstance(phi, (Top, Bot, Atom, BehaviourAtom)):
        return True
    if isinstance(phi, (Not, Box, Diamond, BoxPlus, DiamondPlus, Intervene, InterveneExists)):
        return is_star_free(phi.sub)
    if isinstance(phi, (And, Or, Implies)):
        return is_star_free(phi.left) and is_star_free(phi.right)
    raise TypeError(f"not a formula: {phi!r}")


def canonical_key(phi: Formula):
    """Deterministic ordering key: depth first, then size, then text."""
    return (modal_depth(phi), size(phi), pretty(phi))
