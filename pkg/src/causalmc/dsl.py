"""Model description language: parser, document model, canonical printer.

A document declares, in any order after the optional mode line:

    async | sync
    component NAME { domain B1 B2 ...
                     context C1 C2 ...
                     rule OWN (P1, P2, ...) -> OUT ... }
    atom NAME = COMPONENT = BEHAVIOUR
    atom NAME = { CONFIGNAME ... }
    config NAME = (C1=B1, C2=B2, ...)
    intervention NAME on T1 T2 ... { cost N penalty N
                                     rule TARGET: OWN (P...) -> OUT ... }
    formula NAME = FORMULA

and query stanzas:

    check CONFIG |= FORMULA
    cause from CONFIG to CONFIG effect { C1 C2 ... }
    chain from CONFIG to CONFIG [effect { ... }] [maxlen N]
    decompose { C1 C2 ... } { C3 C4 ... }
    bisim CONFIG vs "path/to/other.model" CONFIG
    recover CONFIG avoiding FORMULA
    mincost CONFIG avoiding FORMULA
    utility CONFIG avoiding FORMULA

Rule patterns are behaviours or the wildcard `_`; unmatched inputs keep the
current behaviour (identity default).  `#` starts a comment.  Formula
syntax is documented in the formulas module; operands of `*` must be
parenthesized.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from . import formulas as F
from .model import (
    AtomDecl,
    ComponentDecl,
    Configuration,
    Intervention,
    RuleRow,
    RuleTable,
    SystemModel,
    validate_model,
)


@dataclass(frozen=True)
class Diagnostic:
    line: int
    column: int
    message: str

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.message}"


class DslError(Exception):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


# ---------------------------------------------------------------------------
# query stanzas


@dataclass(frozen=True)
class CheckStanza:
    config_label: str
    config: Configuration
    formula: F.Formula

    def echo(self) -> str:
        return f"check {self.config_label} |= {F.pretty(self.formula)}"


@dataclass(frozen=True)
class CauseStanza:
    start_label: str
    start: Configuration
    end_label: str
    end: Configuration
    effect: tuple[str, ...]

    def echo(self) -> str:
        return f"cause from {self.start_label} to {self.end_label} effect {{{' '.join(self.effect)}}}"


@dataclass(frozen=True)
class ChainStanza:
    start_label: str
    start: Configuration
    end_label: str
    end: Configuration
    effect: tuple[str, ...] | None = None
    max_len: int | None = None

    def echo(self) -> str:
        parts = [f"chain from {self.start_label} to {self.end_label}"]
        if self.effect is not None:
            parts.append(f"effect {{{' '.join(self.effect)}}}")
        if self.max_len is not None:
            parts.append(f"maxlen {self.max_len}")
        return " ".join(parts)


@dataclass(frozen=True)
class DecomposeStanza:
    left: tuple[str, ...]
    right: tuple[str, ...]

    def echo(self) -> str:
        return f"decompose {{{' '.join(self.left)}}} {{{' '.join(self.right)}}}"


@dataclass(frozen=True)
class BisimStanza:
    config_label: str
    config: Configuration
    other_path: str
    other_config_label: str

    def echo(self) -> str:
        return f'bisim {self.config_label} vs "{self.other_path}" {self.other_config_label}'


@dataclass(frozen=True)
class RecoverStanza:
    config_label: str
    config: Configuration
    formula: F.Formula

    def echo(self) -> str:
        return f"recover {self.config_label} avoiding {F.pretty(self.formula)}"


@dataclass(frozen=True)
class MinCostStanza:
    config_label: str
    config: Configuration
    formula: F.Formula

    def echo(self) -> str:
        return f"mincost {self.config_label} avoiding {F.pretty(self.formula)}"


@dataclass(frozen=True)
class UtilityStanza:
    config_label: str
    config: Configuration
    formula: F.Formula

    def echo(self) -> str:
        return f"utility {self.config_label} avoiding {F.pretty(self.formula)}"


QueryStanza = (
    CheckStanza
    | CauseStanza
    | ChainStanza
    | DecomposeStanza
    | BisimStanza
    | RecoverStanza
    | MinCostStanza
    | UtilityStanza
)


@dataclass(frozen=True)
class ModelDocument:
    model: SystemModel
    configurations: tuple[tuple[str, Configuration], ...]
    formulas: tuple[tuple[str, F.Formula], ...]
    queries: tuple = ()
    path: str | None = field(default=None, compare=False)

    def configuration(self, name: str) -> Configuration:
        for n, f in self.configurations:
            if n == name:
                return f
        raise DslError([Diagnostic(0, 0, f"unknown configuration {name!r}")])

    def formula(self, name: str) -> F.Formula:
        for n, phi in self.formulas:
            if n == name:
                return phi
        raise DslError([Diagnostic(0, 0, f"unknown formula {name!r}")])


# ---------------------------------------------------------------------------
# tokenizer

_FIXED = ("[]+", "<>+", "<?>", "->", "|=", "[]", "<>")
_PUNCT = "{}()=,:*&|!<>[]"
_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NUM_RE = re.compile(r"\d+(\.\d+)?")


@dataclass(frozen=True)
class Token:
    kind: str  # name | number | string | punct | eof
    value: str
    line: int
    column: int


def _tokenize(text: str) -> list[Token]:
    out: list[Token] = []
    line, col, i = 1, 1, 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        matched = False
        for fix in _FIXED:
            if text.startswith(fix, i):
                out.append(Token("punct", fix, line, col))
                i += len(fix)
                col += len(fix)
                matched = True
                break
        if matched:
            continue
        if ch == '"':
            j = text.find('"', i + 1)
            if j < 0:
                raise DslError([Diagnostic(line, col, "unterminated string")])
            out.append(Token("string", text[i + 1 : j], line, col))
            col += j - i + 1
            i = j + 1
            continue
        m = _NAME_RE.match(text, i)
        if m:
            out.append(Token("name", m.group(), line, col))
            col += len(m.group())
            i = m.end()
            continue
        m = _NUM_RE.match(text, i)
        if m:
            out.append(Token("number", m.group(), line, col))
            col += len(m.group())
            i = m.end()
            continue
        if ch in _PUNCT:
            out.append(Token("punct", ch, line, col))
            i += 1
            col += 1
            continue
        raise DslError([Diagnostic(line, col, f"unexpected character {ch!r}")])
    out.append(Token("eof", "", line, col))
    return out


# ---------------------------------------------------------------------------
# parser

_QUERY_HEADS = ("check", "cause", "chain", "decompose", "bisim", "recover", "mincost", "utility")


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        t = self.tokens[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.peek()
        raise DslError([Diagnostic(tok.line, tok.column, message)])

    def expect_punct(self, value: str) -> Token:
        t = self.peek()
        if t.kind != "punct" or t.value != value:
            self.error(f"expected {value!r}, found {t.value or 'end of input'!r}")
        return self.next()

    def expect_name(self, what: str = "name") -> Token:
        t = self.peek()
        if t.kind != "name":
            self.error(f"expected {what}, found {t.value or 'end of input'!r}")
        return self.next()

    def expect_number(self, what: str = "number") -> Token:
        t = self.peek()
        if t.kind != "number":
            self.error(f"expected {what}, found {t.value or 'end of input'!r}")
        return self.next()

    def at_name(self, value: str) -> bool:
        t = self.peek()
        return t.kind == "name" and t.value == value

    def eat_name(self, value: str) -> bool:
        if self.at_name(value):
            self.next()
            return True
        return False

    # ---- formulas -----------------------------------------------------

    def parse_formula(self) -> F.Formula:
        return self._implies()

    def _implies(self) -> F.Formula:
        left = self._or()
        if self.peek().kind == "punct" and self.peek().value == "->":
            self.next()
            return F.Implies(left, self._implies())
        return left

    def _or(self) -> F.Formula:
        out = self._and()
        while self.peek().kind == "punct" and self.peek().value == "|":
            self.next()
            out = F.Or(out, self._and())
        return out

    def _and(self) -> F.Formula:
        out = self._unary()
        while self.peek().kind == "punct" and self.peek().value == "&":
            self.next()
            out = F.And(out, self._unary())
        return out

    def _unary(self) -> F.Formula:
        t = self.peek()
        if t.kind == "punct":
            if t.value == "!":
                self.next()
                return F.Not(self._unary())
            if t.value == "[]":
                self.next()
                return F.Box(self._unary())
            if t.value == "<>":
                self.next()
                return F.Diamond(self._unary())
            if t.value == "[]+":
                self.next()
                return F.BoxPlus(self._unary())
            if t.value == "<>+":
                self.next()
                return F.DiamondPlus(self._unary())
            if t.value == "<?>":
                self.next()
                return F.InterveneExists(self._unary())
            if t.value == "<":
                self.next()
                name = self.expect_name("intervention name").value
                self.expect_punct(">")
                return F.Intervene(name, self._unary())
        return self._postfix()

    def _postfix(self) -> F.Formula:
        t = self.peek()
        parenthesized = t.kind == "punct" and t.value == "("
        out = self._primary()
        while self.peek().kind == "punct" and self.peek().value == "*":
            if not parenthesized:
                self.error("operands of '*' must be parenthesized")
            self.next()
            self.expect_punct("(")
            right = self.parse_formula()
            self.expect_punct(")")
            out = F.Star(out, right)
        return out

    def _primary(self) -> F.Formula:
        t = self.peek()
        if t.kind == "punct" and t.value == "(":
            self.next()
            out = self.parse_formula()
            self.expect_punct(")")
            return out
        if t.kind == "name":
            if t.value == "true":
                self.next()
                return F.TRUE
            if t.value == "false":
                self.next()
                return F.FALSE
            nxt = self.tokens[self.pos + 1]
            if t.value == "p" and nxt.kind == "punct" and nxt.value == "[":
                self.next()  # p
                self.next()  # [
                comp = self.expect_name("component name").value
                self.expect_punct("=")
                beh = self.expect_name("behaviour name").value
                self.expect_punct("]")
                return F.BehaviourAtom(comp, beh)
            self.next()
            return F.Atom(t.value)
        self.error(f"expected a formula, found {t.value or 'end of input'!r}")

    # ---- shared pieces -------------------------------------------------

    def parse_name_list(self, stop_values) -> list[str]:
        names: list[str] = []
        while True:
            t = self.peek()
            if t.kind == "punct" and t.value == ",":
                self.next()
                continue
            if t.kind != "name" or t.value in stop_values:
                break
            names.append(self.next().value)
        return names


# ---------------------------------------------------------------------------
# document parsing


def parse_model(text: str, path: str | None = None) -> ModelDocument:
    """Parse and validate a model document; raises DslError with diagnostics."""
    p = _Parser(text)
    mode = "async"
    components: list[ComponentDecl] = []
    atoms_raw: list[tuple[Token, str, object]] = []
    configs_raw: list[tuple[Token, str, list[tuple[str, str]]]] = []
    interventions_raw: list = []
    formulas_raw: list[tuple[Token, str, F.Formula]] = []
    queries_raw: list[tuple[Token, object]] = []

    while p.peek().kind != "eof":
        t = p.peek()
        if t.kind != "name":
            p.error(f"expected a declaration or query, found {t.value!r}")
        head = t.value
        if head in ("async", "sync"):
            p.next()
            mode = head
        elif head == "component":
            components.append(_parse_component(p))
        elif head == "atom":
            atoms_raw.append(_parse_atom(p))
        elif head == "config":
            configs_raw.append(_parse_config_decl(p))
        elif head == "intervention":
            interventions_raw.append(_parse_intervention(p))
        elif head == "formula":
            tok = p.next()
            name = p.expect_name("formula name").value
            p.expect_punct("=")
            formulas_raw.append((tok, name, p.parse_formula()))
        elif head in _QUERY_HEADS:
            queries_raw.append((t, _parse_query_stanza(p)))
        else:
            p.error(f"unknown declaration {head!r}")

    diags: list[Diagnostic] = []
    if not components:
        diags.append(Diagnostic(1, 1, "no components declared"))
        raise DslError(diags)

    comp_names = {c.name for c in components}

    # configurations
    configurations: list[tuple[str, Configuration]] = []
    config_map: dict[str, Configuration] = {}
    order = [c.name for c in components]
    for tok, name, pairs in configs_raw:
        if name in config_map:
            diags.append(Diagnostic(tok.line, tok.column, f"duplicate configuration name {name!r}"))
            continue
        mapping = dict(pairs)
        missing = [c for c in order if c not in mapping]
        extra = [c for c, _ in pairs if c not in comp_names]
        if missing or extra:
            msg = []
            if missing:
                msg.append(f"missing components {missing}")
            if extra:
                msg.append(f"unknown components {extra}")
            diags.append(Diagnostic(tok.line, tok.column, f"configuration {name!r}: " + ", ".join(msg)))
            continue
        f = Configuration(tuple((c, mapping[c]) for c in order))
        config_map[name] = f
        configurations.append((name, f))

    # atoms
    atoms: list[AtomDecl] = []
    atom_names: set[str] = set()
    for tok, name, body in atoms_raw:
        if name in atom_names:
            diags.append(Diagnostic(tok.line, tok.column, f"duplicate atom name {name!r}"))
            continue
        atom_names.add(name)
        if isinstance(body, tuple):
            comp, beh = body
            atoms.append(AtomDecl(name=name, component=comp, behaviour=beh))
        else:
            ext = []
            for ref in body:
                if ref not in config_map:
                    diags.append(Diagnostic(tok.line, tok.column, f"atom {name!r}: unknown configuration {ref!r}"))
                else:
                    ext.append(config_map[ref])
            atoms.append(AtomDecl(name=name, extension=tuple(ext)))

    # interventions
    interventions: list[Intervention] = []
    for tok, name, targets, cost, penalty, rules in interventions_raw:
        tables: dict[str, list[RuleRow]] = {t: [] for t in targets}
        for rtok, target, row in rules:
            if target not in tables:
                diags.append(
                    Diagnostic(rtok.line, rtok.column, f"intervention {name!r}: rule for non-target {target!r}")
                )
                continue
            tables[target].append(row)
        interventions.append(
            Intervention(
                name=name,
                targets=tuple(targets),
                rules=tuple((t, RuleTable(tuple(rows))) for t, rows in tables.items()),
                cost=cost,
                penalty=penalty,
            )
        )

    model = SystemModel(
        components=tuple(components),
        atoms=tuple(atoms),
        interventions=tuple(interventions),
        mode=mode,
    )
    for v in validate_model(model):
        diags.append(Diagnostic(0, 0, str(v)))
    if diags:
        raise DslError(diags)

    # named formulas resolve against atoms and earlier formulas
    formula_map: dict[str, F.Formula] = {}
    formulas: list[tuple[str, F.Formula]] = []
    for tok, name, phi in formulas_raw:
        if name in formula_map or name in atom_names:
            diags.append(Diagnostic(tok.line, tok.column, f"duplicate formula name {name!r}"))
            continue
        try:
            resolved = _resolve_formula(phi, formula_map, model)
        except DslError as exc:
            diags.extend(
                Diagnostic(tok.line, tok.column, d.message) for d in exc.diagnostics
            )
            continue
        formula_map[name] = resolved
        formulas.append((name, resolved))
    if diags:
        raise DslError(diags)

    doc = ModelDocument(
        model=model,
        configurations=tuple(configurations),
        formulas=tuple(formulas),
        queries=(),
        path=path,
    )
    queries = []
    for tok, raw in queries_raw:
        try:
            queries.append(_resolve_query(raw, doc, formula_map))
        except DslError as exc:
            diags.extend(Diagnostic(tok.line, tok.column, d.message) for d in exc.diagnostics)
    if diags:
        raise DslError(diags)
    return ModelDocument(
        model=model,
        configurations=tuple(configurations),
        formulas=tuple(formulas),
        queries=tuple(queries),
        path=path,
    )


def _parse_component(p: _Parser) -> ComponentDecl:
    p.next()  # component
    name = p.expect_name("component name").value
    p.expect_punct("{")
    domain: list[str] = []
    context: list[str] = []
    rows: list[RuleRow] = []
    while not (p.peek().kind == "punct" and p.peek().value == "}"):
        t = p.peek()
        if p.eat_name("domain"):
            domain = p.parse_name_list(("domain", "context", "rule"))
        elif p.eat_name("context"):
            context = p.parse_name_list(("domain", "context", "rule"))
        elif p.eat_name("rule"):
            rows.append(_parse_rule_row(p))
        else:
            p.error(f"expected domain, context, rule or '}}', found {t.value!r}")
    p.expect_punct("}")
    return ComponentDecl(
        name=name, domain=tuple(domain), context=tuple(context), rule=RuleTable(tuple(rows))
    )


def _parse_pattern(p: _Parser) -> str | None:
    t = p.expect_name("behaviour or '_'")
    return None if t.value == "_" else t.value


def _parse_rule_row(p: _Parser) -> RuleRow:
    own = _parse_pattern(p)
    context: list[str | None] = []
    if p.peek().kind == "punct" and p.peek().value == "(":
        p.next()
        while not (p.peek().kind == "punct" and p.peek().value == ")"):
            if p.peek().kind == "punct" and p.peek().value == ",":
                p.next()
                continue
            context.append(_parse_pattern(p))
        p.expect_punct(")")
    p.expect_punct("->")
    out = p.expect_name("output behaviour").value
    return RuleRow(own=own, context=tuple(context), output=out)


def _parse_atom(p: _Parser):
    tok = p.next()  # atom
    name = p.expect_name("atom name").value
    p.expect_punct("=")
    if p.peek().kind == "punct" and p.peek().value == "{":
        p.next()
        refs = p.parse_name_list(())
        p.expect_punct("}")
        return (tok, name, refs)
    comp = p.expect_name("component name").value
    p.expect_punct("=")
    beh = p.expect_name("behaviour name").value
    return (tok, name, (comp, beh))


def _parse_config_literal(p: _Parser) -> list[tuple[str, str]]:
    p.expect_punct("(")
    pairs: list[tuple[str, str]] = []
    while not (p.peek().kind == "punct" and p.peek().value == ")"):
        if p.peek().kind == "punct" and p.peek().value == ",":
            p.next()
            continue
        comp = p.expect_name("component name").value
        p.expect_punct("=")
        beh = p.expect_name("behaviour name").value
        pairs.append((comp, beh))
    p.expect_punct(")")
    return pairs


def _parse_config_decl(p: _Parser):
    tok = p.next()  # config
    name = p.expect_name("configuration name").value
    p.expect_punct("=")
    pairs = _parse_config_literal(p)
    return (tok, name, pairs)


def _parse_intervention(p: _Parser):
    tok = p.next()  # intervention
    name = p.expect_name("intervention name").value
    if not p.eat_name("on"):
        p.error("expected 'on' and a target list")
    targets = p.parse_name_list(())
    p.expect_punct("{")
    cost = penalty = None
    rules = []
    while not (p.peek().kind == "punct" and p.peek().value == "}"):
        t = p.peek()
        if p.eat_name("cost"):
            cost = float(p.expect_number("cost").value)
        elif p.eat_name("penalty"):
            penalty = float(p.expect_number("penalty").value)
        elif p.eat_name("rule"):
            target = p.expect_name("target component").value
            p.expect_punct(":")
            rules.append((t, target, _parse_rule_row(p)))
        else:
            p.error(f"expected cost, penalty, rule or '}}', found {t.value!r}")
    p.expect_punct("}")
    return (tok, name, targets, cost, penalty, rules)


# raw query stanzas hold labels and unresolved formulas


@dataclass(frozen=True)
class _RawQuery:
    kind: str
    parts: tuple


def _parse_config_ref(p: _Parser) -> tuple[str, object]:
    """A configuration reference: a declared name or an inline literal."""
    t = p.peek()
    if t.kind == "punct" and t.value == "(":
        pairs = _parse_config_literal(p)
        label = "(" + ", ".join(f"{c}={b}" for c, b in pairs) + ")"
        return label, pairs
    name = p.expect_name("configuration name").value
    return name, name


def _parse_query_stanza(p: _Parser) -> _RawQuery:
    head = p.next().value
    if head == "check":
        ref = _parse_config_ref(p)
        p.expect_punct("|=")
        return _RawQuery("check", (ref, p.parse_formula()))
    if head == "cause":
        if not p.eat_name("from"):
            p.error("expected 'from'")
        start = _parse_config_ref(p)
        if not p.eat_name("to"):
            p.error("expected 'to'")
        end = _parse_config_ref(p)
        if not p.eat_name("effect"):
            p.error("expected 'effect'")
        p.expect_punct("{")
        effect = p.parse_name_list(())
        p.expect_punct("}")
        return _RawQuery("cause", (start, end, tuple(effect)))
    if head == "chain":
        if not p.eat_name("from"):
            p.error("expected 'from'")
        start = _parse_config_ref(p)
        if not p.eat_name("to"):
            p.error("expected 'to'")
        end = _parse_config_ref(p)
        effect = None
        max_len = None
        while True:
            if p.eat_name("effect"):
                p.expect_punct("{")
                effect = tuple(p.parse_name_list(()))
                p.expect_punct("}")
            elif p.eat_name("maxlen"):
                max_len = int(p.expect_number("maxlen").value)
            else:
                break
        return _RawQuery("chain", (start, end, effect, max_len))
    if head == "decompose":
        p.expect_punct("{")
        left = tuple(p.parse_name_list(()))
        p.expect_punct("}")
        p.expect_punct("{")
        right = tuple(p.parse_name_list(()))
        p.expect_punct("}")
        return _RawQuery("decompose", (left, right))
    if head == "bisim":
        ref = _parse_config_ref(p)
        if not p.eat_name("vs"):
            p.error("expected 'vs'")
        t = p.peek()
        if t.kind != "string":
            p.error("expected a quoted path to the other model")
        path = p.next().value
        other = p.expect_name("configuration name").value
        return _RawQuery("bisim", (ref, path, other))
    if head in ("recover", "mincost", "utility"):
        ref = _parse_config_ref(p)
        if not p.eat_name("avoiding"):
            p.error("expected 'avoiding'")
        return _RawQuery(head, (ref, p.parse_formula()))
    raise AssertionError(head)


# ---------------------------------------------------------------------------
# resolution


def _resolve_formula(phi: F.Formula, formula_map, model: SystemModel) -> F.Formula:
    def go(x: F.Formula) -> F.Formula:
        if isinstance(x, F.Atom):
            if x.name in formula_map:
                return formula_map[x.name]
            if x.name in model.atom_map:
                return x
            raise DslError([Diagnostic(0, 0, f"unresolved name {x.name!r} in formula")])
        if isinstance(x, F.BehaviourAtom):
            decl = model.component_map.get(x.component)
            if decl is None:
                raise DslError([Diagnostic(0, 0, f"behaviour atom names unknown component {x.component!r}")])
            if x.behaviour not in decl.domain:
                raise DslError(
                    [Diagnostic(0, 0, f"behaviour atom names unknown behaviour {x.behaviour!r} of {x.component!r}")]
                )
            return x
        if isinstance(x, (F.Top, F.Bot)):
            return x
        if isinstance(x, F.Not):
            return F.Not(go(x.sub))
        if isinstance(x, F.And):
            return F.And(go(x.left), go(x.right))
        if isinstance(x, F.Or):
            return F.Or(go(x.left), go(x.right))
        if isinstance(x, F.Implies):
            return F.Implies(go(x.left), go(x.right))
        if isinstance(x, F.Box):
            return F.Box(go(x.sub))
        if isinstance(x, F.Diamond):
            return F.Diamond(go(x.sub))
        if isinstance(x, F.BoxPlus):
            return F.BoxPlus(go(x.sub))
        if isinstance(x, F.DiamondPlus):
            return F.DiamondPlus(go(x.sub))
        if isinstance(x, F.Intervene):
            if x.name not in model.intervention_map:
                raise DslError([Diagnostic(0, 0, f"unresolved intervention name {x.name!r}")])
            return F.Intervene(x.name, go(x.sub))
        if isinstance(x, F.InterveneExists):
            return F.InterveneExists(go(x.sub))
        if isinstance(x, F.Star):
            return F.Star(go(x.left), go(x.right))
        raise TypeError(x)

    return go(phi)


def _resolve_config_ref(ref, doc: ModelDocument) -> tuple[str, Configuration]:
    label, body = ref
    if isinstance(body, str):
        return label, doc.configuration(body)
    return label, doc.model.configuration(dict(body))


def _resolve_query(raw: _RawQuery, doc: ModelDocument, formula_map) -> object:
    model = doc.model
    if raw.kind == "check":
        ref, phi = raw.parts
        label, cfg = _resolve_config_ref(ref, doc)
        return CheckStanza(label, cfg, _resolve_formula(phi, formula_map, model))
    if raw.kind == "cause":
        start, end, effect = raw.parts
        sl, sc = _resolve_config_ref(start, doc)
        el, ec = _resolve_config_ref(end, doc)
        for c in effect:
            model.component(c)
        return CauseStanza(sl, sc, el, ec, effect)
    if raw.kind == "chain":
        start, end, effect, max_len = raw.parts
        sl, sc = _resolve_config_ref(start, doc)
        el, ec = _resolve_config_ref(end, doc)
        if effect:
            for c in effect:
                model.component(c)
        return ChainStanza(sl, sc, el, ec, effect, max_len)
    if raw.kind == "decompose":
        left, right = raw.parts
        for c in left + right:
            model.component(c)
        return DecomposeStanza(left, right)
    if raw.kind == "bisim":
        ref, path, other = raw.parts
        label, cfg = _resolve_config_ref(ref, doc)
        return BisimStanza(label, cfg, path, other)
    cls = {"recover": RecoverStanza, "mincost": MinCostStanza, "utility": UtilityStanza}[raw.kind]
    ref, phi = raw.parts
    label, cfg = _resolve_config_ref(ref, doc)
    return cls(label, cfg, _resolve_formula(phi, formula_map, model))


# ---------------------------------------------------------------------------
# single-item parsing for the command line and for report replay


def parse_formula_text(text: str, doc: ModelDocument) -> F.Formula:
    p = _Parser(text)
    phi = p.parse_formula()
    if p.peek().kind != "eof":
        p.error("trailing input after formula")
    return _resolve_formula(phi, dict(doc.formulas), doc.model)


def parse_config_text(text: str, doc: ModelDocument) -> Configuration:
    p = _Parser(text)
    ref = _parse_config_ref(p)
    if p.peek().kind != "eof":
        p.error("trailing input after configuration")
    return _resolve_config_ref(ref, doc)[1]


def parse_query_text(text: str, doc: ModelDocument):
    p = _Parser(text)
    t = p.peek()
    if t.kind != "name" or t.value not in _QUERY_HEADS:
        p.error(f"expected a query stanza, found {t.value!r}")
    raw = _parse_query_stanza(p)
    if p.peek().kind != "eof":
        p.error("trailing input after query")
    return _resolve_query(raw, doc, dict(doc.formulas))


# ---------------------------------------------------------------------------
# canonical printing


def _print_row(row: RuleRow) -> str:
    own = row.own if row.own is not None else "_"
    if row.context:
        ctx = ", ".join(x if x is not None else "_" for x in row.context)
        return f"rule {own} ({ctx}) -> {row.output}"
    return f"rule {own} -> {row.output}"


def pretty_document(doc: ModelDocument) -> str:
    lines: list[str] = [doc.model.mode, ""]
    for c in doc.model.components:
        lines.append(f"component {c.name} {{")
        lines.append("  domain " + " ".join(c.domain))
        if c.context:
            lines.append("  context " + " ".join(c.context))
        for row in c.rule.rows:
            lines.append("  " + _print_row(row))
        lines.append("}")
    lines.append("")
    for a in doc.model.atoms:
        if a.is_predicate:
            lines.append(f"atom {a.name} = {a.component} = {a.behaviour}")
        else:
            names = []
            for g in a.extension or ():
                for n, f in doc.configurations:
                    if f == g:
                        names.append(n)
                        break
            lines.append(f"atom {a.name} = {{ " + " ".join(names) + " }")
    for name, f in doc.configurations:
        inner = ", ".join(f"{c}={b}" for c, b in f.pairs)
        lines.append(f"config {name} = ({inner})")
    for iv in doc.model.interventions:
        lines.append(f"intervention {iv.name} on " + " ".join(iv.targets) + " {")
        if iv.cost is not None:
            cost = int(iv.cost) if float(iv.cost).is_integer() else iv.cost
            lines.append(f"  cost {cost}")
        if iv.penalty is not None:
            pen = int(iv.penalty) if float(iv.penalty).is_integer() else iv.penalty
            lines.append(f"  penalty {pen}")
        for target, table in iv.rules:
            for row in table.rows:
                lines.append(f"  rule {target}: " + _print_row(row)[5:])
        lines.append("}")
    for name, phi in doc.formulas:
        lines.append(f"formula {name} = {F.pretty(phi)}")
    for q in doc.queries:
        lines.append(q.echo())
    return "\n".join(lines) + "\n"
