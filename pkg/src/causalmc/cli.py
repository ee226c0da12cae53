"""Command-line driver.

Exit codes: 0 verdict true or success, 1 verdict false, 2 usage, parse or
resolution error, 3 state-space cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .bisim import intervention_closure
from .dsl import DslError, parse_model, parse_query_text
from .hp import export_hp
from .model import CapExceeded, ModelError, Options, reachable
from .queries import run_document, run_query


def _common_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("model", help="model file")
    mode = sp.add_mutually_exclusive_group()
    mode.add_argument("--sync", action="store_true", help="force synchronous transitions")
    mode.add_argument("--async", dest="force_async", action="store_true", help="force asynchronous transitions")
    sp.add_argument("--self-loops", action="store_true", help="include fixpoint self-loops")
    sp.add_argument("--allow-trivial-split", action="store_true", help="admit non-proper interface splits")
    sp.add_argument("--strict-ac1", action="store_true", help="literal start-equals-end actuality clause")
    sp.add_argument("--max-states", type=int, default=100_000, metavar="N", help="state enumeration cap")
    sp.add_argument("--report", metavar="PATH", help="write the JSON report here")


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="causalmc", description=__doc__)
    ap.add_argument("--version", action="version", version=f"causalmc {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("check", help="evaluate a formula at a configuration")
    _common_flags(sp)
    sp.add_argument("config")
    sp.add_argument("formula")

    sp = sub.add_parser("cause", help="minimal actual causes of an outcome")
    _common_flags(sp)
    sp.add_argument("--from", dest="start", required=True)
    sp.add_argument("--to", dest="end", required=True)
    sp.add_argument("--effect", nargs="+", required=True)

    sp = sub.add_parser("chain", help="minimal causal chains between configurations")
    _common_flags(sp)
    sp.add_argument("--from", dest="start", required=True)
    sp.add_argument("--to", dest="end", required=True)
    sp.add_argument("--effect", nargs="+")
    sp.add_argument("--max-len", type=int, default=4)
    sp.add_argument("--dot", metavar="PATH", help="write the causal projection as DOT")

    sp = sub.add_parser("bisim", help="bisimulation under intervention between two pointed models")
    _common_flags(sp)
    sp.add_argument("config")
    sp.add_argument("other_model")
    sp.add_argument("other_config")

    sp = sub.add_parser("decompose", help="check an interface split and decompose")
    _common_flags(sp)
    sp.add_argument("--left", nargs="+", required=True)
    sp.add_argument("--right", nargs="+", required=True)

    for name, help_text in (
        ("recover", "interventions guaranteeing the failure formula stays false"),
        ("mincost", "cheapest qualifying intervention"),
        ("utility", "qualifying intervention with the best cost-penalty trade-off"),
    ):
        sp = sub.add_parser(name, help=help_text)
        _common_flags(sp)
        sp.add_argument("config")
        sp.add_argument("formula")

    sp = sub.add_parser("export-dot", help="transition graph or variant graph as DOT")
    _common_flags(sp)
    sp.add_argument("--variants", action="store_true", help="export the intervention variant graph")
    sp.add_argument("--reachable-from", metavar="CONFIG", help="restrict to configurations reachable from here")
    sp.add_argument("-o", "--output", metavar="PATH")

    sp = sub.add_parser("export-hp", help="structural-equations export")
    _common_flags(sp)
    sp.add_argument("--init", required=True, metavar="CONFIG")
    sp.add_argument("-o", "--output", metavar="PATH")

    sp = sub.add_parser("run", help="run every query stanza in the model file")
    _common_flags(sp)
    return ap


def _load(args):
    text = Path(args.model).read_text(encoding="utf-8")
    doc = parse_model(text, path=args.model)
    if args.sync:
        doc = _with_mode(doc, "sync")
    elif args.force_async:
        doc = _with_mode(doc, "async")
    options = Options(
        self_loops=args.self_loops,
        allow_trivial_split=args.allow_trivial_split,
        max_states=args.max_states,
    )
    return doc, options


def _with_mode(doc, mode):
    from dataclasses import replace

    return replace(doc, model=doc.model.with_mode(mode))


def _emit(report, args) -> int:
    payload = report.to_dict() if hasattr(report, "to_dict") else report
    if args.report:
        Path(args.report).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    if isinstance(payload, dict) and "verdict" in payload:
        print(f"{payload['kind']}: {'true' if payload['verdict'] else 'false'}  ({payload['query']})")
        return 0 if payload["verdict"] else 1
    return 0


def _stanza_text(args) -> str:
    if args.command == "check":
        return f"check {args.config} |= {args.formula}"
    if args.command == "cause":
        return f"cause from {args.start} to {args.end} effect {{{' '.join(args.effect)}}}"
    if args.command == "chain":
        text = f"chain from {args.start} to {args.end}"
        if args.effect:
            text += f" effect {{{' '.join(args.effect)}}}"
        text += f" maxlen {args.max_len}"
        return text
    if args.command == "bisim":
        other = Path(args.other_model).resolve()
        return f'bisim {args.config} vs "{other}" {args.other_config}'
    if args.command in ("recover", "mincost", "utility"):
        return f"{args.command} {args.config} avoiding {args.formula}"
    if args.command == "decompose":
        return f"decompose {{{' '.join(args.left)}}} {{{' '.join(args.right)}}}"
    raise AssertionError(args.command)


def main(argv=None) -> int:
    ap = _build_parser()
    args = ap.parse_args(argv)
    try:
        doc, options = _load(args)
        if args.command == "run":
            reports = run_document(doc, options, strict_ac1=args.strict_ac1)
            payload = [r.to_dict() for r in reports]
            if args.report:
                Path(args.report).write_text(
                    json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
                )
            ok = True
            for r in reports:
                print(f"{r.kind}: {'true' if r.verdict else 'false'}  ({r.query})")
                ok = ok and r.verdict
            return 0 if ok else 1
        if args.command == "export-dot":
            if args.variants:
                dot = intervention_closure(doc.model).to_dot()
            else:
                dot = _transition_dot(doc, options, args.reachable_from)
            _write_or_print(dot, args.output)
            return 0
        if args.command == "export-hp":
            from .dsl import parse_config_text

            init = parse_config_text(args.init, doc)
            hp = export_hp(doc.model, init)
            _write_or_print(hp.to_json(), args.output)
            return 0
        stanza = parse_query_text(_stanza_text(args), doc)
        report = run_query(doc, stanza, options, strict_ac1=args.strict_ac1)
        if args.command == "chain" and args.dot:
            Path(args.dot).write_text(_projection_dot(doc, stanza, options), encoding="utf-8")
        return _emit(report, args)
    except DslError as exc:
        for d in exc.diagnostics:
            print(f"{args.model}:{d}", file=sys.stderr)
        return 2
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ModelError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _projection_dot(doc, stanza, options) -> str:
    from .causality import causal_projection, find_causal_chains

    chains = find_causal_chains(
        doc.model,
        stanza.start,
        stanza.end,
        max_len=stanza.max_len or 4,
        effect_components=stanza.effect,
        options=options,
    )
    return causal_projection(doc.model, chains, options).to_dot()


def _transition_dot(doc, options, reachable_from: str | None) -> str:
    from .dsl import parse_config_text

    model = doc.model
    if reachable_from:
        start = parse_config_text(reachable_from, doc)
        nodes = [start] + [g for g in reachable(model, start, options) if g != start]
    else:
        nodes = model.enumerate_configurations(options)
    from .model import successors

    node_set = set(nodes)
    idx = {g: i for i, g in enumerate(nodes)}
    lines = ["digraph transitions {"]
    for g, i in idx.items():
        label = str(g).replace('"', "'")
        lines.append(f'  n{i} [label="{label}"];')
    for g in nodes:
        for h in successors(model, g, options):
            if h in node_set:
                lines.append(f"  n{idx[g]} -> n{idx[h]};")
    lines.append("}")
    return "\n".join(lines)


def _write_or_print(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


if __name__ == "__main__":
    raise SystemExit(main())
