"""Command-line front end: check, explore, trace, simulate, import, render."""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from collections import Counter

from .bpel_xml import import_bpel
from .choreography import ChoreographyDef
from .dsl import parse_source, print_model
from .errors import ModelError, NotFound
from .explorer import (Limits, Lts, explore, export_dot, export_json,
                       find_trace, find_trace_labels, load_json, random_walk)
from .report import render_figure, write_edges_csv

EXIT_OK = 0
EXIT_FATAL = 1
EXIT_NOT_FOUND = 2
EXIT_IO = 3


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _load_model(path: str, args) -> ChoreographyDef:
    """Parse and validate; fatal diagnostics abort with exit code 1."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SystemExit(_fail(str(exc), EXIT_IO))
    src = parse_source(text, path)
    fatal = False
    for diag in src.diagnostics:
        print(f"{path}:{diag}", file=sys.stderr)
        fatal = fatal or diag.severity == "error"
    if src.model is None or fatal:
        raise SystemExit(EXIT_FATAL)
    cdef = src.model
    config = cdef.config
    if getattr(args, "expiry_target", None):
        config = dataclasses.replace(config, expiry_target=args.expiry_target)
    if getattr(args, "open_domain", None):
        domain = tuple(int(v) for v in args.open_domain.split(","))
        config = dataclasses.replace(config, open_domain=domain)
    return dataclasses.replace(cdef, config=config)


def _limits(args) -> Limits:
    return Limits(args.max_states, args.max_depth, args.max_delay_steps)


def _write(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise SystemExit(_fail(str(exc), EXIT_IO))


def _write_exports(lts, args) -> None:
    if args.json:
        _write(args.json, export_json(lts))
    if args.dot:
        _write(args.dot, export_dot(lts))
    if args.csv:
        try:
            with open(args.csv, "w", encoding="utf-8", newline="") as fh:
                write_edges_csv(lts, fh)
        except OSError as exc:
            raise SystemExit(_fail(str(exc), EXIT_IO))
    if args.fig:
        try:
            render_figure(lts, args.fig)
        except OSError as exc:
            raise SystemExit(_fail(str(exc), EXIT_IO))


def cmd_check(args) -> int:
    _load_model(args.model, args)
    return EXIT_OK


def cmd_explore(args) -> int:
    cdef = _load_model(args.model, args)
    lts = explore(cdef, _limits(args), args.urgent_internal)
    _write_exports(lts, args)
    flags = Counter(f for rec in lts.states for f in rec.flags)
    parts = [f"states={len(lts.states)}", f"edges={len(lts.edges)}"]
    parts += [f"{name}={flags[name]}" for name in sorted(flags)]
    parts.append(f"limits_hit={str(lts.limits_hit).lower()}")
    print(" ".join(parts))
    return EXIT_OK


def cmd_trace(args) -> int:
    cdef = _load_model(args.model, args)
    lts = explore(cdef, _limits(args), args.urgent_internal)
    try:
        if args.labels:
            try:
                with open(args.labels, encoding="utf-8") as fh:
                    patterns = [ln.strip() for ln in fh if ln.strip()]
            except OSError as exc:
                return _fail(str(exc), EXIT_IO)
            trace = find_trace_labels(lts, patterns)
        else:
            wanted = args.to
            trace = find_trace(lts, lambda rec: wanted in rec.flags)
    except NotFound as exc:
        return _fail(str(exc), EXIT_NOT_FOUND)
    for step in trace:
        print(step.label)
    return EXIT_OK


def cmd_simulate(args) -> int:
    cdef = _load_model(args.model, args)
    for label in random_walk(cdef, args.seed, args.steps, args.urgent_internal):
        print(label)
    return EXIT_OK


def cmd_import_bpel(args) -> int:
    try:
        with open(args.bindings, encoding="utf-8") as fh:
            bindings = json.load(fh)
        xml_texts = []
        for path in args.xml:
            with open(path, encoding="utf-8") as fh:
                xml_texts.append(fh.read())
    except OSError as exc:
        return _fail(str(exc), EXIT_IO)
    cdef = import_bpel(xml_texts, bindings)
    text = print_model(cdef)
    if args.output:
        _write(args.output, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_render(args) -> int:
    try:
        with open(args.lts, encoding="utf-8") as fh:
            lts = load_json(fh.read())
    except OSError as exc:
        return _fail(str(exc), EXIT_IO)
    _write_exports(lts, args)
    return EXIT_OK


def _add_limit_flags(sub):
    sub.add_argument("--max-states", type=int, default=10000)
    sub.add_argument("--max-depth", type=int, default=None)
    sub.add_argument("--max-delay-steps", type=int, default=None)
    sub.add_argument("--urgent-internal", action="store_true",
                     help="block delay whenever any action step exists")


def _add_model_flags(sub):
    sub.add_argument("model", help="path to a .brf model file")
    sub.add_argument("--expiry-target", choices=("creator", "subscribers", "both"),
                     default=None, help="who runs a resource's expiry handler")
    sub.add_argument("--open-domain", default=None, metavar="INTS",
                     help="comma-separated values the environment may send")


def _add_export_flags(sub):
    sub.add_argument("--json", default=None, help="write the LTS as JSON")
    sub.add_argument("--dot", default=None, help="write the LTS as DOT")
    sub.add_argument("--csv", default=None, help="write the edge list as CSV")
    sub.add_argument("--fig", default=None, help="render the state graph image")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orchlts",
        description="Explore the timed transition system of a service"
                    " choreography with leased resources.")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("check", help="parse and validate a model")
    _add_model_flags(p)
    p.set_defaults(func=cmd_check)

    p = subs.add_parser("explore", help="build the transition system")
    _add_model_flags(p)
    _add_limit_flags(p)
    _add_export_flags(p)
    p.set_defaults(func=cmd_explore)

    p = subs.add_parser("trace", help="shortest trace to a target")
    _add_model_flags(p)
    _add_limit_flags(p)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--to", choices=("terminal-success", "deadlock", "timelock"))
    group.add_argument("--labels", default=None,
                       help="file of label patterns to match as a subsequence")
    p.set_defaults(func=cmd_trace)

    p = subs.add_parser("simulate", help="seeded random walk")
    _add_model_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--urgent-internal", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = subs.add_parser("import-bpel", help="translate XML processes to a model")
    p.add_argument("xml", nargs="+", help="XML process documents")
    p.add_argument("--bindings", required=True,
                   help="JSON sidecar with channels, operations, variables")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_import_bpel)

    p = subs.add_parser("render", help="re-render a saved JSON LTS")
    p.add_argument("lts", help="JSON file written by explore --json")
    _add_export_flags(p)
    p.set_defaults(func=cmd_render)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit:
        raise
    except ModelError as exc:
        return _fail(str(exc), EXIT_FATAL)


if __name__ == "__main__":
    sys.exit(main())
