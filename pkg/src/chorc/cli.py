"""Command-line front end.

Exit codes: 0 success, 1 ill-formed or unprojectable input (or a stuck run),
2 usage and parse errors, 3 failed verification properties.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .conc import all_traces, run_conc
from .epp import ProjectionError, project
from .labels import STUCK
from .network import NetConfig, run_net
from .seq import SeqConfig, run_seq
from .surface import ParseError, parse_chor, parse_network, parse_state, print_network, print_state
from .syntax import State, format_path
from .verify import PROPS, CheckReport, GenConfig, Instance, build_corpus, check_oracle
from .wellformed import check_chor

EXIT_OK, EXIT_INVALID, EXIT_USAGE, EXIT_VERIFY = 0, 1, 2, 3

ALL_PROPS = tuple(PROPS) + ("oracle",)


class _Usage(Exception):
    pass


def _color_enabled(stream) -> bool:
    mode = os.environ.get("CHORC_COLOR", "auto")
    if mode == "always":
        return True
    if mode == "never":
        return False
    return stream.isatty()


def _paint(text: str, code: str, stream) -> str:
    return f"\033[{code}m{text}\033[0m" if _color_enabled(stream) else text


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise _Usage(f"{path}: {e.strerror}") from None


def _parse(path: str, parser):
    text = _read(path)
    try:
        return parser(text)
    except ParseError as e:
        raise _Usage(f"{path}:{e.line}:{e.col}: {e.message}") from None


def _load_state(path: str | None) -> State:
    return _parse(path, parse_state) if path else State()


def _diagnose(path: str, c, as_json: bool) -> bool:
    """Print well-formedness diagnostics; True if there were any."""
    violations = check_chor(c)
    if as_json:
        if violations:
            print(json.dumps([v.to_json() for v in violations], indent=2))
        return bool(violations)
    for v in violations:
        line = f"{path}:{v.render()}"
        print(_paint(line, "31", sys.stdout))
    return bool(violations)


def _write_trace(path: str | None, trace) -> None:
    if path:
        Path(path).write_text(json.dumps(trace.to_json(), indent=2) + "\n", encoding="utf-8")


def cmd_check(args) -> int:
    c = _parse(args.file, parse_chor)
    if _diagnose(args.file, c, args.json):
        return EXIT_INVALID
    if args.json:
        print("[]")
    else:
        print(f"{args.file}: ok")
    return EXIT_OK


def _projection_error(args, e: ProjectionError) -> int:
    if args.json:
        print(json.dumps({"kind": e.kind, "process": e.process,
                          "location": format_path(e.location),
                          "detail": list(e.detail)}, indent=2))
    else:
        print(_paint(f"{args.file}:{e}", "31", sys.stdout))
    return EXIT_INVALID


def cmd_project(args) -> int:
    c = _parse(args.file, parse_chor)
    if _diagnose(args.file, c, args.json):
        return EXIT_INVALID
    try:
        net = project(c)
    except ProjectionError as e:
        return _projection_error(args, e)
    text = print_network(net)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _report_run(trace, state, args) -> int:
    sys.stdout.write(trace.render())
    sys.stdout.write(print_state(state))
    _write_trace(args.trace, trace)
    return EXIT_INVALID if trace.status == STUCK else EXIT_OK


def cmd_run(args) -> int:
    c = _parse(args.file, parse_chor)
    if _diagnose(args.file, c, False):
        return EXIT_INVALID
    cfg = SeqConfig(c, _load_state(args.state))
    if args.sem == "seq":
        trace, final = run_seq(cfg, args.fuel)
    else:
        trace, final = run_conc(cfg, args.fuel, args.seed)
    return _report_run(trace, final.state, args)


def cmd_simulate(args) -> int:
    net = _parse(args.file, parse_network)
    trace, final = run_net(NetConfig(net, _load_state(args.state)), args.fuel, args.seed)
    return _report_run(trace, final.state, args)


def cmd_traces(args) -> int:
    c = _parse(args.file, parse_chor)
    if _diagnose(args.file, c, False):
        return EXIT_INVALID
    cfg = SeqConfig(c, _load_state(args.state))
    if args.sem == "seq":
        traces = [run_seq(cfg, args.max_steps)[0]]
    else:
        traces = all_traces(cfg, args.max_steps)
    records = sorted((t.to_json() for t in traces), key=lambda r: json.dumps(r, sort_keys=True))
    print(json.dumps(records, indent=2))
    return EXIT_OK


def _file_instances(paths) -> list[Instance]:
    out = []
    for i, path in enumerate(paths):
        c = _parse(path, parse_chor)
        if check_chor(c):
            raise _Usage(f"{path}: not well-formed (run `check` for details)")
        state_path = Path(path).with_suffix(".state")
        state = _load_state(str(state_path)) if state_path.exists() else State()
        try:
            project(c)
            ok = True
        except ProjectionError:
            ok = False
        out.append(Instance(path, GenConfig(seed=i), c, state, ok))
    return out


def cmd_verify(args) -> int:
    props = [p.strip() for p in args.props.split(",") if p.strip()] if args.props else list(ALL_PROPS)
    unknown = [p for p in props if p not in ALL_PROPS]
    if unknown:
        raise _Usage(f"unknown properties: {', '.join(unknown)} (choose from {', '.join(ALL_PROPS)})")
    corpus = _file_instances(args.files)
    if args.random:
        corpus += build_corpus(args.random, seed=args.seed, depth=args.depth)
    reports: list[CheckReport] = []
    for name in props:
        if name == "oracle":
            reports.append(check_oracle())
        else:
            reports.append(PROPS[name](corpus))
    if args.json:
        print(json.dumps([r.to_json() for r in reports], indent=2))
    else:
        for r in reports:
            text = r.render()
            first, _, rest = text.partition("\n")
            print(_paint(first, "32" if r.ok else "31", sys.stdout))
            sys.stdout.write(rest)
    return EXIT_OK if all(r.ok for r in reports) else EXIT_VERIFY


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="chorc", description="Choreographies with grouped interactions.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("check", help="report well-formedness violations")
    sp.add_argument("file")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("project", help="print the projected network")
    sp.add_argument("file")
    sp.add_argument("-o", "--output")
    sp.add_argument("--json", action="store_true", help="diagnostics as JSON")
    sp.set_defaults(func=cmd_project)

    sp = sub.add_parser("run", help="execute a choreography")
    sp.add_argument("file")
    sp.add_argument("--sem", choices=("seq", "conc"), required=True)
    _run_opts(sp)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("simulate", help="execute a network")
    sp.add_argument("file")
    _run_opts(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("traces", help="enumerate traces as JSON")
    sp.add_argument("file")
    sp.add_argument("--max-steps", type=int, required=True)
    sp.add_argument("--sem", choices=("seq", "conc"), default="conc")
    sp.add_argument("--state")
    sp.set_defaults(func=cmd_traces)

    sp = sub.add_parser("verify", help="run the property suites")
    sp.add_argument("files", nargs="*")
    sp.add_argument("--random", type=int, default=100, metavar="N")
    sp.add_argument("--depth", type=int, default=4)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--props", metavar="LIST", help=f"comma-separated subset of {','.join(ALL_PROPS)}")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_verify)
    return ap


def _run_opts(sp) -> None:
    sp.add_argument("--state")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--fuel", type=int, default=10000)
    sp.add_argument("--trace", metavar="OUT")


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except _Usage as e:
        print(f"chorc: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
