"""Command line front end.

Subcommands::

    wsq eval STRUCTURE QUERY [--bind x=elem ...] [--input r1,r2,...] [--json]
    wsq check QUERY
    wsq fnn {validate|forward|pwl|integrate|zero|pad} FILE ...
    wsq repl [STRUCTURE]

``STRUCTURE`` is a structure file or a network file (detected by their
top-level keys).  ``QUERY`` is inline text, a path to a query file, or a
``builtin:`` reference such as ``builtin:eval d=2 i=1``.  Exit codes:
0 success, 1 query parse error, 2 structure or file error, 3 unbound
variables, 4 resource budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from .errors import LoadError, ParseError, ResourceError, UsageError
from .evaluator import EvalLimits, evaluate
from .fnn import (
    DEFAULT_MAX_PWL_PIECES,
    FnnStructure,
    Pwl,
    fnn_from_json,
    forward,
    pad,
    pwl_integral,
    save_fnn,
    to_pwl,
    validate_fnn,
    with_input,
)
from .numerics import ExtRational
from .queries import builtin_query
from .structures import WeightedStructure, structure_from_json
from .syntax import check_scalar_fragment, free_vars, parse, vocabulary_of

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_STRUCTURE = 2
EXIT_UNBOUND = 3
EXIT_RESOURCE = 4


class _CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise _CliError(f"cannot read {path}: {exc}", EXIT_STRUCTURE)
    except json.JSONDecodeError as exc:
        raise _CliError(f"{path}: not valid JSON: {exc}", EXIT_STRUCTURE)


def _load_structure_or_fnn(path: str) -> tuple[WeightedStructure, Optional[FnnStructure]]:
    doc = _load_json(path)
    try:
        if isinstance(doc, dict) and "nodes" in doc:
            net = fnn_from_json(doc)
            return net.structure, net
        return structure_from_json(doc), None
    except LoadError as exc:
        raise _CliError(f"{path}: {exc}", EXIT_STRUCTURE)


def _load_fnn(path: str) -> FnnStructure:
    structure, net = _load_structure_or_fnn(path)
    if net is None:
        try:
            net = FnnStructure(structure)
        except UsageError as exc:
            raise _CliError(f"{path}: {exc}", EXIT_STRUCTURE)
    return net


def _resolve_query(text: str):
    try:
        if text.startswith("builtin:"):
            return builtin_query(text[len("builtin:") :])
        if os.path.exists(text):
            with open(text, "r", encoding="utf-8") as fh:
                text = fh.read()
        return parse(text)
    except (ParseError, UsageError) as exc:
        raise _CliError(f"query error: {exc}", EXIT_PARSE)
    except OSError as exc:
        raise _CliError(f"cannot read query file: {exc}", EXIT_PARSE)


def _parse_inputs(text: str) -> list[ExtRational]:
    values = []
    for chunk in text.split(","):
        try:
            value = ExtRational.parse(chunk)
        except ValueError as exc:
            raise _CliError(f"bad input value: {exc}", EXIT_STRUCTURE)
        values.append(value)
    return values


def _parse_bindings(pairs: list[str]) -> dict[str, str]:
    env = {}
    for pair in pairs:
        var, sep, elem = pair.partition("=")
        if not sep or not var or not elem:
            raise _CliError(f"bindings are VAR=ELEMENT, got {pair!r}", EXIT_STRUCTURE)
        env[var] = elem
    return env


def _render_value(value, as_json: bool) -> str:
    is_formula = isinstance(value, bool)
    if as_json:
        payload = {
            "value": value if is_formula else str(value),
            "kind": "formula" if is_formula else "term",
        }
        return json.dumps(payload, sort_keys=True)
    if is_formula:
        return "true" if value else "false"
    return str(value)


def _limits(args) -> EvalLimits:
    return EvalLimits(
        max_fixpoint_cells=args.max_fixpoint_cells,
        max_summands=args.max_summands,
    )


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_eval(args) -> int:
    structure, net = _load_structure_or_fnn(args.structure)
    query = _resolve_query(args.query)
    if args.input is not None:
        if net is None:
            raise _CliError("--input requires a network structure", EXIT_STRUCTURE)
        try:
            structure = with_input(net, _parse_inputs(args.input))
        except UsageError as exc:
            raise _CliError(str(exc), EXIT_STRUCTURE)
    env = _parse_bindings(args.bind)
    missing = sorted(free_vars(query) - env.keys())
    if missing:
        raise _CliError(f"unbound variables: {', '.join(missing)}", EXIT_UNBOUND)
    try:
        value = evaluate(query, structure, env, _limits(args))
    except ResourceError as exc:
        raise _CliError(str(exc), EXIT_RESOURCE)
    except UsageError as exc:
        raise _CliError(str(exc), EXIT_STRUCTURE)
    print(_render_value(value, args.json))
    return EXIT_OK


def _describe_query(query, out) -> None:
    fv = sorted(free_vars(query))
    out(f"free variables: {', '.join(fv) if fv else 'none'}")
    info = vocabulary_of(query)
    ext = [f"{name}/{arity} (relation)" for name, arity in sorted(info.relations.items())]
    ext += [f"{name}/{arity} (weight)" for name, arity in sorted(info.weights.items())]
    ext += [f"{name}/{arity} (unresolved)" for name, arity in sorted(info.generic.items())]
    out(f"extensional vocabulary: {', '.join(ext) if ext else 'empty'}")
    intensional = [f"{name}/{arity}" for name, arity in sorted(info.intensional.items())]
    out(f"intensional symbols: {', '.join(intensional) if intensional else 'none'}")
    violations = check_scalar_fragment(query)
    if not violations:
        out("in sIFP(SUM)")
    else:
        out("NOT in sIFP(SUM): " + "; ".join(v.describe() for v in violations))


def _cmd_check(args) -> int:
    query = _resolve_query(args.query)
    try:
        _describe_query(query, print)
    except UsageError as exc:
        raise _CliError(str(exc), EXIT_PARSE)
    return EXIT_OK


def _affine_text(slope, intercept) -> str:
    if slope == 0:
        return str(ExtRational(intercept))
    if slope == 1:
        head = "x"
    else:
        head = f"{ExtRational(slope)}*x"
    if intercept == 0:
        return head
    sign = "+" if intercept > 0 else "-"
    return f"{head} {sign} {ExtRational(abs(intercept))}"


def _print_pwl(p: Pwl) -> None:
    bps = [str(ExtRational(x)) for x in p.breakpoints]
    print(f"breakpoints: {', '.join(bps) if bps else 'none'}")
    bounds = ["-inf", *bps, "+inf"]
    for i, (slope, intercept) in enumerate(p.pieces):
        print(f"[{bounds[i]}, {bounds[i + 1]}]: {_affine_text(slope, intercept)}")


def _cmd_fnn(args) -> int:
    if args.fnn_command == "validate":
        doc = _load_json(args.file)
        try:
            if isinstance(doc, dict) and "nodes" in doc:
                fnn_from_json(doc)
            else:
                problems = validate_fnn(structure_from_json(doc))
                if problems:
                    for problem in problems:
                        print(problem)
                    return EXIT_STRUCTURE
        except LoadError as exc:
            print(exc)
            return EXIT_STRUCTURE
        print("ok")
        return EXIT_OK

    net = _load_fnn(args.file)
    try:
        if args.fnn_command == "forward":
            values = forward(net, _parse_inputs(args.input))
            print(" ".join(str(v) for v in values))
        elif args.fnn_command == "pwl":
            _print_pwl(to_pwl(net, args.max_pwl_pieces))
        elif args.fnn_command == "integrate":
            lo = ExtRational.parse(args.lo)
            hi = ExtRational.parse(args.hi)
            print(pwl_integral(to_pwl(net, args.max_pwl_pieces), lo, hi))
        elif args.fnn_command == "zero":
            print("true" if to_pwl(net, args.max_pwl_pieces).is_zero else "false")
        elif args.fnn_command == "pad":
            u, sep, v = args.edge.partition(",")
            if not sep:
                raise _CliError("--edge takes FROM,TO", EXIT_STRUCTURE)
            padded = pad(net, (u, v), args.k)
            save_fnn(padded, args.out)
    except ResourceError as exc:
        raise _CliError(str(exc), EXIT_RESOURCE)
    except (UsageError, ValueError) as exc:
        raise _CliError(str(exc), EXIT_STRUCTURE)
    return EXIT_OK


# ---------------------------------------------------------------------------
# REPL
# ---------------------------------------------------------------------------

_REPL_HELP = """commands:
  :load PATH            load a structure or network file
  :let NAME = QUERY     name a parsed query
  :check NAME|QUERY     free variables, vocabulary, scalar-fragment verdict
  :set format plain|json
  :set input R1,R2,...  attach an input vector to the loaded network
  :set max-summands N | max-fixpoint-cells N | max-pwl-pieces N
  :quit                 leave (also Ctrl-D)
anything else is evaluated as a query against the loaded structure;
queries may also reference builtins, e.g. builtin:eval_node"""


class Repl:
    """Line-oriented interactive session; errors never terminate the loop."""

    def __init__(self, stdin=None, stdout=None):
        self.stdin = stdin or sys.stdin
        self.stdout = stdout or sys.stdout
        self.structure: Optional[WeightedStructure] = None
        self.net: Optional[FnnStructure] = None
        self.inputs: Optional[list[ExtRational]] = None
        self.bindings: dict = {}
        self.format = "plain"
        self.limits = EvalLimits()
        self.max_pwl_pieces = DEFAULT_MAX_PWL_PIECES

    def out(self, text: str) -> None:
        print(text, file=self.stdout)

    def run(self) -> int:
        interactive = self.stdin.isatty()
        if interactive:
            self.out("wsq repl; :help for commands")
        while True:
            if interactive:
                self.stdout.write("wsq> ")
                self.stdout.flush()
            line = self.stdin.readline()
            if not line:
                return EXIT_OK
            line = line.strip()
            if not line:
                continue
            if line in (":quit", ":q"):
                return EXIT_OK
            try:
                self.dispatch(line)
            except (_CliError, ParseError, LoadError, UsageError, ResourceError) as exc:
                self.out(f"error: {exc}")
            except RecursionError:
                self.out("error: expression too deeply nested")

    def dispatch(self, line: str) -> None:
        if line == ":help":
            self.out(_REPL_HELP)
        elif line.startswith(":load"):
            self.cmd_load(line[len(":load") :].strip())
        elif line.startswith(":let"):
            self.cmd_let(line[len(":let") :].strip())
        elif line.startswith(":check"):
            self.cmd_check(line[len(":check") :].strip())
        elif line.startswith(":set"):
            self.cmd_set(line[len(":set") :].strip())
        elif line.startswith(":"):
            self.out(f"unknown command {line.split()[0]!r}; :help lists commands")
        else:
            self.cmd_eval(line)

    def cmd_load(self, path: str) -> None:
        self.structure, self.net = _load_structure_or_fnn(path)
        self.inputs = None
        kind = "network" if self.net is not None else "structure"
        self.out(f"loaded {kind} {path} ({len(self.structure.universe)} elements)")

    def cmd_let(self, rest: str) -> None:
        name, sep, text = rest.partition("=")
        name = name.strip()
        if not sep or not name:
            raise UsageError(":let NAME = QUERY")
        self.bindings[name] = self._query(text.strip())
        self.out(f"{name} bound")

    def cmd_check(self, text: str) -> None:
        _describe_query(self._query(text), self.out)

    def cmd_set(self, rest: str) -> None:
        key, _, value = rest.partition(" ")
        value = value.strip()
        if key == "format":
            if value not in ("plain", "json"):
                raise UsageError("format is plain or json")
            self.format = value
        elif key == "input":
            values = [ExtRational.parse(chunk) for chunk in value.split(",")]
            if self.net is None:
                raise UsageError("load a network before :set input")
            self.inputs = values
        elif key == "max-summands":
            self.limits.max_summands = int(value)
        elif key == "max-fixpoint-cells":
            self.limits.max_fixpoint_cells = int(value)
        elif key == "max-pwl-pieces":
            self.max_pwl_pieces = int(value)
        else:
            raise UsageError(f"unknown option {key!r}")
        self.out("ok")

    def _query(self, text: str):
        if text in self.bindings:
            return self.bindings[text]
        if text.startswith("builtin:"):
            return builtin_query(text[len("builtin:") :])
        return parse(text)

    def cmd_eval(self, text: str) -> None:
        query = self._query(text)
        structure = self.structure
        if structure is None:
            raise UsageError("no structure loaded (:load PATH)")
        if self.inputs is not None and self.net is not None:
            structure = with_input(self.net, self.inputs)
        missing = sorted(free_vars(query))
        if missing:
            raise UsageError(f"unbound variables: {', '.join(missing)}")
        value = evaluate(query, structure, {}, self.limits)
        self.out(_render_value(value, self.format == "json"))


# ---------------------------------------------------------------------------
# Argument parsing and dispatch
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="wsq", description=__doc__.split("\n\n")[0])
    sub = top.add_subparsers(dest="command", required=True)

    def add_limits(p):
        p.add_argument("--max-fixpoint-cells", type=int, default=EvalLimits().max_fixpoint_cells)
        p.add_argument("--max-summands", type=int, default=EvalLimits().max_summands)

    p_eval = sub.add_parser("eval", help="evaluate a query on a structure")
    p_eval.add_argument("structure")
    p_eval.add_argument("query")
    p_eval.add_argument("--bind", action="append", default=[], metavar="VAR=ELEMENT")
    p_eval.add_argument("--input", help="input vector for a network, e.g. 1,1/2")
    p_eval.add_argument("--json", action="store_true", help="emit {'value':..,'kind':..}")
    add_limits(p_eval)

    p_check = sub.add_parser("check", help="analyze a query without a structure")
    p_check.add_argument("query")

    p_fnn = sub.add_parser("fnn", help="network utilities")
    fnn_sub = p_fnn.add_subparsers(dest="fnn_command", required=True)
    for name in ("validate", "forward", "pwl", "integrate", "zero", "pad"):
        p = fnn_sub.add_parser(name)
        p.add_argument("file")
        p.add_argument("--max-pwl-pieces", type=int, default=DEFAULT_MAX_PWL_PIECES)
        if name == "forward":
            p.add_argument("--input", required=True)
        if name == "integrate":
            p.add_argument("--lo", required=True)
            p.add_argument("--hi", required=True)
        if name == "pad":
            p.add_argument("--edge", required=True, metavar="FROM,TO")
            p.add_argument("--k", type=int, required=True)
            p.add_argument("--out", required=True)

    p_repl = sub.add_parser("repl", help="interactive shell")
    p_repl.add_argument("structure", nargs="?")
    return top


def main(argv: Optional[list[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "eval":
            return _cmd_eval(args)
        if args.command == "check":
            return _cmd_check(args)
        if args.command == "fnn":
            return _cmd_fnn(args)
        repl = Repl()
        if args.structure:
            repl.cmd_load(args.structure)
        return repl.run()
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (LoadError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STRUCTURE


if __name__ == "__main__":
    sys.exit(main())
