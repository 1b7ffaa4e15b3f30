"""Command-line front end.

    avlang run FILE [--trace[=default|verbose]] [--max-steps N] [--output PATH]
    avlang repl     [--trace[=default|verbose]] [--max-steps N] [--output PATH]

Program output goes to stdout (or ``--output``); traces, REPL status lines
and diagnostics go to stderr.  Exit status: 0 when every statement
succeeds, 1 when one has no derivation, 2 on any error.
"""

from __future__ import annotations

import argparse
import sys
from contextlib import ExitStack
from dataclasses import dataclass
from pathlib import Path
from typing import TextIO

from avlang.ast import Program
from avlang.errors import AvError, BudgetExceeded, ParseError
from avlang.interpreter import DEFAULT_MAX_STEPS, Budget, Failure, Interpreter
from avlang.parser import parse_source, render_term
from avlang.trace import EMPTY_TRACE, Verbosity, render_trace

EXIT_OK, EXIT_FAILURE, EXIT_ERROR = 0, 1, 2


@dataclass
class CliConfig:
    input: Path | None
    trace: Verbosity = Verbosity.OFF
    max_steps: int = DEFAULT_MAX_STEPS
    output: Path | None = None


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="avlang", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--trace",
        nargs="?",
        const="default",
        default="off",
        choices=["off", "default", "verbose"],
        help="print the execution trace to stderr",
    )
    common.add_argument("--max-steps", type=_positive, default=DEFAULT_MAX_STEPS)
    common.add_argument("--output", type=Path, help="write program output here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", parents=[common], help="run an .av file")
    run.add_argument("file", type=Path)
    sub.add_parser("repl", parents=[common], help="interactive session")
    return parser


class Session:
    """Clause set and machine state that persist across statements."""

    def __init__(self, out: TextIO, err: TextIO, trace: Verbosity, max_steps: int):
        self.interp = Interpreter(out, max_steps)
        self.err = err
        self.trace = trace
        self.max_steps = max_steps
        self.program = Program()
        self.last_directives = 0

    def feed(self, source: str, budget: Budget | None = None) -> int:
        """Parse and run *source*; declarations are added before directives run."""
        unit = parse_source(source)
        self.program = self.program.with_clauses(*unit.declarations)
        self.last_directives = len(unit.directives)
        budget = budget or Budget(self.max_steps)
        status = EXIT_OK
        for g, line in zip(unit.directives, unit.directive_lines):
            result = self.interp.exec(self.program, g, budget=budget, trace=EMPTY_TRACE)
            if isinstance(result, Failure):
                self.err.write(f"line {line}: no derivation\n")
                return EXIT_FAILURE
            self.program = result.program
            if self.trace is not Verbosity.OFF:
                self.err.write(render_trace(result.trace, self.trace))
        return status

    def state_lines(self) -> list[str]:
        return [f"{k} = {render_term(v)}" for k, v in sorted(self.program.theta.items())]


def _diagnose(err: TextIO, exc: Exception, where: str = "") -> None:
    prefix = f"{where}:" if where else ""
    if isinstance(exc, ParseError):
        err.write(f"{prefix}{exc.line}:{exc.column}: parse error: {exc.message}")
        if exc.expected:
            err.write(f" (expected {', '.join(exc.expected)})")
        err.write("\n")
    elif isinstance(exc, BudgetExceeded):
        err.write(f"{prefix} error: {exc} (raise it with --max-steps)\n".lstrip())
    else:
        err.write(f"{prefix} error: {exc}\n".lstrip())


def run_file(cfg: CliConfig, out: TextIO, err: TextIO) -> int:
    try:
        source = cfg.input.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        err.write(f"avlang: cannot read {cfg.input}: {e}\n")
        return EXIT_ERROR
    session = Session(out, err, cfg.trace, cfg.max_steps)
    try:
        return session.feed(source)
    except AvError as e:
        _diagnose(err, e, str(cfg.input))
        return EXIT_ERROR


def repl(cfg: CliConfig, inp: TextIO, out: TextIO, err: TextIO) -> int:
    """Read declarations and ``run`` directives until EOF or ``:quit``.

    A statement may span several lines; it is complete once a line ends
    with ``.``.  Meta-commands: ``:trace on|off|verbose``, ``:state``,
    ``:quit``.
    """
    session = Session(out, err, cfg.trace, cfg.max_steps)
    interactive = inp.isatty()
    buffer: list[str] = []
    while True:
        if interactive:
            err.write("... " if buffer else "av> ")
            err.flush()
        line = inp.readline()
        if not line:
            break
        stripped = line.strip()
        if not buffer and stripped.startswith(":"):
            cmd, _, arg = stripped[1:].partition(" ")
            arg = arg.strip()
            if cmd in ("quit", "q"):
                break
            if cmd == "state":
                for entry in session.state_lines():
                    out.write(entry + "\n")
                out.flush()
            elif cmd == "trace" and arg in ("on", "off", "verbose", "default"):
                session.trace = {
                    "on": Verbosity.DEFAULT,
                    "default": Verbosity.DEFAULT,
                    "off": Verbosity.OFF,
                    "verbose": Verbosity.VERBOSE,
                }[arg]
            else:
                err.write(f"unknown command {stripped!r}\n")
            continue
        if not stripped and not buffer:
            continue
        buffer.append(line)
        code = stripped.split("%", 1)[0].rstrip()
        if not code.endswith("."):
            continue
        text = "".join(buffer)
        buffer.clear()
        try:
            status = session.feed(text)
        except AvError as e:
            _diagnose(err, e)
            continue
        if session.last_directives:
            err.write("ok\n" if status == EXIT_OK else "no\n")
        else:
            err.write("defined\n")
        out.flush()
    if buffer:
        err.write("incomplete statement at end of input\n")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = CliConfig(
        input=getattr(args, "file", None),
        trace=Verbosity(args.trace),
        max_steps=args.max_steps,
        output=args.output,
    )
    with ExitStack() as stack:
        out = sys.stdout
        if cfg.output is not None:
            try:
                out = stack.enter_context(open(cfg.output, "w", encoding="utf-8"))
            except OSError as e:
                sys.stderr.write(f"avlang: cannot write {cfg.output}: {e}\n")
                return EXIT_ERROR
        if args.command == "run":
            return run_file(cfg, out, sys.stderr)
        return repl(cfg, sys.stdin, out, sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
