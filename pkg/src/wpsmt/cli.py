"""Command-line front end.

Reads one script from the given files (concatenated in order, sharing one
symbol table) or from standard input, eliminates the program modalities, and
either prints the resulting plain SMT-LIB script (default, or to -o FILE) or
pipes it command by command to a backend solver and turns the check-sat
answers into an exit code:

  0  every check-sat answered unsat (verified), or pure translation
  1  some check-sat answered sat (counterexample)
  2  some check-sat answered unknown or timed out
  3  usage, input, translation, or solver-spawn error

Solver mode echoes every response line.  After each (check-sat) exactly one
answer line is awaited; (get-model) and friends are read as one balanced
s-expression.  A per-check wall clock (--timeout, default 60 s) maps to
unknown and kills the solver.
"""
from __future__ import annotations

import queue
import subprocess
import sys
import threading
import time
from dataclasses import dataclass, field

from .ast import CheckSat, Command, Raw
from .errors import ToolError, UsageError
from .sexpr import SList, parse_sexprs, print_sexpr
from .surface import Script, SymbolTable, parse_script, script_to_text
from .vcgen import process_script

USAGE = """\
usage: wpsmt [options] [file ...] [-- solver command ...]

Reads SMT-LIB scripts extended with wp/box/dia program modalities and
assert-counterexample, and emits plain SMT-LIB.  With no files, reads
standard input.

options:
  -o FILE        write the translated script to FILE instead of stdout
  --timeout S    wall-clock seconds per check-sat in solver mode (default 60)
  -z3            run the translated script through `z3 -in`
  -cvc4          run it through `cvc4 --lang smt2 --incremental`
  -cvc5          run it through `cvc5 --lang smt2 --incremental`
  -- CMD ARG...  run it through an explicit solver command
"""

ABBREVIATIONS = {
    "-z3": ["z3", "-in"],
    "-cvc4": ["cvc4", "--lang", "smt2", "--incremental"],
    "-cvc5": ["cvc5", "--lang", "smt2", "--incremental"],
}

# commands whose solver response is a whole s-expression, not a single line
BALANCED_RESPONSE = frozenset(
    ["get-model", "get-value", "get-assignment", "get-info", "get-option",
     "get-assertions", "get-unsat-core", "get-unsat-assumptions", "get-proof"])

ANSWERS = frozenset(["sat", "unsat", "unknown"])


@dataclass
class Invocation:
    inputs: list[str] = field(default_factory=list)
    output: str | None = None
    solver: list[str] | None = None
    timeout: float = 60.0


def parse_args(argv: list[str]) -> Invocation:
    inv = Invocation()
    i = 0
    while i < len(argv):
        a = argv[i]
        if a == "--":
            if inv.solver is not None:
                raise UsageError("more than one solver given")
            inv.solver = list(argv[i + 1:])
            if not inv.solver:
                raise UsageError("missing solver command after --")
            break
        if a == "-o":
            if inv.output is not None:
                raise UsageError("more than one -o")
            if i + 1 >= len(argv):
                raise UsageError("-o needs a file argument")
            inv.output = argv[i + 1]
            i += 2
            continue
        if a == "--timeout":
            if i + 1 >= len(argv):
                raise UsageError("--timeout needs a number of seconds")
            try:
                inv.timeout = float(argv[i + 1])
            except ValueError:
                raise UsageError(f"bad --timeout value {argv[i + 1]!r}") from None
            if inv.timeout <= 0:
                raise UsageError("--timeout must be positive")
            i += 2
            continue
        if a in ABBREVIATIONS:
            if inv.solver is not None:
                raise UsageError("more than one solver given")
            inv.solver = list(ABBREVIATIONS[a])
            i += 1
            continue
        if a.startswith("-"):
            raise UsageError(f"unknown flag {a}")
        inv.inputs.append(a)
        i += 1
    if inv.output is not None and inv.solver is not None:
        raise UsageError("-o and a solver are mutually exclusive")
    return inv


def _command_head(cmd: Command) -> str | None:
    if isinstance(cmd, CheckSat):
        return "check-sat"
    if isinstance(cmd, Raw) and isinstance(cmd.form, SList) and len(cmd.form):
        head = cmd.form[0]
        return getattr(head, "text", None)
    return None


def _balanced(text: str) -> bool:
    depth = 0
    in_str = False
    content = False
    i = 0
    while i < len(text):
        c = text[i]
        if in_str:
            if c == '"':
                if i + 1 < len(text) and text[i + 1] == '"':
                    i += 1
                else:
                    in_str = False
        elif c == '"':
            in_str = True
            content = True
        elif c == "(":
            depth += 1
            content = True
        elif c == ")":
            depth -= 1
        elif not c.isspace():
            content = True
        i += 1
    return content and depth <= 0 and not in_str


class SolverSession:
    """A line-oriented conversation with a solver subprocess.  A pump thread
    feeds response lines into a queue; None marks end of stream."""

    def __init__(self, argv: list[str]):
        try:
            self.proc = subprocess.Popen(
                argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                text=True, bufsize=1)
        except OSError as e:
            raise ToolError("E_SPAWN", f"cannot run solver {argv[0]}: {e}") from e
        self.lines: queue.Queue = queue.Queue()
        self.eof = False
        t = threading.Thread(target=self._pump, daemon=True)
        t.start()

    def _pump(self):
        for line in iter(self.proc.stdout.readline, ""):
            self.lines.put(line)
        self.lines.put(None)

    def send(self, text: str) -> bool:
        try:
            self.proc.stdin.write(text + "\n")
            self.proc.stdin.flush()
            return True
        except (OSError, ValueError):
            return False

    def next_line(self, deadline: float) -> tuple[str, str | None]:
        """-> ("line", text) | ("eof", None) | ("timeout", None)"""
        if self.eof:
            return ("eof", None)
        while True:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                return ("timeout", None)
            try:
                item = self.lines.get(timeout=min(remaining, 0.5))
            except queue.Empty:
                continue
            if item is None:
                self.eof = True
                return ("eof", None)
            return ("line", item)

    def drain_pending(self):
        """Echo whatever the solver already printed, without waiting."""
        while True:
            try:
                item = self.lines.get_nowait()
            except queue.Empty:
                return
            if item is None:
                self.eof = True
                return
            sys.stdout.write(item)

    def kill(self):
        try:
            self.proc.kill()
        except OSError:
            pass

    def finish(self, grace: float):
        try:
            if self.proc.stdin and not self.proc.stdin.closed:
                self.proc.stdin.close()
        except OSError:
            pass
        deadline = time.monotonic() + grace
        while not self.eof:
            kind, line = self.next_line(deadline)
            if kind == "line":
                sys.stdout.write(line)
            else:
                break
        try:
            self.proc.wait(timeout=max(0.1, deadline - time.monotonic()))
        except subprocess.TimeoutExpired:
            self.kill()
        self.drain_pending()


def _exit_code(answers: list[str]) -> int:
    if any(a == "sat" for a in answers):
        return 1
    if any(a != "unsat" for a in answers):
        return 2
    return 0


def drive_solver(commands: list[Command], argv: list[str], timeout: float) -> int:
    session = SolverSession(argv)
    answers: list[str] = []
    stopped = False
    for cmd in commands:
        session.drain_pending()
        text = print_sexpr(cmd.to_sexpr())
        if not session.send(text):
            print("wpsmt: solver closed its input unexpectedly", file=sys.stderr)
            if isinstance(cmd, CheckSat):
                answers.append("unknown")
            stopped = True
            break
        head = _command_head(cmd)
        if isinstance(cmd, CheckSat):
            deadline = time.monotonic() + timeout
            while True:
                kind, line = session.next_line(deadline)
                if kind == "line":
                    sys.stdout.write(line)
                    sys.stdout.flush()
                    if line.strip() in ANSWERS:
                        answers.append(line.strip())
                        break
                    continue
                if kind == "timeout":
                    answers.append("timeout")
                    print("wpsmt: check-sat timed out, treating as unknown",
                          file=sys.stderr)
                else:
                    answers.append("unknown")
                    print("wpsmt: solver exited before answering check-sat",
                          file=sys.stderr)
                session.kill()
                stopped = True
                break
            if stopped:
                break
        elif head in BALANCED_RESPONSE:
            deadline = time.monotonic() + timeout
            buf = ""
            while True:
                kind, line = session.next_line(deadline)
                if kind == "line":
                    sys.stdout.write(line)
                    sys.stdout.flush()
                    buf += line
                    if _balanced(buf):
                        break
                    continue
                if kind == "timeout":
                    print(f"wpsmt: no complete response to ({head} ...), "
                          "giving up", file=sys.stderr)
                    session.kill()
                else:
                    print("wpsmt: solver exited mid-response", file=sys.stderr)
                stopped = True
                break
            if stopped:
                break
        elif head == "echo":
            deadline = time.monotonic() + timeout
            kind, line = session.next_line(deadline)
            if kind == "line":
                sys.stdout.write(line)
                sys.stdout.flush()
            elif kind == "timeout":
                print("wpsmt: no response to (echo ...)", file=sys.stderr)
                session.kill()
                stopped = True
                break
        elif head == "exit":
            break
    session.finish(grace=5.0)
    return _exit_code(answers)


def _read_sources(inv: Invocation) -> list[tuple[str, str]]:
    if not inv.inputs:
        return [("<stdin>", sys.stdin.read())]
    out = []
    for path in inv.inputs:
        try:
            with open(path, encoding="utf-8") as fh:
                out.append((path, fh.read()))
        except OSError as e:
            raise ToolError("E_IO", f"cannot read {path}: {e.strerror or e}") from e
    return out


def run(inv: Invocation) -> int:
    table = SymbolTable()
    commands: list[Command] = []
    command_file: dict[int, str] = {}
    for fname, text in _read_sources(inv):
        try:
            forms = parse_sexprs(text)
            part = parse_script(forms, table)
        except ToolError as err:
            print(f"{fname}:{err}", file=sys.stderr)
            return 3
        for c in part.commands:
            command_file[id(c)] = fname
            commands.append(c)
    try:
        processed = process_script(Script(commands, table))
    except ToolError as err:
        fname = command_file.get(id(getattr(err, "command", None)), "<input>")
        print(f"{fname}:{err}", file=sys.stderr)
        return 3

    if inv.solver is not None:
        return drive_solver(list(processed.commands), inv.solver, inv.timeout)

    text = script_to_text(processed)
    if inv.output is not None:
        try:
            with open(inv.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as e:
            print(f"wpsmt: E_IO: cannot write {inv.output}: {e.strerror or e}",
                  file=sys.stderr)
            return 3
    else:
        sys.stdout.write(text)
    return 0


def main(argv: list[str] | None = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    try:
        inv = parse_args(argv)
    except UsageError as err:
        print(f"wpsmt: {err}", file=sys.stderr)
        print(USAGE, file=sys.stderr, end="")
        return 3
    try:
        return run(inv)
    except ToolError as err:
        print(f"wpsmt: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
