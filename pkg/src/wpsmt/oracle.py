"""Concrete bounded-domain interpreter and differential-testing harness.

Programs over Int and Bool variables are executed exhaustively: every way of
resolving a contract statement's nondeterminism within [-bound, bound] is
followed.  Quantifiers in formulas are evaluated by enumeration over the same
window.  This gives an independent ground truth to compare the symbolic
transformer against, at every initial state.

Verdicts are three-valued because execution is fuel-bounded:

  wp   false on an abort or a failing final state; unknown if a deeper path
       was cut off while everything seen was fine; true otherwise
  box  same shape: a cut-off path could still hide a failing final state
  dia  true as soon as one non-aborting run reaches the target; false only
       when the whole (finite) tree was explored without one

Abort is demonic at the point it happens: a contract whose precondition fails
kills the run it happens on.  For dia that run is simply not a witness; other
resolutions may still be.
"""
from __future__ import annotations

import operator
import random
from dataclasses import dataclass, field as dc_field

from . import vcgen
from .ast import (App, Assign, Block, BOOL, If, INT, Let, Literal, Modal, Old,
                  Program, Quant, Sort, Spec, Spliced, Term, Var, While,
                  int_lit, t_and, t_implies, t_not, t_or)
from .errors import OracleError
from .rewrite import FreshNames
from .sexpr import print_sexpr

State = dict[str, object]  # name -> int | bool
FrozenState = tuple[tuple[str, object], ...]


def freeze(state: State) -> FrozenState:
    return tuple(sorted(state.items()))


@dataclass
class OutcomeSet:
    """Partition of the resolutions of a program run: terminating finals,
    aborted runs, and runs cut off by fuel."""
    finals: set[FrozenState] = dc_field(default_factory=set)
    aborted: bool = False
    exhausted: bool = False

    def merge(self, other: "OutcomeSet"):
        self.finals |= other.finals
        self.aborted = self.aborted or other.aborted
        self.exhausted = self.exhausted or other.exhausted


def _euclidean_div(a: int, b: int) -> int:
    if b == 0:
        raise OracleError("E_UNSUPPORTED", "division by zero has no fixed value")
    q = a // b if b > 0 else -(a // -b)
    if a - b * q < 0:
        q = q - 1 if b > 0 else q + 1
    return q


def domain(sort: Sort, bound: int):
    if sort == INT:
        return range(-bound, bound + 1)
    if sort == BOOL:
        return (False, True)
    raise OracleError("E_UNSUPPORTED", f"no finite domain for sort {sort}")


def eval_term(t: Term, state: State, old_state: State | None, bound: int):
    """Evaluate a first-order term over the bounded domain.  `old_state`
    gives the meaning of (old ...); pass None where no pre-state exists."""
    match t:
        case Var(name=n):
            if n not in state:
                raise OracleError("E_UNSUPPORTED", f"unbound variable {n}")
            return state[n]
        case Literal(kind="numeral", text=txt):
            return int(txt)
        case Literal(kind="bool", text=txt):
            return txt == "true"
        case Literal():
            raise OracleError("E_UNSUPPORTED", f"literal {t.text} outside Int/Bool")
        case Old(inner=u):
            if old_state is None:
                raise OracleError("E_UNSUPPORTED", "old has no meaning here")
            return eval_term(u, old_state, old_state, bound)
        case Spliced(inner=u):
            return eval_term(u, state, old_state, bound)
        case Let(bindings=bindings, body=body):
            ext = dict(state)
            for n, v in bindings:  # parallel: values in the outer state
                ext[n] = eval_term(v, state, old_state, bound)
            return eval_term(body, ext, old_state, bound)
        case Quant(kind=kind, bound=binders, body=body):
            return _eval_quant(kind, list(binders), body, state, old_state, bound)
        case App(fn=fn, args=args):
            return _eval_app(fn, args, state, old_state, bound)
        case Modal():
            raise OracleError("E_UNSUPPORTED", "cannot evaluate a program modality directly")
    raise TypeError(f"not a term: {t!r}")


def _eval_quant(kind, binders, body, state, old_state, bound):
    if not binders:
        return eval_term(body, state, old_state, bound)
    n, s = binders[0]
    rest = binders[1:]
    for v in domain(s, bound):
        ext = dict(state)
        ext[n] = v
        r = _eval_quant(kind, rest, body, ext, old_state, bound)
        if kind == "forall" and not r:
            return False
        if kind == "exists" and r:
            return True
    return kind == "forall"


def _eval_app(fn, args, state, old_state, bound):
    ev = lambda a: eval_term(a, state, old_state, bound)
    if fn == "not":
        return not ev(args[0])
    if fn == "and":
        return all(ev(a) for a in args)
    if fn == "or":
        return any(ev(a) for a in args)
    if fn == "xor":
        out = False
        for a in args:
            out ^= bool(ev(a))
        return out
    if fn == "=>":
        vals = [ev(a) for a in args]  # right-associated chain
        out = vals[-1]
        for v in reversed(vals[:-1]):
            out = (not v) or out
        return out
    if fn == "=":
        vals = [ev(a) for a in args]
        return all(v == vals[0] for v in vals)
    if fn == "distinct":
        vals = [ev(a) for a in args]
        return len(set(vals)) == len(vals)
    if fn == "ite":
        return ev(args[1]) if ev(args[0]) else ev(args[2])
    if fn == "+":
        return sum(ev(a) for a in args)
    if fn == "-":
        vals = [ev(a) for a in args]
        if len(vals) == 1:
            return -vals[0]
        out = vals[0]
        for v in vals[1:]:
            out -= v
        return out
    if fn == "*":
        out = 1
        for a in args:
            out *= ev(a)
        return out
    if fn == "div":
        return _euclidean_div(ev(args[0]), ev(args[1]))
    if fn == "mod":
        a, b = ev(args[0]), ev(args[1])
        return a - b * _euclidean_div(a, b)
    if fn == "abs":
        return abs(ev(args[0]))
    if fn in ("<", "<=", ">", ">="):
        op = {"<": operator.lt, "<=": operator.le, ">": operator.gt, ">=": operator.ge}[fn]
        vals = [ev(a) for a in args]
        return all(op(x, y) for x, y in zip(vals, vals[1:]))
    raise OracleError("E_UNSUPPORTED", f"{fn} is outside the interpreted fragment")


def run_program(p: Program, state: State, bound: int, fuel: int) -> OutcomeSet:
    """Execute `p` from `state`, following every resolution of contract
    nondeterminism.  Loop iterations spend fuel; running out with the test
    still true marks the outcome set exhausted."""
    out = OutcomeSet()
    match p:
        case Assign(bindings=bs):
            vals = {v.name: eval_term(rhs, state, None, bound) for v, rhs in bs}
            out.finals.add(freeze({**state, **vals}))
        case Spec(vars=xs, pre=pre, post=post):
            if not eval_term(pre, state, None, bound):
                out.aborted = True
                return out
            _spec_successors(list(xs), dict(state), state, post, bound, out)
        case Block(body=body):
            return _run_seq(list(body), state, bound, fuel)
        case If(test=b, then=p1, orelse=p2):
            branch = p1 if eval_term(b, state, None, bound) else p2
            return run_program(branch, state, bound, fuel)
        case While(test=b, body=body):
            if not eval_term(b, state, None, bound):
                out.finals.add(freeze(state))
                return out
            if fuel <= 0:
                out.exhausted = True
                return out
            step = run_program(body, state, bound, fuel)
            out.aborted = step.aborted
            out.exhausted = step.exhausted
            for f in step.finals:
                out.merge(run_program(p, dict(f), bound, fuel - 1))
        case _:
            raise TypeError(f"not a program: {p!r}")
    return out


def _spec_successors(xs, acc: State, entry: State, post: Term, bound: int, out: OutcomeSet):
    if not xs:
        if eval_term(post, acc, entry, bound):
            out.finals.add(freeze(acc))
        return
    n, s = xs[0]
    for v in domain(s, bound):
        acc2 = dict(acc)
        acc2[n] = v
        _spec_successors(xs[1:], acc2, entry, post, bound, out)


def _run_seq(progs, state: State, bound: int, fuel: int) -> OutcomeSet:
    out = OutcomeSet()
    if not progs:
        out.finals.add(freeze(state))
        return out
    first = run_program(progs[0], state, bound, fuel)
    out.aborted = first.aborted
    out.exhausted = first.exhausted
    for f in first.finals:
        out.merge(_run_seq(progs[1:], dict(f), bound, fuel))
    return out


def holds_outcome(mode: str, outcome: OutcomeSet, post: Term, entry: State, bound: int) -> str:
    """Three-valued verdict for mode(program, post) given a finished run.
    old in `post` refers to the entry state."""
    ok = [eval_term(post, dict(f), entry, bound) for f in outcome.finals]
    if mode in ("wp", "box"):
        if outcome.aborted or not all(ok):
            return "false"
        if outcome.exhausted:
            return "unknown"
        return "true"
    if mode == "dia":
        if any(ok):
            return "true"
        if outcome.exhausted:
            return "unknown"
        return "false"
    raise ValueError(f"unknown mode {mode}")


def holds(mode: str, p: Program, post: Term, state: State, bound: int, fuel: int) -> str:
    return holds_outcome(mode, run_program(p, state, bound, fuel), post, state, bound)


# ------------------------------------------------------- program generator

_CMP = ("<", "<=", ">", ">=", "=")


def _rand_int_expr(rng: random.Random, names, bound: int, depth: int, allow_old=False) -> Term:
    if depth <= 0 or rng.random() < 0.45:
        if rng.random() < 0.5:
            return int_lit(rng.randint(-bound, bound))
        v = Var(rng.choice(names), INT)
        if allow_old and rng.random() < 0.3:
            return Old(v)
        return v
    op = rng.choice(("+", "-", "*"))
    a = _rand_int_expr(rng, names, bound, depth - 1, allow_old)
    b = _rand_int_expr(rng, names, bound, depth - 1, allow_old)
    return App(op, (a, b), INT)


def _rand_formula(rng: random.Random, names, bound: int, depth: int, allow_old=False) -> Term:
    if depth <= 0 or rng.random() < 0.4:
        cmp = rng.choice(_CMP)
        a = _rand_int_expr(rng, names, bound, 1, allow_old)
        b = _rand_int_expr(rng, names, bound, 1, allow_old)
        return App(cmp, (a, b), BOOL)
    k = rng.random()
    if k < 0.35:
        return t_and(_rand_formula(rng, names, bound, depth - 1, allow_old),
                     _rand_formula(rng, names, bound, depth - 1, allow_old))
    if k < 0.7:
        return t_or(_rand_formula(rng, names, bound, depth - 1, allow_old),
                    _rand_formula(rng, names, bound, depth - 1, allow_old))
    if k < 0.85:
        return t_not(_rand_formula(rng, names, bound, depth - 1, allow_old))
    return t_implies(_rand_formula(rng, names, bound, depth - 1, allow_old),
                     _rand_formula(rng, names, bound, depth - 1, allow_old))


def random_program(rng: random.Random, names, bound: int, max_statements: int,
                   spec_var_budget: int = 3, true_pres: bool = False) -> Program:
    """A loop-free program over the given Int variables.  `spec_var_budget`
    caps the total number of contract-chosen variables so that exhaustive
    resolution and quantifier enumeration stay cheap."""
    budget = [max_statements, spec_var_budget]

    def stmt(depth: int) -> Program:
        budget[0] -= 1
        k = rng.random()
        if k < 0.40 or depth > 2 or budget[0] <= 0:
            targets = rng.sample(names, rng.randint(1, min(2, len(names))))
            pairs = tuple((Var(n, INT), _rand_int_expr(rng, names, bound, 2)) for n in targets)
            return Assign(pairs)
        if k < 0.65 and budget[1] > 0:
            count = rng.randint(1, min(2, budget[1]))
            budget[1] -= count
            chosen = rng.sample(names, count)
            pre = Literal("bool", "true", BOOL) if (true_pres or rng.random() < 0.5) \
                else _rand_formula(rng, names, bound, 1)
            post = _rand_formula(rng, names, bound, 1, allow_old=True)
            return Spec(tuple((n, INT) for n in chosen), pre, post)
        if k < 0.85:
            test = _rand_formula(rng, names, bound, 1)
            return If(test, stmt(depth + 1), stmt(depth + 1))
        inner = []
        while budget[0] > 0 and (not inner or rng.random() < 0.5):
            inner.append(stmt(depth + 1))
        return Block(tuple(inner))

    body = []
    while budget[0] > 0 and (not body or rng.random() < 0.6):
        body.append(stmt(0))
    return Block(tuple(body))


# ------------------------------------------------------ differential check

@dataclass
class Mismatch:
    mode: str
    state: FrozenState
    oracle: str
    formula: bool
    program: Program
    post: Term

    def render(self) -> str:
        return ("MISMATCH\t{mode}\t{state}\toracle={oracle}\tformula={formula}\t"
                "{prog}\t{post}").format(
            mode=self.mode, state=dict(self.state), oracle=self.oracle,
            formula=self.formula, prog=print_sexpr(self.program.to_sexpr()),
            post=print_sexpr(self.post.to_sexpr()))


@dataclass
class Report:
    trials: int = 0
    comparisons: int = 0
    skipped_unknown: int = 0
    mismatches: list[Mismatch] = dc_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def render(self) -> str:
        lines = [f"trials={self.trials} comparisons={self.comparisons} "
                 f"skipped_unknown={self.skipped_unknown} mismatches={len(self.mismatches)}"]
        lines += [m.render() for m in self.mismatches]
        return "\n".join(lines)


def default_reduce(mode: str, p: Program, post: Term) -> Term:
    names = FreshNames(reserved=set())
    st = vcgen.ExecState({}, {}, names)
    return vcgen.reduce(mode, p, post, st)


def _all_states(names, bound: int):
    def go(rest, acc):
        if not rest:
            yield dict(acc)
            return
        for v in range(-bound, bound + 1):
            acc[rest[0]] = v
            yield from go(rest[1:], acc)
    yield from go(list(names), {})


def differential_check(trials: int, bound: int = 2, fuel: int = 32,
                       max_statements: int = 4, num_vars: int = 2,
                       seed: int = 0, reduce_fn=None,
                       modes=("wp", "box", "dia")) -> Report:
    """Compare the symbolic transformer against exhaustive concrete execution
    on random loop-free programs, over every initial state in the window.
    Mismatches are minimized by statement deletion before reporting."""
    if reduce_fn is None:
        reduce_fn = default_reduce
    rng = random.Random(seed)
    names = [f"v{i}" for i in range(num_vars)]
    names[0:2] = ["x", "y"][:num_vars]
    report = Report(trials=trials)
    for _ in range(trials):
        prog = random_program(rng, names, bound, max_statements)
        post = _rand_formula(rng, names, bound, 2)
        formulas = {m: reduce_fn(m, prog, post) for m in modes}
        for state in _all_states(names, bound):
            outcome = run_program(prog, state, bound, fuel)
            for m in modes:
                verdict = holds_outcome(m, outcome, post, state, bound)
                if verdict == "unknown":
                    report.skipped_unknown += 1
                    continue
                got = bool(eval_term(formulas[m], state, None, bound))
                report.comparisons += 1
                if got != (verdict == "true"):
                    small = _shrink(prog, post, m, state, bound, fuel, reduce_fn)
                    report.mismatches.append(
                        Mismatch(m, freeze(state), verdict, got, small, post))
    return report


def _still_mismatching(prog, post, mode, state, bound, fuel, reduce_fn) -> bool:
    try:
        verdict = holds(mode, prog, post, state, bound, fuel)
        if verdict == "unknown":
            return False
        got = bool(eval_term(reduce_fn(mode, prog, post), state, None, bound))
        return got != (verdict == "true")
    except OracleError:
        return False


def _shrink(prog: Program, post: Term, mode: str, state: State, bound: int,
            fuel: int, reduce_fn) -> Program:
    """Greedy statement deletion: drop top-level statements while the
    disagreement persists."""
    if not isinstance(prog, Block):
        return prog
    body = list(prog.body)
    changed = True
    while changed and len(body) > 1:
        changed = False
        for i in range(len(body)):
            cand = Block(tuple(body[:i] + body[i + 1:]))
            if _still_mismatching(cand, post, mode, state, bound, fuel, reduce_fn):
                body.pop(i)
                changed = True
                break
    return Block(tuple(body))
