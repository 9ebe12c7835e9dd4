"""Elimination of program modalities.

Programs are executed symbolically from front to back.  Instead of
substituting eagerly, the walker carries an environment of delayed
substitutions (variable -> term) and applies it when it reaches a leaf; a
second map gives the meaning of (old x) at the current point, when one is
defined.  Each statement kind contributes its transformer:

  assign   update the environment simultaneously and continue
  block    nest to the right
  if       split on the (rewritten) test
  spec     fresh final values, assume the contract, continue on those
  while    contract abstraction plus base, step and (for wp) measure premises

The while premises follow the induction scheme where the loop's remaining
iterations are abstracted by the loop contract itself: inside the step
premise, old in the contract refers to the state after the first body
execution, while old in the overall target refers to the iteration entry.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

from .ast import (App, Assert, AssertCounterexample, Assign, Block, BOOL,
                  Command, If, INT, Let, Literal, Modal, Old, Program, Quant,
                  Raw, Sort, Spec, Spliced, Term, TRUE, Var, While, int_lit,
                  t_and, t_implies, t_not)
from .errors import VcError
from .rewrite import (FreshNames, contains_modal, contains_old, free_vars,
                      modified_vars, substitute)
from .sexpr import Atom, SExpr, SList
from .surface import Script

# heads that must never appear in emitted output
EXTENSION_HEADS = frozenset(
    ["wp", "box", "dia", "old", "assign", "spec", "block", "while",
     "assert-counterexample"])


@dataclass
class ExecState:
    """Where symbolic execution currently stands.

    env     delayed substitution for program variables (missing = identity)
    oldmap  meaning of (old x), or None when no pre-state is defined here
    names   fresh-name source shared across one run
    """
    env: dict[str, Term]
    oldmap: dict[str, Term] | None
    names: FreshNames

    def with_env(self, updates: dict[str, Term]) -> "ExecState":
        return ExecState({**self.env, **updates}, self.oldmap, self.names)


def identity_state(names: FreshNames, with_old: bool = True) -> ExecState:
    return ExecState({}, {} if with_old else None, names)


def lower_term(t: Term, st: ExecState) -> Term:
    """Apply the delayed substitution, resolve old, eliminate modalities."""
    match t:
        case Var(name=n):
            return st.env.get(n, t)
        case Literal():
            return t
        case Spliced(inner=u):
            return u
        case App(fn=fn, args=args, sort=s):
            return App(fn, tuple(lower_term(a, st) for a in args), s)
        case Old(inner=u):
            if st.oldmap is None:
                raise VcError("E_OLD_CONTEXT", "old is not defined here")
            snap = ExecState(dict(st.oldmap), st.oldmap, st.names)
            return lower_term(u, snap)
        case Quant(kind=k, bound=bound, body=body):
            bound2, body2, st2 = _under_binders(bound, body, st)
            return Quant(k, tuple(bound2), lower_term(body2, st2))
        case Let(bindings=bindings, body=body):
            vals = [(n, lower_term(v, st)) for n, v in bindings]
            named = [(n, v.sort) for n, v in vals]
            bound2, body2, st2 = _under_binders(named, body, st)
            return Let(tuple((n2, v) for (n2, _), (_, v) in zip(bound2, vals)),
                       lower_term(body2, st2))
        case Modal(mode=mode, program=p, post=q):
            return reduce(mode, p, q, st)
    raise TypeError(f"not a term: {t!r}")


def _under_binders(bound, body: Term, st: ExecState):
    """Shadow the binders in env/oldmap and rename any binder that would
    capture a variable of a substituted range term."""
    names = {n for n, _ in bound}
    fv = free_vars(body)
    env2 = {k: v for k, v in st.env.items() if k not in names}
    old2 = None if st.oldmap is None else {k: v for k, v in st.oldmap.items() if k not in names}
    danger: set[str] = set()
    for k, v in env2.items():
        if k in fv:
            danger |= free_vars(v)
    if old2:
        for k, v in old2.items():
            if k in fv:
                danger |= free_vars(v)
    bound2 = []
    renaming: dict[str, Term] = {}
    avoid = danger | fv | names
    for n, s in bound:
        if n in danger:
            n2 = st.names.fresh(n, avoid)
            renaming[n] = Var(n2, s)
            bound2.append((n2, s))
        else:
            bound2.append((n, s))
    if renaming:
        body = substitute(body, renaming, st.names)
    return bound2, body, ExecState(env2, old2, st.names)


def reduce(mode: str, p: Program, post: Term, st: ExecState) -> Term:
    """Transform `mode`(p, post) into a first-order formula at state `st`."""
    match p:
        case Assign(bindings=bs):
            vals = {v.name: lower_term(rhs, st) for v, rhs in bs}  # simultaneous
            return lower_term(post, st.with_env(vals))
        case Block(body=body):
            if not body:
                return lower_term(post, st)
            if len(body) == 1:
                return reduce(mode, body[0], post, st)
            return reduce(mode, body[0], Modal(mode, Block(body[1:]), post), st)
        case If(test=b, then=p1, orelse=p2):
            b2 = lower_term(b, st)
            r1 = reduce(mode, p1, post, st)
            r2 = reduce(mode, p2, post, st)
            return t_and(t_implies(b2, r1), t_implies(t_not(b2), r2))
        case Spec(vars=xs, pre=phi, post=psi):
            return reduce_spec(mode, xs, phi, psi, post, st)
        case While():
            return reduce_while(mode, p, post, st)
    raise TypeError(f"not a program: {p!r}")


def reduce_spec(mode: str, xs, phi: Term, psi: Term, post: Term, st: ExecState) -> Term:
    """Contract statement: the precondition must hold now; the changed
    variables take fresh final values constrained by the postcondition, in
    which old refers to the state at the statement itself."""
    phi2 = lower_term(phi, st)
    ys = [(st.names.fresh(n), s) for n, s in xs]
    env_y = {n: Var(y, s) for (n, s), (y, _) in zip(xs, ys)}
    st_psi = ExecState({**st.env, **env_y}, dict(st.env), st.names)
    psi2 = lower_term(psi, st_psi)
    st_post = ExecState({**st.env, **env_y}, st.oldmap, st.names)
    post2 = lower_term(post, st_post)
    if mode == "dia":
        inner = t_and(psi2, post2)
        return t_and(phi2, Quant("exists", tuple(ys), inner) if ys else inner)
    inner = t_implies(psi2, post2)
    return t_and(phi2, Quant("forall", tuple(ys), inner) if ys else inner)


def _close(ys, body: Term) -> Term:
    return Quant("forall", tuple(ys), body) if ys else body


def reduce_while(mode: str, loop: While, post: Term, st: ExecState) -> Term:
    """Loop rule.  Premises, each closed over one shared fresh copy of the
    modified variables:

      P1  the whole loop, abstracted as its contract, at the current state
      P2  an iteration state that exits establishes the target
      P3  one body execution followed by the re-abstracted loop establishes
          the loop postcondition
      P4  (wp only) the measure is bounded and strictly decreases

    In P2 the target's old means the iteration state itself; in P3 the
    embedded contract's old means the state after the first body execution,
    while the outer target's old means the iteration entry.
    """
    if mode == "dia":
        raise VcError("E_DIA_LOOP", "dia over a loop is not supported")
    if loop.post is None:
        raise VcError("E_NO_POST", "loop needs a :postcondition (or an inferable contract)")
    if mode == "wp" and loop.measure is None:
        raise VcError("E_NO_MEASURE", "wp over a loop needs a :termination measure")
    xs = modified_vars(loop.body)
    phi = loop.pre if loop.pre is not None else TRUE
    psi = loop.post

    p1 = reduce_spec("box", xs, phi, psi, post, st)

    ys = [(st.names.fresh(n), s) for n, s in xs]
    env2 = {**st.env, **{n: Var(y, s) for (n, s), (y, _) in zip(xs, ys)}}
    st2 = ExecState(env2, st.oldmap, st.names)   # for the test, phi, measure
    stq = ExecState(env2, dict(env2), st.names)  # old here = iteration state
    phi2 = lower_term(phi, st2)
    b2 = lower_term(loop.test, st2)

    post2 = lower_term(post, stq)
    p2 = _close(ys, t_implies(t_and(phi2, t_not(b2)), post2))

    rest = Block((loop.body, Spec(tuple(xs), phi, psi)))
    r = reduce(mode, rest, psi, stq)
    p3 = _close(ys, t_implies(t_and(phi2, b2), r))

    if mode != "wp":
        return t_and(p1, p2, p3)

    t2 = lower_term(loop.measure, st2)
    decrease = App("<", (loop.measure, Spliced(t2)), BOOL)
    d = reduce("wp", loop.body, decrease, st2)
    p4 = _close(ys, t_implies(t_and(phi2, b2),
                              t_and(App(">=", (t2, int_lit(0)), BOOL), d)))
    return t_and(p1, p2, p3, p4)


def infer_loop_contract(p: Program, pre: Term, post: Term) -> Program:
    """When the asserted program is just a loop (possibly wrapped in
    single-statement blocks), missing loop annotations default to the
    command's own contract.  Explicit annotations win."""
    q = p
    while isinstance(q, Block) and len(q.body) == 1:
        q = q.body[0]
    if not isinstance(q, While):
        return p
    return While(q.test, q.body, q.measure,
                 q.pre if q.pre is not None else pre,
                 q.post if q.post is not None else post)


def lower_assert_counterexample(pre: Term, p: Program, post: Term,
                                names: FreshNames) -> Term:
    """Negated total-correctness claim: satisfiable iff the triple fails.
    old is the pre-state, so it starts out as the identity."""
    st = identity_state(names, with_old=True)
    p2 = infer_loop_contract(p, pre, post)
    return t_not(t_implies(lower_term(pre, st), reduce("wp", p2, post, st)))


def process_script(script: Script) -> Script:
    """Translate every extended command into standard first-order SMT-LIB.
    Stops at the first error; positions point at the offending command."""
    names = FreshNames(script.table.global_names())
    out: list[Command] = []
    for cmd in script.commands:
        try:
            match cmd:
                case AssertCounterexample(pre=pre, program=p, post=post):
                    t = lower_assert_counterexample(pre, p, post, names)
                    out.append(Assert(t, pos=cmd.pos))
                case Assert(term=t) if contains_modal(t) or contains_old(t):
                    # a bare assert has no pre-state, so old is undefined
                    # outside any modality
                    st = identity_state(names, with_old=False)
                    out.append(Assert(lower_term(t, st), pos=cmd.pos))
                case _:
                    out.append(cmd)
        except VcError as err:
            if err.pos is None:
                err.pos = cmd.pos
            err.command = cmd  # lets callers attribute the failure to a file
            raise
    return Script(out, script.table)


def find_extension_heads(forms: list[SExpr]) -> set[str]:
    """Reserved program-layer heads occurring anywhere in `forms`.  Empty for
    well-translated output; used as a machine check of output purity."""
    found: set[str] = set()

    def walk(e: SExpr):
        if isinstance(e, SList):
            if e.items and isinstance(e.items[0], Atom) and e.items[0].text in EXTENSION_HEADS:
                found.add(e.items[0].text)
            for x in e.items:
                walk(x)

    for f in forms:
        walk(f)
    return found
