"""Typed abstract syntax for scripts, terms and programs.

All nodes are immutable and compare structurally, which the test suite relies
on.  Each term knows its sort.  `to_sexpr` renders a node back into the
concrete syntax it was elaborated from.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from . import sexpr
from .sexpr import Atom, SExpr, SList


# ---------------------------------------------------------------- sorts

@dataclass(frozen=True)
class Sort:
    name: str
    args: tuple["Sort", ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))

    def to_sexpr(self) -> SExpr:
        if not self.args:
            return _sym(self.name)
        return SList((_sym(self.name),) + tuple(a.to_sexpr() for a in self.args))

    def __str__(self) -> str:
        return str(self.to_sexpr())


BOOL = Sort("Bool")
INT = Sort("Int")
REAL = Sort("Real")


def array_sort(key: Sort, value: Sort) -> Sort:
    return Sort("Array", (key, value))


def _sym(name: str) -> Atom:
    if sexpr.is_simple_symbol(name):
        return Atom(sexpr.SYMBOL, name)
    return Atom(sexpr.QUOTED, "|" + name + "|")


# ---------------------------------------------------------------- terms

class Term:
    __slots__ = ()

    def to_sexpr(self) -> SExpr:
        raise NotImplementedError


@dataclass(frozen=True)
class Var(Term):
    name: str
    sort: Sort

    def to_sexpr(self) -> SExpr:
        return _sym(self.name)


@dataclass(frozen=True)
class Literal(Term):
    kind: str  # numeral | decimal | bool
    text: str
    sort: Sort

    def to_sexpr(self) -> SExpr:
        return Atom(self.kind if self.kind != "bool" else sexpr.SYMBOL, self.text)


TRUE = Literal("bool", "true", BOOL)
FALSE = Literal("bool", "false", BOOL)


def int_lit(n: int) -> Term:
    if n < 0:
        return App("-", (Literal(sexpr.NUMERAL, str(-n), INT),), INT)
    return Literal(sexpr.NUMERAL, str(n), INT)


@dataclass(frozen=True)
class App(Term):
    fn: str
    args: tuple[Term, ...]
    sort: Sort

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))

    def to_sexpr(self) -> SExpr:
        if self.fn.startswith("("):
            # indexed head such as a datatype tester (_ is C)
            head = sexpr.parse_sexprs(self.fn)[0]
        else:
            head = _sym(self.fn)
        return SList((head,) + tuple(a.to_sexpr() for a in self.args))


@dataclass(frozen=True)
class Quant(Term):
    kind: str  # forall | exists
    bound: tuple[tuple[str, Sort], ...]
    body: Term

    def __post_init__(self):
        object.__setattr__(self, "bound", tuple(self.bound))

    @property
    def sort(self) -> Sort:
        return BOOL

    def to_sexpr(self) -> SExpr:
        binders = SList(tuple(SList((_sym(n), s.to_sexpr())) for n, s in self.bound))
        return SList((_sym(self.kind), binders, self.body.to_sexpr()))


@dataclass(frozen=True)
class Let(Term):
    bindings: tuple[tuple[str, Term], ...]
    body: Term

    def __post_init__(self):
        object.__setattr__(self, "bindings", tuple(self.bindings))

    @property
    def sort(self) -> Sort:
        return self.body.sort

    def to_sexpr(self) -> SExpr:
        binders = SList(tuple(SList((_sym(n), t.to_sexpr())) for n, t in self.bindings))
        return SList((_sym("let"), binders, self.body.to_sexpr()))


@dataclass(frozen=True)
class Old(Term):
    inner: Term

    @property
    def sort(self) -> Sort:
        return self.inner.sort

    def to_sexpr(self) -> SExpr:
        return SList((_sym("old"), self.inner.to_sexpr()))


@dataclass(frozen=True)
class Modal(Term):
    mode: str  # wp | box | dia
    program: "Program"
    post: Term

    @property
    def sort(self) -> Sort:
        return BOOL

    def to_sexpr(self) -> SExpr:
        return SList((_sym(self.mode), self.program.to_sexpr(), self.post.to_sexpr()))


@dataclass(frozen=True)
class Spliced(Term):
    """Internal wrapper around an already-rewritten term.

    The symbolic executor returns the payload untouched instead of applying
    the current environment again.  Never appears in elaborated input or in
    printed output.
    """
    inner: Term

    @property
    def sort(self) -> Sort:
        return self.inner.sort

    def to_sexpr(self) -> SExpr:
        return self.inner.to_sexpr()


# convenience builders used by the transformer rules (no simplification)

def t_and(*args: Term) -> Term:
    return App("and", tuple(args), BOOL)

def t_or(*args: Term) -> Term:
    return App("or", tuple(args), BOOL)

def t_not(arg: Term) -> Term:
    return App("not", (arg,), BOOL)

def t_implies(a: Term, b: Term) -> Term:
    return App("=>", (a, b), BOOL)


# ---------------------------------------------------------------- programs

class Program:
    __slots__ = ()

    def to_sexpr(self) -> SExpr:
        raise NotImplementedError


@dataclass(frozen=True)
class Assign(Program):
    bindings: tuple[tuple[Var, Term], ...]  # simultaneous

    def __post_init__(self):
        object.__setattr__(self, "bindings", tuple(self.bindings))

    def to_sexpr(self) -> SExpr:
        pairs = tuple(SList((_sym(v.name), t.to_sexpr())) for v, t in self.bindings)
        return SList((_sym("assign"),) + pairs)


@dataclass(frozen=True)
class Spec(Program):
    vars: tuple[tuple[str, Sort], ...]  # may be empty (plain assert/assume)
    pre: Term
    post: Term

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))

    def to_sexpr(self) -> SExpr:
        names = SList(tuple(_sym(n) for n, _ in self.vars))
        return SList((_sym("spec"), names, self.pre.to_sexpr(), self.post.to_sexpr()))


@dataclass(frozen=True)
class Block(Program):
    body: tuple[Program, ...]

    def __post_init__(self):
        object.__setattr__(self, "body", tuple(self.body))

    def to_sexpr(self) -> SExpr:
        return SList((_sym("block"),) + tuple(p.to_sexpr() for p in self.body))


@dataclass(frozen=True)
class If(Program):
    test: Term
    then: Program
    orelse: Program

    def to_sexpr(self) -> SExpr:
        return SList((_sym("if"), self.test.to_sexpr(), self.then.to_sexpr(), self.orelse.to_sexpr()))


@dataclass(frozen=True)
class While(Program):
    test: Term
    body: Program
    measure: Optional[Term] = None
    pre: Optional[Term] = None
    post: Optional[Term] = None

    def to_sexpr(self) -> SExpr:
        items: list[SExpr] = [_sym("while"), self.test.to_sexpr(), self.body.to_sexpr()]
        if self.measure is not None:
            items += [Atom(sexpr.KEYWORD, ":termination"), self.measure.to_sexpr()]
        if self.pre is not None:
            items += [Atom(sexpr.KEYWORD, ":precondition"), self.pre.to_sexpr()]
        if self.post is not None:
            items += [Atom(sexpr.KEYWORD, ":postcondition"), self.post.to_sexpr()]
        return SList(tuple(items))


# ---------------------------------------------------------------- commands

@dataclass(frozen=True)
class Command:
    pos: sexpr.Pos | None = field(default=None, compare=False, repr=False, kw_only=True)

    def to_sexpr(self) -> SExpr:
        raise NotImplementedError


@dataclass(frozen=True)
class DeclareSort(Command):
    name: str
    arity: int

    def to_sexpr(self) -> SExpr:
        return SList((_sym("declare-sort"), _sym(self.name), Atom(sexpr.NUMERAL, str(self.arity))))


@dataclass(frozen=True)
class DefineSort(Command):
    name: str
    params: tuple[str, ...]
    body: Sort

    def to_sexpr(self) -> SExpr:
        return SList((_sym("define-sort"), _sym(self.name),
                      SList(tuple(_sym(p) for p in self.params)), self.body.to_sexpr()))


@dataclass(frozen=True)
class DeclareConst(Command):
    name: str
    sort: Sort

    def to_sexpr(self) -> SExpr:
        return SList((_sym("declare-const"), _sym(self.name), self.sort.to_sexpr()))


@dataclass(frozen=True)
class DeclareFun(Command):
    name: str
    params: tuple[Sort, ...]
    result: Sort

    def to_sexpr(self) -> SExpr:
        return SList((_sym("declare-fun"), _sym(self.name),
                      SList(tuple(p.to_sexpr() for p in self.params)), self.result.to_sexpr()))


@dataclass(frozen=True)
class DefineFun(Command):
    name: str
    params: tuple[tuple[str, Sort], ...]
    result: Sort
    body: Term

    def to_sexpr(self) -> SExpr:
        binders = SList(tuple(SList((_sym(n), s.to_sexpr())) for n, s in self.params))
        return SList((_sym("define-fun"), _sym(self.name), binders,
                      self.result.to_sexpr(), self.body.to_sexpr()))


@dataclass(frozen=True)
class Constructor:
    name: str
    selectors: tuple[tuple[str, Sort], ...]

    def to_sexpr(self) -> SExpr:
        return SList((_sym(self.name),) + tuple(SList((_sym(n), s.to_sexpr())) for n, s in self.selectors))


@dataclass(frozen=True)
class DeclareDatatypes(Command):
    names: tuple[str, ...]
    constructors: tuple[tuple[Constructor, ...], ...]  # one group per datatype

    def to_sexpr(self) -> SExpr:
        decls = SList(tuple(SList((_sym(n), Atom(sexpr.NUMERAL, "0"))) for n in self.names))
        groups = SList(tuple(SList(tuple(c.to_sexpr() for c in group)) for group in self.constructors))
        return SList((_sym("declare-datatypes"), decls, groups))


@dataclass(frozen=True)
class Assert(Command):
    term: Term

    def to_sexpr(self) -> SExpr:
        return SList((_sym("assert"), self.term.to_sexpr()))


@dataclass(frozen=True)
class AssertCounterexample(Command):
    pre: Term
    program: Program
    post: Term

    def to_sexpr(self) -> SExpr:
        return SList((_sym("assert-counterexample"), self.pre.to_sexpr(),
                      self.program.to_sexpr(), self.post.to_sexpr()))


@dataclass(frozen=True)
class CheckSat(Command):
    def to_sexpr(self) -> SExpr:
        return SList((_sym("check-sat"),))


@dataclass(frozen=True)
class Raw(Command):
    """A command we pass through untouched (set-logic, get-model, ...)."""
    form: SExpr

    def to_sexpr(self) -> SExpr:
        return self.form
