"""Elaboration of parsed s-expressions into typed commands, terms and
programs.

The symbol table is threaded through an entire script (or several scripts in
one run): later commands see earlier declarations.  Core, integer, real and
array operations are built in; everything else must be declared.  Commands we
do not interpret are kept verbatim as Raw and passed through.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from . import sexpr
from .ast import (App, Assert, AssertCounterexample, Assign, Block, BOOL,
                  CheckSat, Command, Constructor, DeclareConst,
                  DeclareDatatypes, DeclareFun, DeclareSort, DefineFun,
                  DefineSort, FALSE, If, INT, Let, Literal, Modal, Old,
                  Program, Quant, Raw, REAL, Sort, Spec, Term, TRUE, Var,
                  While)
from .errors import ElabError
from .rewrite import contains_modal, contains_old
from .sexpr import Atom, SExpr, SList

MODES = ("wp", "box", "dia")

# names with a fixed meaning in terms or programs; they cannot be declared
RESERVED = {
    "true", "false", "not", "and", "or", "xor", "=>", "=", "distinct", "ite",
    "let", "forall", "exists", "old", "wp", "box", "dia",
    "assign", "spec", "block", "if", "while",
    "+", "-", "*", "div", "mod", "abs", "/", "to_real", "to_int", "is_int",
    "<", "<=", ">", ">=", "select", "store", "_", "!", "as",
}

_NUMERIC = (INT, REAL)


_BUILTIN_SORTS = frozenset(["Bool", "Int", "Real", "Array"])


class SymbolTable:
    def __init__(self):
        self.sorts: dict[str, int] = {"Bool": 0, "Int": 0, "Real": 0, "Array": 2}
        self.sort_defs: dict[str, tuple[tuple[str, ...], Sort]] = {}
        self.funs: dict[str, tuple[tuple[Sort, ...], Sort]] = {}
        self.ctor_result: dict[str, Sort] = {}  # constructor name -> datatype
        self.scopes: list[dict[str, Sort]] = []

    # ---- scope handling -------------------------------------------------
    def push(self, frame: dict[str, Sort]):
        self.scopes.append(frame)

    def pop(self):
        self.scopes.pop()

    def lookup_local(self, name: str) -> Sort | None:
        for frame in reversed(self.scopes):
            if name in frame:
                return frame[name]
        return None

    # ---- declarations ---------------------------------------------------
    def declare_sort(self, name: str, arity: int, pos):
        if name in RESERVED:
            raise ElabError("E_ELAB", f"cannot redefine reserved name {name}", pos)
        if name in _BUILTIN_SORTS:
            raise ElabError("E_ELAB", f"cannot redeclare builtin sort {name}", pos)
        old = self.sorts.get(name)
        if old is not None and old != arity:
            raise ElabError("E_ELAB", f"sort {name} already declared with arity {old}", pos)
        if name in self.sort_defs:
            raise ElabError("E_ELAB", f"sort {name} already defined", pos)
        self.sorts[name] = arity

    def define_sort(self, name: str, params: tuple[str, ...], body: Sort, pos):
        if name in RESERVED:
            raise ElabError("E_ELAB", f"cannot redefine reserved name {name}", pos)
        if name in self.sorts or name in self.sort_defs:
            raise ElabError("E_ELAB", f"sort {name} already declared", pos)
        self.sort_defs[name] = (params, body)

    def declare_fun(self, name: str, params: tuple[Sort, ...], result: Sort, pos):
        if name in RESERVED:
            raise ElabError("E_ELAB", f"cannot redefine reserved name {name}", pos)
        old = self.funs.get(name)
        if old is not None and old != (params, result):
            raise ElabError("E_ELAB", f"{name} already declared with a different signature", pos)
        self.funs[name] = (params, result)

    def global_names(self) -> set[str]:
        return set(self.funs)


@dataclass
class Script:
    commands: list[Command]
    table: SymbolTable


# ------------------------------------------------------------------ sorts

def elaborate_sort(e: SExpr, table: SymbolTable) -> Sort:
    if isinstance(e, Atom):
        if e.kind not in (sexpr.SYMBOL, sexpr.QUOTED):
            raise ElabError("E_ELAB", f"expected a sort, got {e.text}", e.pos)
        name = _symbol_name(e)
        if name in table.sort_defs:
            params, body = table.sort_defs[name]
            if params:
                raise ElabError("E_ARITY", f"sort {name} expects {len(params)} arguments", e.pos)
            return body
        arity = table.sorts.get(name)
        if arity is None:
            raise ElabError("E_UNDECLARED", f"unknown sort {name}", e.pos)
        if arity != 0:
            raise ElabError("E_ARITY", f"sort {name} expects {arity} arguments", e.pos)
        return Sort(name)
    if not e.items or not isinstance(e.items[0], Atom):
        raise ElabError("E_ELAB", "malformed sort", e.pos)
    name = _symbol_name(e.items[0])
    args = tuple(elaborate_sort(a, table) for a in e.items[1:])
    if name in table.sort_defs:
        params, body = table.sort_defs[name]
        if len(params) != len(args):
            raise ElabError("E_ARITY", f"sort {name} expects {len(params)} arguments", e.pos)
        return _subst_sort(body, dict(zip(params, args)))
    arity = table.sorts.get(name)
    if arity is None:
        raise ElabError("E_UNDECLARED", f"unknown sort {name}", e.pos)
    if arity != len(args):
        raise ElabError("E_ARITY", f"sort {name} expects {arity} arguments", e.pos)
    return Sort(name, args)


def _subst_sort(s: Sort, m: dict[str, Sort]) -> Sort:
    if not s.args:
        return m.get(s.name, s)
    return Sort(s.name, tuple(_subst_sort(a, m) for a in s.args))


def _symbol_name(a: Atom) -> str:
    if a.kind == sexpr.QUOTED:
        return a.text[1:-1]
    return a.text


# ------------------------------------------------------------------ terms

def sort_of(t: Term) -> Sort:
    return t.sort


def elaborate_term(e: SExpr, table: SymbolTable) -> Term:
    if isinstance(e, Atom):
        return _elab_atom(e, table)
    if not e.items:
        raise ElabError("E_ELAB", "empty application", e.pos)
    head = e.items[0]
    if isinstance(head, SList):
        return _elab_indexed_app(e, table)
    name = _symbol_name(head)
    if head.kind == sexpr.SYMBOL:
        if name in ("forall", "exists"):
            return _elab_quant(e, name, table)
        if name == "let":
            return _elab_let(e, table)
        if name == "old":
            if len(e.items) != 2:
                raise ElabError("E_ARITY", "old takes one argument", e.pos)
            return Old(elaborate_term(e.items[1], table))
        if name in MODES:
            if len(e.items) != 3:
                raise ElabError("E_ARITY", f"{name} takes a program and a formula", e.pos)
            prog = elaborate_program(e.items[1], table)
            post = elaborate_term(e.items[2], table)
            if post.sort != BOOL:
                raise ElabError("E_SORT", f"{name} postcondition must be Bool", e.pos)
            return Modal(name, prog, post)
        if name in ("_", "!", "as"):
            raise ElabError("E_UNSUPPORTED", f"{name} forms are not interpreted", e.pos)
    args = tuple(elaborate_term(a, table) for a in e.items[1:])
    return _elab_app(name, args, e, table)


def _elab_atom(e: Atom, table: SymbolTable) -> Term:
    if e.kind == sexpr.NUMERAL:
        return Literal(sexpr.NUMERAL, e.text, INT)
    if e.kind == sexpr.DECIMAL:
        return Literal(sexpr.DECIMAL, e.text, REAL)
    if e.kind in (sexpr.STRING, sexpr.HEXADECIMAL, sexpr.BINARY):
        raise ElabError("E_UNSUPPORTED", f"{e.kind} literals are not interpreted", e.pos)
    if e.kind == sexpr.KEYWORD:
        raise ElabError("E_ELAB", f"unexpected keyword {e.text}", e.pos)
    name = _symbol_name(e)
    if name == "true":
        return TRUE
    if name == "false":
        return FALSE
    local = table.lookup_local(name)
    if local is not None:
        return Var(name, local)
    sig = table.funs.get(name)
    if sig is not None:
        params, result = sig
        if params:
            raise ElabError("E_SORT", f"{name} expects {len(params)} arguments", e.pos)
        return Var(name, result)
    raise ElabError("E_UNDECLARED", f"unknown symbol {name}", e.pos)


def _elab_quant(e: SList, kind: str, table: SymbolTable) -> Term:
    if len(e.items) != 3 or not isinstance(e.items[1], SList):
        raise ElabError("E_ELAB", f"malformed {kind}", e.pos)
    binders = []
    frame: dict[str, Sort] = {}
    for b in e.items[1].items:
        if not (isinstance(b, SList) and len(b.items) == 2 and isinstance(b.items[0], Atom)):
            raise ElabError("E_ELAB", "malformed binder", e.pos)
        n = _symbol_name(b.items[0])
        s = elaborate_sort(b.items[1], table)
        binders.append((n, s))
        frame[n] = s
    if not binders:
        raise ElabError("E_ELAB", f"{kind} needs at least one binder", e.pos)
    table.push(frame)
    try:
        body = elaborate_term(e.items[2], table)
    finally:
        table.pop()
    if body.sort != BOOL:
        raise ElabError("E_SORT", f"{kind} body must be Bool", e.pos)
    return Quant(kind, tuple(binders), body)


def _elab_let(e: SList, table: SymbolTable) -> Term:
    if len(e.items) != 3 or not isinstance(e.items[1], SList):
        raise ElabError("E_ELAB", "malformed let", e.pos)
    bindings = []
    frame: dict[str, Sort] = {}
    for b in e.items[1].items:
        if not (isinstance(b, SList) and len(b.items) == 2 and isinstance(b.items[0], Atom)):
            raise ElabError("E_ELAB", "malformed let binding", e.pos)
        n = _symbol_name(b.items[0])
        v = elaborate_term(b.items[1], table)  # bindings see the outer scope
        bindings.append((n, v))
        frame[n] = v.sort
    if not bindings:
        raise ElabError("E_ELAB", "let needs at least one binding", e.pos)
    table.push(frame)
    try:
        body = elaborate_term(e.items[2], table)
    finally:
        table.pop()
    return Let(tuple(bindings), body)


def _elab_indexed_app(e: SList, table: SymbolTable) -> Term:
    head = e.items[0]
    parts = head.items if isinstance(head, SList) else ()
    if (len(parts) == 3 and all(isinstance(p, Atom) for p in parts)
            and parts[0].text == "_" and parts[1].text == "is"):
        ctor = _symbol_name(parts[2])
        dt = table.ctor_result.get(ctor)
        if dt is None:
            raise ElabError("E_UNDECLARED", f"unknown constructor {ctor}", e.pos)
        if len(e.items) != 2:
            raise ElabError("E_ARITY", "tester takes one argument", e.pos)
        arg = elaborate_term(e.items[1], table)
        if arg.sort != dt:
            raise ElabError("E_SORT", f"tester (_ is {ctor}) applies to {dt}", e.pos)
        return App(f"(_ is {ctor})", (arg,), BOOL)
    raise ElabError("E_UNSUPPORTED", "unsupported application head", e.pos)


def _elab_app(name: str, args: tuple[Term, ...], e: SList, table: SymbolTable) -> Term:
    pos = e.pos
    n = len(args)

    def need(cond: bool, code: str, msg: str):
        if not cond:
            raise ElabError(code, msg, pos)

    if name == "not":
        need(n == 1, "E_ARITY", "not takes one argument")
        need(args[0].sort == BOOL, "E_SORT", "not applies to Bool")
        return App(name, args, BOOL)
    if name in ("and", "or", "xor", "=>"):
        need(n >= 2, "E_ARITY", f"{name} takes at least two arguments")
        need(all(a.sort == BOOL for a in args), "E_SORT", f"{name} applies to Bool")
        return App(name, args, BOOL)
    if name in ("=", "distinct"):
        need(n >= 2, "E_ARITY", f"{name} takes at least two arguments")
        need(all(a.sort == args[0].sort for a in args), "E_SORT",
             f"{name} arguments must share one sort")
        return App(name, args, BOOL)
    if name == "ite":
        need(n == 3, "E_ARITY", "ite takes three arguments")
        need(args[0].sort == BOOL, "E_SORT", "ite condition must be Bool")
        need(args[1].sort == args[2].sort, "E_SORT", "ite branches must share one sort")
        return App(name, args, args[1].sort)
    if name in ("+", "*"):
        need(n >= 2, "E_ARITY", f"{name} takes at least two arguments")
        return App(name, args, _numeric(args, name, pos))
    if name == "-":
        need(n >= 1, "E_ARITY", "- takes at least one argument")
        return App(name, args, _numeric(args, name, pos))
    if name in ("div", "mod"):
        need(n == 2, "E_ARITY", f"{name} takes two arguments")
        need(all(a.sort == INT for a in args), "E_SORT", f"{name} applies to Int")
        return App(name, args, INT)
    if name == "abs":
        need(n == 1, "E_ARITY", "abs takes one argument")
        need(args[0].sort == INT, "E_SORT", "abs applies to Int")
        return App(name, args, INT)
    if name == "/":
        need(n >= 2, "E_ARITY", "/ takes at least two arguments")
        need(all(a.sort == REAL for a in args), "E_SORT", "/ applies to Real")
        return App(name, args, REAL)
    if name == "to_real":
        need(n == 1, "E_ARITY", "to_real takes one argument")
        need(args[0].sort == INT, "E_SORT", "to_real applies to Int")
        return App(name, args, REAL)
    if name in ("to_int", "is_int"):
        need(n == 1, "E_ARITY", f"{name} takes one argument")
        need(args[0].sort == REAL, "E_SORT", f"{name} applies to Real")
        return App(name, args, INT if name == "to_int" else BOOL)
    if name in ("<", "<=", ">", ">="):
        need(n >= 2, "E_ARITY", f"{name} takes at least two arguments")
        _numeric(args, name, pos)
        return App(name, args, BOOL)
    if name == "select":
        need(n == 2, "E_ARITY", "select takes two arguments")
        a = args[0].sort
        need(a.name == "Array", "E_SORT", "select applies to an array")
        need(args[1].sort == a.args[0], "E_SORT", "select index has the wrong sort")
        return App(name, args, a.args[1])
    if name == "store":
        need(n == 3, "E_ARITY", "store takes three arguments")
        a = args[0].sort
        need(a.name == "Array", "E_SORT", "store applies to an array")
        need(args[1].sort == a.args[0], "E_SORT", "store index has the wrong sort")
        need(args[2].sort == a.args[1], "E_SORT", "store value has the wrong sort")
        return App(name, args, a)

    sig = table.funs.get(name)
    if sig is None:
        raise ElabError("E_UNDECLARED", f"unknown function {name}", pos)
    params, result = sig
    need(len(params) == n, "E_ARITY", f"{name} expects {len(params)} arguments")
    for i, (p, a) in enumerate(zip(params, args)):
        need(a.sort == p, "E_SORT", f"argument {i + 1} of {name} must be {p}")
    return App(name, args, result)


def _numeric(args: tuple[Term, ...], name: str, pos) -> Sort:
    s = args[0].sort
    if s not in _NUMERIC:
        raise ElabError("E_SORT", f"{name} applies to Int or Real", pos)
    if any(a.sort != s for a in args):
        raise ElabError("E_SORT", f"{name} arguments must share one sort", pos)
    return s


# --------------------------------------------------------------- programs

_WHILE_ATTRS = {":termination": "measure", ":precondition": "pre", ":postcondition": "post"}


def elaborate_program(e: SExpr, table: SymbolTable) -> Program:
    if not isinstance(e, SList) or not e.items or not isinstance(e.items[0], Atom):
        pos = e.pos if isinstance(e, (Atom, SList)) else None
        raise ElabError("E_ELAB", "expected a program", pos)
    head = e.items[0].text
    if head == "assign":
        return _elab_assign(e, table)
    if head == "spec":
        return _elab_spec(e, table)
    if head == "block":
        return Block(tuple(elaborate_program(p, table) for p in e.items[1:]))
    if head == "if":
        if len(e.items) != 4:
            raise ElabError("E_ARITY", "if takes a test and two branch programs", e.pos)
        test = elaborate_term(e.items[1], table)
        if test.sort != BOOL:
            raise ElabError("E_SORT", "if test must be Bool", e.pos)
        return If(test, elaborate_program(e.items[2], table), elaborate_program(e.items[3], table))
    if head == "while":
        return _elab_while(e, table)
    raise ElabError("E_ELAB", f"expected a program, got {head}", e.pos)


def _resolve_var(a: SExpr, table: SymbolTable) -> Var:
    if not isinstance(a, Atom) or a.kind not in (sexpr.SYMBOL, sexpr.QUOTED):
        pos = a.pos if isinstance(a, (Atom, SList)) else None
        raise ElabError("E_ELAB", "expected a variable name", pos)
    t = _elab_atom(a, table)
    if not isinstance(t, Var):
        raise ElabError("E_SORT", f"{a.text} is not a variable", a.pos)
    return t


def _elab_assign(e: SList, table: SymbolTable) -> Program:
    if len(e.items) < 2:
        raise ElabError("E_ARITY", "assign needs at least one binding", e.pos)
    bindings = []
    seen: set[str] = set()
    for b in e.items[1:]:
        if not (isinstance(b, SList) and len(b.items) == 2):
            raise ElabError("E_ELAB", "assign binding must be (variable term)", e.pos)
        v = _resolve_var(b.items[0], table)
        if v.name in seen:
            raise ElabError("E_DUP_TARGET", f"{v.name} assigned twice", b.pos)
        seen.add(v.name)
        rhs = elaborate_term(b.items[1], table)
        if rhs.sort != v.sort:
            raise ElabError("E_SORT", f"assignment to {v.name} must have sort {v.sort}", b.pos)
        bindings.append((v, rhs))
    return Assign(tuple(bindings))


def _elab_spec(e: SList, table: SymbolTable) -> Program:
    if len(e.items) != 4 or not isinstance(e.items[1], SList):
        raise ElabError("E_ARITY", "spec takes a variable list, a precondition and a postcondition", e.pos)
    vars_ = []
    seen: set[str] = set()
    for a in e.items[1].items:
        v = _resolve_var(a, table)
        if v.name in seen:
            raise ElabError("E_DUP_TARGET", f"{v.name} listed twice", e.pos)
        seen.add(v.name)
        vars_.append((v.name, v.sort))
    pre = elaborate_term(e.items[2], table)
    post = elaborate_term(e.items[3], table)
    if pre.sort != BOOL or post.sort != BOOL:
        raise ElabError("E_SORT", "spec conditions must be Bool", e.pos)
    return Spec(tuple(vars_), pre, post)


def _elab_while(e: SList, table: SymbolTable) -> Program:
    if len(e.items) < 3:
        raise ElabError("E_ARITY", "while takes a test and a body", e.pos)
    test = elaborate_term(e.items[1], table)
    if test.sort != BOOL:
        raise ElabError("E_SORT", "while test must be Bool", e.pos)
    body = elaborate_program(e.items[2], table)
    attrs: dict[str, Term] = {}
    rest = list(e.items[3:])
    while rest:
        key = rest.pop(0)
        if not (isinstance(key, Atom) and key.kind == sexpr.KEYWORD):
            raise ElabError("E_ELAB", "expected a loop attribute keyword", key.pos if isinstance(key, (Atom, SList)) else e.pos)
        field_name = _WHILE_ATTRS.get(key.text)
        if field_name is None:
            raise ElabError("E_UNKNOWN_ATTR", f"unknown loop attribute {key.text}", key.pos)
        if field_name in attrs:
            raise ElabError("E_DUP_ATTR", f"{key.text} given twice", key.pos)
        if not rest:
            raise ElabError("E_ELAB", f"{key.text} needs a value", key.pos)
        val = elaborate_term(rest.pop(0), table)
        if field_name == "measure":
            if val.sort != INT:
                raise ElabError("E_SORT", ":termination measure must be Int", key.pos)
            if contains_old(val):
                raise ElabError("E_OLD_CONTEXT", "old has no meaning in a :termination measure", key.pos)
        elif val.sort != BOOL:
            raise ElabError("E_SORT", f"{key.text} must be Bool", key.pos)
        attrs[field_name] = val
    return While(test, body, attrs.get("measure"), attrs.get("pre"), attrs.get("post"))


# --------------------------------------------------------------- commands

def parse_script(forms: list[SExpr], table: SymbolTable | None = None) -> Script:
    """Elaborate a whole script, threading one symbol table.  Pass the table
    of a previous call to continue the same session across files."""
    if table is None:
        table = SymbolTable()
    commands = [_elab_command(f, table) for f in forms]
    return Script(commands, table)


def _elab_command(e: SExpr, table: SymbolTable) -> Command:
    if not isinstance(e, SList) or not e.items or not isinstance(e.items[0], Atom):
        return Raw(e, pos=e.pos if isinstance(e, (Atom, SList)) else None)
    head = e.items[0].text
    pos = e.pos
    items = e.items
    try:
        if head == "declare-sort":
            _arity(e, 3, "declare-sort takes a name and an arity")
            name = _name_arg(items[1])
            if not (isinstance(items[2], Atom) and items[2].kind == sexpr.NUMERAL):
                raise ElabError("E_ELAB", "declare-sort arity must be a numeral", pos)
            table.declare_sort(name, int(items[2].text), pos)
            return DeclareSort(name, int(items[2].text), pos=pos)
        if head == "define-sort":
            _arity(e, 4, "define-sort takes a name, parameters and a sort")
            name = _name_arg(items[1])
            if not isinstance(items[2], SList):
                raise ElabError("E_ELAB", "define-sort parameters must be a list", pos)
            params = tuple(_name_arg(p) for p in items[2].items)
            if len(set(params)) != len(params):
                raise ElabError("E_ELAB", "duplicate sort parameter", pos)
            saved = {p: table.sorts.get(p) for p in params}
            for p in params:
                table.sorts[p] = 0  # params visible while reading the body
            try:
                body = elaborate_sort(items[3], table)
            finally:
                for p in params:
                    if saved[p] is None:
                        table.sorts.pop(p, None)
                    else:
                        table.sorts[p] = saved[p]
            table.define_sort(name, params, body, pos)
            return DefineSort(name, params, body, pos=pos)
        if head == "declare-const":
            _arity(e, 3, "declare-const takes a name and a sort")
            name = _name_arg(items[1])
            s = elaborate_sort(items[2], table)
            table.declare_fun(name, (), s, pos)
            return DeclareConst(name, s, pos=pos)
        if head == "declare-fun":
            _arity(e, 4, "declare-fun takes a name, argument sorts and a result sort")
            name = _name_arg(items[1])
            if not isinstance(items[2], SList):
                raise ElabError("E_ELAB", "declare-fun arguments must be a list", pos)
            params = tuple(elaborate_sort(p, table) for p in items[2].items)
            result = elaborate_sort(items[3], table)
            table.declare_fun(name, params, result, pos)
            return DeclareFun(name, params, result, pos=pos)
        if head == "define-fun":
            return _elab_define_fun(e, table)
        if head == "declare-datatypes":
            return _elab_datatypes(e, table)
        if head == "assert":
            _arity(e, 2, "assert takes one formula")
            t = elaborate_term(items[1], table)
            if t.sort != BOOL:
                raise ElabError("E_SORT", "assert takes a Bool term", pos)
            return Assert(t, pos=pos)
        if head == "assert-counterexample":
            _arity(e, 4, "assert-counterexample takes a precondition, a program and a postcondition")
            pre = elaborate_term(items[1], table)
            prog = elaborate_program(items[2], table)
            post = elaborate_term(items[3], table)
            if pre.sort != BOOL or post.sort != BOOL:
                raise ElabError("E_SORT", "assert-counterexample conditions must be Bool", pos)
            return AssertCounterexample(pre, prog, post, pos=pos)
        if head == "check-sat":
            _arity(e, 1, "check-sat takes no arguments")
            return CheckSat(pos=pos)
    except ElabError as err:
        if err.pos is None:
            err.pos = pos
        raise
    return Raw(e, pos=pos)


def _arity(e: SList, n: int, msg: str):
    if len(e.items) != n:
        raise ElabError("E_ELAB", msg, e.pos)


def _name_arg(a: SExpr) -> str:
    if not isinstance(a, Atom) or a.kind not in (sexpr.SYMBOL, sexpr.QUOTED):
        pos = a.pos if isinstance(a, (Atom, SList)) else None
        raise ElabError("E_ELAB", "expected a symbol", pos)
    return _symbol_name(a)


def _elab_define_fun(e: SList, table: SymbolTable) -> Command:
    _arity(e, 5, "define-fun takes a name, parameters, a result sort and a body")
    items = e.items
    name = _name_arg(items[1])
    if not isinstance(items[2], SList):
        raise ElabError("E_ELAB", "define-fun parameters must be a list", e.pos)
    params = []
    frame: dict[str, Sort] = {}
    for b in items[2].items:
        if not (isinstance(b, SList) and len(b.items) == 2):
            raise ElabError("E_ELAB", "malformed parameter", e.pos)
        n = _name_arg(b.items[0])
        s = elaborate_sort(b.items[1], table)
        params.append((n, s))
        frame[n] = s
    result = elaborate_sort(items[3], table)
    table.push(frame)
    try:
        body = elaborate_term(items[4], table)
    finally:
        table.pop()
    if body.sort != result:
        raise ElabError("E_SORT", f"define-fun body must have sort {result}", e.pos)
    if contains_modal(body) or contains_old(body):
        # definitions become part of the emitted first-order script unchanged,
        # so program modalities and old have no meaning here
        raise ElabError("E_ELAB", "wp/box/dia/old are not allowed in definitions", e.pos)
    table.declare_fun(name, tuple(s for _, s in params), result, e.pos)
    return DefineFun(name, tuple(params), result, body, pos=e.pos)


def _elab_datatypes(e: SList, table: SymbolTable) -> Command:
    _arity(e, 3, "declare-datatypes takes sort declarations and constructor groups")
    decls, groups = e.items[1], e.items[2]
    if not isinstance(decls, SList) or not isinstance(groups, SList) \
            or len(decls.items) != len(groups.items) or not decls.items:
        raise ElabError("E_ELAB", "malformed declare-datatypes", e.pos)
    names = []
    for d in decls.items:
        if not (isinstance(d, SList) and len(d.items) == 2 and isinstance(d.items[1], Atom)
                and d.items[1].kind == sexpr.NUMERAL):
            raise ElabError("E_ELAB", "datatype declaration must be (name arity)", e.pos)
        if d.items[1].text != "0":
            raise ElabError("E_UNSUPPORTED", "parametric datatypes are not supported", d.pos)
        names.append(_name_arg(d.items[0]))
    for n in names:
        table.declare_sort(n, 0, e.pos)  # visible to selector sorts (mutual recursion)
    all_groups = []
    for name, group in zip(names, groups.items):
        if not isinstance(group, SList) or not group.items:
            raise ElabError("E_ELAB", f"datatype {name} needs at least one constructor", e.pos)
        dt = Sort(name)
        ctors = []
        for c in group.items:
            if not isinstance(c, SList) or not c.items:
                raise ElabError("E_ELAB", "malformed constructor", e.pos)
            cname = _name_arg(c.items[0])
            sels = []
            for s in c.items[1:]:
                if not (isinstance(s, SList) and len(s.items) == 2):
                    raise ElabError("E_ELAB", "malformed selector", e.pos)
                sels.append((_name_arg(s.items[0]), elaborate_sort(s.items[1], table)))
            table.declare_fun(cname, tuple(s for _, s in sels), dt, e.pos)
            for sn, ss in sels:
                table.declare_fun(sn, (dt,), ss, e.pos)
            table.ctor_result[cname] = dt
            ctors.append(Constructor(cname, tuple(sels)))
        all_groups.append(tuple(ctors))
    return DeclareDatatypes(tuple(names), tuple(all_groups), pos=e.pos)


def script_to_text(script: Script) -> str:
    """Print a script one command per line."""
    return "".join(sexpr.print_sexpr(c.to_sexpr()) + "\n" for c in script.commands)
