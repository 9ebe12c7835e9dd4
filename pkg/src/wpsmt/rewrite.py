"""Term surgery: free variables, fresh names, simultaneous capture-avoiding
substitution, resolution of (old ...) against a snapshot map, and the
modified-variable analysis for programs."""
from __future__ import annotations

from typing import Iterable, Mapping

from .ast import (App, Assign, Block, If, Let, Literal, Modal, Old, Program,
                  Quant, Sort, Spec, Spliced, Term, Var, While)


class FreshNames:
    """Generates names of the shape base!k with a counter that only moves
    forward within one run, so repeated lowering of the same script is
    reproducible.  `reserved` holds every name the generator must avoid:
    the declared globals plus everything it has handed out before."""

    def __init__(self, reserved: Iterable[str] = ()):
        self.reserved = set(reserved)
        self._counter = 1

    def fresh(self, base: str, taken: Iterable[str] = ()) -> str:
        taken = set(taken)
        k = self._counter
        while f"{base}!{k}" in self.reserved or f"{base}!{k}" in taken:
            k += 1
        self._counter = k + 1
        name = f"{base}!{k}"
        self.reserved.add(name)
        return name


def fresh_name(base: str, taken: Iterable[str], names: FreshNames) -> str:
    return names.fresh(base, taken)


def free_vars(t: Term) -> set[str]:
    """Names occurring free in `t`.  Variables under (old ...) count: they
    refer to the snapshot state.  For a modality the whole variable footprint
    of the program is included, which errs on the safe side for freshness."""
    match t:
        case Var(name=n):
            return {n}
        case Literal():
            return set()
        case App(args=args):
            out: set[str] = set()
            for a in args:
                out |= free_vars(a)
            return out
        case Quant(bound=bound, body=body):
            return free_vars(body) - {n for n, _ in bound}
        case Let(bindings=bindings, body=body):
            out = set()
            for _, v in bindings:
                out |= free_vars(v)
            return out | (free_vars(body) - {n for n, _ in bindings})
        case Old(inner=u) | Spliced(inner=u):
            return free_vars(u)
        case Modal(program=p, post=q):
            return free_vars(q) | program_vars(p)
    raise TypeError(f"not a term: {t!r}")


def program_vars(p: Program) -> set[str]:
    """Every name a program reads or writes."""
    match p:
        case Assign(bindings=bs):
            out = {v.name for v, _ in bs}
            for _, rhs in bs:
                out |= free_vars(rhs)
            return out
        case Spec(vars=vs, pre=pre, post=post):
            return {n for n, _ in vs} | free_vars(pre) | free_vars(post)
        case Block(body=body):
            out = set()
            for q in body:
                out |= program_vars(q)
            return out
        case If(test=b, then=p1, orelse=p2):
            return free_vars(b) | program_vars(p1) | program_vars(p2)
        case While(test=b, body=body, measure=m, pre=pre, post=post):
            out = free_vars(b) | program_vars(body)
            for opt in (m, pre, post):
                if opt is not None:
                    out |= free_vars(opt)
            return out
    raise TypeError(f"not a program: {p!r}")


def modified_vars(p: Program) -> list[tuple[str, Sort]]:
    """Variables a program may write, in first-occurrence order."""
    seen: dict[str, Sort] = {}

    def walk(q: Program):
        match q:
            case Assign(bindings=bs):
                for v, _ in bs:
                    seen.setdefault(v.name, v.sort)
            case Spec(vars=vs):
                for n, s in vs:
                    seen.setdefault(n, s)
            case Block(body=body):
                for r in body:
                    walk(r)
            case If(then=p1, orelse=p2):
                walk(p1)
                walk(p2)
            case While(body=body):
                walk(body)

    walk(p)
    return list(seen.items())


def _rename_binders(bound, body: Term, danger: set[str], names: FreshNames):
    """Give fresh names to binders that would capture a substituted term.
    Returns (new binder list, renamed body)."""
    newbound = []
    renaming: dict[str, Term] = {}
    avoid = danger | free_vars(body) | {n for n, _ in bound}
    for n, s in bound:
        if n in danger:
            n2 = names.fresh(n, avoid)
            renaming[n] = Var(n2, s)
            newbound.append((n2, s))
        else:
            newbound.append((n, s))
    if renaming:
        body = substitute(body, renaming, names)
    return newbound, body


def substitute(t: Term, mapping: Mapping[str, Term], names: FreshNames) -> Term:
    """Simultaneous substitution of free variables, renaming binders on the
    way down when a range term would otherwise be captured."""
    if not mapping:
        return t
    match t:
        case Var(name=n):
            return mapping.get(n, t)
        case Literal():
            return t
        case App(fn=fn, args=args, sort=s):
            return App(fn, tuple(substitute(a, mapping, names) for a in args), s)
        case Old(inner=u):
            return Old(substitute(u, mapping, names))
        case Spliced(inner=u):
            return Spliced(substitute(u, mapping, names))
        case Quant(kind=k, bound=bound, body=body):
            live = {n: r for n, r in mapping.items()
                    if n not in {b for b, _ in bound} and n in free_vars(body)}
            if not live:
                return t
            danger = set()
            for r in live.values():
                danger |= free_vars(r)
            bound2, body2 = _rename_binders(bound, body, danger, names)
            return Quant(k, tuple(bound2), substitute(body2, live, names))
        case Let(bindings=bindings, body=body):
            vals = [(n, substitute(v, mapping, names)) for n, v in bindings]
            live = {n: r for n, r in mapping.items()
                    if n not in {b for b, _ in bindings} and n in free_vars(body)}
            if not live:
                return Let(tuple(vals), body)
            danger = set()
            for r in live.values():
                danger |= free_vars(r)
            named = [(n, v.sort) for n, v in vals]
            bound2, body2 = _rename_binders(named, body, danger, names)
            body3 = substitute(body2, live, names)
            return Let(tuple((n2, v) for (n2, _), (_, v) in zip(bound2, vals)), body3)
        case Modal():
            raise TypeError("substitution does not descend into program modalities")
    raise TypeError(f"not a term: {t!r}")


def resolve_old(t: Term, oldmap: Mapping[str, Term], names: FreshNames) -> Term:
    """Replace every (old u) subterm by u with its free variables rewritten
    through `oldmap` (identity for unmapped names).  Nested old collapses:
    there is only one snapshot.  `t` must be modality-free."""

    def outside(u: Term, m: dict[str, Term]) -> Term:
        match u:
            case Var() | Literal():
                return u
            case App(fn=fn, args=args, sort=s):
                return App(fn, tuple(outside(a, m) for a in args), s)
            case Old(inner=v):
                return inside(v, m)
            case Spliced(inner=v):
                return Spliced(outside(v, m))
            case Quant(kind=k, bound=bound, body=body):
                # binders shadow the snapshot; surviving entries must not be
                # captured when an old inside the body gets resolved
                live = {n: r for n, r in m.items()
                        if n not in {b for b, _ in bound} and n in free_vars(body)}
                danger = set()
                for r in live.values():
                    danger |= free_vars(r)
                bound2, body2 = _rename_binders(bound, body, danger, names)
                return Quant(k, tuple(bound2), outside(body2, live))
            case Let(bindings=bindings, body=body):
                vals = [(n, outside(v, m)) for n, v in bindings]
                live = {n: r for n, r in m.items()
                        if n not in {b for b, _ in bindings} and n in free_vars(body)}
                danger = set()
                for r in live.values():
                    danger |= free_vars(r)
                named = [(n, v.sort) for n, v in vals]
                bound2, body2 = _rename_binders(named, body, danger, names)
                return Let(tuple((n2, v) for (n2, _), (_, v) in zip(bound2, vals)),
                           outside(body2, live))
            case Modal():
                raise TypeError("resolve_old does not handle program modalities")
        raise TypeError(f"not a term: {u!r}")

    def inside(u: Term, m: dict[str, Term]) -> Term:
        match u:
            case Var(name=n):
                return m.get(n, u)
            case Literal():
                return u
            case App(fn=fn, args=args, sort=s):
                return App(fn, tuple(inside(a, m) for a in args), s)
            case Old(inner=v):  # idempotent: same snapshot
                return inside(v, m)
            case Spliced(inner=v):
                return Spliced(inside(v, m))
            case Quant(kind=k, bound=bound, body=body):
                live = {n: r for n, r in m.items()
                        if n not in {b for b, _ in bound} and n in free_vars(body)}
                danger = set()
                for r in live.values():
                    danger |= free_vars(r)
                bound2, body2 = _rename_binders(bound, body, danger, names)
                return Quant(k, tuple(bound2), inside(body2, live))
            case Let(bindings=bindings, body=body):
                vals = [(n, inside(v, m)) for n, v in bindings]
                live = {n: r for n, r in m.items()
                        if n not in {b for b, _ in bindings} and n in free_vars(body)}
                danger = set()
                for r in live.values():
                    danger |= free_vars(r)
                named = [(n, v.sort) for n, v in vals]
                bound2, body2 = _rename_binders(named, body, danger, names)
                return Let(tuple((n2, v) for (n2, _), (_, v) in zip(bound2, vals)),
                           inside(body2, live))
            case Modal():
                raise TypeError("resolve_old does not handle program modalities")
        raise TypeError(f"not a term: {u!r}")

    return outside(t, dict(oldmap))


def contains_old(t: Term) -> bool:
    match t:
        case Old():
            return True
        case Var() | Literal():
            return False
        case App(args=args):
            return any(contains_old(a) for a in args)
        case Quant(body=body):
            return contains_old(body)
        case Let(bindings=bindings, body=body):
            return any(contains_old(v) for _, v in bindings) or contains_old(body)
        case Spliced(inner=u):
            return contains_old(u)
        case Modal(program=p, post=q):
            return contains_old(q) or _program_contains_old(p)
    raise TypeError(f"not a term: {t!r}")


def _program_contains_old(p: Program) -> bool:
    match p:
        case Assign(bindings=bs):
            return any(contains_old(rhs) for _, rhs in bs)
        case Spec(pre=pre, post=post):
            return contains_old(pre) or contains_old(post)
        case Block(body=body):
            return any(_program_contains_old(q) for q in body)
        case If(test=b, then=p1, orelse=p2):
            return contains_old(b) or _program_contains_old(p1) or _program_contains_old(p2)
        case While(test=b, body=body, measure=m, pre=pre, post=post):
            return (contains_old(b) or _program_contains_old(body)
                    or any(x is not None and contains_old(x) for x in (m, pre, post)))
    raise TypeError(f"not a program: {p!r}")


def contains_modal(t: Term) -> bool:
    match t:
        case Modal():
            return True
        case Var() | Literal():
            return False
        case App(args=args):
            return any(contains_modal(a) for a in args)
        case Quant(body=body):
            return contains_modal(body)
        case Let(bindings=bindings, body=body):
            return any(contains_modal(v) for _, v in bindings) or contains_modal(body)
        case Old(inner=u) | Spliced(inner=u):
            return contains_modal(u)
    raise TypeError(f"not a term: {t!r}")


def alpha_equal(t1: Term, t2: Term) -> bool:
    """Structural equality modulo renaming of bound variables."""

    def go(a: Term, b: Term, env1: dict[str, int], env2: dict[str, int]) -> bool:
        match a, b:
            case (Var(name=n1, sort=s1), Var(name=n2, sort=s2)):
                if s1 != s2:
                    return False
                i1, i2 = env1.get(n1), env2.get(n2)
                return i1 == i2 if (i1 is not None or i2 is not None) else n1 == n2
            case (Literal(), Literal()):
                return a == b
            case (App(fn=f1, args=a1, sort=s1), App(fn=f2, args=a2, sort=s2)):
                return (f1 == f2 and s1 == s2 and len(a1) == len(a2)
                        and all(go(x, y, env1, env2) for x, y in zip(a1, a2)))
            case (Quant(kind=k1, bound=b1, body=x1), Quant(kind=k2, bound=b2, body=x2)):
                if k1 != k2 or len(b1) != len(b2):
                    return False
                if any(s1 != s2 for (_, s1), (_, s2) in zip(b1, b2)):
                    return False
                d = len(env1)
                e1 = dict(env1); e2 = dict(env2)
                for i, ((n1, _), (n2, _)) in enumerate(zip(b1, b2)):
                    e1[n1] = d + i
                    e2[n2] = d + i
                return go(x1, x2, e1, e2)
            case (Let(bindings=b1, body=x1), Let(bindings=b2, body=x2)):
                if len(b1) != len(b2):
                    return False
                if not all(go(v1, v2, env1, env2) for (_, v1), (_, v2) in zip(b1, b2)):
                    return False
                d = len(env1)
                e1 = dict(env1); e2 = dict(env2)
                for i, ((n1, _), (n2, _)) in enumerate(zip(b1, b2)):
                    e1[n1] = d + i
                    e2[n2] = d + i
                return go(x1, x2, e1, e2)
            case (Old(inner=u1), Old(inner=u2)) | (Spliced(inner=u1), Spliced(inner=u2)):
                return go(u1, u2, env1, env2)
            case (Modal(mode=m1, program=p1, post=q1), Modal(mode=m2, program=p2, post=q2)):
                return m1 == m2 and p1 == p2 and go(q1, q2, env1, env2)
        return False

    return go(t1, t2, {}, {})
