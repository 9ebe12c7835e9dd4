import pytest

from conftest import SCRIPTS
from wpsmt.ast import (App, Assert, AssertCounterexample, Assign, Block, BOOL,
                       CheckSat, DeclareConst, DefineFun, If, INT, Literal,
                       Modal, Old, Quant, Raw, REAL, Sort, Spec, Var, While)
from wpsmt.errors import ElabError
from wpsmt.sexpr import parse_sexprs
from wpsmt.surface import (Script, SymbolTable, elaborate_term, parse_script,
                           script_to_text)


def script(text) -> Script:
    return parse_script(parse_sexprs(text))


def term(text, decls="(declare-const x Int) (declare-const y Int) (declare-const p Bool)"):
    s = script(decls)
    return elaborate_term(parse_sexprs(text)[0], s.table)


def err(text, **kw):
    with pytest.raises(ElabError) as ei:
        term(text, **kw)
    return ei.value


def script_err(text):
    with pytest.raises(ElabError) as ei:
        script(text)
    return ei.value


def test_term_sorts():
    assert term("(+ x 1)").sort == INT
    assert term("(< x y)").sort == BOOL
    assert term("(ite p x (- y))").sort == INT
    assert term("3.5").sort == REAL
    assert term("(select (store a 0 x) y)",
                decls="(declare-const a (Array Int Int)) (declare-const x Int)"
                      " (declare-const y Int)").sort == INT


def test_numerals_and_bools():
    t = term("42")
    assert isinstance(t, Literal) and t.sort == INT
    assert term("true") == Literal("bool", "true", BOOL)


def test_chainable_comparison():
    t = term("(<= x y 3)")
    assert isinstance(t, App) and len(t.args) == 3


def test_quantifier_and_let():
    t = term("(forall ((z Int)) (exists ((w Int)) (= z w x)))")
    assert isinstance(t, Quant) and t.sort == BOOL
    t = term("(let ((a (+ x 1)) (b x)) (= a b))")
    assert t.sort == BOOL


def test_let_bindings_are_parallel():
    # inner x refers to the constant, not to the sibling binding
    t = term("(let ((x (+ x 1)) (z x)) (= x z))")
    binds = dict((n, v) for n, v in t.bindings)
    assert binds["z"] == Var("x", INT)


def test_shadowing_in_quantifier():
    t = term("(forall ((x Bool)) x)")
    assert t.body == Var("x", BOOL)


def test_old_and_modal_terms():
    t = term("(old (+ x 1))")
    assert isinstance(t, Old) and t.sort == INT
    t = term("(wp (assign (x 0)) (= x 0))")
    assert isinstance(t, Modal) and t.mode == "wp" and t.sort == BOOL
    assert isinstance(t.program, Assign)


def test_term_errors():
    assert err("q").code == "E_UNDECLARED"
    assert err("(+ x p)").code == "E_SORT"
    assert err("(not x)").code == "E_SORT"
    assert err("(not p p)").code == "E_ARITY"
    assert err("(div x 2 2)").code == "E_ARITY"
    assert err("(= x)").code == "E_ARITY"
    assert err("(f 1)").code == "E_UNDECLARED"
    assert err("(forall ((x Int)) x)").code == "E_SORT"
    assert err("(forall () p)").code == "E_ELAB"
    assert err('"str"').code == "E_UNSUPPORTED"
    assert err("(wp (assign (x 0)) x)").code == "E_SORT"
    assert err("((_ extract 3 0) x)").code == "E_UNSUPPORTED"


def test_programs():
    s = script("""
      (declare-const x Int) (declare-const y Int)
      (assert-counterexample true
        (block
          (assign (x 0) (y (+ x 1)))
          (if (< x y) (block) (assign (x y)))
          (spec (x) (>= x 0) (> x (old x)))
          (while (> x 0) (assign (x (- x 1)))
                 :termination x :precondition (>= x 0) :postcondition (= x 0)))
        (= x 0))
    """)
    cmd = s.commands[2]
    assert isinstance(cmd, AssertCounterexample)
    body = cmd.program.body
    assert isinstance(body[0], Assign) and len(body[0].bindings) == 2
    assert isinstance(body[1], If) and body[1].then == Block(())
    assert isinstance(body[2], Spec) and body[2].vars == (("x", INT),)
    w = body[3]
    assert isinstance(w, While) and w.measure == Var("x", INT)
    assert w.pre is not None and w.post is not None


def test_program_errors():
    base = "(declare-const x Int) (declare-const y Int)"
    cases = [
        ("(assert-counterexample true (assign (x 0) (x 1)) true)", "E_DUP_TARGET"),
        ("(assert-counterexample true (assign (x true)) true)", "E_SORT"),
        ("(assert-counterexample true (assign) true)", "E_ARITY"),
        ("(assert-counterexample true (if (< x y) (block)) true)", "E_ARITY"),
        ("(assert-counterexample true (if x (block) (block)) true)", "E_SORT"),
        ("(assert-counterexample true (while (> x 0) (block) :termination x :termination x) true)", "E_DUP_ATTR"),
        ("(assert-counterexample true (while (> x 0) (block) :invariant x) true)", "E_UNKNOWN_ATTR"),
        ("(assert-counterexample true (while (> x 0) (block) :termination (> x 0)) true)", "E_SORT"),
        ("(assert-counterexample true (while (> x 0) (block) :termination (old x)) true)", "E_OLD_CONTEXT"),
        ("(assert-counterexample true (spec (z) true true) true)", "E_UNDECLARED"),
        ("(assert-counterexample true (seq (block)) true)", "E_ELAB"),
    ]
    for text, code in cases:
        e = script_err(base + text)
        assert e.code == code, f"{text} -> {e.code}, wanted {code}"
        assert e.pos is not None


def test_declarations():
    s = script("""
      (declare-sort U 0)
      (define-sort IntPair () (Array Int Int))
      (define-sort Pair (a) (Array a a))
      (declare-const u U)
      (declare-fun f (Int U) Bool)
      (declare-const m (Pair Int))
      (define-fun inc ((n Int)) Int (+ n 1))
    """)
    assert s.table.funs["u"] == ((), Sort("U"))
    assert s.table.funs["m"] == ((), Sort("Array", (INT, INT)))
    t = elaborate_term(parse_sexprs("(f (inc 0) u)")[0], s.table)
    assert t.sort == BOOL


def test_declaration_errors():
    assert script_err("(declare-sort Bool 0)").code == "E_ELAB"
    assert script_err("(declare-const x Int) (declare-const x Bool)").code == "E_ELAB"
    assert script_err("(declare-const x NoSuch)").code == "E_UNDECLARED"
    assert script_err("(declare-const m (Array Int))").code == "E_ARITY"
    assert script_err("(define-sort P (a a) (Array a a))").code == "E_ELAB"
    # redeclaring with the identical signature is tolerated
    script("(declare-const x Int) (declare-const x Int)")


def test_define_fun_rejects_extensions():
    assert script_err(
        "(define-fun bad ((n Int)) Bool (wp (assign (n 0)) (= n 0)))"
    ).code == "E_ELAB"
    assert script_err(
        "(define-fun bad ((n Int)) Int (old n))"
    ).code == "E_ELAB"


def test_datatypes():
    s = script("""
      (declare-datatypes ((Color 0) (Point 0))
        (((red) (green) (blue))
         ((mk-point (px Int) (py Int)))))
      (declare-const c Color)
      (declare-const q Point)
    """)
    t = elaborate_term(parse_sexprs("(= (px q) (py q))")[0], s.table)
    assert t.sort == BOOL
    t = elaborate_term(parse_sexprs("((_ is red) c)")[0], s.table)
    assert t.sort == BOOL
    t = elaborate_term(parse_sexprs("(= c green)")[0], s.table)
    assert t.sort == BOOL
    assert script_err(
        "(declare-datatypes ((Box 1)) (((box (unbox Int)))))"
    ).code == "E_UNSUPPORTED"


def test_passthrough_commands():
    s = script('(set-logic ALL) (push 1) (get-model) (my-command 1 2)')
    assert all(isinstance(c, Raw) for c in s.commands)
    assert script_to_text(s) == "(set-logic ALL)\n(push 1)\n(get-model)\n(my-command 1 2)\n"


def test_command_structure():
    s = script("""
      (declare-const x Int)
      (assert (> x 0))
      (check-sat)
    """)
    assert isinstance(s.commands[0], DeclareConst)
    assert isinstance(s.commands[1], Assert)
    assert isinstance(s.commands[2], CheckSat)
    assert s.commands[1].pos == (3, 7)


def test_shared_table_across_parses():
    s1 = script("(declare-const x Int)")
    forms = parse_sexprs("(assert (> x 0))")
    s2 = parse_script(forms, s1.table)
    assert isinstance(s2.commands[0], Assert)


def test_script_to_text_round_trip():
    text = script_to_text(script("(declare-const x Int)\n(assert (>= x 0))"))
    assert text == "(declare-const x Int)\n(assert (>= x 0))\n"


def test_reprint_reelaborate_fixed_point():
    # printing an elaborated command and elaborating it again is a no-op
    import os
    from wpsmt.sexpr import print_sexpr
    for name in ("swap.smt2", "countdown.smt2", "gcd.smt2", "array_max.smt2"):
        with open(os.path.join(SCRIPTS, name)) as fh:
            text = fh.read()
        table = SymbolTable()
        script = parse_script(parse_sexprs(text), table)
        for cmd in script.commands:
            again = parse_script(parse_sexprs(print_sexpr(cmd.to_sexpr())), table)
            assert len(again.commands) == 1
            assert again.commands[0] == cmd
