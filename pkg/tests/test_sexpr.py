import random

import pytest

from wpsmt.errors import ParseError
from wpsmt.sexpr import (Atom, KEYWORD, NUMERAL, QUOTED, SList, STRING, SYMBOL,
                         is_simple_symbol, parse_sexprs, print_script,
                         print_sexpr)

from genutil import random_sexpr


def parse1(text):
    forms = parse_sexprs(text)
    assert len(forms) == 1
    return forms[0]


def test_atom_kinds():
    forms = parse_sexprs('foo :kw 42 3.14 #xBeef #b1011 "hi" |odd name|')
    kinds = [f.kind for f in forms]
    assert kinds == [SYMBOL, KEYWORD, NUMERAL, "decimal", "hexadecimal",
                     "binary", STRING, QUOTED]
    assert forms[0].text == "foo"
    assert forms[6].text == '"hi"'
    assert forms[7].text == "|odd name|"


def test_nesting_and_positions():
    e = parse1("  (a (b c)\n d)")
    assert isinstance(e, SList)
    assert e.pos == (1, 3)
    inner = e[1]
    assert inner.pos == (1, 6)
    assert e[2].pos == (2, 2)
    assert [x.text for x in inner] == ["b", "c"]


def test_comments_are_trivia():
    forms = parse_sexprs("; leading\n(a ; mid\n b) ; trailing")
    assert forms == [SList((Atom(SYMBOL, "a"), Atom(SYMBOL, "b")))]


def test_equality_ignores_position():
    assert parse1("(a b)") == parse1("  (  a   b )")


def test_string_doubled_quote():
    e = parse1('"say ""hi"" now"')
    assert e.kind == STRING
    assert e.text == '"say ""hi"" now"'


def test_symbol_charset():
    e = parse1("<=")
    assert e.kind == SYMBOL
    assert is_simple_symbol("x!1")
    assert is_simple_symbol("~?.@")
    assert not is_simple_symbol("2x")
    assert not is_simple_symbol("has space")
    assert not is_simple_symbol("")


@pytest.mark.parametrize("text,code,pos", [
    ("(a (b)", "E_UNBALANCED", (1, 1)),
    ("a))", "E_UNBALANCED", (1, 2)),
    ('"oops', "E_LEX", (1, 1)),
    ("|oops", "E_LEX", (1, 1)),
    ("|back\\slash|", "E_LEX", (1, 6)),
    ("1.", "E_LEX", (1, 1)),
    ("12ab", "E_LEX", (1, 1)),
    ("#q1", "E_LEX", (1, 1)),
    ("#x", "E_LEX", (1, 1)),
    (":", "E_LEX", (1, 1)),
    ("[a]", "E_LEX", (1, 1)),
])
def test_lex_errors(text, code, pos):
    with pytest.raises(ParseError) as ei:
        parse_sexprs(text)
    assert ei.value.code == code
    assert ei.value.pos == pos


def test_error_rendering():
    with pytest.raises(ParseError) as ei:
        parse_sexprs("(\n  (")
    assert str(ei.value).startswith("2:3: E_UNBALANCED")


def test_print_round_trip_handwritten():
    cases = [
        "(declare-const x Int)",
        '( assert ( = x  4 ) ) ; done',
        '(a "s1" |q 2| :k 1 2.5 #xff #b01 ())',
    ]
    for text in cases:
        forms = parse_sexprs(text)
        assert parse_sexprs(print_script(forms)) == forms


def test_print_round_trip_random():
    rng = random.Random(20240811)
    for _ in range(2000):
        e = random_sexpr(rng)
        assert parse_sexprs(print_sexpr(e)) == [e]


def test_print_script_one_form_per_line():
    forms = parse_sexprs("(a) (b c)")
    assert print_script(forms) == "(a)\n(b c)\n"


def test_parse_is_whitespace_insensitive():
    # same token stream under mangled spacing and comments parses identically
    rng = random.Random(31)
    for _ in range(300):
        forms = [random_sexpr(rng, 3) for _ in range(rng.randrange(1, 3))]
        text = print_script(forms)
        mangled = []
        in_string = in_quoted = False
        for ch in text:
            mangled.append(ch)
            if ch == '"' and not in_quoted:
                in_string = not in_string
            elif ch == "|" and not in_string:
                in_quoted = not in_quoted
            elif (ch in "()" and not in_string and not in_quoted
                  and rng.random() < 0.3):
                mangled.append(rng.choice([" ", "\n", "\t", " ; note\n"]))
        assert parse_sexprs("".join(mangled)) == forms
