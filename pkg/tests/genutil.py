"""Random s-expression generator for round-trip fuzzing."""
import random

from wpsmt.sexpr import (Atom, BINARY, DECIMAL, HEXADECIMAL, KEYWORD, NUMERAL,
                         QUOTED, SExpr, SList, STRING, SYMBOL)

_SYM_FIRST = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ~!@$%^&*_-+=<>.?/"
_SYM_REST = _SYM_FIRST + "0123456789"
_QUOTED_CHARS = " abcXYZ()0189 ;:\t\n.,'\"[]{}"
_STRING_CHARS = " abc\"XYZ()01; \t\n|"


def _symbol(rng: random.Random) -> str:
    n = rng.randint(1, 8)
    return rng.choice(_SYM_FIRST) + "".join(rng.choice(_SYM_REST) for _ in range(n - 1))


def random_atom(rng: random.Random) -> Atom:
    k = rng.randrange(8)
    if k == 0:
        return Atom(SYMBOL, _symbol(rng))
    if k == 1:
        body = "".join(rng.choice(_QUOTED_CHARS) for _ in range(rng.randint(0, 6)))
        return Atom(QUOTED, "|" + body + "|")
    if k == 2:
        return Atom(KEYWORD, ":" + _symbol(rng))
    if k == 3:
        return Atom(NUMERAL, str(rng.randint(0, 10 ** rng.randint(1, 6))))
    if k == 4:
        return Atom(DECIMAL, f"{rng.randint(0, 999)}.{rng.randint(0, 999)}")
    if k == 5:
        return Atom(HEXADECIMAL, "#x" + "".join(
            rng.choice("0123456789abcdefABCDEF") for _ in range(rng.randint(1, 8))))
    if k == 6:
        return Atom(BINARY, "#b" + "".join(
            rng.choice("01") for _ in range(rng.randint(1, 8))))
    body = "".join(rng.choice(_STRING_CHARS) for _ in range(rng.randint(0, 6)))
    return Atom(STRING, '"' + body.replace('"', '""') + '"')


def random_sexpr(rng: random.Random, depth: int = 3) -> SExpr:
    if depth <= 0 or rng.random() < 0.4:
        return random_atom(rng)
    n = rng.randint(0, 4)
    return SList(tuple(random_sexpr(rng, depth - 1) for _ in range(n)))
