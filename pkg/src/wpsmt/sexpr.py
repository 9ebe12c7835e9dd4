"""SMT-LIB s-expression reader and printer.

Atoms keep their exact source spelling so that commands we do not interpret
can be re-emitted unchanged up to whitespace.  Meaning is assigned later, by
the elaborator; this layer only knows tokens and parentheses.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ParseError

# atom kinds
SYMBOL = "symbol"
QUOTED = "quoted"
KEYWORD = "keyword"
NUMERAL = "numeral"
DECIMAL = "decimal"
HEXADECIMAL = "hexadecimal"
BINARY = "binary"
STRING = "string"

Pos = tuple[int, int]


@dataclass(frozen=True)
class Atom:
    kind: str
    text: str
    pos: Pos | None = field(default=None, compare=False, repr=False)

    def __str__(self) -> str:
        return self.text


@dataclass(frozen=True)
class SList:
    items: tuple
    pos: Pos | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))

    def __str__(self) -> str:
        return "(" + " ".join(str(x) for x in self.items) + ")"

    def __len__(self) -> int:
        return len(self.items)

    def __getitem__(self, i):
        return self.items[i]


SExpr = Atom | SList

_SPECIALS = set("~!@$%^&*_-+=<>.?/")
_WS = set(" \t\r\n")
_DELIMS = _WS | {"(", ")", ";", ""}


def _is_letter(c: str) -> bool:
    return "a" <= c <= "z" or "A" <= c <= "Z"


def _is_digit(c: str) -> bool:
    return "0" <= c <= "9"


def is_simple_symbol(text: str) -> bool:
    """True if `text` can be written as an unquoted symbol."""
    if not text or _is_digit(text[0]):
        return False
    return all(_is_letter(c) or _is_digit(c) or c in _SPECIALS for c in text)


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.i = 0
        self.line = 1
        self.col = 1

    def peek(self) -> str:
        return self.text[self.i] if self.i < len(self.text) else ""

    def advance(self) -> str:
        c = self.text[self.i]
        self.i += 1
        if c == "\n":
            self.line += 1
            self.col = 1
        else:
            self.col += 1
        return c

    def pos(self) -> Pos:
        return (self.line, self.col)

    def skip_trivia(self):
        while True:
            c = self.peek()
            if c in _WS and c:
                self.advance()
            elif c == ";":
                while self.peek() not in ("", "\n"):
                    self.advance()
            else:
                return


def _lex_atom(sc: _Scanner) -> Atom:
    start = sc.pos()
    c = sc.peek()
    if c == '"':
        return _lex_string(sc, start)
    if c == "|":
        return _lex_quoted(sc, start)
    if c == ":":
        sc.advance()
        body = _take_symbol_chars(sc)
        if not body:
            raise ParseError("E_LEX", "empty keyword", start)
        return Atom(KEYWORD, ":" + body, start)
    if _is_digit(c):
        return _lex_number(sc, start)
    if c == "#":
        return _lex_radix(sc, start)
    if _is_letter(c) or c in _SPECIALS:
        return Atom(SYMBOL, _take_symbol_chars(sc), start)
    raise ParseError("E_LEX", f"unexpected character {c!r}", start)


def _take_symbol_chars(sc: _Scanner) -> str:
    chars = []
    while True:
        c = sc.peek()
        if c and (_is_letter(c) or _is_digit(c) or c in _SPECIALS):
            chars.append(sc.advance())
        else:
            return "".join(chars)


def _lex_string(sc: _Scanner, start: Pos) -> Atom:
    chars = [sc.advance()]  # opening quote
    while True:
        c = sc.peek()
        if c == "":
            raise ParseError("E_LEX", "unterminated string literal", start)
        chars.append(sc.advance())
        if c == '"':
            if sc.peek() == '"':  # doubled quote stays in the text
                chars.append(sc.advance())
            else:
                return Atom(STRING, "".join(chars), start)


def _lex_quoted(sc: _Scanner, start: Pos) -> Atom:
    chars = [sc.advance()]  # opening pipe
    while True:
        c = sc.peek()
        if c == "":
            raise ParseError("E_LEX", "unterminated quoted symbol", start)
        if c == "\\":
            raise ParseError("E_LEX", "backslash is not allowed in a quoted symbol", sc.pos())
        chars.append(sc.advance())
        if c == "|":
            return Atom(QUOTED, "".join(chars), start)


def _lex_number(sc: _Scanner, start: Pos) -> Atom:
    digits = []
    while _is_digit(sc.peek()):
        digits.append(sc.advance())
    kind = NUMERAL
    if sc.peek() == ".":
        digits.append(sc.advance())
        if not _is_digit(sc.peek()):
            raise ParseError("E_LEX", "malformed decimal literal", start)
        while _is_digit(sc.peek()):
            digits.append(sc.advance())
        kind = DECIMAL
    if sc.peek() not in _DELIMS:
        raise ParseError("E_LEX", "malformed numeric literal", start)
    return Atom(kind, "".join(digits), start)


def _lex_radix(sc: _Scanner, start: Pos) -> Atom:
    chars = [sc.advance()]  # '#'
    tag = sc.peek()
    if tag == "x":
        chars.append(sc.advance())
        ok = lambda c: _is_digit(c) or "a" <= c <= "f" or "A" <= c <= "F"
        kind = HEXADECIMAL
    elif tag == "b":
        chars.append(sc.advance())
        ok = lambda c: c == "0" or c == "1"
        kind = BINARY
    else:
        raise ParseError("E_LEX", "expected #x or #b literal", start)
    if not ok(sc.peek()):
        raise ParseError("E_LEX", "malformed radix literal", start)
    while ok(sc.peek()):
        chars.append(sc.advance())
    if sc.peek() not in _DELIMS:
        raise ParseError("E_LEX", "malformed radix literal", start)
    return Atom(kind, "".join(chars), start)


def parse_sexprs(text: str) -> list[SExpr]:
    """Read every top-level form in `text`.

    Raises ParseError with code E_UNBALANCED for missing or extra parentheses
    and E_LEX for malformed tokens; positions are 1-based (line, column).
    """
    sc = _Scanner(text)
    top: list[SExpr] = []
    stack: list[tuple[Pos, list[SExpr]]] = []
    while True:
        sc.skip_trivia()
        c = sc.peek()
        if c == "":
            if stack:
                raise ParseError("E_UNBALANCED", "unclosed parenthesis", stack[-1][0])
            return top
        if c == "(":
            pos = sc.pos()
            sc.advance()
            stack.append((pos, []))
        elif c == ")":
            pos = sc.pos()
            sc.advance()
            if not stack:
                raise ParseError("E_UNBALANCED", "unmatched closing parenthesis", pos)
            open_pos, items = stack.pop()
            node = SList(tuple(items), open_pos)
            (stack[-1][1] if stack else top).append(node)
        else:
            atom = _lex_atom(sc)
            (stack[-1][1] if stack else top).append(atom)


def print_sexpr(e: SExpr) -> str:
    """Normalized rendering: single spaces between siblings, no line breaks."""
    return str(e)


def print_script(forms: list[SExpr]) -> str:
    """One top-level form per line."""
    return "".join(print_sexpr(f) + "\n" for f in forms)
