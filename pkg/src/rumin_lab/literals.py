"""Text literals for polynomials, forms and Lie algebra vectors.

Grammar (juxtaposition and ``*`` both multiply)::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := power (['*'|'^'] power)*      '^' between forms is the wedge
    power  := atom ['^' INT]
    atom   := NUMBER | NAME | '(' expr ')'

NAME is ``x<i>`` (coordinate), ``t<i>`` (basis covector theta_i), ``X<i>``
(basis vector) or ``u<i>`` (chart parameter), all 1-based.  The printers in
``Poly.to_str`` and ``PolyForm.to_str`` produce text this grammar reads back.
"""

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional

from .errors import ParseError
from .exterior import AlgebraicForm, popcount, wedge_sign
from .poly import Poly
from .polyforms import PolyForm

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>[A-Za-z]+\d+)|(?P<op>[-+*^()/]))"
)


@dataclass
class Token:
    kind: str  # num | name | op | end
    text: str
    start: int
    end: int


def tokenize(text: str) -> List[Token]:
    out = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[bad]!r}", text, bad)
        kind = m.lastgroup
        out.append(Token(kind, m.group(kind), m.start(kind), m.end()))
        pos = m.end()
    out.append(Token("end", "", len(text), len(text)))
    return out


class _Mixed:
    """Sum over basis masks of polynomial coefficients, degrees not yet checked."""

    __slots__ = ("terms",)

    def __init__(self, terms: Dict[int, Poly]):
        self.terms = {m: f for m, f in terms.items() if f}

    def add(self, other: "_Mixed", sign: int = 1) -> "_Mixed":
        out = dict(self.terms)
        for m, f in other.terms.items():
            g = f.scale(sign)
            out[m] = out[m] + g if m in out else g
        return _Mixed(out)

    def mul(self, other: "_Mixed") -> "_Mixed":
        out: Dict[int, Poly] = {}
        for ma, fa in self.terms.items():
            for mb, fb in other.terms.items():
                s = wedge_sign(ma, mb)
                if s:
                    t = (fa * fb).scale(s)
                    m = ma | mb
                    out[m] = out[m] + t if m in out else t
        return _Mixed(out)

    def scalar(self) -> Optional[Poly]:
        if not self.terms:
            return None
        if set(self.terms) == {0}:
            return self.terms[0]
        return None


class _Parser:
    def __init__(self, text: str, nvars: int, families: Dict[str, int]):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        self.nvars = nvars
        self.families = families  # prefix -> allowed index bound

    # helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def fail(self, message: str, tok: Optional[Token] = None):
        tok = tok or self.tok
        raise ParseError(message, self.text, tok.start, max(tok.end, tok.start + 1))

    def eat(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def const(self, c) -> _Mixed:
        return _Mixed({0: Poly.const(self.nvars, c)})

    # grammar
    def parse(self) -> _Mixed:
        if self.tok.kind == "end":
            self.fail("empty literal")
        value = self.expr()
        if self.tok.kind != "end":
            self.fail(f"unexpected {self.tok.text!r}")
        return value

    def expr(self) -> _Mixed:
        negate = self.eat("-")
        if not negate:
            self.eat("+")
        value = self.term()
        if negate:
            value = _Mixed({}).add(value, -1)
        while self.tok.kind == "op" and self.tok.text in "+-":
            s = 1 if self.tok.text == "+" else -1
            self.i += 1
            value = value.add(self.term(), s)
        return value

    def _starts_atom(self) -> bool:
        t = self.tok
        return t.kind in ("num", "name") or (t.kind == "op" and t.text == "(")

    def term(self) -> _Mixed:
        value = self.power()
        while True:
            if self.eat("*") or self.eat("^"):
                value = value.mul(self.power())
            elif self.tok.kind == "op" and self.tok.text == "/":
                slash = self.tok
                self.i += 1
                if self.tok.kind != "num":
                    self.fail("only division by a number is supported", slash)
                value = value.mul(self.const(1 / Fraction(self.tok.text)))
                self.i += 1
            elif self._starts_atom():
                value = value.mul(self.power())
            else:
                return value

    def power(self) -> _Mixed:
        start = self.tok
        base = self.atom()
        if (self.tok.kind == "op" and self.tok.text == "^" and self.toks[self.i + 1].kind == "num"
                and "/" not in self.toks[self.i + 1].text):
            self.i += 1
            exp = int(self.tok.text)
            self.i += 1
            if base.scalar() is None and base.terms:
                self.fail("only functions can be raised to a power", start)
            out = self.const(1)
            for _ in range(exp):
                out = out.mul(base)
            return out
        return base

    def atom(self) -> _Mixed:
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return self.const(Fraction(t.text))
        if t.kind == "name":
            self.i += 1
            return self.name(t)
        if self.eat("("):
            inner = self.expr()
            if not self.eat(")"):
                self.fail("expected ')'")
            return inner
        self.fail("expected a number, a name or '('" if t.kind != "end" else "unexpected end of literal")

    def name(self, t: Token) -> _Mixed:
        m = re.fullmatch(r"([A-Za-z]+)(\d+)", t.text)
        prefix, idx = m.group(1), int(m.group(2))
        if prefix not in self.families:
            allowed = ", ".join(f"{p}<i>" for p in self.families)
            self.fail(f"unknown name {t.text!r} (expected {allowed})", t)
        bound = self.families[prefix]
        if not 1 <= idx <= bound:
            self.fail(f"{t.text} is out of range (indices run 1..{bound})", t)
        if prefix in ("t", "X"):
            return _Mixed({1 << (idx - 1): Poly.const(self.nvars, 1)})
        e = [0] * self.nvars
        e[idx - 1] = 1
        return _Mixed({0: Poly.monomial(e)})


def parse_poly(text: str, nvars: int, var: str = "x") -> Poly:
    value = _Parser(text, nvars, {var: nvars}).parse()
    return value.terms.get(0, Poly.zero(nvars))


def parse_form(text: str, group, k: Optional[int] = None) -> PolyForm:
    """A polynomial-coefficient form such as ``x4 t1 - 1/2 (x1 + x2) t1^t3``."""
    n = group.dim
    value = _Parser(text, n, {"x": n, "t": n}).parse()
    degrees = {popcount(m) for m in value.terms}
    if len(degrees) > 1:
        raise ParseError(f"terms of different degrees {sorted(degrees)}", text, 0, len(text))
    found = degrees.pop() if degrees else None
    if k is not None and found is not None and found != k:
        raise ParseError(f"expected a {k}-form, got a {found}-form", text, 0, len(text))
    return PolyForm(group, found if found is not None else (k or 0), value.terms)


def parse_covector(text: str, n: int) -> AlgebraicForm:
    value = _Parser(text, n, {"t": n}).parse()
    degrees = {popcount(m) for m in value.terms}
    if len(degrees) > 1:
        raise ParseError(f"terms of different degrees {sorted(degrees)}", text, 0, len(text))
    k = degrees.pop() if degrees else 0
    return AlgebraicForm(n, k, {m: f.constant_term() for m, f in value.terms.items()})


def parse_vector(text: str, n: int) -> Dict[int, Fraction]:
    """A linear combination of basis vectors, ``X3 - 1/2 X4`` -> {2: 1, 3: -1/2} (0-based)."""
    value = _Parser(text, 0, {"X": n}).parse()
    out = {}
    for m, f in value.terms.items():
        if popcount(m) != 1:
            raise ParseError("expected a linear combination of X<i>", text, 0, len(text))
        out[m.bit_length() - 1] = f.constant_term()
    return out


def format_vector(vec: Dict[int, Fraction]) -> str:
    pieces = []
    for i in sorted(vec):
        c = Fraction(vec[i])
        if not c:
            continue
        name = f"X{i + 1}"
        pieces.append(name if c == 1 else f"-{name}" if c == -1 else f"{c} {name}")
    return " + ".join(pieces).replace("+ -", "- ") if pieces else "0"
