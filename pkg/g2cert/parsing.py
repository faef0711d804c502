#!/usr/bin/env python3
"""Text grammars for forms, structure equations and parameter regimes.

Forms:      e13 - e24 + 3/2*(e26 + e45), -1/2*(e7+e5), sqrt(-(L+2))*e246
Structures: (0^4,12,23,34), (0³,12,23,-13,-15+L*26+(1-L)*34)
Regimes:    L<-2 | -2<L<0 | L=0 | L!=0,L!=1
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from fractions import Fraction

from g2cert.errors import ArityError, ParseError
from g2cert.exact_core import rat_sqrt
from g2cert.exterior import Multivector

logger = logging.getLogger(__name__)

PARAMETER = "L"

_SUPERSCRIPTS = str.maketrans("⁰¹²³⁴⁵⁶⁷⁸⁹", "0123456789")
_REPLACEMENTS = {
    "−": "-", "·": "*", "λ": PARAMETER, "≠": "!=", "≤": "<=", "≥": ">=", "⋅": "*",
}

_TOKEN = re.compile(
    r"\s*(?:(?P<number>\d+)|(?P<mono>e\d+)|(?P<sqrt>sqrt)|(?P<param>L)|(?P<op>[-+*/^()]))"
)


def normalize(text: str) -> str:
    for old, new in _REPLACEMENTS.items():
        text = text.replace(old, new)
    return text


@dataclass
class _Token:
    kind: str
    value: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        tokens.append(_Token(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    return tokens


class _FormParser:
    """Recursive descent over tokens; every value is a Multivector."""

    def __init__(self, text: str, n: int, param: Fraction | None):
        self.text = text
        self.n = n
        self.param = param
        self.tokens = _tokenize(text)
        self.i = 0

    def error(self, message: str, token: _Token | None = None):
        pos = token.pos if token else len(self.text)
        return ParseError(message, self.text, pos)

    def peek(self) -> _Token | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self, value: str | None = None) -> _Token:
        tok = self.peek()
        if tok is None:
            raise self.error("unexpected end of input")
        if value is not None and tok.value != value:
            raise self.error(f"expected {value!r}, found {tok.value!r}", tok)
        self.i += 1
        return tok

    def scalar(self, c) -> Multivector:
        return Multivector.scalar(self.n, Fraction(c))

    def as_scalar(self, value: Multivector, tok: _Token | None, what: str) -> Fraction:
        if value.is_zero():
            return Fraction(0)
        if set(value.terms) != {()}:
            raise self.error(f"{what} must be a scalar", tok)
        return value.terms[()]

    def parse(self) -> Multivector:
        if not self.tokens:
            raise self.error("empty expression")
        value = self.expr()
        tok = self.peek()
        if tok is not None:
            raise self.error(f"unexpected {tok.value!r}", tok)
        return value

    def expr(self) -> Multivector:
        value = self.term()
        while (tok := self.peek()) is not None and tok.value in "+-" and tok.kind == "op":
            self.take()
            rhs = self.term()
            value = value + rhs if tok.value == "+" else value - rhs
        return value

    def term(self) -> Multivector:
        value = self.unary()
        while (tok := self.peek()) is not None and tok.kind == "op" and tok.value in "*/":
            self.take()
            rhs = self.unary()
            if tok.value == "*":
                value = value ^ rhs
            else:
                divisor = self.as_scalar(rhs, tok, "divisor")
                if divisor == 0:
                    raise self.error("division by zero", tok)
                value = value.scale(1 / divisor)
        return value

    def unary(self) -> Multivector:
        tok = self.peek()
        if tok is not None and tok.kind == "op" and tok.value in "+-":
            self.take()
            value = self.unary()
            return -value if tok.value == "-" else value
        return self.power()

    def power(self) -> Multivector:
        base = self.atom()
        tok = self.peek()
        if tok is not None and tok.value == "^":
            self.take()
            negative = False
            if (sign := self.peek()) is not None and sign.value == "-":
                self.take()
                negative = True
            exp_tok = self.take()
            if exp_tok.kind != "number":
                raise self.error("exponent must be an integer", exp_tok)
            b = self.as_scalar(base, tok, "base of a power")
            k = int(exp_tok.value)
            if negative and b == 0:
                raise self.error("zero to a negative power", tok)
            return self.scalar(b ** (-k if negative else k))
        return base

    def atom(self) -> Multivector:
        tok = self.take()
        if tok.kind == "number":
            return self.scalar(int(tok.value))
        if tok.kind == "param":
            if self.param is None:
                raise self.error("parameter L has no value here", tok)
            return self.scalar(self.param)
        if tok.kind == "mono":
            digits = [int(ch) for ch in tok.value[1:]]
            if any(not 1 <= i <= self.n for i in digits):
                raise self.error(f"{tok.value} uses an index outside 1..{self.n}", tok)
            return Multivector.monomial(self.n, digits)
        if tok.kind == "sqrt":
            self.take("(")
            inner = self.expr()
            self.take(")")
            radicand = self.as_scalar(inner, tok, "sqrt argument")
            root = rat_sqrt(radicand)
            if root is None:
                raise self.error(f"sqrt({radicand}) is not rational", tok)
            return self.scalar(root)
        if tok.value == "(":
            value = self.expr()
            self.take(")")
            return value
        raise self.error(f"unexpected {tok.value!r}", tok)


def parse_form(text: str, n: int, param: Fraction | None = None) -> Multivector:
    """Parse a form in e^{ij...} shorthand with exact coefficients."""
    return _FormParser(normalize(text), n, param).parse()


def parse_vector(text: str, n: int) -> tuple:
    """'e7' or '2*e5 - e7' read as a vector in the e_i basis."""
    form = parse_form(text, n)
    if form.degrees() - {1}:
        raise ParseError("a vector is a sum of single-index terms", text)
    return tuple(form.terms.get((i,), Fraction(0)) for i in range(1, n + 1))


_PAIR = re.compile(r"(?<![/\d.eL])(\d)(\d)(?![\d*/])")
_ZERO_RUN = re.compile(r"^0\^(\d+)$")


def _split_slots(body: str, text: str) -> list[str]:
    slots, depth, current = [], 0, ""
    for ch in body:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ParseError("unbalanced parenthesis", text)
        if ch == "," and depth == 0:
            slots.append(current.strip())
            current = ""
        else:
            current += ch
    slots.append(current.strip())
    return slots


def structure_slots(text: str) -> list[str]:
    """Expand a structure tuple into one slot string per generator."""
    raw = normalize(text).strip()
    superscripted = re.sub(r"0([⁰¹²³⁴⁵⁶⁷⁸⁹]+)", lambda m: "0^" + m.group(1).translate(_SUPERSCRIPTS), raw)
    if not (superscripted.startswith("(") and superscripted.endswith(")")):
        raise ParseError("structure equations must be enclosed in parentheses", text, 0)
    slots = []
    for slot in _split_slots(superscripted[1:-1], text):
        if not slot:
            raise ParseError("empty slot", text)
        run = _ZERO_RUN.match(slot.replace(" ", ""))
        if run:
            slots.extend(["0"] * int(run.group(1)))
        else:
            slots.append(slot)
    return slots


def parse_structure(text: str, param: Fraction | None = None, dims=(6, 7)) -> list[Multivector]:
    """d e^1..d e^n from salamon shorthand, two-digit tokens being e^{ij}."""
    slots = structure_slots(text)
    n = len(slots)
    if n not in dims:
        raise ArityError(f"{text!r} has {n} slots, expected one of {dims}")
    forms = []
    for slot in slots:
        expr = _PAIR.sub(lambda m: f"e{m.group(1)}{m.group(2)}", slot)
        try:
            forms.append(parse_form(expr, n, param))
        except ParseError as exc:
            raise ParseError(f"in slot {slot!r}: {exc.message}", text) from exc
    return forms


def uses_parameter(text: str) -> bool:
    return PARAMETER in normalize(text)


# ---------------------------------------------------------------------------
# Regimes and constraints
# ---------------------------------------------------------------------------

_COMPARATORS = ("!=", "<=", ">=", "<", ">", "=")
_CHAIN = re.compile(r"(!=|<=|>=|<|>|=)")


def _compare(a: Fraction, op: str, b: Fraction) -> bool:
    return {
        "<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b, "=": a == b, "!=": a != b,
    }[op]


@dataclass(frozen=True)
class Regime:
    """Conjunction of chained comparisons in the parameter."""

    text: str
    clauses: tuple[tuple[str, ...], ...]

    def contains(self, value: Fraction) -> bool:
        for clause in self.clauses:
            operands = [value if part == PARAMETER else Fraction(part) for part in clause[::2]]
            ops = clause[1::2]
            for a, op, b in zip(operands, ops, operands[1:]):
                if not _compare(a, op, b):
                    return False
        return True

    __contains__ = contains

    def __str__(self):
        return self.text


def parse_regime(text: str) -> Regime:
    """Comma separated chained comparisons, e.g. '-2<L<0' or 'L!=0,L!=1'."""
    norm = normalize(text).replace(" ", "")
    if not norm:
        return Regime("", ())
    clauses = []
    for part in norm.split(","):
        pieces = _CHAIN.split(part)
        if len(pieces) < 3 or len(pieces) % 2 == 0:
            raise ParseError(f"bad comparison {part!r}", text)
        if PARAMETER not in pieces[::2]:
            raise ParseError(f"comparison {part!r} does not mention {PARAMETER}", text)
        for operand in pieces[::2]:
            if operand != PARAMETER:
                try:
                    Fraction(operand)
                except (ValueError, ZeroDivisionError):
                    raise ParseError(f"bad number {operand!r}", text) from None
        clauses.append(tuple(pieces))
    return Regime(norm, tuple(clauses))


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(normalize(text).strip())
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"not a rational number: {text!r}", text) from None
