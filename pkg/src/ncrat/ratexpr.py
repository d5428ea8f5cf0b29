"""Noncommutative rational expressions: syntax trees, parsing and evaluation.

An expression is a finite tree over Const / Var / Add / Neg / Mul / Inv.
Distinct trees are distinct expressions; nothing is simplified.  The
concrete grammar (also emitted by the formatter) is

    expr    := ["-"] term (("+"|"-") term)*
    term    := factor (factor | "*" factor)*        juxtaposition = product
    factor  := atom postfix*
    postfix := "^-1" | "^*" | "^" uint
    atom    := letter | number | "(" expr ")"
    letter  := "X" uint | "Y" uint
    number  := uint ["/" uint] ["i"]

plus one lexical convenience: a parenthesized signed scalar such as
``(1/2 + 1i)``, ``(-3)`` or ``(-2i)`` is a single constant atom, which is
what the formatter emits for constants that are not plain nonnegative
rationals.  ``^k`` unfolds into a k-fold product at parse time, and ``^*``
applies the formal adjoint to the subtree it follows.
"""

from __future__ import annotations

import re as _re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

import numpy as np

from .core import ExactMatrix, Scalar, _mk, matrix_inverse
from .errors import (
    DomainError,
    NotPolynomial,
    ParseError,
    SingularMatrixError,
    UnknownLetter,
)
from .ncpoly import Alphabet, Letter, NcPoly, _point_binding, _point_size, _lookup


# ---------------------------------------------------------------------------
# Nodes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: Scalar


@dataclass(frozen=True)
class Var:
    letter: Letter


@dataclass(frozen=True)
class Add:
    children: tuple

    def __post_init__(self):
        if not self.children:
            raise ValueError("Add needs at least one child")


@dataclass(frozen=True)
class Neg:
    child: "Node"


@dataclass(frozen=True)
class Mul:
    children: tuple

    def __post_init__(self):
        if not self.children:
            raise ValueError("Mul needs at least one child")


@dataclass(frozen=True)
class Inv:
    child: "Node"


Node = Union[Const, Var, Add, Neg, Mul, Inv]


@dataclass(frozen=True)
class RatExpr:
    """A rational expression together with its alphabet."""

    alphabet: Alphabet
    node: Node

    def format(self) -> str:
        return format_expression(self)

    def height(self) -> int:
        return height(self)

    def star(self) -> "RatExpr":
        return star_expression(self)

    def substitute(self, mapping) -> "RatExpr":
        return substitute_letters(self, mapping)

    def eval(self, point, star_rule: str = "adjoint"):
        return eval_expression(self, point, star_rule)

    def letters_used(self) -> set:
        out = set()
        _collect_letters(self.node, out)
        return out

    def uses_star(self) -> bool:
        return any(l.starred for l in self.letters_used())

    def __str__(self):
        return self.format()


def _collect_letters(node: Node, out: set):
    if isinstance(node, Var):
        out.add(node.letter)
    elif isinstance(node, (Add, Mul)):
        for c in node.children:
            _collect_letters(c, out)
    elif isinstance(node, (Neg, Inv)):
        _collect_letters(node.child, out)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_TOKEN = _re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<name>[XY]\d+)"
    r"|(?P<num>\d+(?:/\d+)?i?)"
    r"|(?P<op>\^|\+|-|\*|\(|\))"
)


def _tokenize(text: str):
    tokens = []  # (kind, value, offset)
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup == "name":
            tokens.append(("name", m.group(), m.start()))
        elif m.lastgroup == "num":
            tokens.append(("num", m.group(), m.start()))
        elif m.lastgroup == "op":
            tokens.append((m.group(), m.group(), m.start()))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


def _num_value(text: str) -> tuple[Fraction, bool]:
    imag = text.endswith("i")
    if imag:
        text = text[:-1]
    return Fraction(text), imag


class _Parser:
    def __init__(self, text: str, alphabet: Alphabet):
        self.text = text
        self.alphabet = alphabet
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def expect(self, kind):
        t = self.next()
        if t[0] != kind:
            raise ParseError(f"expected {kind!r}, found {t[1]!r}", t[2])
        return t

    # expr := ["-"] term (("+"|"-") term)*
    def expr(self) -> Node:
        children = []
        if self.peek()[0] == "-":
            self.next()
            children.append(Neg(self.term()))
        else:
            children.append(self.term())
        while self.peek()[0] in ("+", "-"):
            op = self.next()[0]
            t = self.term()
            children.append(Neg(t) if op == "-" else t)
        if len(children) == 1:
            return children[0]
        return Add(tuple(children))

    # term := factor (factor | "*" factor)*
    def term(self) -> Node:
        children = [self.factor()]
        while True:
            k = self.peek()[0]
            if k == "*":
                self.next()
                children.append(self.factor())
            elif k in ("name", "num", "("):
                children.append(self.factor())
            else:
                break
        if len(children) == 1:
            return children[0]
        return Mul(tuple(children))

    # factor := atom postfix*
    def factor(self) -> Node:
        node = self.atom()
        while self.peek()[0] == "^":
            caret = self.next()
            k, v, off = self.peek()
            if k == "-":
                self.next()
                t = self.expect("num")
                if t[1] != "1":
                    raise ParseError("only ^-1 is supported as a negative power", t[2])
                node = Inv(node)
            elif k == "*":
                self.next()
                node = _star_node(node)
            elif k == "num":
                self.next()
                value, imag = _num_value(v)
                if imag or value.denominator != 1:
                    raise ParseError("power must be a nonnegative integer", off)
                node = _power(node, int(value))
            else:
                raise ParseError("expected -1, * or an integer after ^", caret[2])
        return node

    # atom := letter | number | scalar-literal | "(" expr ")"
    def atom(self) -> Node:
        k, v, off = self.peek()
        if k == "name":
            self.next()
            idx = self.alphabet.index_of(v)
            if idx is None:
                raise UnknownLetter(f"letter {v!r} not in alphabet {list(self.alphabet.names)}", off)
            return Var(Letter(idx, False))
        if k == "num":
            self.next()
            value, imag = _num_value(v)
            return Const(_mk(Fraction(0), value) if imag else _mk(value, Fraction(0)))
        if k == "(":
            lit = self._try_scalar_literal()
            if lit is not None:
                return lit
            self.next()
            node = self.expr()
            self.expect(")")
            return node
        raise ParseError(f"expected an atom, found {v!r}", off)

    def _try_scalar_literal(self):
        """Parse "(" ["-"] num [("+"|"-") imag-num] ")" as a single Const."""
        save = self.pos
        try:
            self.expect("(")
            sign = Fraction(1)
            if self.peek()[0] == "-":
                self.next()
                sign = Fraction(-1)
            t = self.expect("num")
            v1, imag1 = _num_value(t[1])
            if self.peek()[0] == ")":
                if sign == 1 and not imag1:
                    # "(3)" is an ordinary parenthesized expression
                    raise ParseError("not a literal", t[2])
                self.next()
                val = _mk(Fraction(0), sign * v1) if imag1 else _mk(sign * v1, Fraction(0))
                return Const(val)
            if self.peek()[0] in ("+", "-") and not imag1:
                s2 = Fraction(1) if self.next()[0] == "+" else Fraction(-1)
                t2 = self.expect("num")
                v2, imag2 = _num_value(t2[1])
                if not imag2:
                    raise ParseError("not a literal", t2[2])
                self.expect(")")
                return Const(_mk(sign * v1, s2 * v2))
            raise ParseError("not a literal", self.peek()[2])
        except ParseError:
            self.pos = save
            return None


def _power(node: Node, k: int) -> Node:
    if k == 0:
        return Const(Scalar(1))
    if k == 1:
        return node
    return Mul(tuple([node] * k))


def parse_expression(text: str, alphabet: Alphabet | int) -> RatExpr:
    """Parse text into a RatExpr over the given alphabet.

    ``alphabet`` may be an integer g, shorthand for the default alphabet
    X1..Xg.  Raises ParseError (with a byte offset) or UnknownLetter.
    """
    if isinstance(alphabet, int):
        alphabet = Alphabet.x(alphabet)
    p = _Parser(text, alphabet)
    node = p.expr()
    t = p.peek()
    if t[0] != "eof":
        raise ParseError(f"trailing input {t[1]!r}", t[2])
    return RatExpr(alphabet, node)


# ---------------------------------------------------------------------------
# Formatting
# ---------------------------------------------------------------------------

_PREC_ADD, _PREC_MUL, _PREC_POSTFIX, _PREC_ATOM = 1, 2, 3, 4


def _fmt_scalar(s: Scalar) -> str:
    re_, im = s.re, s.im
    if not im:
        return str(re_) if re_ >= 0 else f"(-{-re_})"
    if not re_:
        return f"{im}i" if im > 0 else f"(-{-im}i)"
    sign = "+" if im > 0 else "-"
    return f"({re_} {sign} {abs(im)}i)"


def _fmt(node: Node, alphabet: Alphabet, min_prec: int) -> str:
    if isinstance(node, Const):
        return _fmt_scalar(node.value)
    if isinstance(node, Var):
        return alphabet.letter_name(node.letter)
    if isinstance(node, Add):
        # when the sum itself gets parenthesized, bare numeric parts must be
        # wrapped too, or the result could re-parse as a single scalar literal
        wrap = min_prec > _PREC_ADD

        def part(c):
            inner = c.child if isinstance(c, Neg) else c
            body = _fmt(inner, alphabet, _PREC_MUL)
            if wrap and isinstance(inner, Const) and not body.startswith("("):
                body = f"({body})"
            return ("-", body) if isinstance(c, Neg) else ("+", body)

        sign0, body0 = part(node.children[0])
        parts = [body0 if sign0 == "+" else "-" + body0]
        for c in node.children[1:]:
            sign, body = part(c)
            parts.append(f"{sign} {body}")
        text = " ".join(parts)
        return f"({text})" if wrap else text

    if isinstance(node, Neg):
        body = _fmt(node.child, alphabet, _PREC_MUL)
        if min_prec > _PREC_ADD:
            if isinstance(node.child, Const) and not body.startswith("("):
                body = f"({body})"
            return f"(-{body})"
        return "-" + body
    if isinstance(node, Mul):
        text = "*".join(_fmt(c, alphabet, _PREC_POSTFIX) for c in node.children)
        return f"({text})" if min_prec > _PREC_MUL else text
    if isinstance(node, Inv):
        return _fmt(node.child, alphabet, _PREC_POSTFIX) + "^-1"
    raise TypeError(f"unknown node {node!r}")


def format_expression(e: RatExpr) -> str:
    """Canonical text form; parse(format(e)) is structurally equal to e."""
    return _fmt(e.node, e.alphabet, _PREC_ADD)


# ---------------------------------------------------------------------------
# Structural operations
# ---------------------------------------------------------------------------


def height(e: RatExpr | Node) -> int:
    """Maximal number of nested inverses (0 for polynomials)."""
    node = e.node if isinstance(e, RatExpr) else e
    if isinstance(node, (Const, Var)):
        return 0
    if isinstance(node, (Add, Mul)):
        return max(height(c) for c in node.children)
    if isinstance(node, Neg):
        return height(node.child)
    return 1 + height(node.child)  # Inv


def _star_node(node: Node) -> Node:
    if isinstance(node, Const):
        return Const(node.value.conjugate())
    if isinstance(node, Var):
        return Var(node.letter.star)
    if isinstance(node, Add):
        return Add(tuple(_star_node(c) for c in node.children))
    if isinstance(node, Neg):
        return Neg(_star_node(node.child))
    if isinstance(node, Mul):
        return Mul(tuple(_star_node(c) for c in reversed(node.children)))
    return Inv(_star_node(node.child))


def star_expression(e: RatExpr) -> RatExpr:
    """Formal adjoint: reverses products, stars letters, conjugates constants."""
    return RatExpr(e.alphabet, _star_node(e.node))


def substitute_letters(e: RatExpr, mapping: Mapping[Letter, "RatExpr | Node"]) -> RatExpr:
    """Simultaneously replace letters by expressions; unmapped letters stay."""
    table = {}
    for l, img in mapping.items():
        table[l] = img.node if isinstance(img, RatExpr) else img

    def walk(node: Node) -> Node:
        if isinstance(node, Var):
            return table.get(node.letter, node)
        if isinstance(node, Const):
            return node
        if isinstance(node, Add):
            return Add(tuple(walk(c) for c in node.children))
        if isinstance(node, Neg):
            return Neg(walk(node.child))
        if isinstance(node, Mul):
            return Mul(tuple(walk(c) for c in node.children))
        return Inv(walk(node.child))

    return RatExpr(e.alphabet, walk(e.node))


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def eval_expression(e: RatExpr, point, star_rule: str = "adjoint"):
    """Evaluate at a tuple (or Letter mapping) of square matrices.

    Exact matrices give an exact value; numpy arrays evaluate in floats.
    A singular inverse raises DomainError carrying the path of child
    indices from the root to the offending Inv node.
    """
    binding = _point_binding(point, star_rule)
    n = _point_size(binding)
    exact = isinstance(next(iter(binding.values())), ExactMatrix)
    ident = ExactMatrix.identity(n) if exact else np.eye(n, dtype=complex)

    def walk(node: Node, path: tuple):
        if isinstance(node, Const):
            if exact:
                return ident.scale(node.value)
            return node.value.to_complex() * ident
        if isinstance(node, Var):
            return _lookup(binding, node.letter)
        if isinstance(node, Add):
            acc = walk(node.children[0], path + (0,))
            for i, c in enumerate(node.children[1:], start=1):
                acc = acc + walk(c, path + (i,))
            return acc
        if isinstance(node, Neg):
            return -walk(node.child, path + (0,))
        if isinstance(node, Mul):
            acc = walk(node.children[0], path + (0,))
            for i, c in enumerate(node.children[1:], start=1):
                nxt = walk(c, path + (i,))
                acc = acc * nxt if exact else acc @ nxt
            return acc
        # Inv
        val = walk(node.child, path + (0,))
        if exact:
            try:
                return matrix_inverse(val)
            except SingularMatrixError:
                raise DomainError("singular inverse: point outside dom r", path) from None
        try:
            inv = np.linalg.inv(val)
        except np.linalg.LinAlgError:
            raise DomainError("singular inverse: point outside dom r", path) from None
        if not np.all(np.isfinite(inv)):
            raise DomainError("non-finite inverse: point outside dom r", path)
        return inv

    return walk(e.node, ())


# ---------------------------------------------------------------------------
# Conversions with the free algebra
# ---------------------------------------------------------------------------


def expression_to_poly(e: RatExpr) -> NcPoly:
    """Flatten an inverse-free expression into an NcPoly."""

    def walk(node: Node) -> NcPoly:
        if isinstance(node, Const):
            return NcPoly.constant(e.alphabet, node.value)
        if isinstance(node, Var):
            return NcPoly.var(e.alphabet, node.letter.index, node.letter.starred)
        if isinstance(node, Add):
            acc = walk(node.children[0])
            for c in node.children[1:]:
                acc = acc + walk(c)
            return acc
        if isinstance(node, Neg):
            return -walk(node.child)
        if isinstance(node, Mul):
            acc = walk(node.children[0])
            for c in node.children[1:]:
                acc = acc * walk(c)
            return acc
        raise NotPolynomial("expression contains an inverse")

    return walk(e.node)


def poly_to_expression(f: NcPoly) -> RatExpr:
    """Canonical expression tree of a polynomial (graded-lex sum of monomials)."""
    terms = []
    for w in f.support():
        c = f.terms[w]
        factors = [Var(l) for l in w]
        if not factors:
            terms.append(Const(c))
        elif c == Scalar(1):
            terms.append(factors[0] if len(factors) == 1 else Mul(tuple(factors)))
        else:
            terms.append(Mul(tuple([Const(c)] + factors)))
    if not terms:
        return RatExpr(f.alphabet, Const(Scalar(0)))
    node = terms[0] if len(terms) == 1 else Add(tuple(terms))
    return RatExpr(f.alphabet, node)


def parse_poly(text: str, alphabet: Alphabet | int) -> NcPoly:
    """Parse an inverse-free expression and flatten it to a polynomial."""
    return expression_to_poly(parse_expression(text, alphabet))
