"""Arithmetic rate expressions: tokenizer, recursive-descent parser, evaluator.

Expressions denote CTMC intensities as functions of raw (unscaled) species
counts, the scale symbol ``N`` and model parameters.  Grammar precedence,
from tightest to loosest: ``^`` (right associative), unary ``-``, ``* /``,
``+ -``.  ``max`` and ``min`` take exactly two arguments.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Mapping


class ExprParseError(ValueError):
    """Syntax error in a rate expression, with 1-based line/column."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


class EvalError(ValueError):
    """Runtime evaluation failure (division by zero, domain error, ...)."""


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Name:
    ident: str


@dataclass(frozen=True)
class Unary:
    op: str  # "-"
    operand: "Node"


@dataclass(frozen=True)
class Binary:
    op: str  # one of + - * / ^
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    func: str  # "max" | "min"
    args: tuple["Node", ...]


Node = Num | Name | Unary | Binary | Call

_FUNCS = ("max", "min")


@dataclass(frozen=True)
class _Token:
    kind: str  # num, name, op, lparen, rparen, comma, end
    text: str
    line: int
    col: int


def _tokenize(text: str, line0: int = 1, col0: int = 1) -> Iterator[_Token]:
    line, col = line0, col0
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c.isspace():
            i += 1
            col += 1
            continue
        if c.isdigit() or (c == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            while j < n and (text[j].isdigit() or text[j] == "."):
                j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    j = k
                    while j < n and text[j].isdigit():
                        j += 1
            tok = text[i:j]
            try:
                float(tok)
            except ValueError:
                raise ExprParseError(f"malformed number {tok!r}", line, col)
            yield _Token("num", tok, line, col)
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            yield _Token("name", text[i:j], line, col)
            col += j - i
            i = j
            continue
        if c in "+-*/^":
            yield _Token("op", c, line, col)
        elif c == "(":
            yield _Token("lparen", c, line, col)
        elif c == ")":
            yield _Token("rparen", c, line, col)
        elif c == ",":
            yield _Token("comma", c, line, col)
        else:
            raise ExprParseError(f"unexpected character {c!r}", line, col)
        i += 1
        col += 1
    yield _Token("end", "", line, col)


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.toks = tokens
        self.pos = 0

    def peek(self) -> _Token:
        return self.toks[self.pos]

    def next(self) -> _Token:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, kind: str, what: str) -> _Token:
        t = self.next()
        if t.kind != kind:
            raise ExprParseError(f"expected {what}, found {t.text or 'end of input'!r}", t.line, t.col)
        return t

    # expr := term (("+"|"-") term)*
    def expr(self) -> Node:
        node = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.next().text
            node = Binary(op, node, self.term())
        return node

    # term := unary (("*"|"/") unary)*
    def term(self) -> Node:
        node = self.unary()
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.next().text
            node = Binary(op, node, self.unary())
        return node

    # unary := "-" unary | power
    def unary(self) -> Node:
        if self.peek().kind == "op" and self.peek().text == "-":
            self.next()
            return Unary("-", self.unary())
        return self.power()

    # power := atom ("^" unary)?   (right associative, exponent may be signed)
    def power(self) -> Node:
        node = self.atom()
        if self.peek().kind == "op" and self.peek().text == "^":
            self.next()
            return Binary("^", node, self.unary())
        return node

    def atom(self) -> Node:
        t = self.next()
        if t.kind == "num":
            return Num(float(t.text))
        if t.kind == "name":
            if self.peek().kind == "lparen":
                if t.text not in _FUNCS:
                    raise ExprParseError(f"unknown function {t.text!r}", t.line, t.col)
                self.next()
                args = [self.expr()]
                while self.peek().kind == "comma":
                    self.next()
                    args.append(self.expr())
                self.expect("rparen", "')'")
                if len(args) != 2:
                    raise ExprParseError(
                        f"{t.text} takes exactly 2 arguments, got {len(args)}", t.line, t.col
                    )
                return Call(t.text, tuple(args))
            return Name(t.text)
        if t.kind == "lparen":
            node = self.expr()
            self.expect("rparen", "')'")
            return node
        raise ExprParseError(f"expected an operand, found {t.text or 'end of input'!r}", t.line, t.col)


def parse_expr(text: str, known: set[str] | None = None, line0: int = 1, col0: int = 1) -> Node:
    """Parse an expression; with `known`, reject identifiers outside it (plus N)."""
    tokens = list(_tokenize(text, line0, col0))
    p = _Parser(tokens)
    node = p.expr()
    tail = p.peek()
    if tail.kind != "end":
        raise ExprParseError(f"unexpected trailing input {tail.text!r}", tail.line, tail.col)
    if known is not None:
        for tok in tokens:
            if tok.kind == "name" and tok.text not in _FUNCS and tok.text != "N" and tok.text not in known:
                raise ExprParseError(f"unknown identifier {tok.text!r}", tok.line, tok.col)
    return node


def names(node: Node) -> set[str]:
    """All identifiers referenced by the expression (excluding max/min)."""
    if isinstance(node, Num):
        return set()
    if isinstance(node, Name):
        return {node.ident}
    if isinstance(node, Unary):
        return names(node.operand)
    if isinstance(node, Binary):
        return names(node.left) | names(node.right)
    return set().union(*(names(a) for a in node.args))


def evaluate(node: Node, env: Mapping[str, float]) -> float:
    """Evaluate against an identifier environment; raises EvalError on failure."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Name):
        try:
            return float(env[node.ident])
        except KeyError:
            raise EvalError(f"unknown identifier {node.ident!r}") from None
    if isinstance(node, Unary):
        return -evaluate(node.operand, env)
    if isinstance(node, Binary):
        a = evaluate(node.left, env)
        b = evaluate(node.right, env)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            if b == 0.0:
                raise EvalError("division by zero")
            return a / b
        try:
            v = a**b
        except (OverflowError, ZeroDivisionError) as e:
            raise EvalError(f"power failed: {e}") from None
        if isinstance(v, complex) or not math.isfinite(v):
            raise EvalError(f"power produced a non-finite value: {a}^{b}")
        return v
    a0 = evaluate(node.args[0], env)
    a1 = evaluate(node.args[1], env)
    return max(a0, a1) if node.func == "max" else min(a0, a1)


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def _prec(node: Node) -> int:
    if isinstance(node, Binary):
        return _PREC[node.op]
    if isinstance(node, Unary):
        return _PREC["neg"]
    return 5


def serialize(node: Node) -> str:
    """Render back to text; re-parsing yields a structurally equal tree."""
    if isinstance(node, Num):
        v = node.value
        return repr(int(v)) if v.is_integer() and abs(v) < 1e15 else repr(v)
    if isinstance(node, Name):
        return node.ident
    if isinstance(node, Unary):
        inner = serialize(node.operand)
        # ^ binds tighter than unary minus, so -x^y round-trips bare
        if _prec(node.operand) < _PREC["neg"]:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(node, Binary):
        lp, rp = _prec(node.left), _prec(node.right)
        p = _PREC[node.op]
        left = serialize(node.left)
        right = serialize(node.right)
        if node.op == "^":
            if lp <= p:  # right associative: parenthesize equal-prec left
                left = f"({left})"
            if rp < _PREC["neg"]:
                right = f"({right})"
        else:
            if lp < p:
                left = f"({left})"
            if rp < p or (rp == p and node.op in ("-", "/")):
                right = f"({right})"
        return f"{left} {node.op} {right}"
    return f"{node.func}({', '.join(serialize(a) for a in node.args)})"
