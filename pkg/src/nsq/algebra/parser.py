"""Precedence-climbing parser for the ASCII expression grammar.

Grammar: integers, identifiers ``[A-Za-z][A-Za-z0-9]*``, binary ``+ - * / ^``
with the usual precedence (``^`` binds tightest and is right-associative),
unary minus, parentheses and the call ``exp(...)``. Whitespace is ignored.
"""

from __future__ import annotations

from dataclasses import dataclass

import sympy

from nsq.algebra.variables import VariableSet
from nsq.errors import ParseError, ZeroDenominatorError

# Operator groups in increasing binding power
OPERATORS = [
    [("+", "left"), ("-", "left")],
    [("*", "left"), ("/", "left")],
    [("^", "right")],
]

OPERATOR_PREC = {op: idx for idx, group in enumerate(OPERATORS) for op, _ in group}
OPERATOR_ASSOC = {op: assoc for group in OPERATORS for op, assoc in group}
UNARY_PREC = OPERATOR_PREC["*"]


@dataclass(frozen=True)
class Token:
    kind: str  # "int", "name", "op", "(", ")", "end"
    text: str
    position: int


def tokenize(source: str) -> list[Token]:
    if not source.isascii():
        raise ParseError("Only ASCII input is supported", 0)
    tokens: list[Token] = []
    idx = 0
    while idx < len(source):
        c = source[idx]
        if c.isspace():
            idx += 1
            continue
        start = idx
        if c.isdigit():
            while idx < len(source) and source[idx].isdigit():
                idx += 1
            tokens.append(Token("int", source[start:idx], start))
            continue
        if c.isalpha():
            while idx < len(source) and source[idx].isalnum():
                idx += 1
            tokens.append(Token("name", source[start:idx], start))
            continue
        if c in OPERATOR_PREC:
            tokens.append(Token("op", c, start))
            idx += 1
            continue
        if c in "()":
            tokens.append(Token(c, c, start))
            idx += 1
            continue
        raise ParseError(f"Unexpected character {c!r}", start)
    tokens.append(Token("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token], variables: VariableSet) -> None:
        self.tokens = tokens
        self.pos = 0
        self.variables = variables

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def expect(self, kind: str) -> Token:
        token = self.advance()
        if token.kind != kind:
            raise ParseError(f"Expected {kind!r}, found {token.text or 'end of input'!r}", token.position)
        return token

    def atom(self) -> sympy.Expr:
        token = self.advance()
        if token.kind == "op" and token.text == "-":
            return -self.expression(UNARY_PREC)
        if token.kind == "op" and token.text == "+":
            return self.expression(UNARY_PREC)
        if token.kind == "(":
            inner = self.expression(0)
            self.expect(")")
            return inner
        if token.kind == "int":
            return sympy.Integer(int(token.text))
        if token.kind == "name":
            if token.text == "exp":
                self.expect("(")
                arg = self.expression(0)
                self.expect(")")
                return sympy.exp(arg)
            return self.variables.lookup(token.text, token.position)
        if token.kind == "end":
            raise ParseError("Unexpected end of input", token.position)
        raise ParseError(f"Unexpected token {token.text!r}", token.position)

    def expression(self, min_prec: int) -> sympy.Expr:
        lhs = self.atom()
        while True:
            token = self.peek()
            if token.kind != "op":
                return lhs
            prec = OPERATOR_PREC[token.text]
            if prec < min_prec:
                return lhs
            self.advance()
            next_prec = prec + 1 if OPERATOR_ASSOC[token.text] == "left" else prec
            rhs = self.expression(next_prec)
            lhs = self.combine(token, lhs, rhs)

    def combine(self, token: Token, lhs: sympy.Expr, rhs: sympy.Expr) -> sympy.Expr:
        op = token.text
        if op == "+":
            return lhs + rhs
        if op == "-":
            return lhs - rhs
        if op == "*":
            return lhs * rhs
        if op == "/":
            if sympy.expand(sympy.together(rhs)) == 0:
                raise ZeroDenominatorError(f"Division by the zero polynomial at position {token.position}")
            return lhs / rhs
        # "^": integer exponents only
        if not (rhs.is_Integer):
            raise ParseError("Exponent must be an integer constant", token.position)
        if rhs < 0 and sympy.expand(sympy.together(lhs)) == 0:
            raise ZeroDenominatorError(f"Negative power of zero at position {token.position}")
        return lhs**rhs


def parse(text: str, variables: VariableSet) -> sympy.Expr:
    """Parse ``text`` into an expression over ``variables``."""
    parser = _Parser(tokenize(text), variables)
    result = parser.expression(0)
    trailing = parser.peek()
    if trailing.kind != "end":
        raise ParseError(f"Unexpected trailing input {trailing.text!r}", trailing.position)
    return result
