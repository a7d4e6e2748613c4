"""Recursive-descent parser for `.mrl` sources.

Grammar (whitespace-insensitive, `#` comments run to end of line):

    program  := fn*
    fn       := "fn" NAME "(" params? ")" block
    params   := param ("," param)*
    param    := NAME "in" "[" INT "," INT "]"
    block    := "{" stmt* "}"
    stmt     := "let" NAME "=" expr ";"
              | NAME "=" expr ";"
              | "if" "(" expr ")" block ("else" block)?
              | "while" "(" expr ")" block
              | "return" expr ";"
    expr     := or-expr with C-like precedence:
                ||  <  &&  <  comparisons  <  + -  <  * / %  <  unary - !

`and`/`or`/`not` are accepted as aliases of `&&`/`||`/`!`; the canonical
printer always emits the symbolic forms. A unary minus applied directly
to an integer literal folds into a negative literal.

Parsing assigns canonical pre-order node ids and type-checks the result.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError
from .syntax import (
    Assign,
    BinaryOp,
    Block,
    BoolLiteral,
    Expr,
    FunctionDef,
    If,
    IntLiteral,
    Param,
    Program,
    Return,
    Stmt,
    UnaryOp,
    VarRef,
    While,
    renumber_node,
    renumber_program,
)
from .validate import validate_program

_KEYWORDS = {"fn", "let", "if", "else", "while", "return", "in", "true", "false",
             "and", "or", "not"}
_SYMBOLS = ["==", "!=", "<=", ">=", "&&", "||",
            "(", ")", "{", "}", "[", "]", ",", ";", "=", "<", ">",
            "+", "-", "*", "/", "%", "!"]


@dataclass(frozen=True)
class Token:
    kind: str  # 'int' | 'name' | 'kw' | 'sym' | 'eof'
    text: str
    line: int
    col: int


def tokenize(source: str) -> list[Token]:
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(source)
    while i < n:
        c = source[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "#":
            while i < n and source[i] != "\n":
                i += 1
            continue
        if c.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            toks.append(Token("int", source[i:j], line, col))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            text = source[i:j]
            toks.append(Token("kw" if text in _KEYWORDS else "name", text, line, col))
            col += j - i
            i = j
            continue
        for sym in _SYMBOLS:
            if source.startswith(sym, i):
                toks.append(Token("sym", sym, line, col))
                col += len(sym)
                i += len(sym)
                break
        else:
            raise ParseError(line, col, f"unexpected character {c!r}")
    toks.append(Token("eof", "", line, col))
    return toks


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.toks[self.pos]

    def advance(self) -> Token:
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def fail(self, message: str) -> ParseError:
        tok = self.peek()
        return ParseError(tok.line, tok.col, message)

    def expect(self, kind: str, text: str | None = None) -> Token:
        tok = self.peek()
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text if text is not None else kind
            got = tok.text if tok.text else tok.kind
            raise self.fail(f"expected {want!r}, got {got!r}")
        return self.advance()

    def accept(self, kind: str, text: str | None = None) -> Token | None:
        tok = self.peek()
        if tok.kind == kind and (text is None or tok.text == text):
            return self.advance()
        return None

    # -- structure ---------------------------------------------------------

    def program(self) -> Program:
        fns = []
        while self.peek().kind != "eof":
            fns.append(self.function())
        return Program(tuple(fns))

    def function(self) -> FunctionDef:
        self.expect("kw", "fn")
        name = self.expect("name").text
        self.expect("sym", "(")
        params = []
        if not self.accept("sym", ")"):
            while True:
                params.append(self.param())
                if self.accept("sym", ")"):
                    break
                self.expect("sym", ",")
        body = self.block()
        return FunctionDef(name, tuple(params), body)

    def param(self) -> Param:
        name = self.expect("name").text
        self.expect("kw", "in")
        self.expect("sym", "[")
        lo = self.signed_int()
        self.expect("sym", ",")
        hi = self.signed_int()
        self.expect("sym", "]")
        return Param(name, lo, hi)

    def signed_int(self) -> int:
        neg = self.accept("sym", "-") is not None
        tok = self.expect("int")
        value = int(tok.text)
        return -value if neg else value

    def block(self) -> Block:
        self.expect("sym", "{")
        stmts = []
        while not self.accept("sym", "}"):
            stmts.append(self.statement())
        return Block(-1, tuple(stmts))

    def statement(self) -> Stmt:
        tok = self.peek()
        if tok.kind == "kw" and tok.text == "let":
            self.advance()
            name = self.expect("name").text
            self.expect("sym", "=")
            value = self.expression()
            self.expect("sym", ";")
            return Assign(-1, name, value, declare=True)
        if tok.kind == "kw" and tok.text == "if":
            self.advance()
            self.expect("sym", "(")
            cond = self.expression()
            self.expect("sym", ")")
            then = self.block()
            orelse = self.block() if self.accept("kw", "else") else None
            return If(-1, cond, then, orelse)
        if tok.kind == "kw" and tok.text == "while":
            self.advance()
            self.expect("sym", "(")
            cond = self.expression()
            self.expect("sym", ")")
            body = self.block()
            return While(-1, cond, body)
        if tok.kind == "kw" and tok.text == "return":
            self.advance()
            value = self.expression()
            self.expect("sym", ";")
            return Return(-1, value)
        if tok.kind == "name":
            name = self.advance().text
            self.expect("sym", "=")
            value = self.expression()
            self.expect("sym", ";")
            return Assign(-1, name, value, declare=False)
        raise self.fail("expected a statement")

    # -- expressions ---------------------------------------------------------

    def expression(self) -> Expr:
        return self.or_expr()

    def or_expr(self) -> Expr:
        left = self.and_expr()
        while self.accept("sym", "||") or self.accept("kw", "or"):
            left = BinaryOp(-1, "||", left, self.and_expr())
        return left

    def and_expr(self) -> Expr:
        left = self.cmp_expr()
        while self.accept("sym", "&&") or self.accept("kw", "and"):
            left = BinaryOp(-1, "&&", left, self.cmp_expr())
        return left

    def cmp_expr(self) -> Expr:
        left = self.add_expr()
        while True:
            tok = self.peek()
            if tok.kind == "sym" and tok.text in ("==", "!=", "<", "<=", ">", ">="):
                self.advance()
                left = BinaryOp(-1, tok.text, left, self.add_expr())
            else:
                return left

    def add_expr(self) -> Expr:
        left = self.mul_expr()
        while True:
            tok = self.peek()
            if tok.kind == "sym" and tok.text in ("+", "-"):
                self.advance()
                left = BinaryOp(-1, tok.text, left, self.mul_expr())
            else:
                return left

    def mul_expr(self) -> Expr:
        left = self.unary_expr()
        while True:
            tok = self.peek()
            if tok.kind == "sym" and tok.text in ("*", "/", "%"):
                self.advance()
                left = BinaryOp(-1, tok.text, left, self.unary_expr())
            else:
                return left

    def unary_expr(self) -> Expr:
        if self.accept("sym", "-"):
            operand = self.unary_expr()
            if isinstance(operand, IntLiteral):
                return IntLiteral(-1, -operand.value)
            return UnaryOp(-1, "-", operand)
        if self.accept("sym", "!") or self.accept("kw", "not"):
            return UnaryOp(-1, "!", self.unary_expr())
        return self.atom()

    def atom(self) -> Expr:
        tok = self.peek()
        if tok.kind == "int":
            self.advance()
            return IntLiteral(-1, int(tok.text))
        if tok.kind == "kw" and tok.text in ("true", "false"):
            self.advance()
            return BoolLiteral(-1, tok.text == "true")
        if tok.kind == "name":
            self.advance()
            return VarRef(-1, tok.text)
        if tok.kind == "sym" and tok.text == "(":
            self.advance()
            expr = self.expression()
            self.expect("sym", ")")
            return expr
        raise self.fail("expected an expression")


def parse(source: str) -> Program:
    """Parse and validate a program; node ids are canonical pre-order."""
    parser = _Parser(tokenize(source))
    program = renumber_program(parser.program())
    validate_program(program)
    return program


def parse_expression(source: str) -> Expr:
    """Parse a bare expression (unvalidated; ids are local pre-order)."""
    parser = _Parser(tokenize(source))
    expr = parser.expression()
    parser.expect("eof")
    node, _ = renumber_node(expr, 0)
    return node  # type: ignore[return-value]


def parse_statement(source: str) -> Stmt:
    """Parse a bare statement (unvalidated; ids are local pre-order)."""
    parser = _Parser(tokenize(source))
    stmt = parser.statement()
    parser.expect("eof")
    node, _ = renumber_node(stmt, 0)
    return node  # type: ignore[return-value]


def parse_file(path) -> Program:
    with open(path, "r", encoding="utf-8") as fh:
        return parse(fh.read())
