"""AST of the little imperative language, plus canonical printing.

Programs are immutable trees of frozen dataclasses. Every statement and
expression node carries an integer `id`. A freshly parsed program is
numbered canonically: ids are assigned in pre-order over the whole file,
starting at 0, so re-parsing the canonical pretty-print reproduces the
same ids. Patched programs keep the ids of untouched nodes and place new
subtrees above the previous maximum id (see `patches.apply_patch`).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterator, Optional, Union

# ---------------------------------------------------------------------------
# Nodes


@dataclass(frozen=True)
class IntLiteral:
    id: int
    value: int


@dataclass(frozen=True)
class BoolLiteral:
    id: int
    value: bool


@dataclass(frozen=True)
class VarRef:
    id: int
    name: str


@dataclass(frozen=True)
class UnaryOp:
    id: int
    op: str  # '-' (negate) or '!' (not)
    operand: "Expr"


@dataclass(frozen=True)
class BinaryOp:
    id: int
    op: str  # + - * / % < <= > >= == != && ||
    left: "Expr"
    right: "Expr"


Expr = Union[IntLiteral, BoolLiteral, VarRef, UnaryOp, BinaryOp]


@dataclass(frozen=True)
class Assign:
    id: int
    name: str
    value: Expr
    declare: bool  # True for `let x = e;`


@dataclass(frozen=True)
class Block:
    id: int
    stmts: tuple["Stmt", ...]


@dataclass(frozen=True)
class If:
    id: int
    cond: Expr
    then: Block
    orelse: Optional[Block]


@dataclass(frozen=True)
class While:
    id: int
    cond: Expr
    body: Block


@dataclass(frozen=True)
class Return:
    id: int
    value: Expr


Stmt = Union[Assign, If, While, Return, Block]
AstNode = Union[Expr, Stmt]

STMT_KINDS = (Assign, If, While, Return)


@dataclass(frozen=True)
class Param:
    name: str
    lo: int
    hi: int


@dataclass(frozen=True)
class FunctionDef:
    name: str
    params: tuple[Param, ...]
    body: Block


@dataclass(frozen=True)
class Program:
    functions: tuple[FunctionDef, ...]

    def function(self, name: str) -> Optional[FunctionDef]:
        for fn in self.functions:
            if fn.name == name:
                return fn
        return None


# ---------------------------------------------------------------------------
# Traversal


def children(node: AstNode) -> tuple[AstNode, ...]:
    if isinstance(node, (IntLiteral, BoolLiteral, VarRef)):
        return ()
    if isinstance(node, UnaryOp):
        return (node.operand,)
    if isinstance(node, BinaryOp):
        return (node.left, node.right)
    if isinstance(node, Assign):
        return (node.value,)
    if isinstance(node, Block):
        return node.stmts
    if isinstance(node, If):
        out: tuple[AstNode, ...] = (node.cond, node.then)
        if node.orelse is not None:
            out += (node.orelse,)
        return out
    if isinstance(node, While):
        return (node.cond, node.body)
    if isinstance(node, Return):
        return (node.value,)
    raise TypeError(f"not an AST node: {node!r}")


def walk(node: AstNode) -> Iterator[AstNode]:
    """Pre-order traversal of a subtree."""
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(reversed(children(n)))


def walk_program(program: Program) -> Iterator[AstNode]:
    for fn in program.functions:
        yield from walk(fn.body)


def node_count(node: AstNode) -> int:
    return sum(1 for _ in walk(node))


def function_size(fn: FunctionDef) -> int:
    return node_count(fn.body)


def node_index(program: Program) -> dict[int, AstNode]:
    return {n.id: n for n in walk_program(program)}


def function_of_node(program: Program) -> dict[int, str]:
    out: dict[int, str] = {}
    for fn in program.functions:
        for n in walk(fn.body):
            out[n.id] = fn.name
    return out


def max_node_id(program: Program) -> int:
    return max((n.id for n in walk_program(program)), default=-1)


def int_constants(program: Program) -> list[int]:
    """Distinct integer literal values occurring in the program, sorted.

    A unary minus directly on a literal is folded by the parser, so
    negative constants appear here as negative literal values.
    """
    vals = {n.value for n in walk_program(program) if isinstance(n, IntLiteral)}
    return sorted(vals)


# ---------------------------------------------------------------------------
# Renumbering


def renumber_node(node: AstNode, start: int) -> tuple[AstNode, int]:
    """Rebuild a subtree with ids assigned in pre-order from `start`.

    Returns the new subtree and the next unused id.
    """
    nxt = start

    def rec(n: AstNode) -> AstNode:
        nonlocal nxt
        nid = nxt
        nxt += 1
        if isinstance(n, (IntLiteral, BoolLiteral, VarRef)):
            return replace(n, id=nid)
        if isinstance(n, UnaryOp):
            return UnaryOp(nid, n.op, rec(n.operand))
        if isinstance(n, BinaryOp):
            left = rec(n.left)
            return BinaryOp(nid, n.op, left, rec(n.right))
        if isinstance(n, Assign):
            return Assign(nid, n.name, rec(n.value), n.declare)
        if isinstance(n, Block):
            return Block(nid, tuple(rec(s) for s in n.stmts))
        if isinstance(n, If):
            cond = rec(n.cond)
            then = rec(n.then)
            orelse = rec(n.orelse) if n.orelse is not None else None
            return If(nid, cond, then, orelse)
        if isinstance(n, While):
            cond = rec(n.cond)
            return While(nid, cond, rec(n.body))
        if isinstance(n, Return):
            return Return(nid, rec(n.value))
        raise TypeError(f"not an AST node: {n!r}")

    return rec(node), nxt


def renumber_program(program: Program) -> Program:
    """Canonical numbering: pre-order ids over all functions, from 0."""
    nxt = 0
    fns = []
    for fn in program.functions:
        body, nxt = renumber_node(fn.body, nxt)
        fns.append(FunctionDef(fn.name, fn.params, body))
    return Program(tuple(fns))


# ---------------------------------------------------------------------------
# Pretty printing (canonical form)

_PRECEDENCE = {
    "||": 1,
    "&&": 2,
    "==": 3, "!=": 3, "<": 3, "<=": 3, ">": 3, ">=": 3,
    "+": 4, "-": 4,
    "*": 5, "/": 5, "%": 5,
}
_UNARY_PRECEDENCE = 6


def expr_to_source(expr: Expr) -> str:
    return _expr_src(expr, 0)


def _expr_src(expr: Expr, parent_prec: int) -> str:
    if isinstance(expr, IntLiteral):
        return str(expr.value)
    if isinstance(expr, BoolLiteral):
        return "true" if expr.value else "false"
    if isinstance(expr, VarRef):
        return expr.name
    if isinstance(expr, UnaryOp):
        inner = _expr_src(expr.operand, _UNARY_PRECEDENCE)
        # Parenthesize compound operands; -x and !flag stay bare.
        if not isinstance(expr.operand, (IntLiteral, BoolLiteral, VarRef)):
            inner = f"({inner})"
        elif isinstance(expr.operand, IntLiteral) and expr.operand.value < 0:
            inner = f"({inner})"
        src = f"{expr.op}{inner}"
        return src
    if isinstance(expr, BinaryOp):
        prec = _PRECEDENCE[expr.op]
        # All binary operators associate to the left.
        left = _expr_src(expr.left, prec)
        right = _expr_src(expr.right, prec + 1)
        src = f"{left} {expr.op} {right}"
        if prec < parent_prec:
            return f"({src})"
        return src
    raise TypeError(f"not an expression: {expr!r}")


def _stmt_lines(stmt: Stmt, indent: int) -> list[str]:
    pad = "  " * indent
    if isinstance(stmt, Assign):
        kw = "let " if stmt.declare else ""
        return [f"{pad}{kw}{stmt.name} = {expr_to_source(stmt.value)};"]
    if isinstance(stmt, Return):
        return [f"{pad}return {expr_to_source(stmt.value)};"]
    if isinstance(stmt, If):
        lines = [f"{pad}if ({expr_to_source(stmt.cond)}) {{"]
        for s in stmt.then.stmts:
            lines.extend(_stmt_lines(s, indent + 1))
        if stmt.orelse is not None:
            lines.append(f"{pad}}} else {{")
            for s in stmt.orelse.stmts:
                lines.extend(_stmt_lines(s, indent + 1))
        lines.append(f"{pad}}}")
        return lines
    if isinstance(stmt, While):
        lines = [f"{pad}while ({expr_to_source(stmt.cond)}) {{"]
        for s in stmt.body.stmts:
            lines.extend(_stmt_lines(s, indent + 1))
        lines.append(f"{pad}}}")
        return lines
    if isinstance(stmt, Block):
        lines = []
        for s in stmt.stmts:
            lines.extend(_stmt_lines(s, indent))
        return lines
    raise TypeError(f"not a statement: {stmt!r}")


def stmt_to_source_inline(stmt: Stmt) -> str:
    """Single-line rendering, used by the patch file format."""
    if isinstance(stmt, Assign):
        kw = "let " if stmt.declare else ""
        return f"{kw}{stmt.name} = {expr_to_source(stmt.value)};"
    if isinstance(stmt, Return):
        return f"return {expr_to_source(stmt.value)};"
    if isinstance(stmt, If):
        body = " ".join(stmt_to_source_inline(s) for s in stmt.then.stmts)
        src = f"if ({expr_to_source(stmt.cond)}) {{ {body} }}" if body else \
            f"if ({expr_to_source(stmt.cond)}) {{ }}"
        if stmt.orelse is not None:
            els = " ".join(stmt_to_source_inline(s) for s in stmt.orelse.stmts)
            src += f" else {{ {els} }}" if els else " else { }"
        return src
    if isinstance(stmt, While):
        body = " ".join(stmt_to_source_inline(s) for s in stmt.body.stmts)
        return f"while ({expr_to_source(stmt.cond)}) {{ {body} }}" if body else \
            f"while ({expr_to_source(stmt.cond)}) {{ }}"
    if isinstance(stmt, Block):
        return " ".join(stmt_to_source_inline(s) for s in stmt.stmts)
    raise TypeError(f"not a statement: {stmt!r}")


def function_to_source(fn: FunctionDef) -> str:
    params = ", ".join(f"{p.name} in [{p.lo},{p.hi}]" for p in fn.params)
    lines = [f"fn {fn.name}({params}) {{"]
    for s in fn.body.stmts:
        lines.extend(_stmt_lines(s, 1))
    lines.append("}")
    return "\n".join(lines)


def program_to_source(program: Program) -> str:
    """Canonical text of a program; parsing it back reproduces the tree.

    The round trip reproduces node ids exactly when `program` carries
    canonical (pre-order from 0) numbering, i.e. for any parser output.
    """
    return "\n\n".join(function_to_source(fn) for fn in program.functions) + (
        "\n" if program.functions else ""
    )
