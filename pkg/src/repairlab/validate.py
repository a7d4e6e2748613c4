"""Static checks: scoping, typing, structure.

`validate_program` rejects ill-formed trees and returns a `ProgramInfo`
with per-node facts reused throughout the lab (expression types, variables
in scope at each node, enclosing function, function sizes). The checker
works directly on ASTs so patched programs can be re-validated without a
reparse (which would renumber their ids).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import DuplicateFunctionError, TypeCheckError
from .syntax import (
    Assign,
    BinaryOp,
    Block,
    BoolLiteral,
    Expr,
    FunctionDef,
    If,
    IntLiteral,
    Program,
    Return,
    UnaryOp,
    VarRef,
    While,
    function_size,
    walk,
    walk_program,
)

_ARITH = {"+", "-", "*", "/", "%"}
_CMP = {"==", "!=", "<", "<=", ">", ">="}
_LOGIC = {"&&", "||"}


@dataclass(frozen=True)
class ProgramInfo:
    types: dict[int, str]          # expression node id -> 'int' | 'bool'
    scopes: dict[int, tuple[str, ...]]  # node id -> variables in scope before it
    fn_by_node: dict[int, str]
    fn_sizes: dict[str, int]
    fn_order: dict[str, int]       # source position of each function


def validate_program(program: Program) -> ProgramInfo:
    seen_fn: set[str] = set()
    for fn in program.functions:
        if fn.name in seen_fn:
            raise DuplicateFunctionError(fn.name)
        seen_fn.add(fn.name)

    ids: set[int] = set()
    for node in walk_program(program):
        if node.id in ids:
            raise TypeCheckError(node.id, "duplicate-id", "node id used twice")
        ids.add(node.id)

    types: dict[int, str] = {}
    scopes: dict[int, tuple[str, ...]] = {}
    fn_by_node: dict[int, str] = {}

    for fn in program.functions:
        seen_params: set[str] = set()
        for p in fn.params:
            if p.name in seen_params:
                raise TypeCheckError(fn.body.id, "duplicate-param",
                                     f"parameter {p.name!r} repeated in {fn.name}")
            seen_params.add(p.name)
            if p.lo > p.hi:
                raise TypeCheckError(fn.body.id, "bad-domain",
                                     f"empty domain [{p.lo},{p.hi}] for {p.name!r}")
        for node in walk(fn.body):
            fn_by_node[node.id] = fn.name
        _check_block(fn.body, [[p.name for p in fn.params]], types, scopes)
        if not any(isinstance(n, Return) for n in walk(fn.body)):
            raise TypeCheckError(fn.body.id, "missing-return",
                                 f"function {fn.name!r} has no return statement")

    return ProgramInfo(
        types=types,
        scopes=scopes,
        fn_by_node=fn_by_node,
        fn_sizes={fn.name: function_size(fn) for fn in program.functions},
        fn_order={fn.name: i for i, fn in enumerate(program.functions)},
    )


def _in_scope(scope_stack: list[list[str]]) -> tuple[str, ...]:
    out: list[str] = []
    for frame in scope_stack:
        for name in frame:
            if name not in out:
                out.append(name)
    return tuple(out)


def _check_block(block: Block, scope_stack: list[list[str]],
                 types: dict[int, str], scopes: dict[int, tuple[str, ...]]) -> None:
    scopes[block.id] = _in_scope(scope_stack)
    scope_stack.append([])
    for stmt in block.stmts:
        visible = _in_scope(scope_stack)
        scopes[stmt.id] = visible
        if isinstance(stmt, Assign):
            t = _check_expr(stmt.value, visible, types, scopes)
            if t != "int":
                raise TypeCheckError(stmt.id, "ill-typed",
                                     "assigned value must be an integer")
            if stmt.declare:
                if stmt.name in visible:
                    raise TypeCheckError(stmt.id, "redeclared-var",
                                         f"{stmt.name!r} is already in scope")
                scope_stack[-1].append(stmt.name)
            elif stmt.name not in visible:
                raise TypeCheckError(stmt.id, "unresolved-var",
                                     f"assignment to undeclared {stmt.name!r}")
        elif isinstance(stmt, Return):
            t = _check_expr(stmt.value, visible, types, scopes)
            if t != "int":
                raise TypeCheckError(stmt.id, "ill-typed",
                                     "return value must be an integer")
        elif isinstance(stmt, If):
            t = _check_expr(stmt.cond, visible, types, scopes)
            if t != "bool":
                raise TypeCheckError(stmt.cond.id, "ill-typed",
                                     "if condition must be boolean")
            _check_block(stmt.then, scope_stack, types, scopes)
            if stmt.orelse is not None:
                _check_block(stmt.orelse, scope_stack, types, scopes)
        elif isinstance(stmt, While):
            t = _check_expr(stmt.cond, visible, types, scopes)
            if t != "bool":
                raise TypeCheckError(stmt.cond.id, "ill-typed",
                                     "while condition must be boolean")
            _check_block(stmt.body, scope_stack, types, scopes)
        elif isinstance(stmt, Block):
            _check_block(stmt, scope_stack, types, scopes)
        else:
            raise TypeCheckError(stmt.id, "ill-typed", f"bad statement {stmt!r}")
    scope_stack.pop()


def _check_expr(expr: Expr, visible: tuple[str, ...],
                types: dict[int, str], scopes: dict[int, tuple[str, ...]]) -> str:
    scopes[expr.id] = visible
    if isinstance(expr, IntLiteral):
        types[expr.id] = "int"
        return "int"
    if isinstance(expr, BoolLiteral):
        types[expr.id] = "bool"
        return "bool"
    if isinstance(expr, VarRef):
        if expr.name not in visible:
            raise TypeCheckError(expr.id, "unresolved-var",
                                 f"{expr.name!r} is not in scope")
        types[expr.id] = "int"
        return "int"
    if isinstance(expr, UnaryOp):
        t = _check_expr(expr.operand, visible, types, scopes)
        if expr.op == "-":
            if t != "int":
                raise TypeCheckError(expr.id, "ill-typed", "negate needs an integer")
            types[expr.id] = "int"
            return "int"
        if expr.op == "!":
            if t != "bool":
                raise TypeCheckError(expr.id, "ill-typed", "not needs a boolean")
            types[expr.id] = "bool"
            return "bool"
        raise TypeCheckError(expr.id, "ill-typed", f"bad unary op {expr.op!r}")
    if isinstance(expr, BinaryOp):
        lt = _check_expr(expr.left, visible, types, scopes)
        rt = _check_expr(expr.right, visible, types, scopes)
        if expr.op in _ARITH:
            if lt != "int" or rt != "int":
                raise TypeCheckError(expr.id, "ill-typed",
                                     f"{expr.op} needs integer operands")
            types[expr.id] = "int"
            return "int"
        if expr.op in _CMP:
            if lt != "int" or rt != "int":
                raise TypeCheckError(expr.id, "ill-typed",
                                     f"{expr.op} compares integers")
            types[expr.id] = "bool"
            return "bool"
        if expr.op in _LOGIC:
            if lt != "bool" or rt != "bool":
                raise TypeCheckError(expr.id, "ill-typed",
                                     f"{expr.op} needs boolean operands")
            types[expr.id] = "bool"
            return "bool"
        raise TypeCheckError(expr.id, "ill-typed", f"bad binary op {expr.op!r}")
    raise TypeCheckError(getattr(expr, "id", -1), "ill-typed",
                         f"bad expression {expr!r}")


@lru_cache(maxsize=4096)
def program_info(program: Program) -> ProgramInfo:
    """Memoized `validate_program` for already-valid programs."""
    return validate_program(program)
