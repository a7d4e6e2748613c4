"""Patches: ordered AST edits addressed by stable node ids.

Applying a patch never mutates the input program. Node ids of untouched
nodes survive; replacement and inserted subtrees are renumbered to fresh
ids above the previous maximum, so two patches against the same program
can be compared structurally. The patched program is re-validated; a
patch whose result is ill-typed or structurally broken is rejected.

Text format (one edit per line after a header):

    patch engine=<gv|syn> ordinal=<n>
    replace-expr <nodeId> <expr-src>
    replace-stmt <nodeId> <stmt-src>
    delete-stmt <nodeId>
    insert-before <nodeId> <stmt-src>
    wrap-precondition <nodeId> <expr-src>
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Union

from .errors import IllegalEditError, TypeCheckError, UnknownNodeError
from .syntax import (
    Assign,
    Block,
    Expr,
    FunctionDef,
    If,
    Program,
    Return,
    Stmt,
    STMT_KINDS,
    While,
    expr_to_source,
    function_size,
    max_node_id,
    node_index,
    renumber_node,
    stmt_to_source_inline,
    walk,
)
from .validate import validate_program


@dataclass(frozen=True)
class ReplaceExpr:
    node_id: int
    expr: Expr


@dataclass(frozen=True)
class ReplaceStmt:
    node_id: int
    stmt: Stmt


@dataclass(frozen=True)
class DeleteStmt:
    node_id: int


@dataclass(frozen=True)
class InsertStmtBefore:
    node_id: int
    stmt: Stmt


@dataclass(frozen=True)
class WrapWithPrecondition:
    node_id: int
    guard: Expr


Edit = Union[ReplaceExpr, ReplaceStmt, DeleteStmt, InsertStmtBefore,
             WrapWithPrecondition]


@dataclass(frozen=True)
class Patch:
    edits: tuple[Edit, ...]
    engine: str = "manual"
    ordinal: int = 0
    discovered_at: int = 0  # candidate-evaluation index at discovery


def edit_line(edit: Edit) -> str:
    if isinstance(edit, ReplaceExpr):
        return f"replace-expr {edit.node_id} {expr_to_source(edit.expr)}"
    if isinstance(edit, ReplaceStmt):
        return f"replace-stmt {edit.node_id} {stmt_to_source_inline(edit.stmt)}"
    if isinstance(edit, DeleteStmt):
        return f"delete-stmt {edit.node_id}"
    if isinstance(edit, InsertStmtBefore):
        return f"insert-before {edit.node_id} {stmt_to_source_inline(edit.stmt)}"
    if isinstance(edit, WrapWithPrecondition):
        return f"wrap-precondition {edit.node_id} {expr_to_source(edit.guard)}"
    raise TypeError(f"bad edit: {edit!r}")


def patch_signature(patch: Patch) -> str:
    """Structural identity of a patch: its edit lines, order-sensitive."""
    return "\n".join(edit_line(e) for e in patch.edits)


def format_patch(patch: Patch) -> str:
    header = f"patch engine={patch.engine} ordinal={patch.ordinal}"
    return "\n".join([header] + [edit_line(e) for e in patch.edits]) + "\n"


_HEADER_RE = re.compile(r"patch\s+engine=(?P<engine>\S+)\s+ordinal=(?P<ordinal>\d+)\s*$")


def parse_patch(text: str) -> Patch:
    from .parser import parse_expression, parse_statement

    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and
             not ln.strip().startswith("#")]
    if not lines:
        raise IllegalEditError("empty patch text")
    m = _HEADER_RE.match(lines[0])
    if m is None:
        raise IllegalEditError(f"bad patch header: {lines[0]!r}")
    edits: list[Edit] = []
    for line in lines[1:]:
        kind, _, rest = line.partition(" ")
        nid_text, _, payload = rest.partition(" ")
        try:
            nid = int(nid_text)
        except ValueError:
            raise IllegalEditError(f"bad edit line: {line!r}") from None
        if kind == "replace-expr":
            edits.append(ReplaceExpr(nid, parse_expression(payload)))
        elif kind == "replace-stmt":
            edits.append(ReplaceStmt(nid, parse_statement(payload)))
        elif kind == "delete-stmt":
            edits.append(DeleteStmt(nid))
        elif kind == "insert-before":
            edits.append(InsertStmtBefore(nid, parse_statement(payload)))
        elif kind == "wrap-precondition":
            edits.append(WrapWithPrecondition(nid, parse_expression(payload)))
        else:
            raise IllegalEditError(f"unknown edit kind: {kind!r}")
    return Patch(tuple(edits), engine=m.group("engine"), ordinal=int(m.group("ordinal")))


def read_patch(path) -> Patch:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_patch(fh.read())


def write_patch(patch: Patch, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_patch(patch))


# ---------------------------------------------------------------------------
# Application


def _rebuild_stmts(stmts: tuple[Stmt, ...], edit: Edit, hit: list[bool],
                   fresh: list[int]) -> tuple[Stmt, ...]:
    out: list[Stmt] = []
    for stmt in stmts:
        if isinstance(edit, DeleteStmt) and stmt.id == edit.node_id:
            hit[0] = True
            continue
        if isinstance(edit, InsertStmtBefore) and stmt.id == edit.node_id:
            hit[0] = True
            new_stmt, fresh[0] = renumber_node(edit.stmt, fresh[0])
            out.append(new_stmt)  # type: ignore[arg-type]
            out.append(stmt)
            continue
        if isinstance(edit, ReplaceStmt) and stmt.id == edit.node_id:
            hit[0] = True
            new_stmt, fresh[0] = renumber_node(edit.stmt, fresh[0])
            out.append(new_stmt)  # type: ignore[arg-type]
            continue
        if isinstance(edit, WrapWithPrecondition) and stmt.id == edit.node_id:
            hit[0] = True
            if_id = fresh[0]
            block_id = fresh[0] + 1
            guard, fresh[0] = renumber_node(edit.guard, fresh[0] + 2)
            out.append(If(if_id, guard, Block(block_id, (stmt,)), None))
            continue
        out.append(_rebuild_stmt(stmt, edit, hit, fresh))
    return tuple(out)


def _rebuild_stmt(stmt: Stmt, edit: Edit, hit: list[bool], fresh: list[int]) -> Stmt:
    if isinstance(stmt, Assign):
        return Assign(stmt.id, stmt.name,
                      _rebuild_expr(stmt.value, edit, hit, fresh), stmt.declare)
    if isinstance(stmt, Return):
        return Return(stmt.id, _rebuild_expr(stmt.value, edit, hit, fresh))
    if isinstance(stmt, If):
        cond = _rebuild_expr(stmt.cond, edit, hit, fresh)
        then = Block(stmt.then.id, _rebuild_stmts(stmt.then.stmts, edit, hit, fresh))
        orelse = None
        if stmt.orelse is not None:
            orelse = Block(stmt.orelse.id,
                           _rebuild_stmts(stmt.orelse.stmts, edit, hit, fresh))
        return If(stmt.id, cond, then, orelse)
    if isinstance(stmt, While):
        cond = _rebuild_expr(stmt.cond, edit, hit, fresh)
        return While(stmt.id, cond,
                     Block(stmt.body.id, _rebuild_stmts(stmt.body.stmts, edit, hit, fresh)))
    if isinstance(stmt, Block):
        return Block(stmt.id, _rebuild_stmts(stmt.stmts, edit, hit, fresh))
    raise TypeError(f"bad statement: {stmt!r}")


def _rebuild_expr(expr: Expr, edit: Edit, hit: list[bool], fresh: list[int]) -> Expr:
    if isinstance(edit, ReplaceExpr) and expr.id == edit.node_id:
        hit[0] = True
        new_expr, fresh[0] = renumber_node(edit.expr, fresh[0])
        return new_expr  # type: ignore[return-value]
    from .syntax import BinaryOp, UnaryOp

    if isinstance(expr, UnaryOp):
        return UnaryOp(expr.id, expr.op, _rebuild_expr(expr.operand, edit, hit, fresh))
    if isinstance(expr, BinaryOp):
        left = _rebuild_expr(expr.left, edit, hit, fresh)
        right = _rebuild_expr(expr.right, edit, hit, fresh)
        return BinaryOp(expr.id, expr.op, left, right)
    return expr


def _apply_edit(program: Program, edit: Edit, fresh: list[int]) -> Program:
    index = node_index(program)
    target = index.get(edit.node_id)
    if target is None:
        raise UnknownNodeError(edit.node_id)
    if isinstance(edit, ReplaceExpr):
        if isinstance(target, STMT_KINDS) or isinstance(target, Block):
            raise IllegalEditError(f"node {edit.node_id} is not an expression")
    else:
        if not isinstance(target, STMT_KINDS):
            raise IllegalEditError(f"node {edit.node_id} is not an editable statement")
    hit = [False]
    fns = []
    for fn in program.functions:
        body = Block(fn.body.id, _rebuild_stmts(fn.body.stmts, edit, hit, fresh))
        fns.append(FunctionDef(fn.name, fn.params, body))
    if not hit[0]:
        # The id exists but sits somewhere edits cannot reach (e.g. deleting
        # a block). Treat as an illegal edit rather than silently no-op.
        raise IllegalEditError(f"edit cannot target node {edit.node_id}")
    return Program(tuple(fns))


def apply_patch(program: Program, patch: Patch) -> Program:
    """Apply edits in order; validate the result.

    Raises UnknownNodeError for dangling ids, TypeCheckError when the
    patched program is ill-typed, and IllegalEditError for structural
    violations (empty patch, deleting a function's only return, ...).
    """
    if not patch.edits:
        raise IllegalEditError("a patch must contain at least one edit")
    fresh = [max_node_id(program) + 1]
    out = program
    for edit in patch.edits:
        out = _apply_edit(out, edit, fresh)
    try:
        validate_program(out)
    except TypeCheckError as exc:
        if exc.code in ("missing-return", "unresolved-var", "redeclared-var"):
            raise IllegalEditError(f"patch breaks program structure: {exc}") from exc
        raise
    return out


def involved_targets(patch: Patch, program: Program) -> list[str]:
    """Functions containing an edited node, smallest body first.

    Ties are broken by source order. Function granularity stands in for
    the file granularity used when repairing multi-file projects.
    """
    fn_of: dict[int, str] = {}
    for fn in program.functions:
        for node in walk(fn.body):
            fn_of[node.id] = fn.name
    names: list[str] = []
    for edit in patch.edits:
        name = fn_of.get(edit.node_id)
        if name is None:
            raise UnknownNodeError(edit.node_id)
        if name not in names:
            names.append(name)
    source_order = {f.name: i for i, f in enumerate(program.functions)}
    return sorted(names, key=lambda n: (function_size(program.function(n)),
                                        source_order[n]))
