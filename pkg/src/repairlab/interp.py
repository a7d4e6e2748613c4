"""Deterministic tree-walking interpreter with instrumentation.

Semantics notes:
  * Integer values only; `/` and `%` follow Python's floor-division rules.
  * Division or modulo by zero yields a runtime-error outcome, it never
    crashes the harness. A function body that finishes without hitting a
    `return` yields a `missing-return` runtime error.
  * Step accounting: every executed statement costs one step, and every
    loop-condition check costs one step, so non-terminating loops hit the
    step limit deterministically.
  * `execute_angelic` overrides the outcome of If/While condition checks
    with a caller-supplied boolean sequence per condition node, consumed
    in order; once a node's sequence is exhausted, the real value is used
    again. The condition expression itself is still evaluated (so coverage
    and step costs match plain execution exactly).

Every run records node coverage, the (condition node, value) log, and the
variable valuation at each condition check; the last of these feeds
condition synthesis.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .errors import ArityMismatchError, UnknownFunctionError
from .syntax import (
    Assign,
    BinaryOp,
    Block,
    BoolLiteral,
    Expr,
    If,
    IntLiteral,
    Program,
    Return,
    UnaryOp,
    VarRef,
    While,
)

DEFAULT_STEP_LIMIT = 10_000

RETURNED = "returned"
STEP_LIMIT = "step-limit"
RUNTIME_ERROR = "runtime-error"

DIV_BY_ZERO = "div-by-zero"
MOD_BY_ZERO = "mod-by-zero"
MISSING_RETURN = "missing-return"

Valuation = tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class ExecOutcome:
    status: str                      # RETURNED | STEP_LIMIT | RUNTIME_ERROR
    value: Optional[int]             # set iff status == RETURNED
    error: Optional[str]             # set iff status == RUNTIME_ERROR
    coverage: frozenset[int]
    cond_log: tuple[tuple[int, bool], ...]
    cond_values: tuple[tuple[int, Valuation, bool], ...]

    def key(self) -> tuple:
        """Observable behavior, the unit of comparison for the domain oracle."""
        if self.status == RETURNED:
            return (RETURNED, self.value)
        if self.status == RUNTIME_ERROR:
            return (RUNTIME_ERROR, self.error)
        return (STEP_LIMIT,)

    def __str__(self) -> str:
        if self.status == RETURNED:
            return f"Returned({self.value})"
        if self.status == RUNTIME_ERROR:
            return f"RuntimeError({self.error})"
        return "StepLimitExceeded"


class _Halt(Exception):
    def __init__(self, status: str, error: Optional[str] = None):
        self.status = status
        self.error = error


class _ReturnSignal(Exception):
    def __init__(self, value: int):
        self.value = value


class _Run:
    def __init__(self, limit: int, forced: Mapping[int, Sequence[bool]]):
        self.limit = limit
        self.steps = 0
        self.coverage: set[int] = set()
        self.cond_log: list[tuple[int, bool]] = []
        self.cond_values: list[tuple[int, Valuation, bool]] = []
        self.forced = {nid: deque(seq) for nid, seq in forced.items()}

    def charge(self) -> None:
        self.steps += 1
        if self.steps > self.limit:
            raise _Halt(STEP_LIMIT)

    def check_cond(self, cond: Expr, env: dict[str, int]) -> bool:
        self.charge()
        actual = self.eval(cond, env)
        queue = self.forced.get(cond.id)
        if queue:
            effective = queue.popleft()
        else:
            effective = bool(actual)
        self.cond_log.append((cond.id, effective))
        self.cond_values.append((cond.id, tuple(sorted(env.items())), effective))
        return effective

    def exec_block(self, block: Block, env: dict[str, int]) -> None:
        self.coverage.add(block.id)
        for stmt in block.stmts:
            self.exec_stmt(stmt, env)

    def exec_stmt(self, stmt, env: dict[str, int]) -> None:
        self.coverage.add(stmt.id)
        if isinstance(stmt, Assign):
            self.charge()
            env[stmt.name] = self.eval(stmt.value, env)
        elif isinstance(stmt, Return):
            self.charge()
            raise _ReturnSignal(self.eval(stmt.value, env))
        elif isinstance(stmt, If):
            if self.check_cond(stmt.cond, env):
                self.exec_block(stmt.then, env)
            elif stmt.orelse is not None:
                self.exec_block(stmt.orelse, env)
        elif isinstance(stmt, While):
            while self.check_cond(stmt.cond, env):
                self.exec_block(stmt.body, env)
        elif isinstance(stmt, Block):
            self.exec_block(stmt, env)
        else:
            raise TypeError(f"bad statement: {stmt!r}")

    def eval(self, expr: Expr, env: dict[str, int]):
        self.coverage.add(expr.id)
        if isinstance(expr, IntLiteral):
            return expr.value
        if isinstance(expr, BoolLiteral):
            return expr.value
        if isinstance(expr, VarRef):
            return env[expr.name]
        if isinstance(expr, UnaryOp):
            v = self.eval(expr.operand, env)
            return -v if expr.op == "-" else (not v)
        if isinstance(expr, BinaryOp):
            op = expr.op
            if op == "&&":
                return bool(self.eval(expr.left, env)) and bool(self.eval(expr.right, env))
            if op == "||":
                return bool(self.eval(expr.left, env)) or bool(self.eval(expr.right, env))
            lv = self.eval(expr.left, env)
            rv = self.eval(expr.right, env)
            if op == "+":
                return lv + rv
            if op == "-":
                return lv - rv
            if op == "*":
                return lv * rv
            if op == "/":
                if rv == 0:
                    raise _Halt(RUNTIME_ERROR, DIV_BY_ZERO)
                return lv // rv
            if op == "%":
                if rv == 0:
                    raise _Halt(RUNTIME_ERROR, MOD_BY_ZERO)
                return lv % rv
            if op == "<":
                return lv < rv
            if op == "<=":
                return lv <= rv
            if op == ">":
                return lv > rv
            if op == ">=":
                return lv >= rv
            if op == "==":
                return lv == rv
            if op == "!=":
                return lv != rv
        raise TypeError(f"bad expression: {expr!r}")


def execute_angelic(
    program: Program,
    fn: str,
    args: Sequence[int],
    forced: Mapping[int, Sequence[bool]],
    step_limit: int = DEFAULT_STEP_LIMIT,
) -> ExecOutcome:
    """Run `fn` with condition checks overridden by `forced` sequences."""
    target = program.function(fn)
    if target is None:
        raise UnknownFunctionError(fn)
    if len(args) != len(target.params):
        raise ArityMismatchError(fn, len(target.params), len(args))
    run = _Run(step_limit, forced)
    env = {p.name: int(a) for p, a in zip(target.params, args)}
    status, value, error = RUNTIME_ERROR, None, MISSING_RETURN
    try:
        run.exec_block(target.body, env)
    except _ReturnSignal as ret:
        status, value, error = RETURNED, ret.value, None
    except _Halt as halt:
        status, value, error = halt.status, None, halt.error
    return ExecOutcome(
        status=status,
        value=value,
        error=error,
        coverage=frozenset(run.coverage),
        cond_log=tuple(run.cond_log),
        cond_values=tuple(run.cond_values),
    )


def execute(
    program: Program,
    fn: str,
    args: Sequence[int],
    step_limit: int = DEFAULT_STEP_LIMIT,
) -> ExecOutcome:
    """Deterministically run `fn` on `args`. Args may lie outside domains."""
    return execute_angelic(program, fn, args, {}, step_limit)
