"""Generate-and-validate repair: deterministic seeded enumeration.

The engine walks program locations in descending Ochiai suspiciousness
(ties shuffled deterministically by the seed) and, at each location,
cycles through mutation operators:

  * replace an expression with a type- and scope-compatible snippet
    harvested from the same function first, then the rest of the program;
  * flip an operator (< to <=, == to !=, + to -, + to *, ...);
  * delete a statement;
  * insert a copied statement before an existing one;
  * wrap a statement in a mined atomic precondition.

Single edits are streamed first, then two-edit compositions of the
recorded single candidates. Every candidate costs one evaluation unit
whether or not it validates; the budget is a unit count so runs are
reproducible. A candidate is kept when the patched program passes the
whole validation suite; structural duplicates are dropped. Patches are
returned in discovery order, which downstream selection relies on.
"""

from __future__ import annotations

from typing import Iterator, Optional

from .errors import (
    IllegalEditError,
    NoFailingTestsError,
    RepairLabError,
    TypeCheckError,
    UnknownNodeError,
)
from .harness import TestSuite, count_failing
from .interp import DEFAULT_STEP_LIMIT
from .localize import localize
from .patches import (
    DeleteStmt,
    Edit,
    InsertStmtBefore,
    Patch,
    ReplaceExpr,
    WrapWithPrecondition,
    apply_patch,
    patch_signature,
)
from .rng import tiebreak_key
from .syntax import (
    Assign,
    BinaryOp,
    Expr,
    IntLiteral,
    Program,
    Return,
    STMT_KINDS,
    VarRef,
    expr_to_source,
    int_constants,
    node_index,
    stmt_to_source_inline,
    walk,
)
from .validate import program_info

# Alternatives tried by the operator-flip mutator, in order.
FLIP_ALTERNATIVES = {
    "+": ["-", "*"],
    "-": ["+"],
    "*": ["+"],
    "/": ["*"],
    "%": ["/"],
    "<": ["<="],
    "<=": ["<"],
    ">": [">="],
    ">=": [">"],
    "==": ["!="],
    "!=": ["=="],
    "&&": ["||"],
    "||": ["&&"],
}

_PRED_OPS = ["==", "!=", "<", "<=", ">", ">="]

# Single-edit candidates remembered for two-edit composition.
_PAIR_POOL_CAP = 400


def _free_vars(expr: Expr) -> set[str]:
    return {n.name for n in walk(expr) if isinstance(n, VarRef)}


def _snippet_pool(program: Program, info) -> dict[str, list[tuple[str, str, Expr]]]:
    """Per function: (source, type, expr) for every expression, in pre-order."""
    pool: dict[str, list[tuple[str, str, Expr]]] = {}
    for fn in program.functions:
        items = []
        for node in walk(fn.body):
            if node.id in info.types:
                items.append((expr_to_source(node), info.types[node.id], node))
        pool[fn.name] = items
    return pool


def _stmt_pool(program: Program) -> dict[str, list]:
    """Copyable simple statements (assignments and returns) per function."""
    pool: dict[str, list] = {}
    for fn in program.functions:
        items = []
        for node in walk(fn.body):
            if isinstance(node, Return) or (isinstance(node, Assign) and not node.declare):
                items.append(node)
        pool[fn.name] = items
    return pool


def _snippets_for(target_node, target_type: str, fn_name: str,
                  program: Program, info, pool) -> Iterator[Expr]:
    scope = set(info.scopes.get(target_node.id, ()))
    seen = {expr_to_source(target_node)}
    fn_names = [fn_name] + [f.name for f in program.functions if f.name != fn_name]
    for name in fn_names:
        for src, typ, expr in pool[name]:
            if typ != target_type or src in seen:
                continue
            if not _free_vars(expr) <= scope:
                continue
            seen.add(src)
            yield expr


def _mined_predicates(target_id: int, info, consts: list[int]) -> Iterator[Expr]:
    scope = list(info.scopes.get(target_id, ()))
    for var in scope:
        rhss: list[Expr] = [IntLiteral(-1, c) for c in consts]
        rhss += [VarRef(-1, w) for w in scope if w != var]
        for rhs in rhss:
            for op in _PRED_OPS:
                yield BinaryOp(-1, op, VarRef(-1, var), rhs)


def _single_edits(program: Program, suite_nodes: list[int]) -> Iterator[Edit]:
    info = program_info(program)
    index = node_index(program)
    snippets = _snippet_pool(program, info)
    stmts = _stmt_pool(program)
    consts = sorted(set(int_constants(program)) | {-1, 0, 1})

    for nid in suite_nodes:
        node = index.get(nid)
        if node is None:
            continue
        fn_name = info.fn_by_node[nid]
        if nid in info.types:  # expression location
            for snippet in _snippets_for(node, info.types[nid], fn_name,
                                         program, info, snippets):
                yield ReplaceExpr(nid, snippet)
            if isinstance(node, BinaryOp):
                for alt in FLIP_ALTERNATIVES.get(node.op, ()):
                    yield ReplaceExpr(nid, BinaryOp(-1, alt, node.left, node.right))
        elif isinstance(node, STMT_KINDS):
            yield DeleteStmt(nid)
            scope = set(info.scopes.get(nid, ()))
            seen_stmt: set[str] = {stmt_to_source_inline(node)}
            fn_names = [fn_name] + [f.name for f in program.functions
                                    if f.name != fn_name]
            for name in fn_names:
                for stmt in stmts[name]:
                    src = stmt_to_source_inline(stmt)
                    if src in seen_stmt:
                        continue
                    needed = _free_vars(stmt.value) if isinstance(stmt, (Assign, Return)) \
                        else set()
                    if isinstance(stmt, Assign):
                        needed = needed | {stmt.name}
                    if not needed <= scope:
                        continue
                    seen_stmt.add(src)
                    yield InsertStmtBefore(nid, stmt)
            for pred in _mined_predicates(nid, info, consts):
                yield WrapWithPrecondition(nid, pred)


def _ordered_locations(program: Program, suite: TestSuite, seed: int,
                       step_limit: int) -> list[int]:
    ranking = localize(program, suite, step_limit)
    return [nid for nid, _score in
            sorted(ranking, key=lambda item: (-item[1],
                                              tiebreak_key(seed, item[0])))]


def enumerate_adequate_patches(
    program: Program,
    suite: TestSuite,
    budget_evals: int,
    seed: int,
    max_patches: Optional[int] = None,
    step_limit: int = DEFAULT_STEP_LIMIT,
) -> list[Patch]:
    """Stream all test-suite-adequate patches found within the budget.

    Raises NoFailingTestsError when the suite does not fail on `program`.
    Returns [] (no error) when the search space yields nothing adequate.
    """
    if budget_evals < 0:
        raise RepairLabError("budget must be >= 0")
    locations = _ordered_locations(program, suite, seed, step_limit)

    found: list[Patch] = []
    signatures: set[str] = set()
    evals = 0
    pair_pool: list[Edit] = []

    def consider(edits: tuple[Edit, ...]) -> bool:
        """Returns False when the budget is gone."""
        nonlocal evals
        if evals >= budget_evals:
            return False
        evals += 1
        candidate = Patch(edits, engine="gv", ordinal=len(found),
                          discovered_at=evals)
        try:
            patched = apply_patch(program, candidate)
        except (IllegalEditError, TypeCheckError, UnknownNodeError):
            # Ill-typed result, broken structure, or (for two-edit
            # compositions) a target consumed by the first edit.
            return True
        if count_failing(patched, suite, step_limit) == 0:
            sig = patch_signature(candidate)
            if sig not in signatures:
                signatures.add(sig)
                found.append(candidate)
        return True

    def done() -> bool:
        return (max_patches is not None and len(found) >= max_patches) \
            or evals >= budget_evals

    for edit in _single_edits(program, locations):
        if len(pair_pool) < _PAIR_POOL_CAP:
            pair_pool.append(edit)
        if not consider((edit,)) or done():
            return found

    for i in range(len(pair_pool)):
        for j in range(i + 1, len(pair_pool)):
            first, second = pair_pool[i], pair_pool[j]
            if first.node_id == second.node_id:
                continue
            if not consider((first, second)) or done():
                return found
    return found
