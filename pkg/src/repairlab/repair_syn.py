"""Synthesis-based repair of conditions and missing preconditions.

The engine mirrors the classic instrumented-execution recipe:

1. *Angelic mining.* For every repair site covered by a failing test
   (an existing If/While condition, or a statement that could be wrapped
   in a guard), search for forced boolean sequences that make each
   failing test pass. Forced sequences are bounded: at most 16 values,
   at most one alternation (a^i b^j). For passing tests, each condition
   check is probed with a single flip; checks whose flip breaks the test
   become hard constraints, the rest stay unconstrained.

2. *Constraint collection.* Every constrained check contributes a sample
   (variable valuation at the check) -> (required boolean). A valuation
   demanded both true and false is a contradiction: the UNSAT signal.

3. *Enumerative synthesis.* Candidate predicates are drawn smallest-first
   from a finite grammar: `true`/`false`; comparisons between vocabulary
   terms (in-scope variables, integer constants from the program plus
   {-1,0,1}, pairwise products and differences of variables); negations
   of comparisons; and conjunctions/disjunctions of two comparisons.
   Candidates of equal size are ordered by their printed form; when one
   side of a comparison is constant, it goes right, which keeps printed
   patches in the familiar `x != 0` shape. Each candidate drawn costs one
   budget unit. The first sample-consistent candidate whose patch passes
   the whole suite wins.

`synthesize_condition` exposes step 3 alone: first sample-consistent
candidate, Unsat when samples contradict or the grammar is exhausted,
Timeout when the budget runs out first.

`repair_syn` returns a single-edit patch (ReplaceExpr on a condition or
WrapWithPrecondition on a statement) or a three-valued failure reason:
`unsat` when some site's samples were contradictory or admitted no
consistent predicate at all, `timeout` when the budget died first, and
`no-angelic-fix` when no site admits angelic values. Budget units spent
are reported; the meta layer uses them as the deterministic time unit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

from .errors import (
    IllegalEditError,
    NoAngelicFixError,
    NoFailingTestsError,
    TypeCheckError,
)
from .harness import TestCase, TestSuite, count_failing, verdict_of
from .interp import DEFAULT_STEP_LIMIT, RETURNED, ExecOutcome, Valuation, execute, execute_angelic
from .localize import localize
from .patches import Patch, ReplaceExpr, WrapWithPrecondition, apply_patch
from .syntax import (
    BinaryOp,
    BoolLiteral,
    Expr,
    If,
    IntLiteral,
    Program,
    STMT_KINDS,
    UnaryOp,
    VarRef,
    While,
    expr_to_source,
    int_constants,
    max_node_id,
    node_count,
    node_index,
    walk_program,
)
from .validate import program_info

PATCHED = "patched"
UNSAT = "unsat"
TIMEOUT = "timeout"
NO_ANGELIC_FIX = "no-angelic-fix"

MAX_FORCED_LEN = 16
_FLIP_PROBE_CAP = 16  # condition checks probed per passing test

CONDITION = "condition"
PRECONDITION = "precondition"


@dataclass(frozen=True)
class AngelicRecord:
    node_id: int  # condition node id, or the statement to wrap
    site: str     # CONDITION | PRECONDITION
    required: tuple[tuple[str, tuple[bool, ...]], ...]  # failing test -> forced seq
    observed: tuple[tuple[str, tuple[bool, ...]], ...]  # passing test -> seen seq
    samples: tuple[tuple[Valuation, bool], ...]


@dataclass(frozen=True)
class SynthesisSpec:
    variables: tuple[str, ...]
    constants: tuple[int, ...]
    samples: tuple[tuple[Valuation, bool], ...]


@dataclass(frozen=True)
class SynthesisResult:
    status: str  # 'expr' | UNSAT | TIMEOUT
    expr: Optional[Expr]
    used: int


@dataclass(frozen=True)
class SynRepairResult:
    patch: Optional[Patch]
    reason: str  # PATCHED | UNSAT | TIMEOUT | NO_ANGELIC_FIX
    used: int


# ---------------------------------------------------------------------------
# Predicate grammar


def _terms(spec: SynthesisSpec) -> list[tuple[int, str, bool, Expr]]:
    """(size, source, has_var, expr) for every vocabulary term."""
    out: list[tuple[int, str, bool, Expr]] = []
    for v in spec.variables:
        out.append((1, v, True, VarRef(-1, v)))
    for c in spec.constants:
        out.append((1, str(c), False, IntLiteral(-1, c)))
    for i, a in enumerate(spec.variables):
        for b in spec.variables[i + 1:]:
            e = BinaryOp(-1, "*", VarRef(-1, a), VarRef(-1, b))
            out.append((3, expr_to_source(e), True, e))
    for a in spec.variables:
        for b in spec.variables:
            if a != b:
                e = BinaryOp(-1, "-", VarRef(-1, a), VarRef(-1, b))
                out.append((3, expr_to_source(e), True, e))
    return out

_CMP_OPS = ["==", "!=", "<", "<=", ">", ">="]


def _atoms(spec: SynthesisSpec) -> list[tuple[int, str, Expr]]:
    atoms: list[tuple[int, str, Expr]] = []
    terms = _terms(spec)
    for lsize, lsrc, lvar, lexpr in terms:
        for rsize, rsrc, rvar, rexpr in terms:
            if lsrc == rsrc:
                continue
            if not lvar and not rvar:
                continue  # constant-only comparisons are just true/false
            if not lvar and rvar:
                continue  # keep the variable side on the left
            for op in _CMP_OPS:
                e = BinaryOp(-1, op, lexpr, rexpr)
                atoms.append((lsize + rsize + 1, expr_to_source(e), e))
    atoms.sort(key=lambda item: (item[0], item[1]))
    return atoms


def enumerate_predicates(spec: SynthesisSpec) -> Iterator[Expr]:
    """All grammar predicates, ordered by (node count, printed form).

    `true` precedes `false`: the neutral guard is the smallest candidate.
    The grammar is finite, so exhaustion is a proof that no predicate in
    it satisfies the constraints.
    """
    yield BoolLiteral(-1, True)
    yield BoolLiteral(-1, False)
    atoms = _atoms(spec)
    by_size: dict[int, list[tuple[str, Expr]]] = {}
    for size, src, expr in atoms:
        by_size.setdefault(size, []).append((src, expr))
    max_atom = max(by_size) if by_size else 0
    max_size = 2 * max_atom + 1
    for size in range(3, max_size + 1):
        bucket: list[tuple[str, Expr]] = []
        bucket.extend(by_size.get(size, ()))
        for src, expr in by_size.get(size - 1, ()):
            neg = UnaryOp(-1, "!", expr)
            bucket.append((expr_to_source(neg), neg))
        for lsize in sorted(by_size):
            rsize = size - 1 - lsize
            if rsize < lsize or rsize not in by_size:
                continue
            for lsrc, lexpr in by_size[lsize]:
                for rsrc, rexpr in by_size[rsize]:
                    if lsize == rsize and rsrc <= lsrc:
                        continue
                    for op in ("&&", "||"):
                        e = BinaryOp(-1, op, lexpr, rexpr)
                        bucket.append((expr_to_source(e), e))
        bucket.sort(key=lambda item: item[0])
        for _src, expr in bucket:
            yield expr


def _eval_pred(expr: Expr, env: dict[str, int]):
    if isinstance(expr, IntLiteral):
        return expr.value
    if isinstance(expr, BoolLiteral):
        return expr.value
    if isinstance(expr, VarRef):
        return env[expr.name]
    if isinstance(expr, UnaryOp):
        v = _eval_pred(expr.operand, env)
        return -v if expr.op == "-" else (not v)
    op = expr.op
    if op == "&&":
        return bool(_eval_pred(expr.left, env)) and bool(_eval_pred(expr.right, env))
    if op == "||":
        return bool(_eval_pred(expr.left, env)) or bool(_eval_pred(expr.right, env))
    lv = _eval_pred(expr.left, env)
    rv = _eval_pred(expr.right, env)
    if op == "+":
        return lv + rv
    if op == "-":
        return lv - rv
    if op == "*":
        return lv * rv
    if op == "==":
        return lv == rv
    if op == "!=":
        return lv != rv
    if op == "<":
        return lv < rv
    if op == "<=":
        return lv <= rv
    if op == ">":
        return lv > rv
    if op == ">=":
        return lv >= rv
    raise TypeError(f"bad predicate node: {expr!r}")


def _consistent(expr: Expr, samples) -> bool:
    for valuation, want in samples:
        if bool(_eval_pred(expr, dict(valuation))) != want:
            return False
    return True


def samples_contradictory(samples) -> bool:
    seen: dict[Valuation, bool] = {}
    for valuation, want in samples:
        if seen.setdefault(valuation, want) != want:
            return True
    return False


def synthesize_condition(spec: SynthesisSpec, budget: int) -> SynthesisResult:
    """Smallest sample-consistent predicate, or Unsat/Timeout.

    Contradictory samples are detected up front at zero cost; otherwise
    each candidate drawn from the grammar costs one unit.
    """
    if samples_contradictory(spec.samples):
        return SynthesisResult(UNSAT, None, 0)
    used = 0
    for candidate in enumerate_predicates(spec):
        if used >= budget:
            return SynthesisResult(TIMEOUT, None, used)
        used += 1
        if _consistent(candidate, spec.samples):
            return SynthesisResult("expr", candidate, used)
    return SynthesisResult(UNSAT, None, used)


# ---------------------------------------------------------------------------
# Angelic mining


def _forced_patterns(max_len: int = MAX_FORCED_LEN) -> Iterator[tuple[bool, ...]]:
    for length in range(1, max_len + 1):
        seen: set[tuple[bool, ...]] = set()
        for a in (True, False):
            for b in (True, False):
                for i in range(1, length + 1):
                    seq = (a,) * i + (b,) * (length - i)
                    if seq not in seen:
                        seen.add(seq)
                        yield seq


def _site_sequence(outcome: ExecOutcome, node_id: int) -> list[tuple[Valuation, bool]]:
    return [(valuation, value) for nid, valuation, value in outcome.cond_values
            if nid == node_id]


def _passes(outcome: ExecOutcome, test: TestCase) -> bool:
    return not verdict_of(outcome, test.expected).failing


def _mine_condition_site(program: Program, cond_id: int,
                         failing: list[TestCase], passing: list[TestCase],
                         plain: dict[str, ExecOutcome],
                         step_limit: int) -> Optional[AngelicRecord]:
    required: list[tuple[str, tuple[bool, ...]]] = []
    samples: list[tuple[Valuation, bool]] = []
    for test in failing:
        if cond_id not in plain[test.name].coverage:
            return None  # the failing run never reaches this site
        hit = None
        for seq in _forced_patterns():
            outcome = execute_angelic(program, test.fn, test.args,
                                      {cond_id: seq}, step_limit)
            if _passes(outcome, test):
                hit = (seq, outcome)
                break
        if hit is None:
            return None
        seq, outcome = hit
        required.append((test.name, seq))
        samples.extend(_site_sequence(outcome, cond_id))
    observed: list[tuple[str, tuple[bool, ...]]] = []
    for test in passing:
        checks = _site_sequence(plain[test.name], cond_id)
        observed.append((test.name, tuple(v for _, v in checks)))
        for i, (valuation, value) in enumerate(checks):
            if i >= _FLIP_PROBE_CAP:
                samples.append((valuation, value))  # too deep to probe; pin it
                continue
            prefix = [v for _, v in checks[:i]] + [not value]
            probe = execute_angelic(program, test.fn, test.args,
                                    {cond_id: prefix}, step_limit)
            if not _passes(probe, test):
                samples.append((valuation, value))
    return AngelicRecord(cond_id, CONDITION, tuple(required), tuple(observed),
                         tuple(samples))


def _wrap_for_mining(program: Program, stmt_id: int) -> tuple[Program, int]:
    """Wrap `stmt_id` in `if (true) { ... }`; returns the guard node id."""
    wrapped = apply_patch(program, Patch(
        (WrapWithPrecondition(stmt_id, BoolLiteral(-1, True)),)))
    wrapper_id = max_node_id(program) + 1
    wrapper = node_index(wrapped)[wrapper_id]
    assert isinstance(wrapper, If)
    return wrapped, wrapper.cond.id


def _mine_precondition_site(program: Program, stmt_id: int,
                            failing: list[TestCase], passing: list[TestCase],
                            plain: dict[str, ExecOutcome],
                            step_limit: int) -> Optional[AngelicRecord]:
    for test in failing:
        if stmt_id not in plain[test.name].coverage:
            return None
    try:
        wrapped, guard_id = _wrap_for_mining(program, stmt_id)
    except (IllegalEditError, TypeCheckError):
        return None  # e.g. wrapping a declaration would break scoping
    wrapped_plain = {t.name: execute(wrapped, t.fn, t.args, step_limit)
                     for t in failing + passing}
    record = _mine_condition_site(wrapped, guard_id, failing, passing,
                                  wrapped_plain, step_limit)
    if record is None:
        return None
    return AngelicRecord(stmt_id, PRECONDITION, record.required,
                         record.observed, record.samples)


def _repair_sites(program: Program, suite: TestSuite,
                  step_limit: int) -> list[tuple[int, str]]:
    """(node id, site kind) pairs in descending suspiciousness order."""
    scores = dict(localize(program, suite, step_limit))
    sites: list[tuple[float, int, str]] = []
    for node in walk_program(program):
        if isinstance(node, (If, While)):
            score = scores.get(node.cond.id, 0.0)
            if score > 0:
                sites.append((score, node.cond.id, CONDITION))
        if isinstance(node, STMT_KINDS):
            score = scores.get(node.id, 0.0)
            if score > 0:
                sites.append((score, node.id, PRECONDITION))
    sites.sort(key=lambda s: (-s[0], s[1]))
    return [(nid, kind) for _score, nid, kind in sites]


def _split_suite(program: Program, suite: TestSuite, step_limit: int):
    failing: list[TestCase] = []
    passing: list[TestCase] = []
    plain: dict[str, ExecOutcome] = {}
    for test in suite:
        outcome = execute(program, test.fn, test.args, step_limit)
        plain[test.name] = outcome
        (failing if not _passes(outcome, test) else passing).append(test)
    return failing, passing, plain


def _mine_site(program: Program, nid: int, kind: str, failing, passing, plain,
               step_limit: int) -> Optional[AngelicRecord]:
    if kind == CONDITION:
        return _mine_condition_site(program, nid, failing, passing, plain,
                                    step_limit)
    return _mine_precondition_site(program, nid, failing, passing, plain,
                                   step_limit)


def mine_angelic_values(program: Program, suite: TestSuite,
                        step_limit: int = DEFAULT_STEP_LIMIT) -> list[AngelicRecord]:
    """Angelic records for every feasible repair site, most suspicious first.

    Raises NoFailingTestsError when nothing fails, NoAngelicFixError when
    no site admits a feasible forced assignment.
    """
    failing, passing, plain = _split_suite(program, suite, step_limit)
    if not failing:
        raise NoFailingTestsError("suite has no failing test")
    records = []
    for nid, kind in _repair_sites(program, suite, step_limit):
        record = _mine_site(program, nid, kind, failing, passing, plain, step_limit)
        if record is not None:
            records.append(record)
    if not records:
        raise NoAngelicFixError("no condition or precondition site admits a fix")
    return records


# ---------------------------------------------------------------------------
# Repair


def _spec_for(program: Program, record: AngelicRecord) -> SynthesisSpec:
    info = program_info(program)
    variables = info.scopes.get(record.node_id, ())
    constants = tuple(sorted(set(int_constants(program)) | {-1, 0, 1}))
    return SynthesisSpec(variables, constants, record.samples)


def _patch_for(record: AngelicRecord, expr: Expr) -> Patch:
    if record.site == CONDITION:
        edit = ReplaceExpr(record.node_id, expr)
    else:
        edit = WrapWithPrecondition(record.node_id, expr)
    return Patch((edit,), engine="syn", ordinal=0)


def repair_syn(program: Program, suite: TestSuite, budget: int,
               step_limit: int = DEFAULT_STEP_LIMIT) -> SynRepairResult:
    """Try repair sites in descending suspiciousness within one budget.

    Per site: mine angelic values, then walk the predicate grammar
    smallest-first, validating sample-consistent candidates against the
    full suite. The first adequate patch wins.
    """
    failing, passing, plain = _split_suite(program, suite, step_limit)
    if not failing:
        raise NoFailingTestsError("suite has no failing test")

    used = 0
    saw_unsat = False
    saw_timeout = False
    saw_feasible = False

    for nid, kind in _repair_sites(program, suite, step_limit):
        record = _mine_site(program, nid, kind, failing, passing, plain, step_limit)
        if record is None:
            continue
        saw_feasible = True
        spec = _spec_for(program, record)
        if samples_contradictory(spec.samples):
            saw_unsat = True
            continue
        any_consistent = False
        for candidate in enumerate_predicates(spec):
            if used >= budget:
                saw_timeout = True
                break
            used += 1
            if not _consistent(candidate, spec.samples):
                continue
            any_consistent = True
            patch = _patch_for(record, candidate)
            try:
                patched = apply_patch(program, patch)
            except (IllegalEditError, TypeCheckError):
                continue
            if count_failing(patched, suite, step_limit) == 0:
                return SynRepairResult(patch, PATCHED, used)
        else:
            if not any_consistent:
                saw_unsat = True  # grammar exhausted with nothing consistent
        if saw_timeout:
            break

    if saw_unsat:
        return SynRepairResult(None, UNSAT, used)
    if saw_timeout:
        return SynRepairResult(None, TIMEOUT, used)
    if saw_feasible:
        # Sites admitted angelic values and consistent predicates, but no
        # candidate validated: constraints were too weak to pin a repair.
        return SynRepairResult(None, TIMEOUT, used)
    return SynRepairResult(None, NO_ANGELIC_FIX, used)
