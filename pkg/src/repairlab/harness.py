"""Test cases, suites, verdicts, and the flaky-test stabilization protocol.

Suite file format (`.suite`, UTF-8, one test per line):

    test <name>: <fn>(<int>,<int>,...) == <int>  [manual|gen:<seed>:<ordinal>]

Lines starting with `#` are comments. `format_suite(parse_suite(text))`
reproduces `format_suite` output byte for byte.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterator, Optional

from .errors import ArityMismatchError, RepairLabError, UnknownFunctionError
from .interp import DEFAULT_STEP_LIMIT, RETURNED, ExecOutcome, execute
from .syntax import Program

MANUAL = "manual"


@dataclass(frozen=True)
class TestCase:
    name: str
    fn: str
    args: tuple[int, ...]
    expected: int
    provenance: str = MANUAL  # "manual" or "gen:<seed>:<ordinal>"

    @property
    def generated(self) -> bool:
        return self.provenance.startswith("gen:")


@dataclass(frozen=True)
class TestSuite:
    tests: tuple[TestCase, ...] = ()

    def __post_init__(self):
        names = [t.name for t in self.tests]
        if len(names) != len(set(names)):
            dupe = next(n for n in names if names.count(n) > 1)
            raise RepairLabError(f"duplicate test name: {dupe}")

    def __iter__(self) -> Iterator[TestCase]:
        return iter(self.tests)

    def __len__(self) -> int:
        return len(self.tests)

    def __add__(self, other: "TestSuite") -> "TestSuite":
        return TestSuite(self.tests + other.tests)

    def with_test(self, test: TestCase) -> "TestSuite":
        return TestSuite(self.tests + (test,))

    def without_test(self, name: str) -> "TestSuite":
        return TestSuite(tuple(t for t in self.tests if t.name != name))


PASS = "pass"
FAIL = "fail"
CRASH = "crash"


@dataclass(frozen=True)
class Verdict:
    status: str  # PASS | FAIL | CRASH
    actual: Optional[int] = None
    detail: Optional[str] = None

    @property
    def failing(self) -> bool:
        return self.status != PASS


def verdict_of(outcome: ExecOutcome, expected: int) -> Verdict:
    if outcome.status == RETURNED:
        if outcome.value == expected:
            return Verdict(PASS, actual=outcome.value)
        return Verdict(FAIL, actual=outcome.value)
    return Verdict(CRASH, detail=outcome.error or outcome.status)


def run_test(program: Program, test: TestCase,
             step_limit: int = DEFAULT_STEP_LIMIT) -> Verdict:
    try:
        outcome = execute(program, test.fn, test.args, step_limit)
    except (UnknownFunctionError, ArityMismatchError) as exc:
        return Verdict(CRASH, detail=str(exc))
    return verdict_of(outcome, test.expected)


def run_suite(program: Program, suite: TestSuite,
              step_limit: int = DEFAULT_STEP_LIMIT) -> list[tuple[TestCase, Verdict]]:
    """Run every test; the verdict list order matches the suite order.

    A test targeting a missing function or with the wrong arity crashes
    that test only, never the harness.
    """
    return [(t, run_test(program, t, step_limit)) for t in suite]


def count_failing(program: Program, suite: TestSuite,
                  step_limit: int = DEFAULT_STEP_LIMIT) -> int:
    """Number of non-passing verdicts; crashes count as failing."""
    return sum(1 for _, v in run_suite(program, suite, step_limit) if v.failing)


def _valid_for(program: Program, test: TestCase) -> bool:
    fn = program.function(test.fn)
    if fn is None or len(test.args) != len(fn.params):
        return False
    return all(p.lo <= a <= p.hi for p, a in zip(fn.params, test.args))


RunFn = Callable[[Program, TestSuite], list[tuple[TestCase, Verdict]]]


def stabilize(program: Program, suite: TestSuite, rounds: int = 5,
              step_limit: int = DEFAULT_STEP_LIMIT,
              run_fn: Optional[RunFn] = None) -> TestSuite:
    """Drop invalid tests, then keep only tests with `rounds` identical
    consecutive verdicts, repeating until a full pass shows no instability.

    The interpreter is deterministic, so on real programs this is the
    identity on valid tests. `run_fn` is a seam for injecting an unstable
    verdict provider so the protocol itself stays testable.
    """
    if rounds < 1:
        raise RepairLabError("stabilize needs rounds >= 1")
    runner: RunFn = run_fn or (lambda p, s: run_suite(p, s, step_limit))
    kept = TestSuite(tuple(t for t in suite if _valid_for(program, t)))
    while len(kept) > 0:
        first = {t.name: v for t, v in runner(program, kept)}
        stable = set(first)
        for _ in range(rounds - 1):
            for t, v in runner(program, kept):
                if t.name in stable and v != first[t.name]:
                    stable.discard(t.name)
        if len(stable) == len(kept):
            break
        kept = TestSuite(tuple(t for t in kept if t.name in stable))
    return kept


# ---------------------------------------------------------------------------
# Suite files

_TEST_RE = re.compile(
    r"test\s+(?P<name>[A-Za-z_]\w*)\s*:\s*(?P<fn>[A-Za-z_]\w*)\s*"
    r"\(\s*(?P<args>[^)]*)\)\s*==\s*(?P<expected>-?\d+)\s*"
    r"\[(?P<prov>manual|gen:-?\d+:\d+)\]\s*$"
)


def parse_suite(text: str) -> TestSuite:
    tests = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _TEST_RE.match(line)
        if m is None:
            raise RepairLabError(f"suite line {lineno}: cannot parse {line!r}")
        args_text = m.group("args").strip()
        args = tuple(int(a) for a in args_text.split(",")) if args_text else ()
        tests.append(TestCase(
            name=m.group("name"),
            fn=m.group("fn"),
            args=args,
            expected=int(m.group("expected")),
            provenance=m.group("prov"),
        ))
    return TestSuite(tuple(tests))


def format_suite(suite: TestSuite) -> str:
    lines = []
    for t in suite:
        args = ",".join(str(a) for a in t.args)
        lines.append(f"test {t.name}: {t.fn}({args}) == {t.expected}  [{t.provenance}]")
    return "\n".join(lines) + ("\n" if lines else "")


def read_suite(path) -> TestSuite:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_suite(fh.read())


def write_suite(suite: TestSuite, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_suite(suite))
