"""Spectrum-based fault localization (Ochiai).

For a node n covered by at least one test:

    score(n) = failed(n) / sqrt(total_failed * (failed(n) + passed(n)))

where failed(n)/passed(n) count failing/passing tests covering n. Crashes
(runtime errors, step-limit, invalid targets) count as failing. The
ranking contains every covered node, sorted by descending score with ties
broken by ascending pre-order node id.
"""

from __future__ import annotations

import math
from collections import defaultdict

from .errors import ArityMismatchError, NoFailingTestsError, UnknownFunctionError
from .harness import TestSuite, verdict_of
from .interp import DEFAULT_STEP_LIMIT, execute
from .syntax import Program

Ranking = list[tuple[int, float]]


def ochiai(failed: int, passed: int, total_failed: int) -> float:
    if failed == 0:
        return 0.0
    return failed / math.sqrt(total_failed * (failed + passed))


def localize(program: Program, suite: TestSuite,
             step_limit: int = DEFAULT_STEP_LIMIT) -> Ranking:
    failed_by_node: dict[int, int] = defaultdict(int)
    passed_by_node: dict[int, int] = defaultdict(int)
    total_failed = 0
    for test in suite:
        try:
            outcome = execute(program, test.fn, test.args, step_limit)
        except (UnknownFunctionError, ArityMismatchError):
            total_failed += 1  # crash with no coverage to attribute
            continue
        failing = verdict_of(outcome, test.expected).failing
        if failing:
            total_failed += 1
        for nid in outcome.coverage:
            if failing:
                failed_by_node[nid] += 1
            else:
                passed_by_node[nid] += 1
    if total_failed == 0:
        raise NoFailingTestsError("suite has no failing test")
    covered = set(failed_by_node) | set(passed_by_node)
    scored = [(nid, ochiai(failed_by_node[nid], passed_by_node[nid], total_failed))
              for nid in covered]
    scored.sort(key=lambda item: (-item[1], item[0]))
    return scored
