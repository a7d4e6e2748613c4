"""The two meta-algorithms layered on top of the repair engines.

`min_impact` runs the generate-and-validate engine, asks the generator
for fresh tests targeting the functions each adequate patch touches, and
returns the patch failing the fewest generated tests (ties go to the
patch discovered earliest). With zero adequate patches it returns none;
with exactly one it returns it untouched, skipping generation.

`unsat_guided` runs the synthesis engine once to get an initial patch and
its cost `t_initial` (in deterministic budget units), generates tests for
the involved functions, then replays synthesis once per generated test
with the test added and an inner budget of 2*t_initial (floored at 100
units). A test whose inner run yields a patch is kept and the patch
updated; otherwise the test is removed, and the removal counts as a
contradiction precisely when the inner run reported unsat.

Wall-clock timings are recorded in the report for observability but are
never written to disk; on-disk artifacts carry only deterministic unit
counts.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .harness import TestCase, TestSuite, count_failing, stabilize
from .interp import DEFAULT_STEP_LIMIT
from .patches import Patch, apply_patch, involved_targets
from .repair_gv import enumerate_adequate_patches
from .repair_syn import PATCHED, UNSAT, SynRepairResult, repair_syn
from .syntax import Program
from .testgen import GeneratorConfig, generate_for_targets

INNER_BUDGET_FLOOR = 100


@dataclass
class MetaReport:
    returned_patch: Optional[Patch] = None
    engine_result: str = "none"
    adequate_patches: int = 0
    generated_tests: int = 0
    fail_counts: dict[int, int] = field(default_factory=dict)  # ordinal -> nbFT
    chosen_fail_count: Optional[int] = None
    removed_tests: list[TestCase] = field(default_factory=list)
    contradiction_tests: list[TestCase] = field(default_factory=list)
    kept_tests: list[TestCase] = field(default_factory=list)
    inner_budgets: list[int] = field(default_factory=list)
    t_initial: int = 0
    retained_suite: Optional[TestSuite] = None
    timings: dict[str, float] = field(default_factory=dict)


def select_min_impact(ordinals: Sequence[int], fail_counts: dict[int, int]) -> int:
    """Ordinal with the minimal failing count; ties go to the earliest.

    Pure selection rule, factored out so it can be property-tested against
    randomized configurations independently of the engines.
    """
    best = ordinals[0]
    best_count = fail_counts[best]
    for ordinal in ordinals[1:]:
        if fail_counts[ordinal] < best_count:
            best = ordinal
            best_count = fail_counts[ordinal]
    return best


def min_impact(
    program: Program,
    manual_suite: TestSuite,
    gv_budget: int,
    gen_cfg: GeneratorConfig,
    step_limit: int = DEFAULT_STEP_LIMIT,
) -> tuple[Optional[Patch], MetaReport]:
    report = MetaReport()
    t0 = time.perf_counter()
    patches = enumerate_adequate_patches(program, manual_suite, gv_budget,
                                         gen_cfg.seed, step_limit=step_limit)
    report.timings["engine"] = time.perf_counter() - t0
    report.adequate_patches = len(patches)
    if not patches:
        report.engine_result = "none"
        return None, report
    if len(patches) == 1:
        report.engine_result = PATCHED
        report.returned_patch = patches[0]
        return patches[0], report

    t1 = time.perf_counter()
    agts_cache: dict[tuple[str, ...], TestSuite] = {}
    for patch in patches:
        targets = tuple(involved_targets(patch, program))
        agts = agts_cache.get(targets)
        if agts is None:
            agts = stabilize(program,
                             generate_for_targets(program, targets, gen_cfg),
                             step_limit=step_limit)
            agts_cache[targets] = agts
        report.generated_tests += len(agts)
        patched = apply_patch(program, patch)
        report.fail_counts[patch.ordinal] = count_failing(patched, agts, step_limit)
    report.timings["generation"] = time.perf_counter() - t1

    chosen = select_min_impact([p.ordinal for p in patches], report.fail_counts)
    winner = next(p for p in patches if p.ordinal == chosen)
    report.engine_result = PATCHED
    report.returned_patch = winner
    report.chosen_fail_count = report.fail_counts[chosen]
    return winner, report


def unsat_guided(
    program: Program,
    manual_suite: TestSuite,
    syn_budget: int,
    gen_cfg: GeneratorConfig,
    step_limit: int = DEFAULT_STEP_LIMIT,
    inject_tests: Sequence[TestCase] = (),
) -> tuple[Optional[Patch], MetaReport]:
    """Incremental test-suite augmentation around `repair_syn`.

    `inject_tests` is a testing seam: the given cases are prepended to the
    generated suite and processed by the same keep-or-remove loop, letting
    callers study a handcrafted (e.g. bug-exposing) test deterministically.
    """
    report = MetaReport()
    t0 = time.perf_counter()
    initial = repair_syn(program, manual_suite, syn_budget, step_limit)
    report.timings["initial"] = time.perf_counter() - t0
    report.engine_result = initial.reason
    report.t_initial = initial.used
    if initial.patch is None:
        return None, report

    patch = initial.patch
    report.returned_patch = patch

    t1 = time.perf_counter()
    targets = involved_targets(patch, program)
    agts = stabilize(program, generate_for_targets(program, targets, gen_cfg),
                     step_limit=step_limit)
    if inject_tests:
        agts = TestSuite(tuple(inject_tests) + agts.tests)
    report.generated_tests = len(agts)
    report.timings["generation"] = time.perf_counter() - t1

    inner_budget = max(2 * report.t_initial, INNER_BUDGET_FLOOR)
    augmented = manual_suite
    t2 = time.perf_counter()
    for test in agts:
        augmented = augmented.with_test(test)
        report.inner_budgets.append(inner_budget)
        inner = repair_syn(program, augmented, inner_budget, step_limit)
        if inner.patch is not None:
            patch = inner.patch
            report.kept_tests.append(test)
        else:
            augmented = augmented.without_test(test.name)
            report.removed_tests.append(test)
            if inner.reason == UNSAT:
                report.contradiction_tests.append(test)
    report.timings["augmentation"] = time.perf_counter() - t2

    report.returned_patch = patch
    report.retained_suite = augmented
    return patch, report
