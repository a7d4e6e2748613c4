"""Regression test generation with the current program as oracle.

Inputs are drawn from the declared parameter domains; the expected value
of each generated test is whatever the (possibly buggy) program returns
today, so generated tests always pass on the program they were generated
from. Inputs that crash or exhaust the step budget yield no assertion and
are discarded. Generation is reproducible: the stream for a target is
seeded from (seed, function name) via SplitMix64 (see `rng`).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import UnknownFunctionError
from .interp import DEFAULT_STEP_LIMIT, RETURNED, execute
from .harness import TestCase, TestSuite
from .rng import SplitMix64, derive_seed
from .syntax import Program, function_size

UNIFORM = "uniform"
BOUNDARY = "boundary"

# Give up after this many draws per requested test; guards against tiny or
# crash-heavy domains without looping forever.
_ATTEMPT_FACTOR = 20
_ATTEMPT_FLOOR = 100


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int
    count: int = 40
    step_limit: int = DEFAULT_STEP_LIMIT
    strategy: str = UNIFORM  # UNIFORM | BOUNDARY


def _draw_arg(rng: SplitMix64, lo: int, hi: int, strategy: str) -> int:
    if strategy == BOUNDARY and rng.below(4) == 0:
        # Anchor on a domain endpoint or zero to poke condition boundaries.
        anchors = [lo, hi]
        if lo < 0 < hi:
            anchors.append(0)
        return rng.choice(anchors)
    return rng.int_in(lo, hi)


def generate_for_target(program: Program, fn: str, cfg: GeneratorConfig) -> TestSuite:
    target = program.function(fn)
    if target is None:
        raise UnknownFunctionError(fn)
    rng = SplitMix64(derive_seed(cfg.seed, fn))
    tests: list[TestCase] = []
    seen: set[tuple[int, ...]] = set()
    attempts = 0
    budget = cfg.count * _ATTEMPT_FACTOR + _ATTEMPT_FLOOR
    while len(tests) < cfg.count and attempts < budget:
        attempts += 1
        args = tuple(_draw_arg(rng, p.lo, p.hi, cfg.strategy) for p in target.params)
        if args in seen:
            continue
        seen.add(args)
        outcome = execute(program, fn, args, cfg.step_limit)
        if outcome.status != RETURNED:
            continue  # no observable value, no assertion to synthesize
        ordinal = len(tests)
        tests.append(TestCase(
            name=f"gen_{fn}_{ordinal}",
            fn=fn,
            args=args,
            expected=outcome.value,
            provenance=f"gen:{cfg.seed}:{ordinal}",
        ))
    return TestSuite(tuple(tests))


def generate_for_targets(program: Program, fns, cfg: GeneratorConfig) -> TestSuite:
    """Concatenate per-target suites, smallest function body first.

    Ties are broken by source order; repeated names are generated once.
    """
    unique: list[str] = []
    for fn in fns:
        if fn not in unique:
            unique.append(fn)
    for fn in unique:
        if program.function(fn) is None:
            raise UnknownFunctionError(fn)
    source_order = {f.name: i for i, f in enumerate(program.functions)}
    ordered = sorted(unique, key=lambda f: (function_size(program.function(f)),
                                            source_order[f]))
    suite = TestSuite()
    for fn in ordered:
        suite = suite + generate_for_target(program, fn, cfg)
    return suite
