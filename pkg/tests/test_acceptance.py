"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s`.  Everything here is exact
arithmetic; the stated runtime budgets are asserted as part of the criteria.
"""
import time
from fractions import Fraction as F

import numpy as np
import pytest

from outlierfl._batch import SCALE, sorted_batch
from outlierfl.cli import main
from outlierfl.core import Instance, ObjectiveKind
from outlierfl.generators import (
    fig3_sequence,
    fig4_sequence,
    fig7_sequence,
    fig8_sequence,
    fig9_sequence,
    gen_family,
    gen_random,
)
from outlierfl.mechanisms import MechanismSpec
from outlierfl.objectives import (
    brute_force_opt,
    eval_cost,
    eval_oracle,
    opt_egalitarian,
    opt_utilitarian,
)
from outlierfl.predictions import f_rand, f_robust, f_util, gamma_max
from outlierfl.verification import (
    check_sp_deterministic,
    measure_ratio,
    sequence_is_constant,
    sp_scan,
    sweep,
)

UTIL = ObjectiveKind.UTILITARIAN
EGAL = ObjectiveKind.EGALITARIAN


def _report(criterion: str, failures: list, elapsed: float, budget: float):
    ok = not failures and elapsed < budget
    status = "PASS" if ok else "FAIL"
    print(f"\nACCEPTANCE {criterion}: {status} ({elapsed:.1f}s / budget {budget:.0f}s)")
    assert not failures, f"{criterion}: {failures[:5]}"
    assert elapsed < budget, f"{criterion}: runtime {elapsed:.1f}s over budget {budget}s"


def test_criterion_1_figure1_frontier():
    t0 = time.perf_counter()
    failures = []
    spec = MechanismSpec("left_median")
    for n in (8, 12, 16, 20):
        for z in range(1, (n - 1) // 2 + 1):
            frontier = F(n, n - 2 * z)
            if f_util(n, z) != frontier:
                failures.append(f"f_util({n},{z}) != n/(n-2z)")
            tight = measure_ratio(spec, gen_family("fig6_x2", n=n, z=z, d=1), UTIL)
            if tight.ratio != frontier:
                failures.append(f"fig6_x2({n},{z}) ratio {tight.ratio} != {frontier}")
            result = sweep(spec, UTIL, n, z, 10_000, base_seed=1000 * n + z)
            if not result.all_within or not result.max_ratio <= frontier:
                failures.append(f"sweep({n},{z}) max {result.max_ratio} > {frontier}")
    _report("criterion-1 figure1-frontier", failures, time.perf_counter() - t0, 30)


def test_criterion_2_egalitarian_tightness():
    t0 = time.perf_counter()
    failures = []
    spec = MechanismSpec("left_z")
    for n, z, count in ((5, 2, 34_000), (7, 3, 33_000), (9, 4, 33_000)):
        result = sweep(spec, EGAL, n, z, count, base_seed=n)
        if not result.max_ratio <= 2 or not result.all_within:
            failures.append(f"left_z egal ({n},{z}) max {result.max_ratio} > 2")
    attained = measure_ratio(spec, gen_family("fig4", n=5, z=2), EGAL)
    if attained.ratio != 2:
        failures.append(f"fig4(5,2) ratio {attained.ratio} != 2")
    _report("criterion-2 egalitarian-tightness", failures, time.perf_counter() - t0, 60)


def test_criterion_3_oracle_equivalence():
    t0 = time.perf_counter()
    failures = []
    for seed in range(2000):
        n = 3 + seed % 8
        instance = gen_random(n, 1, "uniform", 50_000 + seed)
        values = instance.profile.sorted_values
        lo, hi = values[0], values[-1]
        probes = list(dict.fromkeys(values))[:6] + [lo - 1, hi + 1, (lo + hi) / 2]
        j = 0
        while len(probes) < 25:
            probes.append(lo + (hi - lo + 1) * F(7 * j % 29, 29))
            j += 1
        for z in range(n):
            trial = instance.with_z(z)
            for objective, solver in ((UTIL, opt_utilitarian), (EGAL, opt_egalitarian)):
                fast = solver(trial)
                brute = brute_force_opt(trial, objective)
                if fast.cost != brute.cost or fast.location != brute.location:
                    failures.append(f"seed {seed} z={z} {objective.value}: solver != oracle")
                if not brute.contiguous:
                    failures.append(f"seed {seed} z={z}: non-contiguous winner")
            for y in probes[:25]:
                for objective in (UTIL, EGAL):
                    if eval_cost(trial, y, objective).cost != eval_oracle(trial, y, objective):
                        failures.append(f"seed {seed} z={z} y={y}: eval mismatch")
        if failures:
            break
    _report("criterion-3 oracle-equivalence", failures, time.perf_counter() - t0, 120)


def _random_phantom_vectors(n: int, how_many: int, seed: int):
    rng = np.random.default_rng([seed, 777])
    vectors = []
    for _ in range(how_many):
        alphas = []
        for _ in range(n + 1):
            kind = rng.integers(0, 5)
            if kind == 0:
                alphas.append(float("-inf"))
            elif kind == 1:
                alphas.append(float("inf"))
            else:
                alphas.append(F(int(rng.integers(0, SCALE + 1)), SCALE))
        vectors.append(tuple(alphas))
    return vectors


def test_criterion_4_strategyproofness_suite():
    t0 = time.perf_counter()
    failures = []
    n, z, count = 7, 2, 10_000
    X = sorted_batch(n, "uniform", [300_000 + i for i in range(count)])

    def scan(spec, slots=0):
        checked, certs = sp_scan(spec, n, z, count, prediction_slots=slots, prebuilt=X)
        if certs:
            failures.append(f"{spec.label()}: {len(certs)} violations")
        return checked

    total = scan(MechanismSpec("left_z"))
    total += scan(MechanismSpec("left_median"))
    for k in range(1, n + 1):
        total += scan(MechanismSpec("kth", k=k))
    for alphas in _random_phantom_vectors(n, 20, seed=4):
        total += scan(MechanismSpec("phantom", alphas=alphas))
    for gamma in range(gamma_max(n, z) + 1):
        total += scan(MechanismSpec("in_range", gamma=gamma), slots=20)

    oracle = MechanismSpec("oracle", objective=EGAL)
    found = [check_sp_deterministic(oracle, step) for step in fig4_sequence(5, 2)]
    if not any(found):
        failures.append("no oracle violation certificate on the fig4 family")

    print(f"\n  [criterion-4] {total:,} deviation scenarios scanned")
    _report("criterion-4 strategyproofness-suite", failures, time.perf_counter() - t0, 300)


def test_criterion_5_randomized_bound():
    t0 = time.perf_counter()
    failures = []
    spec = MechanismSpec("rand_median")
    for n, z in ((4, 1), (6, 2), (8, 3)):
        result = sweep(spec, UTIL, n, z, 10_000, base_seed=7 * n)
        if not result.max_ratio <= f_rand(n, z) or not result.all_within:
            failures.append(f"rand_median ({n},{z}) max {result.max_ratio} > {f_rand(n, z)}")
    calibration = measure_ratio(spec, gen_family("fig6_x2", n=4, z=1, d=1), UTIL)
    if calibration.ratio != F(3, 2) or f_rand(4, 1) != F(3, 2):
        failures.append(f"(4,1) calibration ratio {calibration.ratio} != 3/2")
    _report("criterion-5 randomized-bound", failures, time.perf_counter() - t0, 120)


def test_criterion_6_predictions():
    t0 = time.perf_counter()
    failures = []
    spec = MechanismSpec("in_range")
    for n, z in ((9, 3), (10, 3), (12, 4)):
        perfect = sweep(spec, UTIL, n, z, 10_000, base_seed=11 * n, prediction_mode="perfect")
        if perfect.max_ratio != 1:
            failures.append(f"perfect prediction ({n},{z}) max ratio {perfect.max_ratio} != 1")
        for mode in ("adversarial", "random"):
            hostile = sweep(spec, UTIL, n, z, 10_000, base_seed=13 * n, prediction_mode=mode)
            if not hostile.max_ratio <= f_robust(n, z):
                failures.append(
                    f"{mode} prediction ({n},{z}) max {hostile.max_ratio} > {f_robust(n, z)}"
                )
    for n, z in ((9, 3), (10, 3)):
        worst = fig9_sequence(n, z, 10, 1, 2)[-1]
        report = measure_ratio(spec, worst, UTIL)
        if report.ratio != f_robust(n, z):
            failures.append(f"fig9 ({n},{z}) ratio {report.ratio} != {f_robust(n, z)}")
    _report("criterion-6 predictions", failures, time.perf_counter() - t0, 300)


def test_criterion_7_worked_example_triple(capsys):
    t0 = time.perf_counter()
    failures = []
    code = main(["reproduce", "example-5-2-2"])
    out = capsys.readouterr().out.strip()
    if code != 0:
        failures.append(f"exit code {code}")
    if out != '["1", "14/5", "37/10"]':
        failures.append(f"unexpected output {out!r}")
    with capsys.disabled():
        _report("criterion-7 worked-example-triple", failures, time.perf_counter() - t0, 30)


def test_criterion_8_deviation_replays():
    t0 = time.perf_counter()
    failures = []

    def expect_constant(spec, seq, label, prediction=None):
        if not sequence_is_constant(spec, seq, prediction=prediction):
            failures.append(f"{label}: {spec.label()} output moved")

    for n, z in ((8, 5), (9, 5), (12, 7)):
        seq = fig3_sequence(n, z)
        expect_constant(MechanismSpec("left_median"), seq, f"fig3({n},{z})")
        far0 = sum(1 for v in seq[0].locations if v == 3)
        for k in range(1, n - far0 + 1):
            expect_constant(MechanismSpec("kth", k=k), seq, f"fig3({n},{z})")
        bounded = tuple(F(j, 2) for j in range(n + 1))  # finite phantoms <= 2
        expect_constant(MechanismSpec("phantom", alphas=bounded), seq, f"fig3({n},{z})")

    for n, z in ((7, 3), (9, 4)):
        seq = fig7_sequence(n, z)
        expect_constant(MechanismSpec("left_z"), seq, f"fig7({n},{z})")
        expect_constant(MechanismSpec("left_median"), seq, f"fig7({n},{z})")
        for k in range(1, n - z + 1):
            expect_constant(MechanismSpec("kth", k=k), seq, f"fig7({n},{z})")
        expect_constant(MechanismSpec("in_range"), seq, f"fig7({n},{z})", prediction=F(1, 4))
        low = tuple(F(1, 2) for _ in range(n + 1))
        expect_constant(MechanismSpec("phantom", alphas=low), seq, f"fig7({n},{z})")

    for n, z in ((7, 3), (8, 3)):
        seq = fig8_sequence(n, z)
        expect_constant(MechanismSpec("left_z"), seq, f"fig8({n},{z})")
        expect_constant(MechanismSpec("left_median"), seq, f"fig8({n},{z})")
        for k in range(z + 1, n + 1):
            expect_constant(MechanismSpec("kth", k=k), seq, f"fig8({n},{z})")
        expect_constant(MechanismSpec("in_range"), seq, f"fig8({n},{z})",
                        prediction=seq[0].prediction)
        high = tuple(F(z * (n + 2), 1) for _ in range(n + 1))  # phantoms >= z*d
        expect_constant(MechanismSpec("phantom", alphas=high), seq, f"fig8({n},{z})")

    _report("criterion-8 deviation-replays", failures, time.perf_counter() - t0, 60)
