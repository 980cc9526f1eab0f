"""Strategyproofness auditing, approximation measurement, and sweeps.

Two lanes again: per-instance checkers on exact rationals (certificates,
fixtures, small cases) and an integer-vectorized lane for the 10^4..10^5
instance sweeps.  Both are exact; the fast lane never touches floats.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from . import _batch
from ._batch import GRID_MULT, SCALE
from .core import POS_INF, Instance, ObjectiveKind
from .generators import gen_family, gen_random
from .mechanisms import MechanismSpec, RandomizedOutcome, in_range_thresholds
from .objectives import eval_cost, optimal_solution
from .predictions import f_delta, f_rand, f_robust, f_util

Bound = Union[Fraction, float]


@dataclass(frozen=True)
class ViolationCertificate:
    """A witnessed strategyproofness breach: a strict cost drop.

    Costs are |outcome - true_point| for deterministic rules and expected
    distances for randomized ones (the outcome fields then hold the
    expected location of the corresponding distribution).
    """

    agent_index: int
    true_point: Fraction
    deviation: Fraction
    outcome_truthful: Fraction
    outcome_deviated: Fraction
    cost_truthful: Fraction
    cost_deviated: Fraction


@dataclass(frozen=True)
class RatioReport:
    mechanism_cost: Bound
    opt_cost: Fraction
    ratio: Bound  # exact ratio; Fraction(1) for the 0/0 degenerate case
    bound: Bound
    within_bound: bool
    degenerate: bool = False


# ---------------------------------------------------------------------------
# deviation grids and exact checkers


def default_deviation_grid(instance: Instance, outcome: Fraction) -> Tuple[Fraction, ...]:
    """Sound deviation grid for piecewise-constant (order-statistic) rules.

    All reports, adjacent midpoints, the truthful outcome, outcome +/- the
    profile diameter, two points beyond each extreme, and 8 evenly spaced
    points per gap.  Outcomes of the implemented mechanisms only change at
    reports/phantoms, so scanning this grid is exhaustive for them;
    arbitrary user rules may need finer grids.
    """
    values = instance.profile.sorted_values
    lo, hi = values[0], values[-1]
    diameter = hi - lo
    spread = diameter if diameter > 0 else Fraction(1)
    points = set(values)
    for a, b in zip(values, values[1:]):
        if a == b:
            continue
        points.add((a + b) / 2)
        step = (b - a) / 9
        for j in range(1, 9):
            points.add(a + j * step)
    points.update({lo - 2 * spread, lo - spread, hi + spread, hi + 2 * spread})
    if isinstance(outcome, Fraction):
        points.update({outcome, outcome - diameter, outcome + diameter})
    return tuple(sorted(points))


def _true_cost(spec: MechanismSpec, outcome, point: Fraction):
    if isinstance(outcome, RandomizedOutcome):
        return outcome.expected_distance(point)
    if isinstance(outcome, float):
        return POS_INF
    return abs(outcome - point)


def _mean_location(outcome) -> Fraction:
    if isinstance(outcome, RandomizedOutcome):
        return sum(p * loc for loc, p in outcome.support)
    return outcome


def check_sp_deterministic(
    spec: MechanismSpec,
    true_profile: Instance,
    deviation_sets: Optional[Sequence[Sequence[Fraction]]] = None,
    prediction: Optional[Fraction] = None,
) -> Optional[ViolationCertificate]:
    """Scan agents in index order, deviations ascending; first violation wins.

    The prediction handed to In-Range is held fixed across deviations.
    """
    if prediction is None:
        prediction = true_profile.prediction
    outcome = spec.apply(true_profile, prediction)
    if deviation_sets is None:
        grid = default_deviation_grid(true_profile, _mean_location(outcome))
        deviation_sets = [grid] * true_profile.n
    for agent in range(true_profile.n):
        p = true_profile.locations[agent]
        truthful_cost = _true_cost(spec, outcome, p)
        for x_prime in sorted(deviation_sets[agent]):
            if x_prime == p:
                continue
            deviated = spec.apply(true_profile.replace_location(agent, x_prime), prediction)
            deviated_cost = _true_cost(spec, deviated, p)
            if deviated_cost < truthful_cost:
                return ViolationCertificate(
                    agent, p, x_prime,
                    _mean_location(outcome), _mean_location(deviated),
                    truthful_cost, deviated_cost,
                )
    return None


check_sp_in_expectation = check_sp_deterministic
"""For finite-support randomized rules the scan is identical, with costs
taken in exact expectation over the support (no sampling)."""


def check_corollary_path(
    spec: MechanismSpec,
    instance: Instance,
    agent_index: int,
    steps: int = 16,
    prediction: Optional[Fraction] = None,
) -> bool:
    """Moving one agent along the segment toward the truthful outcome must
    leave a strategyproof mechanism's output unchanged at every sample."""
    if prediction is None:
        prediction = instance.prediction
    outcome = spec.apply(instance, prediction)
    start = instance.locations[agent_index]
    target = _mean_location(outcome)
    if isinstance(target, float):
        return True
    for j in range(1, steps + 1):
        point = start + (target - start) * Fraction(j, steps)
        moved = spec.apply(instance.replace_location(agent_index, point), prediction)
        if moved != outcome:
            return False
    return True


# ---------------------------------------------------------------------------
# approximation ratios and bounds


def guarantee_bound(
    spec: MechanismSpec,
    instance: Instance,
    objective: ObjectiveKind,
    prediction: Optional[Fraction] = None,
) -> Bound:
    """The applicable closed-form guarantee, or +inf where none is proven."""
    n, z = instance.n, instance.z
    egal = objective is ObjectiveKind.EGALITARIAN
    if spec.kind == "oracle":
        return Fraction(1)
    if z == 0:
        # Classic problem: the median is optimal for both objectives is false
        # in general; only the utilitarian median is. Stay conservative.
        if not egal and spec.kind in ("left_median", "rand_median"):
            return Fraction(1)
        if egal and spec.kind in ("left_z", "left_median", "kth", "rand_median", "in_range"):
            return Fraction(2)
        return POS_INF
    if not instance.mechanism_feasible:
        return POS_INF
    if egal:
        # Any order statistic with z+1 <= k <= n-z is 2-approximate, and so
        # is any output confined to [x_(z+1), x_(n-z)] (In-Range, rand_median).
        if spec.kind == "left_z":
            return Fraction(2)
        if spec.kind == "left_median":
            return Fraction(2) if z + 1 <= (n + 1) // 2 <= n - z else POS_INF
        if spec.kind == "kth":
            return Fraction(2) if z + 1 <= spec.k <= n - z else POS_INF
        if spec.kind == "in_range":
            return Fraction(2)
        if spec.kind == "rand_median" and n % 2 == 0:
            return Fraction(2)
        return POS_INF
    if spec.kind == "left_median":
        return f_util(n, z)
    if spec.kind == "kth":
        return f_util(n, z) if spec.k == (n + 1) // 2 else POS_INF
    if spec.kind == "rand_median":
        return f_rand(n, z) if n % 2 == 0 else POS_INF
    if spec.kind == "in_range":
        if n >= 3 * z:
            return f_robust(n, z)
        lo_idx, hi_idx = in_range_thresholds(n, z, spec.gamma)
        delta_cap = hi_idx - (n - z + 2) // 2  # vs. the smallest optimal rank
        return f_delta(n, z, max(delta_cap, 0))
    return POS_INF


def measure_ratio(
    spec: MechanismSpec,
    instance: Instance,
    objective: ObjectiveKind,
    prediction: Optional[Fraction] = None,
) -> RatioReport:
    """Exact mechanism cost vs. exact optimum, compared to the formula bound.

    Randomized rules are costed in exact expectation over their support.
    ratio conventions at OPT = 0: 1 when the mechanism also pays 0 (flagged
    degenerate), +inf otherwise.
    """
    if prediction is None:
        prediction = instance.prediction
    outcome = spec.apply(instance, prediction)
    if isinstance(outcome, RandomizedOutcome):
        mech_cost = sum(p * eval_cost(instance, loc, objective).cost for loc, p in outcome.support)
    elif isinstance(outcome, float):
        mech_cost = POS_INF
    else:
        mech_cost = eval_cost(instance, outcome, objective).cost
    opt_cost = optimal_solution(instance, objective).cost
    degenerate = False
    if opt_cost == 0:
        if mech_cost == 0:
            ratio = Fraction(1)
            degenerate = True
        else:
            ratio = POS_INF
    else:
        ratio = mech_cost / opt_cost if not isinstance(mech_cost, float) else POS_INF
    bound = guarantee_bound(spec, instance, objective, prediction)
    within = _leq(ratio, bound)
    return RatioReport(mech_cost, opt_cost, ratio, bound, within, degenerate)


def _leq(a: Bound, b: Bound) -> bool:
    if isinstance(b, float):
        return True
    if isinstance(a, float):
        return False
    return a <= b


# ---------------------------------------------------------------------------
# deviation-sequence replays


def sequence_outcomes(
    spec: MechanismSpec,
    instances: Sequence[Instance],
    prediction: Optional[Fraction] = None,
) -> list:
    return [spec.apply(inst, prediction if prediction is not None else inst.prediction)
            for inst in instances]


def sequence_is_constant(
    spec: MechanismSpec,
    instances: Sequence[Instance],
    prediction: Optional[Fraction] = None,
) -> bool:
    """True iff the mechanism's output is bit-identical along the replay."""
    outcomes = sequence_outcomes(spec, instances, prediction)
    return all(o == outcomes[0] for o in outcomes[1:])


# ---------------------------------------------------------------------------
# sweeps


@dataclass(frozen=True)
class SweepRow:
    seed: int
    n: int
    z: int
    family: str
    mechanism: str
    objective: str
    mech_cost: Bound
    opt_cost: Fraction
    ratio: Bound
    bound: Bound
    within_bound: bool


@dataclass(frozen=True)
class SweepResult:
    rows: tuple
    max_ratio: Bound
    argmax_index: int
    all_within: bool

    @property
    def max_row(self) -> SweepRow:
        return self.rows[self.argmax_index]


def sweep(
    spec: MechanismSpec,
    objective: ObjectiveKind,
    n: int,
    z: int,
    count: int,
    model: str = "uniform",
    base_seed: int = 0,
    workers: int = 1,
    prediction_mode=None,
) -> SweepResult:
    """Measure the ratio on `count` seeded instances; aggregate the worst.

    Instance i uses seed base_seed + i, so the result is bit-identical for
    any worker count.  prediction_mode (In-Range only) is "perfect",
    "adversarial", "random", or a fixed Fraction.
    """
    chunks = _index_chunks(count, workers)
    args = [(spec, objective, n, z, model, base_seed, lo, hi, prediction_mode) for lo, hi in chunks]
    if workers > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_sweep_chunk, args))
    else:
        parts = [_sweep_chunk(a) for a in args]
    rows = tuple(row for part in parts for row in part)
    return _aggregate(rows)


def _aggregate(rows: tuple) -> SweepResult:
    best_index = 0
    best: Bound = rows[0].ratio if rows else Fraction(0)
    for i, row in enumerate(rows):
        if _ratio_greater(row.ratio, best):
            best, best_index = row.ratio, i
    return SweepResult(rows, best, best_index, all(r.within_bound for r in rows))


def _ratio_greater(a: Bound, b: Bound) -> bool:
    if isinstance(a, float):
        return not isinstance(b, float)
    if isinstance(b, float):
        return False
    return a > b


def _index_chunks(count: int, workers: int) -> List[Tuple[int, int]]:
    workers = max(1, workers)
    size = (count + workers - 1) // workers
    return [(lo, min(lo + size, count)) for lo in range(0, count, size)]


def _sweep_chunk(args) -> List[SweepRow]:
    spec, objective, n, z, model, base_seed, lo, hi, prediction_mode = args
    seeds = [base_seed + i for i in range(lo, hi)]
    if not seeds:
        return []
    if spec.kind in ("left_z", "left_median", "kth", "rand_median", "in_range"):
        return _sweep_chunk_batch(spec, objective, n, z, model, seeds, prediction_mode)
    rows = []
    for seed in seeds:
        inst = gen_random(n, z, model, seed)
        pred = _exact_prediction(prediction_mode, inst, seed)
        report = measure_ratio(spec, inst, objective, pred)
        rows.append(_row_from_report(seed, n, z, model, spec, objective, report))
    return rows


def _exact_prediction(prediction_mode, inst: Instance, seed: int):
    if prediction_mode is None:
        return inst.prediction
    if prediction_mode == "perfect":
        return optimal_solution(inst, ObjectiveKind.UTILITARIAN).location
    if prediction_mode == "adversarial":
        lo, hi = inst.profile.sorted_values[0], inst.profile.sorted_values[-1]
        return (lo - (hi - lo) - 1, hi + (hi - lo) + 1, lo, hi)[seed % 4]
    if prediction_mode == "random":
        rng = np.random.default_rng([seed & 0xFFFFFFFFFFFFFFFF, 3])
        return Fraction(int(rng.integers(-SCALE, 2 * SCALE + 1)), SCALE)
    return Fraction(prediction_mode)


def _row_from_report(seed, n, z, family, spec, objective, report: RatioReport) -> SweepRow:
    return SweepRow(
        seed, n, z, family, spec.label(), objective.value,
        report.mechanism_cost, report.opt_cost, report.ratio, report.bound,
        report.within_bound,
    )


def _sweep_chunk_batch(spec, objective, n, z, model, seeds, prediction_mode) -> List[SweepRow]:
    """Integer lane: whole chunk at once, exact at denominator SCALE."""
    X = _batch.sorted_batch(n, model, seeds)
    P = _batch.prefix_sums(X)
    B = X.shape[0]
    egal = objective is ObjectiveKind.EGALITARIAN

    yhat = None
    if spec.kind == "in_range":
        yhat = _batch_predictions(prediction_mode, X, P, z, seeds)
        lo_idx, hi_idx = in_range_thresholds(n, z, spec.gamma)
        Y = np.clip(yhat, X[:, lo_idx - 1], X[:, hi_idx - 1])
    elif spec.kind == "left_z":
        Y = X[:, z]
    elif spec.kind == "left_median":
        Y = X[:, (n + 1) // 2 - 1]
    elif spec.kind == "kth":
        Y = X[:, spec.k - 1]
    else:  # rand_median: cost both medians, average exactly at the end
        Y = X[:, n // 2 - 1]
        Y2 = X[:, n // 2]

    if egal:
        opt_num, _ = _batch.batch_opt_egal2(X, z)
        mech_num = _batch.batch_eval_egal2(X, z, Y)
        if spec.kind == "rand_median":
            mech_num = mech_num + _batch.batch_eval_egal2(X, z, Y2)
            opt_num = 2 * opt_num
        den = 2 * SCALE
    else:
        opt_num, _ = _batch.batch_opt_util(X, P, z)
        mech_num = _batch.batch_eval_util(X, P, z, Y)
        if spec.kind == "rand_median":
            mech_num = mech_num + _batch.batch_eval_util(X, P, z, Y2)
            opt_num = 2 * opt_num
        den = SCALE

    rows = []
    label = spec.label()
    for j, seed in enumerate(seeds):
        mech_cost = Fraction(int(mech_num[j]), den)
        opt_cost = Fraction(int(opt_num[j]), den)
        if opt_cost == 0:
            ratio = Fraction(1) if mech_cost == 0 else POS_INF
        else:
            ratio = mech_cost / opt_cost
        inst_stub = Instance(tuple(Fraction(int(v), SCALE) for v in X[j]), z)
        bound = guarantee_bound(spec, inst_stub, objective)
        rows.append(SweepRow(seed, n, z, model, label, objective.value,
                             mech_cost, opt_cost, ratio, bound, _leq(ratio, bound)))
    return rows


def _batch_predictions(prediction_mode, X, P, z, seeds) -> np.ndarray:
    B, n = X.shape
    if prediction_mode == "perfect":
        _, loc = _batch.batch_opt_util(X, P, z)
        return loc
    if prediction_mode == "adversarial":
        lo, hi = X[:, 0], X[:, -1]
        span = hi - lo
        options = np.stack([lo - span - SCALE, hi + span + SCALE, lo, hi], axis=1)
        picks = np.array([seed % 4 for seed in seeds])
        return options[np.arange(B), picks]
    if prediction_mode == "random":
        vals = np.empty(B, dtype=np.int64)
        for j, seed in enumerate(seeds):
            rng = np.random.default_rng([seed & 0xFFFFFFFFFFFFFFFF, 3])
            vals[j] = rng.integers(-SCALE, 2 * SCALE + 1)
        return vals
    value = Fraction(prediction_mode)
    scaled = value * SCALE
    if scaled.denominator != 1:
        raise ValueError(f"fixed prediction {value} is off the 1/{SCALE} lattice")
    return np.full(B, int(scaled), dtype=np.int64)


# ---------------------------------------------------------------------------
# vectorized strategyproofness scan


def sp_scan(
    spec: MechanismSpec,
    n: int,
    z: int,
    count: int,
    base_seed: int = 0,
    model: str = "uniform",
    prediction_slots: int = 0,
    prebuilt: Optional[np.ndarray] = None,
) -> Tuple[int, List[ViolationCertificate]]:
    """Grid-scan `count` seeded instances for profitable deviations.

    Returns (number of scenarios checked, certificates).  Every batch hit
    is re-verified on the exact path before being reported, so any
    certificate that comes back is real.  With prediction_slots > 0 the
    In-Range scan repeats per instance for that many seeded predictions,
    each held fixed while agents deviate.
    """
    if spec.kind == "oracle":
        raise ValueError("use check_sp_deterministic for the oracle baseline")
    X = prebuilt if prebuilt is not None else _batch.sorted_batch(
        n, model, [base_seed + i for i in range(count)]
    )
    X18 = X * GRID_MULT
    B = X.shape[0]
    static = _batch.deviation_grid(X18)
    checked = 0
    hits: List[Tuple[int, int, Optional[int]]] = []  # (row, agent, prediction slot)

    def positions(rest, grid):
        return (rest[:, None, :] <= grid[:, :, None]).sum(axis=2, dtype=np.int64)

    if spec.kind == "in_range":
        lo_idx, hi_idx = in_range_thresholds(n, z, spec.gamma)
        preds = _scan_predictions(B, prediction_slots or 1, base_seed)
        for i in range(n):
            rest = _batch.delete_column(X18, i)
            p = X18[:, i]
            pos_static = positions(rest, static)
            for slot in range(preds.shape[1]):
                yhat18 = preds[:, slot] * GRID_MULT
                truth = np.clip(yhat18, X18[:, lo_idx - 1], X18[:, hi_idx - 1])
                extra = _outcome_columns(X18, truth)
                truth_cost = np.abs(truth - p)
                for grid, pos in ((static, pos_static), (extra, positions(rest, extra))):
                    lo_d = _kth_from_pos(rest, grid, pos, lo_idx)
                    hi_d = _kth_from_pos(rest, grid, pos, hi_idx)
                    dev = np.clip(yhat18[:, None], lo_d, hi_d)
                    mask = np.abs(dev - p[:, None]) < truth_cost[:, None]
                    checked += mask.size
                    _collect(hits, mask, i, slot)
        return checked, _certify(spec, X, z, hits, preds)

    if spec.kind == "rand_median":
        y1t, y2t = X18[:, n // 2 - 1], X18[:, n // 2]
        grid = np.concatenate([static, _outcome_columns(X18, y1t, y2t)], axis=1)
        for i in range(n):
            rest = _batch.delete_column(X18, i)
            p = X18[:, i]
            pos = positions(rest, grid)
            t2 = np.abs(y1t - p) + np.abs(y2t - p)
            y1d = _kth_from_pos(rest, grid, pos, n // 2)
            y2d = _kth_from_pos(rest, grid, pos, n // 2 + 1)
            d2 = np.abs(y1d - p[:, None]) + np.abs(y2d - p[:, None])
            mask = d2 < t2[:, None]
            checked += mask.size
            _collect(hits, mask, i, None)
        return checked, _certify(spec, X, z, hits, None)

    if spec.kind == "phantom":
        phantoms18 = _phantom_ints(spec.alphas)
        pool = np.broadcast_to(phantoms18, (B, n + 1))
        full = np.sort(np.concatenate([X18, pool], axis=1), axis=1)
        truth = full[:, n]
        k = n + 1
    else:
        k = {"left_z": z + 1, "left_median": (n + 1) // 2, "kth": spec.k}[spec.kind]
        truth = X18[:, k - 1]
        phantoms18 = None

    grid = np.concatenate([static, _outcome_columns(X18, truth)], axis=1)
    for i in range(n):
        rest = _batch.delete_column(X18, i)
        if phantoms18 is not None:
            rest = np.sort(
                np.concatenate([rest, np.broadcast_to(phantoms18, (B, n + 1))], axis=1), axis=1
            )
        p = X18[:, i]
        pos = positions(rest, grid)
        dev = _kth_from_pos(rest, grid, pos, k)
        mask = np.abs(dev - p[:, None]) < np.abs(truth - p)[:, None]
        checked += mask.size
        _collect(hits, mask, i, None)
    return checked, _certify(spec, X, z, hits, None)


def _kth_from_pos(rest, grid, pos, k: int) -> np.ndarray:
    """k-th smallest of each row of rest joined with each grid value, given
    pos = per-value counts of rest entries <= value (reused across ks)."""
    r = rest.shape[1]
    hi = rest[:, min(k - 1, r - 1)][:, None]
    lo = rest[:, max(k - 2, 0)][:, None]
    return np.where(pos >= k, hi, np.where(pos <= k - 2, lo, grid))


def _outcome_columns(X18, *outcomes) -> np.ndarray:
    lo, hi = X18[:, :1], X18[:, -1:]
    diam = hi - lo
    cols = []
    for y in outcomes:
        y = y[:, None]
        cols.extend([y, y - diam, y + diam])
    return np.concatenate(cols, axis=1)


def _scan_predictions(B: int, slots: int, base_seed: int) -> np.ndarray:
    """Seeded prediction matrix (B, slots), spanning inside and beyond the hull."""
    preds = np.empty((B, slots), dtype=np.int64)
    for slot in range(slots):
        rng = np.random.default_rng([base_seed & 0xFFFFFFFFFFFFFFFF, 9973, slot])
        preds[:, slot] = rng.integers(-SCALE, 2 * SCALE + 1, size=B)
    return preds


def _phantom_ints(alphas) -> np.ndarray:
    out = np.empty(len(alphas), dtype=np.int64)
    for j, a in enumerate(alphas):
        if isinstance(a, float):
            out[j] = _batch.INF_INT if a > 0 else -_batch.INF_INT
        else:
            scaled = Fraction(a) * SCALE * GRID_MULT
            if scaled.denominator != 1:
                raise ValueError(f"phantom {a} is off the scan lattice")
            out[j] = int(scaled)
    return np.sort(out)


def _collect(hits, mask, agent, slot):
    if mask.any():
        for row, col in np.argwhere(mask):
            hits.append((int(row), agent, slot))


def _certify(spec, X, z: int, hits, preds) -> List[ViolationCertificate]:
    """Re-verify batch hits on the exact path; discard any false alarm."""
    certificates = []
    seen = set()
    for row, agent, slot in hits:
        key = (row, agent, slot)
        if key in seen:
            continue
        seen.add(key)
        locations = tuple(Fraction(int(v), SCALE) for v in X[row])
        inst = Instance(locations, z, None)
        prediction = None
        if preds is not None and slot is not None:
            prediction = Fraction(int(preds[row, slot]), SCALE)
        cert = check_sp_deterministic(spec, inst, prediction=prediction)
        if cert is not None:
            certificates.append(cert)
    return certificates
