"""Outlier-adjusted objectives: evaluation at a fixed location and exact optima.

Two independent routes are kept side by side on purpose: the fast solvers
work on contiguous windows of the sorted profile, while `brute_force_opt`
and `eval_oracle` enumerate every size-(n-z) subset and exist to audit the
fast routes.  All arithmetic is exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional, Tuple

from .core import Instance, InvalidInstance, ObjectiveKind

BRUTE_FORCE_MAX_N = 14


@dataclass(frozen=True)
class Evaluation:
    """Cost of a fixed location together with the realized exclusion split.

    window = (z_left, z_right) identifies the excluded prefix/suffix of the
    sorted profile; the retained set is sorted positions z_left+1 .. n-z_right.
    """

    cost: Fraction
    window: Tuple[int, int]


@dataclass(frozen=True)
class OptimalSolution:
    """An exact optimum: location, cost, exclusion window and tied locations.

    `alternates` lists the other optimal locations found among the solver's
    candidates (for even retained windows the optimum is an interval; the
    left endpoint is reported as `location` and the right one appears here).
    `contiguous` records whether the winning retained set is contiguous in
    sorted order; the enumeration solver asserts this on every run.
    """

    location: Fraction
    cost: Fraction
    window: Tuple[int, int]
    alternates: tuple = ()
    contiguous: bool = True


def _greedy_window(profile, z: int, y: Fraction) -> Tuple[int, int]:
    """Drop, z times, the endpoint farthest from y. Ties drop the right one."""
    values = profile.sorted_values
    a, b = 0, len(values) - 1
    for _ in range(z):
        if abs(y - values[a]) > abs(values[b] - y):
            a += 1
        else:
            b -= 1
    return a, b


def _window_cost_utilitarian(profile, a: int, b: int, y: Fraction) -> Fraction:
    """Sum of |y - x| over sorted positions a..b (0-indexed), via prefix sums."""
    values = profile.sorted_values
    lo, hi = a, b + 1
    while lo < hi:  # first index in (a..b] with value > y
        mid = (lo + hi) // 2
        if values[mid] <= y:
            lo = mid + 1
        else:
            hi = mid
    t = lo  # values[a:t] <= y < values[t:b+1]
    left = y * (t - a) - profile.window_sum(a + 1, t) if t > a else Fraction(0)
    right = profile.window_sum(t + 1, b + 1) - y * (b + 1 - t) if t <= b else Fraction(0)
    return left + right


def _window_cost_egalitarian(profile, a: int, b: int, y: Fraction) -> Fraction:
    values = profile.sorted_values
    return max(y - values[a], values[b] - y)


def eval_cost(instance: Instance, y: Fraction, objective: ObjectiveKind) -> Evaluation:
    """Minimum objective value at location y over all size-(n-z) retained sets.

    The n-z agents closest to y form a contiguous window of the sorted
    profile, found by greedily dropping the farthest endpoint z times.
    """
    y = Fraction(y)
    profile = instance.profile
    a, b = _greedy_window(profile, instance.z, y)
    if objective is ObjectiveKind.UTILITARIAN:
        cost = _window_cost_utilitarian(profile, a, b, y)
    else:
        cost = _window_cost_egalitarian(profile, a, b, y)
    return Evaluation(cost, (a, instance.n - 1 - b))


def candidate_order_statistics(n: int, z: int) -> range:
    """1-indexed sorted positions that always contain a utilitarian optimum.

    Runs from ceil((n-z+1)/2) through ceil((n-z)/2) + z; its length is z when
    n-z is even and z+1 otherwise.  Meaningful for 1 <= z <= n-2.
    """
    m = n - z
    return range((m + 1 + 1) // 2, (m + 1) // 2 + z + 1)


def _utilitarian_candidates(instance: Instance):
    """Yield (cost, z_left, location) for every window median candidate."""
    profile = instance.profile
    n, z = instance.n, instance.z
    m = n - z
    for k in range(z + 1):
        a, b = k, n - z + k - 1  # 0-indexed window
        j = k + (m + 1) // 2 - 1  # 0-indexed left median
        cost = _window_cost_utilitarian(profile, a, b, profile.sorted_values[j])
        yield cost, k, profile.sorted_values[j]
        if m % 2 == 0:
            yield cost, k, profile.sorted_values[j + 1]


def opt_utilitarian(instance: Instance) -> OptimalSolution:
    """Exact utilitarian optimum over the candidate windows.

    Ties break toward smaller z_left, then smaller location.  For an even
    retained window the reported location is the left endpoint of the
    optimal interval; the right endpoint lands in `alternates`.
    """
    best = None
    optimal_locations = set()
    for cost, k, y in _utilitarian_candidates(instance):
        if best is None or cost < best[0]:
            best = (cost, k, y)
            optimal_locations = {y}
        elif cost == best[0]:
            optimal_locations.add(y)
            if (k, y) < (best[1], best[2]):
                best = (cost, k, y)
    cost, k, y = best
    alternates = tuple(sorted(optimal_locations - {y}))
    return OptimalSolution(y, cost, (k, instance.z - k), alternates)


def opt_egalitarian(instance: Instance) -> OptimalSolution:
    """Exact egalitarian optimum: the best window midpoint."""
    profile = instance.profile
    n, z = instance.n, instance.z
    best = None
    optimal_locations = set()
    for k in range(z + 1):
        a, b = k, n - z + k - 1
        lo, hi = profile.sorted_values[a], profile.sorted_values[b]
        mid = (lo + hi) / 2
        cost = (hi - lo) / 2
        if best is None or cost < best[0]:
            best = (cost, k, mid)
            optimal_locations = {mid}
        elif cost == best[0]:
            optimal_locations.add(mid)
            if (k, mid) < (best[1], best[2]):
                best = (cost, k, mid)
    cost, k, mid = best
    alternates = tuple(sorted(optimal_locations - {mid}))
    return OptimalSolution(mid, cost, (k, z - k), alternates)


def optimal_solution(instance: Instance, objective: ObjectiveKind) -> OptimalSolution:
    if objective is ObjectiveKind.UTILITARIAN:
        return opt_utilitarian(instance)
    return opt_egalitarian(instance)


def utilitarian_optimum_span(instance: Instance) -> Tuple[Fraction, Fraction]:
    """Leftmost and rightmost optimal utilitarian locations among candidates."""
    opt = opt_utilitarian(instance)
    locations = (opt.location, *opt.alternates)
    return min(locations), max(locations)


def _scaled_ints(values) -> Tuple[list, int]:
    """Represent rationals as integers over one common denominator."""
    scale = 1
    for v in values:
        scale = scale * v.denominator // math.gcd(scale, v.denominator)
    return [int(v * scale) for v in values], scale


def _check_brute_force_size(instance: Instance):
    if instance.n > BRUTE_FORCE_MAX_N:
        raise ValueError(
            f"n={instance.n} exceeds the enumeration budget ({BRUTE_FORCE_MAX_N})"
        )


def brute_force_opt(instance: Instance, objective: ObjectiveKind) -> OptimalSolution:
    """Independent oracle: enumerate ALL size-(n-z) subsets, not just windows.

    Each subset is solved exactly (utilitarian: left median of the subset;
    egalitarian: midpoint).  Among tied subsets, contiguous ones are
    preferred, then smaller z_left, then smaller location; a non-contiguous
    winner would contradict the contiguity lemma and raises.
    """
    _check_brute_force_size(instance)
    profile = instance.profile
    n, z = instance.n, instance.z
    m = n - z
    ints, scale = _scaled_ints(profile.sorted_values)
    egalitarian = objective is ObjectiveKind.EGALITARIAN
    half = 1 if egalitarian else 0  # egalitarian costs/locations carry a /2

    best_key = None
    best = None
    optimal_locations = set()
    for comb in combinations(range(n), m):
        vals = [ints[i] for i in comb]
        if egalitarian:
            cost2 = vals[-1] - vals[0]
            loc2 = vals[0] + vals[-1]
            cost, loc = cost2, loc2
        else:
            med = vals[(m - 1) // 2]
            cost = sum(abs(v - med) for v in vals)
            loc = med
        contiguous = comb[-1] - comb[0] == m - 1
        key = (cost, not contiguous, comb[0], loc)
        if best_key is None or cost < best_key[0]:
            best_key = key
            best = (cost, contiguous, comb, loc)
            optimal_locations = {loc}
        elif cost == best_key[0]:
            optimal_locations.add(loc)
            if key < best_key:
                best_key = key
                best = (cost, contiguous, comb, loc)

    cost, contiguous, comb, loc = best
    if not contiguous:
        raise AssertionError(
            "enumeration found no contiguous optimal subset; contiguity lemma violated"
        )
    denom = scale * (2 if half else 1)
    location = Fraction(loc, denom)
    alternates = tuple(sorted(Fraction(v, denom) for v in optimal_locations if v != loc))
    window = (comb[0], n - 1 - comb[-1])
    return OptimalSolution(location, Fraction(cost, denom), window, alternates, contiguous)


def eval_oracle(instance: Instance, y: Fraction, objective: ObjectiveKind) -> Fraction:
    """Subset-enumeration counterpart of eval_cost at a fixed location."""
    _check_brute_force_size(instance)
    y = Fraction(y)
    n, z = instance.n, instance.z
    m = n - z
    ints, scale = _scaled_ints(list(instance.profile.sorted_values) + [y])
    yi = ints.pop()
    dists = [abs(v - yi) for v in ints]
    if objective is ObjectiveKind.UTILITARIAN:
        best = min(sum(dists[i] for i in comb) for comb in combinations(range(n), m))
    else:
        best = min(max(dists[i] for i in comb) for comb in combinations(range(n), m))
    return Fraction(best, scale)
