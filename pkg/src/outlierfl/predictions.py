"""Prediction-quality metrics and the closed-form guarantee functions.

The guarantee functions return exact rationals (or +inf where a bound
degenerates); their domains follow the feasible mechanism regime
1 <= z <= floor((n-1)/2).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .core import POS_INF, Instance, ObjectiveKind
from .objectives import eval_cost, opt_utilitarian, optimal_solution, utilitarian_optimum_span

Bound = Union[Fraction, float]  # float only as the +inf sentinel


@dataclass(frozen=True)
class PredictionError:
    """The error eta of a prediction: cost of the predicted location over OPT.

    degenerate marks the OPT = 0 convention: eta = 1 when the prediction is
    also free, +inf otherwise.  eta >= 1 always.
    """

    value: Bound
    degenerate: bool = False


@dataclass(frozen=True)
class DeltaIndices:
    """Sorted-rank distance between a mechanism's output and the optimum."""

    i_opt: int
    i_mech: int
    delta: int


def prediction_error(
    instance: Instance,
    prediction: Fraction,
    objective: ObjectiveKind = ObjectiveKind.UTILITARIAN,
) -> PredictionError:
    prediction = Fraction(prediction)
    opt = optimal_solution(instance, objective).cost
    at_prediction = eval_cost(instance, prediction, objective).cost
    if opt == 0:
        if at_prediction == 0:
            return PredictionError(Fraction(1), degenerate=True)
        return PredictionError(POS_INF, degenerate=True)
    return PredictionError(at_prediction / opt)


def delta_index(instance: Instance, y: Fraction) -> DeltaIndices:
    """Index distance delta = |i(y*) - i(y)| under the utilitarian objective.

    delta is 0 whenever y lies in the closed interval spanned by the
    leftmost and rightmost optimal locations.  Otherwise the optimum facing
    y anchors i(y*): the minimum index of its value when y < y*, the
    maximum when y > y*.  i(y) is the matching index of y's own value when
    y is a report, else the index of the first report strictly beyond y.
    With that pairing, delta counts the agent positions strictly between
    plus one (when neither location is duplicated).
    """
    y = Fraction(y)
    values = instance.profile.sorted_values
    n = len(values)
    span_lo, span_hi = utilitarian_optimum_span(instance)
    if span_lo <= y <= span_hi:
        opt = opt_utilitarian(instance)
        i_opt = _min_index(values, opt.location)
        return DeltaIndices(i_opt, i_opt, 0)

    if y > span_hi:
        y_star = span_hi
        i_opt = _max_index(values, y_star)
        if y in values:
            i_mech = _max_index(values, y)
        else:
            i_mech = _first_above(values, y)
    else:
        y_star = span_lo
        i_opt = _min_index(values, y_star)
        if y in values:
            i_mech = _min_index(values, y)
        else:
            i_mech = _last_below(values, y)
    return DeltaIndices(i_opt, i_mech, abs(i_opt - i_mech))


def _min_index(values, v) -> int:
    return values.index(v) + 1


def _max_index(values, v) -> int:
    return len(values) - values[::-1].index(v)


def _first_above(values, y) -> int:
    """1-indexed minimum index with value > y, or n+1 if y is beyond all."""
    for i, v in enumerate(values):
        if v > y:
            return i + 1
    return len(values) + 1


def _last_below(values, y) -> int:
    """1-indexed maximum index with value < y, or 0 if y is below all."""
    for i in range(len(values) - 1, -1, -1):
        if values[i] < y:
            return i + 1
    return 0


def _require_feasible(n: int, z: int):
    if n < 3 or not 1 <= z <= (n - 1) // 2:
        raise ValueError(f"(n, z)=({n}, {z}) outside the feasible regime")


def f_util(n: int, z: int) -> Fraction:
    """Tight deterministic guarantee for the utilitarian objective."""
    _require_feasible(n, z)
    if n % 2 == 1:
        return Fraction(n - 1, n - 2 * z + 1)
    return Fraction(n, n - 2 * z)


def f_rand(n: int, z: int) -> Fraction:
    """Expected guarantee of the randomized median (n even)."""
    _require_feasible(n, z)
    if n % 2 != 0:
        raise ValueError(f"f_rand needs n even, got n={n}")
    if z == 1:
        return Fraction(n - 1, n - 2)
    return Fraction(n * n - 2 * n * z + 2 * z, (n - 2 * z) * (n - 2 * z + 2))


def f_robust(n: int, z: int) -> Fraction:
    """Best possible robustness of a 1-consistent rule, for n >= 3z."""
    _require_feasible(n, z)
    if n < 3 * z:
        raise ValueError(f"f_robust needs n >= 3z, got (n, z)=({n}, {z})")
    if (n - z) % 2 == 1:
        return Fraction(n + z - 1, n - 3 * z + 1)
    return Fraction(n + z - 2, n - 3 * z + 2)


def f_eta(n: int, z: int, eta: Bound) -> Bound:
    """Error-interpolated guarantee min(eta, robustness), for n >= 3z."""
    robust = f_robust(n, z)
    if isinstance(eta, float):
        if eta != POS_INF:
            raise ValueError("eta must be a rational >= 1 or +inf")
        return robust
    eta = Fraction(eta)
    if eta < 1:
        raise ValueError(f"eta={eta} below 1")
    return min(eta, robust)


def delta_c(n: int, z: int) -> int:
    """Consistency index gap of In-Range for 2z+1 <= n <= 3z-1."""
    _require_small_n(n, z)
    return z + 1 - (n - z + 2) // 2


def delta_r(n: int, z: int) -> int:
    """Robustness index gap of In-Range for 2z+1 <= n <= 3z-1."""
    _require_small_n(n, z)
    return n - z - (n - z + 2) // 2


def _require_small_n(n: int, z: int):
    _require_feasible(n, z)
    if not 2 * z + 1 <= n <= 3 * z - 1:
        raise ValueError(f"(n, z)=({n}, {z}) outside 2z+1 <= n <= 3z-1")


def f_delta(n: int, z: int, delta: int) -> Bound:
    """Fine-grained guarantee for 2z+1 <= n <= 3z-1 as a function of delta.

    Floored at 1 (delta = 0 means the mechanism hit an optimum); reported
    as +inf where the even-parity denominator reaches zero.
    """
    _require_small_n(n, z)
    m = n - z
    limit = z if m % 2 == 1 else z - 1
    if not 0 <= delta <= limit:
        raise ValueError(f"delta={delta} out of range 0..{limit} for (n, z)=({n}, {z})")
    if m % 2 == 1:
        half = Fraction(m - 1, 2)
        denominator = half + 1 - delta
    else:
        half = Fraction(m, 2)
        denominator = half - delta
    if denominator <= 0:
        return POS_INF
    return max(Fraction(1), (half + delta) / denominator)


def gamma_max(n: int, z: int) -> int:
    """Largest confidence parameter accepted by In-Range.

    z/2 - 1 when n and z are both even, floor(z/2) otherwise; for z = 1
    both readings give 0, the prediction interval is already minimal.
    """
    _require_feasible(n, z)
    if n % 2 == 0 and z % 2 == 0:
        return z // 2 - 1
    return z // 2
