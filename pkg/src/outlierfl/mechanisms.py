"""Every mechanism under study: order statistics, phantom medians,
the randomized median, and the prediction-augmented In-Range rule.

All mechanisms are pure functions of the instance (plus prediction where
relevant).  Randomized rules return an explicit finite distribution; no
randomness is consumed here.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

from .core import (
    NEG_INF,
    POS_INF,
    Instance,
    ObjectiveKind,
    format_rational,
    parse_rational,
)
from .objectives import optimal_solution
from .predictions import gamma_max


def _require_feasible(instance: Instance, who: str):
    if not instance.mechanism_feasible:
        raise ValueError(
            f"{who} requires n >= 3 and 1 <= z <= floor((n-1)/2); "
            f"got n={instance.n}, z={instance.z}"
        )


def left_z(instance: Instance) -> Fraction:
    """The (z+1)-th order statistic of the reports."""
    _require_feasible(instance, "left_z")
    return instance.profile.order_statistic(instance.z + 1)


def left_median(instance: Instance) -> Fraction:
    """The left median, i.e. the ceil(n/2)-th order statistic."""
    return instance.profile.order_statistic((instance.n + 1) // 2)


def kth_order_statistic(instance: Instance, k: int) -> Fraction:
    return instance.profile.order_statistic(k)


def phantom_median(instance: Instance, alphas) -> Fraction:
    """Median of the n reports pooled with n+1 fixed phantom points.

    Phantoms may be rationals or +/-inf; +/-inf sort below/above every
    rational.  If the median itself is a phantom at +/-inf, that sentinel
    is returned as a degenerate outcome.
    """
    n = instance.n
    alphas = tuple(alphas)
    if len(alphas) != n + 1:
        raise ValueError(f"need exactly n+1={n + 1} phantom points, got {len(alphas)}")
    cleaned = []
    for a in alphas:
        if isinstance(a, float):
            if a != POS_INF and a != NEG_INF:
                raise ValueError(f"phantom {a!r} is neither rational nor +/-inf")
            cleaned.append(a)
        else:
            cleaned.append(Fraction(a))
    combined = sorted(list(instance.locations) + cleaned)
    return combined[n]  # the (n+1)-th smallest of 2n+1 points


@dataclass(frozen=True)
class RandomizedOutcome:
    """A finite-support distribution over locations."""

    support: tuple  # of (location, probability) pairs

    def __post_init__(self):
        total = Fraction(0)
        seen = set()
        for loc, p in self.support:
            if p <= 0:
                raise ValueError("probabilities must be positive")
            if loc in seen:
                raise ValueError("support locations must be distinct")
            seen.add(loc)
            total += p
        if total != 1:
            raise ValueError(f"probabilities sum to {total}, not 1")

    def expected_distance(self, point: Fraction) -> Fraction:
        return sum(p * abs(loc - point) for loc, p in self.support)


def rand_median(instance: Instance) -> RandomizedOutcome:
    """Left and right median, each with probability 1/2 (n even)."""
    n = instance.n
    if n % 2 != 0:
        raise ValueError(f"rand_median needs an even number of agents, got n={n}")
    if instance.z > (n - 1) // 2:
        raise ValueError(f"z={instance.z} exceeds floor((n-1)/2) for n={n}")
    lo = instance.profile.order_statistic(n // 2)
    hi = instance.profile.order_statistic(n // 2 + 1)
    if lo == hi:
        return RandomizedOutcome(((lo, Fraction(1)),))
    return RandomizedOutcome(((lo, Fraction(1, 2)), (hi, Fraction(1, 2))))


def in_range_thresholds(n: int, z: int, gamma: int = 0) -> Tuple[int, int]:
    """Effective 1-indexed acceptance thresholds (l', r') of In-Range.

    Base thresholds are l = max(ceil((n-z+1)/2), z+1) and
    r = min(ceil((n-z)/2) + z, n-z).  A confidence gamma narrows the
    interval from both sides; it is clamped so l' <= r' holds on the whole
    feasible domain (for n < 3z the nominal gamma_max can exceed the
    interval width).
    """
    m = n - z
    lo = max((m + 2) // 2, z + 1)
    hi = min((m + 1) // 2 + z, m)
    effective = min(gamma, (hi - lo) // 2)
    return lo + effective, hi - effective


def in_range(
    instance: Instance,
    prediction: Optional[Fraction] = None,
    gamma: int = 0,
) -> Fraction:
    """Follow the prediction inside the acceptance interval, clamp outside.

    Returns yhat if x_sigma(l') <= yhat <= x_sigma(r'), otherwise the
    nearer interval endpoint.  gamma in 0..gamma_max(n, z) trades
    consistency for robustness; gamma = 0 trusts the prediction fully.
    """
    _require_feasible(instance, "in_range")
    if prediction is None:
        prediction = instance.prediction
    if prediction is None:
        raise ValueError("in_range needs a prediction")
    prediction = Fraction(prediction)
    limit = gamma_max(instance.n, instance.z)
    if not 0 <= gamma <= limit:
        raise ValueError(f"gamma={gamma} out of range 0..{limit} for (n, z)=({instance.n}, {instance.z})")
    lo_idx, hi_idx = in_range_thresholds(instance.n, instance.z, gamma)
    lo = instance.profile.order_statistic(lo_idx)
    hi = instance.profile.order_statistic(hi_idx)
    if prediction < lo:
        return lo
    if prediction > hi:
        return hi
    return prediction


def oracle_mechanism(instance: Instance, objective: ObjectiveKind) -> Fraction:
    """Returns an exact optimal location. Deliberately NOT strategyproof;
    exists so the violation finder has something to catch."""
    return optimal_solution(instance, objective).location


@dataclass(frozen=True)
class MechanismSpec:
    """A serializable handle on one mechanism, for CLI selection and sweeps."""

    kind: str  # left_z | left_median | kth | phantom | rand_median | in_range | oracle
    k: Optional[int] = None
    alphas: Optional[tuple] = None
    gamma: int = 0
    objective: Optional[ObjectiveKind] = None

    KINDS = ("left_z", "left_median", "kth", "phantom", "rand_median", "in_range", "oracle")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown mechanism kind {self.kind!r}")
        if self.kind == "kth" and self.k is None:
            raise ValueError("kth mechanism needs k")
        if self.kind == "phantom" and self.alphas is None:
            raise ValueError("phantom mechanism needs its phantom vector")
        if self.kind == "oracle" and self.objective is None:
            raise ValueError("oracle mechanism needs an objective")

    @property
    def randomized(self) -> bool:
        return self.kind == "rand_median"

    def apply(self, instance: Instance, prediction: Optional[Fraction] = None):
        if self.kind == "left_z":
            return left_z(instance)
        if self.kind == "left_median":
            return left_median(instance)
        if self.kind == "kth":
            return kth_order_statistic(instance, self.k)
        if self.kind == "phantom":
            return phantom_median(instance, self.alphas)
        if self.kind == "rand_median":
            return rand_median(instance)
        if self.kind == "in_range":
            return in_range(instance, prediction, self.gamma)
        return oracle_mechanism(instance, self.objective)

    def label(self) -> str:
        if self.kind == "kth":
            return f"kth[{self.k}]"
        if self.kind == "in_range":
            return f"in_range[gamma={self.gamma}]"
        if self.kind == "oracle":
            return f"oracle[{self.objective.value}]"
        return self.kind

    def to_tag(self) -> dict:
        tag = {"mech": self.kind}
        if self.kind == "kth":
            tag["k"] = self.k
        elif self.kind == "phantom":
            tag["alphas"] = [format_rational(a) for a in self.alphas]
        elif self.kind == "in_range":
            tag["gamma"] = self.gamma
        elif self.kind == "oracle":
            tag["objective"] = self.objective.value
        return tag

    @classmethod
    def from_tag(cls, tag: dict) -> "MechanismSpec":
        kind = tag.get("mech")
        if kind == "kth":
            return cls("kth", k=int(tag["k"]))
        if kind == "phantom":
            alphas = tuple(_parse_extended(a) for a in tag["alphas"])
            return cls("phantom", alphas=alphas)
        if kind == "in_range":
            return cls("in_range", gamma=int(tag.get("gamma", 0)))
        if kind == "oracle":
            return cls("oracle", objective=ObjectiveKind.from_str(tag["objective"]))
        return cls(kind)


def _parse_extended(text):
    if isinstance(text, str) and text.strip().lstrip("+-") == "inf":
        return NEG_INF if text.strip().startswith("-") else POS_INF
    return parse_rational(text)
