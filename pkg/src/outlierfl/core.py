"""Core domain types for single-facility location on the line with outliers.

Everything here is exact: locations, costs and thresholds are rationals
(`fractions.Fraction`), never binary floats.  Floats appear only as the
+/-infinity sentinels used by phantom-point mechanisms.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence, Union

# Exact number type used for all locations, costs and thresholds.
Rational = Fraction

NEG_INF = float("-inf")
POS_INF = float("inf")

# A rational extended with the two infinities (phantom points only).
ExtendedRational = Union[Fraction, float]


class InvalidInstance(ValueError):
    """An instance (or its serialized form) violates the domain contract."""


class ObjectiveKind(Enum):
    UTILITARIAN = "utilitarian"
    EGALITARIAN = "egalitarian"

    @classmethod
    def from_str(cls, name: str) -> "ObjectiveKind":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise InvalidInstance(f"unknown objective {name!r}") from None


def parse_rational(value) -> Fraction:
    """Parse a number into an exact rational.

    Accepts "p/q" and decimal strings (parsed exactly, no float detour),
    ints, Fractions, and [p, q] integer pairs.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InvalidInstance(f"not a number: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInstance(f"bad rational literal {value!r}") from exc
    if isinstance(value, (list, tuple)) and len(value) == 2:
        p, q = value
        if isinstance(p, int) and isinstance(q, int) and q != 0:
            return Fraction(p, q)
        raise InvalidInstance(f"bad fraction pair {value!r}")
    if isinstance(value, float):
        raise InvalidInstance(
            f"refusing float literal {value!r}: pass a decimal string for exact parsing"
        )
    raise InvalidInstance(f"bad rational literal {value!r}")


def format_rational(value, decimal: bool = False) -> str:
    """Render a rational (or +/-inf) as "p/q" text, or fixed point if decimal."""
    if isinstance(value, float):
        if value == POS_INF:
            return "inf"
        if value == NEG_INF:
            return "-inf"
        raise ValueError(f"non-sentinel float {value!r} has no exact rendering")
    if decimal:
        return f"{float(value):.10g}"
    return str(Fraction(value))


@dataclass(frozen=True)
class SortedProfile:
    """Ascending view of a profile with prefix sums and the sorting permutation.

    prefix_sums[k] is the sum of the k smallest values, so the sum over the
    1-indexed window [a, b] is prefix_sums[b] - prefix_sums[a - 1].
    index_map[k] is the original agent index of the (k+1)-th smallest value
    (ties broken by original index, so the permutation is stable).
    """

    sorted_values: tuple
    prefix_sums: tuple
    index_map: tuple

    @classmethod
    def from_locations(cls, locations: Sequence[Fraction]) -> "SortedProfile":
        order = sorted(range(len(locations)), key=locations.__getitem__)
        values = tuple(locations[i] for i in order)
        sums = [Fraction(0)]
        for v in values:
            sums.append(sums[-1] + v)
        return cls(values, tuple(sums), tuple(order))

    @property
    def n(self) -> int:
        return len(self.sorted_values)

    def order_statistic(self, k: int) -> Fraction:
        """The k-th smallest value, 1-indexed."""
        if not 1 <= k <= self.n:
            raise ValueError(f"order statistic {k} out of range 1..{self.n}")
        return self.sorted_values[k - 1]

    def window_sum(self, a: int, b: int) -> Fraction:
        """Sum of sorted values over the 1-indexed inclusive window [a, b]."""
        return self.prefix_sums[b] - self.prefix_sums[a - 1]


def order_statistic(profile: SortedProfile, k: int) -> Fraction:
    """The k-th smallest reported location (1-indexed)."""
    return profile.order_statistic(k)


@dataclass(frozen=True)
class Instance:
    """A reported profile, an outlier budget z, and an optional prediction.

    Valid whenever 0 <= z <= n - 1.  The tighter mechanism regime
    (n >= 3 and 1 <= z <= floor((n-1)/2)) is exposed as `mechanism_feasible`;
    mechanisms that need it validate it themselves.
    """

    locations: tuple
    z: int
    prediction: Optional[Fraction] = None
    objective: Optional[ObjectiveKind] = None

    def __post_init__(self):
        locations = tuple(Fraction(v) for v in self.locations)
        object.__setattr__(self, "locations", locations)
        if len(locations) == 0:
            raise InvalidInstance("empty location list")
        if not isinstance(self.z, int) or isinstance(self.z, bool):
            raise InvalidInstance(f"z must be an integer, got {self.z!r}")
        if not 0 <= self.z <= len(locations) - 1:
            raise InvalidInstance(
                f"z={self.z} out of range [0, {len(locations) - 1}] for n={len(locations)}"
            )

    @property
    def n(self) -> int:
        return len(self.locations)

    @property
    def mechanism_feasible(self) -> bool:
        return self.n >= 3 and 1 <= self.z <= (self.n - 1) // 2

    @cached_property
    def profile(self) -> SortedProfile:
        return SortedProfile.from_locations(self.locations)

    def replace_location(self, agent_index: int, value: Fraction) -> "Instance":
        """A copy with one agent's report changed (z and prediction kept)."""
        if not 0 <= agent_index < self.n:
            raise ValueError(f"agent index {agent_index} out of range")
        locs = list(self.locations)
        locs[agent_index] = Fraction(value)
        return Instance(tuple(locs), self.z, self.prediction, self.objective)

    def with_z(self, z: int) -> "Instance":
        return Instance(self.locations, z, self.prediction, self.objective)

    def with_prediction(self, prediction: Optional[Fraction]) -> "Instance":
        return Instance(self.locations, self.z, prediction, self.objective)


def parse_instance(text: str) -> Instance:
    """Parse the JSON instance format.

    {"locations": ["0", "0.5", "1"], "z": 1,
     "prediction": "1/4",            # optional
     "objective": "utilitarian"}     # optional

    Decimal strings parse exactly; no binary-float intermediate is used.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInstance(f"malformed instance document: {exc}") from exc
    if not isinstance(doc, dict):
        raise InvalidInstance("instance document must be a JSON object")
    if "locations" not in doc:
        raise InvalidInstance("instance document missing 'locations'")
    raw = doc["locations"]
    if not isinstance(raw, list) or not raw:
        raise InvalidInstance("empty location list")
    locations = tuple(parse_rational(v) for v in raw)
    z = doc.get("z", 0)
    if not isinstance(z, int) or isinstance(z, bool):
        raise InvalidInstance(f"z must be an integer, got {z!r}")
    prediction = None
    if doc.get("prediction") is not None:
        prediction = parse_rational(doc["prediction"])
    objective = None
    if doc.get("objective") is not None:
        objective = ObjectiveKind.from_str(doc["objective"])
    return Instance(locations, z, prediction, objective)


def instance_to_json(instance: Instance) -> str:
    doc = {
        "locations": [format_rational(v) for v in instance.locations],
        "z": instance.z,
    }
    if instance.prediction is not None:
        doc["prediction"] = format_rational(instance.prediction)
    if instance.objective is not None:
        doc["objective"] = instance.objective.value
    return json.dumps(doc)
