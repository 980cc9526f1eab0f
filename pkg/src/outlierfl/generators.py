"""Adversarial instance families and seeded random generators.

Family names follow the figure numbering of the lower-bound constructions:
cluster profiles with agents stacked on a handful of points, plus the
deviation sequences those proofs replay (one agent moves per step, so
consecutive instances differ in exactly one position).
"""
from __future__ import annotations

from fractions import Fraction
from typing import List, Optional

import numpy as np

from .core import Instance

RANDOM_DENOMINATOR = 10**6

HALF = Fraction(1, 2)


def _clusters(*groups) -> tuple:
    locations = []
    for value, count in groups:
        if count < 0:
            raise ValueError(f"negative cluster size {count}")
        locations.extend([Fraction(value)] * count)
    return tuple(locations)


def _check(condition: bool, message: str):
    if not condition:
        raise ValueError(message)


# -- impossibility construction (z >= ceil(n/2)) ------------------------------

def _fig3_movers(n: int, z: int) -> int:
    _check(n >= 4, "fig3 needs n >= 4")
    _check((n + 1) // 2 <= z <= n - 2, f"fig3 needs ceil(n/2) <= z <= n-2, got (n, z)=({n}, {z})")
    return z + n // 2 - n + 1


def _fig3_step(n: int, z: int, moved: int) -> Instance:
    movers = _fig3_movers(n, z)
    _check(0 <= moved <= movers, f"moved={moved} out of range 0..{movers}")
    fl = n // 2
    base = _clusters((0, fl), (1, n - 2 * fl), (2, n - z - 1))
    movable = tuple(Fraction(2) if j < moved else Fraction(3) for j in range(movers))
    return Instance(base + movable, z)


def fig3a(n: int, z: int) -> Instance:
    """Two extreme clusters of floor(n/2) with at most one agent between."""
    return _fig3_step(n, z, _fig3_movers(n, z))


def fig3b(n: int, z: int) -> Instance:
    """fig3a with the right cluster split so only one location holds n-z agents."""
    return _fig3_step(n, z, 0)


def fig3c(n: int, z: int, delta: int) -> Instance:
    """delta agents of the far cluster already moved to the n-z cluster."""
    return _fig3_step(n, z, delta + 1)


def fig3_sequence(n: int, z: int) -> List[Instance]:
    """The proof's deviation replay: far-cluster agents move left one by one."""
    return [_fig3_step(n, z, t) for t in range(_fig3_movers(n, z) + 1)]


# -- egalitarian lower bound ---------------------------------------------------

def fig4(n: int, z: int, delta: int = 0) -> Instance:
    """z at 0, n-2z+delta at 1/2, z-delta at 1."""
    _check(n >= 3 and 1 <= z <= (n - 1) // 2, f"fig4 needs a feasible (n, z), got ({n}, {z})")
    _check(0 <= delta <= z, f"delta={delta} out of range 0..{z}")
    base = _clusters((0, z), (HALF, n - 2 * z))
    movable = tuple(HALF if j < delta else Fraction(1) for j in range(z))
    return Instance(base + movable, z)


def fig4_sequence(n: int, z: int) -> List[Instance]:
    """Right-cluster agents move to 1/2 one by one."""
    return [fig4(n, z, delta) for delta in range(z + 1)]


# -- utilitarian deterministic lower bound (four profiles) ---------------------

def fig6_x1(n: int, z: int, d=1) -> Instance:
    d = Fraction(d)
    _check(d > 0, "fig6 needs d > 0")
    return Instance(_clusters((0, z), (d, n - z)), z)


def fig6_x2(n: int, z: int, d=1) -> Instance:
    """z at 0, ceil((n-2z)/2) at d, floor(n/2) at 2d: the tight profile."""
    d = Fraction(d)
    _check(d > 0, "fig6 needs d > 0")
    _check(n >= 3 and 1 <= z <= (n - 1) // 2, f"fig6 needs a feasible (n, z), got ({n}, {z})")
    return Instance(_clusters((0, z), (d, (n - 2 * z + 1) // 2), (2 * d, n // 2)), z)


def fig6_x3(n: int, z: int, d=1) -> Instance:
    d = Fraction(d)
    _check(d > 0, "fig6 needs d > 0")
    _check(n >= 3 and 1 <= z <= (n - 1) // 2, f"fig6 needs a feasible (n, z), got ({n}, {z})")
    return Instance(_clusters((0, n // 2), (d, (n - 2 * z + 1) // 2), (2 * d, z)), z)


def fig6_x4(n: int, z: int, d=1) -> Instance:
    d = Fraction(d)
    _check(d > 0, "fig6 needs d > 0")
    return Instance(_clusters((0, n - z), (d, z)), z)


# -- egalitarian prediction lower bound ---------------------------------------

def fig7(n: int, z: int, delta: int = 0) -> Instance:
    """fig4 cluster profile carrying the perfect prediction 1/4 of step 0."""
    inst = fig4(n, z, delta)
    return inst.with_prediction(Fraction(1, 4))


def fig7_sequence(n: int, z: int) -> List[Instance]:
    return [fig7(n, z, delta) for delta in range(z + 1)]


# -- utilitarian prediction lower bound, n < 3z --------------------------------

def fig8(n: int, z: int, delta: int = 0, d=1) -> Instance:
    """z-delta at 0, n-2z+delta at z*d, z at (z+1)*d; prediction at the right."""
    d = Fraction(d)
    _check(d > 0, "fig8 needs d > 0")
    _check(z > 1, "fig8 needs z > 1")
    _check(2 * z + 1 <= n <= 3 * z - 1, f"fig8 needs 2z+1 <= n <= 3z-1, got (n, z)=({n}, {z})")
    _check(0 <= delta <= z, f"delta={delta} out of range 0..{z}")
    movable = tuple(z * d if j < delta else Fraction(0) for j in range(z))
    rest = _clusters((z * d, n - 2 * z), ((z + 1) * d, z))
    return Instance(movable + rest, z, prediction=(z + 1) * d)


def fig8_sequence(n: int, z: int, d=1) -> List[Instance]:
    """Left-cluster agents move to z*d one by one; the prediction stays put."""
    return [fig8(n, z, delta, d) for delta in range(z + 1)]


# -- utilitarian prediction lower bound, n >= 3z --------------------------------

def fig9(n: int, z: int, d1, d2, d3, delta: int = 0) -> Instance:
    """Four clusters at 0, d1, d1+d2, d1+d2+d3 with prediction d1+d2.

    Requires d1 > d2+d3, 0 < d2 < d3 and n >= 3z (n >= 3z+1 when n-z is
    odd).  At delta = z+theta every left agent has moved to d1, which is
    the profile attaining the robustness bound.
    """
    d1, d2, d3 = Fraction(d1), Fraction(d2), Fraction(d3)
    _check(0 < d2 < d3, "fig9 needs 0 < d2 < d3")
    _check(d1 > d2 + d3, "fig9 needs d1 > d2 + d3")
    _check(n >= 3 and 1 <= z <= (n - 1) // 2, f"fig9 needs a feasible (n, z), got ({n}, {z})")
    m = n - z
    if m % 2 == 1:
        theta = (m - 1) // 2 - z
        at_d1 = z
    else:
        theta = m // 2 - z
        at_d1 = z - 1
    _check(theta >= 0, f"fig9 needs n >= 3z (strictly when n-z is odd), got (n, z)=({n}, {z})")
    movers = z + theta
    _check(0 <= delta <= movers, f"delta={delta} out of range 0..{movers}")
    movable = tuple(d1 if j < delta else Fraction(0) for j in range(movers))
    rest = _clusters((d1, at_d1), (d1 + d2, 1 + theta), (d1 + d2 + d3, z))
    return Instance(movable + rest, z, prediction=d1 + d2)


def fig9_sequence(n: int, z: int, d1, d2, d3) -> List[Instance]:
    first = fig9(n, z, d1, d2, d3, 0)
    movers = sum(1 for v in first.locations if v == 0)
    return [fig9(n, z, d1, d2, d3, delta) for delta in range(movers + 1)]


# -- worked example -------------------------------------------------------------

def fig10() -> Instance:
    """3 agents at 0, one at 9/10, four at 19/10; z = 3, prediction 0."""
    return Instance(
        _clusters((0, 3), (Fraction(9, 10), 1), (Fraction(19, 10), 4)),
        z=3,
        prediction=Fraction(0),
    )


_FAMILIES = {
    "fig3a": fig3a,
    "fig3b": fig3b,
    "fig3c": fig3c,
    "fig4": fig4,
    "fig6_x1": fig6_x1,
    "fig6_x2": fig6_x2,
    "fig6_x3": fig6_x3,
    "fig6_x4": fig6_x4,
    "fig7": fig7,
    "fig8": fig8,
    "fig9": fig9,
    "fig10": fig10,
}


def family_names() -> tuple:
    return tuple(sorted(_FAMILIES))


def gen_family(family: str, **params) -> Instance:
    """Build one instance of a named adversarial family."""
    try:
        builder = _FAMILIES[family]
    except KeyError:
        raise ValueError(f"unknown family {family!r}; known: {', '.join(family_names())}") from None
    return builder(**params)


# -- seeded random instances -----------------------------------------------------

def _rng(seed: int, *salt: int) -> np.random.Generator:
    return np.random.default_rng([seed & 0xFFFFFFFFFFFFFFFF, *salt])


def random_locations_int(n: int, model: str, seed: int) -> np.ndarray:
    """Locations as integers over RANDOM_DENOMINATOR, deterministic in seed."""
    if model == "uniform":
        rng = _rng(seed, 1)
        return rng.integers(0, RANDOM_DENOMINATOR + 1, size=n, dtype=np.int64)
    if model == "clustered":
        rng = _rng(seed, 2)
        atoms = np.array(
            [RANDOM_DENOMINATOR // 10, RANDOM_DENOMINATOR // 2, 9 * RANDOM_DENOMINATOR // 10],
            dtype=np.int64,
        )
        picks = atoms[rng.integers(0, 3, size=n)]
        jitter = rng.integers(-(RANDOM_DENOMINATOR // 100), RANDOM_DENOMINATOR // 100 + 1, size=n)
        return np.clip(picks + jitter, 0, RANDOM_DENOMINATOR)
    raise ValueError(f"unknown model {model!r}; expected 'uniform' or 'clustered'")


def gen_random(n: int, z: int, model: str, seed: int) -> Instance:
    """A mechanism-feasible random instance; identical for identical seeds."""
    if n < 3 or not 1 <= z <= (n - 1) // 2:
        raise ValueError(f"(n, z)=({n}, {z}) not mechanism-feasible")
    ints = random_locations_int(n, model, seed)
    locations = tuple(Fraction(int(v), RANDOM_DENOMINATOR) for v in ints)
    return Instance(locations, z)
