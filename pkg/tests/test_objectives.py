from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from outlierfl.core import Instance, ObjectiveKind
from outlierfl.generators import gen_random
from outlierfl.objectives import (
    brute_force_opt,
    candidate_order_statistics,
    eval_cost,
    eval_oracle,
    opt_egalitarian,
    opt_utilitarian,
)

UTIL = ObjectiveKind.UTILITARIAN
EGAL = ObjectiveKind.EGALITARIAN

small_rationals = st.fractions(min_value=-10, max_value=10, max_denominator=60)


def inst(values, z, **kw):
    return Instance(tuple(F(v) for v in values), z, **kw)


# -- eval_cost ---------------------------------------------------------------

def test_eval_cost_randomized_lb_profile():
    e = eval_cost(inst([0, F(1, 3), F(2, 3), F(2, 3)], 1), F(2, 3), UTIL)
    assert e.cost == F(1, 3)
    assert e.window == (1, 0)


def test_eval_cost_coincident_points():
    for objective in (UTIL, EGAL):
        e = eval_cost(inst([5, 5, 5, 5], 2), F(5), objective)
        assert e.cost == 0


def test_eval_cost_worked_example():
    profile = inst([0, 0, 0, F(9, 10)] + [F(19, 10)] * 4, 3)
    assert eval_cost(profile, F(0), UTIL).cost == F(28, 10)


def test_eval_cost_egalitarian_enumerated():
    # frozen from the subset-enumeration oracle over all 10 subsets of size 3
    profile = inst([0, 0, F(1, 2), 1, 1], 2)
    assert eval_oracle(profile, F(1, 2), EGAL) == F(1, 2)
    assert eval_cost(profile, F(1, 2), EGAL).cost == F(1, 2)


# -- optimal solutions ---------------------------------------------------------

def test_opt_utilitarian_randomized_lb_profile():
    sol = opt_utilitarian(inst([0, F(1, 3), F(1, 2), F(2, 3), F(2, 3)], 2))
    assert sol.location == F(2, 3)
    assert sol.cost == F(1, 6)


def test_opt_utilitarian_worked_example():
    sol = opt_utilitarian(inst([0, 0, 0, F(9, 10)] + [F(19, 10)] * 4, 3))
    assert sol.location == F(19, 10)
    assert sol.cost == 1


def test_opt_utilitarian_derived():
    sol = opt_utilitarian(inst([0, F(1, 3), F(1, 2), F(2, 3), 1], 2))
    assert sol.location == F(1, 2)
    assert sol.cost == F(1, 3)


def test_opt_egalitarian_tight_profile():
    sol = opt_egalitarian(inst([0, 0, F(1, 2), 1, 1], 2))
    assert sol.cost == F(1, 4)
    assert sol.location == F(1, 4)  # leftmost under the z_left tie-break
    assert sol.alternates == (F(3, 4),)


def test_opt_egalitarian_beta_profile():
    sol = opt_egalitarian(inst([F(1, 4), F(1, 2), 1], 1))
    assert sol.location == F(3, 8)
    assert sol.cost == F(1, 8)


def test_opt_egalitarian_coincident():
    assert opt_egalitarian(inst([3, 3, 3], 1)).cost == 0


def test_even_window_interval_endpoints():
    # retained window (1, 2, 3, 4): optimum is the interval [2, 3]
    sol = opt_utilitarian(inst([1, 2, 3, 4], 0))
    assert sol.location == 2
    assert F(3) in sol.alternates


# -- brute force oracle ----------------------------------------------------------

def test_brute_force_examples():
    assert brute_force_opt(inst([0, F(1, 3), F(1, 2), F(2, 3), 1], 2), UTIL).cost == F(1, 3)
    assert brute_force_opt(inst([0, 0, F(1, 2), 1, 1], 2), EGAL).cost == F(1, 4)
    # z = n-1 serves a single agent: zero cost for any profile
    assert brute_force_opt(inst([0, 4, 9, 13], 3), UTIL).cost == 0
    assert brute_force_opt(inst([0, 4, 9, 13], 3), EGAL).cost == 0


def test_brute_force_size_guard():
    with pytest.raises(ValueError):
        brute_force_opt(inst(list(range(15)), 3), UTIL)
    with pytest.raises(ValueError):
        eval_oracle(inst(list(range(15)), 3), F(0), UTIL)


def test_eval_oracle_no_exclusion():
    profile = inst([1, 2, 7], 0)
    assert eval_oracle(profile, F(-3), UTIL) == 4 + 5 + 10
    assert eval_oracle(profile, F(-3), EGAL) == 10


# -- fast route vs oracle -----------------------------------------------------------

def _probe_points(instance, rng_values):
    values = instance.profile.sorted_values
    lo, hi = values[0], values[-1]
    probes = [lo - 1, hi + 1, (lo + hi) / 2] + list(values[:3])
    probes += [lo + (hi - lo) * q for q in rng_values]
    return probes


@settings(max_examples=60, deadline=None)
@given(st.lists(small_rationals, min_size=2, max_size=7), st.data())
def test_oracle_equivalence_property(values, data):
    n = len(values)
    z = data.draw(st.integers(0, n - 1))
    instance = inst(values, z)
    for objective in (UTIL, EGAL):
        fast = (opt_utilitarian if objective is UTIL else opt_egalitarian)(instance)
        brute = brute_force_opt(instance, objective)
        assert fast.cost == brute.cost
        assert fast.location == brute.location
        assert eval_cost(instance, fast.location, objective).cost == fast.cost
    qs = data.draw(st.lists(st.fractions(min_value=0, max_value=1, max_denominator=20),
                            min_size=2, max_size=4))
    for y in _probe_points(instance, qs):
        for objective in (UTIL, EGAL):
            assert eval_cost(instance, y, objective).cost == eval_oracle(instance, y, objective)


def test_oracle_equivalence_random_instances():
    for seed in range(30):
        instance = gen_random(3 + seed % 6, 1, "uniform", seed)
        for z in range(instance.n):
            trial = instance.with_z(z)
            for objective in (UTIL, EGAL):
                fast = (opt_utilitarian if objective is UTIL else opt_egalitarian)(trial)
                brute = brute_force_opt(trial, objective)
                assert fast.cost == brute.cost
                assert brute.contiguous


@settings(max_examples=40, deadline=None)
@given(st.lists(small_rationals, min_size=2, max_size=7), st.data())
def test_monotone_exclusion(values, data):
    n = len(values)
    z = data.draw(st.integers(1, n - 1))
    y = data.draw(small_rationals)
    for objective in (UTIL, EGAL):
        more = eval_cost(inst(values, z), y, objective).cost
        fewer = eval_cost(inst(values, z - 1), y, objective).cost
        assert more <= fewer


def test_candidate_set_size_and_membership():
    for seed in range(25):
        n = 4 + seed % 7
        instance = gen_random(n, 1 + seed % ((n - 1) // 2), "uniform", 100 + seed)
        for z in range(1, n - 1):
            trial = instance.with_z(z)
            candidates = candidate_order_statistics(n, z)
            expected = z if (n - z) % 2 == 0 else z + 1
            assert len(candidates) == expected
            sol = opt_utilitarian(trial)
            values = trial.profile.sorted_values
            candidate_values = {values[k - 1] for k in candidates}
            assert candidate_values & ({sol.location} | set(sol.alternates))


@settings(max_examples=40, deadline=None)
@given(st.lists(small_rationals, min_size=3, max_size=7),
       st.integers(0, 2),
       st.fractions(min_value=-5, max_value=5, max_denominator=30),
       st.fractions(min_value=F(1, 4), max_value=4, max_denominator=30))
def test_translation_and_scale_equivariance(values, z, shift, scale):
    z = min(z, len(values) - 1)
    base = inst(values, z)
    moved = inst([v * scale + shift for v in values], z)
    for objective in (UTIL, EGAL):
        a = (opt_utilitarian if objective is UTIL else opt_egalitarian)(base)
        b = (opt_utilitarian if objective is UTIL else opt_egalitarian)(moved)
        assert b.cost == a.cost * scale
        assert b.location == a.location * scale + shift
