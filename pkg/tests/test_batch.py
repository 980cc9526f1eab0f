"""Pin the integer batch kernels against the exact per-instance path."""
from fractions import Fraction as F

import numpy as np

from outlierfl import _batch
from outlierfl.core import Instance, ObjectiveKind
from outlierfl.objectives import eval_cost, opt_egalitarian, opt_utilitarian

UTIL = ObjectiveKind.UTILITARIAN
EGAL = ObjectiveKind.EGALITARIAN

SCALE = _batch.SCALE


def _exact_instances(X, z):
    return [Instance(tuple(F(int(v), SCALE) for v in row), z) for row in X]


def test_batch_opt_and_eval_match_exact():
    rng = np.random.default_rng(99)
    for n, z in ((5, 2), (8, 3), (9, 4), (6, 1)):
        X = rng.integers(0, SCALE + 1, size=(40, n)).astype(np.int64)
        X.sort(axis=1)
        P = _batch.prefix_sums(X)
        cost_u, loc_u = _batch.batch_opt_util(X, P, z)
        cost_e2, loc_e2 = _batch.batch_opt_egal2(X, z)
        ys = rng.integers(-SCALE, 2 * SCALE, size=X.shape[0]).astype(np.int64)
        ev_u = _batch.batch_eval_util(X, P, z, ys)
        ev_e2 = _batch.batch_eval_egal2(X, z, ys)
        for j, inst in enumerate(_exact_instances(X, z)):
            exact_u = opt_utilitarian(inst)
            assert F(int(cost_u[j]), SCALE) == exact_u.cost
            assert F(int(loc_u[j]), SCALE) == exact_u.location
            exact_e = opt_egalitarian(inst)
            assert F(int(cost_e2[j]), 2 * SCALE) == exact_e.cost
            assert F(int(loc_e2[j]), 2 * SCALE) == exact_e.location
            y = F(int(ys[j]), SCALE)
            assert F(int(ev_u[j]), SCALE) == eval_cost(inst, y, UTIL).cost
            assert F(int(ev_e2[j]), 2 * SCALE) == eval_cost(inst, y, EGAL).cost


def test_merged_kth_matches_sorted_insertion():
    rng = np.random.default_rng(7)
    rest = rng.integers(0, 100, size=(30, 6)).astype(np.int64)
    rest.sort(axis=1)
    xp = rng.integers(-20, 120, size=(30, 9)).astype(np.int64)
    for k in range(1, 8):
        got = _batch.merged_kth(rest, xp, k)
        for i in range(rest.shape[0]):
            for j in range(xp.shape[1]):
                merged = sorted(list(rest[i]) + [xp[i, j]])
                assert got[i, j] == merged[k - 1]


def test_deviation_grid_is_exact_at_scale18():
    # midpoints and ninth-steps must divide exactly at the x18 scale
    X = np.array([[0, 5, 11, 11, 29]], dtype=np.int64)
    X18 = X * _batch.GRID_MULT
    grid = _batch.deviation_grid(X18)
    assert ((X18[:, :-1] + X18[:, 1:]) % 2 == 0).all()
    assert ((X18[:, 1:] - X18[:, :-1]) % 9 == 0).all()
    for col in X18[0]:
        assert col in grid[0]
    # two points beyond each extreme
    D = max(X18[0, -1] - X18[0, 0], _batch.GRID_MULT * SCALE)
    for point in (X18[0, 0] - 2 * D, X18[0, 0] - D, X18[0, -1] + D, X18[0, -1] + 2 * D):
        assert point in grid[0]
