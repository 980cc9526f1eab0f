"""Command line front end.

Subcommands: solve, run, verify-sp, sweep, bounds, reproduce.
Exit codes: 0 success, 1 bound/strategyproofness assertion failure,
2 invalid input.  Machine output renders rationals as "p/q" strings;
--decimal switches the human-facing rendering to fixed point.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import reports
from .core import (
    Instance,
    InvalidInstance,
    ObjectiveKind,
    format_rational,
    parse_instance,
    parse_rational,
)
from .generators import family_names, gen_family
from .mechanisms import MechanismSpec, RandomizedOutcome, in_range
from .objectives import eval_cost, opt_utilitarian, optimal_solution
from .predictions import delta_c, delta_r, f_delta, f_rand, f_robust, f_util, gamma_max
from .verification import check_sp_deterministic, measure_ratio, sp_scan, sweep

EXIT_OK = 0
EXIT_ASSERTION = 1
EXIT_INVALID = 2


def _load_instance(args) -> Instance:
    text = Path(args.instance).read_text()
    instance = parse_instance(text)
    if getattr(args, "z_override", None) is not None:
        instance = instance.with_z(args.z_override)
    if getattr(args, "prediction", None) is not None:
        instance = instance.with_prediction(parse_rational(args.prediction))
    return instance


def _objective(args, instance=None) -> ObjectiveKind:
    if args.objective is not None:
        return ObjectiveKind.from_str(args.objective)
    if instance is not None and instance.objective is not None:
        return instance.objective
    return ObjectiveKind.UTILITARIAN


def _mechanism(args) -> MechanismSpec:
    text = args.mech.strip()
    if text.startswith("{"):
        return MechanismSpec.from_tag(json.loads(text))
    name, _, arg = text.partition(":")
    if name == "kth":
        return MechanismSpec("kth", k=int(arg))
    if name == "oracle":
        return MechanismSpec("oracle", objective=ObjectiveKind.from_str(arg or "utilitarian"))
    if name == "in_range":
        return MechanismSpec("in_range", gamma=args.gamma)
    return MechanismSpec(name)


def _emit(payload, args):
    decimal = getattr(args, "decimal", False)
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            reports.dump_json(payload, fh, decimal=decimal)
    else:
        reports.dump_json(payload, sys.stdout, decimal=decimal)


def cmd_solve(args) -> int:
    instance = _load_instance(args)
    objective = _objective(args, instance)
    solution = optimal_solution(instance, objective)
    _emit({
        "objective": objective.value,
        "location": solution.location,
        "cost": solution.cost,
        "window": list(solution.window),
        "alternates": list(solution.alternates),
    }, args)
    return EXIT_OK


def cmd_run(args) -> int:
    instance = _load_instance(args)
    spec = _mechanism(args)
    outcome = spec.apply(instance, instance.prediction)
    payload = {"mechanism": spec.label()}
    if isinstance(outcome, RandomizedOutcome):
        payload["support"] = [[loc, p] for loc, p in outcome.support]
    else:
        payload["location"] = outcome
    _emit(payload, args)
    return EXIT_OK


def cmd_verify_sp(args) -> int:
    spec = _mechanism(args)
    if args.instance:
        instance = _load_instance(args)
        certificate = check_sp_deterministic(spec, instance)
        checked = instance.n
        certificates = [certificate] if certificate else []
    else:
        if args.n is None or args.z is None:
            print("verify-sp needs --instance or both --n and --z", file=sys.stderr)
            return EXIT_INVALID
        checked, certificates = sp_scan(
            spec, args.n, args.z, args.count, base_seed=args.seed,
            prediction_slots=args.prediction_slots,
        )
    payload = {
        "mechanism": spec.label(),
        "scenarios_checked": checked,
        "violations": [
            {
                "agent_index": c.agent_index,
                "true_point": c.true_point,
                "deviation": c.deviation,
                "outcome_truthful": c.outcome_truthful,
                "outcome_deviated": c.outcome_deviated,
                "cost_truthful": c.cost_truthful,
                "cost_deviated": c.cost_deviated,
            }
            for c in certificates
        ],
    }
    _emit(payload, args)
    return EXIT_ASSERTION if certificates else EXIT_OK


def cmd_sweep(args) -> int:
    spec = _mechanism(args)
    objective = ObjectiveKind.from_str(args.objective or "utilitarian")
    if args.n is None or args.z is None:
        print("sweep needs --n and --z", file=sys.stderr)
        return EXIT_INVALID
    prediction_mode = args.prediction
    if prediction_mode not in (None, "perfect", "adversarial", "random"):
        prediction_mode = parse_rational(prediction_mode)
    result = sweep(
        spec, objective, args.n, args.z, args.count,
        model=args.family, base_seed=args.seed, workers=args.workers,
        prediction_mode=prediction_mode,
    )
    if args.format == "json":
        payload = {
            "max_ratio": result.max_ratio,
            "argmax_seed": result.max_row.seed,
            "bound": result.max_row.bound,
            "all_within_bound": result.all_within,
        }
        _emit(payload, args)
    else:
        if args.out:
            with open(args.out, "w", newline="") as fh:
                reports.sweep_rows_to_csv(result.rows, fh, decimal=args.decimal)
            reports.render_sweep_figure(result.rows, args.out)
        else:
            reports.sweep_rows_to_csv(result.rows, sys.stdout, decimal=args.decimal)
    return EXIT_OK if result.all_within else EXIT_ASSERTION


def cmd_bounds(args) -> int:
    table = {}
    for n in args.n_values:
        for z in args.z_values:
            if not (n >= 3 and 1 <= z <= (n - 1) // 2):
                continue
            entry = {"f_util": f_util(n, z), "egalitarian": Fraction(2),
                     "gamma_max": gamma_max(n, z)}
            if n % 2 == 0:
                entry["f_rand"] = f_rand(n, z)
            if n >= 3 * z:
                entry["f_robust"] = f_robust(n, z)
            else:
                entry["delta_c"] = delta_c(n, z)
                entry["delta_r"] = delta_r(n, z)
                entry["f_delta_consistency"] = f_delta(n, z, delta_c(n, z))
                entry["f_delta_robustness"] = f_delta(n, z, delta_r(n, z))
            table[f"{n},{z}"] = entry
    _emit(table, args)
    return EXIT_OK


def _reproduce_figure1(args) -> int:
    spec = MechanismSpec("left_median")
    rows = []
    exact = True
    for n in (8, 12, 16, 20):
        for z in range(1, (n - 1) // 2 + 1):
            f = f_util(n, z)
            instance = gen_family("fig6_x2", n=n, z=z, d=1)
            attained = measure_ratio(spec, instance, ObjectiveKind.UTILITARIAN).ratio
            match = attained == f
            exact = exact and match
            rows.append({"n": n, "z": z, "f": f, "attained": attained, "exact_match": match})
    if args.out:
        with open(args.out, "w", newline="") as fh:
            reports.frontier_rows_to_csv(rows, fh, decimal=args.decimal)
        reports.render_frontier_figure(rows, args.out)
    else:
        reports.frontier_rows_to_csv(rows, sys.stdout, decimal=args.decimal)
    return EXIT_OK if exact else EXIT_ASSERTION


TABLE1_COLUMNS = (
    "n", "z", "util_det_ub", "util_det_lb", "util_rand_ub", "util_rand_lb",
    "egal_det_ub", "egal_det_lb", "egal_rand_ub", "egal_rand_lb",
)


def _reproduce_table1(args) -> int:
    rows = []
    for n in (3, 4, 5, 6, 7, 8, 9, 10, 12, 16, 20):
        for z in range(1, (n - 1) // 2 + 1):
            f = f_util(n, z)
            row = {
                "n": n, "z": z,
                "util_det_ub": f, "util_det_lb": f,
                "util_rand_ub": f_rand(n, z) if n % 2 == 0 else "",
                "util_rand_lb": "",
                "egal_det_ub": Fraction(2), "egal_det_lb": Fraction(2),
                "egal_rand_ub": Fraction(2), "egal_rand_lb": "",
            }
            if (n, z) == (4, 1):
                row["util_rand_lb"] = Fraction(3, 2)
            if (n, z) == (5, 2):
                row["util_rand_lb"] = Fraction(2)
            if (n, z) == (3, 1):
                row["egal_rand_lb"] = Fraction(2)
            rows.append(row)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            reports.table_rows_to_csv(rows, TABLE1_COLUMNS, fh, decimal=args.decimal)
    else:
        reports.table_rows_to_csv(rows, TABLE1_COLUMNS, sys.stdout, decimal=args.decimal)
    return EXIT_OK


def _reproduce_example(args) -> int:
    instance = gen_family("fig10")
    opt = opt_utilitarian(instance)
    prediction_cost = eval_cost(instance, instance.prediction, ObjectiveKind.UTILITARIAN).cost
    outcome = in_range(instance, instance.prediction, gamma=0)
    mechanism_cost = eval_cost(instance, outcome, ObjectiveKind.UTILITARIAN).cost
    triple = [opt.cost, prediction_cost, mechanism_cost]
    expected = [Fraction(1), Fraction(14, 5), Fraction(37, 10)]
    text = json.dumps([format_rational(v, decimal=args.decimal) for v in triple])
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return EXIT_OK if triple == expected else EXIT_ASSERTION


def cmd_reproduce(args) -> int:
    target = args.target
    if target == "figure1":
        return _reproduce_figure1(args)
    if target == "table1":
        return _reproduce_table1(args)
    return _reproduce_example(args)


def _int_list(text: str):
    return [int(v) for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="outlierfl",
        description="Facility location on the line with z outliers: solvers, "
                    "mechanisms, bounds, and a verification harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, mech=False):
        p.add_argument("--objective", choices=["utilitarian", "egalitarian"])
        p.add_argument("--decimal", action="store_true",
                       help="render rationals as fixed-point decimals")
        p.add_argument("--out", help="write output to this file")
        if mech:
            p.add_argument("--mech", required=True,
                           help="left_z | left_median | kth:K | rand_median | "
                                "in_range | oracle:OBJ | JSON tag")
            p.add_argument("--gamma", type=int, default=0)

    p_solve = sub.add_parser("solve", help="exact optimal location and cost")
    p_solve.add_argument("--instance", required=True)
    p_solve.add_argument("--z-override", type=int, dest="z_override")
    p_solve.add_argument("--prediction")
    common(p_solve)
    p_solve.set_defaults(func=cmd_solve)

    p_run = sub.add_parser("run", help="run one mechanism on an instance")
    p_run.add_argument("--instance", required=True)
    p_run.add_argument("--z-override", type=int, dest="z_override")
    p_run.add_argument("--prediction")
    common(p_run, mech=True)
    p_run.set_defaults(func=cmd_run)

    p_sp = sub.add_parser("verify-sp", help="scan for strategyproofness violations")
    p_sp.add_argument("--instance")
    p_sp.add_argument("--z-override", type=int, dest="z_override")
    p_sp.add_argument("--prediction")
    p_sp.add_argument("--n", type=int)
    p_sp.add_argument("--z", type=int)
    p_sp.add_argument("--count", type=int, default=1000)
    p_sp.add_argument("--seed", type=int, default=0)
    p_sp.add_argument("--prediction-slots", type=int, default=0, dest="prediction_slots")
    common(p_sp, mech=True)
    p_sp.set_defaults(func=cmd_verify_sp)

    p_sweep = sub.add_parser("sweep", help="ratio sweep over seeded instances")
    p_sweep.add_argument("--n", type=int)
    p_sweep.add_argument("--z", type=int)
    p_sweep.add_argument("--count", type=int, default=1000)
    p_sweep.add_argument("--seed", type=int, default=0)
    p_sweep.add_argument("--workers", type=int, default=1)
    p_sweep.add_argument("--family", default="uniform",
                         help="uniform | clustered (instance model)")
    p_sweep.add_argument("--prediction",
                         help="perfect | adversarial | random | fixed rational")
    p_sweep.add_argument("--format", choices=["json", "csv"], default="csv")
    common(p_sweep, mech=True)
    p_sweep.set_defaults(func=cmd_sweep)

    p_bounds = sub.add_parser("bounds", help="closed-form guarantee table")
    p_bounds.add_argument("--n", type=_int_list, default=[8, 12, 16, 20], dest="n_values")
    p_bounds.add_argument("--z", type=_int_list, default=list(range(1, 10)), dest="z_values")
    common(p_bounds)
    p_bounds.set_defaults(func=cmd_bounds)

    p_repro = sub.add_parser("reproduce", help="recompute published artifacts")
    p_repro.add_argument("target", choices=["figure1", "table1", "example-5-2-2"])
    common(p_repro)
    p_repro.set_defaults(func=cmd_reproduce)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InvalidInstance, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
