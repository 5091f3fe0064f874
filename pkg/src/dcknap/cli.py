"""Command-line front end.

Subcommands:
  generate    sample realization batches into a rooms CSV
  solve       run the greedy / exact / relaxation solvers on one column
  tree        print a decomposition tree's vertex-membership table
  experiment  run a seeded experiment grid from a key=value config file

Exit codes: 0 success, 1 infeasible problem, 2 usage or config error,
3 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path

from .dctree import BALANCED, HEAD_LEFT, build_tree, to_dot
from .errors import (
    ConfigError,
    InfeasibleError,
    InvalidParameterError,
    SplitInfeasibleError,
)
from .metrics import (
    ALL_METRICS,
    EFFICIENCY_METRICS,
    critical_height,
    critical_height_mode,
    efficiency_array,
    l1_compare,
    metric_start_height,
)
from .model import ProblemInstance, proctors_from_rate
from .montecarlo import (
    ExperimentParams,
    derive_seed,
    make_realization,
    read_rooms_csv,
    run_experiment,
    sweep,
    write_rooms_csv,
)
from .rounding import as_fraction, format_2dec
from .solvers import SortCriterion, dp_solve, greedy_solve, lp_relax_solve

_SORT_CHOICES = ("proctors", "capacity", "specific-weight", "random")


def _sort_criterion(name: str, seed: int | None) -> SortCriterion:
    key = name.replace("-", "_")
    return SortCriterion(key, seed=seed if key == "random" else None)


def _value_label(value) -> str:
    if isinstance(value, Fraction):
        return format_2dec(value)
    return str(value)


# ---------------------------------------------------------------------------
# generate


def cmd_generate(args) -> int:
    realizations = [
        make_realization(
            args.dist,
            args.n,
            as_fraction(args.occupancy),
            derive_seed(args.seed, k, 0, "capacities"),
        )
        for k in range(args.count)
    ]
    with open(args.out, "w", newline="") as stream:
        write_rooms_csv(stream, realizations)
    print(f"wrote {args.count} realizations of {args.n} rooms to {args.out}")
    return 0


# ---------------------------------------------------------------------------
# solve


def _load_column(path, column):
    with open(path, newline="") as stream:
        columns = read_rooms_csv(stream)
    by_label = {label: (label, caps, demand) for label, caps, demand in columns}
    if column in by_label:
        return by_label[column]
    try:
        k = int(column)
    except ValueError:
        k = None
    if k is not None and 1 <= k <= len(columns):
        return columns[k - 1]
    raise InvalidParameterError(
        f"no column {column!r} in {path}; available: {[c[0] for c in columns]}"
    )


def _ids(instance, selection) -> str:
    return ",".join(str(instance.room_ids[i]) for i in selection.indices())


def cmd_solve(args) -> int:
    label, caps, demand = _load_column(args.file, args.column)
    instance = ProblemInstance(
        capacities=caps,
        proctors=proctors_from_rate(caps, args.rate),
        demand=demand,
    )
    print(
        f"column={label} rooms={instance.n_rooms} "
        f"total_capacity={instance.total_capacity} demand={demand} rate={args.rate}"
    )
    if args.solver in ("lp", "all"):
        relax = lp_relax_solve(instance)
        frac = (
            "none"
            if relax.fractional_index is None
            else str(instance.room_ids[relax.fractional_index])
        )
        support = ",".join(str(instance.room_ids[i]) for i in relax.support)
        print(f"LRS {format_2dec(relax.value)} support={support} fractional_room={frac}")
    if args.solver in ("dp", "all"):
        selection, value = dp_solve(instance)
        print(f"DPS {value} rooms={_ids(instance, selection)}")
    if args.solver in ("greedy", "all"):
        selection, value = greedy_solve(instance)
        print(f"GAS {value} rooms={_ids(instance, selection)}")
    return 0


# ---------------------------------------------------------------------------
# tree


def cmd_tree(args) -> int:
    label, caps, demand = _load_column(args.file, args.column)
    instance = ProblemInstance(
        capacities=caps,
        proctors=proctors_from_rate(caps, args.rate),
        demand=demand,
    )
    if args.tree == BALANCED and args.fraction is not None:
        raise InvalidParameterError("--fraction only applies to --tree hlT")
    if args.tree == HEAD_LEFT:
        fraction = as_fraction(args.fraction if args.fraction is not None else "0.5")
    else:
        fraction = None
    tree = build_tree(
        instance,
        args.tree,
        _sort_criterion(args.sort, args.sort_seed),
        fraction=fraction,
        min_size=args.min_size,
        rounding=args.rounding,
    )
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["room", *(f"vertex_{node.index}" for node in tree.nodes)])
    for position in tree.root.rooms:  # rows in root (sorted) order
        row = [instance.room_ids[position]]
        row.extend(1 if position in node.rooms else 0 for node in tree.nodes)
        writer.writerow(row)
    writer.writerow(["demand", *(node.demand for node in tree.nodes)])
    if args.dot_out:
        Path(args.dot_out).write_text(to_dot(tree))
        print(f"wrote DOT to {args.dot_out}", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# experiment

_CONFIG_KEYS = (
    "n_rooms",
    "dist",
    "occupancy",
    "rate",
    "tree_alg",
    "sort",
    "sort_seed",
    "head_fraction",
    "min_size",
    "rounding",
    "realizations",
    "master_seed",
    "sweep",
    "aggregation",
)


@dataclass(frozen=True)
class ExperimentConfig:
    params: ExperimentParams
    algorithms: tuple[str, ...]  # ("hlT",), ("blT",) or both
    sweep: str | None
    aggregation: str  # slope aggregation for critical heights


def parse_config(text: str) -> ExperimentConfig:
    """Flat key=value lines -> a validated experiment configuration."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        raw[key.strip()] = value.strip()
    unknown = sorted(set(raw) - set(_CONFIG_KEYS))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")

    tree_alg = raw.get("tree_alg", HEAD_LEFT)
    algorithms = (HEAD_LEFT, BALANCED) if tree_alg == "both" else (tree_alg,)
    head_fraction = raw.get("head_fraction")
    if head_fraction is not None and head_fraction.lower() == "none":
        head_fraction = None
    if BALANCED in algorithms and len(algorithms) == 1 and head_fraction is not None:
        raise ConfigError("tree_alg=blT takes no head_fraction")

    sort_seed = int(raw["sort_seed"]) if "sort_seed" in raw else None
    sort = _sort_criterion(raw.get("sort", "specific-weight"), sort_seed)

    kwargs = dict(tree_alg=algorithms[0], sort=sort)
    if algorithms[0] == HEAD_LEFT:
        kwargs["head_fraction"] = (
            as_fraction(head_fraction) if head_fraction is not None else Fraction(1, 2)
        )
    else:
        kwargs["head_fraction"] = None
    if "n_rooms" in raw:
        kwargs["n_rooms"] = int(raw["n_rooms"])
    if "dist" in raw:
        kwargs["dist"] = raw["dist"]
    if "occupancy" in raw:
        kwargs["occupancy"] = as_fraction(raw["occupancy"])
    if "rate" in raw:
        kwargs["rate"] = int(raw["rate"])
    if "min_size" in raw:
        kwargs["min_size"] = int(raw["min_size"])
    if "rounding" in raw:
        kwargs["rounding"] = raw["rounding"]
    if "realizations" in raw:
        kwargs["realizations"] = int(raw["realizations"])
    if "master_seed" in raw:
        kwargs["master_seed"] = int(raw["master_seed"])
    try:
        params = ExperimentParams(**kwargs)
    except InvalidParameterError as exc:
        raise ConfigError(str(exc)) from exc

    sweep_var = raw.get("sweep")
    if sweep_var is not None and sweep_var not in ("o", "r", "s", "f"):
        raise ConfigError(f"sweep must be one of o, r, s, f; got {sweep_var!r}")
    if sweep_var == "f" and algorithms != (HEAD_LEFT,):
        raise ConfigError("the head fraction can only be swept with tree_alg=hlT")
    aggregation = raw.get("aggregation", "mean")
    if aggregation not in ("mean", "max"):
        raise ConfigError(f"aggregation must be mean or max, got {aggregation!r}")
    return ExperimentConfig(params, algorithms, sweep_var, aggregation)


def _params_for(params: ExperimentParams, algorithm: str) -> ExperimentParams:
    if algorithm == params.tree_alg:
        return params
    if algorithm == BALANCED:
        return replace(params, tree_alg=BALANCED, head_fraction=None)
    return replace(params, tree_alg=HEAD_LEFT, head_fraction=Fraction(1, 2))


def _write_csv(path: Path, rows) -> None:
    with open(path, "w", newline="") as stream:
        csv.writer(stream, lineterminator="\n").writerows(rows)


def _average_rows(average):
    head = ["height", *ALL_METRICS]
    rows = [head]
    for h in range(average.height + 1):
        row = [h]
        for name in ALL_METRICS:
            start = metric_start_height(name)
            row.append("" if h < start else format_2dec(average.metric(name)[h - start]))
        rows.append(row)
    return rows


def _metric_table(results, name):
    """height x strategy-value table for one metric of a sweep.

    Tree heights can differ across the domain (head fractions away from 0.5
    deepen the tree); missing heights render as empty cells.
    """
    values = list(results)
    start = metric_start_height(name)
    top = max(results[v].average.height for v in values)
    rows = [["height", *(_value_label(v) for v in values)]]
    for h in range(start, top + 1):
        row = [h]
        for v in values:
            series = results[v].average.metric(name)
            row.append(format_2dec(series[h - start]) if h - start < len(series) else "")
        rows.append(row)
    return rows


def _critical_heights(results, aggregation="mean"):
    """Per-metric critical heights of a sweep, plus their mode.

    Columns are truncated to the smallest height shared by every swept
    value, so slopes stay comparable across the domain.
    """
    shared = min(result.average.height for result in results.values())
    heights = {}
    for name in EFFICIENCY_METRICS:
        start = metric_start_height(name)
        length = shared - start + 1
        columns = {v: results[v].average.metric(name)[:length] for v in results}
        try:
            position = critical_height(columns, aggregation)
        except InvalidParameterError:
            continue  # series too short to ever observe a doubling
        heights[name] = position + start
    mode = critical_height_mode(list(heights.values())) if heights else None
    return heights, mode


def _norms(results, h_tilde):
    """(all-metrics norm, exact-solution-only norm) per strategy value."""
    out = {}
    for v, result in results.items():
        h = min(h_tilde, result.average.height)
        all_block = efficiency_array(result.average, EFFICIENCY_METRICS, h)
        dps_block = efficiency_array(result.average, ["GbE_DPS"], h)
        norm_all = sum((abs(x) for row in all_block for x in row), Fraction(0))
        norm_dps = sum((abs(x) for row in dps_block for x in row), Fraction(0))
        out[v] = (norm_all, norm_dps)
    return out


def cmd_experiment(args) -> int:
    config = parse_config(Path(args.config).read_text())
    params, algorithms, sweep_var = config.params, config.algorithms, config.sweep
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    plot_rows = [["tree_alg", "strategy", "metric", "height", "value"]]
    per_alg = {}
    for algorithm in algorithms:
        alg_params = _params_for(params, algorithm)
        if sweep_var is None:
            result = run_experiment(alg_params, workers=args.workers)
            _write_csv(out_dir / f"average_{algorithm}.csv", _average_rows(result.average))
            results = {"-": result}
        else:
            results = sweep(alg_params, sweep_var, workers=args.workers)
            for name in ALL_METRICS:
                _write_csv(
                    out_dir / f"avg_{algorithm}_{name}.csv",
                    _metric_table(results, name),
                )
            heights, mode = _critical_heights(results, config.aggregation)
            rows = [["metric", "critical_height"]]
            rows += [[name, h] for name, h in heights.items()]
            rows.append(["mode", mode if mode is not None else ""])
            _write_csv(out_dir / f"critical_heights_{algorithm}.csv", rows)
            if mode is not None:
                norms = _norms(results, mode)
                rows = [["value", "norm_all", "norm_gbe_dps"]]
                rows += [
                    [_value_label(v), format_2dec(a), format_2dec(d)]
                    for v, (a, d) in norms.items()
                ]
                _write_csv(out_dir / f"l1_norms_{algorithm}.csv", rows)
            per_alg[algorithm] = (results, mode)
        for v, result in results.items():
            strategy = _value_label(v) if sweep_var else "-"
            for name in ALL_METRICS:
                start = metric_start_height(name)
                for h, value in enumerate(result.average.metric(name), start=start):
                    plot_rows.append([algorithm, strategy, name, h, format_2dec(value)])
        resampled = sum(r.resampled for r in results.values())
        if resampled:
            print(f"{algorithm}: resampled {resampled} realizations after infeasible splits")

    if sweep_var is not None and len(algorithms) == 2:
        modes = [per_alg[a][1] for a in algorithms]
        if all(m is not None for m in modes):
            h_tilde = min(modes)
            first, second = (per_alg[a][0] for a in algorithms)
            rows = [
                [
                    "value",
                    f"{algorithms[0]}_all",
                    f"{algorithms[1]}_all",
                    "winner_all",
                    f"{algorithms[0]}_gbe_dps",
                    f"{algorithms[1]}_gbe_dps",
                    "winner_gbe_dps",
                ]
            ]
            norms_a = _norms(first, h_tilde)
            norms_b = _norms(second, h_tilde)
            for v in first:
                if v not in norms_b:
                    continue
                cmp_all = l1_compare([norms_a[v][0]], [norms_b[v][0]], labels=algorithms)
                cmp_dps = l1_compare([norms_a[v][1]], [norms_b[v][1]], labels=algorithms)
                rows.append(
                    [
                        _value_label(v),
                        format_2dec(cmp_all.norm_a),
                        format_2dec(cmp_all.norm_b),
                        cmp_all.winner,
                        format_2dec(cmp_dps.norm_a),
                        format_2dec(cmp_dps.norm_b),
                        cmp_dps.winner,
                    ]
                )
            _write_csv(out_dir / "l1_comparison.csv", rows)

    _write_csv(out_dir / "plot_data.csv", plot_rows)
    print(f"experiment outputs written to {out_dir}")
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dcknap",
        description="Divide-and-conquer toolkit for the min-proctor covering knapsack",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample realization batches into a rooms CSV")
    p.add_argument("--n", type=int, default=8, help="rooms per realization")
    p.add_argument("--dist", choices=("uniform", "poisson", "binomial"), default="uniform")
    p.add_argument("--occupancy", default="0.9", help="demand as a fraction of capacity")
    p.add_argument("--count", type=int, default=1, help="number of realizations")
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", help="solve one column of a rooms CSV")
    p.add_argument("file", help="rooms CSV")
    p.add_argument("--column", default="1", help="column label or 1-based index")
    p.add_argument("--rate", type=int, default=54, help="students per proctor")
    p.add_argument("--solver", choices=("greedy", "dp", "lp", "all"), default="all")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("tree", help="print a decomposition tree's membership table")
    p.add_argument("file", help="rooms CSV")
    p.add_argument("--column", default="1")
    p.add_argument("--rate", type=int, default=54)
    p.add_argument("--tree", choices=(HEAD_LEFT, BALANCED), default=HEAD_LEFT)
    p.add_argument("--sort", choices=_SORT_CHOICES, default="specific-weight")
    p.add_argument("--sort-seed", type=int, default=0)
    p.add_argument("--fraction", default=None, help="head fraction (hlT only, default 0.5)")
    p.add_argument("--min-size", type=int, default=2)
    p.add_argument("--rounding", choices=("ceil", "floor"), default="ceil")
    p.add_argument("--dot-out", default=None, help="also write a Graphviz DOT file")
    p.set_defaults(func=cmd_tree)

    p = sub.add_parser("experiment", help="run an experiment grid from a config file")
    p.add_argument("config", help="flat key=value config file")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_experiment)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InfeasibleError, SplitInfeasibleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ConfigError, InvalidParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
