"""Per-height efficiency of a decomposition tree, and the statistics used to
compare generation strategies: critical heights, the mode rule, and l1-norm
scoreboards.

For a solved tree, soln_X(h) is the sum of solver value X over the leaves of
the tree pruned at height h.  Growth is reported in percent:

    GbE_X(h) = 100 * (soln_X(h) - soln_X(0)) / soln_X(0)
    SwE_X(h) = 100 * (soln_X(h) - soln_X(h-1)) / soln_X(h-1)   for h >= 1

and the bound gaps at each height are

    GAE(h) = 100 * (GAS(h) - DPS(h)) / DPS(h)
    LRE(h) = 100 * (DPS(h) - LRS(h)) / DPS(h)

Everything is exact rational arithmetic; rendering rounds half-up to two
decimals only at the edge.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .dctree import DCTree, prune
from .errors import InvalidParameterError
from .rounding import as_fraction
from .solvers import solve_triple

#: Quality metrics aggregated when strategies are compared.
EFFICIENCY_METRICS = (
    "GAE",
    "LRE",
    "GbE_LRS",
    "GbE_DPS",
    "GbE_GAS",
    "SwE_LRS",
    "SwE_DPS",
    "SwE_GAS",
)

SOLUTION_METRICS = ("LRS", "DPS", "GAS")

ALL_METRICS = SOLUTION_METRICS + (
    "GbE_LRS",
    "GbE_DPS",
    "GbE_GAS",
    "SwE_LRS",
    "SwE_DPS",
    "SwE_GAS",
    "GAE",
    "LRE",
)

_METRIC_FIELDS = frozenset(name.lower() for name in ALL_METRICS)


def metric_start_height(name: str) -> int:
    """First height a metric is defined at (stepwise metrics start at 1)."""
    return 1 if name.startswith("SwE") else 0


def _pct(numerator, denominator) -> Fraction:
    if denominator == 0:
        return Fraction(0)
    return 100 * Fraction(numerator) / Fraction(denominator)


@dataclass(frozen=True)
class EfficiencySeries:
    """Per-height solution sums and efficiencies of one solved tree.

    The soln/GbE/GAE/LRE tuples are indexed by height 0..H; the SwE tuples
    cover heights 1..H (index h-1).
    """

    lrs: tuple[Fraction, ...]
    dps: tuple[int, ...]
    gas: tuple[int, ...]
    gbe_lrs: tuple[Fraction, ...]
    gbe_dps: tuple[Fraction, ...]
    gbe_gas: tuple[Fraction, ...]
    swe_lrs: tuple[Fraction, ...]
    swe_dps: tuple[Fraction, ...]
    swe_gas: tuple[Fraction, ...]
    gae: tuple[Fraction, ...]
    lre: tuple[Fraction, ...]

    @property
    def height(self) -> int:
        return len(self.dps) - 1

    def metric(self, name: str) -> tuple:
        field = name.lower()
        if field not in _METRIC_FIELDS:
            raise InvalidParameterError(f"unknown metric {name!r}")
        return getattr(self, field)


@dataclass(frozen=True)
class AveragedSeries:
    """Field-wise arithmetic mean of several EfficiencySeries."""

    lrs: tuple[Fraction, ...]
    dps: tuple[Fraction, ...]
    gas: tuple[Fraction, ...]
    gbe_lrs: tuple[Fraction, ...]
    gbe_dps: tuple[Fraction, ...]
    gbe_gas: tuple[Fraction, ...]
    swe_lrs: tuple[Fraction, ...]
    swe_dps: tuple[Fraction, ...]
    swe_gas: tuple[Fraction, ...]
    gae: tuple[Fraction, ...]
    lre: tuple[Fraction, ...]
    realization_count: int = 1

    @property
    def height(self) -> int:
        return len(self.dps) - 1

    def metric(self, name: str) -> tuple:
        field = name.lower()
        if field not in _METRIC_FIELDS:
            raise InvalidParameterError(f"unknown metric {name!r}")
        return getattr(self, field)


def solve_tree(tree: DCTree) -> EfficiencySeries:
    """Solve every node of the tree and compute the per-height series."""
    for node in tree.nodes:
        if node.triple is None:
            node.triple = solve_triple(tree.subinstance(node))

    heights = range(tree.height + 1)
    lrs, dps, gas = [], [], []
    for h in heights:
        leaves = prune(tree, h)
        lrs.append(sum((leaf.triple.lrs for leaf in leaves), Fraction(0)))
        dps.append(sum(leaf.triple.dps for leaf in leaves))
        gas.append(sum(leaf.triple.gas for leaf in leaves))

    def gbe(series):
        return tuple(_pct(series[h] - series[0], series[0]) for h in heights)

    def swe(series):
        return tuple(
            _pct(series[h] - series[h - 1], series[h - 1])
            for h in heights
            if h >= 1
        )

    return EfficiencySeries(
        lrs=tuple(lrs),
        dps=tuple(dps),
        gas=tuple(gas),
        gbe_lrs=gbe(lrs),
        gbe_dps=gbe(dps),
        gbe_gas=gbe(gas),
        swe_lrs=swe(lrs),
        swe_dps=swe(dps),
        swe_gas=swe(gas),
        gae=tuple(_pct(gas[h] - dps[h], dps[h]) for h in heights),
        lre=tuple(_pct(dps[h] - lrs[h], dps[h]) for h in heights),
    )


def average_series(series: Sequence[EfficiencySeries]) -> AveragedSeries:
    """Arithmetic mean per metric per height, in input order, exactly."""
    if not series:
        raise InvalidParameterError("cannot average an empty list of series")
    height = series[0].height
    if any(s.height != height for s in series):
        raise InvalidParameterError("all series must share the same height")
    k = len(series)

    def mean_field(name):
        columns = [s.metric(name) for s in series]
        return tuple(
            sum((as_fraction(col[i]) for col in columns), Fraction(0)) / k
            for i in range(len(columns[0]))
        )

    return AveragedSeries(
        lrs=mean_field("lrs"),
        dps=mean_field("dps"),
        gas=mean_field("gas"),
        gbe_lrs=mean_field("gbe_lrs"),
        gbe_dps=mean_field("gbe_dps"),
        gbe_gas=mean_field("gbe_gas"),
        swe_lrs=mean_field("swe_lrs"),
        swe_dps=mean_field("swe_dps"),
        swe_gas=mean_field("swe_gas"),
        gae=mean_field("gae"),
        lre=mean_field("lre"),
        realization_count=k,
    )


def critical_height(
    columns: Mapping[object, Sequence] | Sequence[Sequence],
    aggregation: str = "mean",
) -> int:
    """Position at which the aggregated per-step growth first more than doubles.

    `columns` maps each strategy value to its per-height series (all the same
    length, positions 0..H).  The step at position h is the aggregate over
    strategy values of value(h) - value(h-1); the returned position is the
    first h >= 2 with step(h) > 2 * step(h-1), or H when growth never
    doubles.  Beyond that point the decomposition is considered degraded.
    """
    if aggregation not in ("mean", "max"):
        raise InvalidParameterError("aggregation must be 'mean' or 'max'")
    if isinstance(columns, Mapping):
        series = [list(v) for v in columns.values()]
    else:
        series = [list(v) for v in columns]
    if not series:
        raise InvalidParameterError("no series given")
    length = len(series[0])
    if any(len(s) != length for s in series):
        raise InvalidParameterError("all series must have the same length")
    top = length - 1
    if top < 2:
        raise InvalidParameterError("series must cover at least positions 0..2")

    slopes = []
    for h in range(1, length):
        steps = [as_fraction(s[h]) - as_fraction(s[h - 1]) for s in series]
        if aggregation == "mean":
            slopes.append(sum(steps, Fraction(0)) / len(steps))
        else:
            slopes.append(max(steps))
    # slopes[k] is the step into position k+1
    for h in range(2, top + 1):
        if slopes[h - 1] > 2 * slopes[h - 2]:
            return h
    return top


def critical_height_mode(heights: Sequence[int]) -> int:
    """Statistical mode of a list of critical heights; ties pick the smaller."""
    if not heights:
        raise InvalidParameterError("cannot take the mode of an empty list")
    counts = Counter(heights)
    best = max(counts.values())
    return min(h for h, c in counts.items() if c == best)


@dataclass(frozen=True)
class L1Comparison:
    norm_a: Fraction
    norm_b: Fraction
    winner: str  # label of the smaller norm, or "tie"


def _flatten(values):
    flat = []
    if isinstance(values, Mapping):
        values = [values[k] for k in values]
    for entry in values:
        if isinstance(entry, (list, tuple)):
            flat.append([as_fraction(v) for v in entry])
        else:
            flat.append([as_fraction(entry)])
    return flat


def l1_compare(values_a, values_b, labels=("a", "b")) -> L1Comparison:
    """Sum of absolute entries of two same-shaped arrays; smaller norm wins."""
    flat_a = _flatten(values_a)
    flat_b = _flatten(values_b)
    if [len(row) for row in flat_a] != [len(row) for row in flat_b]:
        raise InvalidParameterError("the two arrays must have identical shape")
    norm_a = sum((abs(v) for row in flat_a for v in row), Fraction(0))
    norm_b = sum((abs(v) for row in flat_b for v in row), Fraction(0))
    if norm_a < norm_b:
        winner = labels[0]
    elif norm_b < norm_a:
        winner = labels[1]
    else:
        winner = "tie"
    return L1Comparison(norm_a, norm_b, winner)


def efficiency_array(
    series: AveragedSeries | EfficiencySeries,
    metric_names: Sequence[str],
    h_tilde: int,
) -> list[list[Fraction]]:
    """The (metric x height) block over heights 1..h_tilde, ready for l1_compare."""
    if h_tilde < 1 or h_tilde > series.height:
        raise InvalidParameterError(
            f"h_tilde {h_tilde} outside the series range [1, {series.height}]"
        )
    rows = []
    for name in metric_names:
        values = series.metric(name)
        start = metric_start_height(name)
        rows.append([as_fraction(values[h - start]) for h in range(1, h_tilde + 1)])
    return rows
