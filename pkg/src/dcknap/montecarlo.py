"""Random instance generation and the seeded experiment runner.

Room capacities are drawn from one of three distributions (uniform integers
on [40, 120], Poisson with mean 65, or Binomial(480, 0.2), the latter two
resampled on a zero draw), and the demand of a realization is
floor(occupancy * total capacity).

Every random stream is derived from a single master seed with a stable
SHA-256 construction, so experiments are reproducible byte for byte no
matter how many workers execute them.
"""

from __future__ import annotations

import csv
import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .dctree import BALANCED, HEAD_LEFT, TREE_ALGORITHMS, build_tree
from .errors import InvalidParameterError, SplitInfeasibleError
from .metrics import AveragedSeries, EfficiencySeries, average_series, solve_tree
from .model import ProblemInstance, proctors_from_rate
from .rounding import as_fraction
from .solvers import SORT_KEYS, SortCriterion

DISTRIBUTIONS = ("uniform", "poisson", "binomial")

UNIFORM_LOW, UNIFORM_HIGH = 40, 120  # inclusive support
POISSON_MEAN = 65
BINOMIAL_TRIALS, BINOMIAL_P = 480, 0.2

_MAX_RESAMPLE_ATTEMPTS = 20

SWEEP_VARIABLES = ("o", "r", "s", "f")


def derive_seed(master_seed: int, *parts) -> int:
    """Stable 64-bit seed for one role of one realization.

    SHA-256 of "master:part:part:..." keeps streams independent and
    reproducible across platforms and releases.
    """
    text = ":".join([str(master_seed), *(str(p) for p in parts)])
    digest = hashlib.sha256(text.encode("ascii")).digest()
    return int.from_bytes(digest[:8], "big")


def sample_capacities(dist: str, n: int, seed: int) -> tuple[int, ...]:
    """Draw `n` positive room capacities from the named distribution."""
    if n < 1:
        raise InvalidParameterError("need at least one room")
    rng = np.random.default_rng(seed)
    if dist == "uniform":
        caps = rng.integers(UNIFORM_LOW, UNIFORM_HIGH + 1, size=n)
    elif dist == "poisson":
        caps = rng.poisson(POISSON_MEAN, size=n)
    elif dist == "binomial":
        caps = rng.binomial(BINOMIAL_TRIALS, BINOMIAL_P, size=n)
    else:
        raise InvalidParameterError(
            f"unknown distribution {dist!r}; expected one of {DISTRIBUTIONS}"
        )
    # A zero-capacity room would cost zero proctors; redraw until positive.
    while True:
        zero = caps == 0
        if not zero.any():
            break
        if dist == "poisson":
            caps[zero] = rng.poisson(POISSON_MEAN, size=int(zero.sum()))
        else:
            caps[zero] = rng.binomial(BINOMIAL_TRIALS, BINOMIAL_P, size=int(zero.sum()))
    return tuple(int(c) for c in caps)


def occupancy_demand(occupancy, total_capacity: int) -> int:
    """floor(occupancy * total_capacity), computed exactly."""
    o = as_fraction(occupancy)
    return (o.numerator * total_capacity) // o.denominator


@dataclass(frozen=True)
class Realization:
    """One sampled capacity vector with its derived demand."""

    capacities: tuple[int, ...]
    demand: int
    seed: int  # seed the capacities were drawn with


def make_realization(dist: str, n: int, occupancy, seed: int) -> Realization:
    o = as_fraction(occupancy)
    if not 0 < o <= 1:
        raise InvalidParameterError(f"occupancy must lie in (0, 1], got {o}")
    caps = sample_capacities(dist, n, seed)
    return Realization(caps, occupancy_demand(o, sum(caps)), seed)


def build_instance(realization: Realization, rate: int) -> ProblemInstance:
    return ProblemInstance(
        capacities=realization.capacities,
        proctors=proctors_from_rate(realization.capacities, rate),
        demand=realization.demand,
    )


@dataclass(frozen=True)
class ExperimentParams:
    """The full parameter tuple of one Monte Carlo experiment.

    Defaults are the standard setting: 512 rooms, occupancy 0.9, rate 54,
    specific-weight sorting, head fraction 0.5, minimum list size 4, and 50
    realizations.
    """

    n_rooms: int = 512
    dist: str = "uniform"
    occupancy: Fraction = Fraction(9, 10)
    rate: int = 54
    tree_alg: str = HEAD_LEFT
    sort: SortCriterion = SortCriterion("specific_weight")
    head_fraction: Fraction | None = Fraction(1, 2)
    min_size: int = 4
    rounding: str = "ceil"
    realizations: int = 50
    master_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "occupancy", as_fraction(self.occupancy))
        if self.head_fraction is not None:
            object.__setattr__(self, "head_fraction", as_fraction(self.head_fraction))
        if self.dist not in DISTRIBUTIONS:
            raise InvalidParameterError(
                f"unknown distribution {self.dist!r}; expected one of {DISTRIBUTIONS}"
            )
        if self.tree_alg not in TREE_ALGORITHMS:
            raise InvalidParameterError(
                f"unknown tree algorithm {self.tree_alg!r}; "
                f"expected one of {TREE_ALGORITHMS}"
            )
        if self.tree_alg == BALANCED and self.head_fraction is not None:
            raise InvalidParameterError(
                "the balanced tree has no head fraction; set head_fraction=None"
            )
        if self.tree_alg == HEAD_LEFT and self.head_fraction is None:
            raise InvalidParameterError("the head-left tree needs a head fraction")
        if not 0 < self.occupancy <= 1:
            raise InvalidParameterError(
                f"occupancy must lie in (0, 1], got {self.occupancy}"
            )
        if self.rate < 1:
            raise InvalidParameterError("rate must be >= 1")
        if self.realizations < 1:
            raise InvalidParameterError("need at least one realization")
        if self.n_rooms < 1:
            raise InvalidParameterError("need at least one room")


@dataclass(frozen=True)
class ExperimentResult:
    params: ExperimentParams
    average: AveragedSeries
    series: tuple[EfficiencySeries, ...]  # per realization, in index order
    resampled: int  # realizations redrawn after an infeasible split


def _realization_series(params: ExperimentParams, index: int) -> tuple[EfficiencySeries, int]:
    """Series for realization `index`, resampling on infeasible splits."""
    retries = 0
    last_error = None
    for attempt in range(_MAX_RESAMPLE_ATTEMPTS + 1):
        caps_seed = derive_seed(params.master_seed, index, attempt, "capacities")
        realization = make_realization(
            params.dist, params.n_rooms, params.occupancy, caps_seed
        )
        instance = build_instance(realization, params.rate)
        sort = params.sort
        if sort.key == "random" and sort.seed is None:
            sort = replace(sort, seed=derive_seed(params.master_seed, index, attempt, "sort"))
        try:
            tree = build_tree(
                instance,
                params.tree_alg,
                sort,
                fraction=params.head_fraction,
                min_size=params.min_size,
                rounding=params.rounding,
            )
        except SplitInfeasibleError as exc:
            retries += 1
            last_error = exc
            continue
        return solve_tree(tree), retries
    raise last_error


def run_experiment(params: ExperimentParams, workers: int = 1) -> ExperimentResult:
    """Run all realizations of one experiment and average the series.

    Output is a pure function of `params`: realizations are seeded by index,
    and the reduction always happens in index order, so the worker count
    never changes the result.
    """
    indices = range(params.realizations)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(lambda i: _realization_series(params, i), indices))
    else:
        outcomes = [_realization_series(params, i) for i in indices]
    series = tuple(s for s, _ in outcomes)
    resampled = sum(r for _, r in outcomes)
    return ExperimentResult(params, average_series(series), series, resampled)


def default_domain(variable: str, tree_alg: str = HEAD_LEFT):
    """The standard sweep domain of a strategy variable."""
    if variable == "o":
        return tuple(Fraction(k, 100) for k in range(50, 91, 5))
    if variable == "r":
        return (34, 44, 54, 64, 74)
    if variable == "s":
        return SORT_KEYS
    if variable == "f":
        if tree_alg == BALANCED:
            raise InvalidParameterError("the balanced tree has no head fraction")
        return tuple(Fraction(k, 100) for k in range(35, 66, 5))
    raise InvalidParameterError(
        f"unknown sweep variable {variable!r}; expected one of {SWEEP_VARIABLES}"
    )


def _with_value(params: ExperimentParams, variable: str, value) -> ExperimentParams:
    if variable == "o":
        return replace(params, occupancy=as_fraction(value))
    if variable == "r":
        return replace(params, rate=int(value))
    if variable == "s":
        key = value.key if isinstance(value, SortCriterion) else str(value)
        # A seedless random criterion gets a per-realization derived seed.
        return replace(params, sort=SortCriterion(key))
    if variable == "f":
        return replace(params, head_fraction=as_fraction(value))
    raise InvalidParameterError(f"unknown sweep variable {variable!r}")


def sweep(
    params: ExperimentParams, variable: str, domain=None, workers: int = 1
) -> dict:
    """One run_experiment per domain value, everything else held fixed.

    Realization seeds depend only on (master_seed, index), so every domain
    value sees the same sampled capacity vectors: differences in the output
    isolate the strategy effect.
    """
    if variable not in SWEEP_VARIABLES:
        raise InvalidParameterError(
            f"unknown sweep variable {variable!r}; expected one of {SWEEP_VARIABLES}"
        )
    if variable == "f" and params.tree_alg == BALANCED:
        raise InvalidParameterError("cannot sweep the head fraction of a balanced tree")
    if domain is None:
        domain = default_domain(variable, params.tree_alg)
    if not domain:
        raise InvalidParameterError("the sweep domain is empty")
    results = {}
    for value in domain:
        point = _with_value(params, variable, value)
        results[value] = run_experiment(point, workers=workers)
    return results


# ---------------------------------------------------------------------------
# Realization batches on disk: one row per room, one column per realization,
# trailing SUM and DEMAND rows.

def write_rooms_csv(stream, realizations, labels=None) -> None:
    if labels is None:
        labels = [f"realization_{k + 1}" for k in range(len(realizations))]
    n = len(realizations[0].capacities)
    if any(len(r.capacities) != n for r in realizations):
        raise InvalidParameterError("all realizations must have the same room count")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["room", *labels])
    for room in range(n):
        writer.writerow([room, *(r.capacities[room] for r in realizations)])
    writer.writerow(["SUM", *(sum(r.capacities) for r in realizations)])
    writer.writerow(["DEMAND", *(r.demand for r in realizations)])


def read_rooms_csv(stream) -> list[tuple[str, tuple[int, ...], int]]:
    """Parse a rooms CSV back into (label, capacities, demand) columns."""
    rows = list(csv.reader(stream))
    if not rows or not rows[0] or rows[0][0] != "room":
        raise InvalidParameterError("not a rooms CSV: missing 'room' header")
    labels = rows[0][1:]
    body = rows[1:]
    if len(body) < 3 or body[-2][:1] != ["SUM"] or body[-1][:1] != ["DEMAND"]:
        raise InvalidParameterError("rooms CSV must end with SUM and DEMAND rows")
    data_rows = body[:-2]
    columns = []
    for j, label in enumerate(labels):
        try:
            caps = tuple(int(row[j + 1]) for row in data_rows)
            declared_sum = int(body[-2][j + 1])
            demand = int(body[-1][j + 1])
        except (IndexError, ValueError) as exc:
            raise InvalidParameterError(
                f"column {label!r}: malformed cell ({exc})"
            ) from exc
        if declared_sum != sum(caps):
            raise InvalidParameterError(
                f"column {label!r}: SUM row says {declared_sum}, rooms add to {sum(caps)}"
            )
        columns.append((label, caps, demand))
    return columns
