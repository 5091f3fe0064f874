"""Core problem data: rooms with capacities and proctor costs, a student
demand, and the complement transform to a standard 0/1 knapsack.

The covering problem asks for a cheapest set of rooms whose joint capacity
meets the demand:

    minimize    sum(proctors[i] * x[i])
    subject to  sum(capacities[i] * x[i]) >= demand,   x[i] in {0, 1}
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InfeasibleError, InvalidParameterError

# Keeps demand * capacity intermediates comfortably inside 64 bits.
MAX_TOTAL_CAPACITY = 2**31


@dataclass(frozen=True)
class ProblemInstance:
    """One covering-knapsack instance.

    Room identity is the stable `room_ids` label (defaults to the original
    position); solvers never re-identify rooms after sorting.
    """

    capacities: tuple[int, ...]  # students per room, all >= 1
    proctors: tuple[int, ...]  # cost per room, all >= 1
    demand: int  # students to place, >= 0
    room_ids: tuple = None  # opaque labels aligned with capacities

    def __post_init__(self):
        object.__setattr__(self, "capacities", tuple(int(c) for c in self.capacities))
        object.__setattr__(self, "proctors", tuple(int(p) for p in self.proctors))
        object.__setattr__(self, "demand", int(self.demand))
        if self.room_ids is None:
            object.__setattr__(self, "room_ids", tuple(range(len(self.capacities))))
        else:
            object.__setattr__(self, "room_ids", tuple(self.room_ids))
        n = len(self.capacities)
        if n < 1:
            raise InvalidParameterError("an instance needs at least one room")
        if len(self.proctors) != n or len(self.room_ids) != n:
            raise InvalidParameterError(
                "capacities, proctors and room_ids must have equal length"
            )
        if any(c < 1 for c in self.capacities):
            raise InvalidParameterError("all capacities must be >= 1")
        if any(p < 1 for p in self.proctors):
            raise InvalidParameterError("all proctor counts must be >= 1")
        if self.demand < 0:
            raise InvalidParameterError("demand must be >= 0")
        if sum(self.capacities) > MAX_TOTAL_CAPACITY:
            raise InvalidParameterError(
                f"total capacity exceeds the supported limit {MAX_TOTAL_CAPACITY}"
            )

    @property
    def n_rooms(self) -> int:
        return len(self.capacities)

    @property
    def total_capacity(self) -> int:
        return sum(self.capacities)

    @property
    def total_proctors(self) -> int:
        return sum(self.proctors)

    def is_feasible(self) -> bool:
        return self.total_capacity >= self.demand

    def require_feasible(self):
        if not self.is_feasible():
            raise InfeasibleError(self.demand, self.total_capacity)


@dataclass(frozen=True)
class Selection:
    """A 0/1 choice of rooms, aligned with an instance's room order."""

    chosen: tuple[bool, ...]

    def __post_init__(self):
        object.__setattr__(self, "chosen", tuple(bool(b) for b in self.chosen))

    @classmethod
    def zeros(cls, n: int) -> "Selection":
        return cls((False,) * n)

    @classmethod
    def from_indices(cls, indices, n: int) -> "Selection":
        taken = set(indices)
        return cls(tuple(i in taken for i in range(n)))

    def __len__(self) -> int:
        return len(self.chosen)

    def indices(self) -> tuple[int, ...]:
        return tuple(i for i, b in enumerate(self.chosen) if b)

    def value(self, instance: ProblemInstance) -> int:
        """Total proctor cost of the chosen rooms."""
        return sum(p for p, b in zip(instance.proctors, self.chosen) if b)

    def load(self, instance: ProblemInstance) -> int:
        """Total capacity of the chosen rooms."""
        return sum(c for c, b in zip(instance.capacities, self.chosen) if b)

    def complement(self) -> "Selection":
        return Selection(tuple(not b for b in self.chosen))

    def is_feasible(self, instance: ProblemInstance) -> bool:
        return self.load(instance) >= instance.demand


def proctors_from_rate(capacities, rate: int) -> tuple[int, ...]:
    """Proctor cost per room when one proctor supervises up to `rate` students.

    Each room needs ceil(capacity / rate) proctors.
    """
    rate = int(rate)
    if rate < 1:
        raise InvalidParameterError(f"rate must be >= 1, got {rate}")
    return tuple(-(-int(c) // rate) for c in capacities)


def specific_weights(instance: ProblemInstance) -> tuple[Fraction, ...]:
    """Capacity bought per proctor, room by room, as exact rationals."""
    return tuple(
        Fraction(c, p) for c, p in zip(instance.capacities, instance.proctors)
    )


def to_standard_knapsack(instance: ProblemInstance):
    """Complement transform to a max-profit 0/1 knapsack.

    Returns (budget, items) with budget = total capacity - demand and one
    (weight, profit) = (capacity, proctors) item per room.  A max-profit
    subset xi of the knapsack maps to an optimal cover x = 1 - xi whose cost
    is total proctors - profit(xi).
    """
    instance.require_feasible()
    budget = instance.total_capacity - instance.demand
    items = list(zip(instance.capacities, instance.proctors))
    return budget, items
