"""Binary decomposition trees: split a room list in two, hand each side a
proportional share of the demand, and recurse until lists are small.

Two generators are provided.  The head-left tree puts the first
floor(fraction * size) rooms of the (once-sorted) list into the left child;
the balanced tree puts the even positions left and the odd positions right.
Vertices are numbered in left pre-order, root = 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InvalidParameterError, InvalidPartitionError, SplitInfeasibleError
from .model import ProblemInstance
from .rounding import as_fraction
from .solvers import SolutionTriple, SortCriterion

ROUNDING_MODES = ("ceil", "floor")

HEAD_LEFT = "hlT"
BALANCED = "blT"
TREE_ALGORITHMS = (HEAD_LEFT, BALANCED)


def split_demand(
    parent_demand: int,
    left_caps_sum: int,
    total_caps_sum: int,
    rounding: str = "ceil",
) -> tuple[int, int]:
    """Split a demand proportionally to the left side's capacity share.

    The left child gets round(parent_demand * left_caps_sum / total_caps_sum)
    with the requested rounding; the right child gets the remainder.
    """
    if rounding not in ROUNDING_MODES:
        raise InvalidParameterError(f"rounding must be one of {ROUNDING_MODES}")
    if not 0 < left_caps_sum < total_caps_sum:
        raise InvalidPartitionError(
            f"degenerate partition: left capacity {left_caps_sum} "
            f"of total {total_caps_sum}"
        )
    if parent_demand > total_caps_sum:
        raise InvalidPartitionError(
            f"demand {parent_demand} exceeds the partitioned capacity {total_caps_sum}"
        )
    num = parent_demand * left_caps_sum
    if rounding == "ceil":
        d_left = -(-num // total_caps_sum)
    else:
        d_left = num // total_caps_sum
    return d_left, parent_demand - d_left


def pair_feasible(
    left_caps_sum: int, right_caps_sum: int, d_left: int, d_right: int
) -> bool:
    """Both subproblems of a split are solvable iff neither side is overloaded."""
    return d_left <= left_caps_sum and d_right <= right_caps_sum


def slack_condition_holds(total_caps: int, right_caps: int, demand: int) -> bool:
    """Sufficient slack for a floor split to leave both children feasible.

    Exact rational test of demand <= (right_caps - 1) / right_caps * total_caps.
    """
    if right_caps < 1:
        raise InvalidParameterError("right-side capacity must be >= 1")
    return demand * right_caps <= (right_caps - 1) * total_caps


@dataclass(frozen=True)
class TreeParams:
    """Generation parameters, kept on the tree for reproducibility."""

    algorithm: str  # "hlT" or "blT"
    sort: SortCriterion
    fraction: Fraction | None  # head fraction, hlT only
    min_size: int
    rounding: str


@dataclass
class DCNode:
    """One subproblem: a room subset (positions into the root instance, in
    node order) plus its assigned demand."""

    rooms: tuple[int, ...]
    demand: int
    height: int
    index: int  # pre-order vertex number
    left: "DCNode | None" = None
    right: "DCNode | None" = None
    triple: SolutionTriple | None = None

    @property
    def is_leaf(self) -> bool:
        return self.left is None


@dataclass
class DCTree:
    instance: ProblemInstance
    root: DCNode
    params: TreeParams
    nodes: list[DCNode] = field(default_factory=list)  # pre-order

    @property
    def height(self) -> int:
        return max(node.height for node in self.nodes)

    def subinstance(self, node: DCNode) -> ProblemInstance:
        """The covering problem restricted to one node."""
        inst = self.instance
        return ProblemInstance(
            capacities=tuple(inst.capacities[i] for i in node.rooms),
            proctors=tuple(inst.proctors[i] for i in node.rooms),
            demand=node.demand,
            room_ids=tuple(inst.room_ids[i] for i in node.rooms),
        )


def _build(instance, params):
    """Shared recursive generator; params.algorithm picks the splitter."""
    instance.require_feasible()
    caps = instance.capacities
    order = params.sort.order(instance)
    nodes: list[DCNode] = []

    def splitter(rooms):
        if params.algorithm == HEAD_LEFT:
            f = params.fraction
            size = (f.numerator * len(rooms)) // f.denominator
            return rooms[:size], rooms[size:]
        return rooms[0::2], rooms[1::2]

    def grow(rooms, demand, height):
        node = DCNode(rooms=tuple(rooms), demand=demand, height=height, index=len(nodes))
        nodes.append(node)
        if len(rooms) <= params.min_size:
            return node
        left_rooms, right_rooms = splitter(rooms)
        if not left_rooms or not right_rooms:
            return node
        left_caps = sum(caps[i] for i in left_rooms)
        right_caps = sum(caps[i] for i in right_rooms)
        d_left, d_right = split_demand(
            demand, left_caps, left_caps + right_caps, params.rounding
        )
        if not pair_feasible(left_caps, right_caps, d_left, d_right):
            bad = (
                (node.index, left_rooms, d_left, left_caps)
                if d_left > left_caps
                else (node.index, right_rooms, d_right, right_caps)
            )
            raise SplitInfeasibleError(bad[0], tuple(bad[1]), bad[2], bad[3])
        node.left = grow(left_rooms, d_left, height + 1)
        node.right = grow(right_rooms, d_right, height + 1)
        return node

    root = grow(order, instance.demand, 0)
    return DCTree(instance=instance, root=root, params=params, nodes=nodes)


def build_tree_headleft(
    instance: ProblemInstance,
    sort: SortCriterion,
    fraction=Fraction(1, 2),
    min_size: int = 2,
    rounding: str = "ceil",
) -> DCTree:
    """Head-left tree: left child = leading fraction of the sorted list.

    The room list is sorted once at the root; children inherit the order.
    Recursion stops once a list has at most `min_size` rooms or a child
    would come out empty.
    """
    fraction = as_fraction(fraction)
    if not 0 <= fraction <= 1:
        raise InvalidParameterError(f"head fraction must lie in [0, 1], got {fraction}")
    if min_size < 1:
        raise InvalidParameterError("min_size must be >= 1")
    if rounding not in ROUNDING_MODES:
        raise InvalidParameterError(f"rounding must be one of {ROUNDING_MODES}")
    params = TreeParams(HEAD_LEFT, sort, fraction, int(min_size), rounding)
    return _build(instance, params)


def build_tree_balanced(
    instance: ProblemInstance,
    sort: SortCriterion,
    min_size: int = 2,
    rounding: str = "ceil",
) -> DCTree:
    """Balanced tree: even positions of the sorted list left, odd right."""
    if min_size < 1:
        raise InvalidParameterError("min_size must be >= 1")
    if rounding not in ROUNDING_MODES:
        raise InvalidParameterError(f"rounding must be one of {ROUNDING_MODES}")
    params = TreeParams(BALANCED, sort, None, int(min_size), rounding)
    return _build(instance, params)


def build_tree(instance, algorithm, sort, fraction=None, min_size=2, rounding="ceil"):
    """Dispatch on the algorithm name ("hlT" or "blT")."""
    if algorithm == HEAD_LEFT:
        if fraction is None:
            fraction = Fraction(1, 2)
        return build_tree_headleft(instance, sort, fraction, min_size, rounding)
    if algorithm == BALANCED:
        if fraction is not None:
            raise InvalidParameterError("the balanced tree takes no head fraction")
        return build_tree_balanced(instance, sort, min_size, rounding)
    raise InvalidParameterError(
        f"unknown tree algorithm {algorithm!r}; expected one of {TREE_ALGORITHMS}"
    )


def prune(tree: DCTree, h: int) -> list[DCNode]:
    """Leaves of the tree cut at height `h`, in pre-order.

    A node survives as a leaf if it is a true leaf at height <= h, or an
    inner node sitting exactly at height h.  The returned room sets always
    partition the root's rooms and their demands sum to the root demand.
    """
    if not 0 <= h <= tree.height:
        raise InvalidParameterError(
            f"height {h} outside the tree's range [0, {tree.height}]"
        )
    leaves: list[DCNode] = []

    def walk(node):
        if node.is_leaf or node.height == h:
            leaves.append(node)
            return
        walk(node.left)
        walk(node.right)

    walk(tree.root)
    return leaves


def to_dot(tree: DCTree) -> str:
    """Graphviz rendering of the tree structure: one node per subproblem."""
    lines = ["digraph dctree {"]
    for node in tree.nodes:
        lines.append(
            f'  v{node.index} [label="D={node.demand} |V|={len(node.rooms)}"];'
        )
    for node in tree.nodes:
        if not node.is_leaf:
            lines.append(f"  v{node.index} -> v{node.left.index};")
            lines.append(f"  v{node.index} -> v{node.right.index};")
    lines.append("}")
    return "\n".join(lines) + "\n"
