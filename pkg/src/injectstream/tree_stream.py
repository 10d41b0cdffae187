"""Prefix-tree streaming submodular maximization.

The streaming algorithm keeps a rooted tree of height at most k.  Each
root-to-node path is a candidate solution; a node's children are keyed by the
(possibly bucketed) marginal gain their element had on arrival, and a node
gains a child for an arriving element only if no child with that gain key
exists yet.  After the stream, the best value over all nodes is the output.

Gain keying comes in two flavors: exact (raw marginal values, for small exact
tests) and bucketed (the gain range 0..g is split into ceil(k/delta) buckets
of width delta*g/k, plus one clamp bucket for marginals at or above the top,
which can happen when the guess g undershoots OPT).

When OPT is unknown, a guess manager runs one tree per active geometric
guess g = (1+delta)^j, keyed to the running maximum singleton value m:
guesses outside [m/(1+delta), (k/delta)*m] are dismissed, new guesses start
fresh at the current stream position, and the best surviving tree wins.

The interval-greedy leaf trace is an analysis oracle, not part of the
algorithm: it reads the recorded permutation to reproduce the half-floor
selection argument, and its path provably appears in the exact-mode tree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Optional, Union

from .errors import InvalidInstanceError, InvariantError, PreconditionError
from .geomgrid import snap_ceil_log, snap_floor_log
from .stream_model import Element, InjectedStream
from .submodular import SubmodularOracle, Solution


class ExactKeys:
    """Child keying by the raw marginal value (dedup on exact equality)."""

    def key(self, gain) -> Hashable:
        return gain


class IncreaseBuckets:
    """Bucketed gain keying: index = min(floor(gain / width), bucket_count).

    width = delta*g/k and bucket_count = ceil(k/delta), computed in exact
    rational arithmetic (delta is taken as Fraction(str(delta))) whenever the
    guess g is an int or Fraction, so integer-valued oracles bucket exactly.
    Index bucket_count is the clamp bucket for gains at or above the range top.
    """

    def __init__(self, g, k: int, delta: Union[float, str, Fraction]) -> None:
        self.delta = Fraction(str(delta)) if isinstance(delta, float) else Fraction(delta)
        if not 0 < self.delta <= 1:
            raise PreconditionError(f"delta must lie in (0, 1], got {delta!r}")
        if g <= 0:
            raise InvariantError("bucketing needs a positive guess g")
        self.g = g
        self.k = k
        self.bucket_count = math.ceil(k / self.delta)
        if isinstance(g, (int, Fraction)):
            self.width = self.delta * g / k
        else:
            self.width = float(self.delta) * g / k

    def key(self, gain) -> int:
        if gain <= 0:
            return 0
        return min(int(gain // self.width), self.bucket_count)


class TreeNode:
    __slots__ = ("element", "key", "gain", "value", "depth", "children", "path_ids", "created")

    def __init__(self, element, key, gain, value, depth, path_ids, created) -> None:
        self.element = element
        self.key = key
        self.gain = gain
        self.value = value
        self.depth = depth
        self.children: dict = {}
        self.path_ids = path_ids
        self.created = created


class PrefixTree:
    """The bounded-height solution tree for one (guess, stream) run."""

    def __init__(self, k: int, keyer=None) -> None:
        if k < 0:
            raise PreconditionError("k must be >= 0")
        self.k = k
        self.keyer = keyer if keyer is not None else ExactKeys()
        self.root = TreeNode(None, None, 0, 0, 0, frozenset(), 0)
        self.nodes: list[TreeNode] = [self.root]

    @property
    def live_node_count(self) -> int:
        return len(self.nodes)


def tree_process(tree: PrefixTree, e: Element, oracle: SubmodularOracle) -> PrefixTree:
    """Feed one stream element to the tree.

    Every node at depth < k without a child for this element's gain key gets
    one.  The node list is snapshotted first, so children created for e are
    not themselves extended by e, and visitation order cannot matter.  An
    element already on a node's path is skipped there (its marginal is zero
    and a duplicate id cannot enlarge the solution).
    """
    snapshot = list(tree.nodes)
    for node in snapshot:
        if node.depth >= tree.k:
            continue
        if e.id in node.path_ids:
            continue
        gain = oracle.marginal_from(e.id, node.path_ids, node.value)
        key = tree.keyer.key(gain)
        if key in node.children:
            continue
        child = TreeNode(
            element=e,
            key=key,
            gain=gain,
            value=node.value + gain,
            depth=node.depth + 1,
            path_ids=node.path_ids | {e.id},
            created=len(tree.nodes),
        )
        node.children[key] = child
        tree.nodes.append(child)
    return tree


def best_solution(tree: PrefixTree) -> Solution:
    """Best value over all nodes; ties go to the earliest-created node.

    The root counts, so an empty stream yields (empty set, 0).  Scanning all
    nodes rather than only depth-k leaves is safe by monotonicity and covers
    trees that never filled (short streams).
    """
    best = tree.root
    for node in tree.nodes[1:]:
        if node.value > best.value:
            best = node
    return Solution(elements=best.path_ids, value=best.value)


def node_count_bound(k: int, delta: Union[float, str, Fraction]) -> int:
    """Sum over depths i <= k of (ceil(k/delta)+2)^i; independent of the stream."""
    d = Fraction(str(delta)) if isinstance(delta, float) else Fraction(delta)
    branch = math.ceil(k / d) + 2
    return sum(branch**i for i in range(k + 1))


@dataclass
class RunStats:
    nodes_live_max: int = 0
    guesses_live_max: int = 0
    oracle_calls: int = 0
    guess_mode: str = "known"


class GuessManager:
    """Parallel trees for the active geometric guesses of OPT.

    Active guesses are the exact powers (1+delta)^j, j integer, inside
    [m/(1+delta), (k/delta)*m] where m is the running maximum singleton
    value.  The absolute-grid anchoring means a guess that stays in the
    window keeps its tree across m updates; a guess that falls out is
    dismissed along with its tree, and a newly admitted guess starts a fresh
    tree at the current stream position.
    """

    def __init__(self, k: int, delta: float) -> None:
        if not 0 < delta < 1:
            raise PreconditionError("guessing delta must lie in (0, 1)")
        self.k = k
        self.delta = delta
        self.m = 0
        self.runs: dict[int, PrefixTree] = {}
        self.guesses_live_max = 0
        self.nodes_live_max = 0

    def window(self) -> tuple[int, int]:
        base = 1.0 + self.delta
        lo = snap_ceil_log(base, self.m / base)
        hi = snap_floor_log(base, (self.k / self.delta) * self.m)
        return lo, hi

    def observe(self, singleton_value) -> None:
        """Update m and the active guess set for an arriving element."""
        if singleton_value > self.m:
            self.m = singleton_value
        if self.m <= 0:
            return
        lo, hi = self.window()
        for j in [j for j in self.runs if j < lo or j > hi]:
            del self.runs[j]              # guess left the window: dismiss
        base = 1.0 + self.delta
        for j in range(lo, hi + 1):
            if j not in self.runs:
                self.runs[j] = PrefixTree(
                    self.k, IncreaseBuckets(base**j, self.k, self.delta)
                )
        self.guesses_live_max = max(self.guesses_live_max, len(self.runs))

    def process(self, e: Element, oracle: SubmodularOracle) -> None:
        for tree in self.runs.values():
            tree_process(tree, e, oracle)
        self.nodes_live_max = max(
            self.nodes_live_max, sum(t.live_node_count for t in self.runs.values())
        )

    def best(self) -> Solution:
        best = Solution(elements=frozenset(), value=0)
        for j in sorted(self.runs):
            sol = best_solution(self.runs[j])
            if sol.value > best.value:
                best = sol
        return best


def run_tree_stream(
    stream: Iterable[Element],
    k: int,
    delta: Union[float, str, Fraction],
    oracle: SubmodularOracle,
    mode: str = "bucketed",
    g=None,
    stats: Optional[RunStats] = None,
) -> Solution:
    """One full streaming run with a known guess (or exact gains).

    mode "exact" dedups children on raw gains; mode "bucketed" requires the
    guess g.  For unknown OPT use :func:`guess_run`.
    """
    if mode == "exact":
        tree = PrefixTree(k, ExactKeys())
    elif mode == "bucketed":
        if g is None:
            raise PreconditionError("bucketed mode needs a guess g")
        tree = PrefixTree(k, IncreaseBuckets(g, k, delta))
    else:
        raise PreconditionError(f"unknown mode {mode!r}")
    calls0 = oracle.call_counter
    nodes_max = 1
    for e in stream:
        tree_process(tree, e, oracle)
        nodes_max = max(nodes_max, tree.live_node_count)
    if stats is not None:
        stats.nodes_live_max = nodes_max
        stats.guesses_live_max = 1
        stats.oracle_calls = oracle.call_counter - calls0
        stats.guess_mode = "known"
    return best_solution(tree)


def guess_run(
    stream: Iterable[Element],
    k: int,
    delta: float,
    oracle: SubmodularOracle,
    stats: Optional[RunStats] = None,
) -> Solution:
    """Streaming run without knowing OPT: parallel geometric guesses.

    Returns the best solution over the runs surviving at stream end.
    """
    manager = GuessManager(k, float(delta))
    calls0 = oracle.call_counter
    for e in stream:
        singleton = oracle.evaluate((e.id,))
        manager.observe(singleton)
        manager.process(e, oracle)
    if stats is not None:
        stats.nodes_live_max = manager.nodes_live_max
        stats.guesses_live_max = manager.guesses_live_max
        stats.oracle_calls = oracle.call_counter - calls0
        stats.guess_mode = "auto"
    return manager.best()


def live_guess_bound(k: int, delta: float) -> int:
    """Ceiling of log base (1+delta) of k(1+delta)/delta, the guess-count cap."""
    return math.ceil(math.log(k * (1 + delta) / delta) / math.log(1 + delta))


@dataclass(frozen=True)
class LeafTrace:
    """The interval-greedy selection r_1..r_k and its prefix values."""

    elements: tuple[Element, ...]
    prefix_values: tuple  # f(R_0)=0 .. f(R_k)
    positions: tuple[int, ...]  # stream indices of the r_i

    @property
    def final_value(self):
        return self.prefix_values[-1]


def analysis_leaf_trace(
    stream: InjectedStream,
    opt_ids: set,
    oracle: SubmodularOracle,
    k: int,
) -> LeafTrace:
    """Reproduce the warm-up selection: r_{i+1} maximizes the marginal over
    the stream interval (r_i, o_{i+1}], ties to the earliest stream position.

    o_1..o_k are the first k optimum elements in arrival order (the recorded
    permutation makes them well defined; this is a test oracle, algorithms
    never see those labels).  The selected path exists in the exact-mode tree.
    """
    order = list(stream.order)
    opt_positions = [i for i, e in enumerate(order) if e.id in opt_ids]
    if len(opt_positions) < k:
        raise InvalidInstanceError(
            f"stream holds {len(opt_positions)} optimum elements, need {k}"
        )
    chosen: list[Element] = []
    positions: list[int] = []
    values = [0]
    current = frozenset()
    current_value = 0
    lo = -1  # window starts strictly after this index
    for i in range(k):
        hi = opt_positions[i]
        best_gain = None
        best_pos = None
        for pos in range(lo + 1, hi + 1):
            e = order[pos]
            if e.id in current:
                continue
            gain = oracle.marginal_from(e.id, current, current_value)
            if best_gain is None or gain > best_gain:
                best_gain, best_pos = gain, pos
        if best_pos is None:
            raise InvariantError("empty selection window")  # cannot happen: o_i inside
        e = order[best_pos]
        chosen.append(e)
        positions.append(best_pos)
        current = current | {e.id}
        current_value = current_value + best_gain
        values.append(current_value)
        lo = best_pos
    return LeafTrace(
        elements=tuple(chosen),
        prefix_values=tuple(values),
        positions=tuple(positions),
    )
