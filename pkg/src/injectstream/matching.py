"""Semi-streaming maximum matching under adversarial injections.

The two-branch algorithm runs a full greedy maximal matching M1 and, in
parallel, a second branch that matches greedily only until it holds
ceil((1/2 - eps) * m_star) edges, then spends the rest of the stream
collecting vertex-disjoint 3-augmenting paths for that frozen matching.  The
collected augmentations are applied at stream end and the larger of the two
branches is the output.  When m_star is unknown, branch 2 is replicated for
geometric guesses of it, windowed by the live size of M1.

The path collector is a bounded-memory stand-in for the cited 3-Aug-Paths
subroutine, built to its contract: if the suffix holds beta*|M| disjoint
3-augmenting paths it must return at least (beta^2/32)*|M| of them using
O(|M|) space.  Internals: per matched edge and per endpoint it stores the
first two wing edges with distinct free endpoints, commits a path greedily
as soon as both sides hold wings with unused distinct free endpoints, and
does one final sweep.  Free-free edges are ignored (they are not wings), as
are edges between two matched vertices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Optional, Sequence

from .errors import (
    InvalidInstanceError,
    InvariantError,
    PreconditionError,
    SizeLimitError,
)
from .geomgrid import snap_ceil_log, snap_floor_log

GENERAL_EXACT_LIMIT = 20
BIPARTITE_EXACT_LIMIT = 10**4
#: wing slots per matched edge (2 per endpoint) plus the edge itself
COLLECTOR_SLOTS_PER_EDGE = 5


@dataclass(frozen=True)
class Edge:
    """Undirected edge; endpoints are normalized so u <= v."""

    u: Hashable
    v: Hashable

    def __post_init__(self) -> None:
        if self.u == self.v:
            raise InvalidInstanceError(f"self-loop at vertex {self.u!r}")
        a, b = self.u, self.v
        try:
            swap = b < a
        except TypeError:
            swap = repr(b) < repr(a)
        if swap:
            object.__setattr__(self, "u", b)
            object.__setattr__(self, "v", a)

    def other(self, w: Hashable) -> Hashable:
        if w == self.u:
            return self.v
        if w == self.v:
            return self.u
        raise PreconditionError(f"{w!r} is not an endpoint of {self}")

    def __repr__(self) -> str:
        return f"({self.u!r},{self.v!r})"


class Matching:
    """A set of vertex-disjoint edges with O(1) endpoint lookups."""

    def __init__(self, edges: Iterable[Edge] = ()) -> None:
        self.edges: list[Edge] = []
        self.matched: dict[Hashable, Edge] = {}
        for e in edges:
            self.add(e)

    def is_free(self, w: Hashable) -> bool:
        return w not in self.matched

    def add(self, e: Edge) -> None:
        if e.u in self.matched or e.v in self.matched:
            raise InvariantError(f"adding {e} would share a vertex")
        self.edges.append(e)
        self.matched[e.u] = e
        self.matched[e.v] = e

    def remove(self, e: Edge) -> None:
        if self.matched.get(e.u) != e or self.matched.get(e.v) != e:
            raise InvariantError(f"{e} is not in the matching")
        self.edges.remove(e)
        del self.matched[e.u]
        del self.matched[e.v]

    def copy(self) -> "Matching":
        out = Matching()
        out.edges = list(self.edges)
        out.matched = dict(self.matched)
        return out

    def __len__(self) -> int:
        return len(self.edges)

    def __contains__(self, e: Edge) -> bool:
        return self.matched.get(e.u) is not None and self.matched[e.u] == e

    def __iter__(self):
        return iter(self.edges)

    def __repr__(self) -> str:
        return f"Matching({self.edges!r})"


def validate_matching(m: Matching) -> None:
    seen: set = set()
    for e in m.edges:
        if e.u in seen or e.v in seen:
            raise InvariantError(f"matching shares vertex on {e}")
        seen.add(e.u)
        seen.add(e.v)


@dataclass(frozen=True)
class MatchConfig:
    """Constants of the two-branch algorithm (defaults as certified).

    beta = (4 - 43 eps) / (4 - 8 eps); gamma = 1/20000 is the certified
    expectation gap above one half and is recorded here, not used by code.
    buffer_small enables the small-instance escape hatch (m_star <= 2/rho
    allows buffering the whole graph); it is off by default so the streaming
    path is what runs, and it is subject to the exact oracle's size guards.
    """

    eps: Fraction = Fraction(1, 50)
    delta_guess: float = 0.1
    buffer_small: bool = False

    def __post_init__(self) -> None:
        if not 0 < self.eps < Fraction(1, 4):
            raise PreconditionError(f"eps must lie in (0, 1/4), got {self.eps}")
        if not 0 < self.beta < 1:
            raise PreconditionError(f"beta out of (0,1) for eps={self.eps}")

    @property
    def alpha(self) -> Fraction:
        return self.eps

    @property
    def rho(self) -> Fraction:
        return self.eps / 4

    @property
    def beta(self) -> Fraction:
        return (4 - 43 * self.eps) / (4 - 8 * self.eps)

    @property
    def gamma(self) -> Fraction:
        return Fraction(1, 20000)

    def phase1_threshold(self, m_star: int) -> int:
        return math.ceil((Fraction(1, 2) - self.eps) * m_star)

    @property
    def small_instance_limit(self) -> Fraction:
        return 2 / self.rho


def greedy_step(M: Matching, e: Edge) -> Matching:
    """Add e iff both endpoints are free; otherwise leave M unchanged."""
    if M.is_free(e.u) and M.is_free(e.v):
        M.add(e)
    return M


def greedy_matching(stream: Iterable[Edge]) -> Matching:
    M = Matching()
    for e in stream:
        greedy_step(M, e)
    return M


@dataclass(frozen=True)
class AugPath:
    """A 3-augmenting path x - a - b - y: wings to free x, y around center in M."""

    wing_a: Edge
    center: Edge
    wing_b: Edge

    def free_endpoints(self) -> tuple[Hashable, Hashable]:
        x = self.wing_a.other(self.center.u)
        y = self.wing_b.other(self.center.v)
        return x, y

    def vertices(self) -> frozenset:
        x, y = self.free_endpoints()
        return frozenset({x, self.center.u, self.center.v, y})


class AugPathStore:
    """Bounded-memory collector of vertex-disjoint 3-augmenting paths.

    Initialized with a frozen matching M and the contract parameter beta
    (beta scales the guarantee, not the collector's behavior).  Per matched
    edge and side it keeps at most the first 2 wing edges with distinct
    free endpoints, so stored edges never exceed
    COLLECTOR_SLOTS_PER_EDGE * |M|, independent of the stream length.
    """

    def __init__(self, M: Matching, beta=None) -> None:
        validate_matching(M)
        self.M = M
        self.beta = beta
        # wings[center][side vertex] -> list of (wing edge, free endpoint)
        self.wings: dict[Edge, dict[Hashable, list]] = {
            e: {e.u: [], e.v: []} for e in M.edges
        }
        self.committed: dict[Edge, AugPath] = {}
        self.used: set = set()
        self.stored_wings = 0
        self.max_slots = len(M.edges)  # the base edges themselves

    def offer(self, e: Edge) -> None:
        """One stream edge: store as a wing if eligible, then try to commit."""
        u_matched = not self.M.is_free(e.u)
        v_matched = not self.M.is_free(e.v)
        if u_matched == v_matched:
            return  # free-free or matched-matched: not a wing
        side = e.u if u_matched else e.v
        free = e.v if u_matched else e.u
        center = self.M.matched[side]
        slots = self.wings[center][side]
        if any(w == free for _, w in slots):
            return
        if len(slots) >= 2:
            return
        slots.append((e, free))
        self.stored_wings += 1
        self.max_slots = max(self.max_slots, len(self.M.edges) + self.stored_wings)
        self._try_commit(center)

    def _try_commit(self, center: Edge) -> None:
        if center in self.committed:
            return
        for wa, x in self.wings[center][center.u]:
            if x in self.used:
                continue
            for wb, y in self.wings[center][center.v]:
                if y in self.used or y == x:
                    continue
                path = AugPath(wing_a=wa, center=center, wing_b=wb)
                self.committed[center] = path
                self.used.add(x)
                self.used.add(y)
                return

    def sweep(self) -> None:
        """Final pass over all centers, in matching order."""
        for center in self.M.edges:
            self._try_commit(center)

    def paths(self) -> list[AugPath]:
        return [self.committed[c] for c in self.M.edges if c in self.committed]


def three_aug_paths(M: Matching, beta, suffix: Iterable[Edge]) -> list[AugPath]:
    """Collect vertex-disjoint 3-augmenting paths for frozen M from a stream."""
    store = AugPathStore(M, beta)
    for e in suffix:
        store.offer(e)
    store.sweep()
    return store.paths()


def apply_augmentations(M: Matching, paths: Sequence[AugPath]) -> Matching:
    """Swap each path's center for its two wings; +1 edge per path."""
    out = M.copy()
    for p in paths:
        x, y = p.free_endpoints()
        if not (out.is_free(x) and out.is_free(y)):
            raise InvariantError(f"augmenting path endpoints not free: {p}")
        out.remove(p.center)
        out.add(p.wing_a)
        out.add(p.wing_b)
    validate_matching(out)
    return out


@dataclass
class MatchRunState:
    """Both branches of one run (exposed for tests and the guess manager)."""

    m1: Matching
    m2_phase1: Matching
    collector: Optional[AugPathStore]
    threshold: int

    def finish(self) -> Matching:
        m2 = self.m2_phase1
        if self.collector is not None:
            self.collector.sweep()
            m2 = apply_augmentations(self.m2_phase1, self.collector.paths())
        return m2 if len(m2) > len(self.m1) else self.m1


def match_run(stream: Iterable[Edge], m_star: int, cfg: MatchConfig = MatchConfig()) -> Matching:
    """The two-branch algorithm with known optimum size m_star.

    Branch 1 is plain greedy.  Branch 2 matches greedily until it holds
    phase1_threshold(m_star) edges, then collects 3-augmenting paths for the
    frozen matching and augments at stream end.  Output: the larger branch.
    """
    if m_star < 1:
        raise PreconditionError("m_star must be >= 1")
    edges = list(stream)
    if cfg.buffer_small and m_star <= cfg.small_instance_limit:
        return exact_max_matching(edges)
    state = MatchRunState(
        m1=Matching(), m2_phase1=Matching(), collector=None,
        threshold=cfg.phase1_threshold(m_star),
    )
    for e in edges:
        greedy_step(state.m1, e)
        _feed_branch2(state, e, cfg)
    return state.finish()


def _feed_branch2(state: MatchRunState, e: Edge, cfg: MatchConfig) -> None:
    """Phase 1: greedy until the threshold; phase 2: offer to the collector."""
    if state.collector is None:
        if len(state.m2_phase1) < state.threshold:
            greedy_step(state.m2_phase1, e)
            if len(state.m2_phase1) >= state.threshold:
                state.collector = AugPathStore(state.m2_phase1, cfg.beta)
            return
        state.collector = AugPathStore(state.m2_phase1, cfg.beta)
    state.collector.offer(e)


@dataclass
class GuessRunStats:
    guesses_live_max: int = 0


def geometric_guess_run(
    stream: Iterable[Edge],
    delta_guess: float,
    cfg: MatchConfig = MatchConfig(),
    stats: Optional[GuessRunStats] = None,
) -> Matching:
    """Two-branch runs for geometric guesses of m_star, windowed by |M1|.

    Active guesses are powers (1+delta)^i inside
    [|M1|/(1+delta), 4|M1|/(1-2eps)].  A freshly admitted guess starts its
    branch 2 from a copy of the current M1; a guess leaving the window is
    dismissed.  Returns the best final matching over greedy and all
    surviving guesses.
    """
    if not 0 < delta_guess < 1:
        raise PreconditionError("delta_guess must lie in (0, 1)")
    base = 1.0 + delta_guess
    upper_coef = 4.0 / float(1 - 2 * cfg.eps)
    m1 = Matching()
    branches: dict[int, MatchRunState] = {}
    live_max = 0
    for e in stream:
        greedy_step(m1, e)
        if len(m1) >= 1:
            lo = snap_ceil_log(base, len(m1) / base)
            hi = snap_floor_log(base, upper_coef * len(m1))
            for i in [i for i in branches if i < lo or i > hi]:
                del branches[i]
            for i in range(lo, hi + 1):
                if i not in branches:
                    branches[i] = MatchRunState(
                        m1=m1,  # shared reference: branch output compares against live M1
                        m2_phase1=m1.copy(),
                        collector=None,
                        threshold=cfg.phase1_threshold(math.ceil(base**i)),
                    )
            live_max = max(live_max, len(branches))
        for state in branches.values():
            _feed_branch2(state, e, cfg)
    if stats is not None:
        stats.guesses_live_max = live_max
    best = m1
    for i in sorted(branches):
        out = branches[i].finish()
        if len(out) > len(best):
            best = out
    return best


def live_guess_bound(delta_guess: float, cfg: MatchConfig = MatchConfig()) -> int:
    """Ceiling of log base (1+delta) of 4(1+delta)/(1-2eps)."""
    ratio = 4 * (1 + delta_guess) / float(1 - 2 * cfg.eps)
    return math.ceil(math.log(ratio) / math.log(1 + delta_guess))


# ---------------------------------------------------------------------------
# exact oracles


def exact_max_matching(edges: Iterable[Edge]) -> Matching:
    """Maximum-cardinality matching: Hopcroft-Karp on bipartite graphs
    (up to 10^4 vertices), subset DP on general graphs (up to 20 vertices).
    """
    edge_list = _dedup(edges)
    vertices = sorted({w for e in edge_list for w in (e.u, e.v)}, key=repr)
    if not edge_list:
        return Matching()
    coloring = _two_color(vertices, edge_list)
    if coloring is not None:
        if len(vertices) > BIPARTITE_EXACT_LIMIT:
            raise SizeLimitError(
                f"bipartite exact matching guarded to {BIPARTITE_EXACT_LIMIT} vertices"
            )
        return _bipartite_max_matching(vertices, edge_list, coloring)
    if len(vertices) > GENERAL_EXACT_LIMIT:
        raise SizeLimitError(
            f"general exact matching guarded to {GENERAL_EXACT_LIMIT} vertices"
        )
    return _max_matching_dp(vertices, edge_list)


def _dedup(edges: Iterable[Edge]) -> list[Edge]:
    seen: set = set()
    out = []
    for e in edges:
        if e not in seen:
            seen.add(e)
            out.append(e)
    return out


def _two_color(vertices: list, edges: list[Edge]) -> Optional[dict]:
    adj: dict = {w: [] for w in vertices}
    for e in edges:
        adj[e.u].append(e.v)
        adj[e.v].append(e.u)
    color: dict = {}
    for start in vertices:
        if start in color:
            continue
        color[start] = 0
        queue = [start]
        while queue:
            w = queue.pop()
            for nb in adj[w]:
                if nb not in color:
                    color[nb] = 1 - color[w]
                    queue.append(nb)
                elif color[nb] == color[w]:
                    return None
    return color


def _bipartite_max_matching(vertices: list, edges: list[Edge], color: dict) -> Matching:
    """Bipartite maximum matching via scipy's csgraph routine."""
    import numpy as np
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import maximum_bipartite_matching

    left = [w for w in vertices if color[w] == 0]
    right = [w for w in vertices if color[w] == 1]
    li = {w: i for i, w in enumerate(left)}
    ri = {w: i for i, w in enumerate(right)}
    rows, cols = [], []
    for e in edges:
        l, r = (e.u, e.v) if color[e.u] == 0 else (e.v, e.u)
        rows.append(li[l])
        cols.append(ri[r])
    graph = csr_matrix(
        (np.ones(len(rows), dtype=np.int8), (rows, cols)),
        shape=(len(left), len(right)),
    )
    col_of_row = maximum_bipartite_matching(graph, perm_type="column")
    out = Matching()
    for i, j in enumerate(col_of_row):
        if j >= 0:
            out.add(Edge(left[i], right[int(j)]))
    return out


def _max_matching_dp(vertices: list, edges: list[Edge]) -> Matching:
    """Subset DP over vertices; reconstruction by walking the dp table."""
    import numpy as np

    n = len(vertices)
    idx = {w: i for i, w in enumerate(vertices)}
    adj_mask = [0] * n
    for e in edges:
        iu, iv = idx[e.u], idx[e.v]
        adj_mask[iu] |= 1 << iv
        adj_mask[iv] |= 1 << iu
    dp = np.zeros(1 << n, dtype=np.int8)
    for mask in range(1, 1 << n):
        v = (mask & -mask).bit_length() - 1
        rest = mask ^ (1 << v)
        best = dp[rest]  # leave v unmatched
        cand = adj_mask[v] & rest
        while cand:
            ubit = cand & -cand
            cand ^= ubit
            u = ubit.bit_length() - 1
            val = 1 + dp[rest ^ ubit]
            if val > best:
                best = val
        dp[mask] = best
    out = Matching()
    mask = (1 << n) - 1
    while mask:
        v = (mask & -mask).bit_length() - 1
        rest = mask ^ (1 << v)
        if dp[mask] == dp[rest]:
            mask = rest
            continue
        cand = adj_mask[v] & rest
        while cand:
            ubit = cand & -cand
            cand ^= ubit
            if dp[mask] == 1 + dp[rest ^ ubit]:
                u = ubit.bit_length() - 1
                out.add(Edge(vertices[v], vertices[u]))
                mask = rest ^ ubit
                break
        else:
            raise InvariantError("dp reconstruction failed")
    return out


# ---------------------------------------------------------------------------
# analysis oracles


def count_3_augmentable(M: Matching, M_star: Matching) -> int:
    """Number of M-edges that are middles of M*-M-M* 3-augmenting paths.

    An edge (a,b) of M qualifies iff both endpoints have M*-partners and
    both partners are M-free.  Requires M maximal in the union graph (the
    Lemma's hypothesis); violations raise.
    """
    validate_matching(M)
    validate_matching(M_star)
    for e in M_star.edges:
        if M.is_free(e.u) and M.is_free(e.v):
            raise PreconditionError(f"M not maximal in the union graph: {e} is free-free")
    count = 0
    for e in M.edges:
        pa = M_star.matched.get(e.u)
        pb = M_star.matched.get(e.v)
        if pa is None or pb is None:
            continue
        x = pa.other(e.u)
        y = pb.other(e.v)
        if M.is_free(x) and M.is_free(y):
            count += 1
    return count


@dataclass
class RobustGreedyReport:
    base_size: int
    deleted_sizes: list[int]
    violations: list[int]  # deletion positions where | |M| - |M'| | > 1

    @property
    def ok(self) -> bool:
        return not self.violations


def robust_greedy_check(stream: Sequence[Edge]) -> RobustGreedyReport:
    """Rerun greedy with each single edge deleted; sizes may differ by <= 1."""
    edges = list(stream)
    base = len(greedy_matching(edges))
    sizes = []
    violations = []
    for i in range(len(edges)):
        size = len(greedy_matching(edges[:i] + edges[i + 1 :]))
        sizes.append(size)
        if abs(size - base) > 1:
            violations.append(i)
    return RobustGreedyReport(base_size=base, deleted_sizes=sizes, violations=violations)


# ---------------------------------------------------------------------------
# edge-stream files


def write_edge_stream(path: str, edges: Iterable[Edge]) -> None:
    """One `u v` pair per line, arrival order preserved."""
    with open(path, "w") as fh:
        for e in edges:
            fh.write(f"{e.u} {e.v}\n")


def read_edge_stream(path: str) -> list[Edge]:
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise InvalidInstanceError(f"expected 'u v' per line, got {line!r}")
            out.append(Edge(_parse_vertex(parts[0]), _parse_vertex(parts[1])))
    return out


def _parse_vertex(tok: str):
    try:
        return int(tok)
    except ValueError:
        return tok
