"""Instance and adversary generators for the experiment harness.

Submodular instances are coverage functions; the good set is always an
optimal k-subset of the generated ground set (computed by the exact oracle,
so the split's optimum equals the global optimum by construction) and the
remaining elements are the injectable noise.  Matching instances carry
edges as element payloads; the good elements are the edges of a maximum
matching of the generated graph.

Adversary strategies are blind: each one maps (number of good elements,
noise ids, seed) to an injection plan and never sees the permutation, which
is the model's information constraint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import InvalidInstanceError, PreconditionError
from .matching import Edge, Matching, MatchConfig, exact_max_matching
from .rng import PhiloxRNG, fisher_yates
from .stream_model import Element, InjectionPlan, InstanceSplit
from .submodular import (
    CoverageInstance,
    CoverageOracle,
    brute_force_opt,
    figure2_instance,
    verify_axioms,
)

SUBMOD_KINDS = ("figure2", "random", "decoy_front")
MATCHING_KINDS = ("random_bipartite", "greedy_trap")
ADVERSARY_STRATEGIES = ("front", "back", "spread", "random")


# ---------------------------------------------------------------------------
# blind adversary plans


def make_plan(split: InstanceSplit, strategy: str, seed: int = 0) -> InjectionPlan:
    """Injection plan from a named blind strategy.

    front: everything in slot 0.  back: everything after the last good
    element.  spread: round-robin over slots 0..n_good.  random: uniform
    slot per noise element (Philox on seed).
    """
    n = split.n_good
    ids = [e.id for e in split.noise]
    if strategy == "front":
        entries = [(0, i) for i in ids]
    elif strategy == "back":
        entries = [(n, i) for i in ids]
    elif strategy == "spread":
        entries = [(j % (n + 1), i) for j, i in enumerate(ids)]
    elif strategy == "random":
        rng = PhiloxRNG(seed)
        entries = [(rng.randbelow(n + 1), i) for i in ids]
    else:
        raise PreconditionError(f"unknown adversary strategy {strategy!r}")
    plan = InjectionPlan(entries=tuple(entries))
    plan.validate(split)
    return plan


# ---------------------------------------------------------------------------
# submodular instances


def generate_submod_instance(
    kind: str, params: Optional[dict] = None, seed: int = 0
) -> tuple[CoverageInstance, InstanceSplit]:
    """Coverage instance plus a good/noise split; good = an optimal k-set.

    Kinds: figure2 (the fixed 4-rectangle instance, k=2); random (n sets
    over a point universe, params n/k/universe/max_points); decoy_front
    (k disjoint blocks as the optimum, noise sets are block subsets one
    point short, params k/block/decoys_per_block).
    """
    params = dict(params or {})
    kind = kind.replace("-", "_")
    if kind == "figure2":
        instance, k = figure2_instance()
        split = _split_by_opt(instance, k)
    elif kind == "random":
        instance, split = _random_coverage(params, seed)
    elif kind == "decoy_front":
        instance, split = _decoy_front(params, seed)
    else:
        raise PreconditionError(f"unknown submod kind {kind!r}")
    if params.get("self_check", True):
        _self_check(instance, split)
    return instance, split


def _split_by_opt(instance: CoverageInstance, k: int) -> InstanceSplit:
    oracle = CoverageOracle(instance)
    opt = brute_force_opt(oracle, instance.ground_set(), k)
    good = tuple(
        Element(id=i, payload=instance.rect_of[i]) for i in sorted(opt.elements, key=repr)
    )
    noise = tuple(
        Element(id=i, payload=instance.rect_of[i])
        for i in sorted(instance.rect_of, key=repr)
        if i not in opt.elements
    )
    return InstanceSplit(good=good, noise=noise)


def _random_coverage(params: dict, seed: int) -> tuple[CoverageInstance, InstanceSplit]:
    n = int(params.get("n", 20))
    k = int(params.get("k", 3))
    universe = int(params.get("universe", 30))
    max_points = int(params.get("max_points", 6))
    if not 1 <= k <= n:
        raise PreconditionError("need 1 <= k <= n")
    if max_points < 1 or universe < max_points:
        raise PreconditionError("need 1 <= max_points <= universe")
    rng = PhiloxRNG(seed)
    rects = {}
    for i in range(n):
        size = 1 + rng.randbelow(max_points)
        pts = set()
        while len(pts) < size:
            pts.add(rng.randbelow(universe))
        rects[i] = frozenset(pts)
    instance = CoverageInstance(rect_of=rects)
    return instance, _split_by_opt(instance, k)


def _decoy_front(params: dict, seed: int) -> tuple[CoverageInstance, InstanceSplit]:
    k = int(params.get("k", 3))
    block = int(params.get("block", 5))
    decoys = int(params.get("decoys_per_block", 3))
    if k < 1 or block < 2 or decoys < 0:
        raise PreconditionError("need k >= 1, block >= 2, decoys_per_block >= 0")
    if decoys > block:
        raise PreconditionError("at most `block` distinct decoys per block")
    rng = PhiloxRNG(seed)
    rects = {}
    for b in range(k):
        points = frozenset(range(b * block, (b + 1) * block))
        rects[f"g{b}"] = points
        dropped = fisher_yates(sorted(points), rng)[:decoys]
        for j, pt in enumerate(dropped):
            rects[f"n{b}_{j}"] = points - {pt}
    instance = CoverageInstance(rect_of=rects)
    good = tuple(Element(id=f"g{b}", payload=rects[f"g{b}"]) for b in range(k))
    noise = tuple(
        Element(id=i, payload=instance.rect_of[i])
        for i in sorted(instance.rect_of, key=repr)
        if not i.startswith("g")
    )
    return instance, InstanceSplit(good=good, noise=noise)


def _self_check(instance: CoverageInstance, split: InstanceSplit) -> None:
    """The split's good set must attain the global optimum; axioms must hold."""
    oracle = CoverageOracle(instance)
    k = len(split.good)
    good_ids = frozenset(e.id for e in split.good)
    opt = brute_force_opt(oracle, instance.ground_set(), k)
    good_value = oracle.evaluate(good_ids)
    if good_value != opt.value:
        raise InvalidInstanceError(
            f"good set value {good_value} misses optimum {opt.value}"
        )
    report = verify_axioms(oracle, instance.ground_set(), sample_pairs=200, seed=7)
    if not report.ok:
        raise InvalidInstanceError(f"axiom self-check failed: {report}")


# ---------------------------------------------------------------------------
# matching instances


def generate_matching_instance(
    kind: str, params: Optional[dict] = None, seed: int = 0
) -> tuple[InstanceSplit, int]:
    """Edge-element split plus the exact maximum matching size.

    Kinds: random_bipartite (params nl/nr/p); greedy_trap (params s: the
    optimum is a perfect matching of 2s pairs, the noise is s cross edges
    that block half of it when they arrive first).  Elements carry (u, v)
    payloads; good elements are a maximum matching's edges.
    """
    params = dict(params or {})
    kind = kind.replace("-", "_")
    if kind in ("random", "random_bipartite"):
        return _random_bipartite(params, seed)
    if kind in ("greedy_trap", "case1"):
        return _greedy_trap(params)
    raise PreconditionError(f"unknown matching kind {kind!r}")


def _random_bipartite(params: dict, seed: int) -> tuple[InstanceSplit, int]:
    nl = int(params.get("nl", 8))
    nr = int(params.get("nr", 8))
    p = float(params.get("p", 0.3))
    if nl < 1 or nr < 1 or not 0 < p <= 1:
        raise PreconditionError("need nl, nr >= 1 and p in (0, 1]")
    rng = PhiloxRNG(seed)
    scale = 10**6
    edges = []
    for u in range(nl):
        for v in range(nr):
            if rng.randbelow(scale) < p * scale:
                edges.append(Edge(f"L{u}", f"R{v}"))
    if not edges:
        edges.append(Edge("L0", "R0"))
    mstar = exact_max_matching(edges)
    in_mstar = set(mstar.edges)
    good = tuple(
        Element(id=i, payload=(e.u, e.v)) for i, e in enumerate(mstar.edges)
    )
    noise = tuple(
        Element(id=len(good) + j, payload=(e.u, e.v))
        for j, e in enumerate(e for e in edges if e not in in_mstar)
    )
    return InstanceSplit(good=good, noise=noise), len(mstar)


def _greedy_trap(params: dict) -> tuple[InstanceSplit, int]:
    s = int(params.get("s", 25))
    if s < 1:
        raise PreconditionError("need s >= 1")
    # pair j is (2j, 2j+1) for j < 2s; cross i ties pair 2i to pair 2i+1
    good = tuple(
        Element(id=j, payload=(2 * j, 2 * j + 1)) for j in range(2 * s)
    )
    noise = tuple(
        Element(id=2 * s + i, payload=(4 * i + 1, 4 * i + 2)) for i in range(s)
    )
    return InstanceSplit(good=good, noise=noise), 2 * s


def edges_from_stream(stream) -> list[Edge]:
    """Element stream with (u, v) payloads -> Edge list in arrival order."""
    out = []
    for el in stream:
        u, v = el.payload
        out.append(Edge(u, v))
    return out


# ---------------------------------------------------------------------------
# planted instances for the path collector


@dataclass(frozen=True)
class PlantedAugInstance:
    matching: Matching
    suffix: tuple[Edge, ...]
    planted: int  # number of planted vertex-disjoint 3-augmenting paths


def generate_planted_3aug(
    seed: int,
    size_range: tuple[int, int] = (20, 100),
    beta: Optional[Fraction] = None,
    distractors: bool = True,
) -> PlantedAugInstance:
    """Frozen matching plus a suffix holding >= ceil(beta*|M|) disjoint
    3-augmenting paths (fresh wing vertices), shuffled, optionally with
    distractor edges the collector must ignore.

    Center i is (4i, 4i+1); its planted wings go to 4i+2 and 4i+3.
    """
    if beta is None:
        beta = MatchConfig().beta
    lo, hi = size_range
    if not 1 <= lo <= hi:
        raise PreconditionError("need 1 <= lo <= hi")
    rng = PhiloxRNG(seed)
    s = lo + rng.randbelow(hi - lo + 1)
    planted = math.ceil(s * Fraction(beta))
    M = Matching(Edge(4 * i, 4 * i + 1) for i in range(s))
    suffix = []
    for i in range(planted):
        suffix.append(Edge(4 * i + 2, 4 * i))      # x_i - a_i
        suffix.append(Edge(4 * i + 1, 4 * i + 3))  # b_i - y_i
    if distractors and s >= 2:
        suffix.append(Edge(0, 5))           # matched-matched: ignored
        suffix.append(Edge(2, 0))           # repeat of a planted wing: idempotent
        suffix.append(Edge(4 * s + 1, 0))   # extra wing, fresh free vertex
        if planted >= 2:
            suffix.append(Edge(2, 6))       # free-free: ignored
    return PlantedAugInstance(
        matching=M,
        suffix=tuple(fisher_yates(suffix, rng)),
        planted=planted,
    )


# ---------------------------------------------------------------------------
# matching-pair sampler for the non-3-augmentable bound


def sample_matching_pair(seed: int) -> tuple[Matching, Matching]:
    """(M, M*) with |M| <= (1/2 + alpha)|M*|, M maximal in the union graph.

    Built from disjoint blocks: T3 (3-augmenting path: M center, two M*
    wings), TC (an edge in both matchings), P5 (a 5-edge alternating path
    starting and ending in M*; its 2 M-edges are non-3-augmentable), C4
    (alternating 4-cycle), ISO (an M-edge off M*'s support).  Block counts
    obey c3 >= 12*cc + 11*c5 + 24*c4 + 25*ciso, which at alpha = 1/50 is
    exactly the size hypothesis.
    """
    rng = PhiloxRNG(seed)
    c3 = 20 + rng.randbelow(41)
    while True:
        cc = rng.randbelow(4)
        c5 = rng.randbelow(4)
        c4 = rng.randbelow(3)
        ciso = rng.randbelow(2)
        if 12 * cc + 11 * c5 + 24 * c4 + 25 * ciso <= c3:
            break
    m_edges: list[Edge] = []
    ms_edges: list[Edge] = []
    fresh = iter(range(10**6))

    def nxt() -> int:
        return next(fresh)

    for _ in range(c3):
        x, a, b, y = nxt(), nxt(), nxt(), nxt()
        m_edges.append(Edge(a, b))
        ms_edges.extend([Edge(x, a), Edge(b, y)])
    for _ in range(cc):
        a, b = nxt(), nxt()
        m_edges.append(Edge(a, b))
        ms_edges.append(Edge(a, b))
    for _ in range(c5):
        u = [nxt() for _ in range(6)]
        ms_edges.extend([Edge(u[0], u[1]), Edge(u[2], u[3]), Edge(u[4], u[5])])
        m_edges.extend([Edge(u[1], u[2]), Edge(u[3], u[4])])
    for _ in range(c4):
        u = [nxt() for _ in range(4)]
        ms_edges.extend([Edge(u[0], u[1]), Edge(u[2], u[3])])
        m_edges.extend([Edge(u[1], u[2]), Edge(u[3], u[0])])
    for _ in range(ciso):
        m_edges.append(Edge(nxt(), nxt()))
    alpha = MatchConfig().alpha
    M, M_star = Matching(m_edges), Matching(ms_edges)
    if len(M) > (Fraction(1, 2) + alpha) * len(M_star):
        raise InvalidInstanceError("sampler violated its own size hypothesis")
    return M, M_star


def random_edge_stream(
    seed: int, max_edges: int = 15, n_vertices: int = 10
) -> list[Edge]:
    """Random edge stream (repeats allowed) for robustness checks."""
    if n_vertices < 2:
        raise PreconditionError("need n_vertices >= 2")
    rng = PhiloxRNG(seed)
    count = 1 + rng.randbelow(max_edges)
    out = []
    while len(out) < count:
        u = rng.randbelow(n_vertices)
        v = rng.randbelow(n_vertices)
        if u != v:
            out.append(Edge(u, v))
    return out
