"""Prefix-tree streaming: structure, bucketing, guessing, leaf traces."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from injectstream.errors import (
    InvalidInstanceError,
    InvariantError,
    PreconditionError,
)
from injectstream.stream_model import (
    Element,
    InjectionPlan,
    InstanceSplit,
    build_stream,
    enumerate_streams,
)
from injectstream.submodular import (
    CoverageInstance,
    CoverageOracle,
    brute_force_opt,
    figure2_instance,
)
from injectstream.tree_stream import (
    ExactKeys,
    GuessManager,
    IncreaseBuckets,
    PrefixTree,
    RunStats,
    analysis_leaf_trace,
    best_solution,
    guess_run,
    live_guess_bound,
    node_count_bound,
    run_tree_stream,
    tree_process,
)


def stream_of(*ids):
    return [Element(i) for i in ids]


@pytest.fixture
def fig2_oracle():
    instance, k = figure2_instance()
    return CoverageOracle(instance), k


# ---------------------------------------------------------------- structure


def test_figure2_full_tree(fig2_oracle):
    """The worked four-rectangle example, node by node."""
    oracle, k = fig2_oracle
    tree = PrefixTree(k)
    for e in stream_of("A", "B", "C", "D"):
        tree_process(tree, e, oracle)

    root = tree.root
    gains = {eid: child.gain for eid, child in (
        (c.element.id, c) for c in root.children.values()
    )}
    assert gains == {"A": 2, "B": 4, "D": 1}

    node_a = next(c for c in root.children.values() if c.element.id == "A")
    gains_a = {c.element.id: c.gain for c in node_a.children.values()}
    assert gains_a == {"B": 3, "C": 2, "D": 1}

    node_b = next(c for c in root.children.values() if c.element.id == "B")
    gains_b = {c.element.id: c.gain for c in node_b.children.values()}
    assert gains_b == {"C": 1}

    node_d = next(c for c in root.children.values() if c.element.id == "D")
    assert node_d.children == {}

    assert tree.live_node_count == 8
    best = best_solution(tree)
    assert best.value == 5
    # {B,C} also scores 5 but {A,B} was created earlier
    assert best.elements == frozenset({"A", "B"})


def test_snapshot_no_same_element_chains(fig2_oracle):
    """A child created for e is never extended by the same arrival of e."""
    oracle, _ = fig2_oracle
    tree = PrefixTree(2)
    tree_process(tree, Element("A"), oracle)
    assert [c.element.id for c in tree.root.children.values()] == ["A"]
    a = next(iter(tree.root.children.values()))
    assert a.children == {}


def test_duplicate_arrival_skipped_on_own_path(fig2_oracle):
    oracle, _ = fig2_oracle
    tree = PrefixTree(2)
    for e in stream_of("A", "B", "A"):
        tree_process(tree, e, oracle)
    node_a = next(c for c in tree.root.children.values() if c.element.id == "A")
    assert all(c.element.id != "A" for c in node_a.children.values())
    # but A still extends B's branch, where it is not on the path
    node_b = next(c for c in tree.root.children.values() if c.element.id == "B")
    assert any(c.element.id == "A" for c in node_b.children.values())


def test_depth_never_exceeds_k(fig2_oracle):
    oracle, _ = fig2_oracle
    tree = PrefixTree(1)
    for e in stream_of("A", "B", "C", "D"):
        tree_process(tree, e, oracle)
    assert all(n.depth <= 1 for n in tree.nodes)


def test_node_values_match_oracle(fig2_oracle):
    oracle, k = fig2_oracle
    tree = PrefixTree(k)
    for e in stream_of("A", "B", "C", "D"):
        tree_process(tree, e, oracle)
    for n in tree.nodes:
        assert n.value == oracle.evaluate(n.path_ids)
        assert len(n.path_ids) == n.depth


def test_empty_stream_best_is_empty(fig2_oracle):
    oracle, k = fig2_oracle
    tree = PrefixTree(k)
    sol = best_solution(tree)
    assert sol.elements == frozenset() and sol.value == 0


# ---------------------------------------------------------------- bucketing


def test_bucket_widths_exact():
    b = IncreaseBuckets(g=8, k=4, delta="0.1")
    assert b.bucket_count == 40
    assert b.width == Fraction(1, 5)
    assert b.key(1) == 5
    assert b.key(Fraction(1, 5)) == 1
    # gains at or above g land in the clamp bucket
    assert b.key(8) == 40
    assert b.key(100) == 40


def test_bucket_guards():
    with pytest.raises(PreconditionError):
        IncreaseBuckets(g=1, k=2, delta="0")
    with pytest.raises(PreconditionError):
        IncreaseBuckets(g=1, k=2, delta="1.5")
    with pytest.raises(InvariantError):
        IncreaseBuckets(g=0, k=2, delta="0.5")
    IncreaseBuckets(g=1, k=2, delta="1")  # delta = 1 is legal


def test_node_count_bound_values():
    assert node_count_bound(1, "1") == 4  # 1 + 3
    assert node_count_bound(3, "0.2") == 5220
    assert node_count_bound(2, "0.5") == 1 + 6 + 36
    # independent of any stream parameter by construction
    assert node_count_bound(3, 0.2) == 5220


def test_bucketed_tree_within_bound(fig2_oracle):
    oracle, k = fig2_oracle
    stats = RunStats()
    run_tree_stream(stream_of("A", "B", "C", "D"), k, "0.5", oracle,
                    mode="bucketed", g=5, stats=stats)
    assert 0 < stats.nodes_live_max <= node_count_bound(k, "0.5")
    assert stats.oracle_calls > 0


def test_run_tree_stream_modes(fig2_oracle):
    oracle, k = fig2_oracle
    s = stream_of("A", "B", "C", "D")
    exact = run_tree_stream(s, k, "0.1", oracle, mode="exact")
    assert exact.value == 5
    bucketed = run_tree_stream(s, k, "0.1", oracle, mode="bucketed", g=5)
    assert bucketed.value >= 4  # (1/2 - delta) * OPT floor is 2; realized run does better
    with pytest.raises(PreconditionError):
        run_tree_stream(s, k, "0.1", oracle, mode="bucketed")  # g missing
    with pytest.raises(PreconditionError):
        run_tree_stream(s, k, "0.1", oracle, mode="nope")


# ---------------------------------------------------------------- guessing


def test_live_guess_bound_value():
    # ceil(log_{1.1}(4 * 1.1 / 0.1)) = ceil(39.69...) = 40
    assert live_guess_bound(4, 0.1) == 40
    assert live_guess_bound(3, 0.2) == 16


def test_guess_window_hits_bound_exactly():
    """A singleton of value 1 makes the window [1/(1+d), k/d] with 40 guesses."""
    mgr = GuessManager(4, 0.1)
    mgr.observe(1)
    assert len(mgr.runs) == live_guess_bound(4, 0.1)
    js = sorted(mgr.runs)
    base = 1.1
    assert js[0] == -1  # (1.1)^-1 is the smallest power >= 1/1.1
    assert base ** js[-1] <= 40.0 + 1e-9


def test_guess_manager_dismisses_low_guesses():
    mgr = GuessManager(2, 0.5)
    mgr.observe(1)
    low = min(mgr.runs)
    mgr.observe(1000)
    assert low not in mgr.runs
    assert len(mgr.runs) <= live_guess_bound(2, 0.5)


def test_guess_run_matches_exact_on_figure2(fig2_oracle):
    oracle, k = fig2_oracle
    stats = RunStats()
    sol = guess_run(stream_of("A", "B", "C", "D"), k, 0.1, oracle, stats=stats)
    assert sol.value >= 4
    assert stats.guess_mode == "auto"
    assert 0 < stats.guesses_live_max <= live_guess_bound(k, 0.1)


def test_guess_manager_rejects_bad_delta():
    with pytest.raises(PreconditionError):
        GuessManager(2, 0.0)
    with pytest.raises(PreconditionError):
        GuessManager(2, 1.0)


# ---------------------------------------------------------------- leaf trace


def disjoint_blocks_instance():
    """Three 27-point blocks; noise overlaps every block so marginals tie.

    With all noise injected at slot 0, the interval greedy picks n1, n2, n3
    for every permutation and lands exactly on (1 - (1 - 1/k)^k) * OPT:
    57 = 81 * (1 - (2/3)^3).
    """
    rects = {}
    universe = list(range(81))
    blocks = [universe[27 * b: 27 * (b + 1)] for b in range(3)]
    for b in range(3):
        rects[f"g{b}"] = frozenset(blocks[b])
    rects["n1"] = frozenset(p for blk in blocks for p in blk[:9])
    rects["n2"] = frozenset(p for blk in blocks for p in blk[9:15])
    rects["n3"] = frozenset(p for blk in blocks for p in blk[15:19])
    inst = CoverageInstance(rects)
    split = InstanceSplit(
        good=tuple(Element(f"g{b}") for b in range(3)),
        noise=(Element("n1"), Element("n2"), Element("n3")),
    )
    plan = InjectionPlan(((0, "n1"), (0, "n2"), (0, "n3")))
    return inst, split, plan


def test_disjoint_case_trace_is_tight_for_every_permutation():
    inst, split, plan = disjoint_blocks_instance()
    oracle = CoverageOracle(inst)
    opt = brute_force_opt(oracle, inst.ground_set(), 3)
    assert opt.value == 81 and opt.elements == frozenset({"g0", "g1", "g2"})
    for s in enumerate_streams(split, plan):
        trace = analysis_leaf_trace(s, {"g0", "g1", "g2"}, oracle, 3)
        assert [e.id for e in trace.elements] == ["n1", "n2", "n3"]
        assert trace.final_value == 57  # 81 * (1 - (2/3)^3), the disjoint-case floor
        # and the tree, holding every greedy path, can only do better
        tree_best = run_tree_stream(s, 3, "0.1", oracle, mode="exact")
        assert tree_best.value >= trace.final_value


def test_trace_path_exists_in_exact_tree(fig2_oracle):
    oracle, k = fig2_oracle
    split = InstanceSplit(
        good=(Element("A"), Element("B")),
        noise=(Element("C"), Element("D")),
    )
    plan = InjectionPlan(((0, "C"), (1, "D")))
    for s in enumerate_streams(split, plan):
        trace = analysis_leaf_trace(s, {"A", "B"}, oracle, k)
        tree = PrefixTree(k)
        for e in s:
            tree_process(tree, e, oracle)
        node = tree.root
        for e in trace.elements:
            node = next(c for c in node.children.values() if c.element.id == e.id)
        assert node.value == trace.final_value


def test_trace_prefix_values_monotone(fig2_oracle):
    oracle, k = fig2_oracle
    split = InstanceSplit(good=(Element("A"), Element("B")),
                          noise=(Element("C"),))
    s = build_stream(split, InjectionPlan(((0, "C"),)), seed=1)
    trace = analysis_leaf_trace(s, {"A", "B"}, oracle, k)
    assert trace.prefix_values[0] == 0
    assert list(trace.prefix_values) == sorted(trace.prefix_values)
    assert list(trace.positions) == sorted(trace.positions)


def test_trace_requires_opt_in_stream(fig2_oracle):
    oracle, _ = fig2_oracle
    split = InstanceSplit(good=(Element("A"),))
    s = build_stream(split, InjectionPlan(), seed=0)
    with pytest.raises(InvalidInstanceError):
        analysis_leaf_trace(s, {"A", "B"}, oracle, 2)


# ------------------------------------------------------- randomized properties


coverage_instances = st.dictionaries(
    st.integers(0, 7),
    st.frozensets(st.integers(0, 9), min_size=0, max_size=4),
    min_size=2,
    max_size=8,
).map(CoverageInstance)


@given(coverage_instances, st.integers(1, 3), st.integers(0, 500))
@settings(max_examples=60, deadline=None)
def test_bucketed_paths_are_exact_paths(inst, k, seed):
    """Coarser keys only dedup harder: the bucketed node set is a subset of
    the exact node set on the same stream, so exact best >= bucketed best."""
    oracle = CoverageOracle(inst)
    members = sorted(inst.rect_of, key=repr)
    split = InstanceSplit(good=tuple(Element(m) for m in members))
    s = build_stream(split, InjectionPlan(), seed)
    opt = brute_force_opt(oracle, inst.ground_set(), k)
    if opt.value == 0:
        return
    exact_tree = PrefixTree(k, ExactKeys())
    bucket_tree = PrefixTree(k, IncreaseBuckets(opt.value, k, "0.25"))
    exact_paths = {frozenset()}
    for e in s:
        tree_process(exact_tree, e, oracle)
        tree_process(bucket_tree, e, oracle)
    exact_paths = {n.path_ids for n in exact_tree.nodes}
    assert {n.path_ids for n in bucket_tree.nodes} <= exact_paths
    assert best_solution(exact_tree).value >= best_solution(bucket_tree).value


@given(coverage_instances, st.integers(1, 3), st.integers(0, 500))
@settings(max_examples=40, deadline=None)
def test_exact_run_finds_at_least_half_opt(inst, k, seed):
    oracle = CoverageOracle(inst)
    members = sorted(inst.rect_of, key=repr)
    split = InstanceSplit(good=tuple(Element(m) for m in members))
    s = build_stream(split, InjectionPlan(), seed)
    opt = brute_force_opt(oracle, inst.ground_set(), k)
    best = run_tree_stream(s, k, "0.1", oracle, mode="exact")
    assert 2 * best.value >= opt.value


@given(coverage_instances, st.integers(1, 3), st.integers(0, 200))
@settings(max_examples=30, deadline=None)
def test_guess_bound_respected_everywhere(inst, k, seed):
    oracle = CoverageOracle(inst)
    members = sorted(inst.rect_of, key=repr)
    split = InstanceSplit(good=tuple(Element(m) for m in members))
    s = build_stream(split, InjectionPlan(), seed)
    stats = RunStats()
    guess_run(s, k, 0.2, oracle, stats=stats)
    assert stats.guesses_live_max <= live_guess_bound(k, 0.2)
