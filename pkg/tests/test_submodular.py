"""Oracle values, brute-force optimum, and the axiom checker."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from injectstream.errors import (
    InvariantError,
    PreconditionError,
    SizeLimitError,
)
from injectstream.submodular import (
    AdditiveOracle,
    CoverageInstance,
    CoverageOracle,
    GroundSet,
    SubmodularOracle,
    WeightedCoverageOracle,
    brute_force_opt,
    figure2_instance,
    marginal,
    read_coverage_instance,
    verify_axioms,
    write_coverage_instance,
)


class DictOracle(SubmodularOracle):
    """Arbitrary set function from a table; used to exercise violation paths."""

    def __init__(self, table):
        super().__init__()
        self.table = {frozenset(k): v for k, v in table.items()}

    def _eval(self, ids: frozenset):
        return self.table[ids]


@pytest.fixture
def fig2():
    instance, k = figure2_instance()
    return instance, k, CoverageOracle(instance)


def test_figure2_values(fig2):
    instance, k, oracle = fig2
    assert k == 2
    assert oracle.evaluate(frozenset()) == 0
    assert oracle.evaluate({"A"}) == 2
    assert oracle.evaluate({"B"}) == 4
    assert oracle.evaluate({"C"}) == 2
    assert oracle.evaluate({"D"}) == 1
    assert oracle.evaluate({"A", "B"}) == 5
    assert oracle.evaluate({"B", "C"}) == 5
    assert oracle.evaluate({"A", "B", "C", "D"}) == 6


def test_marginals_and_call_counter(fig2):
    _, _, oracle = fig2
    before = oracle.call_counter
    assert marginal(oracle, "C", {"A", "B"}) == 1
    assert oracle.call_counter == before + 2
    base = oracle.evaluate(frozenset({"A"}))
    assert oracle.marginal_from("B", frozenset({"A"}), base) == 3
    assert oracle.call_counter == before + 4
    with pytest.raises(PreconditionError):
        oracle.marginal_from("A", frozenset({"A"}), base)


def test_brute_force_opt_figure2(fig2):
    instance, k, oracle = fig2
    sol = brute_force_opt(oracle, instance.ground_set(), k)
    assert sol.value == 5
    # {A,B} and {B,C} tie at 5; lexicographic tie-break keeps {A,B}
    assert sol.elements == frozenset({"A", "B"})


def test_brute_force_opt_prefers_smaller_sets():
    inst = CoverageInstance({"X": frozenset({1, 2}), "Y": frozenset({1}), "Z": frozenset({2})})
    oracle = CoverageOracle(inst)
    sol = brute_force_opt(oracle, inst.ground_set(), 2)
    assert sol.value == 2
    assert sol.elements == frozenset({"X"})


def test_brute_force_opt_guard_and_edge_cases(fig2):
    instance, _, oracle = fig2
    empty = brute_force_opt(oracle, instance.ground_set(), 0)
    assert empty.elements == frozenset() and empty.value == 0
    big = CoverageInstance({i: frozenset({i}) for i in range(30)})
    with pytest.raises(SizeLimitError):
        brute_force_opt(CoverageOracle(big), big.ground_set(), 15)


def test_ground_set_rejects_duplicates():
    with pytest.raises(InvariantError):
        GroundSet(("a", "a"))


def test_verify_axioms_passes_on_coverage(fig2):
    instance, _, oracle = fig2
    report = verify_axioms(oracle, instance.ground_set())
    assert report.ok and report.exhaustive


def test_verify_axioms_catches_violations():
    ground = GroundSet(("a", "b"))
    norm = DictOracle({(): 1, ("a",): 1, ("b",): 1, ("a", "b"): 1})
    assert verify_axioms(norm, ground).normalization_violation

    mono = DictOracle({(): 0, ("a",): 1, ("b",): 0, ("a", "b"): 0})
    rep = verify_axioms(mono, ground)
    assert rep.monotonicity_violations and not rep.ok

    # f(a)+f(b) < f(ab)+f(empty) is supermodular
    sup = DictOracle({(): 0, ("a",): 0, ("b",): 0, ("a", "b"): 1})
    rep = verify_axioms(sup, ground)
    assert rep.submodularity_violations and not rep.ok


def test_verify_axioms_sampled_mode():
    inst = CoverageInstance({i: frozenset({i, (i + 1) % 20}) for i in range(20)})
    report = verify_axioms(CoverageOracle(inst), inst.ground_set(), sample_pairs=300, seed=5)
    assert report.ok and not report.exhaustive


def test_weighted_coverage_exact_fractions():
    inst = CoverageInstance({"a": frozenset({1, 2}), "b": frozenset({2, 3})})
    w = {1: Fraction(1, 3), 2: Fraction(1, 7), 3: 2}
    oracle = WeightedCoverageOracle(inst, w)
    assert oracle.evaluate({"a"}) == Fraction(10, 21)
    assert oracle.evaluate({"a", "b"}) == Fraction(10, 21) + 2
    assert verify_axioms(oracle, inst.ground_set()).ok


def test_weighted_coverage_rejects_negative_weight():
    inst = CoverageInstance({"a": frozenset({1})})
    with pytest.raises(InvariantError):
        WeightedCoverageOracle(inst, {1: -0.5})


def test_additive_oracle():
    oracle = AdditiveOracle({"x": 2, "y": 3, "z": 5})
    assert oracle.evaluate({"x", "z"}) == 7
    assert verify_axioms(oracle, GroundSet(("x", "y", "z"))).ok


def test_coverage_round_trip(tmp_path, fig2):
    instance, _, _ = fig2
    path = tmp_path / "cov.json"
    write_coverage_instance(path, instance)
    back = read_coverage_instance(path)
    assert back.rect_of == instance.rect_of


coverage_instances = st.dictionaries(
    st.integers(0, 5),
    st.frozensets(st.integers(0, 7), max_size=4),
    min_size=1,
    max_size=6,
).map(CoverageInstance)


@given(coverage_instances)
@settings(max_examples=80, deadline=None)
def test_random_coverage_satisfies_axioms(inst):
    oracle = CoverageOracle(inst)
    assert verify_axioms(oracle, inst.ground_set()).ok


@given(coverage_instances, st.integers(1, 3))
@settings(max_examples=60, deadline=None)
def test_brute_force_dominates_greedy(inst, k):
    oracle = CoverageOracle(inst)
    ground = inst.ground_set()
    opt = brute_force_opt(oracle, ground, k)
    chosen: set = set()
    for _ in range(min(k, ground.n)):
        rest = [e for e in ground.members if e not in chosen]
        gains = {e: marginal(oracle, e, chosen) for e in rest}
        best = max(sorted(rest, key=repr), key=lambda e: gains[e])
        chosen.add(best)
    assert opt.value >= oracle.evaluate(chosen)
