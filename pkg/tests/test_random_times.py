from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from enlab.errors import GenerationExhausted, SchemaError
from enlab.finite_prob import build_space, is_martingale
from enlab.random_times import (
    RandomTimeMap,
    analyze,
    enlarge,
    generate_honest_model,
)

Q = Fraction


def test_stop_analysis(tree_space, stop_analysis):
    a = stop_analysis
    assert a.is_stopping_time and a.honest and a.class_h
    for o in tree_space.outcomes:
        assert [a.survival.at(o, t) for t in range(3)] == [1, 0, 0]
        assert a.survival_incl.at(o, 1) == 1
        # stopping times sit at survival zero when they occur
        assert a.survival.at(o, a.tau[o]) == 0
    assert a.jump_set == ()


def test_tent_analysis(tree_space, tent_analysis):
    a = tent_analysis
    assert a.honest and a.class_h and not a.is_stopping_time
    for o in tree_space.outcomes:
        assert a.survival.at(o, 0) == Q(1, 2)
        assert a.survival.at(o, 1) == Q(1, 2)
        assert a.survival.at(o, 2) == 0
        assert a.survival_incl.at(o, 0) == 1
        assert a.survival_incl.at(o, 1) == Q(1, 2)
        assert a.survival_incl.at(o, 2) == (1 if o in ("ud", "du") else 0)
        m = a.fundamental_martingale
        assert m.at(o, 0) == 1 and m.at(o, 1) == 1
        assert m.at(o, 2) == Q(1, 2) + (1 if o in ("ud", "du") else 0)
    assert a.jump_set == ((2, ("du",)), (2, ("ud",)))
    assert is_martingale(a.fundamental_martingale, tree_space).ok


def test_survival_is_supermartingale(tree_space, tent_analysis):
    a = tent_analysis
    f = tree_space.filtration
    for t in (1, 2):
        for block, weight in zip(f.partitions[t - 1], f.weights[t - 1]):
            drift = sum(tree_space.prob[o] * a.survival.delta(o, t)
                        for o in block)
            assert drift <= 0


def test_non_honest_fixture_depth3():
    # two outcomes sharing a depth-2 atom carry different past values of
    # the time, so no measurable version can recover it
    space = build_space({
        "outcomes": ["a", "b", "c", "d"],
        "prob": {"a": "1/4", "b": "1/4", "c": "1/4", "d": "1/4"},
        "partitions": [
            [["a", "b", "c", "d"]],
            [["a", "b"], ["c", "d"]],
            [["a", "b"], ["c", "d"]],
            [["a"], ["b"], ["c"], ["d"]],
        ],
    })
    tau = RandomTimeMap.build({"a": 0, "b": 1, "c": 3, "d": 3}, space)
    analysis = analyze(space, tau)
    assert not analysis.honest
    assert not analysis.class_h  # class-H requires honesty first


def test_tau_validation(tree_space):
    with pytest.raises(SchemaError):
        RandomTimeMap.build({"uu": 0, "ud": 1, "du": 1}, tree_space)
    with pytest.raises(SchemaError):
        RandomTimeMap.build({"uu": 0, "ud": 1, "du": 1, "dd": 5}, tree_space)


def test_enlarge_stop(tree_space, stop_analysis):
    enlarged = enlarge(tree_space, stop_analysis)
    assert enlarged.partitions == tree_space.filtration.partitions


def test_enlarge_tent(tree_space, tent_analysis):
    enlarged = enlarge(tree_space, tent_analysis)
    assert enlarged.partitions[1] == (("dd",), ("du",), ("ud",), ("uu",))
    assert enlarged.label == "G"


def test_enlarge_time_zero(tree_space):
    zero = RandomTimeMap.build({o: 0 for o in tree_space.outcomes}, tree_space)
    enlarged = enlarge(tree_space, analyze(tree_space, zero))
    assert enlarged.partitions == tree_space.filtration.partitions


def test_generator_determinism():
    one = generate_honest_model(42, depth=4, branching=3)
    two = generate_honest_model(42, depth=4, branching=3)
    assert one[0].prob == two[0].prob
    assert one[1].tau == two[1].tau
    assert one[2].values == two[2].values


def test_generator_vector_asset():
    space, tau, asset = generate_honest_model(17, depth=3, branching=3, d=2)
    assert isinstance(asset, list) and len(asset) == 2
    analysis = analyze(space, tau)
    assert analysis.honest and analysis.class_h
    from enlab.nupbr import nupbr_check, verify_witness
    verdict = nupbr_check(asset, space)
    assert verify_witness(verdict, asset, space)


def test_generator_bounds():
    with pytest.raises(GenerationExhausted):
        generate_honest_model(1, depth=9, branching=3)
    with pytest.raises(GenerationExhausted):
        generate_honest_model(1, depth=3, branching=5)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=1, max_value=10 ** 6))
def test_generated_models_are_honest_class_h(seed):
    space, tau, _ = generate_honest_model(seed, depth=4, branching=3)
    analysis = analyze(space, tau)
    assert analysis.honest and analysis.class_h


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=1, max_value=10 ** 6))
def test_stopping_times_are_honest_class_h_with_zero_survival(seed):
    # first-visit times are stopping times; they must land in the class
    # with survival exactly zero at the time
    space, _, asset = generate_honest_model(seed, depth=4, branching=3)
    level = asset.values[space.outcomes[0]][0]
    tau_map = {}
    for o in space.outcomes:
        hits = [t for t in range(1, space.horizon + 1)
                if asset.values[o][t] <= level - 1]
        tau_map[o] = min(hits) if hits else space.horizon
    tau = RandomTimeMap.build(tau_map, space)
    analysis = analyze(space, tau)
    assert analysis.is_stopping_time
    assert analysis.honest and analysis.class_h
    for o in space.outcomes:
        assert analysis.survival.at(o, tau[o]) == 0


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=1, max_value=10 ** 6))
def test_survival_increment_identity_and_bounds(seed):
    space, tau, _ = generate_honest_model(seed, depth=4, branching=3)
    a = analyze(space, tau)
    for o in space.outcomes:
        for t in range(1, space.horizon + 1):
            assert a.survival_incl.at(o, t) == (
                a.survival.at(o, t - 1) + a.fundamental_martingale.delta(o, t))


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=1, max_value=10 ** 6))
def test_open_interval_equality_after_tau(seed):
    # strictly after the time, the two supermartingales agree on every
    # path whose current atom holds no outcome exiting exactly now
    space, tau, _ = generate_honest_model(seed, depth=4, branching=3)
    a = analyze(space, tau)
    f = space.filtration
    for o in space.outcomes:
        for t in range(tau[o] + 1, space.horizon + 1):
            block = f.block(t, o)
            if any(tau[other] == t for other in block):
                continue
            assert a.survival.at(o, t) == a.survival_incl.at(o, t)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=1, max_value=10 ** 6))
def test_left_survival_gap_bounded_below(seed):
    # finite-horizon form of the local lower bound on 1 - survival_left:
    # over the finitely many atoms with survival < 1 the gap has a
    # strictly positive minimum
    space, tau, _ = generate_honest_model(seed, depth=4, branching=3)
    a = analyze(space, tau)
    gaps = [1 - a.survival.at(o, t)
            for o in space.outcomes for t in range(space.horizon + 1)
            if a.survival.at(o, t) < 1]
    assert gaps and min(gaps) > 0
