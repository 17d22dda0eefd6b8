from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from enlab.errors import (
    DimensionMismatch,
    NonRefiningFiltration,
    NotAdapted,
    ProbabilityNotOne,
    ZeroProbabilityOutcome,
)
from enlab.finite_prob import (
    AdaptedProcess,
    adapted,
    angle_bracket,
    bracket,
    build_space,
    compensator,
    cond_exp,
    constant_process,
    dual_optional_projection,
    is_martingale,
    is_positive,
    optional_projection,
    predictable,
    predictable_projection,
    stochastic_exponential,
    stochastic_integral,
)
from enlab.random_times import generate_honest_model

from .conftest import TREE

Q = Fraction


def test_build_space_valid(tree_space):
    assert tree_space.horizon == 2
    assert sum(tree_space.prob.values()) == 1
    assert tree_space.filtration.partitions[0] == (("dd", "du", "ud", "uu"),)


def test_build_space_rejects_bad_inputs():
    bad = dict(TREE, prob={o: "1/3" for o in TREE["outcomes"]})
    with pytest.raises(ProbabilityNotOne):
        build_space(bad)

    bad = dict(TREE, prob={"uu": "0", "ud": "1/2", "du": "1/4", "dd": "1/4"})
    with pytest.raises(ZeroProbabilityOutcome):
        build_space(bad)

    # P_2 not refining P_1
    bad = dict(TREE, partitions=[
        [["uu", "ud", "du", "dd"]],
        [["uu", "ud"], ["du", "dd"]],
        [["uu", "du"], ["ud"], ["dd"]],
    ])
    with pytest.raises(NonRefiningFiltration):
        build_space(bad)


def test_adaptedness_is_checked(tree_space):
    with pytest.raises(NotAdapted):
        adapted({"uu": [0, 1, 2], "ud": [0, 2, 0],
                 "du": [0, -1, 0], "dd": [0, -1, -2]}, tree_space)


def test_cond_exp_constant_and_terminal(tree_space):
    c = {o: Q(7, 3) for o in tree_space.outcomes}
    assert cond_exp(c, 1, tree_space) == c

    x = {"uu": Q(1), "ud": Q(2), "du": Q(3), "dd": Q(4)}
    assert cond_exp(x, 2, tree_space) == x


def test_cond_exp_indicator(tree_space):
    ind = {o: Q(1 if o == "uu" else 0) for o in tree_space.outcomes}
    col = cond_exp(ind, 1, tree_space)
    assert col["uu"] == col["ud"] == Q(1, 2)
    assert col["du"] == col["dd"] == 0


def test_optional_projection_idempotent_on_adapted(tree_space, walk):
    proj = optional_projection(walk.values, tree_space)
    assert proj.values == walk.values


def test_optional_projection_of_occupation_indicators(tree_space, tent_analysis):
    # projecting the pre-time and at-or-pre-time indicators recovers the
    # two survival processes of the random time
    tau = tent_analysis.tau
    before = {o: [Q(1 if t < tau[o] else 0) for t in range(3)]
              for o in tree_space.outcomes}
    at_or_before = {o: [Q(1 if t <= tau[o] else 0) for t in range(3)]
                    for o in tree_space.outcomes}
    assert optional_projection(before, tree_space).values == \
        tent_analysis.survival.values
    assert optional_projection(at_or_before, tree_space).values == \
        tent_analysis.survival_incl.values


def test_predictable_projection(tree_space, walk):
    # martingale increments project to zero
    deltas = {o: [Q(0)] + [walk.delta(o, t) for t in (1, 2)]
              for o in tree_space.outcomes}
    proj = predictable_projection(deltas, tree_space)
    for o in tree_space.outcomes:
        assert proj.at(o, 1) == 0 and proj.at(o, 2) == 0

    # indicator of the terminal middle outcomes, conditioned one step back
    ind = {o: [Q(0), Q(0), Q(1 if o in ("ud", "du") else 0)]
           for o in tree_space.outcomes}
    proj = predictable_projection(ind, tree_space)
    for o in tree_space.outcomes:
        assert proj.at(o, 2) == Q(1, 2)


def test_compensator_deterministic_and_martingale(tree_space, walk):
    det = constant_process(0, tree_space)
    det = AdaptedProcess({o: [Q(0), Q(2), Q(5)] for o in tree_space.outcomes})
    assert compensator(det, tree_space).values == det.values

    qv = bracket(walk, walk)
    comp = compensator(qv, tree_space)
    for o in tree_space.outcomes:
        assert [comp.at(o, t) for t in range(3)] == [0, 1, 2]

    assert compensator(walk, tree_space).values == \
        constant_process(0, tree_space).values


def test_compensator_property(tree_space, walk):
    qv = bracket(walk, walk)
    diff = qv - compensator(qv, tree_space)
    assert is_martingale(diff, tree_space).ok


def test_dual_optional_projection(tree_space, stop_analysis):
    # adapted increasing input is returned unchanged
    inc = AdaptedProcess({o: [Q(0), Q(1), Q(3)] for o in tree_space.outcomes})
    assert dual_optional_projection(inc, tree_space).values == inc.values

    # deterministic time 1: occurrence projection (0, 1, 1)
    proj = stop_analysis.occurrence_proj
    for o in tree_space.outcomes:
        assert [proj.at(o, t) for t in range(3)] == [0, 1, 1]


def test_dual_optional_projection_tent(tent_analysis, tree_space):
    proj = tent_analysis.occurrence_proj
    for o in tree_space.outcomes:
        assert proj.at(o, 0) == Q(1, 2)
        assert proj.at(o, 1) == Q(1, 2)
        expected = Q(3, 2) if o in ("ud", "du") else Q(1, 2)
        assert proj.at(o, 2) == expected


def test_bracket(tree_space, walk):
    const = constant_process(3, tree_space)
    assert bracket(walk, const).values == constant_process(0, tree_space).values

    qv = bracket(walk, walk)
    for o in tree_space.outcomes:
        assert [qv.at(o, t) for t in range(3)] == [0, 1, 2]


def test_angle_bracket_of_fundamental(tree_space, tent_analysis):
    m = tent_analysis.fundamental_martingale
    sharp = angle_bracket(m, m, tree_space)
    for o in tree_space.outcomes:
        assert sharp.at(o, 2) - sharp.at(o, 1) == Q(1, 4)


def test_stochastic_integral(tree_space, walk):
    ones = predictable({o: [Q(1)] * 3 for o in tree_space.outcomes}, tree_space)
    assert stochastic_integral(ones, walk).values == walk.values  # X_0 = 0

    zeros = predictable({o: [Q(0)] * 3 for o in tree_space.outcomes}, tree_space)
    assert stochastic_integral(zeros, walk).values == \
        constant_process(0, tree_space).values

    last_step = predictable({o: [Q(0), Q(0), Q(1)] for o in tree_space.outcomes},
                            tree_space)
    integral = stochastic_integral(last_step, walk)
    for o in tree_space.outcomes:
        assert integral.at(o, 1) == 0
        assert integral.at(o, 2) == walk.delta(o, 2)

    with pytest.raises(DimensionMismatch):
        stochastic_integral([ones, ones], walk)


def test_stochastic_exponential(tree_space, walk):
    zero = constant_process(0, tree_space)
    assert stochastic_exponential(zero).values == \
        constant_process(1, tree_space).values

    # an increment of -1 sends the exponential to 0, where it stays
    drop = AdaptedProcess({o: [Q(0), Q(-1), Q(-1)] for o in tree_space.outcomes})
    exp = stochastic_exponential(drop)
    for o in tree_space.outcomes:
        assert [exp.at(o, t) for t in range(3)] == [1, 0, 0]
    assert not is_positive(exp)


def test_yor_product_formula(tree_space, walk, tent_analysis):
    # E(X)E(Y) = E(X + Y + [X,Y]) exactly
    m = tent_analysis.fundamental_martingale
    x = walk
    y = m - constant_process(1, tree_space)
    lhs = stochastic_exponential(x) * stochastic_exponential(y)
    rhs = stochastic_exponential(x + y + bracket(x, y))
    assert lhs.values == rhs.values


def test_is_martingale(tree_space, walk, tent_analysis):
    assert is_martingale(walk, tree_space).ok
    assert is_martingale(tent_analysis.fundamental_martingale, tree_space).ok

    drift = AdaptedProcess({o: [Q(t) for t in range(3)]
                            for o in tree_space.outcomes})
    report = is_martingale(drift, tree_space)
    assert not report.ok
    assert report.t == 1 and report.drift == 1


# ---------------------------------------------------------------------------
# Properties over generated models
# ---------------------------------------------------------------------------

@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=1, max_value=10 ** 6))
def test_projection_consistency(seed):
    space, tau, _ = generate_honest_model(seed, depth=3, branching=3)
    raw = {o: [Q((hash((o, t)) % 7) - 3) for t in range(space.horizon + 1)]
           for o in space.outcomes}
    for proj in (optional_projection(raw, space),
                 predictable_projection(raw, space)):
        for t in range(space.horizon + 1):
            lhs = sum(space.prob[o] * proj.at(o, t) for o in space.outcomes)
            rhs = sum(space.prob[o] * raw[o][t] for o in space.outcomes)
            assert lhs == rhs


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=1, max_value=10 ** 6))
def test_compensator_yields_martingale(seed):
    space, tau, asset = generate_honest_model(seed, depth=3, branching=3)
    fv = bracket(asset, asset)
    assert is_martingale(fv - compensator(fv, space), space).ok


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=1, max_value=10 ** 6))
def test_yoeurp_identity(seed):
    # compensator of a predictable-integrand martingale integral is zero
    space, tau, asset = generate_honest_model(seed, depth=3, branching=3)
    mart = asset - compensator(asset, space)
    integrand = predictable(
        {o: [Q(0)] + [mart.at(o, t - 1) for t in range(1, space.horizon + 1)]
         for o in space.outcomes}, space)
    integral = stochastic_integral(integrand, mart)
    comp = compensator(integral, space)
    assert all(v == 0 for row in comp.values.values() for v in row)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=1, max_value=10 ** 6))
def test_dual_optional_identity_on_adapted(seed):
    space, tau, asset = generate_honest_model(seed, depth=3, branching=3)
    inc = bracket(asset, asset)  # adapted, nondecreasing
    assert dual_optional_projection(inc, space).values == inc.values
