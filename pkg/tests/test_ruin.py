from __future__ import annotations

import numpy as np
import pytest

from enlab.errors import InvalidDrift
from enlab.poisson_mc import ruin_mc
from enlab.ruin import RuinOracle, irwin_hall_cdf, irwin_hall_sf


def test_irwin_hall_small_orders():
    # one uniform: cdf is the identity on (0, 1)
    xs = np.array([0.0, 0.25, 0.5, 0.99, 1.0, 2.0])
    assert np.allclose(irwin_hall_cdf(1, xs), [0, 0.25, 0.5, 0.99, 1, 1])
    # two uniforms: triangular law
    assert abs(irwin_hall_cdf(2, np.array([1.0]))[0] - 0.5) < 1e-14
    assert abs(irwin_hall_cdf(2, np.array([0.5]))[0] - 0.125) < 1e-14
    # symmetry of the survival function
    assert abs(irwin_hall_sf(3, np.array([1.2]))[0]
               - irwin_hall_cdf(3, np.array([1.8]))[0]) < 1e-13


def test_irwin_hall_extremes_are_stable():
    # far tails of high orders must come out tiny and nonnegative
    v = irwin_hall_sf(80, np.array([75.0]))[0]
    assert 0 <= v < 1e-30
    v = irwin_hall_sf(80, np.array([5.0]))[0]
    assert 1 - v < 1e-20


@pytest.mark.parametrize("mu", [1.5, 2.0, 4.0])
def test_psi_at_zero_is_reciprocal_drift(mu):
    oracle = RuinOracle(mu)
    assert abs(oracle.psi(0.0) - 1.0 / mu) < 1e-10


def test_psi_monotone_and_vanishing():
    oracle = RuinOracle(2.0)
    us = np.linspace(0, 12, 60)
    vals = oracle.psi_many(us)
    assert np.all(np.diff(vals) <= 1e-15)
    assert np.all(vals >= 0) and np.all(vals <= 1)
    assert vals[-1] < 1e-5
    assert oracle.psi(40.0) < 1e-12


def test_psi_decreases_in_drift():
    # for fixed u, a faster premium stream makes ruin rarer
    vals = [RuinOracle(mu).psi(1.0) for mu in (1.2, 1.5, 2.0, 4.0, 16.0)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-2


def test_invalid_drift():
    with pytest.raises(InvalidDrift):
        RuinOracle(1.0)
    with pytest.raises(InvalidDrift):
        RuinOracle(0.5)


def test_tail_level():
    oracle = RuinOracle(2.0)
    level = oracle.tail_level(1e-6)
    assert oracle.psi(level) <= 1e-6
    assert oracle.psi(level * 0.9) > 1e-6


@pytest.mark.parametrize("mu", [1.5, 2.0])
def test_ruin_mc_matches_series(mu):
    us = np.array([0.0, 0.5, 1.0, 2.0])
    freq, se = ruin_mc(mu, us, 120_000, seed=20)
    pk = RuinOracle(mu).psi_many(us)
    assert np.all(np.abs(freq - pk) <= 3 * se)


def test_ruin_mc_deterministic_and_thread_safe():
    us = np.array([0.0, 1.0])
    one = ruin_mc(2.0, us, 30_000, seed=4, threads=1)
    two = ruin_mc(2.0, us, 30_000, seed=4, threads=3)
    assert np.array_equal(one[0], two[0])
    assert np.array_equal(one[1], two[1])
