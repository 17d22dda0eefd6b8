"""Excursion-ladder demonstration on a scaled random walk.

A symmetric walk with step size sqrt(dt) stands in for Brownian motion.
Ladder times alternate between first passage up to the level eps and
first return to zero; the studied random time is the last completed
return before the walk first reaches one.  With eps, one and zero all
multiples of sqrt(dt) the walk hits the levels exactly, so the ladder
bookkeeping is lattice-exact; everything else here is a diagnostic at
random-walk resolution, not an assertion.

Hitting times of a driftless walk are heavy-tailed, so paths that have
not reached one by the step cap are reported censored rather than
waited out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EnlabError

_BLOCK = 1 << 14
_STREAM_OUTER = 11
_STREAM_INNER = 13


def _sign_blocks(seed: int, *key: int):
    """Infinite stream of +-1 blocks from packed Philox bits."""
    rnd = 0
    while True:
        gen = np.random.Generator(np.random.Philox(
            np.random.SeedSequence(entropy=seed, spawn_key=(*key, rnd))))
        raw = gen.integers(0, 2, size=_BLOCK, dtype=np.int8)
        yield raw * 2 - 1
        rnd += 1


class _Walk:
    """Sequential lattice walk with first-passage queries by block scan."""

    def __init__(self, seed: int, *key: int):
        self._blocks = _sign_blocks(seed, *key)
        self._steps = np.empty(0, dtype=np.int64)
        self._pos = 0  # lattice position after consumed steps
        self._consumed = 0

    def first_passage(self, targets: tuple[int, ...], step_cap: int
                      ) -> tuple[int | None, int]:
        """Advance until the walk sits on one of the target levels.

        Returns (target hit or None when the cap binds, steps consumed).
        """
        while True:
            if self._steps.size == 0:
                self._steps = next(self._blocks)
            path = self._pos + np.cumsum(self._steps)
            hits = np.zeros(path.shape, dtype=bool)
            for level in targets:
                hits |= path == level
            if hits.any():
                idx = int(np.argmax(hits))
                self._pos = int(path[idx])
                self._consumed += idx + 1
                self._steps = self._steps[idx + 1:]
                return self._pos, self._consumed
            self._pos = int(path[-1])
            self._consumed += path.size
            self._steps = self._steps[:0]
            if self._consumed >= step_cap:
                return None, self._consumed


@dataclass(frozen=True)
class LadderPath:
    up_times: tuple[float, ...]      # completed passages to the eps level
    return_times: tuple[float, ...]  # completed returns to zero
    first_hit_one: float | None      # None when censored at the cap
    last_return: float               # the studied time (0 when no return)
    censored: bool


@dataclass(frozen=True)
class BrownianDemoReport:
    eps: float
    dt: float
    n_paths: int
    n_censored: int
    structural_ok: bool
    mean_last_return: float
    inner_estimates: np.ndarray      # nested survival-at-the-time estimates
    inner_se: float
    frac_near_one: float             # diagnostic for the class membership
    lattice_survival: float          # exact gambler's-ruin value

    @property
    def class_h_plausible(self) -> bool:
        return self.frac_near_one == 0.0


def simulate_ladder_path(eps: float, dt: float, seed: int, path_index: int,
                         time_cap: float) -> LadderPath:
    if not 0 < eps < 1:
        raise EnlabError("eps must lie in (0, 1)")
    if dt > 1e-3:
        raise EnlabError("dt must be at most 1e-3")
    k_eps = max(1, round(eps / math.sqrt(dt)))
    k_one = round(1.0 / math.sqrt(dt))
    cap = int(time_cap / dt)
    walk = _Walk(seed, _STREAM_OUTER, path_index)

    ups: list[float] = []
    returns: list[float] = []
    t_one = None
    censored = False
    while True:
        hit, steps = walk.first_passage((k_eps,), cap)  # from below eps
        if hit is None:
            censored = True
            break
        ups.append(steps * dt)
        hit, steps = walk.first_passage((0, k_one), cap)
        if hit is None:
            censored = True
            break
        if hit == k_one:
            t_one = steps * dt
            break
        returns.append(steps * dt)
    last_return = returns[-1] if returns else 0.0
    return LadderPath(tuple(ups), tuple(returns), t_one, last_return,
                      censored)


def _structural_check(path: LadderPath) -> bool:
    """The studied time is recomputable from any prefix ending after the
    first passage to one: it is the last completed return seen so far,
    and the ladder alternates strictly."""
    seq = []
    for u, v in zip(path.up_times, path.return_times):
        seq.extend([u, v])
    if len(path.up_times) > len(path.return_times):
        seq.append(path.up_times[-1])
    if any(b <= a for a, b in zip(seq, seq[1:])):
        return False
    if path.censored:
        return True
    last = 0.0
    for v in path.return_times:
        if v <= path.first_hit_one:
            last = v
    return last == path.last_return and \
        all(v <= path.first_hit_one for v in path.return_times)


def _inner_survival_estimate(eps: float, dt: float, seed: int,
                             outer_index: int, inner_paths: int) -> float:
    """Nested estimate of the probability that another excursion
    completes before the walk reaches one, started at a return time.

    From zero the walk must pass the eps level before one, so only the
    decision leg from eps is simulated: absorb at zero (another return
    happens) or at the one level (the time stays put).
    """
    k_eps = max(1, round(eps / math.sqrt(dt)))
    k_one = round(1.0 / math.sqrt(dt))
    wins = 0
    for j in range(inner_paths):
        walk = _Walk(seed, _STREAM_INNER, outer_index, j)
        walk._pos = k_eps
        hit, _ = walk.first_passage((0, k_one), step_cap=1 << 62)
        wins += hit == 0
    return wins / inner_paths


def brownian_demo(eps: float, dt: float, paths: int, seed: int,
                  time_cap: float = 100.0, nested_outer: int = 64,
                  nested_inner: int = 500) -> BrownianDemoReport:
    structural_ok = True
    censored = 0
    last_sum = 0.0
    resolved = 0
    for i in range(paths):
        path = simulate_ladder_path(eps, dt, seed, i, time_cap)
        if not _structural_check(path):
            structural_ok = False
        if path.censored:
            censored += 1
        else:
            resolved += 1
            last_sum += path.last_return

    estimates = np.array([
        _inner_survival_estimate(eps, dt, seed, i, nested_inner)
        for i in range(min(nested_outer, paths))])
    inner_se = math.sqrt(max((1 - eps) * eps, 1e-12) / nested_inner)
    k_eps = max(1, round(eps / math.sqrt(dt)))
    k_one = round(1.0 / math.sqrt(dt))
    lattice = (k_one - k_eps) / k_one
    frac_near_one = float((estimates > 1.0 - 3.0 * inner_se).mean())
    return BrownianDemoReport(
        eps=eps, dt=dt, n_paths=paths, n_censored=censored,
        structural_ok=structural_ok,
        mean_last_return=last_sum / resolved if resolved else float("nan"),
        inner_estimates=estimates, inner_se=inner_se,
        frac_near_one=frac_near_one, lattice_survival=lattice)
