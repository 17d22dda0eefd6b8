"""Random times on finite filtered spaces.

analyze() derives the two Azema supermartingales, the fundamental
martingale, the dual optional projection of the occurrence indicator, the
set where the inclusive supermartingale is pinned at one while its left
limit is below one (the "jump set"), and the honesty / class-H /
stopping-time flags.

Honesty is tested on the closed events {tau <= t}: per time t, the time
must take at most one value on each atom of the time-t partition
intersected with {tau <= t}.  On the grid this is the faithful reading of
the classical definition (between grid points the filtration is frozen,
so the strict-inequality window closes onto the grid event), it is
equivalent to the time being the end of an adapted set, and it is exactly
the strength needed for the transfer formulas in
:mod:`enlab.enlargement` to hold with zero tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .errors import GenerationExhausted, InvariantError, SchemaError
from .finite_prob import (
    ONE,
    ZERO,
    AdaptedProcess,
    Block,
    Filtration,
    FiniteFilteredSpace,
    adapted,
    build_space,
    compensator,
    cond_exp,
    dual_optional_projection,
    is_martingale,
)
from .rng import SplitMix64


@dataclass(frozen=True)
class RandomTimeMap:
    """A total time on the grid: tau(outcome) in {0, ..., T}."""

    tau: dict[str, int]

    @staticmethod
    def build(tau: Mapping[str, int], space: FiniteFilteredSpace) -> "RandomTimeMap":
        out = {}
        for outcome in space.outcomes:
            if outcome not in tau:
                raise SchemaError(f"tau undefined for {outcome!r}", field="tau")
            value = int(tau[outcome])
            if not 0 <= value <= space.horizon:
                raise SchemaError(
                    f"tau({outcome}) = {value} outside the grid", field="tau")
            out[outcome] = value
        return RandomTimeMap(out)

    def __getitem__(self, outcome: str) -> int:
        return self.tau[outcome]


@dataclass(frozen=True)
class RandomTimeAnalysis:
    """Everything the enlargement calculus needs about one random time."""

    space: FiniteFilteredSpace
    tau: RandomTimeMap
    survival: AdaptedProcess          # P(tau > t | time-t atom)
    survival_incl: AdaptedProcess     # P(tau >= t | time-t atom)
    occurrence_proj: AdaptedProcess   # dual optional projection of 1[t >= tau]
    fundamental_martingale: AdaptedProcess  # survival + occurrence_proj
    jump_counter: AdaptedProcess      # running count of pinned-at-one times
    jump_set: tuple[tuple[int, Block], ...]
    honest: bool
    class_h: bool
    is_stopping_time: bool

    def survival_left(self, outcome: str, t: int) -> Fraction:
        """Left limit of the survival process: value at t - 1 (1 at t=0)."""
        return self.survival.at(outcome, t - 1) if t >= 1 else ONE

    def in_jump_set(self, outcome: str, t: int) -> bool:
        if t < 1:
            return False
        return (self.survival_incl.at(outcome, t) == 1
                and self.survival.at(outcome, t - 1) < 1)

    def strictly_after(self, outcome: str, t: int) -> bool:
        """True when the increment at t lies strictly after tau (t-1 >= tau)."""
        return t - 1 >= self.tau[outcome]


def _honest_closed(space: FiniteFilteredSpace, tau: RandomTimeMap) -> bool:
    for t in range(space.horizon + 1):
        for block in space.filtration.partitions[t]:
            values = {tau[o] for o in block if tau[o] <= t}
            if len(values) > 1:
                return False
    return True


def _is_stopping_time(space: FiniteFilteredSpace, tau: RandomTimeMap) -> bool:
    for t in range(space.horizon + 1):
        for block in space.filtration.partitions[t]:
            hits = {tau[o] <= t for o in block}
            if len(hits) > 1:
                return False
    return True


def analyze(space: FiniteFilteredSpace, tau: RandomTimeMap) -> RandomTimeAnalysis:
    """Derive all associated objects; flags report, never throw."""
    T = space.horizon
    survival_cols = []
    incl_cols = []
    for t in range(T + 1):
        survival_cols.append(cond_exp(
            {o: ONE if tau[o] > t else ZERO for o in space.outcomes}, t, space))
        incl_cols.append(cond_exp(
            {o: ONE if tau[o] >= t else ZERO for o in space.outcomes}, t, space))
    survival = AdaptedProcess(
        {o: [survival_cols[t][o] for t in range(T + 1)] for o in space.outcomes})
    survival_incl = AdaptedProcess(
        {o: [incl_cols[t][o] for t in range(T + 1)] for o in space.outcomes})

    occurrence = {o: [ONE if t >= tau[o] else ZERO for t in range(T + 1)]
                  for o in space.outcomes}
    occurrence_proj = dual_optional_projection(occurrence, space)
    fundamental = survival + occurrence_proj

    jump_set = []
    for t in range(1, T + 1):
        for block in space.filtration.partitions[t]:
            rep = block[0]
            if survival_incl.at(rep, t) == 1 and survival.at(rep, t - 1) < 1:
                jump_set.append((t, block))
    jump_set_t = tuple(jump_set)

    counter_vals = {}
    for o in space.outcomes:
        acc = [ZERO]
        for t in range(1, T + 1):
            hit = (survival_incl.at(o, t) == 1 and survival.at(o, t - 1) < 1)
            acc.append(acc[-1] + (ONE if hit else ZERO))
        counter_vals[o] = acc
    jump_counter = AdaptedProcess(counter_vals)

    honest = _honest_closed(space, tau)
    class_h = honest and all(
        survival.at(o, tau[o]) < 1 for o in space.outcomes)
    stopping = _is_stopping_time(space, tau)

    analysis = RandomTimeAnalysis(
        space=space, tau=tau, survival=survival, survival_incl=survival_incl,
        occurrence_proj=occurrence_proj, fundamental_martingale=fundamental,
        jump_counter=jump_counter, jump_set=jump_set_t, honest=honest,
        class_h=class_h, is_stopping_time=stopping)
    _check_analysis_invariants(analysis)
    return analysis


def _check_analysis_invariants(a: RandomTimeAnalysis) -> None:
    space = a.space
    if not is_martingale(a.fundamental_martingale, space).ok:
        raise InvariantError("fundamental martingale has drift")
    for o in space.outcomes:
        for t in range(space.horizon + 1):
            z = a.survival.at(o, t)
            zi = a.survival_incl.at(o, t)
            if not (0 <= z <= 1 and 0 <= zi <= 1):
                raise InvariantError(f"supermartingale outside [0,1] at ({o},{t})")
            if t >= 1:
                # inclusive value equals left limit plus martingale increment
                if zi != a.survival.at(o, t - 1) + a.fundamental_martingale.delta(o, t):
                    raise InvariantError("survival/martingale increment identity")
        if a.survival.at(o, space.horizon) != 0:
            raise InvariantError("survival does not vanish at the horizon")


# ---------------------------------------------------------------------------
# Progressive enlargement
# ---------------------------------------------------------------------------

def enlarge(space: FiniteFilteredSpace, analysis: RandomTimeAnalysis) -> Filtration:
    """Smallest filtration containing the base one and making the time a
    stopping time: each atom at t is refined by the events
    {tau = 0}, ..., {tau = t}, {tau > t}."""
    tau = analysis.tau
    partitions = []
    for t in range(space.horizon + 1):
        blocks = []
        for block in space.filtration.partitions[t]:
            groups: dict[int, list[str]] = {}
            for o in block:
                key = tau[o] if tau[o] <= t else -1
                groups.setdefault(key, []).append(o)
            blocks.extend(tuple(g) for g in groups.values())
        partitions.append(tuple(blocks))
    enlarged = Filtration("G", partitions, space.prob)

    for t in range(space.horizon + 1):
        for block in enlarged.partitions[t]:
            hits = {tau[o] <= t for o in block}
            if len(hits) > 1:
                raise InvariantError("time is not an enlarged stopping time")
    if analysis.honest:
        # honesty collapses the past-of-tau part of each base atom to a
        # single enlarged atom
        for t in range(space.horizon + 1):
            for block in space.filtration.partitions[t]:
                values = {tau[o] for o in block if tau[o] <= t}
                if len(values) > 1:
                    raise InvariantError("honest flag inconsistent with atoms")
    return enlarged


# ---------------------------------------------------------------------------
# Model generator
# ---------------------------------------------------------------------------

_BRANCH_WEIGHTS = (1, 2, 2, 3, 3, 3)  # children counts drawn from {1,2,3}-ish
_INCREMENTS = (-2, -1, -1, 0, 1, 1, 2)


def _grow_tree(rng: SplitMix64, depth: int, branching: int):
    """Returns (outcomes, prob, partitions) of a random refining tree."""
    edges: dict[str, list[tuple[str, Fraction]]] = {"": []}
    frontier = [""]
    for t in range(depth):
        nxt = []
        for node in frontier:
            k = min(rng.choice(_BRANCH_WEIGHTS), branching)
            if t == 0 and k == 1:
                k = min(2, branching)  # avoid a fully deterministic first step
            raw = [rng.randint(1, 4) for _ in range(k)]
            total = sum(raw)
            for i in range(k):
                child = f"{node}{i}" if node else str(i)
                edges[node].append((child, Fraction(raw[i], total)))
                edges[child] = []
                nxt.append(child)
        frontier = nxt
    leaves = frontier
    prob: dict[str, Fraction] = {}

    def walk(node: str, mass: Fraction):
        kids = edges[node]
        if not kids:
            prob[node] = mass
            return
        for child, p in kids:
            walk(child, mass * p)

    walk("", ONE)
    partitions = []
    for t in range(depth + 1):
        groups: dict[str, list[str]] = {}
        for leaf in leaves:
            groups.setdefault(leaf[:t], []).append(leaf)
        partitions.append(tuple(tuple(g) for g in groups.values()))
    return leaves, prob, partitions


def generate_honest_model(seed: int, depth: int, branching: int, d: int = 1,
                          max_retries: int = 32):
    """Random model (space, tau, asset) with an honest class-H time.

    The time is the last visit of an adapted walk to a level set, with
    sup of the empty set taken as 0, which is honest by construction.
    Models failing the class-H check are resampled; the check cannot
    actually fail on a full-support space, but the guard stays in place
    as a cheap sanity net.
    """
    if not 1 <= depth <= 8:
        raise GenerationExhausted(f"depth {depth} outside 1..8")
    if not 1 <= branching <= 4:
        raise GenerationExhausted(f"branching {branching} outside 1..4")
    if not 1 <= d <= 4:
        raise GenerationExhausted(f"d {d} outside 1..4")

    for attempt in range(max_retries):
        rng = SplitMix64((seed << 8) ^ attempt ^ 0xE17AB)
        outcomes, prob, partitions = _grow_tree(rng, depth, branching)
        space = build_space({"outcomes": outcomes, "prob": prob,
                             "partitions": partitions})

        # driver walk for the last-visit time
        driver = _random_walk(rng, space)
        visited = sorted({v for row in driver.values.values() for v in row})
        level = visited[rng.randint(0, max(len(visited) - 2, 0))]
        tau_map = {}
        for o in space.outcomes:
            hits = [t for t in range(depth + 1)
                    if driver.values[o][t] <= level]
            tau_map[o] = max(hits) if hits else 0
        tau = RandomTimeMap.build(tau_map, space)

        components = []
        for i in range(d):
            walk = _random_walk(rng.fork(101 + i), space)
            if (seed + i) % 3 == 0:
                # compensate to a martingale for variety across seeds;
                # both start at 0, so no initial-value correction needed
                walk = walk - compensator(walk, space)
            components.append(walk)
        asset = components[0] if d == 1 else components

        analysis = analyze(space, tau)
        if analysis.honest and analysis.class_h:
            return space, tau, asset
    raise GenerationExhausted(f"no class-H model after {max_retries} retries")


def _random_walk(rng: SplitMix64, space: FiniteFilteredSpace) -> AdaptedProcess:
    """Adapted walk with per-atom increments from a small integer set."""
    T = space.horizon
    values = {o: [ZERO] for o in space.outcomes}
    for t in range(1, T + 1):
        incr = {}
        for block in space.filtration.partitions[t]:
            incr[block] = Fraction(rng.choice(_INCREMENTS))
        for block, step in incr.items():
            for o in block:
                values[o].append(values[o][t - 1] + step)
    return adapted(values, space)
