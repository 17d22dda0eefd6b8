"""Transfer formulas between the base filtration and its progressive
enlargement by an honest time, and the explicit deflator construction.

Every operation here computes its target two independent ways, from
first principles on the enlarged atoms and through the closed-form
transfer expression, and the two are compared with zero tolerance.  The
"strictly after" region is the set of increments at t with t - 1 >= tau:
on it, the enlarged time-(t-1) atom inside a base atom B is the single
set B & {tau <= t-1} (honesty pins the past value), which is what makes
the formulas exact theorems of the finite model rather than
discretizations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .errors import DivisionGuard, InternalCheckFailed, NotClassH, NotHonest
from .finite_prob import (
    ONE,
    ZERO,
    AdaptedProcess,
    Block,
    Filtration,
    FiniteFilteredSpace,
    MartingaleReport,
    PredictableProcess,
    angle_bracket,
    bracket,
    compensator,
    is_martingale,
    require_martingale,
    stochastic_exponential,
)
from .random_times import RandomTimeAnalysis, enlarge


def _require_class_h(analysis: RandomTimeAnalysis) -> None:
    if not analysis.honest:
        raise NotHonest("the random time is not honest")
    if not analysis.class_h:
        raise NotClassH("survival at the time is not strictly below one")


@dataclass(frozen=True)
class AfterAtom:
    """The enlarged predictable atom strictly after the time: at step t,
    the members of base atom `base` with tau <= t - 1."""

    t: int
    base: Block
    members: Block

    def key(self) -> tuple[int, Block]:
        return (self.t, self.members)


def after_atoms(analysis: RandomTimeAnalysis) -> list[AfterAtom]:
    space = analysis.space
    tau = analysis.tau
    out = []
    for t in range(1, space.horizon + 1):
        for base in space.filtration.partitions[t - 1]:
            members = tuple(o for o in base if tau[o] <= t - 1)
            if not members:
                continue
            if len({tau[o] for o in members}) != 1:
                raise NotHonest(
                    f"past value not pinned on {base} at t={t - 1}")
            out.append(AfterAtom(t, base, members))
    return out


def _cond_on(space: FiniteFilteredSpace, members: Iterable[str],
             values) -> Fraction:
    total = ZERO
    weight = ZERO
    for o in members:
        p = space.prob[o]
        weight += p
        total += p * values(o)
    return total / weight


def _after_indicator_integral(analysis: RandomTimeAnalysis,
                              increments) -> AdaptedProcess:
    """Pathwise sum of increments(o, t) over the strictly-after region."""
    space = analysis.space
    out = {}
    for o in space.outcomes:
        acc = [ZERO]
        for t in range(1, space.horizon + 1):
            step = increments(o, t) if analysis.strictly_after(o, t) else ZERO
            acc.append(acc[-1] + step)
        out[o] = acc
    return AdaptedProcess(out, "G")


# ---------------------------------------------------------------------------
# Martingale transform into the enlarged filtration
# ---------------------------------------------------------------------------

def hat_transform(mart: AdaptedProcess, analysis: RandomTimeAnalysis,
                  enlarged: Filtration | None = None) -> AdaptedProcess:
    """Strictly-after part of a base martingale plus the drift repair
    against the fundamental martingale; the result is checked to be a
    martingale of the enlarged filtration and that check is a hard
    assertion, not a report.
    """
    _require_class_h(analysis)
    space = analysis.space
    require_martingale(mart, space, what="hat_transform input")
    sharp = angle_bracket(mart, analysis.fundamental_martingale, space)

    def increments(o: str, t: int) -> Fraction:
        gap = 1 - analysis.survival.at(o, t - 1)
        if gap == 0:
            raise DivisionGuard(f"unit survival_left strictly after tau "
                                f"at ({o}, {t})")
        return mart.delta(o, t) + sharp.delta(o, t) / gap

    hat = _after_indicator_integral(analysis, increments)
    enlarged = enlarged or enlarge(space, analysis)
    require_martingale(hat, space, enlarged, what="hat_transform output")
    return hat


# ---------------------------------------------------------------------------
# Compensators across filtrations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CompensatorComparison:
    direct: PredictableProcess
    via_formula: AdaptedProcess
    u_direct: PredictableProcess
    u_via_formula: AdaptedProcess
    equal: bool


def g_compensator_after(v: AdaptedProcess, analysis: RandomTimeAnalysis,
                        enlarged: Filtration | None = None
                        ) -> CompensatorComparison:
    """Enlarged compensator of the strictly-after part of a base
    finite-variation process, against its closed-form expression through
    base-compensators; also runs the weighted mode, where the integrand
    carries 1/(1 - inclusive survival).

    On the strictly-after region the inclusive supermartingale sits below
    one on a full-support space, so the weight is well defined; a unit
    value trips the division guard, which the theory says is unreachable.
    """
    _require_class_h(analysis)
    space = analysis.space
    enlarged = enlarged or enlarge(space, analysis)

    after_v = _after_indicator_integral(analysis, v.delta)
    direct = compensator(after_v, space, enlarged)

    # base-compensator of (1 - inclusive survival) . V, rescaled after tau
    weighted = AdaptedProcess(
        {o: _cumulate((1 - analysis.survival_incl.at(o, t)) * v.delta(o, t)
                      for t in range(1, space.horizon + 1))
         for o in space.outcomes})
    inner = compensator(weighted, space)
    via_formula = _after_indicator_integral(
        analysis,
        lambda o, t: inner.delta(o, t) / (1 - analysis.survival.at(o, t - 1)))

    def incl_gap(o: str, t: int) -> Fraction:
        gap = 1 - analysis.survival_incl.at(o, t)
        if gap == 0:
            raise DivisionGuard(f"inclusive survival is one strictly after "
                                f"tau at ({o}, {t})")
        return gap

    u_process = _after_indicator_integral(
        analysis, lambda o, t: v.delta(o, t) / incl_gap(o, t))
    u_direct = compensator(u_process, space, enlarged)

    gated = AdaptedProcess(
        {o: _cumulate(
            (v.delta(o, t) if analysis.survival_incl.at(o, t) < 1 else ZERO)
            for t in range(1, space.horizon + 1))
         for o in space.outcomes})
    gated_comp = compensator(gated, space)
    u_via_formula = _after_indicator_integral(
        analysis,
        lambda o, t: gated_comp.delta(o, t) / (1 - analysis.survival.at(o, t - 1)))

    equal = (direct.values == via_formula.values
             and u_direct.values == u_via_formula.values)
    if not equal:
        raise InternalCheckFailed("compensator transfer mismatch")
    return CompensatorComparison(direct, via_formula, u_direct, u_via_formula,
                                 equal)


def _cumulate(increments: Iterable[Fraction]) -> list[Fraction]:
    acc = [ZERO]
    for step in increments:
        acc.append(acc[-1] + step)
    return acc


# ---------------------------------------------------------------------------
# Predictable projection identities on the after region
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProjIdentityRow:
    t: int
    atom: Block
    lhs: Fraction
    rhs: Fraction
    identity: str

    @property
    def ok(self) -> bool:
        return self.lhs == self.rhs


@dataclass(frozen=True)
class ProjIdentityReport:
    rows: tuple[ProjIdentityRow, ...]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.rows)


def proj_identity_check(mart: AdaptedProcess, analysis: RandomTimeAnalysis
                        ) -> ProjIdentityReport:
    """Pointwise projection identities on every after-tau predictable
    atom: the enlarged projections of dM/(1 - inclusive), of
    1/(1 - inclusive), and of (1 - inclusive) dM, each against the base
    projection form divided (or multiplied) by the left survival gap.
    """
    _require_class_h(analysis)
    space = analysis.space
    incl = analysis.survival_incl
    rows = []
    for atom in after_atoms(analysis):
        t = atom.t
        gap_left = 1 - analysis.survival.at(atom.base[0], t - 1)
        base_avg = lambda f: _cond_on(space, atom.base, f)
        after_avg = lambda f: _cond_on(space, atom.members, f)

        def guarded(o, t=t):
            gap = 1 - incl.at(o, t)
            if gap == 0:
                raise DivisionGuard(f"inclusive survival one at ({o}, {t})")
            return gap

        rows.append(ProjIdentityRow(
            t, atom.members,
            lhs=after_avg(lambda o: mart.delta(o, t) / guarded(o)),
            rhs=base_avg(lambda o: mart.delta(o, t)
                         if incl.at(o, t) < 1 else ZERO) / gap_left,
            identity="jump_over_gap"))
        rows.append(ProjIdentityRow(
            t, atom.members,
            lhs=after_avg(lambda o: 1 / guarded(o)),
            rhs=base_avg(lambda o: ONE if incl.at(o, t) < 1 else ZERO) / gap_left,
            identity="one_over_gap"))
        rows.append(ProjIdentityRow(
            t, atom.members,
            lhs=after_avg(lambda o: mart.delta(o, t)),
            rhs=base_avg(lambda o: (1 - incl.at(o, t)) * mart.delta(o, t))
            / gap_left,
            identity="weighted_jump"))
    report = ProjIdentityReport(tuple(rows))
    if not report.ok:
        raise InternalCheckFailed("projection identity mismatch")
    return report


# ---------------------------------------------------------------------------
# Jump functionals and predictable characteristics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class JumpFunctionals:
    """Per (t, base atom at t-1, jump size): conditional mean of the
    fundamental-martingale increment on the jump fibre (mart_mean) and
    the conditional probability that the inclusive supermartingale is
    below one there (alive_prob)."""

    mart_mean: dict[tuple[int, Block, Fraction], Fraction]
    alive_prob: dict[tuple[int, Block, Fraction], Fraction]
    support: tuple[tuple[int, Block, Fraction], ...]


def jump_functionals(asset: AdaptedProcess, analysis: RandomTimeAnalysis
                     ) -> JumpFunctionals:
    space = analysis.space
    incl = analysis.survival_incl
    fund = analysis.fundamental_martingale
    mart_mean = {}
    alive_prob = {}
    support = []
    for t in range(1, space.horizon + 1):
        for base in space.filtration.partitions[t - 1]:
            fibres: dict[Fraction, list[str]] = {}
            for o in base:
                x = asset.delta(o, t)
                if x != 0:
                    fibres.setdefault(x, []).append(o)
            left = analysis.survival.at(base[0], t - 1)
            for x, members in sorted(fibres.items()):
                key = (t, base, x)
                support.append(key)
                mass = sum(space.prob[o] for o in members)
                mean = sum(space.prob[o] * fund.delta(o, t)
                           for o in members) / mass
                alive = sum(space.prob[o] for o in members
                            if incl.at(o, t) < 1) / mass
                mart_mean[key] = mean
                alive_prob[key] = alive
                # exact set identity on the support:
                # {alive = 0} = {left + mean = 1}, contained in the set
                # where the inclusive supermartingale is pinned at one
                if (alive == 0) != (left + mean == 1):
                    raise InternalCheckFailed(f"jump-set identity fails at {key}")
                if not 0 <= 1 - left - mean <= alive:
                    raise InternalCheckFailed(f"jump-mean bound fails at {key}")
                if alive == 0 and any(incl.at(o, t) != 1 for o in members):
                    raise InternalCheckFailed(
                        f"dead fibre not pinned at one at {key}")
    return JumpFunctionals(mart_mean, alive_prob, tuple(support))


@dataclass(frozen=True)
class CharTuple:
    """Predictable characteristics on the un-truncated convention
    (identity truncation): drift per unit time step equals the first
    moment of the jump kernel, there is no continuous part, and the
    clock is the step counter (restricted after the time for the
    enlarged tuple)."""

    drift: dict[tuple[int, Block], Fraction]
    kernel: dict[tuple[int, Block], dict[Fraction, Fraction]]
    clock: str  # "t" or "after_tau"
    beta: Fraction = ZERO       # loading on the (absent) continuous part
    residual: AdaptedProcess | None = None  # fundamental mart minus start

    def check(self) -> None:
        for key, law in self.kernel.items():
            total = sum(law.values())
            if total > 1:
                raise InternalCheckFailed(f"kernel mass {total} > 1 at {key}")
            if self.drift[key] != sum(x * p for x, p in law.items()):
                raise InternalCheckFailed(f"drift != kernel mean at {key}")


@dataclass(frozen=True)
class GCharReport:
    direct: dict[tuple[int, Block, Fraction], Fraction]
    via_formula: dict[tuple[int, Block, Fraction], Fraction]
    char_base: CharTuple
    char_enlarged: CharTuple
    equal: bool


def g_characteristics(asset: AdaptedProcess, analysis: RandomTimeAnalysis
                      ) -> GCharReport:
    """Enlarged jump compensator of the strictly-after jump measure, from
    first principles on after atoms and through the density
    1 - mart_mean/(left gap) against the base kernel; exact equality is
    asserted.  Also returns both predictable characteristic tuples.
    """
    _require_class_h(analysis)
    space = analysis.space
    jf = jump_functionals(asset, analysis)

    base_drift = {}
    base_kernel = {}
    for t in range(1, space.horizon + 1):
        for base in space.filtration.partitions[t - 1]:
            key = (t, base)
            law = {}
            mass = sum(space.prob[o] for o in base)
            for o in base:
                x = asset.delta(o, t)
                if x != 0:
                    law[x] = law.get(x, ZERO) + space.prob[o] / mass
            base_kernel[key] = law
            base_drift[key] = sum(x * p for x, p in law.items())
    residual = analysis.fundamental_martingale - AdaptedProcess(
        {o: [analysis.fundamental_martingale.at(o, 0)] * (space.horizon + 1)
         for o in space.outcomes})
    char_base = CharTuple(base_drift, base_kernel, clock="t",
                          residual=residual)
    char_base.check()

    direct = {}
    via_formula = {}
    g_drift = {}
    g_kernel = {}
    for atom in after_atoms(analysis):
        t, base, members = atom.t, atom.base, atom.members
        left_gap = 1 - analysis.survival.at(base[0], t - 1)
        law = {}
        for x, p in sorted(base_kernel[(t, base)].items()):
            density = 1 - jf.mart_mean[(t, base, x)] / left_gap
            law[x] = density * p
            via_formula[(t, members, x)] = law[x]
            mass = sum(space.prob[o] for o in members)
            direct[(t, members, x)] = sum(
                space.prob[o] for o in members if asset.delta(o, t) == x) / mass
            if law[x] < 0:
                raise InternalCheckFailed("negative enlarged kernel density")
        g_kernel[(t, members)] = law
        g_drift[(t, members)] = sum(x * p for x, p in law.items())
    char_enlarged = CharTuple(g_drift, g_kernel, clock="after_tau")
    char_enlarged.check()

    equal = direct == via_formula
    if not equal:
        raise InternalCheckFailed("enlarged jump compensator mismatch")
    return GCharReport(direct, via_formula, char_base, char_enlarged, equal)


# ---------------------------------------------------------------------------
# Deflator construction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DeflatorBundle:
    hat_martingale: AdaptedProcess     # enlarged transform of the fundamental one
    weight: AdaptedProcess             # nondecreasing squared-increment load
    weight_comp: PredictableProcess    # its enlarged compensator
    driver: AdaptedProcess             # enlarged local-martingale driver
    deflator: AdaptedProcess           # stochastic exponential of the driver
    positivity_ok: bool
    pre_tau_zero_ok: bool


def build_deflator(analysis: RandomTimeAnalysis,
                   enlarged: Filtration | None = None) -> DeflatorBundle:
    """Assemble the deflator: strictly-after transform of the fundamental
    martingale, the squared-increment weight normalized by both survival
    gaps, minus its enlarged compensator.  Certifies 1 + increment > 0
    everywhere, zero before the time, and the closed-form jump identity
    1 + d(driver) = gap_left/gap_incl + base projection of the pinned
    indicator, all exactly.
    """
    _require_class_h(analysis)
    space = analysis.space
    enlarged = enlarged or enlarge(space, analysis)
    fund = analysis.fundamental_martingale
    incl = analysis.survival_incl

    hat = hat_transform(fund, analysis, enlarged)

    def weight_increment(o: str, t: int) -> Fraction:
        d = fund.delta(o, t)
        gap_left = 1 - analysis.survival.at(o, t - 1)
        gap_incl = 1 - incl.at(o, t)
        if gap_left == 0 or gap_incl == 0:
            raise DivisionGuard(f"survival gap vanished after tau at ({o}, {t})")
        return d * d / (gap_left * gap_incl)

    weight = _after_indicator_integral(analysis, weight_increment)
    weight_comp = compensator(weight, space, enlarged)

    driver_vals = {}
    for o in space.outcomes:
        acc = [ZERO]
        for t in range(1, space.horizon + 1):
            if analysis.strictly_after(o, t):
                gap_left = 1 - analysis.survival.at(o, t - 1)
                step = (hat.delta(o, t) / gap_left
                        + weight.delta(o, t) - weight_comp.delta(o, t))
            else:
                step = ZERO
            acc.append(acc[-1] + step)
        driver_vals[o] = acc
    driver = AdaptedProcess(driver_vals, "G")

    pinned_proj = {}  # base predictable projection of the pinned indicator
    for t in range(1, space.horizon + 1):
        for base in space.filtration.partitions[t - 1]:
            value = _cond_on(space, base,
                             lambda o: ONE if incl.at(o, t) == 1 else ZERO)
            for o in base:
                pinned_proj[(o, t)] = value

    positivity = True
    pre_zero = True
    for o in space.outcomes:
        for t in range(1, space.horizon + 1):
            step = driver.delta(o, t)
            if 1 + step <= 0:
                positivity = False
            if analysis.strictly_after(o, t):
                gap_left = 1 - analysis.survival.at(o, t - 1)
                gap_incl = 1 - incl.at(o, t)
                expected = gap_left / gap_incl + pinned_proj[(o, t)]
                if 1 + step != expected:
                    raise InternalCheckFailed(
                        f"driver jump identity fails at ({o}, {t})")
            elif step != 0:
                pre_zero = False

    if not positivity:
        raise InternalCheckFailed("driver increment at or below -1")
    if not pre_zero:
        raise InternalCheckFailed("driver moves before the time")

    deflator = stochastic_exponential(driver)
    bundle = DeflatorBundle(hat, weight, weight_comp, driver, deflator,
                            positivity, pre_zero)
    return bundle


@dataclass(frozen=True)
class DeflatorVerifyReport:
    hypothesis_holds: bool
    conclusion_holds: bool
    hypothesis_witness: MartingaleReport
    conclusion_witness: MartingaleReport


def deflator_verify(mart: AdaptedProcess, bundle: DeflatorBundle,
                    analysis: RandomTimeAnalysis,
                    enlarged: Filtration | None = None) -> DeflatorVerifyReport:
    """Empirical harvest of the deflator theorem on one base martingale:
    hypothesis = the jump-set part of the martingale is itself a base
    martingale; conclusion = deflator times the strictly-after part is an
    enlarged martingale.  No implication between the two is asserted; the
    quasi-left-continuity hypothesis of the continuous-time statement has
    no discrete counterpart, so the pair is reported as data.
    """
    space = analysis.space
    require_martingale(mart, space, what="deflator_verify input")
    enlarged = enlarged or enlarge(space, analysis)

    jump_part_vals = {}
    for o in space.outcomes:
        acc = [ZERO]
        for t in range(1, space.horizon + 1):
            step = mart.delta(o, t) if analysis.in_jump_set(o, t) else ZERO
            acc.append(acc[-1] + step)
        jump_part_vals[o] = acc
    hypothesis = is_martingale(AdaptedProcess(jump_part_vals), space)

    after_part = _after_indicator_integral(analysis, mart.delta)
    conclusion = is_martingale(bundle.deflator * after_part, space, enlarged)

    return DeflatorVerifyReport(hypothesis.ok, conclusion.ok,
                                hypothesis, conclusion)
