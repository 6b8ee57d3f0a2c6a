"""No-control equilibrium: regime classification, cost root-solve, profiles.

The unknown is the common trip cost c*, expressed through the normalized
cost theta = (c* - f_c) * v_f_eff / (alpha * l_c), which equals the ratio of
the car's in-district time-plus-schedule cost to its free-flow value. Each
candidate regime has a closed-form total-demand function that is strictly
increasing in theta over the regime's admissible range, so a bracketed
bisection pins the cost and the solved theta is then checked against the
regime's own consistency conditions. Exactly one regime survives.
"""

import enum
import math
from dataclasses import dataclass

from . import rootfind
from .profiles import (
    AccumSeg,
    ConstantSeg,
    ExitSeg,
    FrtArrivalSeg,
    LinearSeg,
    PiecewiseProfile,
    ReciprocalSeg,
)
from .scenario import DerivedParams, ScenarioParams, derive_params

THETA_RTOL = 1e-12
_BRACKET_LO_EPS = 1e-12
_BRACKET_HI0 = 4.0


class SolverError(RuntimeError):
    """Equilibrium enumeration failed (inconsistent regime set or bad bracket)."""


class UeRegime(enum.Enum):
    ALL_FRT = "all_frt"
    NO_FRT = "no_frt"
    BOTH_GAP = "both_gap"
    BOTH_CONTINUOUS = "both_continuous"


@dataclass(frozen=True)
class UeSolution:
    regime: UeRegime
    c_star: float
    theta: float
    # rush-hour breakpoints (absolute hours); None where the regime has no such event
    t_s_f: float | None
    t_s_c: float | None
    t_ee_f: float | None
    t_sl_f: float | None
    t_e_c: float | None
    t_e_f: float | None
    # analytic time profiles over the rush hour
    n_c: PiecewiseProfile
    o_f: PiecewiseProfile
    v_car: PiecewiseProfile
    v_frt: PiecewiseProfile
    g_car: PiecewiseProfile
    g_frt: PiecewiseProfile
    # demand split [pax]
    n_car: float
    n_frt: float


def theta_from_cost(c: float, p: ScenarioParams, d: DerivedParams) -> float:
    return (c - p.f_c) / (p.alpha * d.t_f_c)


def cost_from_theta(theta: float, p: ScenarioParams, d: DerivedParams) -> float:
    return p.f_c + p.alpha * d.t_f_c * theta


def _car_bracket_term(theta: float) -> float:
    return math.log(theta) + 1.0 / theta - 1.0


def _frt_shoulder_term(p: ScenarioParams, d: DerivedParams) -> float:
    """Demand carried by the linear occupancy ramps outside the car rush."""
    return p.n_f_cbd / (2.0 * p.lam * d.t_f_f) * (d.df - p.alpha * d.dtf) ** 2


def demand_no_frt(theta: float, p: ScenarioParams, d: DerivedParams) -> float:
    """Car-only total demand at normalized cost theta."""
    if theta <= 0.0:
        raise ValueError(f"theta must be positive, got {theta}")
    return (p.alpha / p.beta + p.alpha / p.gamma) * d.n_j_eff * _car_bracket_term(theta)


def demand_both_gap(theta: float, p: ScenarioParams, d: DerivedParams) -> float:
    """Total demand when both modes run and the occupancy hits zero mid-rush.

    The transit leg of the bracket is theta-free because the occupancy
    profile dies at a fixed speed ratio df/(alpha*dtf) regardless of how
    long the car rush lasts.
    """
    if theta <= 0.0:
        raise ValueError(f"theta must be positive, got {theta}")
    adt = p.alpha * d.dtf
    if d.df <= adt:
        raise ValueError("gap-regime demand needs df > alpha*dtf")
    ratio = d.df / adt
    in_rush = (p.n_f_cbd * p.alpha / p.lam) * (d.t_f_c / d.t_f_f) * (
        d.df * math.log(ratio) - (d.df - adt)
    )
    return (1.0 / p.beta + 1.0 / p.gamma) * (
        p.alpha * d.n_j_eff * _car_bracket_term(theta)
        + _frt_shoulder_term(p, d)
        + in_rush
    )


def demand_both_continuous(theta: float, p: ScenarioParams, d: DerivedParams) -> float:
    """Total demand when both modes run and transit is ridden through the peak.

    The in-rush transit term integrates to df*ln(theta) - alpha*dtf*(theta-1);
    it matches demand_both_gap exactly at theta = df/(alpha*dtf).
    """
    if theta <= 0.0:
        raise ValueError(f"theta must be positive, got {theta}")
    adt = p.alpha * d.dtf
    in_rush = (p.n_f_cbd * p.alpha / p.lam) * (d.t_f_c / d.t_f_f) * (
        d.df * math.log(theta) - adt * (theta - 1.0)
    )
    return (1.0 / p.beta + 1.0 / p.gamma) * (
        p.alpha * d.n_j_eff * _car_bracket_term(theta)
        + _frt_shoulder_term(p, d)
        + in_rush
    )


def demand_all_frt(c: float, p: ScenarioParams, d: DerivedParams) -> float:
    """Total demand when cars stay home: triangular occupancy at free flow."""
    surplus = c - p.alpha * d.t_f_f - p.f_f
    if surplus < 0.0:
        # reassociated floor arithmetic may land a few ulp below zero
        if surplus < -1e-12 * max(1.0, abs(c)):
            raise ValueError("cost below the free-flow transit cost floor")
        surplus = 0.0
    return (p.n_f_cbd / (p.lam * d.t_f_f)) * 0.5 * (1.0 / p.beta + 1.0 / p.gamma) * surplus**2


def ue_candidates(p: ScenarioParams, d: DerivedParams) -> dict:
    """Solve every candidate regime and report which are self-consistent.

    Returns {UeRegime: (consistent, theta_or_none)}. Exactly one entry should
    be consistent for any valid scenario.
    """
    adt = p.alpha * d.dtf
    n_target = p.n_total
    out: dict[UeRegime, tuple[bool, float | None]] = {}

    # cars only: admissible iff transit never competes at free flow. The
    # admissibility condition is cost-free, so inapplicable scenarios skip
    # the solve (the car-only demand grows only logarithmically and may not
    # bracket targets generated by heavy transit use).
    if d.df <= adt:
        theta_nf = rootfind.bisect_increasing(
            lambda x: demand_no_frt(x, p, d), n_target, 1.0 + _BRACKET_LO_EPS,
            _BRACKET_HI0, rtol=THETA_RTOL)
        out[UeRegime.NO_FRT] = (True, theta_nf)
    else:
        out[UeRegime.NO_FRT] = (False, None)

    # transit only: admissible iff the implied cost keeps cars unattractive
    c_floor = p.alpha * d.t_f_f + p.f_f
    c_af = rootfind.bisect_increasing(
        lambda c: demand_all_frt(c, p, d), n_target, c_floor, c_floor + _BRACKET_HI0,
        rtol=THETA_RTOL)
    theta_af = theta_from_cost(c_af, p, d)
    out[UeRegime.ALL_FRT] = (theta_af <= 1.0, theta_af)

    if d.df > adt:
        ratio = d.df / adt
        try:
            theta_gap = rootfind.bisect_increasing(
                lambda x: demand_both_gap(x, p, d), n_target,
                1.0 + _BRACKET_LO_EPS, _BRACKET_HI0, rtol=THETA_RTOL)
        except rootfind.NoRootError:
            theta_gap = None
        out[UeRegime.BOTH_GAP] = (theta_gap is not None and theta_gap > ratio, theta_gap)
        # the continuous form is increasing only up to theta = ratio, where it
        # hands over to the gap form; solve it on that bounded range
        theta_cont = None
        if ratio > 1.0 + _BRACKET_LO_EPS:
            try:
                theta_cont = rootfind.bisect_increasing(
                    lambda x: demand_both_continuous(x, p, d), n_target,
                    1.0 + _BRACKET_LO_EPS, ratio, rtol=THETA_RTOL, bounded=True)
            except rootfind.NoRootError:
                theta_cont = None
        out[UeRegime.BOTH_CONTINUOUS] = (
            theta_cont is not None and 1.0 < theta_cont <= ratio, theta_cont)
    else:
        out[UeRegime.BOTH_GAP] = (False, None)
        out[UeRegime.BOTH_CONTINUOUS] = (False, None)
    return out


def solve_ue(p: ScenarioParams, d: DerivedParams | None = None) -> UeSolution:
    """Find the unique no-control equilibrium of the scenario."""
    if d is None:
        d = derive_params(p)
    candidates = ue_candidates(p, d)
    consistent = [r for r, (ok, _) in candidates.items() if ok]
    if len(consistent) != 1:
        raise SolverError(
            f"no consistent regime: expected exactly one, got {[r.value for r in consistent]}"
        )
    regime = consistent[0]
    theta = candidates[regime][1]
    return _build_solution(regime, theta, p, d)


# ---------------------------------------------------------------------------
# profile construction


def _free_flow_cells(p, d):
    """Constant segments shared by every uncongested interval."""
    return dict(
        n_c=ConstantSeg(0.0),
        v_car=ConstantSeg(d.v_f_eff),
        v_frt=ConstantSeg(p.m * d.v_f_eff),
        g_car=ConstantSeg(0.0),
    )


def _congested_cells(p, d, k, t_ref, sign):
    """Car-side segments while accumulation follows the congested branch."""
    return dict(
        n_c=AccumSeg(d.n_j_eff, k, t_ref, sign),
        v_car=ReciprocalSeg(d.v_f_eff, k, t_ref, sign),
        v_frt=ReciprocalSeg(p.m * d.v_f_eff, k, t_ref, sign),
        g_car=ExitSeg(d.n_j_eff / d.t_f_c, k, t_ref, sign),
    )


def _frt_idle_cells():
    return dict(o_f=ConstantSeg(0.0), g_frt=ConstantSeg(0.0))


def _frt_ramp_cells(p, d, anchor, o_at_anchor, o_slope):
    """Occupancy linear in time at free-flow transit speed."""
    scale = p.n_f_cbd / d.t_f_f
    return dict(
        o_f=LinearSeg(anchor, o_at_anchor, o_slope),
        g_frt=LinearSeg(anchor, o_at_anchor * scale, o_slope * scale),
    )


def _frt_congested_cells(p, d, k, t_ref, sign):
    """Occupancy pinned by cost parity with cars inside the congested branch."""
    adt = p.alpha * d.dtf
    o_slope = -adt * k * sign / p.lam
    return dict(
        o_f=LinearSeg(t_ref, (d.df - adt) / p.lam, o_slope),
        g_frt=FrtArrivalSeg(
            p.n_f_cbd * d.df / (p.lam * d.t_f_f),
            p.n_f_cbd * adt / (p.lam * d.t_f_f),
            k, t_ref, sign),
    )


_PROFILE_NAMES = ("n_c", "o_f", "v_car", "v_frt", "g_car", "g_frt")


def _assemble(breakpoints, cells):
    """Turn a list of per-interval segment dicts into one profile per quantity."""
    bps = tuple(breakpoints)
    if not all(b1 > b0 for b0, b1 in zip(bps[:-1], bps[1:])):
        raise SolverError(f"degenerate breakpoint ordering: {bps}")
    profiles = {}
    for name in _PROFILE_NAMES:
        profiles[name] = PiecewiseProfile(bps, tuple(cell[name] for cell in cells))
    return profiles


def _build_solution(regime, theta, p, d):
    a_tc = p.alpha * d.t_f_c
    adt = p.alpha * d.dtf
    k_b = p.beta / a_tc
    k_g = p.gamma / a_tc
    c_star = cost_from_theta(theta, p, d)
    n_car = demand_no_frt(theta, p, d) if regime is not UeRegime.ALL_FRT else 0.0

    if regime is UeRegime.ALL_FRT:
        surplus = c_star - p.alpha * d.t_f_f - p.f_f
        t_s_f = p.t_star - surplus / p.beta
        t_e_f = p.t_star + surplus / p.gamma
        cells = []
        for anchor, v0, slope in ((t_s_f, 0.0, p.beta / p.lam),
                                  (t_e_f, 0.0, -p.gamma / p.lam)):
            cell = _free_flow_cells(p, d)
            cell.update(_frt_ramp_cells(p, d, anchor, v0, slope))
            cells.append(cell)
        profiles = _assemble((t_s_f, p.t_star, t_e_f), cells)
        return UeSolution(
            regime=regime, c_star=c_star, theta=theta,
            t_s_f=t_s_f, t_s_c=None, t_ee_f=None, t_sl_f=None, t_e_c=None, t_e_f=t_e_f,
            n_car=0.0, n_frt=p.n_total, **profiles)

    t_s_c = p.t_star - a_tc / p.beta * (theta - 1.0)
    t_e_c = p.t_star + a_tc / p.gamma * (theta - 1.0)
    early = dict(k=k_b, t_ref=t_s_c, sign=1.0)
    late = dict(k=k_g, t_ref=t_e_c, sign=-1.0)

    if regime is UeRegime.NO_FRT:
        cells = []
        for side in (early, late):
            cell = _congested_cells(p, d, **side)
            cell.update(_frt_idle_cells())
            cells.append(cell)
        profiles = _assemble((t_s_c, p.t_star, t_e_c), cells)
        return UeSolution(
            regime=regime, c_star=c_star, theta=theta,
            t_s_f=None, t_s_c=t_s_c, t_ee_f=None, t_sl_f=None, t_e_c=t_e_c, t_e_f=None,
            n_car=n_car, n_frt=0.0, **profiles)

    # both modes in use
    t_s_f = t_s_c - (d.df - adt) / p.beta
    t_e_f = t_e_c + (d.df - adt) / p.gamma
    n_frt = p.n_total - n_car

    lead = _free_flow_cells(p, d)
    lead.update(_frt_ramp_cells(p, d, t_s_f, 0.0, p.beta / p.lam))
    tail = _free_flow_cells(p, d)
    tail.update(_frt_ramp_cells(p, d, t_e_f, 0.0, -p.gamma / p.lam))

    if regime is UeRegime.BOTH_CONTINUOUS:
        cells = [lead]
        for side in (early, late):
            cell = _congested_cells(p, d, **side)
            cell.update(_frt_congested_cells(p, d, **side))
            cells.append(cell)
        cells.append(tail)
        profiles = _assemble((t_s_f, t_s_c, p.t_star, t_e_c, t_e_f), cells)
        return UeSolution(
            regime=regime, c_star=c_star, theta=theta,
            t_s_f=t_s_f, t_s_c=t_s_c, t_ee_f=None, t_sl_f=None, t_e_c=t_e_c, t_e_f=t_e_f,
            n_car=n_car, n_frt=n_frt, **profiles)

    # gap regime: occupancy dies at u = df/(alpha*dtf) on both sides of the peak
    ratio = d.df / adt
    t_ee_f = t_s_c + a_tc / p.beta * (ratio - 1.0)
    t_sl_f = t_e_c - a_tc / p.gamma * (ratio - 1.0)
    cells = [lead]
    for side, frt_used in ((early, True), (early, False), (late, False), (late, True)):
        cell = _congested_cells(p, d, **side)
        cell.update(_frt_congested_cells(p, d, **side) if frt_used else _frt_idle_cells())
        cells.append(cell)
    cells.append(tail)
    profiles = _assemble((t_s_f, t_s_c, t_ee_f, p.t_star, t_sl_f, t_e_c, t_e_f), cells)
    return UeSolution(
        regime=regime, c_star=c_star, theta=theta,
        t_s_f=t_s_f, t_s_c=t_s_c, t_ee_f=t_ee_f, t_sl_f=t_sl_f, t_e_c=t_e_c, t_e_f=t_e_f,
        n_car=n_car, n_frt=n_frt, **profiles)


def frt_shoulder_demand(p: ScenarioParams, d: DerivedParams) -> float:
    """Transit demand carried outside the car rush hour (both ramps)."""
    return (1.0 / p.beta + 1.0 / p.gamma) * _frt_shoulder_term(p, d)
