"""Equilibrium under perimeter gating with transit priority.

Gating clamps car accumulation at the throughput-maximizing level n_j_eff/2
between t_s_p and t_e_p; queued cars wait at the boundary while transit
passes freely at half free-flow speed. Outside the gated window the
trajectories follow the no-control congested branches. The unknown is again
the normalized cost, theta_p, solved from the regime's demand equation and
checked for consistency.

Active-control patterns:
  * FULL_FRT        transit ridden through the whole rush, occupancy rises
                    toward the peak during gating (df >= 2*alpha*dtf);
  * PARTIAL_FRT     transit pauses mid-rush, resumes during gating
                    (alpha*dtf < df < 2*alpha*dtf, theta_p above the use
                    threshold);
  * FRT_ONLY_DURING_PC  transit unattractive at free flow but ridden during
                    gating (df <= alpha*dtf, theta_p above the threshold);
  * NO_FRT_DURING_PC    transit idle throughout the gated window. When
                    df > alpha*dtf it still serves the free-flow shoulders,
                    so the demand equation keeps those terms; with
                    df <= alpha*dtf it reduces to the car-only form.

The shoulder variant of NO_FRT_DURING_PC fills a hole in the taxonomy: for
long transit trips with a thin fixed-cost advantage, gating can be active
while transit stays too slow to use at the clamped speed, yet is still used
at the rush-hour edges.
"""

import enum
import math
from dataclasses import dataclass

from . import rootfind
from .equilibrium_ue import (
    SolverError,
    UeRegime,
    UeSolution,
    _assemble,
    _congested_cells,
    _free_flow_cells,
    _frt_congested_cells,
    _frt_idle_cells,
    _frt_ramp_cells,
    cost_from_theta,
    frt_shoulder_demand,
    solve_ue,
)
from .profiles import ConstantSeg, LinearSeg, PiecewiseProfile, zero_profile
from .scenario import DerivedParams, ScenarioParams, derive_params

THETA_RTOL = 1e-12
_BRACKET_LO_EPS = 1e-12
_BRACKET_HI0 = 4.0


class PcRegime(enum.Enum):
    INACTIVE = "inactive"
    FULL_FRT = "full_frt"
    PARTIAL_FRT = "partial_frt"
    FRT_ONLY_DURING_PC = "frt_only_during_pc"
    NO_FRT_DURING_PC = "no_frt_during_pc"


@dataclass(frozen=True)
class PcSolution:
    regime: PcRegime
    c_p_star: float
    theta_p: float
    # event times; None where the regime has no such event
    t_s_f: float | None
    t_s_c: float | None
    t_ee_f: float | None
    t_s_p: float | None
    t_sp_f: float | None
    t_ep_f: float | None
    t_e_p: float | None
    t_sl_f: float | None
    t_e_c: float | None
    t_e_f: float | None
    # analytic profiles
    n_c: PiecewiseProfile
    o_f: PiecewiseProfile
    v_car: PiecewiseProfile
    v_frt: PiecewiseProfile
    g_car: PiecewiseProfile
    g_frt: PiecewiseProfile
    q: PiecewiseProfile
    t_b: PiecewiseProfile
    # demand decomposition [pax]
    n_car_pc: float
    n_car_outside: float
    n_frt_pc: float
    n_frt_shoulder: float
    n_frt_outside: float
    # the no-control solution of the same scenario
    ue: UeSolution

    @property
    def n_car(self) -> float:
        return self.n_car_pc + self.n_car_outside

    @property
    def n_frt(self) -> float:
        return self.n_frt_pc + self.n_frt_shoulder + self.n_frt_outside


def frt_use_threshold(p: ScenarioParams, d: DerivedParams) -> float:
    """Normalized cost above which transit gets used during gating."""
    return (2.0 * p.alpha * d.t_f_f - d.df) / (p.alpha * d.t_f_c)


def _car_pc_terms(theta_p: float, p: ScenarioParams, d: DerivedParams) -> float:
    """Bracket share of car commuters: gated plateau plus congested wings."""
    return p.alpha * d.n_j_eff * ((theta_p - 2.0) / 4.0 + math.log(2.0) - 0.5)


def _frt_gated_triangle(theta_p: float, p: ScenarioParams, d: DerivedParams) -> float:
    """Bracket share of the occupancy triangle inside the gated window."""
    a_tc = p.alpha * d.t_f_c
    gap = theta_p - frt_use_threshold(p, d)
    return p.n_f_cbd / (p.lam * d.t_f_f) * a_tc**2 / 4.0 * gap**2


def demand_pc_nofrt(theta_p: float, p: ScenarioParams, d: DerivedParams) -> float:
    """Car-only total demand under gating."""
    if theta_p < 2.0:
        raise ValueError(f"gated demand needs theta_p >= 2, got {theta_p}")
    return (1.0 / p.beta + 1.0 / p.gamma) * _car_pc_terms(theta_p, p, d)


def demand_pc_full(theta_p: float, p: ScenarioParams, d: DerivedParams) -> float:
    """Total demand when transit runs through the whole rush under gating."""
    if theta_p < 2.0:
        raise ValueError(f"gated demand needs theta_p >= 2, got {theta_p}")
    adt = p.alpha * d.dtf
    a_tc = p.alpha * d.t_f_c
    frt = p.n_f_cbd / (p.lam * d.t_f_f) * (
        a_tc / 2.0 * (theta_p - 2.0) * (d.df - 2.0 * adt + a_tc / 2.0 * (theta_p - 2.0))
        + 0.5 * (d.df - adt) ** 2
        + a_tc * (d.df * math.log(2.0) - adt)
    )
    return (1.0 / p.beta + 1.0 / p.gamma) * (_car_pc_terms(theta_p, p, d) + frt)


def demand_pc_partial(theta_p: float, p: ScenarioParams, d: DerivedParams) -> float:
    """Total demand when transit pauses mid-rush and resumes during gating."""
    adt = p.alpha * d.dtf
    if d.df <= adt:
        raise ValueError("partial regime needs df > alpha*dtf")
    threshold = frt_use_threshold(p, d)
    if theta_p < max(2.0, threshold):
        raise ValueError(
            f"partial-regime demand needs theta_p >= max(2, {threshold}), got {theta_p}")
    a_tc = p.alpha * d.t_f_c
    ratio = d.df / adt
    frt_outside = p.n_f_cbd / (p.lam * d.t_f_f) * (
        0.5 * (d.df - adt) ** 2
        + p.alpha * d.t_f_c * (d.df * math.log(ratio) - (d.df - adt))
    )
    frt = frt_outside + _frt_gated_triangle(theta_p, p, d)
    return (1.0 / p.beta + 1.0 / p.gamma) * (_car_pc_terms(theta_p, p, d) + frt)


def demand_pc_frt_only(theta_p: float, p: ScenarioParams, d: DerivedParams) -> float:
    """Total demand when transit is ridden only inside the gated window."""
    threshold = frt_use_threshold(p, d)
    if theta_p < max(2.0, threshold):
        raise ValueError(
            f"frt-only demand needs theta_p >= max(2, {threshold}), got {theta_p}")
    return (1.0 / p.beta + 1.0 / p.gamma) * (
        _car_pc_terms(theta_p, p, d) + _frt_gated_triangle(theta_p, p, d))


def _demand_pc_nofrt_shoulder(theta_p: float, p: ScenarioParams, d: DerivedParams) -> float:
    """Car-only gated demand plus the transit shoulders (df > alpha*dtf variant)."""
    adt = p.alpha * d.dtf
    ratio = d.df / adt
    frt_outside = p.n_f_cbd / (p.lam * d.t_f_f) * (
        0.5 * (d.df - adt) ** 2
        + p.alpha * d.t_f_c * (d.df * math.log(ratio) - (d.df - adt))
    )
    return (1.0 / p.beta + 1.0 / p.gamma) * (_car_pc_terms(theta_p, p, d) + frt_outside)


def pc_candidates(p: ScenarioParams, d: DerivedParams) -> dict:
    """Solve every active-control candidate; report consistency flags.

    Keys are (PcRegime, variant) pairs where variant distinguishes the two
    NO_FRT_DURING_PC demand equations.
    """
    adt = p.alpha * d.dtf
    threshold = frt_use_threshold(p, d)
    n_target = p.n_total
    out = {}

    def _solve(f, lo):
        try:
            return rootfind.bisect_increasing(
                f, n_target, lo, max(_BRACKET_HI0, 2.0 * lo), rtol=THETA_RTOL)
        except rootfind.NoRootError:
            return None

    if d.df >= 2.0 * adt:
        theta = _solve(lambda x: demand_pc_full(x, p, d), 2.0 + _BRACKET_LO_EPS)
        out[(PcRegime.FULL_FRT, "full")] = (theta is not None, theta)
    elif d.df > adt:
        lo = max(2.0, threshold) + _BRACKET_LO_EPS
        theta = _solve(lambda x: demand_pc_partial(x, p, d), lo)
        out[(PcRegime.PARTIAL_FRT, "partial")] = (theta is not None, theta)
        theta_sh = _solve(lambda x: _demand_pc_nofrt_shoulder(x, p, d), 2.0 + _BRACKET_LO_EPS)
        ok = theta_sh is not None and theta_sh <= threshold
        out[(PcRegime.NO_FRT_DURING_PC, "shoulder")] = (ok, theta_sh)
    else:
        lo = max(2.0, threshold) + _BRACKET_LO_EPS
        theta = _solve(lambda x: demand_pc_frt_only(x, p, d), lo)
        out[(PcRegime.FRT_ONLY_DURING_PC, "frt_only")] = (theta is not None, theta)
        theta_nf = _solve(lambda x: demand_pc_nofrt(x, p, d), 2.0 + _BRACKET_LO_EPS)
        ok = theta_nf is not None and theta_nf <= threshold
        out[(PcRegime.NO_FRT_DURING_PC, "plain")] = (ok, theta_nf)
    return out


def solve_pc(p: ScenarioParams, d: DerivedParams | None = None) -> PcSolution:
    """Find the unique equilibrium under perimeter gating.

    Gating binds only when the no-control rush would cross the critical
    accumulation (theta > 2); below that the no-control solution is returned
    labeled INACTIVE.
    """
    if d is None:
        d = derive_params(p)
    ue = solve_ue(p, d)
    if ue.theta <= 2.0:
        return _wrap_inactive(ue, p, d)
    candidates = pc_candidates(p, d)
    consistent = [(key, theta) for key, (ok, theta) in candidates.items() if ok]
    if len(consistent) != 1:
        raise SolverError(
            "no consistent regime under gating: got "
            f"{[key[0].value + ':' + key[1] for key, _ in consistent]}"
        )
    (regime, variant), theta_p = consistent[0]
    return _build_pc_solution(regime, variant, theta_p, p, d, ue)


def _wrap_inactive(ue: UeSolution, p, d) -> PcSolution:
    lo, hi = ue.n_c.span
    shoulder = frt_shoulder_demand(p, d) if ue.regime in (
        UeRegime.BOTH_GAP, UeRegime.BOTH_CONTINUOUS) else (
        ue.n_frt if ue.regime is UeRegime.ALL_FRT else 0.0)
    return PcSolution(
        regime=PcRegime.INACTIVE, c_p_star=ue.c_star, theta_p=ue.theta,
        t_s_f=ue.t_s_f, t_s_c=ue.t_s_c, t_ee_f=ue.t_ee_f, t_s_p=None, t_sp_f=None,
        t_ep_f=None, t_e_p=None, t_sl_f=ue.t_sl_f, t_e_c=ue.t_e_c, t_e_f=ue.t_e_f,
        n_c=ue.n_c, o_f=ue.o_f, v_car=ue.v_car, v_frt=ue.v_frt,
        g_car=ue.g_car, g_frt=ue.g_frt,
        q=zero_profile(lo, hi), t_b=zero_profile(lo, hi),
        n_car_pc=0.0, n_car_outside=ue.n_car,
        n_frt_pc=0.0, n_frt_shoulder=shoulder, n_frt_outside=ue.n_frt - shoulder,
        ue=ue)


def _gated_cells(p, d):
    """Car-side segments while accumulation is clamped at the critical level."""
    return dict(
        n_c=ConstantSeg(d.n_crit),
        v_car=ConstantSeg(d.v_f_eff / 2.0),
        v_frt=ConstantSeg(p.m * d.v_f_eff / 2.0),
        g_car=ConstantSeg(d.i_p),
    )


def _frt_gated_ramp(p, d, anchor, o_at_anchor, o_slope):
    """Occupancy linear in time at the clamped transit speed."""
    scale = p.n_f_cbd / (2.0 * d.t_f_f)
    return dict(
        o_f=LinearSeg(anchor, o_at_anchor, o_slope),
        g_frt=LinearSeg(anchor, o_at_anchor * scale, o_slope * scale),
    )


def _build_pc_solution(regime, variant, theta_p, p, d, ue):
    a_tc = p.alpha * d.t_f_c
    adt = p.alpha * d.dtf
    k_b = p.beta / a_tc
    k_g = p.gamma / a_tc
    c_p = cost_from_theta(theta_p, p, d)
    t_s_c = p.t_star - a_tc / p.beta * (theta_p - 1.0)
    t_e_c = p.t_star + a_tc / p.gamma * (theta_p - 1.0)
    t_s_p = t_s_c + a_tc / p.beta
    t_e_p = t_e_c - a_tc / p.gamma
    early = dict(k=k_b, t_ref=t_s_c, sign=1.0)
    late = dict(k=k_g, t_ref=t_e_c, sign=-1.0)

    one_over = 1.0 / p.beta + 1.0 / p.gamma
    n_car_pc = p.alpha * d.n_j_eff / 4.0 * one_over * (theta_p - 2.0)
    n_car_outside = p.alpha * d.n_j_eff * one_over * (math.log(2.0) - 0.5)

    # interval map: (lo, hi, car_kind, frt_kind, anchor_args)
    # car_kind in {free, early, late, gated}; frt cells chosen per regime
    def car_cells(kind):
        if kind == "free":
            return _free_flow_cells(p, d)
        if kind == "gated":
            return _gated_cells(p, d)
        return _congested_cells(p, d, **(early if kind == "early" else late))

    breakpoints = []
    cells = []

    def add(t_lo, car_kind, frt_cells):
        breakpoints.append(t_lo)
        cell = car_cells(car_kind)
        cell.update(frt_cells)
        cells.append(cell)

    if regime in (PcRegime.FULL_FRT, PcRegime.PARTIAL_FRT) or variant == "shoulder":
        t_s_f = t_s_c - (d.df - adt) / p.beta
        t_e_f = t_e_c + (d.df - adt) / p.gamma
    else:
        t_s_f = t_e_f = None

    t_ee_f = t_sl_f = t_sp_f = t_ep_f = None

    if regime is PcRegime.FULL_FRT:
        add(t_s_f, "free", _frt_ramp_cells(p, d, t_s_f, 0.0, p.beta / p.lam))
        add(t_s_c, "early", _frt_congested_cells(p, d, **early))
        add(t_s_p, "gated", _frt_gated_ramp(p, d, t_s_p, (d.df - 2 * adt) / p.lam, p.beta / p.lam))
        add(p.t_star, "gated", _frt_gated_ramp(p, d, t_e_p, (d.df - 2 * adt) / p.lam, -p.gamma / p.lam))
        add(t_e_p, "late", _frt_congested_cells(p, d, **late))
        add(t_e_c, "free", _frt_ramp_cells(p, d, t_e_f, 0.0, -p.gamma / p.lam))
        breakpoints.append(t_e_f)
        n_frt_shoulder = frt_shoulder_demand(p, d)
        n_frt_outside = p.n_f_cbd * p.alpha / p.lam * d.t_f_c / d.t_f_f * one_over * (
            d.df * math.log(2.0) - adt)
        n_frt_pc = p.n_f_cbd / 2.0 * p.alpha / p.lam * d.t_f_c / d.t_f_f * one_over * (
            theta_p - 2.0) * (d.df - 2.0 * adt + a_tc / 2.0 * (theta_p - 2.0))
    elif regime is PcRegime.PARTIAL_FRT or variant == "shoulder":
        ratio = d.df / adt
        t_ee_f = t_s_c + a_tc / p.beta * (ratio - 1.0)
        t_sl_f = t_e_c - a_tc / p.gamma * (ratio - 1.0)
        add(t_s_f, "free", _frt_ramp_cells(p, d, t_s_f, 0.0, p.beta / p.lam))
        add(t_s_c, "early", _frt_congested_cells(p, d, **early))
        add(t_ee_f, "early", _frt_idle_cells())
        if regime is PcRegime.PARTIAL_FRT:
            surplus = c_p - 2.0 * p.alpha * d.t_f_f - p.f_f
            t_sp_f = p.t_star - surplus / p.beta
            t_ep_f = p.t_star + surplus / p.gamma
            add(t_s_p, "gated", _frt_idle_cells())
            add(t_sp_f, "gated", _frt_gated_ramp(p, d, t_sp_f, 0.0, p.beta / p.lam))
            add(p.t_star, "gated", _frt_gated_ramp(p, d, t_ep_f, 0.0, -p.gamma / p.lam))
            add(t_ep_f, "gated", _frt_idle_cells())
        else:
            add(t_s_p, "gated", _frt_idle_cells())
            add(p.t_star, "gated", _frt_idle_cells())
        add(t_e_p, "late", _frt_idle_cells())
        add(t_sl_f, "late", _frt_congested_cells(p, d, **late))
        add(t_e_c, "free", _frt_ramp_cells(p, d, t_e_f, 0.0, -p.gamma / p.lam))
        breakpoints.append(t_e_f)
        n_frt_shoulder = frt_shoulder_demand(p, d)
        n_frt_outside = p.n_f_cbd * p.alpha / p.lam * d.t_f_c / d.t_f_f * one_over * (
            d.df * math.log(ratio) - (d.df - adt))
        n_frt_pc = (one_over * _frt_gated_triangle(theta_p, p, d)
                    if regime is PcRegime.PARTIAL_FRT else 0.0)
    elif regime is PcRegime.FRT_ONLY_DURING_PC:
        surplus = c_p - 2.0 * p.alpha * d.t_f_f - p.f_f
        t_sp_f = p.t_star - surplus / p.beta
        t_ep_f = p.t_star + surplus / p.gamma
        t_s_f, t_e_f = t_sp_f, t_ep_f
        add(t_s_c, "early", _frt_idle_cells())
        add(t_s_p, "gated", _frt_idle_cells())
        add(t_sp_f, "gated", _frt_gated_ramp(p, d, t_sp_f, 0.0, p.beta / p.lam))
        add(p.t_star, "gated", _frt_gated_ramp(p, d, t_ep_f, 0.0, -p.gamma / p.lam))
        add(t_ep_f, "gated", _frt_idle_cells())
        add(t_e_p, "late", _frt_idle_cells())
        breakpoints.append(t_e_c)
        n_frt_shoulder = 0.0
        n_frt_outside = 0.0
        n_frt_pc = one_over * _frt_gated_triangle(theta_p, p, d)
    else:  # NO_FRT_DURING_PC, plain variant
        add(t_s_c, "early", _frt_idle_cells())
        add(t_s_p, "gated", _frt_idle_cells())
        add(p.t_star, "gated", _frt_idle_cells())
        add(t_e_p, "late", _frt_idle_cells())
        breakpoints.append(t_e_c)
        n_frt_shoulder = n_frt_outside = n_frt_pc = 0.0

    profiles = _assemble(breakpoints, cells)

    # boundary queue: triangular, peaking at the desired arrival time
    span_lo, span_hi = breakpoints[0], breakpoints[-1]
    q_bps = (span_lo, t_s_p, p.t_star, t_e_p, span_hi)
    q_segs = (
        ConstantSeg(0.0),
        LinearSeg(t_s_p, 0.0, d.i_p * p.beta / p.alpha),
        LinearSeg(t_e_p, 0.0, -d.i_p * p.gamma / p.alpha),
        ConstantSeg(0.0),
    )
    tb_segs = (
        ConstantSeg(0.0),
        LinearSeg(t_s_p, 0.0, p.beta / p.alpha),
        LinearSeg(t_e_p, 0.0, -p.gamma / p.alpha),
        ConstantSeg(0.0),
    )
    q = PiecewiseProfile(q_bps, q_segs)
    t_b = PiecewiseProfile(q_bps, tb_segs)

    return PcSolution(
        regime=regime, c_p_star=c_p, theta_p=theta_p,
        t_s_f=t_s_f, t_s_c=t_s_c, t_ee_f=t_ee_f, t_s_p=t_s_p, t_sp_f=t_sp_f,
        t_ep_f=t_ep_f, t_e_p=t_e_p, t_sl_f=t_sl_f, t_e_c=t_e_c, t_e_f=t_e_f,
        q=q, t_b=t_b,
        n_car_pc=n_car_pc, n_car_outside=n_car_outside,
        n_frt_pc=n_frt_pc, n_frt_shoulder=n_frt_shoulder, n_frt_outside=n_frt_outside,
        ue=ue, **profiles)
