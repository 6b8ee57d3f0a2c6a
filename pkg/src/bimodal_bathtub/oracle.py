"""Independent numeric verification of solved equilibria.

The verifier never trusts the solver's demand algebra: it re-evaluates trip
costs on a dense knot-aligned grid straight from the profiles, integrates
the arrival rates by trapezoid, replays the occupancy ODE with a one-step
fourth-order integrator, and checks that the implied origin departure rates
stay nonnegative in their own time frame. Costs must be flat at the solved
value wherever a mode is used and no better anywhere it is not.
"""

import math
from dataclasses import dataclass, fields

import numpy as np

from .equilibrium_pc import PcSolution
from .equilibrium_ue import UeSolution
from .profiles import ConstantSeg, LinearSeg, PiecewiseProfile, knot_grid
from .scenario import DerivedParams, ScenarioParams

DEFAULT_GRID_STEP = 1e-4
COST_RTOL = 1e-8
CONSERVATION_RTOL = 1e-6
REPLAY_RTOL = 1e-6
RATE_FLOOR = -1e-9
_PAD_HOURS = 0.5


@dataclass(frozen=True)
class VerificationReport:
    """Residuals of one solved equilibrium against the equilibrium conditions.

    travel_time_gap is a diagnostic only: it measures how far the
    instantaneous travel-time rule sits from the exact trajectory integral
    on the solved speed profiles, and carries no pass/fail threshold.
    """

    max_cost_residual_car: float
    max_cost_residual_frt: float
    min_slack: float
    conservation_error: float
    min_implied_departure_rate: float
    ode_replay_error: float
    replay_min_boarding_rate: float
    travel_time_gap: float
    c_ref: float
    n_ref: float
    o_f_ref: float

    def failures(self) -> list:
        out = []
        if self.max_cost_residual_car > COST_RTOL * self.c_ref:
            out.append(f"car cost flatness {self.max_cost_residual_car:.3e}")
        if self.max_cost_residual_frt > COST_RTOL * self.c_ref:
            out.append(f"frt cost flatness {self.max_cost_residual_frt:.3e}")
        if self.min_slack < -COST_RTOL * self.c_ref:
            out.append(f"negative slack {self.min_slack:.3e}")
        if self.conservation_error > CONSERVATION_RTOL * self.n_ref:
            out.append(f"conservation {self.conservation_error:.3e}")
        if self.ode_replay_error > REPLAY_RTOL * max(self.o_f_ref, 1e-300):
            out.append(f"occupancy replay {self.ode_replay_error:.3e}")
        if self.min_implied_departure_rate < RATE_FLOOR:
            out.append(f"implied departure rate {self.min_implied_departure_rate:.3e}")
        return out

    def passes(self) -> bool:
        return not self.failures()

    def max_relative_residual(self) -> float:
        """Worst residual normalized by its own tolerance reference."""
        return max(
            self.max_cost_residual_car / self.c_ref,
            self.max_cost_residual_frt / self.c_ref,
            max(0.0, -self.min_slack) / self.c_ref,
            self.conservation_error / self.n_ref,
            self.ode_replay_error / max(self.o_f_ref, 1e-300),
        )

    def as_text(self) -> str:
        lines = [f"{f.name} = {getattr(self, f.name):.12g}" for f in fields(self)]
        lines.append(f"passes = {int(self.passes())}")
        return "\n".join(lines) + "\n"

    @staticmethod
    def csv_header() -> str:
        return ",".join(f.name for f in fields(VerificationReport)) + ",passes"

    def as_csv_row(self) -> str:
        vals = [f"{getattr(self, f.name):.12g}" for f in fields(self)]
        vals.append(str(int(self.passes())))
        return ",".join(vals)


def solution_breakpoints(sol) -> tuple:
    """Union of breakpoints across a solution's profiles."""
    bps = set()
    for name in ("n_c", "o_f", "v_car", "v_frt", "g_car", "g_frt", "q", "t_b"):
        prof = getattr(sol, name, None)
        if prof is not None:
            bps.update(prof.breakpoints)
    return tuple(sorted(bps))


def quadrature_demand(profile_g_c: PiecewiseProfile, profile_g_f: PiecewiseProfile,
                      step: float) -> float:
    """Knot-aligned trapezoid integral of both arrival-rate profiles."""
    total = 0.0
    for prof in (profile_g_c, profile_g_f):
        t = knot_grid(prof.breakpoints, step)
        total += float(np.trapezoid(prof(t), t))
    return total


def _segment_slices(grid: np.ndarray, breakpoints) -> list:
    """Index ranges of `grid` covering each inter-breakpoint interval."""
    idx = np.searchsorted(grid, np.asarray(breakpoints))
    return [(idx[i], idx[i + 1]) for i in range(len(breakpoints) - 1)]


def _linear_slope(segment) -> float:
    if isinstance(segment, LinearSeg):
        return segment.slope
    if isinstance(segment, ConstantSeg):
        return 0.0
    raise TypeError(f"occupancy profile has unexpected segment {type(segment).__name__}")


def replay_frt_ode(solution, p: ScenarioParams, d: DerivedParams,
                   step: float = 1e-3):
    """Forward-integrate the occupancy balance and compare with the closed form.

    The boarding rate implied by the closed-form occupancy o(t) is
    d_f(t) = n_f_total * o'(t) + o(t) * n_f_cbd * v_frt(t) / l_f; feeding it
    back into the balance o' = (d_f - alighting)/n_f_total and integrating
    with classic fourth-order Runge-Kutta from the rush start must reproduce
    o(t). Knots land on every profile breakpoint. Returns (sup-norm error,
    min boarding rate). The boarding rate dips negative near the tail of the
    rush: with travel time pinned to the arrival instant the linear decay of
    the occupancy cannot be realized by alighting alone. That is an artifact
    of the instantaneous approximation and is reported, not gated.
    """
    o_prof: PiecewiseProfile = solution.o_f
    v_prof: PiecewiseProfile = solution.v_frt
    if o_prof.breakpoints != v_prof.breakpoints:
        raise ValueError("occupancy and transit-speed profiles must share breakpoints")
    sup_err = 0.0
    min_board = math.inf
    o_carry = 0.0
    alight_coeff = p.n_f_cbd / (p.n_f_total * p.l_f)
    for i, (lo, hi) in enumerate(zip(o_prof.breakpoints[:-1], o_prof.breakpoints[1:])):
        seg_o = o_prof.segments[i]
        seg_v = v_prof.segments[i]
        slope = _linear_slope(seg_o)
        n_steps = max(1, int(np.ceil((hi - lo) / step)))
        t = np.linspace(lo, hi, n_steps + 1)
        h = (hi - lo) / n_steps

        def coeffs(ts):
            v = np.asarray(seg_v(ts), dtype=float)
            b = alight_coeff * v
            o_cf = np.asarray(seg_o(ts), dtype=float)
            d_f = p.n_f_total * slope + o_cf * p.n_f_cbd * v / p.l_f
            return d_f / p.n_f_total, b, d_f

        a0, b0, df0 = coeffs(t[:-1])
        a1, b1, _ = coeffs(t[:-1] + 0.5 * h)
        a2, b2, _ = coeffs(t[1:])
        _, _, df_end = coeffs(t[-1:])
        min_board = min(min_board, float(np.min(df0)), float(df_end[0]))

        # classic RK4 for the linear ODE o' = a(t) - b(t) o collapses to the
        # affine recursion o_{k+1} = A_k + B_k o_k with coefficients below
        p1, q1 = a0, -b0
        p2 = a1 - 0.5 * h * b1 * p1
        q2 = -b1 * (1.0 + 0.5 * h * q1)
        p3 = a1 - 0.5 * h * b1 * p2
        q3 = -b1 * (1.0 + 0.5 * h * q2)
        p4 = a2 - h * b2 * p3
        q4 = -b2 * (1.0 + h * q3)
        A = h / 6.0 * (p1 + 2.0 * p2 + 2.0 * p3 + p4)
        B = 1.0 + h / 6.0 * (q1 + 2.0 * q2 + 2.0 * q3 + q4)

        # run the affine recursion with cumulative products, in chunks to
        # keep the running product away from underflow
        o_vals = np.empty(n_steps + 1)
        o_vals[0] = o_carry
        start = 0
        chunk = 4096
        while start < n_steps:
            stop = min(start + chunk, n_steps)
            prod = np.cumprod(B[start:stop])
            contrib = np.cumsum(A[start:stop] / prod)
            o_vals[start + 1:stop + 1] = prod * (o_vals[start] + contrib)
            start = stop
        o_carry = o_vals[-1]
        sup_err = max(sup_err, float(np.max(np.abs(o_vals - seg_o(t)))))
    if not np.isfinite(min_board):
        min_board = 0.0
    return sup_err, float(min_board)


def _cost_arrays(sol, p, d, t):
    """Trip costs at arrival times t, free-flow extended outside the profile span."""
    lo, hi = sol.n_c.span
    inside = (t >= lo) & (t <= hi)
    v_c = np.where(inside, sol.v_car(t), d.v_f_eff)
    v_f = np.where(inside, sol.v_frt(t), p.m * d.v_f_eff)
    o_f = np.where(inside, sol.o_f(t), 0.0)
    n_c = np.where(inside, sol.n_c(t), 0.0)
    t_b_prof = getattr(sol, "t_b", None)
    wait = np.where(inside, t_b_prof(t), 0.0) if t_b_prof is not None else np.zeros_like(t)
    sched = np.where(t <= p.t_star, p.beta * (p.t_star - t), p.gamma * (t - p.t_star))
    cost_car = p.alpha * (p.l_c / v_c + wait) + sched + p.f_c
    cost_frt = p.alpha * (p.l_f / v_f) + sched + p.lam * o_f + p.f_f
    return n_c, o_f, cost_car, cost_frt, wait, v_c, v_f


def _implied_rate_min(grid, bps, flow, total_time) -> float:
    """Min departure rate in origin time: flow / (1 - d total_time / dt), per segment."""
    worst = math.inf
    for i0, i1 in _segment_slices(grid, bps):
        if i1 - i0 < 2:
            continue
        tt = total_time[i0:i1 + 1]
        ts = grid[i0:i1 + 1]
        jac = 1.0 - np.gradient(tt, ts)
        g = flow[i0:i1 + 1]
        rate = np.where(jac > 1e-12, g / np.where(jac > 1e-12, jac, 1.0),
                        np.where(g > 1e-12, -math.inf, 0.0))
        worst = min(worst, float(np.min(rate)))
    return worst


def _travel_time_gap(sol, p, d, t_used_car, t_used_frt, grid_step):
    """Sup gap between the instantaneous rule and the exact trajectory integral."""
    lo, hi = sol.n_c.span
    worst = 0.0
    specs = []
    if t_used_car.size:
        specs.append((sol.v_car, d.v_f_eff, p.l_c, t_used_car))
    if t_used_frt.size:
        specs.append((sol.v_frt, p.m * d.v_f_eff, p.l_f, t_used_frt))
    for v_prof, v_free, length, t_used in specs:
        step = max(grid_step, (hi - lo) / 20000.0)
        inst = length / np.where((t_used >= lo) & (t_used <= hi), v_prof(t_used), v_free)
        pad = float(np.max(inst)) * 1.25 + 4.0 * step
        t_ext = np.concatenate([
            np.arange(lo - pad, lo, step),
            knot_grid(v_prof.breakpoints, step),
        ])
        v_ext = np.where((t_ext >= lo) & (t_ext <= hi), v_prof(t_ext), v_free)
        v_cum = np.concatenate([[0.0], np.cumsum(0.5 * (v_ext[1:] + v_ext[:-1]) * np.diff(t_ext))])
        arrive_pos = np.interp(t_used, t_ext, v_cum)
        enter_time = np.interp(arrive_pos - length, v_cum, t_ext)
        exact = t_used - enter_time
        worst = max(worst, float(np.max(np.abs(exact - inst))))
    return worst


def verify(solution, p: ScenarioParams, d: DerivedParams,
           grid_step: float = DEFAULT_GRID_STEP) -> VerificationReport:
    """Evaluate all equilibrium residuals of a solved UE or PC solution."""
    is_pc = isinstance(solution, PcSolution)
    if not (is_pc or isinstance(solution, UeSolution)):
        raise TypeError(f"cannot verify {type(solution).__name__}")
    c_eq = solution.c_p_star if is_pc else solution.c_star

    bps = solution_breakpoints(solution)
    grid = knot_grid(bps, grid_step)
    lo, hi = bps[0], bps[-1]
    pad_n = max(2, int(_PAD_HOURS / max(grid_step, 1e-3)))
    grid = np.concatenate([
        np.linspace(lo - _PAD_HOURS, lo, pad_n, endpoint=False),
        grid,
        np.linspace(hi, hi + _PAD_HOURS, pad_n + 1)[1:],
    ])

    n_c, o_f, cost_car, cost_frt, wait, v_c, v_f = _cost_arrays(solution, p, d, grid)

    used_car = n_c > 0.0
    used_frt = o_f > 0.0
    res_car = float(np.max(np.abs(cost_car[used_car] - c_eq))) if used_car.any() else 0.0
    res_frt = float(np.max(np.abs(cost_frt[used_frt] - c_eq))) if used_frt.any() else 0.0
    slacks = []
    if (~used_car).any():
        slacks.append(float(np.min(cost_car[~used_car] - c_eq)))
    if (~used_frt).any():
        slacks.append(float(np.min(cost_frt[~used_frt] - c_eq)))
    min_slack = min(slacks) if slacks else 0.0

    conservation = abs(
        quadrature_demand(solution.g_car, solution.g_frt, grid_step) - p.n_total)

    g_car = np.where((grid >= lo) & (grid <= hi), solution.g_car(grid), 0.0)
    g_frt = np.where((grid >= lo) & (grid <= hi), solution.g_frt(grid), 0.0)
    rate_min = min(
        _implied_rate_min(grid, bps, g_car, p.l_c / v_c + wait),
        _implied_rate_min(grid, bps, g_frt, p.l_f / v_f),
    )

    replay_err, replay_min_rate = replay_frt_ode(
        solution, p, d, step=max(grid_step, 1e-4))

    tt_gap = _travel_time_gap(
        solution, p, d, grid[used_car], grid[used_frt], grid_step)

    return VerificationReport(
        max_cost_residual_car=res_car,
        max_cost_residual_frt=res_frt,
        min_slack=min_slack,
        conservation_error=conservation,
        min_implied_departure_rate=rate_min,
        ode_replay_error=replay_err,
        replay_min_boarding_rate=replay_min_rate,
        travel_time_gap=tt_gap,
        c_ref=c_eq,
        n_ref=p.n_total,
        o_f_ref=float(np.max(o_f)) if o_f.size else 0.0,
    )
