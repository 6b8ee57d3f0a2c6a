"""Stateless flow/cost primitives shared by the solvers and the verifier.

Congestion follows a Greenshields-type accumulation-speed relation on the
reduced network: v_c = v_f_eff * (1 - n_c / n_j_eff). Transit moves at a
fixed fraction m of the car speed. Trip cost is linear in travel time,
schedule deviation, crowding, and boundary waiting.
"""

import enum

import numpy as np

from .scenario import DerivedParams, ScenarioParams


class Mode(enum.Enum):
    CAR = "car"
    FRT = "frt"


def car_speed(n_c, d: DerivedParams):
    """Space-mean car speed at accumulation n_c. Accepts scalars or arrays."""
    n_c = np.asarray(n_c, dtype=float)
    if np.any(n_c < 0.0) or np.any(n_c > d.n_j_eff):
        raise ValueError(f"car accumulation outside [0, {d.n_j_eff}]")
    out = d.v_f_eff * (1.0 - n_c / d.n_j_eff)
    return float(out) if out.ndim == 0 else out


def frt_speed(v_c, m: float):
    """Transit speed given the current car speed."""
    v_c = np.asarray(v_c, dtype=float)
    if np.any(v_c < 0.0):
        raise ValueError("car speed must be nonnegative")
    if not 0.0 < m < 1.0:
        raise ValueError(f"m must be in (0, 1), got {m}")
    out = m * v_c
    return float(out) if out.ndim == 0 else out


def car_exit_rate(n_c, d: DerivedParams):
    """Trip-completion rate n_c * v_c / l_c; unimodal with peak i_p at n_crit."""
    n_c = np.asarray(n_c, dtype=float)
    v = car_speed(n_c, d)
    out = np.asarray(n_c * v) * (d.i_p * 4.0 / (d.n_j_eff * d.v_f_eff))
    return float(out) if out.ndim == 0 else out


def frt_passenger_arrival_rate(o_f, v_frt, d: DerivedParams, p: ScenarioParams):
    """Passenger alighting rate o_f * n_f_cbd * v_frt / l_f."""
    o_f = np.asarray(o_f, dtype=float)
    v_frt = np.asarray(v_frt, dtype=float)
    if np.any(o_f < 0.0):
        raise ValueError("occupancy must be nonnegative")
    if np.any(v_frt < 0.0):
        raise ValueError("transit speed must be nonnegative")
    out = o_f * p.n_f_cbd * v_frt / p.l_f
    return float(out) if out.ndim == 0 else out


def travel_time(mode: Mode, n_c, d: DerivedParams):
    """In-district travel time attached to the arrival instant: l / v(arrival)."""
    n_c = np.asarray(n_c, dtype=float)
    if np.any(n_c < 0.0):
        raise ValueError("car accumulation must be nonnegative")
    if np.any(n_c >= d.n_j_eff):
        raise ValueError("travel time is singular at jam accumulation")
    free = d.t_f_c if mode is Mode.CAR else d.t_f_f
    out = np.asarray(free / (1.0 - n_c / d.n_j_eff))
    return float(out) if out.ndim == 0 else out


def schedule_delay(t_arr, p: ScenarioParams):
    """Piecewise-linear schedule penalty: beta per early hour, gamma per late hour."""
    t_arr = np.asarray(t_arr, dtype=float)
    out = np.where(t_arr <= p.t_star,
                   p.beta * (p.t_star - t_arr),
                   p.gamma * (t_arr - p.t_star))
    return float(out) if out.ndim == 0 else out


def trip_cost(mode: Mode, t_arr, travel_time_h, o_f, wait_h, p: ScenarioParams):
    """Full trip cost of a commuter arriving at t_arr.

    Car: alpha*(travel + wait) + schedule + f_c. Transit bypasses the
    boundary queue, so wait must be zero; it pays the crowding penalty
    lam*o_f instead: alpha*travel + schedule + lam*o_f + f_f.
    """
    t_arr = np.asarray(t_arr, dtype=float)
    travel_time_h = np.asarray(travel_time_h, dtype=float)
    o_f = np.asarray(o_f, dtype=float)
    wait_h = np.asarray(wait_h, dtype=float)
    if np.any(travel_time_h < 0.0) or np.any(o_f < 0.0) or np.any(wait_h < 0.0):
        raise ValueError("travel time, occupancy and wait must be nonnegative")
    sched = schedule_delay(t_arr, p)
    if mode is Mode.CAR:
        out = p.alpha * (travel_time_h + wait_h) + sched + p.f_c
    else:
        if np.any(wait_h > 0.0):
            raise ValueError("transit has boundary priority; wait must be zero for FRT")
        out = p.alpha * travel_time_h + sched + p.lam * o_f + p.f_f
    out = np.asarray(out)
    return float(out) if out.ndim == 0 else out
