"""Sensitivity experiments: one-parameter sweeps, two-parameter regime maps,
and the bundled demonstration scenarios.

The bundled configuration pins the demonstration network (20 mile/h free
flow, 100 veh jam, 5 transit vehicles in the district) with two fixed-cost
cases for the transit mode: case I (f_f = 2) produces a mid-rush window
with idle transit; case II (f_f = 1) keeps transit loaded through the whole
rush under gating. The fleet sweep is run under both fixed costs because
the published sensitivity table does not pin which one it used; treat the
two runs as envelopes rather than a digit-level target.
"""

from dataclasses import dataclass, replace

from .equilibrium_pc import solve_pc
from .equilibrium_ue import SolverError
from .oracle import verify
from .rootfind import BracketError
from .scenario import ScenarioError, ScenarioParams, derive_params, replace_param

BASE_CASE_I = ScenarioParams(
    v_f=20.0, eta=1.2, n_f_total=40.0, n_f_cbd=5.0, n_j=100.0, m=0.9,
    alpha=20.0, beta=10.0, gamma=40.0, lam=0.4,
    f_c=5.0, f_f=2.0, l_c=5.0, l_f=6.0, n_total=300.0, t_star=0.0,
)
BASE_CASE_II = replace(BASE_CASE_I, f_f=1.0)
# longer transit trips, pricier cars, thinner demand: the fixed-cost sweep config
COST_SWEEP_BASE = replace(BASE_CASE_I, l_f=7.0, f_c=11.0, n_total=200.0, f_f=3.0)

FLEET_SWEEP_VALUES = (1.0, 5.0, 10.0, 15.0, 20.0)
COST_SWEEP_VALUES = (3.0, 5.0, 8.0, 10.0, 15.0, 20.0)

CASE_LABELS = {"case-i": BASE_CASE_I, "case-ii": BASE_CASE_II}


@dataclass(frozen=True)
class SweepRow:
    value: float
    c_star: float
    frt_share_ue: float
    c_p_star: float
    frt_share_pc: float
    ratio: float
    ue_regime: str
    pc_regime: str
    max_residual: float
    error: str = ""

    CSV_HEADER = ("value,c_star,frt_share_ue,c_pstar,frt_share_pc,ratio,"
                  "ue_regime,pc_regime,max_residual")

    def as_csv_row(self) -> str:
        def num(x):
            return f"{x:.12g}"
        regimes = (self.ue_regime, self.pc_regime)
        if self.error:
            regimes = (f"error:{self.error}",) * 2
        return ",".join([
            num(self.value), num(self.c_star), num(self.frt_share_ue),
            num(self.c_p_star), num(self.frt_share_pc), num(self.ratio),
            regimes[0], regimes[1], num(self.max_residual),
        ])


@dataclass(frozen=True)
class RegimeCell:
    x: float
    y: float
    c_star: float
    c_p_star: float
    ue_regime: str
    pc_regime: str
    theta_le_1: bool
    theta_le_2: bool
    max_residual: float
    error: str = ""


def _solve_and_check(p: ScenarioParams, grid_step: float):
    d = derive_params(p)
    pc = solve_pc(p, d)
    ue = pc.ue
    rep_ue = verify(ue, p, d, grid_step)
    rep_pc = verify(pc, p, d, grid_step)
    return ue, pc, rep_ue, rep_pc


def sweep(p: ScenarioParams, key: str, values, grid_step: float = 1e-4) -> list:
    """Solve both equilibria for each substituted value of one parameter.

    Rows are produced in input order. A failing scenario (validation,
    solver, or oracle threshold) yields a row tagged with the failure
    instead of aborting the sweep.
    """
    rows = []
    nan = float("nan")
    for value in values:
        try:
            p_row = replace_param(p, key, value)
            ue, pc, rep_ue, rep_pc = _solve_and_check(p_row, grid_step)
            max_res = max(rep_ue.max_relative_residual(), rep_pc.max_relative_residual())
            error = ""
            bad = rep_ue.failures() + rep_pc.failures()
            if bad:
                error = "oracle: " + "; ".join(bad)
            rows.append(SweepRow(
                value=float(value),
                c_star=ue.c_star,
                frt_share_ue=100.0 * ue.n_frt / p_row.n_total,
                c_p_star=pc.c_p_star,
                frt_share_pc=100.0 * pc.n_frt / p_row.n_total,
                ratio=pc.c_p_star / ue.c_star,
                ue_regime=ue.regime.value,
                pc_regime=pc.regime.value,
                max_residual=max_res,
                error=error,
            ))
        except (ScenarioError, SolverError, BracketError) as exc:
            rows.append(SweepRow(
                value=float(value), c_star=nan, frt_share_ue=nan, c_p_star=nan,
                frt_share_pc=nan, ratio=nan, ue_regime="", pc_regime="",
                max_residual=nan, error=str(exc)))
    return rows


def regime_map(p: ScenarioParams, x_key: str, x_values, y_key: str, y_values,
               grid_step: float = 1e-4) -> list:
    """Cell-wise solve and classify over a two-parameter grid (row-major in y, x)."""
    cells = []
    nan = float("nan")
    for y in y_values:
        for x in x_values:
            try:
                p_cell = replace_param(replace_param(p, x_key, x), y_key, y)
                ue, pc, rep_ue, rep_pc = _solve_and_check(p_cell, grid_step)
                error = ""
                bad = rep_ue.failures() + rep_pc.failures()
                if bad:
                    error = "oracle: " + "; ".join(bad)
                cells.append(RegimeCell(
                    x=float(x), y=float(y),
                    c_star=ue.c_star, c_p_star=pc.c_p_star,
                    ue_regime=ue.regime.value, pc_regime=pc.regime.value,
                    theta_le_1=ue.theta <= 1.0, theta_le_2=ue.theta <= 2.0,
                    max_residual=max(rep_ue.max_relative_residual(),
                                     rep_pc.max_relative_residual()),
                    error=error))
            except (ScenarioError, SolverError, BracketError) as exc:
                cells.append(RegimeCell(
                    x=float(x), y=float(y), c_star=nan, c_p_star=nan,
                    ue_regime="", pc_regime="", theta_le_1=False, theta_le_2=False,
                    max_residual=nan, error=str(exc)))
    return cells


def boundary_f_f(p: ScenarioParams, n_f_cbd: float, multiple: float) -> float:
    """Transit fixed cost at which the fixed-cost gap equals `multiple` times
    the free-flow travel-time cost gap, for the given in-district fleet."""
    d = derive_params(replace_param(p, "n_f_cbd", n_f_cbd))
    return p.f_c - multiple * p.alpha * d.dtf


def base_case_profiles(case_label: str, grid_step: float = 1e-4) -> dict:
    """Solve both equilibria of a bundled case and verify them."""
    if case_label not in CASE_LABELS:
        raise ScenarioError(f"unknown case label: {case_label} (want case-i or case-ii)")
    p = CASE_LABELS[case_label]
    ue, pc, rep_ue, rep_pc = _solve_and_check(p, grid_step)
    return {"params": p, "ue": ue, "pc": pc, "ue_report": rep_ue, "pc_report": rep_pc}


def fleet_and_cost_tables(grid_step: float = 1e-4) -> dict:
    """The three bundled sensitivity tables keyed by output stem."""
    return {
        "table1_ff1": sweep(BASE_CASE_II, "n_f_cbd", FLEET_SWEEP_VALUES, grid_step),
        "table1_ff2": sweep(BASE_CASE_I, "n_f_cbd", FLEET_SWEEP_VALUES, grid_step),
        "table2": sweep(COST_SWEEP_BASE, "f_f", COST_SWEEP_VALUES, grid_step),
    }
