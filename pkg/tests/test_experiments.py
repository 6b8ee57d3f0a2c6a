import math

import numpy as np
import pytest

from bimodal_bathtub.experiments import (
    BASE_CASE_I,
    BASE_CASE_II,
    COST_SWEEP_BASE,
    COST_SWEEP_VALUES,
    FLEET_SWEEP_VALUES,
    base_case_profiles,
    boundary_f_f,
    regime_map,
    sweep,
)

SWEEP_STEP = 2e-4  # fine enough for every oracle threshold, fast enough for CI


@pytest.fixture(scope="module")
def fleet_rows_ff2():
    return sweep(BASE_CASE_I, "n_f_cbd", FLEET_SWEEP_VALUES, SWEEP_STEP)


@pytest.fixture(scope="module")
def fleet_rows_ff1():
    return sweep(BASE_CASE_II, "n_f_cbd", FLEET_SWEEP_VALUES, SWEEP_STEP)


@pytest.fixture(scope="module")
def cost_rows():
    return sweep(COST_SWEEP_BASE, "f_f", COST_SWEEP_VALUES, SWEEP_STEP)


def test_sweep_rows_pass_oracle(fleet_rows_ff2, fleet_rows_ff1, cost_rows):
    for rows in (fleet_rows_ff2, fleet_rows_ff1, cost_rows):
        for row in rows:
            assert row.error == "", row.error
            assert math.isfinite(row.max_residual)
            assert row.max_residual < 1.0  # residual normalized by its tolerance reference
            assert 0.0 <= row.frt_share_ue <= 100.0
            assert 0.0 <= row.frt_share_pc <= 100.0


def test_fleet_sweep_trends_high_fixed_cost(fleet_rows_ff2):
    c = [r.c_star for r in fleet_rows_ff2]
    cp = [r.c_p_star for r in fleet_rows_ff2]
    ratio = [r.ratio for r in fleet_rows_ff2]
    assert all(b > a for a, b in zip(c, c[1:]))            # cost rises with fleet
    interior_min = int(np.argmin(cp))
    assert 0 < interior_min < len(cp) - 1                  # gated cost dips then rises
    assert all(b < a for a, b in zip(ratio, ratio[1:]))    # gating gains grow


def test_fleet_sweep_trends_low_fixed_cost(fleet_rows_ff1):
    cp = [r.c_p_star for r in fleet_rows_ff1]
    ratio = [r.ratio for r in fleet_rows_ff1]
    interior_min = int(np.argmin(cp))
    assert 0 < interior_min < len(cp) - 1
    assert all(b < a for a, b in zip(ratio, ratio[1:]))
    # the no-control cost is NOT monotone here: with a cheap transit mode the
    # crowding relief initially outweighs the capacity the fleet consumes
    c = [r.c_star for r in fleet_rows_ff1]
    assert c[1] < c[0]
    assert all(b > a for a, b in zip(c[1:], c[2:]))


def test_cost_sweep_ratio_turns_inside_window(cost_rows):
    ratio = [r.ratio for r in cost_rows]
    values = [r.value for r in cost_rows]
    turn = int(np.argmin(ratio))
    assert 5.0 <= values[turn] <= 10.0
    assert all(b < a for a, b in zip(ratio[:turn], ratio[1:turn + 1]))
    assert all(b > a for a, b in zip(ratio[turn:], ratio[turn + 1:]))
    assert all(r.ratio <= 1.0 for r in cost_rows)


def test_cost_sweep_share_pattern(cost_rows):
    shares_ue = [round(r.frt_share_ue, 1) for r in cost_rows]
    shares_pc = [round(r.frt_share_pc, 1) for r in cost_rows]
    # published pattern: ue 53.3 20.9 0.0 0.0 0.0 0.0 / pc 60.5 41.4 22.8 17.0 4.9 0.0
    assert shares_ue[2:] == [0.0, 0.0, 0.0, 0.0]
    assert shares_ue[0] > shares_ue[1] > 10.0
    assert shares_pc == sorted(shares_pc, reverse=True)
    assert shares_pc[-1] == 0.0
    assert shares_pc[2] > 0.0


def test_single_value_sweep_matches_direct_solve(case_i, pc_case_i, ue_case_i):
    rows = sweep(case_i, "n_f_cbd", [case_i.n_f_cbd], SWEEP_STEP)
    assert len(rows) == 1
    row = rows[0]
    assert row.c_star == pytest.approx(ue_case_i.c_star, rel=1e-12)
    assert row.c_p_star == pytest.approx(pc_case_i.c_p_star, rel=1e-12)
    assert row.ue_regime == ue_case_i.regime.value
    assert row.pc_regime == pc_case_i.regime.value


def test_sweep_records_per_row_failures(case_i):
    rows = sweep(case_i, "n_f_cbd", [5.0, 95.0], SWEEP_STEP)
    assert rows[0].error == ""
    assert rows[1].error != ""            # eta * 95 exceeds the jam accumulation
    assert math.isnan(rows[1].c_star)


def test_regime_map_brackets_fixed_cost_boundaries():
    # analytic boundaries on the cost-sweep config at n_f_cbd = 5
    single = boundary_f_f(COST_SWEEP_BASE, 5.0, 1.0)
    double = boundary_f_f(COST_SWEEP_BASE, 5.0, 2.0)
    assert single == pytest.approx(8.044917257683215, rel=1e-12)
    assert double == pytest.approx(5.08983451536643, rel=1e-12)
    f_grid = [4.8, 5.3, 7.8, 8.3]
    cells = regime_map(COST_SWEEP_BASE, "n_f_cbd", [5.0], "f_f", f_grid, SWEEP_STEP)
    by_ff = {c.y: c for c in cells}
    assert double > 4.8 and double < 5.3
    assert by_ff[4.8].pc_regime == "full_frt"
    assert by_ff[5.3].pc_regime == "partial_frt"
    assert single > 7.8 and single < 8.3
    assert by_ff[7.8].ue_regime == "both_gap"
    assert by_ff[8.3].ue_regime == "no_frt"


def test_regime_map_flags_match_regimes():
    cells = regime_map(
        COST_SWEEP_BASE, "n_f_cbd", [2.0, 12.0], "f_f", [1.0, 12.0], SWEEP_STEP)
    for cell in cells:
        assert cell.error == ""
        assert cell.theta_le_1 == (cell.ue_regime == "all_frt")
        assert cell.theta_le_2 == (cell.pc_regime == "inactive")
        if cell.pc_regime == "inactive":
            assert cell.c_p_star == pytest.approx(cell.c_star, rel=1e-12)


def test_regime_map_corner_cases():
    cells = regime_map(
        COST_SWEEP_BASE, "n_f_cbd", [1.0], "f_f", [25.0], SWEEP_STEP)
    assert cells[0].ue_regime == "no_frt"   # pricey transit, little fleet


def test_base_case_profile_shapes():
    case_i = base_case_profiles("case-i", SWEEP_STEP)
    case_ii = base_case_profiles("case-ii", SWEEP_STEP)
    for result in (case_i, case_ii):
        assert result["ue_report"].passes()
        assert result["pc_report"].passes()
    ue_i, ue_ii = case_i["ue"], case_ii["ue"]
    # interior idle window in case I; none in case II at no-control
    assert ue_i.o_f(0.5 * (ue_i.t_ee_f + ue_i.t_sl_f)) == 0.0
    # case II gated: transit loaded through the whole rush
    pc_ii = case_ii["pc"]
    t = np.linspace(pc_ii.t_s_f + 1e-9, pc_ii.t_e_f - 1e-9, 2001)
    assert np.min(pc_ii.o_f(t)) > 0.0
    # both cases hypercongest at the peak without control
    for sol in (ue_i, ue_ii):
        assert sol.n_c(0.0) > 47.0
    # pricier transit means more drivers and a longer rush hour
    assert ue_i.t_e_c - ue_i.t_s_c > ue_ii.t_e_c - ue_ii.t_s_c
    # gating shortens the rush in both cases
    for result in (case_i, case_ii):
        ue, pc = result["ue"], result["pc"]
        assert pc.t_e_c - pc.t_s_c < ue.t_e_c - ue.t_s_c
