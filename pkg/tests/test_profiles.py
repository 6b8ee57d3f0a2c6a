import numpy as np
import pytest

from bimodal_bathtub.profiles import (
    AccumSeg,
    ConstantSeg,
    ExitSeg,
    FrtArrivalSeg,
    LinearSeg,
    PiecewiseProfile,
    ReciprocalSeg,
    knot_grid,
    zero_profile,
)


def test_segment_shapes_match_hand_formulas():
    t = np.array([0.0, 0.5, 1.0])
    k, t_ref = 2.0, 0.0
    u = 1.0 + k * (t - t_ref)
    assert AccumSeg(94.0, k, t_ref, 1.0)(t) == pytest.approx(94.0 * (1 - 1 / u))
    assert ReciprocalSeg(18.8, k, t_ref, 1.0)(t) == pytest.approx(18.8 / u)
    assert ExitSeg(353.0, k, t_ref, 1.0)(t) == pytest.approx(353.0 * (1 / u - 1 / u**2))
    assert FrtArrivalSeg(7.0, 3.0, k, t_ref, 1.0)(t) == pytest.approx(7.0 / u - 3.0)
    # late side mirrors around t_ref
    late = AccumSeg(94.0, k, t_ref, -1.0)(t - 1.0)
    assert late == pytest.approx(94.0 * (1 - 1 / (1 + k * (t_ref - (t - 1.0)))))
    assert LinearSeg(0.5, 2.0, -4.0)(t) == pytest.approx(2.0 - 4.0 * (t - 0.5))


def test_profile_evaluates_zero_outside_span():
    prof = PiecewiseProfile((0.0, 1.0, 2.0), (ConstantSeg(3.0), ConstantSeg(4.0)))
    assert prof(-0.1) == 0.0
    assert prof(2.1) == 0.0
    assert prof(0.0) == 3.0
    assert prof(2.0) == 4.0  # right endpoint belongs to the last segment
    assert prof(1.0) == 4.0  # interior breakpoints belong to the right segment
    out = prof(np.array([-1.0, 0.5, 1.5, 3.0]))
    assert out == pytest.approx([0.0, 3.0, 4.0, 0.0])


def test_breakpoints_must_strictly_increase():
    with pytest.raises(ValueError, match="strictly increasing"):
        PiecewiseProfile((0.0, 0.0, 1.0), (ConstantSeg(1.0), ConstantSeg(2.0)))
    with pytest.raises(ValueError, match="one more breakpoint"):
        PiecewiseProfile((0.0, 1.0), (ConstantSeg(1.0), ConstantSeg(2.0)))


def test_max_jump_detects_discontinuity():
    cont = PiecewiseProfile((0.0, 1.0, 2.0),
                            (LinearSeg(0.0, 0.0, 1.0), LinearSeg(1.0, 1.0, -1.0)))
    assert cont.max_jump() == pytest.approx(0.0, abs=1e-15)
    broken = PiecewiseProfile((0.0, 1.0, 2.0), (ConstantSeg(1.0), ConstantSeg(3.0)))
    assert broken.max_jump() == pytest.approx(2.0)


def test_solution_profiles_are_continuous_and_nonnegative(ue_case_i, pc_case_i, pc_case_ii):
    for sol in (ue_case_i, pc_case_i, pc_case_ii):
        for name in ("n_c", "o_f", "v_car", "v_frt", "g_car", "g_frt"):
            prof = getattr(sol, name)
            assert prof.max_jump() < 1e-9, f"{name} jumps"
            t = knot_grid(prof.breakpoints, 1e-3)
            assert np.min(prof(t)) >= -1e-12, f"{name} negative"


def test_knot_grid_lands_on_every_breakpoint():
    bps = (0.0, 0.1234, 1.0)
    g = knot_grid(bps, 0.01)
    for b in bps:
        assert np.min(np.abs(g - b)) == 0.0
    assert np.max(np.diff(g)) <= 0.01 + 1e-15
    assert np.all(np.diff(g) > 0.0)
    with pytest.raises(ValueError, match="step"):
        knot_grid(bps, 0.0)


def test_zero_profile():
    prof = zero_profile(-1.0, 1.0)
    assert prof(0.0) == 0.0
    assert prof.span == (-1.0, 1.0)
