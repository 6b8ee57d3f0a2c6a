import dataclasses

import pytest

from bimodal_bathtub import derive_params, solve_pc, solve_ue
from bimodal_bathtub.experiments import BASE_CASE_I, BASE_CASE_II, COST_SWEEP_BASE


@pytest.fixture(scope="session")
def case_i():
    return BASE_CASE_I


@pytest.fixture(scope="session")
def case_ii():
    return BASE_CASE_II


@pytest.fixture(scope="session")
def cost_base():
    return COST_SWEEP_BASE


@pytest.fixture(scope="session")
def d_case_i(case_i):
    return derive_params(case_i)


@pytest.fixture(scope="session")
def d_case_ii(case_ii):
    return derive_params(case_ii)


@pytest.fixture(scope="session")
def ue_case_i(case_i, d_case_i):
    return solve_ue(case_i, d_case_i)


@pytest.fixture(scope="session")
def ue_case_ii(case_ii, d_case_ii):
    return solve_ue(case_ii, d_case_ii)


@pytest.fixture(scope="session")
def pc_case_i(case_i, d_case_i):
    return solve_pc(case_i, d_case_i)


@pytest.fixture(scope="session")
def pc_case_ii(case_ii, d_case_ii):
    return solve_pc(case_ii, d_case_ii)


@pytest.fixture(scope="session")
def shoulder_scenario(case_i):
    """Long transit trips with a thin fixed-cost edge: gating active while
    transit is used only on the free-flow shoulders."""
    return dataclasses.replace(
        case_i, l_c=5.0, l_f=10.0, m=0.5, beta=4.0, f_c=20.0, f_f=3.245,
        n_total=217.5)
