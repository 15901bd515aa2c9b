import math

import numpy as np
import pytest

from kirchhoff_singular import (
    BranchReport,
    Params,
    SolveReport,
    absorption_solve,
    branch_function,
    dirac_potential,
    gradient_mass,
    negative_branch_solve,
    potential_pair,
    weak_singularity_solve,
)
from kirchhoff_singular.dirac import absorption_sandwich
from kirchhoff_singular.errors import BarrierEscapeError, IterationError, ParameterDomainError, SupercriticalError
from kirchhoff_singular.green import green_apply, pointwise_residual
from kirchhoff_singular.mass import weak_residual
from kirchhoff_singular.reports import dumps, loads


@pytest.fixture(scope="module")
def weak(grid):
    return weak_singularity_solve(Params(3, 2.0, 1.0, 1.0), grid)


def test_weak_solution_bounds(weak, grid):
    P = weak.params
    assert weak.fixed_point_residual <= 1e-6 and weak.barrier_ok
    top = (weak.t_p * P.k**P.p) * potential_pair(P, grid).w1
    upper = 2.0 + gradient_mass(top, P, check=False).grad_mass + 1e-3
    assert 2.0 - 1e-3 <= weak.m_theta <= upper
    assert weak.singular_coeff_measured == pytest.approx(1 / (4 * math.pi), rel=0.02)


def test_weak_solution_is_fixed_point(weak):
    # independent of the iteration: recompute v from its own M and Green operator
    P = weak.params
    u = weak.profile
    m = gradient_mass(u, P).m_theta
    assert m == pytest.approx(weak.m_theta, rel=1e-12)
    v = green_apply(u.power(P.p), P) * (1.0 / m)
    np.testing.assert_allclose(v.values, weak.v_part.values, rtol=5e-6, atol=0)
    assert weak_residual(u, P, m) <= 1e-4
    res = pointwise_residual(weak.v_part, u, P, 1.0 / m)
    assert np.max(res) < 1e-6


def test_weak_start_from_top_agrees(weak, grid):
    top = weak_singularity_solve(weak.params, grid, start="top")
    assert top.m_theta == pytest.approx(weak.m_theta, rel=1e-6)


def test_weak_zero_data_limit(grid):
    rep = weak_singularity_solve(Params(3, 2.0, 1.0, 1e-6), grid)
    assert np.max(np.abs(rep.v_part.values)) <= 1e-8


def test_weak_two_dimensions(grid):
    rep = weak_singularity_solve(Params(2, 2.0, 0.0, 1.0), grid)
    assert rep.fixed_point_residual <= 1e-6 and rep.barrier_ok
    assert rep.singular_coeff_measured == pytest.approx(1 / (2 * math.pi), rel=0.02)


def test_weak_errors(grid):
    with pytest.raises(SupercriticalError):
        weak_singularity_solve(Params(3, 3.5, 1.0, 1.0), grid)
    with pytest.raises(ParameterDomainError):
        # lhs = k/(theta+k) > 3 pi needs a_p this large
        weak_singularity_solve(Params(3, 2.0, 1.0, 1.0), grid, a_p=1.0)
    with pytest.raises(IterationError):
        weak_singularity_solve(Params(3, 2.0, 1.0, 1.0), grid, max_iter=1)


def test_absorption_lambda_zero(grid):
    P = Params(3, 1.5, 0.0, 1.0)
    rep = absorption_solve(P, 0.0, grid)
    np.testing.assert_array_equal(rep.profile.values, dirac_potential(P, grid).values)


@pytest.fixture(scope="module")
def absorption_pair(grid):
    P = Params(3, 1.5, 0.0, 1.0)
    return absorption_solve(P, 0.5, grid), absorption_solve(P, 1.0, grid)


def test_absorption_monotone_in_lambda(absorption_pair):
    a, b = absorption_pair
    assert np.all(a.profile.values >= b.profile.values - 1e-12 * np.abs(a.profile.values))


def test_absorption_sandwich(absorption_pair, grid):
    rep = absorption_pair[1]
    lower, upper = absorption_sandwich(rep.params, 1.0, grid)
    u = rep.profile.values
    slack = 1e-12 * np.abs(upper.values)
    assert np.all(u <= upper.values + slack)
    assert np.all(u >= lower.values - slack)


def test_absorption_coefficient_and_equation(absorption_pair):
    rep = absorption_pair[1]
    P = rep.params
    assert rep.singular_coeff_measured == pytest.approx(P.c_N * P.k, rel=0.02)
    res = pointwise_residual(rep.v_part, rep.profile, P, -1.0)
    assert np.max(res[:-20]) < 1e-6
    assert rep.weak_residual < 1e-6


def test_absorption_rejects_negative_lambda(grid):
    with pytest.raises(ParameterDomainError):
        absorption_solve(Params(3, 1.5), -1.0, grid)


@pytest.fixture(scope="module")
def branch(grid):
    return negative_branch_solve(Params(3, 1.5, -2.0, 1.0), grid)


def test_branch_bracket(branch):
    assert branch.lambda_1 == pytest.approx(1.0)
    assert branch.bracket_sign_change
    assert branch.lambda_2 < branch.lambda_1


def test_branch_root_verified_independently(branch, grid):
    assert abs(branch.F_at_root) <= 1e-8
    assert -2.0 < branch.m_theta_at_root < -1.0
    P = branch.params
    fresh = absorption_solve(P, branch.root, grid, 1e-12)
    M = gradient_mass(fresh.profile, P).m_theta
    assert abs(-1.0 / M - branch.root) <= 1e-7


def test_branch_continuity(branch):
    assert len(branch.continuity_pairs) == 5
    assert branch.continuity_modulus_check <= 0.0


def test_branch_function_decreasing(branch, grid):
    lams = np.linspace(branch.lambda_2, branch.lambda_1, 5)
    F = [f for _, _, f in branch_function(branch.params, grid, lams)]
    assert all(b < a for a, b in zip(F, F[1:]))


def test_branch_two_dimensions(grid):
    rep = negative_branch_solve(Params(2, 3.0, -1.5, 1.0), grid)
    assert rep.bracket_sign_change
    assert -1.5 < rep.m_theta_at_root < -0.5


def test_branch_domain(grid):
    with pytest.raises(ParameterDomainError):
        negative_branch_solve(Params(3, 1.5, -0.5, 1.0), grid)


def test_reports_round_trip(weak, branch):
    back = loads(dumps(weak), SolveReport)
    assert back.m_theta == weak.m_theta
    np.testing.assert_array_equal(back.profile.values, weak.profile.values)
    assert dumps(back) == dumps(weak)
    bb = loads(dumps(branch), BranchReport)
    assert dumps(bb) == dumps(branch)
