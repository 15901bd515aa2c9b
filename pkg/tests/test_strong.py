import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from kirchhoff_singular import (
    Params,
    ProfileReport,
    ScalarBranchReport,
    end_to_end_strong,
    gradient_mass,
    scalar_branch,
    strong_profile,
)
from kirchhoff_singular.errors import ParameterDomainError, SupercriticalError, UnclassifiableError
from kirchhoff_singular.reports import dumps, loads
from kirchhoff_singular.strong import negative_branch_F, ode_residual, rescale


def radau_oracle(P, sign, du1, r_end):
    """u'' + (N-1)/r u' = sign * u^p inward from u(1) = 0, u'(1) = du1, stiff solver in r."""
    def rhs(r, y):
        return [y[1], sign * max(y[0], 0.0) ** P.p - (P.N - 1) / r * y[1]]
    return solve_ivp(rhs, (1.0, r_end), [0.0, du1], method="Radau", rtol=1e-12, atol=1e-14, dense_output=True)


def _compare(rep, sign, r_end):
    u = rep.profile
    sol = radau_oracle(rep.params, sign, u.derivative()[-1], r_end)
    sel = u.r >= r_end
    ref = sol.sol(u.r[sel])[0]
    np.testing.assert_allclose(u.values[sel][:-1], ref[:-1], rtol=1e-6)


@pytest.fixture(scope="module")
def absorption(grid):
    return strong_profile(Params(3, 2.0), "absorption", grid)


def test_absorption_fit(absorption):
    assert absorption.exponent_fit == pytest.approx(-2.0, abs=0.02)
    assert absorption.coeff_fit == pytest.approx(2.0, rel=0.02)
    assert absorption.coeff_expected == pytest.approx(2.0)
    assert absorption.ode_residual <= 1e-6
    assert absorption.grad_mass is None  # r^-2 has non-integrable gradient in 3D


def test_absorption_against_radau(absorption):
    _compare(absorption, +1.0, 1e-2)


@pytest.mark.parametrize("lam", [0.5, 4.0])
def test_absorption_scaling_law(absorption, lam):
    P = absorption.params
    v = rescale(absorption.profile, lam ** (-1.0 / (P.p - 1.0)))
    assert ode_residual(v, P, "absorption", lam=lam) <= 1e-6


def test_absorption_supercritical_rejected(grid):
    with pytest.raises(SupercriticalError):
        strong_profile(Params(3, 3.5), "absorption", grid)


@pytest.fixture(scope="module")
def source(grid):
    return strong_profile(Params(3, 4.0), "source", grid)


def test_source_fit(source):
    c = (2 / 3 * (1 - 2 / 3)) ** (1 / 3)
    assert source.coeff_expected == pytest.approx(c)
    assert source.exponent_fit == pytest.approx(-2 / 3, abs=0.02)
    assert source.coeff_fit == pytest.approx(c, rel=0.02)
    assert source.grad_mass == pytest.approx(1.0, abs=1e-6)


def test_source_against_radau(source):
    _compare(source, -1.0, 1e-3)


def test_source_slope_parameter(grid, source):
    again = strong_profile(source.params, "source", grid, slope=source.shooting_parameter)
    assert again.grad_mass == pytest.approx(source.grad_mass, rel=1e-6)


def test_source_sobolev_endpoint_rejected(grid):
    # at p = (N+2)/(N-2) every orbit from u(1) = 0 changes sign; no positive profile exists
    with pytest.raises(ParameterDomainError):
        strong_profile(Params(3, 5.0), "source", grid)


def test_critical_source(grid):
    rep = strong_profile(Params(4, 2.0), "source", grid)
    assert rep.critical
    assert rep.coeff_expected_quoted == pytest.approx(0.25)
    assert rep.coeff_fit == pytest.approx(rep.coeff_expected, rel=0.02)


def test_scalar_source_cases():
    P = Params(3, 3.0, 0.0)
    assert scalar_branch(P, 2.0, "supercritical_source").lambda_bar == pytest.approx(4.0)
    assert scalar_branch(P, 1.0, "supercritical_source").lambda_bar == pytest.approx(1.0)
    rep = scalar_branch(Params(3, 4.0, 1.0), 0.5, "supercritical_source")
    L = rep.lambda_bar
    assert L ** (1 / 3) * 0.5 + 1.0 == pytest.approx(L, rel=1e-12)
    assert rep.case_label == "case 1"
    with pytest.raises(UnclassifiableError):
        scalar_branch(Params(4, 2.0, 1.0), 2.0, "supercritical_source")


def test_scalar_negative_example():
    rep = scalar_branch(Params(3, 2.0, -2.0), 1.0, "negative_theta_absorption")
    assert rep.lambda_window[0] == pytest.approx(0.5)
    assert rep.lambda_bar == pytest.approx(1.0, rel=1e-12)
    assert 1 / (1 / rep.lambda_bar - 2) == pytest.approx(-rep.lambda_bar)
    assert negative_branch_F(rep.lambda_bar, 1.0, 2.0, -2.0) == pytest.approx(0.0, abs=1e-12)


def test_family_flag():
    rep = scalar_branch(Params(4, 2.0, 0.0), 1.0, "supercritical_source")
    assert rep.family_flag and rep.lambda_bar is None


def test_end_to_end_absorption(grid):
    prof, br, summ = end_to_end_strong(Params(3, 2.2, -3.0), "absorption", grid)
    assert summ.m_theta[0] < 0
    assert summ.mass_ok and summ.coeff_ok
    u = prof.profile * summ.scale[0]
    assert gradient_mass(u, prof.params).m_theta == pytest.approx(-1 / br.lambda_bar, rel=1e-9)


def test_end_to_end_source_case1(grid):
    prof, br, summ = end_to_end_strong(Params(3, 4.0, 1.0), "source", grid)
    assert br.case_label == "case 1"
    assert summ.m_theta[0] > 0 and summ.mass_ok and summ.coeff_ok


def test_end_to_end_family(grid):
    prof, br, summ = end_to_end_strong(Params(4, 2.0, 0.0), "source", grid)
    assert summ.family
    for lam, m in zip((0.5, 2.0), summ.m_theta):
        assert m == pytest.approx(lam, abs=1e-3)


def test_profile_round_trip(source):
    back = loads(dumps(source), ProfileReport)
    assert dumps(back) == dumps(source)
    rep = scalar_branch(Params(3, 3.0), 2.0, "source")
    assert loads(dumps(rep), ScalarBranchReport) == rep


@pytest.mark.parametrize("lam", [0.3, 2.0, 7.0])
def test_gradient_mass_homogeneity(source, lam):
    P = source.params
    f = lam ** (-1.0 / (P.p - 1.0))
    scaled = gradient_mass(rescale(source.profile, f), P).grad_mass
    assert scaled == pytest.approx(f * source.grad_mass, rel=1e-6)


def test_negative_window_limits():
    m, p, theta = 1.3, 2.2, -3.0
    lam0 = (m / -theta) ** (p - 1)
    assert negative_branch_F(lam0 * (1 + 1e-9), m, p, theta) < -1e6
    assert negative_branch_F(1e8, m, p, theta) > 1e7
    lams = np.geomspace(lam0 * (1 + 1e-6), 1e3, 200)
    F = [negative_branch_F(x, m, p, theta) for x in lams]
    assert all(b > a for a, b in zip(F, F[1:]))


@pytest.mark.parametrize(
    "P,m,branch",
    [
        (Params(3, 2.2, -3.0), 1.3, "negative"),
        (Params(3, 4.0, 1.0), 0.7, "source"),
        (Params(3, 4.0, 0.0), 2.5, "source"),
        (Params(4, 2.0, 0.5), 0.6, "source"),
        (Params(5, 1.8, -0.4), 0.9, "source"),
    ],
)
def test_scalar_invariants(P, m, branch):
    rep = scalar_branch(P, m, branch)
    assert rep.invariant_residual <= 1e-10
    lo, hi = rep.lambda_window
    assert lo <= rep.lambda_bar <= hi


def test_exponent_fit_stable_under_refinement(absorption, grid):
    fine = strong_profile(absorption.params, "absorption", grid.refined())
    assert abs(fine.exponent_fit - absorption.exponent_fit) < 0.005


def test_nonlinear_term_integrability_flag(absorption, source):
    # u^p ~ r^{-2p/(p-1)} is integrable near 0 only if 2p/(p-1) < N
    assert not absorption.weak_nonlinear_integrable
    assert source.weak_nonlinear_integrable
