import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kirchhoff_singular import Params, RadialFn, dirac_potential, gradient_mass, make_grid, weak_residual
from kirchhoff_singular.errors import DivisionDomainError, MonotonicityError, ParameterDomainError
from kirchhoff_singular.mass import weak_residual_terms


@pytest.mark.parametrize("N", [2, 3, 4])
def test_w0_has_unit_gradient_mass(grid, N):
    P = Params(N, 1.5)
    rep = gradient_mass(dirac_potential(P, grid), P)
    assert rep.grad_mass == pytest.approx(1.0, abs=1e-9)
    assert rep.identity_gap < 1e-8


@settings(max_examples=30, deadline=None)
@given(k=st.floats(0.01, 10.0), theta=st.floats(-5.0, 5.0), N=st.sampled_from([2, 3]))
def test_kw0_mass_is_k_plus_theta(k, theta, N):
    g = make_grid(1e-6, 1024)
    P = Params(N, 2.0, theta, k)
    rep = gradient_mass(dirac_potential(P, g) * k, P)
    assert rep.m_theta == pytest.approx(k + theta, abs=1e-8 * (1 + k))


def test_cone(grid):
    P = Params(3, 2.0)
    u = RadialFn.from_function(grid, lambda r: 1.0 - r, lambda r: -np.ones_like(r))
    assert gradient_mass(u, P).grad_mass == pytest.approx(4 * math.pi / 3, rel=1e-9)


def test_shape_checks(grid):
    P = Params(3, 2.0)
    with pytest.raises(MonotonicityError):
        gradient_mass(RadialFn.from_function(grid, lambda r: r * (1 - r)), P)
    with pytest.raises(ParameterDomainError):
        gradient_mass(RadialFn.from_function(grid, lambda r: 2.0 - r), P)


def test_weak_residual_linear_identity(grid):
    P = Params(3, 2.0, 0.0, 1.0)
    w0 = dirac_potential(P, grid)
    terms = weak_residual_terms(w0, P, 1.0, nonlinear_weight=0.0)
    # int w0 * 2N dx = 6 * ||w0||_1 = 1 = k xi_1(0)
    assert terms[1]["linear"] == pytest.approx(1.0, abs=1e-9)
    assert weak_residual(w0, P, 1.0, nonlinear_weight=0.0) < 1e-8


def test_weak_residual_zero_solution(grid):
    P = Params(3, 2.0, 1.0, 0.0)
    assert weak_residual(RadialFn.zeros(grid), P, 1.0) == 0.0


def test_weak_residual_detects_wrong_k(grid):
    P = Params(3, 2.0, 0.0, 2.0)
    assert weak_residual(dirac_potential(P, grid), P, 1.0, nonlinear_weight=0.0) == pytest.approx(1.0, abs=1e-8)


def test_zero_kirchhoff_coefficient(grid):
    P = Params(3, 2.0, -1.0, 1.0)
    with pytest.raises(DivisionDomainError):
        weak_residual(dirac_potential(P, grid), P, 0.0)
