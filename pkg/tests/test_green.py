import math

import numpy as np
import pytest
from scipy import integrate

from kirchhoff_singular import Params, RadialFn, Singular, dirac_potential, green_apply, potential_pair
from kirchhoff_singular.errors import DivergenceError, ParameterDomainError
from kirchhoff_singular.green import (
    divergence_residual,
    loglog_slope,
    measured_decay_class,
    potential_decay_class,
)


def green_oracle(f, N, r):
    """u(r) = int_r^1 s^{1-N} int_0^s f(tau) tau^{N-1} dtau ds by nested quad."""
    def flux(s):
        return integrate.quad(lambda tau: f(tau) * tau ** (N - 1), 0.0, s, limit=200, epsabs=0, epsrel=1e-12)[0]
    return integrate.quad(lambda s: s ** (1 - N) * flux(s), r, 1.0, limit=200, epsabs=0, epsrel=1e-11)[0]


def dirac_oracle(N, r):
    # -(r^{N-1} u')' = 0 with unit outward flux: -sigma_N r^{N-1} u' = 1, u(1) = 0
    sigma = Params(N, 2.0).sigma_N
    return integrate.quad(lambda s: s ** (1 - N) / sigma, r, 1.0)[0]


@pytest.mark.parametrize("N,r,expected", [(3, 0.5, 1 / (4 * math.pi)), (2, 0.5, math.log(2) / (2 * math.pi))])
def test_dirac_potential_values(grid, N, r, expected):
    w0 = dirac_potential(Params(N, 2.0), grid)
    i = int(np.argmin(abs(grid.nodes - r)))
    assert w0.values[i] == pytest.approx(dirac_oracle(N, grid.nodes[i]), rel=1e-10)
    assert dirac_oracle(N, r) == pytest.approx(expected, rel=1e-10)
    assert w0.values[-1] == 0.0


def test_green_of_zero(grid):
    u = green_apply(RadialFn.zeros(grid), Params(3, 2.0))
    assert np.all(u.values == 0.0)


def test_w1_closed_form(grid):
    P = Params(3, 2.0)
    w1 = potential_pair(P, grid).w1
    r = grid.nodes
    exact = (3 * (r - 1) - 3 * np.log(r) - (r**2 - 1) / 2) / (48 * math.pi**2)
    np.testing.assert_allclose(w1.values, exact, rtol=1e-7, atol=1e-14)
    assert (3 * (0.5 - 1) - 3 * math.log(0.5) - (0.25 - 1) / 2) / (48 * math.pi**2) == pytest.approx(0.0020147, rel=1e-4)


@pytest.mark.parametrize("N,p", [(3, 1.5), (2, 2.0), (4, 1.7)])
def test_w1_against_nested_quadrature(grid, N, p):
    P = Params(N, p)
    w1 = potential_pair(P, grid).w1
    w0f = lambda s: (-math.log(s) / (2 * math.pi)) if N == 2 else P.c_N * (s ** (2 - N) - 1)
    for r in (1e-3, 0.05, 0.5, 0.9):
        i = int(np.argmin(abs(grid.nodes - r)))
        ref = green_oracle(lambda s: w0f(s) ** p, N, grid.nodes[i])
        assert w1.values[i] == pytest.approx(ref, rel=1e-7)


def test_power_source_slope(grid):
    P = Params(3, 2.0)
    f = RadialFn(grid, grid.nodes**-2.5, Singular("power", -2.5, 1.0))
    u = green_apply(f, P)
    assert loglog_slope(u) == pytest.approx(-0.5, abs=0.01)
    assert measured_decay_class(u).kind == "power"
    assert u.singular.kind == "power" and u.singular.alpha == pytest.approx(-0.5)


@pytest.mark.parametrize("tau,kind", [(2.5, "power"), (2.0, "log"), (1.5, "bounded")])
def test_decay_classes(grid, tau, kind):
    assert potential_decay_class(tau, 3).kind == kind
    f = RadialFn(grid, grid.nodes**-tau, Singular("power", -tau, 1.0))
    assert measured_decay_class(green_apply(f, Params(3, 2.0))).kind == kind


def test_decay_class_domain():
    assert potential_decay_class(2.5, 3).exponent == pytest.approx(-0.5)
    with pytest.raises(ParameterDomainError):
        potential_decay_class(3.0, 3)


def test_nonintegrable_source(grid):
    f = RadialFn(grid, grid.nodes**-3.0, Singular("power", -3.0, 1.0))
    with pytest.raises(DivergenceError):
        green_apply(f, Params(3, 2.0))


@pytest.mark.parametrize("N", [2, 3])
def test_divergence_form_residual(grid, N):
    P = Params(N, 2.0)
    pp = potential_pair(P, grid)
    res = divergence_residual(pp.w1, pp.w0.power(P.p), P)
    assert np.max(np.abs(res)) < 1e-8


@pytest.mark.parametrize("N", [3, 4])
def test_divergence_residual_nonsmooth_source(grid, N):
    # w0^1.5 ~ (1 - r)^1.5 at the sphere limits the one-sided stencils there only
    P = Params(N, 1.5)
    pp = potential_pair(P, grid)
    res = np.abs(divergence_residual(pp.w1, pp.w0.power(P.p), P))
    assert np.max(res[:-20]) < 1e-8
    assert np.max(res) < 1e-4
