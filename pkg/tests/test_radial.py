import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kirchhoff_singular import Params, RadialFn, Singular, make_grid
from kirchhoff_singular.errors import DivergenceError, ParameterDomainError
from kirchhoff_singular.radial import (
    cumulative,
    d2_dt2,
    d_dt,
    default_nodes,
    grid_integral,
    l1_norm,
    moment,
    sphere_area,
)

from conftest import w0_exact


def test_tiny_grids():
    np.testing.assert_allclose(make_grid(0.25, 3, min_nodes=2).nodes, [0.25, 0.5, 1.0], rtol=1e-15)
    np.testing.assert_allclose(make_grid(0.5, 2, min_nodes=2).nodes, [0.5, 1.0], rtol=1e-15)


def test_default_grid_ratio(grid):
    assert grid.n_nodes == 4096
    ratios = grid.nodes[1:] / grid.nodes[:-1]
    np.testing.assert_allclose(ratios, 1e6 ** (1 / 4095), rtol=1e-12)
    assert grid.nodes[0] == 1e-6 and grid.nodes[-1] == 1.0


def test_grid_rejects_bad_input():
    with pytest.raises(ParameterDomainError):
        make_grid(1.5, 100)
    with pytest.raises(ParameterDomainError):
        make_grid(1e-3, 3)  # below the production floor


def test_env_override(monkeypatch):
    monkeypatch.setenv("KS_DEFAULT_NODES", "2049")
    assert default_nodes() == 2049
    assert make_grid(1e-4).n_nodes == 2049
    monkeypatch.setenv("KS_DEFAULT_NODES", "many")
    with pytest.raises(ParameterDomainError):
        default_nodes()


def test_params_derived():
    P = Params(3, 2.0, 1.0, 1.0)
    assert P.p_star == 3.0 and P.p_sobolev == 5.0
    assert P.sigma_N == pytest.approx(4 * math.pi)
    assert P.c_N == pytest.approx(1 / (4 * math.pi))
    assert Params(2, 2.0).c_N == pytest.approx(1 / (2 * math.pi))
    assert sphere_area(2) == pytest.approx(2 * math.pi)
    with pytest.raises(ParameterDomainError):
        Params(3, 1.0)


def test_stencils_on_smooth_function(grid):
    # f = e^{2t} sin t has known t-derivatives
    t = grid.t
    f = np.exp(2 * t) * np.sin(t)
    df = np.exp(2 * t) * (2 * np.sin(t) + np.cos(t))
    d2f = np.exp(2 * t) * (3 * np.sin(t) + 4 * np.cos(t))
    np.testing.assert_allclose(d_dt(f, grid.h), df, atol=1e-9)
    np.testing.assert_allclose(d2_dt2(f, grid.h), d2f, atol=1e-7)


def test_cumulative_matches_antiderivative(grid):
    t, h = grid.t, grid.h
    q = np.cos(t)
    c = cumulative(q, h)
    np.testing.assert_allclose(c, np.sin(t) - np.sin(t[0]), atol=1e-11)
    assert grid_integral(q, h) == pytest.approx(np.sin(0.0) - np.sin(t[0]), abs=1e-12)


def test_l1_examples(grid):
    one = RadialFn.from_function(grid, np.ones_like)
    # Simpson in t on 4096 nodes: O(h^4) ~ 1e-9 relative
    assert l1_norm(one, 3) == pytest.approx(4 * math.pi / 3, rel=1e-8)
    P = Params(3, 2.0)
    w0 = RadialFn(grid, w0_exact(3, grid.nodes), Singular("power", -1.0, P.c_N))
    assert l1_norm(w0, 3) == pytest.approx(1 / 6, rel=1e-9)
    bad = RadialFn(grid, grid.nodes**-3.0, Singular("power", -3.0, 1.0))
    with pytest.raises(DivergenceError):
        l1_norm(bad, 3)
    ok = RadialFn(grid, grid.nodes**-2.5, Singular("power", -2.5, 1.0))
    # 4 pi int_0^1 r^{-0.5} dr = 8 pi
    assert l1_norm(ok, 3) == pytest.approx(8 * math.pi, rel=1e-8)


def test_log_tail_moment(grid):
    # int_0^1 (-ln r) r^2 dr = 1/9
    u = RadialFn(grid, -np.log(grid.nodes), Singular("log", 1.0, 1.0))
    assert moment(u, 2.0) == pytest.approx(1 / 9, rel=1e-8)


@settings(max_examples=40, deadline=None)
@given(
    a=st.floats(-3, 3),
    b=st.floats(-3, 3),
    m=st.floats(0.0, 4.0),
)
def test_moment_is_linear(a, b, m):
    g = make_grid(1e-4, 257)
    f = RadialFn(g, np.cos(g.nodes))
    h = RadialFn(g, g.nodes**1.5)
    lhs = moment(f * a + h * b, m)
    rhs = a * moment(f, m) + b * moment(h, m)
    assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-12)


def test_arithmetic_and_serialisation(grid):
    u = RadialFn(grid, w0_exact(3, grid.nodes), Singular("power", -1.0, 0.1))
    v = (u * 2.0 - u).power(2.0)
    assert (v.singular.kind, v.singular.alpha) == ("power", -2.0)
    assert v.singular.coeff == pytest.approx(0.01, rel=1e-14)
    back = RadialFn.from_dict(u.to_dict())
    np.testing.assert_array_equal(back.values, u.values)
    assert back.singular == u.singular


def test_l1_refinement_order():
    exact = 4 * math.pi * (1 / 3 - 1 / 4)
    errs = []
    for n in (65, 129, 257):
        g = make_grid(1e-6, n)
        u = RadialFn.from_function(g, lambda r: 1.0 - r)
        errs.append(abs(l1_norm(u, 3) - exact))
    assert errs[0] / errs[1] >= 3.0 and errs[1] / errs[2] >= 3.0
