"""Radial Green operator of ``-Delta`` on the unit ball with zero boundary data.

For a radial source ``f`` the potential is

    u(r) = int_r^1 s^{1-N} m(s) ds,    m(s) = int_0^s t^{N-1} f(t) dt,

evaluated as two cumulative quadratures in ``t = ln r``.  The exact flux
``u'(r) = -r^{1-N} m(r)`` is stored with the result.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DivergenceError, ParameterDomainError
from .radial import (
    NONE,
    Params,
    RadialFn,
    RadialGrid,
    Singular,
    cumulative,
    d2_dt2,
    d_dt,
    tail_moment,
)


def dirac_potential(P: Params, g: RadialGrid) -> RadialFn:
    """``w0 = G[delta_0]`` in closed form.

    ``c_N (r^{2-N} - 1)`` for ``N >= 3`` and ``-(1/2pi) ln r`` for ``N = 2``.
    """
    r, N, c = g.nodes, P.N, P.c_N
    if N == 2:
        vals = -c * np.log(r)
        tag = Singular("log", 1.0, c)
    else:
        vals = c * (r ** (2.0 - N) - 1.0)
        tag = Singular("power", 2.0 - N, c)
    vals[-1] = 0.0
    deriv = -c * r ** (1.0 - N) * (N - 2 if N > 2 else 1)
    return RadialFn(g, vals, tag, deriv)


def _potential_tag(f: RadialFn, N: int) -> Singular:
    s = f.singular
    if s.kind != "power" or s.coeff == 0.0:
        return NONE
    alpha, c = s.alpha, s.coeff
    beta = alpha + 2.0
    if beta < 0.0:
        return Singular("power", beta, c / ((alpha + N) * (-beta)))
    if beta == 0.0:
        return Singular("log", 1.0, c / (N - 2.0))
    return NONE


def green_apply(f: RadialFn, P: Params) -> RadialFn:
    """Solve ``-Delta u = f`` in the ball, ``u(1) = 0``, for radial ``f``."""
    g, N, h = f.grid, P.N, f.grid.h
    r = g.nodes
    s = f.singular
    if s.kind == "power" and s.coeff != 0.0 and s.alpha <= -N:
        raise DivergenceError(
            f"source ~ r^{s.alpha:g} has infinite mass near the origin in dimension {N}", alpha=s.alpha
        )
    q = f.values * r**N
    dq = None if f.deriv is None else r**N * (N * f.values + r * f.deriv)
    mass = tail_moment(f, N - 1.0) + cumulative(q, h, dq)
    flux = r ** (2.0 - N) * mass
    dflux = (2.0 - N) * flux + r ** (2.0 - N) * q
    # u(r_i) = int_{t_i}^0 flux dt, accumulated from the boundary inward
    u = cumulative(flux[::-1], h, -dflux[::-1])[::-1].copy()
    u[-1] = 0.0
    return RadialFn(g, u, _potential_tag(f, N), -(r ** (1.0 - N)) * mass)


@dataclass(frozen=True, eq=False)
class PotentialPair:
    w0: RadialFn
    w1: RadialFn


def potential_pair(P: Params, g: RadialGrid) -> PotentialPair:
    """``w0 = G[delta_0]`` and ``w1 = G[w0^p]``."""
    w0 = dirac_potential(P, g)
    return PotentialPair(w0, green_apply(w0.power(P.p), P))


class DecayClass(NamedTuple):
    kind: str  # "power", "log" or "bounded"
    exponent: float = 0.0


def potential_decay_class(tau: float, N: int) -> DecayClass:
    """Blow-up class at 0 of ``G[r^{-tau}]``."""
    if not (0.0 < tau < N):
        raise ParameterDomainError(f"tau must lie in (0, N) = (0, {N}), got {tau}", field="tau")
    if tau > 2.0:
        return DecayClass("power", 2.0 - tau)
    if tau == 2.0:
        return DecayClass("log", 0.0)
    return DecayClass("bounded", 0.0)


def loglog_slope(u: RadialFn, r_lo: float = 1e-5, r_hi: float = 1e-3) -> float:
    """Least-squares slope of ``ln u`` against ``ln r`` on ``[r_lo, r_hi]``."""
    r = u.r
    sel = (r >= r_lo * (1 - 1e-12)) & (r <= r_hi * (1 + 1e-12)) & (u.values > 0)
    if sel.sum() < 2:
        raise ParameterDomainError("fit window holds fewer than two positive samples", field="window")
    return float(np.polyfit(np.log(r[sel]), np.log(u.values[sel]), 1)[0])


def measured_decay_class(u: RadialFn, r_lo: float = 1e-5, r_hi: float = 1e-3, slope_tol: float = 0.02) -> DecayClass:
    """Classify a sampled potential by its behaviour on ``[r_lo, r_hi]``.

    A flat log-log slope means bounded.  Otherwise the growth of ``u``
    against ``-ln r`` separates a logarithm from a power.
    """
    slope = loglog_slope(u, r_lo, r_hi)
    if abs(slope) <= slope_tol:
        return DecayClass("bounded", 0.0)
    r = u.r
    sel = (r >= r_lo * (1 - 1e-12)) & (r <= r_hi * (1 + 1e-12)) & (u.values > 0)
    # u ~ c (-ln r) has unit slope against ln(-ln r); a power grows like -ln r itself
    log_slope = np.polyfit(np.log(-np.log(r[sel])), np.log(u.values[sel]), 1)[0]
    if abs(log_slope - 1.0) <= 0.15:
        return DecayClass("log", 0.0)
    return DecayClass("power", slope)


def divergence_residual(u: RadialFn, f: RadialFn, P: Params) -> np.ndarray:
    """Pointwise ``-(r^{N-1} u')' - r^{N-1} f`` at interior nodes, in ``t`` form.

    The derivatives are differenced from the sampled values, so the check
    exercises both quadratures of :func:`green_apply`.  The result is divided
    by ``max |r^N f|``.
    """
    r, h, N = u.r, u.grid.h, P.N
    res = -(r ** (N - 2.0)) * (d2_dt2(u.values, h) + (N - 2.0) * d_dt(u.values, h)) - r**N * f.values
    scale = float(np.max(np.abs(r**N * f.values)))
    if scale == 0.0:
        scale = 1.0
    return res[1:-1] / scale


def pointwise_residual(v: RadialFn, u: RadialFn, P: Params, c: float) -> np.ndarray:
    """Relative residual of ``-Delta v = c u^p`` at every node.

    In ``t = ln r`` this is ``v_tt + (N-2) v_t + c r^2 u^p = 0``; each node's
    residual is divided by the sum of the three term magnitudes.
    """
    h, r = v.grid.h, v.r
    terms = (
        d2_dt2(v.values, h),
        (P.N - 2.0) * d_dt(v.values, h),
        c * r**2 * np.maximum(u.values, 0.0) ** P.p,
    )
    res = np.abs(terms[0] + terms[1] + terms[2])
    scale = np.abs(terms[0]) + np.abs(terms[1]) + np.abs(terms[2])
    return res / np.where(scale > 0, scale, 1.0)
