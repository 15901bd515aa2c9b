"""Kirchhoff gradient mass ``M_theta(u) = theta + int_B |grad u|`` and weak residuals.

Everything here assumes ``u`` radial, non-increasing and zero on the
boundary, so ``|grad u| = -u'``.  Integrating by parts,

    int_B |grad u| = sigma_N lim_{r->0} u r^{N-1} + (N-1) sigma_N int_0^1 u s^{N-2} ds,

which is reported term by term as a cross-check.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import DivergenceError, DivisionDomainError, MonotonicityError, ParameterDomainError
from .radial import Params, RadialFn, grid_integral, moment, sup_norm, tail_deriv_moment

MONOTONE_RTOL = 1e-8
BOUNDARY_RTOL = 1e-8


@dataclass(frozen=True)
class MassReport:
    grad_mass: float
    m_theta: float
    boundary_flux_term: float
    l1_weighted: float

    @property
    def identity_gap(self) -> float:
        """Relative mismatch of the integration-by-parts identity."""
        lhs = self.boundary_flux_term + self.l1_weighted
        return abs(lhs - self.grad_mass) / max(abs(self.grad_mass), 1e-300)

    def to_dict(self):
        return asdict(self)


def boundary_flux(u: RadialFn, P: Params) -> float:
    """``sigma_N lim_{r->0} u(r) r^{N-1}`` read off the singular tag."""
    s, N = u.singular, P.N
    if s.kind == "power" and s.coeff != 0.0:
        e = s.alpha + N - 1.0
        if e < 0.0:
            raise DivergenceError(
                f"u r^(N-1) is unbounded at 0 for tag r^{s.alpha:g}, N = {N}", alpha=s.alpha
            )
        return P.sigma_N * s.coeff if e == 0.0 else 0.0
    if s.kind == "log" and s.coeff != 0.0 and N == 1:
        raise DivergenceError("log singularity has no flux limit in one dimension")
    return 0.0


def _check_shape(u: RadialFn):
    scale = max(sup_norm(u), 1e-300)
    if abs(u.values[-1]) > BOUNDARY_RTOL * scale:
        raise ParameterDomainError(f"u(1) = {u.values[-1]:g} is not zero", field="u")
    du = u.derivative()
    if np.any(du > MONOTONE_RTOL * np.max(np.abs(du))):
        i = int(np.argmax(du))
        raise MonotonicityError(f"u increases near r = {u.r[i]:g} (u' = {du[i]:g})", r=float(u.r[i]))


def gradient_mass(u: RadialFn, P: Params, *, check: bool = True) -> MassReport:
    """``int_B |grad u| dx`` for radial non-increasing ``u`` with ``u(1) = 0``."""
    N = P.N
    if check:
        _check_shape(u)
    flux = boundary_flux(u, P)
    if u.singular.kind == "power" and u.singular.coeff != 0.0 and u.singular.alpha <= 1.0 - N:
        raise DivergenceError(f"gradient of r^{u.singular.alpha:g} is not integrable in dimension {N}")
    r = u.r
    inner = tail_deriv_moment(u, N - 1.0)
    gm = P.sigma_N * (inner + grid_integral(-u.derivative() * r**N, u.grid.h))
    l1w = (N - 1) * P.sigma_N * moment(u, N - 2.0)
    return MassReport(float(gm), float(P.theta + gm), float(flux), float(l1w))


def m_theta(u: RadialFn, P: Params) -> float:
    return gradient_mass(u, P, check=False).m_theta


# radial test functions (1 - r^2)^j and their exact -Laplacians, as even polynomials in r
_TESTS = {
    1: ((1.0, -1.0), lambda N: (2.0 * N,)),
    2: ((1.0, -2.0, 1.0), lambda N: (4.0 * N, -4.0 * (N + 2.0))),
}


def _poly_moment(u: RadialFn, coeffs, N: int) -> float:
    return sum(c * moment(u, N - 1.0 + 2 * j) for j, c in enumerate(coeffs) if c != 0.0)


def weak_residual_terms(u: RadialFn, P: Params, m_theta: float, nonlinear_weight: float = 1.0) -> dict:
    """Per test function ``xi_j``, the three terms of the distributional identity."""
    if m_theta == 0.0:
        raise DivisionDomainError("M_theta(u) = 0: the equation has no nonlinear coefficient")
    N, sig = P.N, P.sigma_N
    up = u.power(P.p) if nonlinear_weight != 0.0 else None
    out = {}
    for j, (xi, lap) in _TESTS.items():
        linear = sig * _poly_moment(u, lap(N), N)
        nonlinear = 0.0 if up is None else nonlinear_weight * sig * _poly_moment(up, xi, N) / m_theta
        out[j] = {"linear": linear, "nonlinear": nonlinear, "dirac": P.k * xi[0]}
    return out


def weak_residual(u: RadialFn, P: Params, m_theta: float, nonlinear_weight: float = 1.0) -> float:
    """Largest mismatch in ``int u(-Delta xi) - int (u^p/M) xi = k xi(0)``.

    Tested against ``xi_j = (1 - |x|^2)^j`` for ``j = 1, 2``.  ``nonlinear_weight``
    scales the ``u^p`` term; 0 turns the check into the linear Dirac identity.
    """
    terms = weak_residual_terms(u, P, m_theta, nonlinear_weight)
    return float(max(abs(t["linear"] - t["nonlinear"] - t["dirac"]) for t in terms.values()))
