"""Solvers for the problems with a Dirac mass at the origin.

* ``weak_singularity_solve``: ``-M_theta(u) Delta u = u^p + k delta_0`` with
  ``M_theta > 0``, by Picard iteration of ``v -> G[(v + k w0)^p] / M_theta(v + k w0)``
  inside the barrier set ``0 <= v <= t_p k^p w1``.
* ``absorption_solve``: ``-Delta u + lambda u^p = k delta_0``.
* ``negative_branch_solve``: ``M_theta < 0`` solutions, as the root of
  ``F(lambda) = -1/M_theta(u_lambda) - lambda``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .constants import barrier_scale, check_condition, compute_ap, require_subcritical
from .errors import (
    BarrierEscapeError,
    BracketError,
    IterationError,
    ParameterDomainError,
)
from .green import dirac_potential, green_apply, potential_pair
from .mass import gradient_mass, weak_residual
from .radial import Params, RadialFn, RadialGrid, sup_norm

FUNCTION_TOL = 1e-6
SCALAR_TOL = 1e-8
FIT_WINDOW = 100.0  # fit the singular coefficient on r <= FIT_WINDOW * r_min
DAMPING = 0.5


def fit_weak_coefficient(u: RadialFn, P: Params, window: float = FIT_WINDOW) -> Tuple[float, str]:
    """Coefficient ``c`` in ``u ~ c Phi`` at the origin.

    Regresses ``u/Phi`` on ``[1, 1/Phi]`` over ``r <= window * r_min``, which
    absorbs the bounded part of ``u``.  Returns ``(c, basis)``.
    """
    r = u.r
    sel = r <= window * u.grid.r_min * (1 + 1e-12)
    phi = P.phi(r[sel])
    A = np.column_stack([np.ones(sel.sum()), 1.0 / phi])
    coef, *_ = np.linalg.lstsq(A, u.values[sel] / phi, rcond=None)
    return float(coef[0]), ("-ln r" if P.N == 2 else f"r^{2 - P.N}")


@dataclass
class SolveReport:
    params: Params
    profile: RadialFn
    v_part: RadialFn
    m_theta: float
    iterations: int
    fixed_point_residual: float
    weak_residual: float
    singular_coeff_measured: float
    singular_coeff_expected: float
    fit_basis: str
    barrier_ok: bool
    kind: str = "weak_singularity"
    lam: Optional[float] = None
    t_p: Optional[float] = None
    a_p: Optional[float] = None
    residual_history: List[float] = field(default_factory=list)

    @property
    def singular_coeff_error(self) -> float:
        return abs(self.singular_coeff_measured / self.singular_coeff_expected - 1.0)

    def to_dict(self):
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d["params"] = asdict(self.params)
        d["profile"] = self.profile.to_dict()
        d["v_part"] = self.v_part.to_dict()
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d["params"] = Params(**d["params"])
        d["profile"] = RadialFn.from_dict(d["profile"])
        d["v_part"] = RadialFn.from_dict(d["v_part"])
        return cls(**d)


def _relative_change(new: np.ndarray, old: np.ndarray) -> float:
    scale = float(np.max(np.abs(new)))
    if scale == 0.0:
        return float(np.max(np.abs(new - old)))
    return float(np.max(np.abs(new - old)) / scale)


def _require_dirac_params(P: Params):
    require_subcritical(P)
    if P.k <= P.theta_minus:
        raise ParameterDomainError(f"k = {P.k:g} must exceed theta_minus = {P.theta_minus:g}", field="k")
    if P.theta + P.k <= 0.0:
        raise ParameterDomainError(f"theta + k = {P.theta + P.k:g} must be positive", field="k")


def weak_singularity_solve(
    P: Params,
    g: RadialGrid,
    tol: float = FUNCTION_TOL,
    max_iter: int = 500,
    *,
    start: str = "zero",
    a_p: Optional[float] = None,
    enforce_condition: bool = True,
) -> SolveReport:
    """Nonnegative solution with a weak singularity ``u ~ c_N k Phi`` at 0.

    ``start`` is ``"zero"`` or ``"top"`` (the upper barrier ``t_p k^p w1``).
    Iterates that leave the barrier set raise :class:`BarrierEscapeError`.
    """
    _require_dirac_params(P)
    if P.k == 0.0:
        raise ParameterDomainError("k must be positive", field="k")
    if a_p is None:
        a_p = compute_ap(P, g)
    if enforce_condition:
        cond = check_condition(P, a_p)
        if not cond.admissible:
            raise ParameterDomainError(
                f"admissibility fails at k = {P.k:g}: {cond.lhs_at_k:g} > {cond.rhs:g}", field="k",
                condition=cond.to_dict(),
            )
    _, t_p = barrier_scale(P)
    pp = potential_pair(P, g)
    kw0 = P.k * pp.w0
    top = (t_p * P.k**P.p) * pp.w1
    slack = 1e-9 * sup_norm(top) + 1e-300

    def T(v: RadialFn) -> RadialFn:
        u = v + kw0
        m = gradient_mass(u, P, check=False).m_theta
        return green_apply(u.power(P.p), P) * (1.0 / m)

    def inside(v: RadialFn) -> bool:
        return bool(np.all(v.values >= -slack) and np.all(v.values <= top.values + slack))

    if start == "zero":
        v = RadialFn.zeros(g)
    elif start == "top":
        v = top
    else:
        raise ParameterDomainError(f"unknown start {start!r}", field="start")

    history: List[float] = []
    for it in range(1, max_iter + 1):
        tv = T(v)
        res = _relative_change(tv.values, v.values)
        history.append(res)
        if not inside(tv):
            raise BarrierEscapeError(
                f"iterate {it} leaves the barrier set", iteration=it, residual_history=history
            )
        if res <= tol:
            v = tv
            break
        if len(history) > 1 and res > history[-2]:
            v = (1.0 - DAMPING) * v + DAMPING * tv
        else:
            v = tv
    else:
        raise IterationError(
            f"no convergence in {max_iter} iterations (last residual {history[-1]:.3e})",
            residual_history=history,
        )
    u = v + kw0
    m = gradient_mass(u, P, check=False).m_theta
    coeff, basis = fit_weak_coefficient(u, P)
    return SolveReport(
        params=P, profile=u, v_part=v, m_theta=m, iterations=it, fixed_point_residual=history[-1],
        weak_residual=weak_residual(u, P, m), singular_coeff_measured=coeff,
        singular_coeff_expected=P.c_N * P.k, fit_basis=basis, barrier_ok=inside(v), kind="weak_singularity",
        t_p=t_p, a_p=a_p, residual_history=history,
    )


def absorption_solve(
    P: Params,
    lam: float,
    g: RadialGrid,
    tol: float = FUNCTION_TOL,
    max_iter: int = 2000,
    *,
    u0: Optional[RadialFn] = None,
) -> SolveReport:
    """Unique positive solution of ``-Delta u + lam u^p = k delta_0``.

    Iterates ``u <- k w0 - lam G[u^p]`` clipped at 0 from ``u0`` (default
    ``k w0``).  The map reverses order, so plain iterates alternate about
    the solution; the step is halved whenever the residual grows.
    """
    require_subcritical(P)
    if lam < 0.0 or not math.isfinite(lam):
        raise ParameterDomainError(f"lambda must be finite and nonnegative, got {lam}", field="lambda")
    if P.k <= 0.0:
        raise ParameterDomainError(f"k must be positive, got {P.k}", field="k")
    w0 = dirac_potential(P, g)
    kw0 = P.k * w0

    def T(v: RadialFn) -> RadialFn:
        # works on the regular part v = u - k w0 to avoid cancelling against the singularity
        nv = -lam * green_apply((kw0 + v).power(P.p), P)
        neg = kw0.values + nv.values < 0.0
        if np.any(neg):
            # clip u at 0; the stored flux no longer applies, so drop it
            vals = nv.values.copy()
            vals[neg] = -kw0.values[neg]
            return RadialFn(g, vals, nv.singular)
        return nv

    v = RadialFn.zeros(g) if u0 is None else u0 - kw0
    history: List[float] = []
    omega = 1.0
    it = 0
    if lam > 0.0:
        for it in range(1, max_iter + 1):
            tv = T(v)
            res = _relative_change(tv.values, v.values)
            history.append(res)
            if res <= tol:
                v = tv
                break
            if len(history) > 1 and res > history[-2]:
                omega = max(omega * 0.5, 1.0 / 64.0)
            v = tv if omega == 1.0 else (1.0 - omega) * v + omega * tv
        else:
            raise IterationError(
                f"absorption iteration did not converge in {max_iter} steps (last {history[-1]:.3e})",
                residual_history=history,
            )
    else:
        v = RadialFn.zeros(g)
        history.append(0.0)
    u = kw0 + v
    coeff, basis = fit_weak_coefficient(u, P)
    m = gradient_mass(u, P, check=False).m_theta
    wr = weak_residual(u, P, -1.0 / lam) if lam > 0 else weak_residual(u, P, 1.0, nonlinear_weight=0.0)
    return SolveReport(
        params=P, profile=u, v_part=v, m_theta=m, iterations=it, fixed_point_residual=history[-1],
        weak_residual=wr, singular_coeff_measured=coeff, singular_coeff_expected=P.c_N * P.k, fit_basis=basis,
        barrier_ok=True, kind="absorption", lam=float(lam), residual_history=history,
    )


def absorption_sandwich(P: Params, lam: float, g: RadialGrid) -> Tuple[RadialFn, RadialFn]:
    """Lower and upper bounds ``k w0 - lam k^p w1 <= u <= k w0``."""
    pp = potential_pair(P, g)
    upper = P.k * pp.w0
    return upper - (lam * P.k**P.p) * pp.w1, upper


@dataclass
class BranchReport:
    params: Params
    lambda_1: float
    lambda_2: float
    F_values: List[Tuple[float, float]]
    root: float
    F_at_root: float
    m_theta_at_root: float
    bracket_sign_change: bool
    continuity_modulus_check: float
    continuity_pairs: List[Tuple[float, float, float]] = field(default_factory=list)
    ordering: str = ""
    iterations: int = 0
    weak_residual: Optional[float] = None
    profile: Optional[RadialFn] = None
    v_part: Optional[RadialFn] = None

    def to_dict(self):
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d["params"] = asdict(self.params)
        d["v_part"] = None if self.v_part is None else self.v_part.to_dict()
        d["F_values"] = [list(x) for x in self.F_values]
        d["continuity_pairs"] = [list(x) for x in self.continuity_pairs]
        d["profile"] = None if self.profile is None else self.profile.to_dict()
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d["params"] = Params(**d["params"])
        d["F_values"] = [tuple(x) for x in d["F_values"]]
        d["continuity_pairs"] = [tuple(x) for x in d["continuity_pairs"]]
        for key in ("profile", "v_part"):
            d[key] = None if d.get(key) is None else RadialFn.from_dict(d[key])
        return cls(**d)


class _MassCurve:
    """``lambda -> M_theta(u_lambda)`` with warm-started absorption solves."""

    def __init__(self, P: Params, g: RadialGrid, inner_tol: float):
        self.P, self.g, self.tol = P, g, inner_tol
        self.solved: dict = {}

    def solve(self, lam: float) -> SolveReport:
        if lam in self.solved:
            return self.solved[lam]
        u0 = None
        if self.solved:
            near = min(self.solved, key=lambda x: abs(x - lam))
            u0 = self.solved[near].profile
        rep = absorption_solve(self.P, lam, self.g, self.tol, u0=u0)
        self.solved[lam] = rep
        return rep

    def M(self, lam: float) -> float:
        return self.solve(lam).m_theta

    def F(self, lam: float) -> float:
        return -1.0 / self.M(lam) - lam


def negative_branch_solve(
    P: Params,
    g: RadialGrid,
    tol: float = SCALAR_TOL,
    *,
    inner_tol: float = 1e-12,
    max_bisect: int = 200,
    n_pairs: int = 5,
) -> BranchReport:
    """Solution with ``theta < M_theta(u) < k + theta < 0`` for ``0 < k < -theta``.

    ``lambda_1 = -1/(k + theta)`` and ``lambda_2 = -1/M_theta(u_{lambda_1})``
    bracket a root of ``F``; it is refined by bisection.  ``F`` decreases in
    ``lambda``, so ``F(lambda_1) < 0 < F(lambda_2)`` and ``lambda_2 < lambda_1``.
    """
    require_subcritical(P)
    theta, k = P.theta, P.k
    if not (theta < 0.0 and 0.0 < k < -theta):
        raise ParameterDomainError(f"need theta < 0 and 0 < k < -theta, got theta = {theta:g}, k = {k:g}", field="k")
    curve = _MassCurve(P, g, inner_tol)
    lam1 = -1.0 / (k + theta)
    lam2 = -1.0 / curve.M(lam1)
    F1, F2 = curve.F(lam1), curve.F(lam2)
    lo, hi = min(lam1, lam2), max(lam1, lam2)
    F_lo, F_hi = (F1, F2) if lam1 < lam2 else (F2, F1)
    F_values = [(lam1, F1), (lam2, F2)]
    sign_change = bool(F_lo * F_hi <= 0.0)
    if not sign_change:
        raise BracketError("F does not change sign on the bracket", F_values=[list(x) for x in F_values])
    it = 0
    mid, Fm = (lo, F_lo) if abs(F_lo) < abs(F_hi) else (hi, F_hi)
    while abs(Fm) > tol and it < max_bisect:
        it += 1
        mid = 0.5 * (lo + hi)
        Fm = curve.F(mid)
        F_values.append((mid, Fm))
        if Fm == 0.0:
            break
        if (Fm > 0.0) == (F_lo > 0.0):
            lo, F_lo = mid, Fm
        else:
            hi, F_hi = mid, Fm
        if hi - lo <= 4 * np.finfo(float).eps * hi:
            break
    if abs(Fm) > tol:
        raise IterationError(f"bisection stalled at |F| = {abs(Fm):.3e}", F_values=[list(x) for x in F_values])
    root = mid
    rep = curve.solve(root)
    # continuity modulus on pairs (lambda_min, lambda_min + j (lambda_max - lambda_min)/n)
    lmin, lmax = min(lam1, lam2), max(lam1, lam2)
    pairs = []
    worst = -math.inf
    M_a = curve.M(lmin)
    for j in range(1, n_pairs + 1):
        lb = lmin + j * (lmax - lmin) / n_pairs
        gap = abs(M_a - curve.M(lb))
        bound = ((lb - lmin) / lmin) ** (1.0 / P.p) * k
        pairs.append((lmin, lb, gap - bound))
        worst = max(worst, gap - bound)
    return BranchReport(
        params=P, lambda_1=lam1, lambda_2=lam2, F_values=F_values, root=root, F_at_root=Fm,
        m_theta_at_root=rep.m_theta, bracket_sign_change=sign_change, continuity_modulus_check=worst,
        continuity_pairs=pairs, ordering="lambda_2 < lambda_1" if lam2 < lam1 else "lambda_2 >= lambda_1",
        iterations=it, weak_residual=rep.weak_residual, profile=rep.profile, v_part=rep.v_part,
    )


def branch_function(P: Params, g: RadialGrid, lams, inner_tol: float = 1e-12) -> List[Tuple[float, float, float]]:
    """``(lambda, M_theta(u_lambda), F(lambda))`` on a list of ``lambda`` values."""
    curve = _MassCurve(P, g, inner_tol)
    return [(float(l), curve.M(l), curve.F(l)) for l in lams]
