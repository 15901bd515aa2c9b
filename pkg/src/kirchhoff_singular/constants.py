"""Scalar constants and admissibility logic.

``a_p`` (sharp constant in ``w1 <= a_p w0``), the admissibility inequality

    k^{p-1} / (theta + k) <= (1 / (a_p p)) ((p-1)/p)^{p-1},

its solution set in ``k``, the barrier scales ``s_p, t_p``, the strong
singularity coefficients and the integrability-bootstrap exponent ledgers.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy import optimize

from .errors import (
    BracketError,
    ParameterDomainError,
    RegimeMismatchError,
    SupercriticalError,
)
from .green import potential_pair
from .radial import Params, RadialGrid

INF = math.inf
ROOT_XTOL = 1e-12


def require_subcritical(P: Params):
    if P.p >= P.p_star:
        raise SupercriticalError(
            f"p = {P.p:g} is not below the critical exponent p* = {P.p_star:g} (N = {P.N})",
            p=P.p, p_star=P.p_star,
        )


# --- a_p ---------------------------------------------------------------------

def ratio_profile(P: Params, g: RadialGrid) -> Tuple[np.ndarray, np.ndarray, float]:
    """``w1/w0`` at the nodes ``r < 1`` and its boundary limit ``w1'(1)/w0'(1)``."""
    pp = potential_pair(P, g)
    ratio = pp.w1.values[:-1] / pp.w0.values[:-1]
    edge = float(pp.w1.deriv[-1] / pp.w0.deriv[-1])
    return g.nodes[:-1], ratio, edge


def compute_ap(P: Params, g: RadialGrid) -> float:
    """``a_p = sup_{0<r<1} w1(r)/w0(r)``.

    At ``r = 1`` the ratio is ``0/0``; its limit is the ratio of the exactly
    known boundary fluxes of the two potentials.
    """
    require_subcritical(P)
    _, ratio, edge = ratio_profile(P, g)
    return float(max(np.max(ratio), edge))


# --- admissibility -----------------------------------------------------------

def condition_rhs(p: float, a_p: float) -> float:
    return (1.0 / (a_p * p)) * ((p - 1.0) / p) ** (p - 1.0)


def condition_lhs(k: float, p: float, theta: float) -> float:
    """``k^{p-1}/(theta + k)``; ``inf`` when ``theta + k <= 0``."""
    den = theta + k
    if den <= 0.0:
        return INF
    # split as k^{p-2} * k/(theta+k) so large k does not overflow needlessly
    return _safe_pow(k, p - 2.0) * (k / den)


def stationary_point(p: float, theta: float) -> Optional[float]:
    """``k0 = (p-1) theta / (2-p)``, where ``d/dk [k^{p-1}/(theta+k)] = 0``."""
    if p == 2.0:
        return None
    return (p - 1.0) * theta / (2.0 - p)


def _case_label(p: float, theta: float) -> str:
    part = "i" if theta > 0 else ("ii" if theta == 0 else "iii")
    sign = "theta>0" if theta > 0 else ("theta=0" if theta == 0 else "theta<0")
    pc = "p<2" if p < 2 else ("p=2" if p == 2 else "p>2")
    return f"({part}) {sign}, {pc}"


def _limit_low(p: float, theta: float) -> float:
    if theta < 0:
        return INF
    if theta > 0:
        return 0.0
    return INF if p < 2 else (0.0 if p > 2 else 1.0)


def _limit_high(p: float) -> float:
    return INF if p > 2 else (0.0 if p < 2 else 1.0)


def _expand_right(fn, a: float, sign_target: bool) -> Optional[float]:
    # double b until (fn(b) <= 0) == sign_target; None if that happens beyond float range
    b = max(2.0 * a, 1.0)
    while math.isfinite(b):
        if (fn(b) <= 0.0) == sign_target:
            return b
        b *= 2.0
    return None


def _crossing(fn, a: float, b: float) -> float:
    return optimize.bisect(fn, a, b, xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps, maxiter=4000)


def admissible_intervals(p: float, theta: float, a_p: float) -> List[Tuple[float, float]]:
    """Solution set in ``k`` of the admissibility inequality, as closed intervals.

    The left end of the domain ``k > max(0, -theta)`` is open; it is listed
    as its limit value.  The domain is split at ``k0`` into monotone pieces
    and each crossing is located by bisection.
    """
    rhs = condition_rhs(p, a_p)
    if theta == 0.0:
        return _intervals_theta0(p, rhs)
    lo = max(0.0, -theta)
    phi = lambda k: condition_lhs(k, p, theta) - rhs
    k0 = stationary_point(p, theta)
    cuts = [lo]
    if k0 is not None and k0 > lo:
        cuts.append(k0)
    cuts.append(INF)

    def end_value(x, left_end):
        if x == lo and left_end:
            return _limit_low(p, theta) - rhs
        if x == INF:
            return _limit_high(p) - rhs
        return phi(x)

    pieces = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        fa, fb = end_value(a, True), end_value(b, False)
        if fa <= 0.0 and fb <= 0.0:
            pieces.append((a, b))
        elif fa > 0.0 and fb > 0.0:
            continue
        else:
            # one crossing on a monotone piece
            # crossings beyond float resolution are reported at their limit
            bb = _expand_right(phi, max(a, 1.0), fb <= 0.0) if math.isinf(b) else b
            aa = a
            if a == lo:
                # step inside the open end until phi carries the limit's sign
                aa = lo + max(1.0, abs(lo)) * 1e-3
                while aa is not None and (phi(aa) <= 0.0) != (fa <= 0.0):
                    aa = lo + (aa - lo) / 16.0
                    if aa == lo:
                        aa = None
            if bb is None:
                root = INF
            elif aa is None:
                root = lo
            else:
                root = _crossing(phi, aa, bb)
            piece = (a, root) if fa <= 0.0 else (root, b)
            if piece[0] < piece[1]:
                pieces.append(piece)
    merged: List[Tuple[float, float]] = []
    for a, b in pieces:
        if merged and abs(merged[-1][1] - a) <= 1e-12 * max(1.0, abs(a)):
            merged[-1] = (merged[-1][0], b)
        else:
            merged.append((a, b))
    return merged


def _intervals_theta0(p: float, rhs: float) -> List[Tuple[float, float]]:
    # k^{p-2} <= rhs in closed form; overflow and underflow give the right limits
    if p == 2.0:
        return [(0.0, INF)] if rhs >= 1.0 else []
    edge = _safe_pow(rhs, 1.0 / (p - 2.0))
    if p > 2.0:
        return [(0.0, edge)] if edge > 0.0 else []
    return [(edge, INF)] if edge < INF else []


def _safe_pow(x: float, y: float) -> float:
    with np.errstate(over="ignore", under="ignore"):
        return float(np.float64(x) ** y)


def ap_threshold(p: float, theta: float) -> Optional[float]:
    """Largest ``a_p`` for which the inequality holds for every admissible ``k``.

    Defined where ``k^{p-1}/(theta+k)`` has an interior extremum that decides
    the matter: the maximum for ``theta > 0, p < 2`` and, for ``theta < 0, p > 2``,
    the largest ``a_p`` with a nonempty solution set.
    """
    if theta > 0 and p < 2:
        return _safe_pow(theta, 2 - p) * (2 - p) ** (p - 2) / p**p
    if theta < 0 and p > 2:
        return _safe_pow(-theta, 2 - p) * (p - 2) ** (p - 2) / p**p
    if p == 2 and theta <= 0:
        return 0.25
    return None


def ap_threshold_printed(p: float, theta: float) -> Optional[float]:
    """Threshold for ``theta < 0, p > 2`` in the form often quoted for it.

    It differs from :func:`ap_threshold` by the factor ``(p-1)/(p-2)`` and is
    reported for comparison only, flagged as unverified.
    """
    if theta < 0 and p > 2:
        return _safe_pow(-theta, 2 - p) * p ** (-p) * (p - 1) * (p - 2) ** (p - 3)
    return None


@dataclass
class ConditionReport:
    p: float
    theta: float
    k: float
    a_p: float
    rhs: float
    lhs_at_k: float
    admissible: bool
    admissible_set: List[Tuple[float, float]]
    k0: Optional[float]
    case_label: str
    threshold: Optional[float] = None
    threshold_quoted: Optional[float] = None
    notes: List[str] = field(default_factory=list)

    def to_dict(self):
        d = asdict(self)
        d["admissible_set"] = [list(iv) for iv in self.admissible_set]
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d["admissible_set"] = [tuple(iv) for iv in d["admissible_set"]]
        return cls(**d)


def check_condition(P: Params, a_p: float) -> ConditionReport:
    """Evaluate the admissibility inequality at ``P.k`` and solve it in ``k``.

    ``admissible`` needs ``k > 0``, ``theta + k > 0`` and the inequality; the
    middle requirement keeps the left side meaningful when ``theta < 0``.
    """
    p, theta, k = P.p, P.theta, P.k
    if not (a_p > 0.0):
        raise ParameterDomainError(f"a_p must be positive, got {a_p}", field="a_p")
    if k <= P.theta_minus or k <= 0.0:
        raise ParameterDomainError(
            f"k = {k:g} must exceed max(0, theta_minus) = {max(0.0, P.theta_minus):g}", field="k"
        )
    rhs = condition_rhs(p, a_p)
    lhs = condition_lhs(k, p, theta)
    admissible = bool(theta + k > 0.0 and lhs <= rhs)
    notes = []
    quoted = ap_threshold_printed(p, theta)
    if quoted is not None:
        notes.append("threshold_quoted: unverified formula")
    if theta + k <= 0.0:
        notes.append("theta + k <= 0: left side undefined")
    return ConditionReport(
        p=p, theta=theta, k=k, a_p=float(a_p), rhs=rhs, lhs_at_k=lhs, admissible=admissible,
        admissible_set=admissible_intervals(p, theta, a_p), k0=stationary_point(p, theta),
        case_label=_case_label(p, theta), threshold=ap_threshold(p, theta), threshold_quoted=quoted,
        notes=notes,
    )


def in_intervals(k: float, intervals) -> bool:
    return any(a <= k <= b for a, b in intervals)


# --- barrier -----------------------------------------------------------------

def barrier_map(s, p: float):
    """``f(s) = ((1/p)((p-1)/p)^{p-1} s + 1)^p``; tangent to ``f(s) = s`` at ``s_p``."""
    return ((1.0 / p) * ((p - 1.0) / p) ** (p - 1.0) * np.asarray(s, dtype=float) + 1.0) ** p


def barrier_scale(P: Params) -> Tuple[float, float]:
    """``(s_p, t_p)`` with ``s_p = (p/(p-1))^p`` and ``t_p = s_p/(theta + k)``."""
    if P.theta + P.k <= 0.0:
        raise ParameterDomainError(f"theta + k = {P.theta + P.k:g} must be positive", field="k")
    s_p = (P.p / (P.p - 1.0)) ** P.p
    return s_p, s_p / (P.theta + P.k)


# --- strong singularity coefficients -----------------------------------------

_REGIMES = {
    "absorption": "absorption_subcritical",
    "absorption_subcritical": "absorption_subcritical",
    "source": "source_supercritical",
    "source_supercritical": "source_supercritical",
    "critical": "source_critical",
    "source_critical": "source_critical",
}


def canonical_regime(regime: str) -> str:
    try:
        return _REGIMES[regime]
    except KeyError:
        raise ParameterDomainError(f"unknown regime {regime!r}", field="regime") from None


def singular_exponent(p: float) -> float:
    """``beta = 2/(p-1)``: strong singular profiles behave like ``r^{-beta}``."""
    return 2.0 / (p - 1.0)


def singularity_coeff(P: Params, regime: str) -> float:
    """Coefficient ``c`` in ``u ~ c r^{-2/(p-1)}`` (or its log-corrected form at p*)."""
    regime = canonical_regime(regime)
    N, p = P.N, P.p
    beta = singular_exponent(p)
    if regime == "absorption_subcritical":
        br = beta * (beta + 2.0 - N)
    elif regime == "source_supercritical":
        br = beta * (N - 2.0 - beta)
    else:
        if N < 3 or abs(p - P.p_star) > 1e-12 * P.p_star:
            raise RegimeMismatchError(f"critical regime needs p = p* = {P.p_star:g}, got {p:g}", regime=regime)
        return ((N - 2.0) / 4.0) ** (N - 2.0)
    if br <= 0.0:
        raise RegimeMismatchError(
            f"coefficient bracket {br:g} <= 0: p = {p:g} is outside the {regime} range for N = {N}",
            regime=regime,
        )
    return br ** (1.0 / (p - 1.0))


def critical_coeff_asymptotic(N: int) -> float:
    """Limit of ``u r^{N-2} (-ln r)^{(N-2)/2}`` along the slow manifold at ``p = N/(N-2)``.

    From ``dy/dL = -y^p/(N-2)`` with ``L = -ln r``: ``((N-2)^2/2)^{(N-2)/2}``.
    """
    if N < 3:
        raise ParameterDomainError("critical exponent needs N >= 3", field="N")
    return ((N - 2.0) ** 2 / 2.0) ** ((N - 2.0) / 2.0)


# --- bootstrap ledgers -------------------------------------------------------

@dataclass
class BootstrapLedger:
    N: int
    p: float
    t_seq: List[float]
    mu_seq: List[float]
    m0: Optional[int]
    n2: int
    first_positive_mu: int
    stopped_early: bool = False

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


def bootstrap_ledger(P: Params, max_steps: int = 10_000) -> BootstrapLedger:
    """Integrability exponents ``t_m`` and decay exponents ``mu_n``.

    ``t_0 = (1 + N/(p(N-2)))/2``, ``t_m = N t_{m-1} / (p (N - 2 t_{m-1}))`` until
    ``t_m > Np/2`` (index ``m0``); the recursion needs ``t_{m-1} < N/2`` and
    stops otherwise.  ``mu_1 = 2 + (2-N)p``, ``mu_n = p mu_{n-1} + 2`` until the
    first positive term; ``n2`` is one past that term's index, so that
    ``mu_{n2-1} > 0 >= mu_{n2-2}``.
    """
    N, p = P.N, P.p
    if N < 3:
        raise ParameterDomainError("bootstrap ledgers need N >= 3", field="N")
    require_subcritical(P)
    t = [0.5 * (1.0 + N / (p * (N - 2.0)))]
    m0 = None
    stopped = False
    target = 0.5 * N * p
    if t[0] > target:
        m0 = 0
    while m0 is None and len(t) <= max_steps:
        prev = t[-1]
        if prev >= 0.5 * N:
            stopped = True
            break
        t.append(N * prev / (p * (N - 2.0 * prev)))
        if t[-1] > target:
            m0 = len(t) - 1
    mu = [2.0 + (2.0 - N) * p]
    while mu[-1] <= 0.0 and len(mu) <= max_steps:
        mu.append(p * mu[-1] + 2.0)
    first_pos = len(mu)  # mu is 1-indexed
    return BootstrapLedger(N, p, t, mu, m0, first_pos + 1, first_pos, stopped)
