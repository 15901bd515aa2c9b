"""Radial grids, sampled radial functions and quadrature on the unit ball.

All functions live on a geometric grid ``r_min = r_0 < ... < r_{n-1} = 1``
which is uniform in ``t = ln r``.  Integrals over ``[r_min, 1]`` are done in
``t`` with Simpson's rule; whatever lies in ``(0, r_min)`` is never sampled
and is integrated from the function's tail model instead (a closed form for
the plain power/log tags, adaptive quadrature for anything else).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate, special

from .errors import DivergenceError, ParameterDomainError

DEFAULT_R_MIN = 1e-6
DEFAULT_NODES = 4096
MIN_NODES = 16


def default_nodes() -> int:
    """Grid size used when none is given; ``KS_DEFAULT_NODES`` overrides it."""
    raw = os.environ.get("KS_DEFAULT_NODES")
    if raw is None or raw.strip() == "":
        return DEFAULT_NODES
    try:
        n = int(raw)
    except ValueError:
        raise ParameterDomainError(f"KS_DEFAULT_NODES={raw!r} is not an integer", field="KS_DEFAULT_NODES")
    return n


def sphere_area(N: int) -> float:
    """Surface measure of the unit sphere in R^N."""
    return 2.0 * math.pi ** (N / 2) / math.gamma(N / 2)


@dataclass(frozen=True)
class Params:
    """Problem record ``(N, p, theta, k)`` with the derived constants."""

    N: int
    p: float
    theta: float = 0.0
    k: float = 1.0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise ParameterDomainError(f"N must be an integer >= 2, got {self.N}", field="N")
        if not (self.p > 1):
            raise ParameterDomainError(f"p must exceed 1, got {self.p}", field="p")
        if not math.isfinite(self.theta):
            raise ParameterDomainError("theta must be finite", field="theta")
        if not math.isfinite(self.k):
            raise ParameterDomainError("k must be finite", field="k")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "theta", float(self.theta))
        object.__setattr__(self, "k", float(self.k))

    @property
    def p_star(self) -> float:
        return math.inf if self.N == 2 else self.N / (self.N - 2)

    @property
    def p_sobolev(self) -> float:
        return math.inf if self.N == 2 else (self.N + 2) / (self.N - 2)

    @property
    def theta_minus(self) -> float:
        return min(0.0, self.theta)

    @property
    def sigma_N(self) -> float:
        return sphere_area(self.N)

    @property
    def c_N(self) -> float:
        # -Delta(c_N Phi) = delta_0 with Phi = r^{2-N}, or -ln r when N = 2
        if self.N == 2:
            return 1.0 / (2.0 * math.pi)
        return 1.0 / ((self.N - 2) * self.sigma_N)

    def phi(self, r):
        r = np.asarray(r, dtype=float)
        return -np.log(r) if self.N == 2 else r ** (2.0 - self.N)

    def replace(self, **changes) -> "Params":
        d = dict(N=self.N, p=self.p, theta=self.theta, k=self.k)
        d.update(changes)
        return Params(**d)


@dataclass(frozen=True, eq=False)
class RadialGrid:
    r_min: float
    n_nodes: int
    nodes: np.ndarray

    @property
    def t(self) -> np.ndarray:
        return np.log(self.nodes)

    @property
    def h(self) -> float:
        """Uniform step in ``t = ln r``."""
        return -math.log(self.r_min) / (self.n_nodes - 1)

    def refined(self, factor: int = 2) -> "RadialGrid":
        return make_grid(self.r_min, factor * (self.n_nodes - 1) + 1, min_nodes=2)


def make_grid(r_min: float = DEFAULT_R_MIN, n_nodes: Optional[int] = None, *, min_nodes: int = MIN_NODES) -> RadialGrid:
    """Geometric grid from ``r_min`` to 1 inclusive.

    ``min_nodes`` exists so tests can build the tiny grids used to check the
    spacing by hand; production code keeps the default floor of 16.
    """
    if n_nodes is None:
        n_nodes = default_nodes()
    if not (0.0 < r_min < 1.0):
        raise ParameterDomainError(f"r_min must lie in (0, 1), got {r_min}", field="r_min")
    if int(n_nodes) != n_nodes or n_nodes < max(min_nodes, 2):
        raise ParameterDomainError(f"n_nodes must be an integer >= {max(min_nodes, 2)}, got {n_nodes}", field="n_nodes")
    n_nodes = int(n_nodes)
    nodes = np.exp(np.linspace(math.log(r_min), 0.0, n_nodes))
    nodes[0] = r_min
    nodes[-1] = 1.0
    nodes.setflags(write=False)
    return RadialGrid(float(r_min), n_nodes, nodes)


@dataclass(frozen=True)
class Singular:
    """Leading behaviour at the origin.

    ``power``: ``coeff * r**alpha``; ``log``: ``coeff * (-ln r)**alpha``;
    ``none``: bounded.
    """

    kind: str = "none"
    alpha: float = 0.0
    coeff: float = 0.0

    def __post_init__(self):
        if self.kind not in ("none", "power", "log"):
            raise ParameterDomainError(f"unknown singular tag {self.kind!r}", field="singular_tag")

    def leading(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == "power":
            return self.coeff * r**self.alpha
        if self.kind == "log":
            return self.coeff * (-np.log(r)) ** self.alpha
        return np.zeros_like(r)

    def leading_deriv(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == "power":
            return self.coeff * self.alpha * r ** (self.alpha - 1.0)
        if self.kind == "log":
            return -self.coeff * self.alpha * (-np.log(r)) ** (self.alpha - 1.0) / r
        return np.zeros_like(r)

    def scaled(self, c: float) -> "Singular":
        if self.kind == "none":
            return self
        return Singular(self.kind, self.alpha, self.coeff * c)

    def strength(self) -> float:
        """Ordering key: larger means more singular at 0."""
        if self.kind == "power" and self.coeff != 0.0:
            return -self.alpha if self.alpha < 0 else -1.0
        if self.kind == "log" and self.coeff != 0.0:
            return 0.0
        return -2.0


NONE = Singular()


@dataclass(frozen=True, eq=False)
class RadialFn:
    """A radial function sampled on a grid plus a model of it below ``r_min``.

    Without an explicit ``tail`` the model is the tag's leading term plus the
    constant that makes it continuous at ``r_min``.  ``deriv`` holds ``du/dr``
    at the nodes when it is known exactly; otherwise it is differenced.
    """

    grid: RadialGrid
    values: np.ndarray
    singular: Singular = NONE
    deriv: Optional[np.ndarray] = None
    tail: Optional[Callable] = None
    dtail: Optional[Callable] = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.n_nodes,):
            raise ParameterDomainError(
                f"values has shape {values.shape}, grid has {self.grid.n_nodes} nodes", field="values"
            )
        object.__setattr__(self, "values", values)
        if self.deriv is not None:
            object.__setattr__(self, "deriv", np.asarray(self.deriv, dtype=float))

    @classmethod
    def from_function(cls, grid, fn, dfn=None, singular=NONE, exact_tail=False):
        d = None if dfn is None else dfn(grid.nodes)
        return cls(
            grid,
            fn(grid.nodes),
            singular,
            d,
            tail=fn if exact_tail else None,
            dtail=dfn if (exact_tail and dfn is not None) else None,
        )

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros(grid.n_nodes), NONE, np.zeros(grid.n_nodes))

    @property
    def r(self) -> np.ndarray:
        return self.grid.nodes

    def to_dict(self) -> dict:
        """Plain-data form; custom tail callables are not serialized."""
        return {
            "r_min": self.grid.r_min,
            "n_nodes": self.grid.n_nodes,
            "values": self.values.tolist(),
            "deriv": None if self.deriv is None else self.deriv.tolist(),
            "singular": {"kind": self.singular.kind, "alpha": self.singular.alpha, "coeff": self.singular.coeff},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RadialFn":
        g = make_grid(d["r_min"], d["n_nodes"], min_nodes=2)
        deriv = None if d.get("deriv") is None else np.asarray(d["deriv"], dtype=float)
        return cls(g, np.asarray(d["values"], dtype=float), Singular(**d["singular"]), deriv)

    @property
    def has_exact_tail(self) -> bool:
        return self.tail is not None

    @property
    def offset(self) -> float:
        """Constant added to the leading term to match ``values[0]``."""
        return float(self.values[0] - self.singular.leading(self.grid.r_min))

    def tail_values(self, r):
        if self.tail is not None:
            return self.tail(r)
        if self.singular.kind == "none":
            return np.full_like(np.asarray(r, dtype=float), self.values[0])
        return self.singular.leading(r) + self.offset

    def tail_deriv(self, r):
        if self.dtail is not None:
            return self.dtail(r)
        return self.singular.leading_deriv(r)

    def derivative(self) -> np.ndarray:
        if self.deriv is not None:
            return self.deriv
        return d_dt(self.values, self.grid.h) / self.r

    # arithmetic -----------------------------------------------------------
    def _check_grid(self, other):
        if other.grid is not self.grid and not (
            other.grid.n_nodes == self.grid.n_nodes and other.grid.r_min == self.grid.r_min
        ):
            raise ParameterDomainError("radial functions live on different grids", field="grid")

    def __add__(self, other: "RadialFn") -> "RadialFn":
        if not isinstance(other, RadialFn):
            return NotImplemented
        self._check_grid(other)
        s1, s2 = self.singular, other.singular
        if s1.kind == s2.kind and s1.alpha == s2.alpha:
            tag = NONE if s1.kind == "none" else Singular(s1.kind, s1.alpha, s1.coeff + s2.coeff)
        else:
            tag = s1 if s1.strength() >= s2.strength() else s2
        deriv = None
        if self.deriv is not None and other.deriv is not None:
            deriv = self.deriv + other.deriv
        tail = dtail = None
        if self.has_exact_tail or other.has_exact_tail:
            a, b = self, other
            tail = lambda r: a.tail_values(r) + b.tail_values(r)
            dtail = lambda r: a.tail_deriv(r) + b.tail_deriv(r)
        return RadialFn(self.grid, self.values + other.values, tag, deriv, tail=tail, dtail=dtail)

    def __mul__(self, c) -> "RadialFn":
        if not np.isscalar(c):
            return NotImplemented
        c = float(c)
        a = self
        return RadialFn(
            self.grid,
            c * self.values,
            self.singular.scaled(c),
            None if self.deriv is None else c * self.deriv,
            tail=None if self.tail is None else (lambda r: c * a.tail(r)),
            dtail=None if self.dtail is None else (lambda r: c * a.dtail(r)),
        )

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other)

    def power(self, p: float) -> "RadialFn":
        """Pointwise ``max(u, 0)**p``."""
        s = self.singular
        tag = NONE if s.kind == "none" else Singular(s.kind, s.alpha * p, abs(s.coeff) ** p)
        tail = None
        if self.has_exact_tail:
            a = self
            tail = lambda r: np.maximum(a.tail_values(r), 0.0) ** p
        return RadialFn(self.grid, np.maximum(self.values, 0.0) ** p, tag, None, tail=tail)

    def abs(self) -> "RadialFn":
        tail = None
        if self.has_exact_tail:
            a = self
            tail = lambda r: np.abs(a.tail_values(r))
        tag = self.singular.scaled(-1.0) if self.singular.coeff < 0 else self.singular
        return RadialFn(self.grid, np.abs(self.values), tag, None, tail=tail)


# --- finite differences in t -------------------------------------------------

def d_dt(f: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order first derivative on a uniform grid."""
    f = np.asarray(f, dtype=float)
    d = np.empty_like(f)
    d[2:-2] = (f[:-4] - 8 * f[1:-3] + 8 * f[3:-1] - f[4:]) / (12 * h)
    d[0] = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12 * h)
    d[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / (12 * h)
    d[-1] = (25 * f[-1] - 48 * f[-2] + 36 * f[-3] - 16 * f[-4] + 3 * f[-5]) / (12 * h)
    d[-2] = (3 * f[-1] + 10 * f[-2] - 18 * f[-3] + 6 * f[-4] - f[-5]) / (12 * h)
    return d


def d2_dt2(f: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order second derivative on a uniform grid."""
    f = np.asarray(f, dtype=float)
    d = np.empty_like(f)
    h2 = 12 * h * h
    d[2:-2] = (-f[:-4] + 16 * f[1:-3] - 30 * f[2:-2] + 16 * f[3:-1] - f[4:]) / h2
    d[0] = (45 * f[0] - 154 * f[1] + 214 * f[2] - 156 * f[3] + 61 * f[4] - 10 * f[5]) / h2
    d[1] = (10 * f[0] - 15 * f[1] - 4 * f[2] + 14 * f[3] - 6 * f[4] + f[5]) / h2
    d[-1] = (45 * f[-1] - 154 * f[-2] + 214 * f[-3] - 156 * f[-4] + 61 * f[-5] - 10 * f[-6]) / h2
    d[-2] = (10 * f[-1] - 15 * f[-2] - 4 * f[-3] + 14 * f[-4] - 6 * f[-5] + f[-6]) / h2
    return d


# --- quadrature --------------------------------------------------------------

def grid_integral(values_times_r: np.ndarray, h: float) -> float:
    """``int_{r_min}^1 g(r) dr`` given samples of ``g(r) * r`` (i.e. dt form)."""
    return float(integrate.simpson(values_times_r, dx=h))


def cumulative(values_times_r: np.ndarray, h: float, slope: Optional[np.ndarray] = None) -> np.ndarray:
    """Cumulative ``int_{r_min}^{r_i} g dr`` from samples ``q = g * r``.

    Endpoint-corrected trapezoid, ``h/2 (q_i + q_{i+1}) + h^2/12 (q'_i - q'_{i+1})``,
    with ``slope = dq/dt`` differenced when not supplied.  Fourth order and,
    unlike cumulative Simpson, free of odd/even ripple, which matters once
    the result is differenced again.
    """
    q = np.asarray(values_times_r, dtype=float)
    dq = d_dt(q, h) if slope is None else np.asarray(slope, dtype=float)
    pieces = 0.5 * h * (q[:-1] + q[1:]) + h * h / 12.0 * (dq[:-1] - dq[1:])
    return np.concatenate(([0.0], np.cumsum(pieces)))


def _tail_quad(fn: Callable, a: float) -> float:
    # int_0^a fn(s) ds with s = a e^{-x}
    val, _ = integrate.quad(lambda x: float(fn(a * math.exp(-x))) * a * math.exp(-x), 0.0, np.inf,
                            limit=400, epsabs=1e-15, epsrel=1e-12)
    return val


def _check_power_integrable(s: Singular, exponent: float, what: str):
    if s.kind == "power" and s.coeff != 0.0 and exponent <= 0.0:
        raise DivergenceError(
            f"{what} diverges at the origin (tag r^{s.alpha:g}, integrand exponent {exponent - 1:g})",
            alpha=s.alpha,
        )


def tail_moment(u: RadialFn, m: float) -> float:
    """``int_0^{r_min} u(s) s^m ds`` from the tail model."""
    a = u.grid.r_min
    s = u.singular
    _check_power_integrable(s, s.alpha + m + 1.0, "moment")
    if m + 1.0 <= 0.0:
        raise DivergenceError(f"weight s^{m:g} is not integrable at 0")
    if u.has_exact_tail:
        return _tail_quad(lambda r: u.tail_values(r) * r**m, a)
    base = u.offset * a ** (m + 1.0) / (m + 1.0)
    if s.kind == "none":
        return float(u.values[0]) * a ** (m + 1.0) / (m + 1.0)
    if s.kind == "power":
        return s.coeff * a ** (s.alpha + m + 1.0) / (s.alpha + m + 1.0) + base
    # log: int_X^inf x^q e^{-(m+1)x} dx with X = -ln a
    q, lam, X = s.alpha, m + 1.0, -math.log(a)
    return s.coeff * special.gammaincc(q + 1.0, lam * X) * special.gamma(q + 1.0) / lam ** (q + 1.0) + base


def tail_deriv_moment(u: RadialFn, m: float) -> float:
    """``int_0^{r_min} (-u'(s)) s^m ds`` from the tail model."""
    a = u.grid.r_min
    s = u.singular
    if s.kind == "power" and s.alpha != 0.0:
        _check_power_integrable(s, s.alpha + m, "gradient moment")
    if u.dtail is not None:
        return _tail_quad(lambda r: -u.tail_deriv(r) * r**m, a)
    if s.kind == "none" or s.coeff == 0.0:
        return 0.0
    if s.kind == "power":
        if s.alpha == 0.0:
            return 0.0
        return -s.coeff * s.alpha * a ** (s.alpha + m) / (s.alpha + m)
    q, X = s.alpha, -math.log(a)
    if m <= 0.0:
        raise DivergenceError("gradient moment of a log singularity needs positive weight exponent")
    return s.coeff * q * special.gammaincc(q, m * X) * special.gamma(q) / m**q


def moment(u: RadialFn, m: float) -> float:
    """``int_0^1 u(s) s^m ds`` (tail model plus grid quadrature)."""
    r = u.r
    return tail_moment(u, m) + grid_integral(u.values * r ** (m + 1.0), u.grid.h)


def ball_integral(u: RadialFn, N: int) -> float:
    """``int_{B_1} u dx`` for radial ``u``."""
    return sphere_area(N) * moment(u, N - 1.0)


def l1_norm(u: RadialFn, N: int) -> float:
    """``||u||_{L^1(B_1)}`` including the part inside ``r_min``."""
    s = u.singular
    if s.kind == "power" and s.coeff != 0.0 and s.alpha <= -N:
        raise DivergenceError(f"r^{s.alpha:g} is not integrable on B_1 in dimension {N}", alpha=s.alpha)
    return ball_integral(u.abs(), N)


def sup_norm(u: RadialFn) -> float:
    return float(np.max(np.abs(u.values)))
