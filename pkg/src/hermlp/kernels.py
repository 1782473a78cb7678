"""Closed-form and quadrature evaluation of the heat, Poisson, g-function
and ladder kernels of the shifted harmonic-oscillator operator.

The heat kernel has the exact Gaussian closed form; the Poisson family is
obtained by subordination,

    P_t = t/sqrt(4 pi) * int_0^inf s^{-3/2} e^{-t^2/(4s) - alpha s} W_s ds,

evaluated by trapezoid quadrature in log s.  The integrand decays
double-exponentially in log s at both ends (e^{-t^2/4s} below, the
e^{-(n+alpha)s} heat decay above), so a fixed node count is uniformly
accurate over many decades of t: with Q = 64 the spectral action error
is below 1e-10 for t in [0.05, 10].  A plain generalized Gauss-Laguerre
rule in u = t^2/4s is *not* usable here: e^{-c/u} factors are far from
polynomial near u = 0 and stall at ~1e-2 relative error for small t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .basis import gauss_nodes

__all__ = [
    "ShiftedOperator",
    "SubordinationRule",
    "heat_kernel",
    "heat_kernel_one",
    "heat_one_dt",
    "poisson_kernel",
    "classical_poisson",
    "g_kernel",
    "ladder_kernel",
    "g_of_one",
]

_SQRT4PI = math.sqrt(4.0 * math.pi)


@dataclass(frozen=True)
class ShiftedOperator:
    """The operator L + alpha with L = -Laplacian + |x|^2 on R^n."""

    alpha: float = 0.0
    n: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("dimension must be >= 1")
        if self.alpha <= -self.n:
            raise ValueError(f"shift alpha={self.alpha} must exceed -n={-self.n}")


@dataclass
class SubordinationRule:
    """Quadrature for the half-line subordination integrals.

    `nodes`/`weights` are the Q-point generalized Gauss-Laguerre rule for
    the weight u^{-1/2} e^{-u} (they reproduce int u^{-1/2} e^{-u} du =
    sqrt(pi) exactly and serve as the reference half-line rule).  Kernel
    evaluation goes through `s_nodes`, a Q-point log-domain trapezoid rule
    whose truncation window adapts to the integrand peak at s = t/(2 sqrt(D)).
    """

    Q: int = 64
    cut: float = 45.0
    nodes: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.Q < 2:
            raise ValueError("subordination rule needs Q >= 2 nodes")
        self.nodes, self.weights = gauss_nodes(self.Q, "generalized-laguerre", beta=-0.5)

    def s_nodes(self, t: float, decay: float):
        """Nodes/weights for int_0^inf F(s) ds with F ~ e^{-t^2/4s} at 0
        and F ~ e^{-decay*s} at infinity; weights include the ds = s dtheta
        Jacobian of the log substitution."""
        if t <= 0:
            raise ValueError("time must be positive")
        if decay <= 0:
            raise ValueError("large-s decay rate must be positive")
        rt = t * math.sqrt(decay) + self.cut
        lo = math.log(t * t / (4.0 * rt))
        hi = math.log(rt / decay)
        theta = np.linspace(lo, hi, self.Q)
        w = np.full(self.Q, theta[1] - theta[0])
        w[0] *= 0.5
        w[-1] *= 0.5
        s = np.exp(theta)
        return s, w * s


_DEFAULT_RULE = SubordinationRule()


def _split(x, n):
    """|x - y|^2-style helper: squared Euclidean norm along the point axis."""
    x = np.asarray(x, dtype=float)
    if n == 1:
        return x * x
    return np.sum(x * x, axis=-1)


def _check_time(t):
    if np.any(np.asarray(t) <= 0):
        raise ValueError("time t must be positive")


def heat_kernel(x, y, t, n: int = 1):
    """Gaussian closed form of the oscillator heat kernel W_t(x, y).

    Symmetric in (x, y) and strictly positive.  For n > 1 the last axis
    of x, y holds coordinates; t may broadcast against the points.
    """
    _check_time(t)
    t = np.asarray(t, dtype=float)
    em2t = np.exp(-2.0 * t)
    m2 = -np.expm1(-2.0 * t)      # 1 - e^{-2t}, cancellation-safe
    m4 = -np.expm1(-4.0 * t)      # 1 - e^{-4t}
    A = (1.0 + em2t) / m2
    B = m2 / (1.0 + em2t)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    pref = (em2t / (math.pi * m4)) ** (n / 2.0)
    return pref * np.exp(-0.25 * (A * _split(x - y, n) + B * _split(x + y, n)))


def heat_kernel_one(x, t, n: int = 1):
    """W_t(1)(x): the heat semigroup applied to the constant function 1.

    Closed form from Gaussian integration of the heat kernel over y:

        (2 e^{-2t} / (1 + e^{-4t}))^{n/2}
            * exp(-(1 - e^{-4t}) / (2 (1 + e^{-4t})) |x|^2).

    Tends to 1 as t -> 0+ and is nonincreasing in |x|.
    """
    _check_time(t)
    t = np.asarray(t, dtype=float)
    em2t = np.exp(-2.0 * t)
    em4t = np.exp(-4.0 * t)
    m4 = -np.expm1(-4.0 * t)
    pref = (2.0 * em2t / (1.0 + em4t)) ** (n / 2.0)
    return pref * np.exp(-0.5 * m4 / (1.0 + em4t) * _split(np.asarray(x, float), n))


def heat_one_dt(x, t, op: ShiftedOperator):
    """d/dt of e^{-alpha t} W_t(1)(x), in closed form."""
    _check_time(t)
    t = np.asarray(t, dtype=float)
    em4t = np.exp(-4.0 * t)
    m4 = -np.expm1(-4.0 * t)
    onep = 1.0 + em4t
    r2 = _split(np.asarray(x, float), op.n)
    bracket = op.alpha + op.n * m4 / onep + r2 * 4.0 * em4t / (onep * onep)
    return -np.exp(-op.alpha * t) * bracket * heat_kernel_one(x, t, op.n)


def poisson_kernel(x, y, t, op: ShiftedOperator, rule: SubordinationRule | None = None):
    """Subordinated Poisson kernel of L + alpha; strictly positive."""
    _check_time(t)
    t = float(t)
    rule = rule or _DEFAULT_RULE
    s, w = rule.s_nodes(t, op.n + op.alpha)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    shape = np.broadcast(_split(x - y, op.n), np.empty(())).shape
    sb = s.reshape((-1,) + (1,) * len(shape))
    wb = w.reshape((-1,) + (1,) * len(shape))
    integ = sb ** -1.5 * np.exp(-t * t / (4.0 * sb) - op.alpha * sb) * heat_kernel(
        x, y, sb, op.n
    )
    return t / _SQRT4PI * np.sum(wb * integ, axis=0)


def g_kernel(x, y, t, op: ShiftedOperator, rule: SubordinationRule | None = None):
    """t d/dt of the Poisson kernel of L + alpha (g-function kernel)."""
    _check_time(t)
    t = float(t)
    rule = rule or _DEFAULT_RULE
    s, w = rule.s_nodes(t, op.n + op.alpha)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    shape = np.broadcast(_split(x - y, op.n), np.empty(())).shape
    sb = s.reshape((-1,) + (1,) * len(shape))
    wb = w.reshape((-1,) + (1,) * len(shape))
    integ = (
        sb ** -1.5
        * (1.0 - t * t / (2.0 * sb))
        * np.exp(-t * t / (4.0 * sb) - op.alpha * sb)
        * heat_kernel(x, y, sb, op.n)
    )
    return t / _SQRT4PI * np.sum(wb * integ, axis=0)


def _heat_ladder(x, y, s, j: int, sign: int, n: int):
    """(d/dx_j + sign x_j) W_s(x, y), differentiated analytically."""
    em2s = np.exp(-2.0 * s)
    m2 = -np.expm1(-2.0 * s)
    A = (1.0 + em2s) / m2
    B = m2 / (1.0 + em2s)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if n == 1:
        xj, yj = x, y
    else:
        xj, yj = x[..., j - 1], y[..., j - 1]
    factor = sign * xj - 0.5 * A * (xj - yj) - 0.5 * B * (xj + yj)
    return factor * heat_kernel(x, y, s, n)


def ladder_kernel(
    x, y, t, j: int, sign: int, n: int = 1, rule: SubordinationRule | None = None
):
    """Kernel of t (d/dx_j +/- x_j) P_t, by subordination of the
    analytically differentiated heat kernel."""
    _check_time(t)
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    if not 1 <= j <= n:
        raise ValueError(f"coordinate j={j} out of range for n={n}")
    t = float(t)
    rule = rule or _DEFAULT_RULE
    s, w = rule.s_nodes(t, float(n))
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    shape = np.broadcast(_split(x - y, n), np.empty(())).shape
    sb = s.reshape((-1,) + (1,) * len(shape))
    wb = w.reshape((-1,) + (1,) * len(shape))
    integ = sb ** -1.5 * np.exp(-t * t / (4.0 * sb)) * _heat_ladder(x, y, sb, j, sign, n)
    return t * t / _SQRT4PI * np.sum(wb * integ, axis=0)


def g_of_one(x, t, op: ShiftedOperator, rule: SubordinationRule | None = None):
    """t d/dt P_t^{L+alpha}(1)(x), subordinating the exact time derivative
    of the heat action on 1."""
    _check_time(t)
    t = float(t)
    rule = rule or _DEFAULT_RULE
    s, w = rule.s_nodes(t, op.n + op.alpha)
    x = np.asarray(x, dtype=float)
    shape = np.broadcast(_split(x, op.n), np.empty(())).shape
    sb = s.reshape((-1,) + (1,) * len(shape))
    wb = w.reshape((-1,) + (1,) * len(shape))
    integ = sb ** -0.5 * np.exp(-t * t / (4.0 * sb)) * heat_one_dt(x, sb, op)
    return t / math.sqrt(math.pi) * np.sum(wb * integ, axis=0)


def classical_poisson(x, t, n: int = 1):
    """Classical Poisson kernel P_t(x) = t^{-n} P(x/t) on R^n; unit mass."""
    _check_time(t)
    t = np.asarray(t, dtype=float)
    c = math.gamma((n + 1) / 2.0) / math.pi ** ((n + 1) / 2.0)
    r2 = _split(np.asarray(x, float), n)
    return c * t ** (-n) * (1.0 + r2 / (t * t)) ** (-(n + 1) / 2.0)
