"""Stable evaluation of multidimensional Hermite functions and the
conversion between sampled functions and spectral coefficients.

The orthonormal Hermite functions are built from the normalized three-term
recurrence

    h_0(x) = pi^{-1/4} e^{-x^2/2},   h_1(x) = sqrt(2) x h_0(x),
    h_{m+1}(x) = x sqrt(2/(m+1)) h_m(x) - sqrt(m/(m+1)) h_{m-1}(x),

never from the raw Hermite polynomials (2^k k! overflows long before
k = 100).  Internally the recurrence runs on the exponentially scaled
values h_m(x) e^{x^2/2}; the Gaussian factor is reattached once per
point, which keeps products over coordinates away from underflow.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_genlaguerre

__all__ = [
    "SpatialGrid",
    "HermiteExpansion",
    "total_degree",
    "shift_index",
    "hermite_eval",
    "hermite_ladder_eval",
    "hermite_derivative",
    "eval_table",
    "analyze",
    "synthesize",
    "synthesize_grid",
    "gauss_nodes",
    "default_grid",
]


def total_degree(k) -> int:
    """|k| = k_1 + ... + k_n."""
    return int(sum(k))


def as_index(k) -> tuple:
    if isinstance(k, (int, np.integer)):
        k = (int(k),)
    k = tuple(int(kj) for kj in k)
    if any(kj < 0 for kj in k):
        raise ValueError(f"multi-index must be nonnegative, got {k}")
    return k


def shift_index(k, j: int, step: int) -> tuple:
    """k -> k +/- e_j with 1-based coordinate j."""
    k = as_index(k)
    if not 1 <= j <= len(k):
        raise ValueError(f"coordinate j={j} out of range for n={len(k)}")
    out = list(k)
    out[j - 1] += step
    if out[j - 1] < 0:
        raise ValueError(f"decrement of {k} at j={j} leaves the index set")
    return tuple(out)


class SpatialGrid:
    """Uniform tensor lattice on [-R, R]^n with trapezoid weights.

    R is snapped to an integer multiple of h so the lattice is symmetric
    about 0 and contains the origin.
    """

    def __init__(self, R: float, h: float, n: int = 1):
        if R <= 0 or h <= 0:
            raise ValueError("grid requires R > 0 and h > 0")
        if n < 1:
            raise ValueError("dimension must be >= 1")
        m = max(1, int(round(R / h)))
        self.n = int(n)
        self.h = float(h)
        self.R = m * self.h
        self.axis = self.h * np.arange(-m, m + 1)
        w = np.full(self.axis.size, self.h)
        w[0] *= 0.5
        w[-1] *= 0.5
        self.axis_weights = w

    @property
    def shape(self) -> tuple:
        return (self.axis.size,) * self.n

    @property
    def size(self) -> int:
        return self.axis.size ** self.n

    @property
    def points(self) -> np.ndarray:
        """Flattened lattice, shape (size,) for n=1 and (size, n) otherwise."""
        if self.n == 1:
            return self.axis.copy()
        mesh = np.meshgrid(*([self.axis] * self.n), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    @property
    def weights(self) -> np.ndarray:
        """Flattened tensor trapezoid weights; they sum to (2R)^n."""
        w = self.axis_weights
        for _ in range(self.n - 1):
            w = np.multiply.outer(w, self.axis_weights)
        return w.ravel()

    def coarsen(self, factor: int = 2) -> "SpatialGrid":
        return SpatialGrid(self.R, self.h * factor, self.n)


def default_grid(n: int = 1, K: int | None = None) -> SpatialGrid:
    """Grid sized so `analyze` resolves Hermite oscillation up to degree K."""
    if K is None:
        K = 60 if n == 1 else 20
    R = math.sqrt(2 * K + n) + 4.0
    h = 0.005 if n == 1 else 0.03
    return SpatialGrid(R, h, n)


def _scaled_eval(m: int, x: np.ndarray, perturb: float = 0.0) -> np.ndarray:
    """h_m(x) e^{x^2/2} by the normalized recurrence.

    `perturb` multiplies the forward recurrence coefficient by (1+perturb);
    it exists only as a sensitivity canary for the verification suite.
    """
    x = np.asarray(x, dtype=float)
    h0 = math.pi ** -0.25 * np.ones_like(x)
    if m == 0:
        return h0
    cur = math.sqrt(2.0) * x * h0
    prev = h0
    for i in range(1, m):
        a = math.sqrt(2.0 / (i + 1)) * (1.0 + perturb)
        b = math.sqrt(i / (i + 1.0))
        prev, cur = cur, a * x * cur - b * prev
    return cur


def _scaled_table(kmax: int, x: np.ndarray) -> np.ndarray:
    """All h_m(x) e^{x^2/2} for m = 0..kmax, shape (kmax+1, len(x))."""
    x = np.asarray(x, dtype=float)
    out = np.empty((kmax + 1,) + x.shape)
    out[0] = math.pi ** -0.25
    if kmax >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for m in range(1, kmax):
        out[m + 1] = math.sqrt(2.0 / (m + 1)) * x * out[m] - math.sqrt(
            m / (m + 1.0)
        ) * out[m - 1]
    return out


def eval_table(kmax: int, axis: np.ndarray) -> np.ndarray:
    """h_m on a 1-D axis for m = 0..kmax, shape (kmax+1, len(axis))."""
    axis = np.asarray(axis, dtype=float)
    return _scaled_table(kmax, axis) * np.exp(-0.5 * axis * axis)


def _coords(k: tuple, x) -> list[np.ndarray]:
    n = len(k)
    x = np.asarray(x, dtype=float)
    if n == 1:
        return [x]
    if x.shape[-1] != n:
        raise ValueError(f"points must have last axis {n}, got shape {x.shape}")
    return [x[..., j] for j in range(n)]


def hermite_eval(k, x, perturb: float = 0.0) -> np.ndarray:
    """h_k(x) = prod_j h_{k_j}(x_j).

    For n = 1, `x` is a scalar or array of positions; for n > 1 the last
    axis of `x` holds coordinates.  Total function: finite for any input.
    """
    k = as_index(k)
    coords = _coords(k, x)
    scaled = _scaled_eval(k[0], coords[0], perturb)
    r2 = coords[0] * coords[0]
    for kj, xj in zip(k[1:], coords[1:]):
        scaled = scaled * _scaled_eval(kj, xj, perturb)
        r2 = r2 + xj * xj
    return scaled * np.exp(-0.5 * r2)


def hermite_ladder_eval(k, x, j: int, sign: int, perturb: float = 0.0) -> np.ndarray:
    """(d/dx_j + sign * x_j) h_k(x) in closed index form.

    sign=+1 gives sqrt(2 k_j) h_{k-e_j}(x)  (0 when k_j = 0),
    sign=-1 gives -sqrt(2 k_j + 2) h_{k+e_j}(x).
    """
    k = as_index(k)
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    if not 1 <= j <= len(k):
        raise ValueError(f"coordinate j={j} out of range for n={len(k)}")
    kj = k[j - 1]
    if sign == +1:
        if kj == 0:
            # sqrt(0) * h_{k - e_j} := 0 by convention
            return 0.0 * hermite_eval(k, x, perturb)
        return math.sqrt(2.0 * kj) * hermite_eval(shift_index(k, j, -1), x, perturb)
    return -math.sqrt(2.0 * kj + 2.0) * hermite_eval(shift_index(k, j, +1), x, perturb)


def hermite_derivative(k, x, j: int = 1, perturb: float = 0.0) -> np.ndarray:
    """d/dx_j h_k(x) as the half-sum of the two ladder actions."""
    up = hermite_ladder_eval(k, x, j, +1, perturb)
    down = hermite_ladder_eval(k, x, j, -1, perturb)
    return 0.5 * (up + down)


@dataclass
class HermiteExpansion:
    """Finite spectral representation: coefficients on multi-indices.

    coeffs maps an n-tuple k with |k| <= K to a length-d array.  The
    eigenvalue of the shifted oscillator on mode k is 2|k| + n + alpha.
    """

    n: int
    d: int = 1
    K: int = 0
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for k, c in self.coeffs.items():
            k = as_index(k)
            if len(k) != self.n:
                raise ValueError(f"index {k} has wrong dimension (n={self.n})")
            if total_degree(k) > self.K:
                raise ValueError(f"index {k} exceeds degree cap K={self.K}")
            c = np.atleast_1d(np.asarray(c, dtype=float))
            if c.shape != (self.d,):
                raise ValueError(f"coefficient for {k} must have shape ({self.d},)")
            if not np.all(np.isfinite(c)):
                raise ValueError(f"non-finite coefficient at {k}")
            clean[k] = c
        self.coeffs = clean

    @classmethod
    def single(cls, k, value=1.0, n: int | None = None, d: int = 1):
        k = as_index(k)
        if n is None:
            n = len(k)
        return cls(n=n, d=d, K=total_degree(k), coeffs={k: np.full(d, float(value)) if np.isscalar(value) else value})

    def eigenvalue(self, k, alpha: float = 0.0) -> float:
        """lambda_alpha(k) = 2|k| + n + alpha (requires alpha > -n for positivity)."""
        return 2.0 * total_degree(k) + self.n + alpha

    def min_eigenvalue(self, alpha: float = 0.0) -> float:
        if not self.coeffs:
            return self.n + alpha
        return min(self.eigenvalue(k, alpha) for k in self.coeffs)

    def l2_norm_sq(self) -> float:
        return float(sum(float(c @ c) for c in self.coeffs.values()))

    def l2_norm(self) -> float:
        return math.sqrt(self.l2_norm_sq())

    def map_coeffs(self, fn) -> "HermiteExpansion":
        """New expansion with coeffs[k] replaced by fn(k, coeffs[k])."""
        return HermiteExpansion(
            n=self.n,
            d=self.d,
            K=self.K,
            coeffs={k: fn(k, c) for k, c in self.coeffs.items()},
        )

    def scaled(self, factor: float) -> "HermiteExpansion":
        return self.map_coeffs(lambda k, c: factor * c)


def _index_iter(n: int, K: int):
    for k in itertools.product(range(K + 1), repeat=n):
        if sum(k) <= K:
            yield k


def analyze(samples, grid: SpatialGrid, K: int, d: int = 1) -> HermiteExpansion:
    """Trapezoid projection of sampled f onto {h_k : |k| <= K}.

    The grid must resolve the oscillation of the highest mode
    (h <= 0.25 / sqrt(2K+n)) and contain its Gaussian envelope
    (R >= sqrt(2K+n) + 4); otherwise the call is rejected.
    """
    n = grid.n
    osc = 0.25 / math.sqrt(2 * K + n)
    if grid.h > osc + 1e-12:
        raise ValueError(
            f"grid spacing h={grid.h} too coarse for K={K}; need h <= {osc:.4g}"
        )
    need_R = math.sqrt(2 * K + n) + 4.0
    if grid.R < need_R - 1e-9:
        raise ValueError(
            f"grid half-width R={grid.R} too small for K={K}; need R >= {need_R:.4g}"
        )
    a = np.asarray(samples, dtype=float)
    if a.shape == grid.shape:
        a = a[..., np.newaxis]
    if a.shape != grid.shape + (d,):
        raise ValueError(
            f"samples have shape {np.shape(samples)}, expected {grid.shape} or {grid.shape + (d,)}"
        )
    T = eval_table(K, grid.axis) * grid.axis_weights  # (K+1, M)
    for _ in range(n):
        a = np.tensordot(a, T, axes=(0, 1))
    # a now has shape (d, K+1, ..., K+1), one trailing axis per coordinate
    coeffs = {}
    for k in _index_iter(n, K):
        c = a[(slice(None),) + k]
        if np.any(c != 0.0):
            coeffs[k] = c.copy()
    return HermiteExpansion(n=n, d=d, K=K, coeffs=coeffs)


def point_synthesis_matrix(e: HermiteExpansion, x) -> tuple[np.ndarray, np.ndarray, list]:
    """Spatial factors h_k(x) for every stored k.

    Returns (S, C, ks) with S of shape (nk, npts), C of shape (nk, d).
    """
    x = np.asarray(x, dtype=float)
    if e.n == 1:
        coords = [np.atleast_1d(x)]
    else:
        pts = x.reshape(-1, e.n)
        coords = [pts[:, j] for j in range(e.n)]
    ks = list(e.coeffs)
    if not ks:
        return np.zeros((0, coords[0].size)), np.zeros((0, e.d)), ks
    kmaxes = [max(k[j] for k in ks) for j in range(e.n)]
    tables = [eval_table(kmaxes[j], coords[j]) for j in range(e.n)]
    S = np.ones((len(ks), coords[0].size))
    for j in range(e.n):
        idx = np.array([k[j] for k in ks])
        S *= tables[j][idx]
    C = np.stack([e.coeffs[k] for k in ks])
    return S, C, ks


def synthesize(e: HermiteExpansion, x) -> np.ndarray:
    """sum_k coeffs[k] h_k(x); returns shape (d,) at a single point.

    For n=1, `x` may be an array of positions (result (npts, d));
    for n>1 a point is a length-n vector and arrays stack along axis 0.
    """
    x = np.asarray(x, dtype=float)
    single = x.ndim == 0 if e.n == 1 else x.ndim == 1
    S, C, _ = point_synthesis_matrix(e, x)
    npts = 1 if single else (x.size if e.n == 1 else x.reshape(-1, e.n).shape[0])
    out = S.T @ C if S.size else np.zeros((npts, e.d))
    return out[0] if single else out


def synthesize_grid(e: HermiteExpansion, grid: SpatialGrid) -> np.ndarray:
    """Synthesis on a full tensor grid, shape (grid.size, d)."""
    if not e.coeffs:
        return np.zeros((grid.size, e.d))
    C = np.zeros((e.d,) + (e.K + 1,) * e.n)
    for k, c in e.coeffs.items():
        C[(slice(None),) + k] = c
    T = eval_table(e.K, grid.axis)  # (K+1, M)
    a = C
    for _ in range(e.n):
        a = np.tensordot(a, T, axes=(1, 0))
    # (d, M, ..., M) -> (size, d)
    return np.moveaxis(a, 0, -1).reshape(grid.size, e.d)


def gauss_nodes(Q: int, family: str, beta: float | None = None):
    """Gauss nodes/weights: 'hermite' for e^{-x^2} on R, or
    'generalized-laguerre' for u^beta e^{-u} on (0, inf).

    Exact for polynomials up to degree 2Q - 1 against the family weight.
    """
    if Q < 1:
        raise ValueError("node count Q must be >= 1")
    if family == "hermite":
        return np.polynomial.hermite.hermgauss(Q)
    if family == "generalized-laguerre":
        if beta is None:
            raise ValueError("generalized-laguerre requires the exponent beta")
        if beta <= -1:
            raise ValueError("beta must exceed -1")
        return roots_genlaguerre(Q, beta)
    raise ValueError(f"unknown quadrature family {family!r}")
