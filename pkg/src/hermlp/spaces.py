"""Critical radius, Hardy-space atoms, and desk-scale estimators of the
maximal H^1 norm, the BMO norm adapted to the oscillator, the area
integral over cones, and the Carleson box functional.

The local geometry is governed by the critical radius rho(x), which is
1/2 near the origin and 1/(1+|x|) far out.  Atoms are supported in
balls B(x0, r0) with r0 <= rho(x0), bounded by the reciprocal ball
volume, and mean-zero exactly when r0 <= rho(x0)/2.  All averages are
deterministic lattice averages normalized by the quadrature mass of the
interior points, so constants behave exactly (the BMO estimate of the
function 1 is 1).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .basis import HermiteExpansion, SpatialGrid, point_synthesis_matrix, synthesize_grid
from .gamma import BanachModel, TimeGrid
from .kernels import heat_kernel
from .semigroups import TimeField, gfunction

__all__ = [
    "critical_radius",
    "Atom",
    "BallSpec",
    "validate_atom",
    "make_random_atom",
    "h1_norm",
    "bmo_norm",
    "area_integral",
    "carleson_functional",
]


def critical_radius(x) -> np.ndarray:
    """rho(x) = 1/2 for |x| < 1 and 1/(1+|x|) for |x| >= 1 (last axis of
    x holds coordinates in dimension > 1)."""
    x = np.asarray(x, dtype=float)
    r = np.abs(x) if x.ndim <= 1 or x.shape[-1] == 1 else np.linalg.norm(x, axis=-1)
    r = np.asarray(r)
    return np.where(r < 1.0, 0.5, 1.0 / (1.0 + r))


def _ball_volume(r: float, n: int) -> float:
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0) * r ** n


def _distances(grid: SpatialGrid, center) -> np.ndarray:
    pts = grid.points
    if grid.n == 1:
        return np.abs(pts - float(np.asarray(center).reshape(())))
    return np.linalg.norm(pts - np.asarray(center, dtype=float), axis=-1)


@dataclass
class Atom:
    """Hardy-space atom sampled on a spatial grid.

    kind "cancel" atoms (r0 <= rho(x0)/2) carry the mean-zero condition;
    kind "local" atoms do not.
    """

    center: object
    radius: float
    kind: str
    grid: SpatialGrid
    samples: np.ndarray  # (grid.size, d)

    def __post_init__(self):
        if self.kind not in ("cancel", "local"):
            raise ValueError(f"unknown atom kind {self.kind!r}")
        if self.radius <= 0:
            raise ValueError("atom radius must be positive")
        self.samples = np.atleast_2d(np.asarray(self.samples, dtype=float))
        if self.samples.shape[0] != self.grid.size:
            raise ValueError("atom samples must cover the grid")

    @property
    def d(self) -> int:
        return self.samples.shape[1]


def validate_atom(a: Atom):
    """Check the atom clauses; returns (ok, list of violated clauses)."""
    violations = []
    dist = _distances(a.grid, a.center)
    outside = dist >= a.radius
    if np.any(np.abs(a.samples[outside]) > 1e-12):
        violations.append("support exceeds B(x0, r0)")
    rho = float(critical_radius(a.center))
    if a.radius > rho * (1 + 1e-12):
        violations.append("radius exceeds critical radius")
    bound = 1.0 / _ball_volume(a.radius, a.grid.n)
    if np.max(np.abs(a.samples)) > bound * (1 + 1e-12):
        violations.append("sup-norm bound violated")
    if a.radius <= rho / 2:
        w = a.grid.weights
        means = w @ a.samples
        if np.max(np.abs(means)) > 1e-10:
            violations.append("mean-zero violated")
    return (not violations), violations


def make_random_atom(
    rng: np.random.Generator,
    grid: SpatialGrid,
    kind: str = "cancel",
    d: int = 1,
    center_range: float = 4.0,
) -> Atom:
    """Random polynomial-times-bump atom meeting every clause of its kind."""
    if kind not in ("cancel", "local"):
        raise ValueError(f"unknown atom kind {kind!r}")
    if grid.n != 1:
        raise ValueError("random atoms are generated on one-dimensional grids")
    x0 = float(rng.uniform(-center_range, center_range))
    rho = float(critical_radius(x0))
    r0 = rho * float(rng.uniform(0.25, 0.5)) if kind == "cancel" else rho
    dist = _distances(grid, x0)
    inside = dist < r0
    bump = np.where(inside, (1.0 - (dist / r0) ** 2) ** 2, 0.0)
    u = (grid.points - x0) / r0
    samples = np.zeros((grid.size, d))
    for c in range(d):
        poly = np.polynomial.polynomial.polyval(u, rng.normal(size=4))
        samples[:, c] = poly * bump
    if kind == "cancel":
        w = grid.weights
        bump_mass = float(w @ bump)
        samples -= bump[:, None] * ((w @ samples) / bump_mass)[None, :]
    peak = np.max(np.abs(samples))
    if peak > 0:
        samples *= 0.99 / (_ball_volume(r0, grid.n) * peak)
    return Atom(x0, r0, kind, grid, samples)


def h1_norm(
    f,
    B: BanachModel,
    grid: SpatialGrid,
    times: TimeGrid,
    kind: str = "heat",
    alpha: float = 0.0,
) -> float:
    """L^1 norm in x of sup_t ||semigroup(t) f(x)||_B, with the t -> 0+
    candidate ||f(x)||_B included.

    f may be a HermiteExpansion (spectral path) or an Atom / raw samples
    of shape (grid.size, d) (heat-kernel quadrature path, restricted to
    the support).
    """
    if kind not in ("heat", "poisson"):
        raise ValueError(f"unknown semigroup kind {kind!r}")
    if isinstance(f, HermiteExpansion):
        if grid.h > 0.25 / math.sqrt(2 * f.K + f.n + 1e-12):
            raise ValueError("grid too coarse for the expansion degree")
        S, C, ks = point_synthesis_matrix(f, grid.points)
        if not ks:
            return 0.0
        lam = np.array([f.eigenvalue(k, alpha) for k in ks])
        if np.any(lam <= 0):
            raise ValueError(f"shift alpha={alpha} gives non-positive eigenvalues")
        rate = lam if kind == "heat" else np.sqrt(lam)
        sup = B.norm(S.T @ C)  # t -> 0 candidate, shape (size,)
        for t in times.nodes:
            vals = (np.exp(-t * rate)[:, None] * C).T @ S  # (d, size)
            sup = np.maximum(sup, B.norm(vals.T))
        return float(np.sum(grid.weights * sup))
    if isinstance(f, Atom):
        samples = f.samples
    else:
        samples = np.atleast_2d(np.asarray(f, dtype=float))
    if samples.shape[0] != grid.size:
        raise ValueError("samples must cover the grid")
    if kind != "heat":
        raise ValueError("sampled inputs support the heat maximal function only")
    if alpha != 0.0:
        raise ValueError("sampled inputs support alpha = 0 only")
    support = np.any(np.abs(samples) > 0, axis=1)
    if not np.any(support):
        return 0.0
    ys = grid.points[support]
    wf = grid.weights[support, None] * samples[support]  # (m, d)
    xs = grid.points
    sup = B.norm(samples)
    for t in times.nodes:
        if grid.n == 1:
            W = heat_kernel(xs[:, None], ys[None, :], t, grid.n)
        else:
            W = heat_kernel(xs[:, None, :], ys[None, :, :], t, grid.n)
        sup = np.maximum(sup, B.norm(W @ wf))
    return float(np.sum(grid.weights * sup))


@dataclass(frozen=True)
class BallSpec:
    """Family of balls for BMO/Carleson sweeps: centers on a lattice of
    given spacing/extent; per center, oscillation radii rho(a) 2^{-m} and
    size radii rho(a) 2^{m} for m = 0..depth."""

    spacing: float = 0.5
    extent: float = 6.0
    depth: int = 3

    def __post_init__(self):
        if self.spacing <= 0 or self.extent <= 0:
            raise ValueError("spacing and extent must be positive")
        if self.depth < 0:
            raise ValueError("ladder depth must be nonnegative")

    @property
    def centers(self) -> np.ndarray:
        m = int(math.floor(self.extent / self.spacing))
        return self.spacing * np.arange(-m, m + 1)

    def balls(self):
        """(center, radius, needs_oscillation) triples."""
        out = []
        for a in self.centers:
            rho = float(critical_radius(a))
            for m in range(self.depth + 1):
                out.append((float(a), rho * 2.0 ** (-m), True))
                out.append((float(a), rho * 2.0 ** m, False))
        return out


def bmo_norm(samples, B: BanachModel, grid: SpatialGrid, balls: BallSpec) -> float:
    """Max over the ball family of mean oscillation (r < rho(a)) or mean
    size (r >= rho(a)); averages over interior lattice points weighted by
    quadrature mass.  Balls without interior points are skipped (with a
    single warning reporting how many)."""
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    if samples.shape[0] != grid.size:
        raise ValueError("samples must cover the grid")
    if not np.all(np.isfinite(samples)):
        raise ValueError("samples must be finite")
    w = grid.weights
    best = 0.0
    skipped = 0
    for a, r, oscillation in balls.balls():
        mask = _distances(grid, a) < r
        mass = float(np.sum(w[mask]))
        if mass == 0.0:
            skipped += 1
            continue
        wm = w[mask] / mass
        sub = samples[mask]
        if oscillation:
            mean = wm @ sub
            val = float(wm @ B.norm(sub - mean))
        else:
            val = float(wm @ B.norm(sub))
        best = max(best, val)
    if skipped:
        warnings.warn(f"skipped {skipped} balls without interior lattice points")
    return best


def _gfield(f: HermiteExpansion, alpha: float, grid: SpatialGrid, times: TimeGrid):
    if f.d != 1:
        raise ValueError("area/Carleson functionals take scalar-valued inputs")
    return gfunction(f, alpha, grid, times)


def area_integral(
    f: HermiteExpansion,
    x,
    alpha: float,
    grid: SpatialGrid,
    times: TimeGrid,
    field: TimeField | None = None,
) -> float:
    """Square function over the cone {|x - y| < t}: the integral of
    |t d/dt P_t f(y)|^2 dy dt / t^{n+1}, square-rooted.  Pass a
    precomputed `field` (from gfunction) when sweeping many x."""
    if field is None:
        field = _gfield(f, alpha, grid, times)
    dist = _distances(grid, x)
    t = times.nodes
    cone = dist[:, None] < t[None, :]  # (size, N)
    g2 = field.values[:, :, 0] ** 2
    wy = grid.weights[:, None]
    wt = (times.weights * t ** (-grid.n))[None, :]
    return math.sqrt(float(np.sum(np.where(cone, g2 * wy * wt, 0.0))))


def carleson_functional(
    f: HermiteExpansion,
    x,
    alpha: float,
    balls: BallSpec,
    grid: SpatialGrid,
    times: TimeGrid,
    field: TimeField | None = None,
) -> float:
    """sup over family balls containing x of the normalized box integral
    (1/|B| int_0^{r} int_B |t d/dt P_t f(y)|^2 dy dt/t)^{1/2}."""
    if field is None:
        field = _gfield(f, alpha, grid, times)
    g2 = field.values[:, :, 0] ** 2
    w = grid.weights
    t = times.nodes
    best = 0.0
    px = np.asarray(x, dtype=float)
    for a, r, _ in balls.balls():
        if grid.n == 1:
            inside_x = abs(float(px) - a) < r
        else:
            inside_x = bool(np.linalg.norm(px - a) < r)
        if not inside_x:
            continue
        mask = _distances(grid, a) < r
        mass = float(np.sum(w[mask]))
        if mass == 0.0:
            continue
        tmask = t < r
        if not np.any(tmask):
            continue
        box = float(
            np.sum(g2[np.ix_(mask, tmask)] * w[mask, None] * times.weights[None, tmask])
        )
        best = max(best, math.sqrt(box / mass))
    return best
