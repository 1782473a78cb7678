"""Acceptance gate: one test per criterion, each printing a single
PASS/FAIL line (written through the capture so it always reaches the
terminal)."""

import math
import time

import numpy as np
import pytest

from hermlp.basis import (
    HermiteExpansion,
    SpatialGrid,
    hermite_derivative,
    hermite_eval,
)
from hermlp.gamma import (
    BanachModel,
    DiscreteGammaOperator,
    TimeGrid,
    gamma_norm_hilbert,
    gamma_norm_mc,
    h_norm,
    rank_one,
)
from hermlp.kernels import ShiftedOperator, g_kernel, heat_kernel, poisson_kernel
from hermlp.semigroups import gfunction, gfunction_l2_sq
from hermlp.spaces import (
    bmo_norm,
    BallSpec,
    critical_radius,
    h1_norm,
    make_random_atom,
    validate_atom,
)
from hermlp.verify import (
    check_eigen_ladder,
    check_operator_identities,
    check_polarization,
    equivalence_suite,
    kernel_bound_ratio,
)


@pytest.fixture
def report(capfd):
    def _report(number, ok, detail):
        with capfd.disabled():
            print(f"criterion {number}: {'PASS' if ok else 'FAIL'} — {detail}")

    return _report


def test_criterion_1_eigen_ladder(report):
    start = time.perf_counter()
    r1 = check_eigen_ladder(20)
    # n = 2: tensor modes k1 + k2 <= 20 on a coarse planar lattice
    xs = np.linspace(-6.0, 6.0, 13)
    worst2 = 0.0
    tables = {k: np.asarray(hermite_eval(k, xs)) for k in range(23)}

    def second_derivative(k):
        up = (
            math.sqrt(2 * k) * hermite_derivative(k - 1, xs)
            if k > 0
            else np.zeros_like(xs)
        )
        down = -math.sqrt(2 * k + 2) * hermite_derivative(k + 1, xs)
        return 0.5 * (up + down)

    d2 = {k: second_derivative(k) for k in range(21)}
    for k1 in range(21):
        for k2 in range(21 - k1):
            h = tables[k1][:, None] * tables[k2][None, :]
            lap = (
                d2[k1][:, None] * tables[k2][None, :]
                + tables[k1][:, None] * d2[k2][None, :]
            )
            x2 = xs[:, None] ** 2 + xs[None, :] ** 2
            res = -lap + x2 * h - (2 * (k1 + k2) + 2) * h
            worst2 = max(worst2, float(np.max(np.abs(res))))
    elapsed = time.perf_counter() - start
    worst = max(r1.computed, worst2)
    ok = worst <= 1e-6 and elapsed < 10.0
    report(1, ok, f"eigen/ladder residual {worst:.3e} (n=1,2), {elapsed:.1f}s")
    assert ok


def test_criterion_2_mehler_vs_spectral(report):
    start = time.perf_counter()
    xs = np.linspace(-6.0, 6.0, 25)
    T = np.asarray([hermite_eval(k, xs) for k in range(61)])
    worst = 0.0
    for t in (0.1, 0.25, 0.5, 1.0, 5.0):
        lam = np.exp(-t * (2 * np.arange(61) + 1))
        S = (T * lam[:, None]).T @ T
        W = heat_kernel(xs[:, None], xs[None, :], t)
        # comparisons switch to absolute once both sides are negligible
        big = (np.abs(S) > 1e-8) & (np.abs(W) > 1e-8)
        if np.any(big):
            worst = max(worst, float(np.max(np.abs(W - S)[big] / np.abs(S)[big])))
        if np.any(~big):
            worst = max(worst, float(np.max(np.abs(W - S)[~big])))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-8 and elapsed < 30.0
    report(2, ok, f"heat vs K=60 spectral sum, worst error {worst:.3e}, {elapsed:.1f}s")
    assert ok


def test_criterion_3_subordination(report):
    start = time.perf_counter()
    grid = SpatialGrid(R=12.0, h=0.02, n=1)
    ys, wy = grid.points, grid.weights
    xs = np.linspace(-4.0, 4.0, 5)
    tables = {k: np.asarray(hermite_eval(k, ys)) for k in range(11)}
    hx = {k: np.asarray(hermite_eval(k, xs)) for k in range(11)}
    worst = 0.0
    for alpha in (0.0, 2.0):
        op = ShiftedOperator(alpha, 1)
        for t in (0.1, 0.5, 1.0, 2.0, 5.0):
            P = poisson_kernel(xs[:, None], ys[None, :], t, op)
            G = g_kernel(xs[:, None], ys[None, :], t, op)
            for k in range(11):
                r = math.sqrt(2 * k + 1 + alpha)
                wantP = math.exp(-t * r) * hx[k]
                wantG = -t * r * math.exp(-t * r) * hx[k]
                for got, want in ((P @ (wy * tables[k]), wantP),
                                  (G @ (wy * tables[k]), wantG)):
                    scale = np.abs(want)
                    err = np.abs(got - want) / np.where(scale > 1e-10, scale, 1.0)
                    worst = max(worst, float(np.max(err)))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-6 and elapsed < 60.0
    report(3, ok, f"poisson/g spectral actions, worst rel {worst:.3e}, {elapsed:.1f}s")
    assert ok


def test_criterion_4_polarization(report):
    start = time.perf_counter()
    e0 = HermiteExpansion.single(0)
    r = check_polarization(e0, e0)
    same = abs(4.0 * r.computed - 1.0)
    e1 = HermiteExpansion.single(1)
    r01 = check_polarization(e0, e1)
    cross = abs(r01.computed)
    elapsed = time.perf_counter() - start
    ok = same <= 1e-3 and abs(r.computed - 0.25) <= 1e-4 and cross <= 1e-6
    ok = ok and elapsed < 30.0
    report(4, ok, f"4*<Ga,Gf> off by {same:.2e}, orthogonal pair {cross:.2e}, {elapsed:.1f}s")
    assert ok


def test_criterion_5_plancherel(report):
    start = time.perf_counter()
    grid = SpatialGrid(R=12.0, h=0.02, n=1)
    times = TimeGrid()
    rng = np.random.default_rng(5150)
    worst_quad = 0.0
    worst_exact = 0.0
    for _ in range(10):
        modes = rng.choice(31, size=rng.integers(2, 8), replace=False)
        e = HermiteExpansion(
            n=1, d=1, K=30,
            coeffs={(int(k),): [float(rng.normal())] for k in modes},
        )
        fld = gfunction(e, 0.0, grid, times)
        num = math.sqrt(float(
            np.einsum("xtc,x,t->", fld.values ** 2, grid.weights, times.weights)
        ))
        ratio = num / e.l2_norm()
        worst_quad = max(worst_quad, abs(ratio - 0.5))
        worst_exact = max(
            worst_exact, abs(gfunction_l2_sq(e, 0.0) / e.l2_norm_sq() - 0.25)
        )
    elapsed = time.perf_counter() - start
    ok = worst_quad <= 1e-3 and worst_exact <= 1e-12
    report(
        5, ok,
        f"quadrature ratio off by {worst_quad:.2e}, spectral by {worst_exact:.1e}, "
        f"{elapsed:.1f}s",
    )
    assert ok


def test_criterion_6_operator_identity(report):
    start = time.perf_counter()
    r = check_operator_identities(15)
    elapsed = time.perf_counter() - start
    ok = r.passed and r.computed <= 1e-10 and elapsed < 20.0
    report(6, ok, f"ladder/Riesz identities, max discrepancy {r.computed:.2e}, {elapsed:.1f}s")
    assert ok


def test_criterion_7_gamma_norm(report):
    start = time.perf_counter()
    times = TimeGrid()
    rng = np.random.default_rng(99)
    m = rng.normal(size=(3, times.N)) * np.exp(-times.nodes)
    T = DiscreteGammaOperator(BanachModel(3, 2.0), times, m)
    exact_sq = gamma_norm_hilbert(T) ** 2
    hilbert_ok = True
    for seed in range(10):
        est, err = gamma_norm_mc(T, 200000, seed=seed)
        if abs(est * est - exact_sq) > 3 * err:
            hilbert_ok = False
    prof = times.nodes * np.exp(-times.nodes)
    b = np.array([1.0, -2.0, 0.5])
    rank_ok = True
    for q in (1.5, 2.0, 4.0):
        B = BanachModel(3, q)
        est, _ = gamma_norm_mc(rank_one(prof, b, B, times), 200000, seed=123)
        target = h_norm(prof, times) * float(B.norm(b))
        if abs(est - target) > 0.02 * target:
            rank_ok = False
    elapsed = time.perf_counter() - start
    ok = hilbert_ok and rank_ok and elapsed < 60.0
    report(
        7, ok,
        f"Hilbert MC within 3 sigma over 10 seeds: {hilbert_ok}; "
        f"rank-one within 2%: {rank_ok}; {elapsed:.1f}s",
    )
    assert ok


def test_criterion_8_envelopes(report):
    start = time.perf_counter()
    xs = np.linspace(-4.0, 4.0, 65)
    ts = np.geomspace(0.1, 2.0, 6)
    results = {}
    ok = True
    for kind in ("heat", "poisson", "g", "gH", "ladder", "gradient"):
        r = kernel_bound_ratio(kind, xs, ts)
        results[kind] = r.computed
        ok = ok and r.passed
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 120.0
    sups = ", ".join(f"{k}={v:.2f}" for k, v in results.items())
    report(8, ok, f"envelope constants stable: {sups}; {elapsed:.1f}s")
    assert ok


def test_criterion_9_function_spaces(report):
    start = time.perf_counter()
    rho_ok = (
        critical_radius(0.0) == 0.5
        and critical_radius(1.0) == 0.5
        and critical_radius(3.0) == 0.25
    )
    grid = SpatialGrid(R=8.0, h=0.05, n=1)
    balls = BallSpec(spacing=0.5, extent=6.0, depth=3)
    bmo_ok = abs(
        bmo_norm(np.ones((grid.size, 1)), BanachModel(1, 2.0), grid, balls) - 1.0
    ) <= 1e-6
    hgrid = SpatialGrid(R=12.0, h=0.02, n=1)
    htimes = TimeGrid(1e-3, 10.0, 12)
    h1_val = h1_norm(HermiteExpansion.single(0), BanachModel(1, 2.0), hgrid, htimes)
    h1_ok = abs(h1_val - 1.8828) <= 1e-3
    # 50-atom uniform bound, stable when the family is doubled
    agrid = SpatialGrid(R=6.0, h=0.008, n=1)
    rng = np.random.default_rng(2024)
    norms = []
    for i in range(100):
        kind = "cancel" if i % 2 == 0 else "local"
        a = make_random_atom(rng, agrid, kind)
        assert validate_atom(a)[0]
        norms.append(h1_norm(a, BanachModel(1, 2.0), agrid, htimes))
    c50, c100 = max(norms[:50]), max(norms)
    atoms_ok = np.isfinite(c100) and c100 <= 1.1 * c50
    elapsed = time.perf_counter() - start
    ok = rho_ok and bmo_ok and h1_ok and atoms_ok and elapsed < 300.0
    report(
        9, ok,
        f"rho: {rho_ok}, bmo(1)=1: {bmo_ok}, h1(h_0)={h1_val:.4f}, "
        f"atom bound {c100:.2f} (stable: {atoms_ok}); {elapsed:.1f}s",
    )
    assert ok


def test_criterion_10_equivalence_shadow(report):
    start = time.perf_counter()
    B = BanachModel(1, 2.0)
    grid = SpatialGrid(R=12.0, h=0.02, n=1)
    rng = np.random.default_rng(77)
    atoms = [make_random_atom(rng, grid, "cancel", center_range=2.0) for _ in range(6)]
    ones = np.ones(grid.size)
    h0 = np.asarray(hermite_eval(0, grid.points))
    clipped = np.clip(grid.points, -1.0, 1.0)
    spreads = {}
    stab = {}
    for space, fam in (("H1", atoms), ("BMO", [ones, h0, clipped])):
        maxr = {}
        for N in (16, 32):
            r = equivalence_suite(space, fam, B, grid=grid,
                                  times=TimeGrid(1e-3, 20.0, N))
            maxr[N] = r.computed["max_ratio"]
            if N == 32:
                spreads[space] = r.computed["max_ratio"] / r.computed["min_ratio"]
        stab[space] = abs(maxr[32] - maxr[16]) / maxr[32]
    elapsed = time.perf_counter() - start
    ok = (
        all(s <= 25.0 for s in spreads.values())
        and all(s <= 0.10 for s in stab.values())
    )
    report(
        10, ok,
        f"H1 spread {spreads['H1']:.2f} (drift {stab['H1']:.1%}), "
        f"BMO spread {spreads['BMO']:.2f} (drift {stab['BMO']:.1%}); {elapsed:.1f}s",
    )
    assert ok
