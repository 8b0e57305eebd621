import math

import numpy as np
import pytest

from shlab.errors import DegenerateError, DomainError, EmptyRegionError
from shlab.exponents import ProblemParams, compute_exponents, p_joseph_lundgren
from shlab.harness import (
    RateFit,
    default_grid,
    dense_oracle,
    fit_rate,
    inner_weighted_sup,
    outer_sup,
    run_corollary_small_b,
    run_l2_stability,
    run_psik_stability,
    run_theorem_half_l,
    run_theorem_mth2,
    slope_verdict,
    snapshot_times,
)
from shlab.nonlinear import InitialDataSpec
from shlab.radial_pde import LogGrid, RadialField
from shlab.semigroup import phi


def test_fit_rate_exact_power_law():
    t = np.geomspace(1.0, 1e4, 20)
    series = np.column_stack([t, 7.0 * t**-2.5])
    fit = fit_rate(series, (1.0, 1e4))
    assert fit.slope == pytest.approx(-2.5, abs=1e-12)
    assert fit.rms_residual < 1e-12
    assert fit.n_samples == 20


def test_fit_rate_with_multiplicative_noise():
    rng = np.random.default_rng(0)
    t = np.geomspace(1.0, 1e4, 40)
    vals = t ** (-1 / 3) * (1.0 + 0.01 * rng.standard_normal(40))
    fit = fit_rate(np.column_stack([t, vals]), (1.0, 1e4))
    assert abs(fit.slope + 1 / 3) <= 0.02


def test_fit_rate_degenerate_inputs():
    t = np.array([1.0, 2.0, 4.0])
    with pytest.raises(DegenerateError):
        fit_rate(np.column_stack([t, t]), (1.0, 4.0))
    t4 = np.array([1.0, 2.0, 4.0, 8.0])
    with pytest.raises(DegenerateError):
        fit_rate(np.column_stack([t4, np.array([1.0, 0.5, -0.1, 0.2])]), (1.0, 8.0))


def test_inner_sup_on_model_weight_profile(exps117):
    # w = phi_sigma(., t) t^(-ell/2) has r^sigma w = t^((sigma-ell)/2) inside
    grid = LogGrid(math.log(1e-3), math.log(1e3), 512)
    t, ell = 4.0, 5.0
    w = phi(grid.r, t, exps117.sigma) * t ** (-ell / 2)
    f = RadialField(grid, np.exp(exps117.sigma * grid.s) * w, exps117.sigma, t)
    assert inner_weighted_sup(f, t) == pytest.approx(2.0 ** (exps117.sigma - ell), rel=1e-10)


def test_sups_zero_field(exps117, medium_grid):
    f = RadialField(medium_grid, np.zeros(medium_grid.m_points), exps117.sigma, 1.0)
    assert inner_weighted_sup(f, 2.0) == 0.0
    assert outer_sup(f, 2.0) == 0.0


def test_inner_sup_of_v_infinity(exps117):
    grid = LogGrid(math.log(1e-3), math.log(1e3), 2048)
    w = exps117.L * grid.r ** (-exps117.m)
    f = RadialField(grid, np.exp(exps117.sigma * grid.s) * w, exps117.sigma, 0.0)
    t = 9.0
    # sup of the increasing profile r^(sigma-m) sits at the last node <= sqrt(t)
    expect = exps117.L * t ** ((exps117.sigma - exps117.m) / 2)
    got = inner_weighted_sup(f, t)
    node_slack = math.exp(-(exps117.sigma - exps117.m) * grid.h)
    assert expect * node_slack * (1 - 1e-12) <= got <= expect * (1 + 1e-12)


def test_empty_region_error(exps117, medium_grid):
    f = RadialField(medium_grid, np.ones(medium_grid.m_points), exps117.sigma, 0.0)
    with pytest.raises(EmptyRegionError):
        inner_weighted_sup(f, 1e12)
    with pytest.raises(EmptyRegionError):
        outer_sup(f, 1e-12)


def test_dense_oracle_identity_and_constants(small_grid, exps117):
    prop = dense_oracle(small_grid, 11, exps117.sigma, ("neumann", "neumann"))
    rng = np.random.default_rng(1)
    W0 = rng.random(64)
    np.testing.assert_allclose(prop.apply(W0, 0.0), W0, rtol=1e-12)
    np.testing.assert_allclose(prop.apply(np.ones(64), 3.0), 1.0, atol=1e-9)


def test_dense_oracle_rejects_large_grids(exps117):
    g = LogGrid(math.log(1e-2), math.log(1e2), 256)
    with pytest.raises(DomainError):
        dense_oracle(g, 11, exps117.sigma)


def test_dense_oracle_dirichlet_affine_term(small_grid, exps117):
    # pinned tail value enters through the variation-of-constants term:
    # compare against brute-force stepping with tiny dt
    from shlab.radial_pde import assemble_hardy_operator, step_implicit

    prop = dense_oracle(small_grid, 11, exps117.sigma, ("neumann", "dirichlet"))
    op = assemble_hardy_operator(small_grid, 11, exps117.sigma, ("neumann", "dirichlet"))
    W0 = np.exp(-((small_grid.s - 1.0) ** 2) / 4.0) + 0.3
    f = RadialField(small_grid, W0.copy(), exps117.sigma, 0.0)
    for _ in range(20000):
        f = step_implicit(f, op, None, 5e-6)
    ref = prop.apply(W0, 0.1)
    assert np.max(np.abs(f.W - ref)) / np.max(np.abs(ref)) < 1e-4
    assert ref[-1] == W0[-1]


def test_half_l_remark_inner_series_does_not_decay(exps117):
    # tail exponent at or below sigma: the weighted inner sup stays flat
    rep_in, rep_out = run_theorem_half_l(11, 7.0, 2.0, 0.1, grid=default_grid(points=1024))
    assert rep_in.fit.slope >= -0.05
    assert rep_in.verdict == "PASS"
    assert rep_out.theory == pytest.approx(-1.0)


def test_half_l_scaling_invariance(exps117):
    grid = default_grid(points=1024)
    window = (10.0, 1e3)
    slopes = {}
    for b in (0.1, 0.02):
        rep_in, rep_out = run_theorem_half_l(11, 7.0, 5.0, b, grid=grid, window=window)
        slopes[b] = (rep_in.fit.slope, rep_out.fit.slope)
    assert abs(slopes[0.1][0] - slopes[0.02][0]) < 0.05
    assert abs(slopes[0.1][1] - slopes[0.02][1]) < 0.05


def test_half_l_rejects_out_of_range_ell():
    with pytest.raises(DomainError):
        run_theorem_half_l(11, 7.0, 0.2, 0.1)  # below 2/(p-1)
    with pytest.raises(DomainError):
        run_theorem_half_l(11, 7.0, 6.9, 0.1)  # above n - sigma


def test_half_l_zero_amplitude_not_applicable():
    rep_in, rep_out = run_theorem_half_l(11, 7.0, 5.0, 0.0)
    assert rep_in.verdict == "NotApplicable"
    assert rep_out.verdict == "NotApplicable"


def test_half_l_inconclusive_at_joseph_lundgren_boundary():
    p = p_joseph_lundgren(11)
    rep_in, rep_out = run_theorem_half_l(11, p, 5.0, 0.1, grid=default_grid(points=1024),
                                         window=(10.0, 1e3))
    assert rep_in.verdict == "Inconclusive"
    assert rep_out.verdict == "Inconclusive"


def test_mth2_zero_amplitude():
    assert run_theorem_mth2(11, 7.0, 0.0).verdict == "NotApplicable"


def test_small_b_sigma_case_contract(exps117):
    # borderline tail: unbounded growth claim, operationalized as a factor-2
    # over the window; the measured (ln t)^(1/12)-type growth is reported and
    # the verdict must follow the stated rule either way
    rep = run_corollary_small_b(11, 7.0, None, grid=default_grid(points=1024),
                                window=(1e2, 1e4))
    m = rep.measurements
    assert m["strictly_increasing"]
    assert m["barrier_violation"] <= m["barrier_tolerance"]
    assert m["growth_ratio"] > 1.0
    expected = "PASS" if m["growth_ratio"] >= 2.0 else "FAIL"
    assert rep.verdict == expected


def test_l2_stability_zero_amplitude():
    rep = run_l2_stability(11, 7.0, InitialDataSpec.annulus(0.0, 1.0, 2.0))
    assert rep.verdict == "NotApplicable"


def test_l2_tail_mode_decays():
    rep = run_l2_stability(11, 7.0, InitialDataSpec.l2_tail(0.1, 100.0),
                           grid=default_grid(points=1024))
    assert rep.verdict == "PASS"
    assert rep.measurements["final_over_initial"] <= 0.5


def test_psik_zero_gap_not_applicable():
    rep = run_psik_stability(11, 7.0, 1.0, spec=InitialDataSpec.psi_k_gap(1.0, b=0.0))
    assert rep.verdict == "NotApplicable"


def test_report_verdict_recomputable_from_series(exps117):
    # verdicts are pure functions of the stored series
    rep = run_l2_stability(11, 7.0, InitialDataSpec.annulus(0.1, 1.0, 2.0),
                           grid=default_grid(points=1024))
    refit = fit_rate(rep.series, rep.fit.window)
    assert refit.slope == pytest.approx(rep.fit.slope, rel=1e-12)
    assert slope_verdict(refit, rep.theory, rep.tolerance) == rep.verdict

    rep2 = run_theorem_mth2(11, 7.0, 0.1, grid=default_grid(points=1024))
    s = rep2.series
    ratios = (s[-1, 1] / s[0, 1], s[-1, 2] / s[0, 2])
    assert ratios[0] == pytest.approx(rep2.measurements["inner_ratio"], rel=1e-12)


def test_oracle_error_decreases_monotonically_with_dt(small_grid, exps117):
    from shlab.radial_pde import assemble_hardy_operator, step_implicit

    op = assemble_hardy_operator(small_grid, 11, exps117.sigma, ("neumann", "neumann"))
    prop = dense_oracle(small_grid, 11, exps117.sigma, ("neumann", "neumann"))
    W0 = np.exp(-((small_grid.s - 1.0) ** 2) / (2 * 1.5**2))
    ref = prop.apply(W0, 0.05)

    def err(dt):
        f = RadialField(small_grid, W0.copy(), exps117.sigma, 0.0)
        for _ in range(round(0.05 / dt)):
            f = step_implicit(f, op, None, dt)
        return np.max(np.abs(f.W - ref))

    errors = [err(dt) for dt in (2e-3, 1e-3, 5e-4, 2.5e-4)]
    assert all(a > b for a, b in zip(errors, errors[1:]))


def test_rate_fit_serialization():
    fit = RateFit(slope=-2.5, intercept=1.0, window=(10.0, 1e4), rms_residual=0.01, n_samples=20)
    d = fit.as_dict()
    assert d["slope"] == -2.5 and d["window"] == [10.0, 1e4]
