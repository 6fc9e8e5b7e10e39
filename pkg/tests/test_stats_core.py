import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from mmtc_outage.stats_core import (
    AtomicDistribution,
    DegenerateKernelError,
    DegenerateModelError,
    WeightedBernoulliTerm,
    bell_complete,
    build_model,
    cf_density,
    collect_power_coefficients,
    exact_pmf,
    gaussian_partial_moment,
    gram_charlier,
    hermite,
    jsd,
    lyapunov_statistic,
    sup_cdf_distance,
    tail_probability,
    truncated_kernel,
)


# ---------------------------------------------------------------------------
# polynomial building blocks


@pytest.mark.parametrize(
    "n,x,expected",
    [
        (0, 0.7, 1.0),
        (1, 0.7, 0.7),
        (2, 2.0, 3.0),          # x^2 - 1
        (3, 2.0, 2.0),          # x^3 - 3x
        (4, 1.5, -5.4375),      # x^4 - 6x^2 + 3
        (5, 2.0, -18.0),        # x^5 - 10x^3 + 15x
    ],
)
def test_hermite_hand_values(n, x, expected):
    assert hermite(n, x) == pytest.approx(expected, abs=1e-12)


def test_hermite_vectorized():
    x = np.linspace(-3, 3, 11)
    np.testing.assert_allclose(hermite(4, x), x**4 - 6 * x**2 + 3, atol=1e-10)


def test_bell_numbers():
    # complete Bell polynomial at all-ones arguments gives the Bell numbers
    ones = (1.0, 1.0, 1.0, 1.0, 1.0)
    assert [bell_complete(n, ones) for n in range(1, 6)] == [1, 2, 5, 15, 52]


def test_bell_hand_value_order5():
    args = (0.1, 0.2, 0.05, 0.01, 0.002)
    # x1^5 + 10 x1^3 x2 + 10 x1^2 x3 + 15 x1 x2^2 + 5 x1 x4 + 10 x2 x3 + x5
    expected = 1e-5 + 10 * 1e-3 * 0.2 + 10 * 0.01 * 0.05 + 15 * 0.1 * 0.04 \
        + 5 * 0.1 * 0.01 + 10 * 0.2 * 0.05 + 0.002
    assert bell_complete(5, args) == pytest.approx(expected, rel=1e-12)


def test_collected_series_coefficients():
    # series sum_n b_n He_n(x) regrouped as coefficients of powers of x
    b = (1.0, 0.1, 0.2, 0.05, 0.01, 0.002)
    a = collect_power_coefficients(b)
    expected = [
        1 - 0.2 + 3 * 0.01,
        0.1 - 3 * 0.05 + 15 * 0.002,
        0.2 - 6 * 0.01,
        0.05 - 10 * 0.002,
        0.01,
        0.002,
    ]
    np.testing.assert_allclose(a, expected, atol=1e-14)
    # cross-check: evaluate both forms at a few points
    for x in (-1.3, 0.2, 2.4):
        series = sum(bn * hermite(n, x) for n, bn in enumerate(b))
        poly = sum(c * x**k for k, c in enumerate(a))
        assert poly == pytest.approx(series, rel=1e-12)


# ---------------------------------------------------------------------------
# moments and cumulants


@pytest.mark.parametrize("p", [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0])
def test_single_term_cumulant_closed_forms(p):
    model = build_model([(1.0, p)], max_order=5)
    q = 1 - p
    expected = [
        p,
        p * q,
        p * q * (1 - 2 * p),
        p * q * (1 - 6 * p + 6 * p * p),
        p * q * (1 - 2 * p) * (1 - 12 * p + 12 * p * p),
    ]
    np.testing.assert_allclose(model.cumulants, expected, atol=1e-12)


def test_cumulants_scale_with_weight():
    a = 2.5
    m1 = build_model([(1.0, 0.3)], max_order=5)
    m2 = build_model([(a, 0.3)], max_order=5)
    for n in range(1, 6):
        assert m2.cumulant(n) == pytest.approx(a**n * m1.cumulant(n), rel=1e-12)


def test_spec_worked_examples():
    m = build_model([(2.0, 0.5)])
    assert m.mean == pytest.approx(1.0)
    assert m.variance == pytest.approx(1.0)
    assert m.support_bound == pytest.approx(2.0)

    assert build_model([(1.0, 0.5)], max_order=3).cumulant(3) == pytest.approx(0.0, abs=1e-15)

    m = build_model([(1.0, 0.3), (1.0, 0.3)])
    assert m.mean == pytest.approx(0.6)
    assert m.variance == pytest.approx(0.42)


@settings(max_examples=50, deadline=None)
@given(
    st.lists(
        st.tuples(
            st.floats(0.01, 10.0, allow_nan=False),
            st.floats(0.0, 1.0, allow_nan=False),
        ),
        min_size=1,
        max_size=12,
    )
)
def test_cumulant_additivity(terms):
    # cumulants of a sum of independent terms = sum of per-term cumulants
    whole = build_model(terms, max_order=5)
    parts = [build_model([t], max_order=5) for t in terms]
    for n in range(1, 6):
        total = sum(pm.cumulant(n) for pm in parts)
        scale = max(1.0, abs(total))
        assert abs(whole.cumulant(n) - total) < 1e-9 * scale


def test_empty_model_is_degenerate_point_mass():
    m = build_model([])
    assert m.mean == 0.0
    assert m.variance == 0.0
    with pytest.raises(DegenerateModelError):
        gram_charlier(m, order=0)


# ---------------------------------------------------------------------------
# exact enumeration


def test_exact_pmf_two_fair_terms():
    d = exact_pmf([(1.0, 0.5), (2.0, 0.5)])
    np.testing.assert_allclose(d.locations, [0.0, 1.0, 2.0, 3.0])
    np.testing.assert_allclose(d.masses, [0.25, 0.25, 0.25, 0.25])


def test_exact_pmf_always_on():
    d = exact_pmf([(1.0, 1.0)])
    np.testing.assert_allclose(d.locations, [1.0])
    np.testing.assert_allclose(d.masses, [1.0])


def test_exact_pmf_no_terms():
    d = exact_pmf([])
    np.testing.assert_allclose(d.locations, [0.0])
    np.testing.assert_allclose(d.masses, [1.0])


def test_exact_pmf_merges_coincident_sums():
    # 1 + 2 == 3, so the four patterns collapse to atoms {0,1,2,3,4,5,6}
    d = exact_pmf([(1.0, 0.5), (2.0, 0.5), (3.0, 0.5)])
    assert d.locations.size == 7
    assert d.masses[3] == pytest.approx(0.25)  # {3} and {1,2}


def test_exact_pmf_term_limit():
    terms = [(1.0, 0.5)] * 23
    with pytest.raises(ValueError, match="22"):
        exact_pmf(terms)


def test_exact_pmf_mean_matches_model():
    rng = np.random.default_rng(5)
    terms = list(zip(rng.uniform(0.1, 2.0, 10), rng.uniform(0.05, 0.95, 10)))
    d = exact_pmf(terms)
    m = build_model(terms)
    assert d.mean() == pytest.approx(m.mean, rel=1e-12)
    assert d.masses.sum() == pytest.approx(1.0, abs=1e-12)


# ---------------------------------------------------------------------------
# characteristic-function inversion


def test_cf_density_single_term_masses():
    d = cf_density([(1.0, 0.3)], 1024)
    w = d.bin_width
    assert d.masses[int(0.0 // w)] == pytest.approx(0.7, abs=1e-3)
    assert d.masses[int(1.0 // w)] == pytest.approx(0.3, abs=1e-3)


def test_cf_density_grid_shape():
    d = cf_density([(1.0, 0.5), (0.5, 0.2)], 256)
    assert d.num_bins == 256
    assert d.lower == 0.0
    assert d.upper == pytest.approx(1.5 * (1 + 1 / 256))
    assert d.masses.sum() == pytest.approx(1.0, abs=1e-12)


def test_cf_density_rejects_bad_grid():
    with pytest.raises(ValueError, match="power of two"):
        cf_density([(1.0, 0.5)], 1000)
    with pytest.raises(ValueError, match="power of two"):
        cf_density([(1.0, 0.5)], 32)


def test_cf_density_empty_terms():
    d = cf_density([], 64)
    assert d.masses[0] == pytest.approx(1.0)


def test_cf_matches_enumeration_12_terms():
    rng = np.random.default_rng(42)
    terms = list(zip(10.0 ** rng.uniform(-3, 0, 12), rng.uniform(0.05, 0.5, 12)))
    exact = exact_pmf(terms)
    grid = cf_density(terms, 1 << 16)
    binned = exact.discretize(grid.lower, grid.upper, grid.num_bins)
    assert sup_cdf_distance(binned, grid) < 1e-3


@settings(max_examples=10, deadline=None)
@given(st.integers(2, 8), st.integers(0, 2**32 - 1))
def test_cf_matches_enumeration_property(n_terms, seed):
    rng = np.random.default_rng(seed)
    terms = list(zip(rng.uniform(0.1, 3.0, n_terms), rng.uniform(0.05, 0.95, n_terms)))
    exact = exact_pmf(terms)
    grid = cf_density(terms, 1 << 10)
    binned = exact.discretize(grid.lower, grid.upper, grid.num_bins)
    assert sup_cdf_distance(binned, grid) < 1e-3


def test_cf_density_moments_match_model():
    rng = np.random.default_rng(9)
    terms = list(zip(rng.uniform(0.5, 2.0, 30), rng.uniform(0.1, 0.4, 30)))
    model = build_model(terms)
    d = cf_density(terms, 1 << 12)
    centers = d.grid + 0.5 * d.bin_width
    mean = float(np.dot(centers, d.masses))
    var = float(np.dot((centers - mean) ** 2, d.masses))
    assert mean == pytest.approx(model.mean, rel=1e-3)
    assert var == pytest.approx(model.variance, rel=1e-2)


# ---------------------------------------------------------------------------
# truncated kernel


def test_kernel_symmetric_truncation_mean():
    k = truncated_kernel(0.0, 1.0, -3.0, 3.0)
    assert k.kernel_raw_moments[0] == pytest.approx(0.0, abs=1e-15)


def test_kernel_wide_truncation_is_gaussian():
    k = truncated_kernel(0.0, 1.0, -8.0, 8.0)
    assert k.kernel_cumulants[1] == pytest.approx(1.0, abs=1e-6)


def test_kernel_far_truncation_cumulants():
    # +/-40 sigma: kernel cumulants collapse to the untruncated Gaussian's
    k = truncated_kernel(3.0, 2.0, 3.0 - 80.0, 3.0 + 80.0)
    assert k.kernel_cumulants[0] == pytest.approx(3.0, abs=1e-8)
    assert k.kernel_cumulants[1] == pytest.approx(4.0, abs=1e-8)
    for n in range(3, 6):
        assert k.kernel_cumulants[n - 1] == pytest.approx(0.0, abs=1e-8)


def test_kernel_moments_match_quadrature():
    # kernel_raw_moments[n-1] holds E[X^n]
    mu, sigma, lo, hi = 1.0, 2.0, 0.0, 5.0
    k = truncated_kernel(mu, sigma, lo, hi)
    for n in range(1, 6):
        val, _ = integrate.quad(lambda x, n=n: x**n * k.density(x), lo, hi, limit=200)
        assert k.kernel_raw_moments[n - 1] == pytest.approx(val, abs=1e-8)


@settings(max_examples=25, deadline=None)
@given(
    st.floats(-5, 5),
    st.floats(0.1, 4.0),
    st.floats(-3, 0.5),
    st.floats(1.0, 4.0),
)
def test_kernel_moment_quadrature_property(mu, sigma, lo_off, width):
    lo = mu + lo_off * sigma
    hi = lo + width * sigma
    k = truncated_kernel(mu, sigma, lo, hi)
    val, _ = integrate.quad(lambda x: x**3 * k.density(x), lo, hi, limit=200)
    assert k.kernel_raw_moments[2] == pytest.approx(val, rel=1e-7, abs=1e-8)


def test_kernel_underflow_rejected():
    with pytest.raises(DegenerateKernelError):
        truncated_kernel(0.0, 1.0, 60.0, 70.0)


# ---------------------------------------------------------------------------
# series approximation


def _random_model(seed, n=300, p=0.1, decades=1.0):
    rng = np.random.default_rng(seed)
    weights = 10.0 ** rng.uniform(-decades, 0.0, n)
    return build_model(list(zip(weights, np.full(n, p))), max_order=5)


def test_order0_is_bare_kernel():
    model = _random_model(0)
    approx = gram_charlier(model, order=0)
    np.testing.assert_allclose(approx.an_coeffs, [1, 0, 0, 0, 0, 0], atol=1e-15)
    x = np.linspace(0, model.support_bound, 7)
    np.testing.assert_allclose(approx.density(x), approx.kernel.density(x), rtol=1e-12)


def test_order_above_five_rejected():
    with pytest.raises(ValueError, match="order"):
        gram_charlier(_random_model(1), order=6)


def test_gc_density_integrates_to_one():
    # needs the kernel density to decay inside [0, J]: enough terms and a
    # activity level that keeps the boundaries several sigma from the mean
    for seed in range(3):
        model = _random_model(seed, n=300, p=0.3, decades=3.0)
        for order in (0, 5):
            approx = gram_charlier(model, order=order)
            val, _ = integrate.quad(approx.density, 0.0, model.support_bound, limit=400)
            assert val == pytest.approx(1.0, abs=1e-6)


def test_gc_order5_matches_model_moments():
    # the defining property of the order-N correction: the first N moments
    # of the density agree with the model's moments
    model = _random_model(7, n=200, p=0.15)
    approx = gram_charlier(model, order=5)
    kap = list(model.cumulants)
    mu = [1.0]
    for n in range(1, 6):
        mu.append(
            sum(math.comb(n - 1, m - 1) * kap[m - 1] * mu[n - m] for m in range(1, n + 1))
        )
    for k in range(1, 6):
        val, _ = integrate.quad(
            lambda x, k=k: x**k * approx.density(x), 0.0, model.support_bound, limit=400
        )
        assert val == pytest.approx(mu[k], rel=1e-7)


def test_gc5_closer_than_gc0_in_divergence():
    wins = 0
    for seed in range(10):
        rng = np.random.default_rng(seed)
        terms = list(zip(10.0 ** rng.uniform(-1, 0, 300), np.full(300, 0.1)))
        model = build_model(terms)
        ref = cf_density(terms, 1 << 12)
        j0 = jsd(ref, gram_charlier(model, 0).discretize(ref.lower, ref.upper, ref.num_bins))
        j5 = jsd(ref, gram_charlier(model, 5).discretize(ref.lower, ref.upper, ref.num_bins))
        wins += j5 < j0
    assert wins >= 8


# ---------------------------------------------------------------------------
# partial moments and tails


def test_partial_moment_total_mass():
    assert gaussian_partial_moment(0, -40.0, 40.0) == pytest.approx(1.0, abs=1e-12)


def test_partial_moment_odd_symmetry():
    assert gaussian_partial_moment(1, -40.0, 40.0) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("n", [0, 1, 2, 3, 4, 5])
def test_partial_moment_quadrature(n):
    lo, hi = -1.0, 1.0
    val, _ = integrate.quad(
        lambda x: x**n * math.exp(-0.5 * x * x) / math.sqrt(2 * math.pi), lo, hi
    )
    assert gaussian_partial_moment(n, lo, hi) == pytest.approx(val, abs=1e-10)


def test_partial_moment_rejects_reversed_bounds():
    with pytest.raises(ValueError):
        gaussian_partial_moment(2, 1.0, -1.0)


def test_tail_edges():
    model = _random_model(3, n=60)
    approx = gram_charlier(model, order=5)
    assert tail_probability(approx, -0.5) == 1.0
    assert tail_probability(approx, model.support_bound) == 0.0
    assert tail_probability(approx, model.support_bound * 1.1) == 0.0


def test_tail_closed_form_equals_quadrature():
    rng = np.random.default_rng(17)
    for _ in range(10):
        n = int(rng.integers(12, 21))
        terms = list(zip(10.0 ** rng.uniform(-2, 0, n), rng.uniform(0.05, 0.5, n)))
        model = build_model(terms)
        approx = gram_charlier(model, order=5)
        t = float(rng.uniform(0.0, model.support_bound))
        quad, _ = integrate.quad(approx.density, t, model.support_bound, limit=400)
        closed = tail_probability(approx, t)
        assert closed == pytest.approx(min(max(quad, 0.0), 1.0), abs=1e-8)


def test_tail_monotone_in_threshold():
    model = _random_model(11, n=100)
    approx = gram_charlier(model, order=5)
    ts = np.linspace(-0.1, model.support_bound * 1.05, 40)
    vals = [tail_probability(approx, t) for t in ts]
    assert all(a >= b - 1e-9 for a, b in zip(vals, vals[1:]))


# ---------------------------------------------------------------------------
# divergences


def _unit_grid(masses):
    # atoms on bin lower edges, which the gridding convention maps into the
    # bin itself (bin-center positions would sit on the rounding boundary)
    m = np.asarray(masses, dtype=float)
    return AtomicDistribution(np.arange(m.size, dtype=float), m / m.sum()).discretize(
        0.0, float(m.size), m.size if m.size >= 2 else 2
    )


def test_jsd_identical_is_zero():
    p = _unit_grid([0.2, 0.3, 0.5])
    assert jsd(p, p) == 0.0


def test_jsd_disjoint_is_one():
    from mmtc_outage.stats_core import DiscretizedDistribution

    p = DiscretizedDistribution(0.0, 4.0, np.array([0.5, 0.5, 0.0, 0.0]))
    q = DiscretizedDistribution(0.0, 4.0, np.array([0.0, 0.0, 0.5, 0.5]))
    assert jsd(p, q) == pytest.approx(1.0, abs=1e-12)


def test_jsd_symmetric():
    rng = np.random.default_rng(0)
    a = rng.uniform(0.01, 1, 32)
    b = rng.uniform(0.01, 1, 32)
    p, q = _unit_grid(a), _unit_grid(b)
    assert jsd(p, q) == pytest.approx(jsd(q, p), rel=1e-12)
    assert 0.0 <= jsd(p, q) <= 1.0


def test_jsd_grid_mismatch_rejected():
    p = _unit_grid([0.5, 0.5])
    q = _unit_grid([0.3, 0.3, 0.4])
    with pytest.raises(ValueError, match="grid"):
        jsd(p, q)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_jsd_bounds_property(seed):
    rng = np.random.default_rng(seed)
    a = rng.uniform(0, 1, 16) ** 3 + 1e-12
    b = rng.uniform(0, 1, 16) ** 3 + 1e-12
    v = jsd(_unit_grid(a), _unit_grid(b))
    assert 0.0 <= v <= 1.0


# ---------------------------------------------------------------------------
# normality diagnostic


def test_lyapunov_spec_values():
    assert lyapunov_statistic([(1.0, 0.5)] * 100, 1.0) == pytest.approx(0.2)
    assert lyapunov_statistic([(1.0, 0.5)], 1.0) == pytest.approx(2.0)


def test_lyapunov_iid_scaling():
    # M iid terms: statistic shrinks like 1 / sqrt(M) for eps = 1
    one = lyapunov_statistic([(1.0, 0.3)], 1.0)
    many = lyapunov_statistic([(1.0, 0.3)] * 400, 1.0)
    assert many == pytest.approx(one / 20.0, rel=1e-12)


def test_lyapunov_degenerate():
    with pytest.raises(DegenerateModelError):
        lyapunov_statistic([(1.0, 0.0)], 1.0)


def test_term_validation():
    with pytest.raises(ValueError):
        build_model([(-1.0, 0.5)])
    with pytest.raises(ValueError):
        build_model([(1.0, 1.5)])
    t = WeightedBernoulliTerm(0.5, 0.25)
    assert build_model([t]).mean == pytest.approx(0.125)
