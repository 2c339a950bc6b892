import math

import numpy as np
import pytest
from scipy.integrate import quad

from treeshape import (
    airy_moments,
    apply_fixed_point_step,
    dyck_path,
    excursion_path,
    limit_moments_yule,
    sample_airy_dyck,
    sample_airy_dycks,
    sample_airy_excursion,
    sample_airy_excursions,
    sample_limit_pair,
    sample_limit_pairs,
    sample_limit_via_n,
    toll_vector,
)
from treeshape.limits import MAX_UNROLL_DEPTH, expected_airy_dyck

import oracles


def test_limit_moments_values():
    lm = limit_moments_yule()
    assert lm.var_s == pytest.approx(7 - 2 * math.pi**2 / 3)
    assert lm.var_c == pytest.approx(3 - math.pi**2 / 6 - math.log(2))
    assert lm.cov_sc == pytest.approx(4.5 - math.pi**2 / 3 - math.log(2))
    closed = (27 - 2 * math.pi**2 - 6 * math.log(2)) / math.sqrt(
        2 * (18 - math.pi**2 - 6 * math.log(2)) * (21 - 2 * math.pi**2)
    )
    assert lm.cor_sc == pytest.approx(closed)
    assert lm.cor_sc == pytest.approx(0.98, abs=0.005)
    assert lm.cor_sc == pytest.approx(lm.cov_sc / math.sqrt(lm.var_s * lm.var_c))


def test_toll_vector_values():
    tv = toll_vector(0.5)
    assert tv.b_s == pytest.approx(1 - 2 * math.log(2))
    assert tv.b_c == pytest.approx(-math.log(2))
    # continuity extension at the endpoints
    t0 = toll_vector(0.0)
    assert (t0.b_s, t0.b_c) == (1.0, 1.0)
    t1 = toll_vector(1.0)
    assert (t1.b_s, t1.b_c) == (1.0, 1.0)
    tiny = toll_vector(1e-14)
    assert tiny.b_s == pytest.approx(1.0, abs=1e-11)


def test_toll_vector_identities_and_bounds():
    u = np.linspace(0, 1, 1001)
    tv = toll_vector(u)
    assert np.all(tv.b_s <= 1.0 + 1e-12)
    assert np.all(tv.b_c <= 1.0 + 1e-12)
    np.testing.assert_allclose(
        tv.b_c, tv.b_s / 2 + 0.5 - 2 * np.minimum(u, 1 - u), atol=1e-12
    )


def test_toll_vector_is_centered():
    # both components integrate to zero over (0, 1)
    for comp in (lambda u: toll_vector(u).b_s, lambda u: toll_vector(u).b_c):
        integral, err = quad(comp, 0, 1, limit=200)
        assert abs(integral) < max(1e-9, 10 * err)


def test_toll_second_moments_match_fixed_point_constants():
    # v = (2/3) v + E[b^2] at the fixed point, so E[b^2] = v / 3, and the
    # same for the cross moment; quadrature is the independent route
    lm = limit_moments_yule()
    eb_s2, _ = quad(lambda u: toll_vector(u).b_s ** 2, 0, 1, limit=200)
    eb_c2, _ = quad(lambda u: toll_vector(u).b_c ** 2, 0, 1, limit=200)
    eb_sc, _ = quad(lambda u: toll_vector(u).b_s * toll_vector(u).b_c, 0, 1, limit=200)
    assert eb_s2 == pytest.approx(lm.var_s / 3, rel=1e-8)
    assert eb_c2 == pytest.approx(lm.var_c / 3, rel=1e-8)
    assert eb_sc == pytest.approx(lm.cov_sc / 3, rel=1e-8)


def test_sample_limit_pairs_base_and_errors():
    rng = np.random.default_rng(0)
    s, c = sample_limit_pairs(10, 0, rng)
    assert not s.any() and not c.any()
    with pytest.raises(ValueError):
        sample_limit_pairs(10, MAX_UNROLL_DEPTH + 1, rng)
    with pytest.raises(ValueError):
        sample_limit_pairs(0, 5, rng)
    pair = sample_limit_pair(3, np.random.default_rng(1))
    again = sample_limit_pair(3, np.random.default_rng(1))
    assert pair == again


def test_unrolled_sampler_moments():
    # depth 12 leaves ~(2/3)^12 < 1% relative truncation in the variances
    lm = limit_moments_yule()
    rng = np.random.default_rng(2718)
    s, c = sample_limit_pairs(30000, 12, rng)
    n = s.shape[0]
    assert abs(s.mean()) < 3 * s.std() / math.sqrt(n)
    assert abs(c.mean()) < 3 * c.std() / math.sqrt(n)
    assert s.var(ddof=1) == pytest.approx(lm.var_s, rel=0.03)
    assert c.var(ddof=1) == pytest.approx(lm.var_c, rel=0.03)
    assert np.corrcoef(s, c)[0, 1] == pytest.approx(lm.cor_sc, abs=0.005)


def test_via_n_sampler_moments():
    lm = limit_moments_yule()
    s, c = sample_limit_via_n(30000, 2000, seed=99)
    n = s.shape[0]
    assert abs(s.mean()) < 3 * s.std() / math.sqrt(n)
    assert abs(c.mean()) < 3 * c.std() / math.sqrt(n)
    assert s.var(ddof=1) == pytest.approx(lm.var_s, rel=0.05)
    assert c.var(ddof=1) == pytest.approx(lm.var_c, rel=0.05)
    assert np.corrcoef(s, c)[0, 1] == pytest.approx(lm.cor_sc, abs=0.01)


def test_fixed_point_stationarity():
    # one extra application of the map leaves the moments unchanged
    s, c = sample_limit_via_n(60000, 2000, seed=5)
    rng = np.random.default_rng(55)
    s2, c2 = apply_fixed_point_step(s, c, rng)
    n2 = s2.shape[0]
    for before, after in ((s, s2), (c, c2)):
        se_mean = math.sqrt(before.var() / before.size + after.var() / n2)
        assert abs(before.mean() - after.mean()) < 3 * se_mean
        se_var = math.sqrt(2.0) * max(before.var(), after.var()) * math.sqrt(
            2.0 / min(before.size, n2)
        )
        assert abs(before.var() - after.var()) < 3 * se_var


def test_excursion_path_validity():
    rng = np.random.default_rng(17)
    for m in (2, 16, 1024):
        path = excursion_path(m, rng)
        assert path.heights.shape == (m + 1,)
        assert path.heights[0] == 0.0 and path.heights[m] == 0.0
        assert np.all(path.heights >= 0.0)
    with pytest.raises(ValueError):
        excursion_path(3, rng)
    with pytest.raises(ValueError):
        excursion_path(0, rng)


def test_excursion_sampler_reproducible():
    a = sample_airy_excursion(256, np.random.default_rng(9))
    b = sample_airy_excursion(256, np.random.default_rng(9))
    assert a == b


def test_excursion_sampler_moments():
    rng = np.random.default_rng(123)
    v = sample_airy_excursions(6000, 2**12, rng)
    # discretization biases the mean down ~1.2% at this grid; allow 2.5%
    assert v.mean() == pytest.approx(math.sqrt(math.pi), rel=0.025)
    assert v.var(ddof=1) == pytest.approx((10 - 3 * math.pi) / 3, rel=0.08)
    assert np.all(v > 0)


def test_dyck_path_properties():
    rng = np.random.default_rng(3)
    for m in (1, 2, 17, 300):
        h = dyck_path(m, rng)
        assert h.shape == (2 * m + 1,)
        assert h[0] == 0 and h[-1] == 0
        assert np.all(h >= 0)
        assert np.all(np.abs(np.diff(h)) == 1)
    with pytest.raises(ValueError):
        dyck_path(0, rng)


def test_dyck_path_uniform_over_shapes():
    # C_3 = 5 paths, each with probability 1/5
    rng = np.random.default_rng(21)
    counts: dict[tuple, int] = {}
    reps = 5000
    for _ in range(reps):
        h = tuple(dyck_path(3, rng))
        counts[h] = counts.get(h, 0) + 1
    assert len(counts) == 5
    band = 3 * math.sqrt(0.2 * 0.8 / reps)
    for count in counts.values():
        assert abs(count / reps - 0.2) < band


def test_expected_airy_dyck_matches_enumeration():
    for m in range(1, 7):
        paths = oracles.all_dyck_paths(m)
        mean_area = sum(sum(p) for p in paths) / len(paths)
        assert expected_airy_dyck(m) == pytest.approx(mean_area / m**1.5, rel=1e-9)
    assert len(oracles.all_dyck_paths(5)) == 42


def test_dyck_sampler_matches_exact_mean():
    m = 512
    rng = np.random.default_rng(42)
    v = sample_airy_dycks(4000, m, rng)
    se = v.std(ddof=1) / math.sqrt(v.shape[0])
    assert abs(v.mean() - expected_airy_dyck(m)) < 4 * se
    one = sample_airy_dyck(8, np.random.default_rng(5))
    assert one == sample_airy_dyck(8, np.random.default_rng(5))


def test_two_airy_samplers_agree():
    rng = np.random.default_rng(777)
    m = 2**12
    a = sample_airy_excursions(5000, m, rng)
    b = sample_airy_dycks(5000, m, rng)
    se = math.sqrt(a.var() / a.size + b.var() / b.size)
    # the residual discretization biases differ by ~2/sqrt(m) at most
    assert abs(a.mean() - b.mean()) < 3 * se + 2.5 / math.sqrt(m)


def test_airy_moments():
    assert airy_moments(1) == pytest.approx(math.sqrt(math.pi))
    assert airy_moments(2) == pytest.approx(10 / 3)
    with pytest.raises(ValueError):
        airy_moments(3)
    with pytest.raises(ValueError):
        airy_moments(0)
