import math

import numpy as np
import pytest

from treeshape import (
    ModelKind,
    convergence_table,
    estimate_moments,
    exact_moments,
    generate,
    joint_pmf,
    np_test,
    parse_newick,
)
from treeshape._kernels import sample_statistics
from treeshape.exact import mean_colless_yule_float, mean_sackin_yule_float


def test_reports_identical_across_worker_counts():
    for model in (ModelKind.YULE, ModelKind.UNIFORM):
        one = estimate_moments(model, 300, 9000, seed=12, workers=1)
        four = estimate_moments(model, 300, 9000, seed=12, workers=4)
        a, b = one.to_dict(), four.to_dict()
        a.pop("elapsed_s"), b.pop("elapsed_s")
        assert a == b


def test_yule_n3_degenerate():
    report = estimate_moments(ModelKind.YULE, 3, 500, seed=0)
    assert report.var_s == 0.0
    assert report.var_c == 0.0
    assert report.se_mean_s == 0.0


def test_small_n_matches_exact_moments():
    # bridge between the Monte Carlo and the rational oracle
    reps = 40000
    for model in (ModelKind.YULE, ModelKind.UNIFORM):
        for n in (4, 7, 10):
            em = exact_moments(joint_pmf(n, model))
            report = estimate_moments(model, n, reps, seed=1000 + n)
            if model is ModelKind.YULE:
                scale_mean, scale_var = n, n * n
                exact_mean_s = 0.0
                exact_mean_c = 0.0
            else:
                scale_mean, scale_var = n**1.5, n**3
                exact_mean_s = float(em.mean_s) / scale_mean
                exact_mean_c = float(em.mean_c) / scale_mean
            assert abs(report.mean_s - exact_mean_s) < 4 * max(report.se_mean_s, 1e-12)
            assert abs(report.mean_c - exact_mean_c) < 4 * max(report.se_mean_c, 1e-12)
            assert abs(report.var_s - float(em.var_s) / scale_var) < 4 * max(
                report.se_var_s, 1e-12
            )
            assert abs(report.var_c - float(em.var_c) / scale_var) < 4 * max(
                report.se_var_c, 1e-12
            )
            assert abs(report.cov_sc - float(em.cov_sc) / scale_var) < 4 * max(
                report.se_cov_sc, 1e-12
            )


def test_yule_centering():
    report = estimate_moments(ModelKind.YULE, 200, 30000, seed=3)
    assert abs(report.mean_s) < 3 * report.se_mean_s
    assert abs(report.mean_c) < 3 * report.se_mean_c


def test_sampled_statistics_structure():
    # pathwise identity: S - C = 2 * minsum with minsum >= n - 1
    for model in (ModelKind.YULE, ModelKind.UNIFORM):
        s, c, f = sample_statistics(model, 64, 2000, seed=9)
        assert ((s - c) % 2 == 0).all()
        assert (s - c >= 2 * 63).all()
        assert (c >= 0).all()
        assert (f > 0).all()


def test_kernel_matches_generated_trees_in_law():
    # mean Sackin from the kernel vs the exact formula, both models n=30
    s, _, _ = sample_statistics(ModelKind.YULE, 30, 40000, seed=4)
    exact = mean_sackin_yule_float(30)
    se = s.std() / math.sqrt(s.shape[0])
    assert abs(s.mean() - exact) < 4 * se
    _, c, _ = sample_statistics(ModelKind.YULE, 30, 40000, seed=5)
    exact_c = mean_colless_yule_float(30)
    se_c = c.std() / math.sqrt(c.shape[0])
    assert abs(c.mean() - exact_c) < 4 * se_c


def test_estimate_moments_validation():
    with pytest.raises(ValueError):
        estimate_moments(ModelKind.YULE, 1, 100, seed=0)
    with pytest.raises(ValueError):
        estimate_moments(ModelKind.YULE, 10, 1, seed=0)
    with pytest.raises(ValueError):
        estimate_moments(ModelKind.CATALAN, 10, 100, seed=0)


def test_convergence_table():
    rows = convergence_table(ModelKind.YULE, [50, 100], 4000, seed=8)
    assert [r.n for r in rows] == [50, 100]
    assert all(r.reps == 4000 for r in rows)
    with pytest.raises(ValueError):
        convergence_table(ModelKind.YULE, [100, 50], 4000, seed=8)


def test_np_test_balanced_tree_high_p():
    balanced = parse_newick("((A,B),(C,D));")
    report = np_test(balanced, ModelKind.YULE, reps=500, seed=2)
    assert report.p_value > 0.9
    assert report.direction == "upper"
    assert report.n == 4


def test_np_test_p_value_range_and_determinism():
    rng = np.random.default_rng(10)
    tree = generate(100, ModelKind.YULE, rng)
    a = np_test(tree, ModelKind.YULE, reps=400, seed=7)
    b = np_test(tree, ModelKind.YULE, reps=400, seed=7)
    assert a == b
    assert 0 < a.p_value <= 1


def test_np_test_detects_wrong_model():
    # a uniform tree is far out in the Yule null's upper tail at n = 300
    tree = generate(300, ModelKind.UNIFORM, np.random.default_rng(123))
    report = np_test(tree, ModelKind.YULE, reps=2000, seed=11)
    assert report.p_value < 0.05
    # and a Yule tree sits in the uniform null's lower tail
    tree2 = generate(300, ModelKind.YULE, np.random.default_rng(124))
    report2 = np_test(tree2, ModelKind.UNIFORM, reps=2000, seed=12)
    assert report2.direction == "lower"
    assert report2.p_value < 0.05


def test_np_test_rejects_tiny_trees():
    with pytest.raises(ValueError):
        np_test(parse_newick("(A,B);"), ModelKind.YULE, reps=10, seed=0)
