"""Monte Carlo estimation of normalized moments and the balance test.

Normalization conventions follow the limit theory: under the Yule model
the pair is centered with the exact means and scaled by n (so moments
approach the fixed-point constants); under the uniform model it is
scaled by n^{3/2} without centering (so the mean approaches sqrt(pi)
and the variance (10 - 3 pi)/3).

Reports are pure functions of (model, n, reps, seed): replication
chunks are seeded by chunk index and merged in a fixed order, so the
worker count changes timing only.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass

import numpy as np

from ._kernels import sample_statistics
from .exact import mean_colless_yule_float, mean_sackin_yule_float
from .models import ModelKind
from .stats import f_stat
from .trees import PhyloTree


@dataclass(frozen=True)
class MomentsReport:
    """Normalized sample moments with standard errors.

    mean/var/cov/cor refer to the normalized statistics (see module
    docstring); standard errors are the usual asymptotic ones, with the
    correlation's from Fisher's approximation (1 - r^2)/sqrt(reps).
    """

    model: str
    n: int
    reps: int
    seed: int
    mean_s: float
    mean_c: float
    var_s: float
    var_c: float
    cov_sc: float
    cor_sc: float
    se_mean_s: float
    se_mean_c: float
    se_var_s: float
    se_var_c: float
    se_cov_sc: float
    se_cor_sc: float
    elapsed_s: float

    def to_dict(self) -> dict:
        return asdict(self)


def _normalize(
    model: ModelKind, n: int, s: np.ndarray, c: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    if model is ModelKind.YULE:
        return (
            (s - mean_sackin_yule_float(n)) / n,
            (c - mean_colless_yule_float(n)) / n,
        )
    scale = float(n) ** 1.5
    return s / scale, c / scale


def estimate_moments(
    model: ModelKind, n: int, reps: int, seed: int, workers: int = 1
) -> MomentsReport:
    """Estimate the normalized joint moments from ``reps`` trees."""
    model = ModelKind(model)
    if n < 2:
        raise ValueError("n must be at least 2")
    if reps < 2:
        raise ValueError("reps must be at least 2")
    t0 = time.perf_counter()
    s_raw, c_raw, _ = sample_statistics(model, n, reps, seed, workers)
    x, y = _normalize(model, n, s_raw, c_raw)

    dx = x - x.mean()
    dy = y - y.mean()
    var_x = float((dx * dx).sum() / (reps - 1))
    var_y = float((dy * dy).sum() / (reps - 1))
    cov = float((dx * dy).sum() / (reps - 1))
    denom = math.sqrt(var_x * var_y)
    cor = cov / denom if denom > 0 else 0.0

    m4x = float((dx**4).mean())
    m4y = float((dy**4).mean())
    m22 = float((dx * dx * dy * dy).mean())
    return MomentsReport(
        model=model.value,
        n=n,
        reps=reps,
        seed=int(seed),
        mean_s=float(x.mean()),
        mean_c=float(y.mean()),
        var_s=var_x,
        var_c=var_y,
        cov_sc=cov,
        cor_sc=cor,
        se_mean_s=math.sqrt(var_x / reps),
        se_mean_c=math.sqrt(var_y / reps),
        se_var_s=math.sqrt(max(m4x - var_x**2, 0.0) / reps),
        se_var_c=math.sqrt(max(m4y - var_y**2, 0.0) / reps),
        se_cov_sc=math.sqrt(max(m22 - cov**2, 0.0) / reps),
        se_cor_sc=(1.0 - cor**2) / math.sqrt(reps),
        elapsed_s=time.perf_counter() - t0,
    )


def convergence_table(
    model: ModelKind, n_list: list[int], reps: int, seed: int, workers: int = 1
) -> list[MomentsReport]:
    """One MomentsReport per n, with substreams independent across rows."""
    if sorted(n_list) != list(n_list):
        raise ValueError("n_list must be ascending")
    row_seeds = [
        int(np.random.SeedSequence((int(seed), row)).generate_state(1)[0])
        for row in range(len(n_list))
    ]
    return [
        estimate_moments(model, n, reps, row_seed, workers)
        for n, row_seed in zip(n_list, row_seeds)
    ]


@dataclass(frozen=True)
class TestReport:
    """Monte Carlo calibrated balance test based on the F statistic.

    The p-value is the add-one estimator (1 + #extreme)/(reps + 1);
    'extreme' means >= observed under a Yule null (uniform trees are
    more imbalanced, so large F rejects) and <= observed under a
    uniform null.
    """

    observed_f: float
    null_model: str
    n: int
    reps: int
    seed: int
    p_value: float
    direction: str

    def to_dict(self) -> dict:
        return asdict(self)


def np_test(
    tree: PhyloTree, null: ModelKind, reps: int, seed: int, workers: int = 1
) -> TestReport:
    """Test a tree against a null model via F = sum ln(N_j - 1)."""
    null = ModelKind(null)
    n = tree.n_leaves
    if n < 3:
        raise ValueError("the F statistic is degenerate below n = 3")
    if reps < 1:
        raise ValueError("reps must be positive")
    observed = f_stat(tree)
    _, _, f_null = sample_statistics(null, n, reps, seed, workers)
    if null is ModelKind.YULE:
        extreme = int((f_null >= observed).sum())
        direction = "upper"
    else:
        extreme = int((f_null <= observed).sum())
        direction = "lower"
    return TestReport(
        observed_f=observed,
        null_model=null.value,
        n=n,
        reps=reps,
        seed=int(seed),
        p_value=(1 + extreme) / (reps + 1),
        direction=direction,
    )
