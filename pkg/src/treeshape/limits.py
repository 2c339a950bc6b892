"""Limit laws: the bivariate Yule fixed point and the Airy distribution.

Centered and scaled by n, the Yule-model pair (Sackin, Colless)
converges to the unique centered fixed point of

    (S, C)  =d  U (S, C) + (1 - U) (S', C') + (b_S(U), b_C(U)),

with U uniform on (0, 1). Its second moments are explicit constants
(:func:`limit_moments_yule`). Samples come either from unrolling the
recursion to a fixed depth (exact but exponential in depth) or from the
finite-n tree recursion at large n, which converges to the same law.

Scaled by n^{3/2}, both statistics under the uniform model converge to
the Airy distribution: sqrt(8) times the integral of the standard
Brownian excursion. Two independent constructions are provided, one
from a Gaussian bridge via the cyclic shift at the argmin and one from
uniform random Dyck paths via the cycle lemma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .exact import mean_colless_yule_float, mean_sackin_yule_float
from .models import ModelKind

#: Exact unrolling beyond this depth is refused (cost is 2^depth per sample).
MAX_UNROLL_DEPTH = 22


@dataclass(frozen=True)
class LimitMomentsYule:
    """Second moments of the limiting (S, C) pair under the Yule model."""

    var_s: float
    var_c: float
    cov_sc: float
    cor_sc: float


def limit_moments_yule() -> LimitMomentsYule:
    """The four limit constants, computed from pi and ln 2.

    var_s = 7 - 2 pi^2 / 3          ~ 0.4203
    var_c = 3 - pi^2 / 6 - ln 2     ~ 0.6619
    cov   = 9/2 - pi^2 / 3 - ln 2   ~ 0.5170
    cor   = cov / sqrt(var_s var_c) ~ 0.9802
    """
    pi2 = math.pi**2
    ln2 = math.log(2.0)
    var_s = 7.0 - 2.0 * pi2 / 3.0
    var_c = 3.0 - pi2 / 6.0 - ln2
    cov = 4.5 - pi2 / 3.0 - ln2
    return LimitMomentsYule(
        var_s=var_s, var_c=var_c, cov_sc=cov, cor_sc=cov / math.sqrt(var_s * var_c)
    )


@dataclass(frozen=True)
class TollVector:
    """The additive toll pair of the fixed-point map at a split value u."""

    b_s: float
    b_c: float


def _xlogx(u):
    return np.where(u > 0.0, u * np.log(np.maximum(u, 1e-300)), 0.0)


def toll_vector(u) -> TollVector:
    """Toll pair at split u (scalar or array), extended by continuity:

    b_s = 2u ln u + 2(1-u) ln(1-u) + 1
    b_c = u ln u + (1-u) ln(1-u) + 1 - 2 min(u, 1-u)

    Both integrate to zero over (0, 1), which is what keeps the fixed
    point centered.
    """
    u = np.asarray(u, dtype=np.float64)
    h = _xlogx(u) + _xlogx(1.0 - u)
    b_s = 2.0 * h + 1.0
    b_c = h + 1.0 - 2.0 * np.minimum(u, 1.0 - u)
    if b_s.ndim == 0:
        return TollVector(float(b_s), float(b_c))
    return TollVector(b_s, b_c)


def sample_limit_pairs(
    n_samples: int, depth: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Draw fixed-point samples by exact unrolling to the given depth.

    Depth 0 returns the point mass at (0, 0); each extra level applies
    the map once. The squared approximation error contracts by 2/3 per
    level, so moments are accurate to ~(2/3)^depth relative. Cost is
    O(2^depth) per sample; use :func:`sample_limit_via_n` for the
    high-accuracy regime.
    """
    if not 0 <= depth <= MAX_UNROLL_DEPTH:
        raise ValueError(f"depth must be in 0..{MAX_UNROLL_DEPTH}")
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    out_s = np.zeros(n_samples)
    out_c = np.zeros(n_samples)
    if depth == 0:
        return out_s, out_c
    width = 1 << depth
    chunk = max(1, (1 << 22) // width)
    done = 0
    while done < n_samples:
        k = min(chunk, n_samples - done)
        s = np.zeros((k, width))
        c = np.zeros((k, width))
        w = width
        while w > 1:
            u = rng.random((k, w // 2))
            toll = toll_vector(u)
            s = u * s[:, 0::2] + (1.0 - u) * s[:, 1::2] + toll.b_s
            c = u * c[:, 0::2] + (1.0 - u) * c[:, 1::2] + toll.b_c
            w //= 2
        out_s[done : done + k] = s[:, 0]
        out_c[done : done + k] = c[:, 0]
        done += k
    return out_s, out_c


def sample_limit_pair(depth: int, rng: np.random.Generator) -> tuple[float, float]:
    """One fixed-point sample at the given unrolling depth."""
    s, c = sample_limit_pairs(1, depth, rng)
    return float(s[0]), float(c[0])


def sample_limit_via_n(
    n_samples: int, n: int, seed: int, workers: int = 1
) -> tuple[np.ndarray, np.ndarray]:
    """Fixed-point samples from the finite-n Yule recursion at size n.

    Returns ((S - E[S_n]) / n, (C - E[C_n]) / n) for n_samples trees,
    centered with the exact mean formulas. The finite-n law converges
    to the fixed point, and the effective recursion depth (~2.99 ln n)
    exceeds any feasible exact unrolling already at n ~ 1e4.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    s, c, _ = _kernels.sample_statistics(ModelKind.YULE, n, n_samples, seed, workers)
    return (
        (s - mean_sackin_yule_float(n)) / n,
        (c - mean_colless_yule_float(n)) / n,
    )


def apply_fixed_point_step(
    s: np.ndarray, c: np.ndarray, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Apply the fixed-point map once to an empirical sample.

    Consumes the sample in halves as the two independent copies and
    returns len(s) // 2 combined pairs. If the input is distributed as
    the fixed point, so is the output; comparing moments before and
    after is a stationarity check.
    """
    half = s.shape[0] // 2
    u = rng.random(half)
    toll = toll_vector(u)
    s2 = u * s[:half] + (1.0 - u) * s[half : 2 * half] + toll.b_s
    c2 = u * c[:half] + (1.0 - u) * c[half : 2 * half] + toll.b_c
    return s2, c2


# ---------------------------------------------------------------------------
# Airy distribution samplers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExcursionPath:
    """A nonnegative discrete path with zero endpoints on a 1/m grid."""

    m: int
    heights: np.ndarray


def _excursion_heights(k: int, m: int, rng: np.random.Generator) -> np.ndarray:
    # k Gaussian bridges on an m-step grid, rotated at their argmin
    z = rng.standard_normal((k, m))
    w = np.cumsum(z, axis=1)
    t = np.arange(1, m + 1) / m
    b = np.empty((k, m + 1))
    b[:, 0] = 0.0
    b[:, 1:] = w - t * w[:, -1:]
    amin = np.argmin(b[:, :m], axis=1)  # first argmin; b[m] = b[0]
    idx = (amin[:, None] + np.arange(m + 1)[None, :]) % m
    rows = np.arange(k)[:, None]
    e = b[rows, idx] - b[rows, amin[:, None]]
    e[:, m] = 0.0
    return e / math.sqrt(m)


def excursion_path(m: int, rng: np.random.Generator) -> ExcursionPath:
    """One discrete standard Brownian excursion on m steps.

    A Gaussian bridge is cyclically shifted to start at its minimum;
    heights are scaled by 1/sqrt(m) so the path approximates e(t) on
    the grid t = 0, 1/m, .., 1.
    """
    if m < 2 or m % 2:
        raise ValueError("m must be even and at least 2")
    return ExcursionPath(m=m, heights=_excursion_heights(1, m, rng)[0])


def sample_airy_excursions(
    n_samples: int, m: int, rng: np.random.Generator
) -> np.ndarray:
    """Airy samples: sqrt(8) times the trapezoid area of bridge excursions."""
    if m < 2 or m % 2:
        raise ValueError("m must be even and at least 2")
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    out = np.empty(n_samples)
    chunk = max(1, (1 << 23) // m)
    done = 0
    while done < n_samples:
        k = min(chunk, n_samples - done)
        e = _excursion_heights(k, m, rng)
        # endpoints are zero, so the trapezoid rule is the plain mean
        out[done : done + k] = math.sqrt(8.0) * e[:, 1:m].sum(axis=1) / m
        done += k
    return out


def sample_airy_excursion(m: int, rng: np.random.Generator) -> float:
    """One Airy sample from the bridge construction."""
    return float(sample_airy_excursions(1, m, rng)[0])


def dyck_path(m: int, rng: np.random.Generator) -> np.ndarray:
    """A uniform Dyck path of 2m steps as int64 heights h_0 .. h_{2m}.

    Cycle-lemma construction: of the 2m+1 cyclic shifts of a uniform
    arrangement of m up and m+1 down steps, exactly one stays
    nonnegative until its final step; it starts right after the first
    minimum of the cumulative sums.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    return _dyck_heights(1, m, rng)[0]


def _dyck_heights(k: int, m: int, rng: np.random.Generator) -> np.ndarray:
    steps = np.ones((k, 2 * m + 1), dtype=np.int8)
    steps[:, m:] = -1
    steps = rng.permuted(steps, axis=1)
    cs = np.cumsum(steps, axis=1)
    start = np.argmin(cs, axis=1) + 1
    idx = (start[:, None] + np.arange(2 * m)[None, :]) % (2 * m + 1)
    rot = steps[np.arange(k)[:, None], idx]
    h = np.empty((k, 2 * m + 1), dtype=np.int64)
    h[:, 0] = 0
    np.cumsum(rot, axis=1, out=h[:, 1:])
    return h


def sample_airy_dycks(n_samples: int, m: int, rng: np.random.Generator) -> np.ndarray:
    """Airy samples from Dyck path areas, normalized by m^{3/2}.

    The area sum(h) divided by (2m)^{3/2} estimates the excursion
    integral; the sqrt(8) factor cancels the 2^{3/2}.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    out = np.empty(n_samples)
    chunk = max(1, (1 << 22) // (2 * m + 1))
    scale = float(m) ** 1.5
    done = 0
    while done < n_samples:
        k = min(chunk, n_samples - done)
        h = _dyck_heights(k, m, rng)
        out[done : done + k] = h.sum(axis=1) / scale
        done += k
    return out


def sample_airy_dyck(m: int, rng: np.random.Generator) -> float:
    """One Airy sample from a uniform Dyck path of 2m steps."""
    return float(sample_airy_dycks(1, m, rng)[0])


def expected_airy_dyck(m: int) -> float:
    """Exact mean of the Dyck-path estimator at half-length m.

    The total area below all Dyck paths of 2m steps is
    4^m - binom(2m+1, m); dividing by C_m and m^{3/2} gives the mean,
    which approaches sqrt(pi) like sqrt(pi) - 2/sqrt(m).
    """
    lg4 = m * math.log(4.0)
    lgb = math.lgamma(2 * m + 2) - math.lgamma(m + 1) - math.lgamma(m + 2)
    lgc = math.lgamma(2 * m + 1) - math.lgamma(m + 1) - math.lgamma(m + 2)
    return (math.exp(lg4 - lgc) - math.exp(lgb - lgc)) / m**1.5


def airy_moments(order: int) -> float:
    """E[A] = sqrt(pi) for order 1; E[A^2] = 10/3 for order 2.

    Higher moments are not tabulated here; estimate them empirically.
    """
    if order == 1:
        return math.sqrt(math.pi)
    if order == 2:
        return (10.0 - 3.0 * math.pi) / 3.0 + math.pi
    raise ValueError("only moments of order 1 and 2 are available")
