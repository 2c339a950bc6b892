"""Exact small-n ground truth in rational arithmetic.

Closed-form means, the full joint law of (Sackin, Colless) by dynamic
programming over subtree sizes, and the distribution of the subtree size
below a random vertex of a Catalan tree. Everything here is a Fraction
unless a function documents a floating-point regime for large n.

All recursions run in search-tree-shape coordinates (a tree with n
leaves corresponds to a shape with n - 1 vertices) and convert once at
the boundary:

    S_n  =d  S_hat_{n-1} + 2(n-1)        C_n  =d  C_hat_{n-1}
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import CapExceededError
from .models import ModelKind, catalan_number

#: Largest n accepted by joint_pmf unless overridden.
DEFAULT_JOINT_CAP = 18

#: Above this n, expected_root_min_catalan switches to log-space floats.
ROOT_MIN_EXACT_CAP = 2000


# ---------------------------------------------------------------------------
# Closed-form means (Yule model)
# ---------------------------------------------------------------------------


def mean_sackin_yule(n: int) -> Fraction:
    """E[S_n] = 2n (1/2 + 1/3 + ... + 1/n), exact."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return 2 * n * sum((Fraction(1, j) for j in range(2, n + 1)), Fraction(0))


def t_min(n: int) -> Fraction:
    """E[min(I, n-1-I)] for I uniform on {0, .., n-1}.

    (n-2)/4 for even n, (n-1)^2 / 4n for odd n.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if n % 2 == 0:
        return Fraction(n - 2, 4)
    return Fraction((n - 1) ** 2, 4 * n)


def _colless_shape_mean(m: int) -> Fraction:
    # c_m = b_m + 2(m+1) sum_{k=1}^{m-1} b_k / ((k+1)(k+2)),  b_k = k-1-2 t_k,
    # the exact solution of c_m = b_m + (2/m) sum_{k<m} c_k
    if m == 0:
        return Fraction(0)
    acc = Fraction(0)
    for k in range(1, m):
        acc += Fraction(k - 1 - 2 * t_min(k), (k + 1) * (k + 2))
    return (m - 1 - 2 * t_min(m)) + 2 * (m + 1) * acc


def mean_colless_yule(n: int) -> Fraction:
    """E[C_n] under the Yule model, exact (equals the shape mean at n-1)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return _colless_shape_mean(n - 1)


def mean_sackin_yule_float(n: int) -> float:
    """Float twin of mean_sackin_yule for Monte Carlo centering at large n."""
    return 2.0 * n * math.fsum(1.0 / j for j in range(2, n + 1))


def mean_colless_yule_float(n: int) -> float:
    """Float twin of mean_colless_yule for Monte Carlo centering at large n."""
    m = n - 1
    if m == 0:
        return 0.0

    def t(k: int) -> float:
        return (k - 2) / 4.0 if k % 2 == 0 else (k - 1) ** 2 / (4.0 * k)

    acc = math.fsum(
        (k - 1 - 2.0 * t(k)) / ((k + 1.0) * (k + 2.0)) for k in range(1, m)
    )
    return (m - 1 - 2.0 * t(m)) + 2.0 * (m + 1) * acc


# ---------------------------------------------------------------------------
# Joint law of (Sackin, Colless)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class JointPMF:
    """Exact joint pmf of (S_n, C_n): {(s, c): probability}."""

    n: int
    model: ModelKind
    mass: dict[tuple[int, int], Fraction]

    def total(self) -> Fraction:
        return sum(self.mass.values(), Fraction(0))

    def s_marginal(self) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        for (s, _), p in self.mass.items():
            out[s] = out.get(s, Fraction(0)) + p
        return out

    def c_marginal(self) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        for (_, c), p in self.mass.items():
            out[c] = out.get(c, Fraction(0)) + p
        return out


def _shape_split_weights(model: ModelKind, m: int) -> list[Fraction]:
    if model is ModelKind.YULE:
        w = Fraction(1, m)
        return [w] * m
    cm = catalan_number(m)
    return [
        Fraction(catalan_number(i) * catalan_number(m - 1 - i), cm) for i in range(m)
    ]


def joint_pmf(n: int, model: ModelKind, cap: int = DEFAULT_JOINT_CAP) -> JointPMF:
    """Joint law of (S_n, C_n) by exact dynamic programming.

    The pmf at shape size m is the split-weighted convolution of
    independent left/right pmfs, with both coordinates shifted by tolls
    driven by the same split: m - 1 on the Sackin side, |i - j| on the
    Colless side.  One coordinate change at the end maps shape size
    n - 1 to leaf count n.
    """
    model = ModelKind(model)
    if not model.is_phylo:
        raise ValueError(f"joint_pmf is stated for phylogenetic models, not {model.value}")
    if n < 1:
        raise ValueError("n must be at least 1")
    if n > cap:
        raise CapExceededError(f"joint_pmf supports n <= {cap} (asked for {n})")

    pmfs: list[dict[tuple[int, int], Fraction]] = [{(0, 0): Fraction(1)}]
    for m in range(1, n):
        w = _shape_split_weights(model, m)
        out: dict[tuple[int, int], Fraction] = {}
        for i in range(m):
            j = m - 1 - i
            if i > j:
                break
            weight = w[i] if i == j else 2 * w[i]
            toll_s, toll_c = m - 1, abs(i - j)
            for (s1, c1), p1 in pmfs[i].items():
                for (s2, c2), p2 in pmfs[j].items():
                    key = (s1 + s2 + toll_s, c1 + c2 + toll_c)
                    wp = weight * p1 * p2
                    if key in out:
                        out[key] += wp
                    else:
                        out[key] = wp
        pmfs.append(out)

    shift = 2 * (n - 1)
    mass = {(s + shift, c): p for (s, c), p in pmfs[n - 1].items()}
    return JointPMF(n=n, model=model, mass=mass)


@dataclass(frozen=True)
class ExactMoments:
    """First and second moments of a joint pmf, exact rationals."""

    mean_s: Fraction
    mean_c: Fraction
    var_s: Fraction
    var_c: Fraction
    cov_sc: Fraction


def exact_moments(pmf: JointPMF) -> ExactMoments:
    ms = mc = mss = mcc = msc = Fraction(0)
    for (s, c), p in pmf.mass.items():
        ms += p * s
        mc += p * c
        mss += p * s * s
        mcc += p * c * c
        msc += p * s * c
    return ExactMoments(
        mean_s=ms,
        mean_c=mc,
        var_s=mss - ms * ms,
        var_c=mcc - mc * mc,
        cov_sc=msc - ms * mc,
    )


# ---------------------------------------------------------------------------
# Subtree size below a random vertex / ancestor
# ---------------------------------------------------------------------------


def khat_pmf(n: int) -> dict[int, Fraction]:
    """Law of the subtree size below a uniform vertex of a Catalan tree:

    P(K_hat_n = k) = C_k binom(2n-2k, n-k) / (n C_n),  k = 1..n.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    denom = n * catalan_number(n)
    return {
        k: Fraction(catalan_number(k) * math.comb(2 * n - 2 * k, n - k), denom)
        for k in range(1, n + 1)
    }


def k_pmf(n: int) -> dict[int, Fraction]:
    """Law of the leaf count below a uniform ancestor of a uniform tree:

    P(K_n = k) = C_{k-1} binom(2n-2k, n-k) / ((n-1) C_{n-1}),  k = 2..n.
    """
    if n < 2:
        raise ValueError("n must be at least 2 (no ancestors below that)")
    denom = (n - 1) * catalan_number(n - 1)
    return {
        k: Fraction(catalan_number(k - 1) * math.comb(2 * n - 2 * k, n - k), denom)
        for k in range(2, n + 1)
    }


def khat_limit_pmf(k: int) -> Fraction:
    """Large-n limit of khat_pmf at fixed k: 4^{-k} C_k.

    Decays like 1 / (sqrt(pi) k^{3/2}), a power law with exponent 3/2.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    return Fraction(catalan_number(k), 4**k)


def _log_catalan(k: int) -> float:
    if k == 0:
        return 0.0
    return (
        math.lgamma(2 * k + 1) - math.lgamma(k + 1) - math.lgamma(k + 2)
    )


def khat_pmf_at(n: int, k: int) -> float:
    """Single value of khat_pmf computed in log space; any n."""
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    log_binom = (
        math.lgamma(2 * n - 2 * k + 1) - 2 * math.lgamma(n - k + 1)
    )
    return math.exp(_log_catalan(k) + log_binom - math.log(n) - _log_catalan(n))


def expected_root_min_catalan(n: int, exact_cap: int = ROOT_MIN_EXACT_CAP):
    """E[min(L, R)] of the root vertex split of an n-vertex Catalan tree.

    Exact Fraction up to ``exact_cap``; beyond that the same sum is
    evaluated in log space and a float is returned.  Grows like
    sqrt(n / pi).
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if n <= exact_cap:
        cn = catalan_number(n)
        num = sum(
            2 * k * catalan_number(k) * catalan_number(n - 1 - k)
            for k in range(1, n // 2)
        )
        total = Fraction(num, cn)
        if n % 2 == 1:
            h = (n - 1) // 2
            total += Fraction((n - 1) * catalan_number(h) ** 2, 2 * cn)
        return total
    base = _log_catalan(n)
    total = math.fsum(
        2 * k * math.exp(_log_catalan(k) + _log_catalan(n - 1 - k) - base)
        for k in range(1, n // 2)
    )
    if n % 2 == 1:
        h = (n - 1) // 2
        total += (n - 1) / 2.0 * math.exp(2 * _log_catalan(h) - base)
    return total


def expected_sqrt_subtree_sum(n: int) -> float:
    """E[sum over vertices of sqrt(subtree size)] for an n-vertex Catalan tree.

    Computed as n E[sqrt(K_hat_n)] from the exact pmf in log space.
    Asymptotically n ln n / sqrt(pi), approached slowly from above.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if n == 1:
        return 1.0
    base = math.log(n) + _log_catalan(n)
    return n * math.fsum(
        math.sqrt(k)
        * math.exp(
            _log_catalan(k)
            + math.lgamma(2 * n - 2 * k + 1)
            - 2 * math.lgamma(n - k + 1)
            - base
        )
        for k in range(1, n + 1)
    )


# ---------------------------------------------------------------------------
# Serialization helpers ("p/q" strings, no float loss)
# ---------------------------------------------------------------------------


def fraction_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)


def pmf_json(pmf: dict[int, Fraction]) -> dict[str, str]:
    return {str(k): fraction_str(p) for k, p in sorted(pmf.items())}


def joint_pmf_json(pmf: JointPMF) -> dict[str, str]:
    return {f"{s},{c}": fraction_str(p) for (s, c), p in sorted(pmf.mass.items())}
