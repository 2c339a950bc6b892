"""Random tree models and their splitting distributions.

A Markov branching model draws, at every node, the size of the left
subtree from a symmetric splitting distribution and recurses
independently on both sides. Two model families are supported:

* leaf splits for phylogenetic trees with n leaves on {1, .., n-1}:
  Yule (uniform split) and uniform-over-trees (double-factorial split);
* vertex splits for search-tree shapes with n vertices on {0, .., n-1}:
  random permutation (uniform) and Catalan (all shapes equally likely).

The two families correspond under :func:`treeshape.trees.phi_map`:
random permutation maps to Yule and Catalan to uniform, via
q_n(i) = q_hat_{n-1}(i - 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from .trees import PhyloTree


class ModelKind(str, Enum):
    YULE = "yule"
    UNIFORM = "uniform"
    RANDOM_PERMUTATION = "random-permutation"
    CATALAN = "catalan"

    @property
    def is_phylo(self) -> bool:
        return self in (ModelKind.YULE, ModelKind.UNIFORM)

    @property
    def shape_counterpart(self) -> "ModelKind":
        """The search-tree-shape model that phi_map carries onto this one."""
        if self is ModelKind.YULE:
            return ModelKind.RANDOM_PERMUTATION
        if self is ModelKind.UNIFORM:
            return ModelKind.CATALAN
        raise ValueError(f"{self} is already a shape model")


# ---------------------------------------------------------------------------
# Exact combinatorics
# ---------------------------------------------------------------------------

_catalan_cache: list[int] = [1]


def catalan_number(k: int) -> int:
    """k-th Catalan number, exact. C_0 = 1, C_k = binom(2k, k)/(k+1)."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    while len(_catalan_cache) <= k:
        i = len(_catalan_cache)
        _catalan_cache.append(_catalan_cache[-1] * 2 * (2 * i - 1) // (i + 1))
    return _catalan_cache[k]


def catalan_asymptotic_log(k: int) -> float:
    """ln of the leading-order approximation 4^k / sqrt(pi k^3)."""
    if k < 1:
        raise ValueError("k must be positive")
    return k * math.log(4.0) - 0.5 * (math.log(math.pi) + 3.0 * math.log(k))


def catalan_asymptotic(k: int) -> float:
    """Leading-order approximation 4^k / sqrt(pi k^3).

    Overflows float range near k ~ 510; use catalan_asymptotic_log then.
    The ratio to the exact Catalan number is 1 + 9/(8k) + O(1/k^2).
    """
    return math.exp(catalan_asymptotic_log(k))


def double_factorial_odd(m: int) -> int:
    """(2m-3)!! for m >= 1, with (-1)!! = 1!! = 1.

    Counts the labeled phylogenetic trees with m leaves.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    out = 1
    for j in range(3, 2 * m - 2, 2):
        out *= j
    return out


def log_catalan_table(nmax: int) -> np.ndarray:
    """float64 array of ln(C_k) for k = 0..nmax."""
    table = np.zeros(nmax + 1)
    for k in range(1, nmax + 1):
        table[k] = table[k - 1] + math.log(2.0 * (2 * k - 1) / (k + 1))
    return table


# ---------------------------------------------------------------------------
# Splitting distributions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SplitDistribution:
    """Exact pmf of the left-subtree size at a node of a given size.

    ``probs`` maps left size to probability.  Leaf splits have support
    {1, .., n-1}; vertex splits have support {0, .., n-1}.  The pmf sums
    to one and is symmetric about the midpoint of its support.
    """

    n: int
    probs: dict[int, Fraction]

    def __post_init__(self):
        if sum(self.probs.values()) != 1:
            raise ValueError("split probabilities must sum to 1")
        lo, hi = min(self.probs), max(self.probs)
        for i, p in self.probs.items():
            if self.probs[lo + hi - i] != p:
                raise ValueError("split distribution must be symmetric")


def yule_split(n: int) -> SplitDistribution:
    """Left leaf count uniform on {1, .., n-1} (Harding's split)."""
    if n < 2:
        raise ValueError("n must be at least 2")
    w = Fraction(1, n - 1)
    return SplitDistribution(n, {i: w for i in range(1, n)})


def uniform_split(n: int) -> SplitDistribution:
    """Leaf split of the uniform model over labeled trees:

    q_n(i) = (1/2) binom(n, i) (2i-3)!! (2(n-i)-3)!! / (2n-3)!!
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    denom = 2 * double_factorial_odd(n)
    probs = {
        i: Fraction(
            math.comb(n, i) * double_factorial_odd(i) * double_factorial_odd(n - i),
            denom,
        )
        for i in range(1, n)
    }
    return SplitDistribution(n, probs)


def permutation_split(n: int) -> SplitDistribution:
    """Vertex split of the random-permutation model: uniform on {0, .., n-1}."""
    if n < 1:
        raise ValueError("n must be at least 1")
    w = Fraction(1, n)
    return SplitDistribution(n, {i: w for i in range(n)})


def catalan_split(n: int) -> SplitDistribution:
    """Vertex split making all shapes equally likely:

    q_hat_n(i) = C_i C_{n-1-i} / C_n on {0, .., n-1}.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    cn = catalan_number(n)
    probs = {
        i: Fraction(catalan_number(i) * catalan_number(n - 1 - i), cn)
        for i in range(n)
    }
    return SplitDistribution(n, probs)


def split_distribution(model: ModelKind, n: int) -> SplitDistribution:
    """The splitting distribution of any model at size n."""
    if model is ModelKind.YULE:
        return yule_split(n)
    if model is ModelKind.UNIFORM:
        return uniform_split(n)
    if model is ModelKind.RANDOM_PERMUTATION:
        return permutation_split(n)
    return catalan_split(n)


# ---------------------------------------------------------------------------
# Generation
# ---------------------------------------------------------------------------

_lnC = log_catalan_table(0)


def _lnC_upto(nmax: int) -> np.ndarray:
    global _lnC
    if _lnC.shape[0] <= nmax:
        _lnC = log_catalan_table(max(nmax, 2 * _lnC.shape[0]))
    return _lnC


def sample_catalan_left(m: int, u: float, lnC: np.ndarray) -> int:
    """Left vertex count of an m-vertex Catalan shape by inverse CDF.

    Walks the U-shaped pmf C_j C_{m-1-j} / C_m from both ends inward, so
    the expected number of terms visited is O(sqrt(m)) rather than O(m).
    """
    lo, hi = 0, m - 1
    acc = 0.0
    base = lnC[m]
    while lo <= hi:
        acc += math.exp(lnC[lo] + lnC[m - 1 - lo] - base)
        if u < acc:
            return lo
        if hi != lo:
            acc += math.exp(lnC[hi] + lnC[m - 1 - hi] - base)
            if u < acc:
                return hi
        lo += 1
        hi -= 1
    return m // 2  # float underflow of the tail; mass there is ~1e-16


def generate(n: int, model: ModelKind, rng: np.random.Generator) -> PhyloTree:
    """Draw an n-leaf tree by recursive independent splitting.

    Exactly n - 1 uniforms are consumed, one per internal node in
    preorder, so the result is a deterministic function of the stream
    state. Yule splits sample a uniform integer directly; uniform-model
    splits invert the Catalan vertex split in floating point via
    log-Catalan numbers (exact rationals would be infeasible at n ~ 1e5).
    """
    model = ModelKind(model)
    if not model.is_phylo:
        raise ValueError(f"generate draws phylogenetic trees, not {model.value}")
    if n < 1:
        raise ValueError("n must be at least 1")
    if n == 1:
        return PhyloTree.leaf()

    u = rng.random(n - 1)
    yule = model is ModelKind.YULE
    lnC = None if yule else _lnC_upto(n)

    # preorder fill, then index-reverse so children precede parents
    total = 2 * n - 1
    left = np.full(total, -1, dtype=np.int64)
    right = np.full(total, -1, dtype=np.int64)
    stack = [n]  # subtree leaf counts, preorder
    pos = 0
    used = 0
    while stack:
        m = stack.pop()
        node = pos
        pos += 1
        if m == 1:
            continue
        if yule:
            i = 1 + int(u[used] * (m - 1))
            i = min(i, m - 1)
        else:
            i = 1 + sample_catalan_left(m - 1, u[used], lnC)
        used += 1
        left[node] = pos
        # the left subtree occupies the next 2i-1 preorder slots
        right[node] = pos + 2 * i - 1
        stack.append(m - i)
        stack.append(i)

    flip = total - 1 - left[::-1]
    new_left = np.where(left[::-1] >= 0, flip, -1)
    flip = total - 1 - right[::-1]
    new_right = np.where(right[::-1] >= 0, flip, -1)
    return PhyloTree(new_left, new_right)
