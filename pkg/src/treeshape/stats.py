"""Shape statistics of a single tree.

All functions are pure, run in one vectorized pass over the node arrays
(no recursion, so million-leaf combs are fine), and return Python ints
or floats. Integer results use arbitrary-precision ints; the Sackin
index alone reaches ~n^2/2, past 32-bit range already at n ~ 1e5.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .trees import PhyloTree, leaf_depths


@dataclass(frozen=True)
class TreeStats:
    """The four balance statistics of one tree.

    ``colless == sackin - 2 * min_split_sum`` always holds: each internal
    node contributes N = L + R to Sackin and |L - R| = N - 2 min(L, R)
    to Colless.
    """

    n: int
    sackin: int
    colless: int
    min_split_sum: int
    f_stat: float


def _split_sizes(tree: PhyloTree) -> tuple[np.ndarray, np.ndarray]:
    idx = tree.internal_nodes()
    return tree.leaf_count[tree.left[idx]], tree.leaf_count[tree.right[idx]]


def sackin(tree: PhyloTree) -> int:
    """Sum of leaf depths; equals the sum of subtree leaf counts N_j."""
    total = int(tree.leaf_count[tree.internal_nodes()].sum())
    assert total == sum(leaf_depths(tree))
    return total


def colless(tree: PhyloTree) -> int:
    """Sum over internal nodes of |L - R|, the leaf-count imbalance."""
    l, r = _split_sizes(tree)
    return int(np.abs(l - r).sum())


def min_split_sum(tree: PhyloTree) -> int:
    """Sum over internal nodes of min(L, R)."""
    l, r = _split_sizes(tree)
    return int(np.minimum(l, r).sum())


def f_stat(tree: PhyloTree) -> float:
    """Sum over internal nodes of ln(N_j - 1), natural log.

    Up to constants this is the log-probability of the shape under the
    Yule model, hence the likelihood-ratio statistic against the uniform
    model. Cherries (N_j = 2) contribute zero.
    """
    counts = tree.leaf_count[tree.internal_nodes()]
    return float(np.log(counts - 1.0).sum()) if counts.size else 0.0


def tree_stats(tree: PhyloTree) -> TreeStats:
    """All statistics in one pass over the internal nodes."""
    idx = tree.internal_nodes()
    if idx.size == 0:
        return TreeStats(n=1, sackin=0, colless=0, min_split_sum=0, f_stat=0.0)
    counts = tree.leaf_count[idx]
    l = tree.leaf_count[tree.left[idx]]
    r = tree.leaf_count[tree.right[idx]]
    s = int(counts.sum())
    msum = int(np.minimum(l, r).sum())
    return TreeStats(
        n=tree.n_leaves,
        sackin=s,
        colless=s - 2 * msum,
        min_split_sum=msum,
        f_stat=float(np.log(counts - 1.0).sum()),
    )


def random_ancestor_subtree_size(tree: PhyloTree, rng: np.random.Generator) -> int:
    """Leaf count below an internal node drawn uniformly at random."""
    idx = tree.internal_nodes()
    if idx.size == 0:
        raise ValueError("tree has no internal nodes (n < 2)")
    return int(tree.leaf_count[idx[rng.integers(idx.size)]])
