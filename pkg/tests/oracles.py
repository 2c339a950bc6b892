"""Independent brute-force oracles used by the test suite.

Everything here recomputes quantities by a route different from the
library implementation: exhaustive enumeration, direct recurrences, or
naive recursion on nested-tuple trees. Nested-tuple conventions:

* ordered search-tree shapes: None is the empty tree, (l, r) a vertex;
* phylo shapes: None is a leaf, (a, b) an internal node.
"""

from fractions import Fraction
from functools import lru_cache


def wedderburn_etherington(n: int) -> int:
    """Number of distinct n-leaf shapes, by the pairing recurrence."""
    if n <= 1:
        return n
    total = sum(
        wedderburn_etherington(i) * wedderburn_etherington(n - i)
        for i in range(1, (n + 1) // 2)
    )
    if n % 2 == 0:
        h = wedderburn_etherington(n // 2)
        total += h * (h + 1) // 2
    return total


def catalan_by_convolution(k: int) -> int:
    """Catalan numbers via C_{k+1} = sum C_i C_{k-i}."""
    c = [1]
    for m in range(k):
        c.append(sum(c[i] * c[m - i] for i in range(m + 1)))
    return c[k]


@lru_cache(maxsize=None)
def all_ordered_trees(k: int) -> tuple:
    """All ordered binary trees with k vertices, as nested tuples."""
    if k == 0:
        return (None,)
    out = []
    for i in range(k):
        for a in all_ordered_trees(i):
            for b in all_ordered_trees(k - 1 - i):
                out.append((a, b))
    return tuple(out)


def tree_size(t) -> int:
    if t is None:
        return 0
    return 1 + tree_size(t[0]) + tree_size(t[1])


def subtree_sizes(t) -> list[int]:
    """Size of the subtree at every vertex of an ordered tree."""
    out: list[int] = []

    def walk(node) -> int:
        if node is None:
            return 0
        size = 1 + walk(node[0]) + walk(node[1])
        out.append(size)
        return size

    walk(t)
    return out


def permutation_prob(t) -> Fraction:
    """Shape probability under the random-permutation model: prod 1/size."""
    p = Fraction(1)
    for size in subtree_sizes(t):
        p /= size
    return p


def phylo_leaf_depths(t, depth: int = 0) -> list[int]:
    """Leaf depths of a phylo nested tuple (None = leaf)."""
    if t is None:
        return [depth]
    return phylo_leaf_depths(t[0], depth + 1) + phylo_leaf_depths(t[1], depth + 1)


def phylo_leaf_count(t) -> int:
    if t is None:
        return 1
    return phylo_leaf_count(t[0]) + phylo_leaf_count(t[1])


def phylo_colless(t) -> int:
    if t is None:
        return 0
    l, r = phylo_leaf_count(t[0]), phylo_leaf_count(t[1])
    return abs(l - r) + phylo_colless(t[0]) + phylo_colless(t[1])


def random_phylo_nested(n: int, rand) -> tuple | None:
    """A haphazard n-leaf shape (uniform split sizes; not a named model)."""
    if n == 1:
        return None
    i = rand.randint(1, n - 1)
    return (random_phylo_nested(i, rand), random_phylo_nested(n - i, rand))


def comb_nested(n: int):
    t = None
    for _ in range(n - 1):
        t = (t, None)
    return t


def balanced_nested(n: int):
    if n == 1:
        return None
    return (balanced_nested(n // 2), balanced_nested(n - n // 2))


def symmetric_internal_count(t) -> int:
    """Internal nodes of a phylo nested tuple whose child shapes coincide."""

    def key(node):
        if node is None:
            return (1,)
        a, b = key(node[0]), key(node[1])
        if b < a:
            a, b = b, a
        return (phylo_leaf_count(node), a, b)

    if t is None:
        return 0
    same = 1 if key(t[0]) == key(t[1]) else 0
    return same + symmetric_internal_count(t[0]) + symmetric_internal_count(t[1])


def all_dyck_paths(m: int) -> list[list[int]]:
    """All Dyck paths of 2m steps as height sequences h_0..h_{2m}."""
    out: list[list[int]] = []

    def extend(heights: list[int]):
        steps_left = 2 * m - (len(heights) - 1)
        h = heights[-1]
        if steps_left == 0:
            if h == 0:
                out.append(heights)
            return
        if h + 1 <= steps_left - 1:
            extend(heights + [h + 1])
        if h > 0:
            extend(heights + [h - 1])

    extend([0])
    return out
