"""Rooted binary tree structures and shape enumeration.

Two tree kinds live here:

* :class:`PhyloTree` -- a rooted tree with n leaves whose internal nodes
  all have exactly two children.  Every statistic in this package is a
  function of such a tree's topology only.
* :class:`SearchTreeShape` -- a binary tree with n vertices where each
  vertex has an optional left and an optional right child (the shape of
  a binary search tree).  The map :func:`phi_map` pads every vertex to
  outdegree two with fresh leaves, turning an (n-1)-vertex shape into an
  n-leaf PhyloTree.

Both classes store the tree in flat numpy arrays with the invariant that
children always come before their parent (the root is the last node), so
bottom-up quantities are single ascending passes and no algorithm here
recurses on tree depth.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import CapExceededError

#: Largest n accepted by :func:`enumerate_shapes` unless overridden.
DEFAULT_SHAPE_CAP = 16


class NewickError(ValueError):
    """Malformed or non-binary Newick input."""


def _leaf_counts(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    counts = np.ones(left.shape[0], dtype=np.int64)
    for i in range(left.shape[0]):
        l = left[i]
        if l >= 0:
            counts[i] = counts[l] + counts[right[i]]
    return counts


def _build_postorder(obj, none_is_leaf: bool) -> tuple[list[int], list[int]]:
    # iterative postorder over nested 2-tuples; survives comb-deep nesting.
    # None is a leaf node (PhyloTree) or an absent child (SearchTreeShape).
    left: list[int] = []
    right: list[int] = []
    out: list[int] = []
    work = [(obj, False)]
    while work:
        node, expanded = work.pop()
        if node is None:
            if none_is_leaf:
                left.append(-1)
                right.append(-1)
                out.append(len(left) - 1)
            else:
                out.append(-1)
        elif expanded:
            r = out.pop()
            l = out.pop()
            left.append(l)
            right.append(r)
            out.append(len(left) - 1)
        else:
            work.append((node, True))
            work.append((node[1], False))
            work.append((node[0], False))
    return left, right


class PhyloTree:
    """Immutable rooted binary tree with n leaves and n-1 internal nodes.

    Attributes
    ----------
    left, right : int64[2n-1]
        Child node ids; -1 marks a leaf.
    leaf_count : int64[2n-1]
        Number of leaves in the subtree rooted at each node (1 for leaves).
    root : int
        Node id of the root, always the last index.

    Node ids are topologically ordered (children before parents), so any
    bottom-up accumulation is a single ascending loop over the arrays.
    """

    __slots__ = ("left", "right", "leaf_count", "root")

    def __init__(self, left, right, *, validate: bool = True):
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.leaf_count = _leaf_counts(self.left, self.right)
        self.root = self.left.shape[0] - 1
        self.left.setflags(write=False)
        self.right.setflags(write=False)
        self.leaf_count.setflags(write=False)
        if validate:
            self.validate()

    @classmethod
    def leaf(cls) -> "PhyloTree":
        """The single-leaf tree (n = 1)."""
        return cls([-1], [-1])

    @classmethod
    def from_nested(cls, obj) -> "PhyloTree":
        """Build from nested pairs: a leaf is None, an internal node a 2-tuple."""
        left, right = _build_postorder(obj, none_is_leaf=True)
        return cls(left, right)

    @property
    def n_leaves(self) -> int:
        return int(self.leaf_count[self.root])

    @property
    def n_nodes(self) -> int:
        return self.left.shape[0]

    def is_leaf(self, i: int) -> bool:
        return self.left[i] < 0

    def internal_nodes(self) -> np.ndarray:
        """Ids of internal nodes, ascending."""
        return np.nonzero(self.left >= 0)[0]

    def leaves(self) -> np.ndarray:
        """Ids of leaf nodes, ascending."""
        return np.nonzero(self.left < 0)[0]

    def validate(self) -> None:
        n_nodes = self.left.shape[0]
        if n_nodes == 0 or self.right.shape[0] != n_nodes:
            raise ValueError("node arrays empty or mismatched")
        internal = self.left >= 0
        if np.any(internal != (self.right >= 0)):
            raise ValueError("node with exactly one child")
        idx = np.nonzero(internal)[0]
        if np.any(self.left[idx] >= idx) or np.any(self.right[idx] >= idx):
            raise ValueError("children must precede their parent")
        n = self.n_leaves
        if n_nodes != 2 * n - 1:
            raise ValueError("leaf/internal node count mismatch")
        seen = np.zeros(n_nodes, dtype=bool)
        seen[self.left[idx]] = True
        seen[self.right[idx]] = True
        if seen[self.root] or seen.sum() != n_nodes - 1:
            raise ValueError("tree is not a single rooted component")

    def canonical_key(self):
        """Hashable key identifying the shape up to left/right swaps.

        Children are ordered by (leaf count, key), recursively, so two
        trees have equal keys exactly when one can be turned into the
        other by swapping child pairs.
        """
        keys: list[tuple] = [None] * self.n_nodes
        for i in range(self.n_nodes):
            l = self.left[i]
            if l < 0:
                keys[i] = (1,)
            else:
                a, b = keys[l], keys[self.right[i]]
                if b < a:
                    a, b = b, a
                keys[i] = (int(self.leaf_count[i]), a, b)
        return keys[self.root]

    def preorder(self) -> np.ndarray:
        """Node ids in preorder (parent, left subtree, right subtree)."""
        order = np.empty(self.n_nodes, dtype=np.int64)
        stack = [self.root]
        pos = 0
        while stack:
            v = stack.pop()
            order[pos] = v
            pos += 1
            if self.left[v] >= 0:
                stack.append(int(self.right[v]))
                stack.append(int(self.left[v]))
        return order

    def _leaf_labels(self) -> dict[int, str]:
        # L1..Ln assigned left to right (preorder over leaves)
        labels: dict[int, str] = {}
        for v in self.preorder():
            if self.left[v] < 0:
                labels[int(v)] = f"L{len(labels) + 1}"
        return labels

    def to_json_obj(self):
        """Nested ``{"leaf": label} | {"children": [a, b]}`` encoding.

        Leaves are labeled L1..Ln left to right, as in emit_newick.
        """
        objs: list = [None] * self.n_nodes
        labels = self._leaf_labels()
        for i in range(self.n_nodes):
            if self.left[i] < 0:
                objs[i] = {"leaf": labels[i]}
            else:
                objs[i] = {"children": [objs[self.left[i]], objs[self.right[i]]]}
        return objs[self.root]

    @classmethod
    def from_json_obj(cls, obj) -> "PhyloTree":
        left: list[int] = []
        right: list[int] = []
        # stack of (obj, expanded?) frames; children pushed before the
        # parent record is appended, keeping the topological invariant
        out_stack: list[int] = []
        work = [(obj, False)]
        while work:
            node, expanded = work.pop()
            if not isinstance(node, dict):
                raise ValueError(f"expected object, got {type(node).__name__}")
            if "leaf" in node:
                left.append(-1)
                right.append(-1)
                out_stack.append(len(left) - 1)
            elif "children" in node:
                kids = node["children"]
                if not isinstance(kids, list) or len(kids) != 2:
                    raise ValueError("'children' must hold exactly two subtrees")
                if expanded:
                    r = out_stack.pop()
                    l = out_stack.pop()
                    left.append(l)
                    right.append(r)
                    out_stack.append(len(left) - 1)
                else:
                    work.append((node, True))
                    work.append((kids[1], False))
                    work.append((kids[0], False))
            else:
                raise ValueError("node must have 'leaf' or 'children'")
        return cls(left, right)

    def __eq__(self, other):
        if not isinstance(other, PhyloTree):
            return NotImplemented
        return self.canonical_key() == other.canonical_key()

    def __hash__(self):
        return hash(self.canonical_key())

    def __repr__(self):
        return f"PhyloTree(n_leaves={self.n_leaves})"


class SearchTreeShape:
    """Shape of a binary search tree: vertices with optional children.

    The empty tree (0 vertices) is valid and is represented by empty
    arrays with ``root == -1``.  ``size[v]`` counts the vertices of the
    subtree rooted at v.  Node ids are children-before-parent, root last.
    """

    __slots__ = ("left", "right", "size", "root")

    def __init__(self, left=(), right=()):
        self.left = np.asarray(left, dtype=np.int64).reshape(-1)
        self.right = np.asarray(right, dtype=np.int64).reshape(-1)
        n = self.left.shape[0]
        self.size = np.ones(n, dtype=np.int64)
        for i in range(n):
            l, r = self.left[i], self.right[i]
            if l >= 0:
                self.size[i] += self.size[l]
            if r >= 0:
                self.size[i] += self.size[r]
        self.root = n - 1
        for arr in (self.left, self.right, self.size):
            arr.setflags(write=False)

    @classmethod
    def empty(cls) -> "SearchTreeShape":
        return cls()

    @classmethod
    def from_nested(cls, obj) -> "SearchTreeShape":
        """Build from nested pairs: None is the empty tree, else (left, right)."""
        left, right = _build_postorder(obj, none_is_leaf=False)
        return cls(left, right)

    @property
    def n_vertices(self) -> int:
        return self.left.shape[0]

    def __repr__(self):
        return f"SearchTreeShape(n_vertices={self.n_vertices})"


def phi_map(shape: SearchTreeShape) -> PhyloTree:
    """Expand a search-tree shape with k vertices into a (k+1)-leaf tree.

    Every vertex becomes an internal node; each missing child slot is
    filled with a fresh leaf, so original vertices end with outdegree 2.
    The empty shape maps to the single-leaf tree.
    """
    if shape.n_vertices == 0:
        return PhyloTree.leaf()
    left: list[int] = []
    right: list[int] = []
    mapped = np.empty(shape.n_vertices, dtype=np.int64)

    def emit_child(c: int) -> int:
        if c >= 0:
            return int(mapped[c])
        left.append(-1)
        right.append(-1)
        return len(left) - 1

    for v in range(shape.n_vertices):
        l = emit_child(int(shape.left[v]))
        r = emit_child(int(shape.right[v]))
        left.append(l)
        right.append(r)
        mapped[v] = len(left) - 1
    return PhyloTree(left, right)


def leaf_counts(tree: PhyloTree) -> dict[int, int]:
    """Map each internal node id to the number of leaves below it."""
    return {int(j): int(tree.leaf_count[j]) for j in tree.internal_nodes()}


def leaf_depths(tree: PhyloTree) -> list[int]:
    """Depth of each leaf (edges to the root); [0] for the one-leaf tree."""
    depth = np.zeros(tree.n_nodes, dtype=np.int64)
    for i in range(tree.n_nodes - 1, -1, -1):
        l = tree.left[i]
        if l >= 0:
            depth[l] = depth[i] + 1
            depth[tree.right[i]] = depth[i] + 1
    return [int(d) for d in depth[tree.left < 0]]


# ---------------------------------------------------------------------------
# Newick
# ---------------------------------------------------------------------------

_LABEL_STOP = set("(),:;")


def parse_newick(text: str) -> PhyloTree:
    """Parse a strictly binary Newick string into a PhyloTree.

    Leaf labels and internal labels are accepted and discarded, as are
    branch lengths (``:0.5``).  A node with one child or three or more
    children raises :class:`NewickError`.
    """
    s = text.strip()
    if not s:
        raise NewickError("empty input")
    if not s.endswith(";"):
        raise NewickError("missing terminating ';'")
    body = s[:-1]

    left: list[int] = []
    right: list[int] = []
    frames: list[list[int]] = []
    current: int | None = None

    def new_leaf() -> int:
        left.append(-1)
        right.append(-1)
        return len(left) - 1

    i, n = 0, len(body)
    while i < n:
        ch = body[i]
        if ch.isspace():
            i += 1
        elif ch == "(":
            if current is not None:
                raise NewickError(f"unexpected '(' at position {i}")
            frames.append([])
            i += 1
        elif ch in ",)":
            if not frames:
                raise NewickError(f"unbalanced '{ch}' at position {i}")
            frames[-1].append(current if current is not None else new_leaf())
            current = None
            i += 1
            if ch == ")":
                kids = frames.pop()
                if len(kids) != 2:
                    raise NewickError(
                        f"non-binary node with {len(kids)} children at position {i - 1}"
                    )
                left.append(kids[0])
                right.append(kids[1])
                current = len(left) - 1
                # optional internal label, discarded
                j = i
                while j < n and body[j] not in _LABEL_STOP:
                    j += 1
                i = j
        elif ch == ":":
            if current is None:
                raise NewickError(f"branch length without a node at position {i}")
            j = i + 1
            while j < n and body[j] not in _LABEL_STOP:
                j += 1
            try:
                float(body[i + 1 : j].strip())
            except ValueError:
                raise NewickError(f"bad branch length at position {i}") from None
            i = j
        elif ch == ";":
            raise NewickError(f"unexpected ';' at position {i}")
        else:
            if current is not None:
                raise NewickError(f"unexpected label at position {i}")
            j = i
            while j < n and body[j] not in _LABEL_STOP:
                j += 1
            current = new_leaf()
            i = j
    if frames:
        raise NewickError("unbalanced '(' in input")
    if current is None:
        raise NewickError("no tree found before ';'")
    return PhyloTree(left, right)


_COMMA = -2
_CLOSE = -3


def emit_newick(tree: PhyloTree) -> str:
    """Serialize a tree, labelling leaves L1..Ln left to right, no lengths.

    Token-stream assembly, O(n) for any shape including deep combs.
    """
    tokens: list[str] = []
    label = 0
    stack: list[int] = [tree.root]
    while stack:
        v = stack.pop()
        if v == _COMMA:
            tokens.append(",")
        elif v == _CLOSE:
            tokens.append(")")
        elif tree.left[v] < 0:
            label += 1
            tokens.append(f"L{label}")
        else:
            tokens.append("(")
            stack.extend((_CLOSE, int(tree.right[v]), _COMMA, int(tree.left[v])))
    tokens.append(";")
    return "".join(tokens)


# ---------------------------------------------------------------------------
# Shape enumeration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ShapeEntry:
    shape: PhyloTree
    yule_prob: Fraction
    uniform_prob: Fraction


@dataclass(frozen=True)
class ShapeTable:
    """All distinct n-leaf shapes with their exact model probabilities."""

    n: int
    entries: list[ShapeEntry]

    def by_key(self, model: str) -> dict:
        """Map canonical shape key to probability for 'yule' or 'uniform'."""
        attr = "yule_prob" if model == "yule" else "uniform_prob"
        return {e.shape.canonical_key(): getattr(e, attr) for e in self.entries}


def enumerate_shapes(n: int, cap: int = DEFAULT_SHAPE_CAP) -> ShapeTable:
    """Every distinct n-leaf shape with exact Yule and uniform probabilities.

    Shapes are built bottom-up over subtree sizes; the probability of an
    unordered pair {A, B} with sizes (i, n-i) is q_n(i) * P(A) * P(B),
    doubled unless the two ordered arrangements coincide (A == B).
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if n > cap:
        raise CapExceededError(f"enumerate_shapes supports n <= {cap} (asked for {n})")

    from . import models  # deferred: models builds trees via this module

    # per size: list of (nested, yule_prob, uniform_prob); nested pairs are
    # already canonically ordered so no dedup pass is needed
    by_size: list[list[tuple]] = [[], [(None, Fraction(1), Fraction(1))]]
    for m in range(2, n + 1):
        qy = models.yule_split(m).probs
        qu = models.uniform_split(m).probs
        entries = []
        for i in range(1, m // 2 + 1):
            j = m - i
            lefts = by_size[i]
            for ai, (a, ya, ua) in enumerate(lefts):
                rights = by_size[j] if i < j else lefts[ai:]
                for b, yb, ub in rights:
                    mult = 1 if (i == j and a is b) else 2
                    entries.append(
                        ((a, b), mult * qy[i] * ya * yb, mult * qu[i] * ua * ub)
                    )
        by_size.append(entries)

    table = [
        ShapeEntry(PhyloTree.from_nested(nested), y, u)
        for nested, y, u in by_size[n]
    ]
    return ShapeTable(n=n, entries=table)
