"""Exact 0-1 matrix product by walking a spanning tree of the rows of A.

Neighbouring rows in a good tree differ in few coordinates, so each row of
the product is derived from its predecessor with a handful of +-1 updates
instead of a full inner product.
"""
from __future__ import annotations

from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .approx import choose_side
from .bitmatrix import BitMatrix, DimensionError, _unpack, transpose
from .clustering import Clustering, gonzalez
from .formats import FormatError


class ContractError(ValueError):
    """An input violates a structural precondition (tree shape, center choice)."""


@dataclass(frozen=True, eq=False)
class SpanningTree:
    """Rooted spanning tree over the rows of ``points``.

    ``parent[v]`` is -1 for the root. ``diffs[v]`` holds the sorted
    coordinates where row ``v`` and row ``parent[v]`` differ; it serves both
    directions of that edge.
    """

    points: BitMatrix
    root: int
    parent: np.ndarray
    diffs: dict[int, np.ndarray]
    ham_cost: int

    @property
    def n(self) -> int:
        return len(self.parent)

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(int(u), v) for v, u in enumerate(self.parent) if u >= 0]

    def children(self) -> dict[int, list[int]]:
        kids: dict[int, list[int]] = defaultdict(list)
        for u, v in self.edges:
            kids[u].append(v)
        return kids


def tree_from_edges(points: BitMatrix, edges: Iterable[tuple[int, int]], root: int = 0) -> SpanningTree:
    """Orient an undirected edge list away from ``root`` and price its edges."""
    n = points.rows
    if not 0 <= root < n:
        raise ContractError(f"root {root} is not a row index")
    adj: dict[int, list[int]] = defaultdict(list)
    count = 0
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n) or u == v:
            raise ContractError(f"bad edge ({u}, {v}) for {n} vertices")
        adj[u].append(v)
        adj[v].append(u)
        count += 1
    if count != n - 1:
        raise ContractError(f"a spanning tree on {n} vertices has {n - 1} edges, got {count}")
    parent = np.full(n, -2, dtype=np.int64)
    parent[root] = -1
    stack = [root]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if parent[v] == -2:
                parent[v] = u
                stack.append(v)
    if (parent == -2).any():
        raise ContractError("edge list does not connect every row")
    return _with_diffs(points, root, parent)


def _with_diffs(points: BitMatrix, root: int, parent: np.ndarray) -> SpanningTree:
    child = np.flatnonzero(parent >= 0)
    diffs: dict[int, np.ndarray] = {}
    cost = 0
    if len(child):
        xor = _unpack(points.data[child] ^ points.data[parent[child]], points.cols)
        for v, row in zip(child.tolist(), xor):
            d = np.flatnonzero(row).astype(np.uint32)
            diffs[v] = d
            cost += len(d)
    return SpanningTree(points, root, parent, diffs, cost)


def build_cluster_spanning_tree(points: BitMatrix, clustering: Clustering) -> SpanningTree:
    """Star-plus-path tree: centers chained in creation order, the rest pendant.

    Requires centers drawn from the points. Its cost is at most
    ``(n - k) * radius + (k - 1) * d``.
    """
    idx = clustering.center_indices
    if idx is None:
        raise ContractError("clustering centers must be input points")
    idx = np.asarray(idx, dtype=np.int64)
    if len(set(idx.tolist())) != len(idx) or not np.array_equal(
        points.data[idx], clustering.centers.data
    ):
        raise ContractError("clustering centers must be distinct input points")
    if clustering.n != points.rows:
        raise ContractError("clustering does not cover these points")
    parent = idx[clustering.assignment].copy()
    parent[idx[0]] = -1
    parent[idx[1:]] = idx[:-1]
    return _with_diffs(points, int(idx[0]), parent)


@dataclass(frozen=True, eq=False)
class Traversal:
    """Walk ``order`` through the tree; ``steps[t]`` goes ``order[t] -> order[t+1]``."""

    order: list[int]
    diffs: list[np.ndarray]
    first_visit: list[bool]

    @property
    def steps(self) -> list[tuple[int, int]]:
        return list(zip(self.order, self.order[1:]))


def traverse(tree: SpanningTree) -> Traversal:
    """Depth-first Euler tour from the root, without the final climb back.

    Leaf children are visited before inner ones, so on a star-plus-path tree
    the walk ends at the far end of the path.
    """
    kids = tree.children()
    for u in kids:
        kids[u].sort(key=lambda v: v in kids)
    order = [tree.root]
    diffs: list[np.ndarray] = []
    first: list[bool] = []
    stack = [(tree.root, iter(kids.get(tree.root, ())))]
    while stack:
        u, it = stack[-1]
        v = next(it, None)
        if v is not None:
            order.append(v)
            diffs.append(tree.diffs[v])
            first.append(True)
            stack.append((v, iter(kids.get(v, ()))))
            continue
        stack.pop()
        if stack:
            order.append(stack[-1][0])
            diffs.append(tree.diffs[u])
            first.append(False)
    while first and not first[-1]:
        order.pop()
        diffs.pop()
        first.pop()
    return Traversal(order, diffs, first)


@dataclass
class STStats:
    delta_updates_per_column: int = 0
    steps: int = 0


def mmclus_st(a: BitMatrix, b: BitMatrix, tree: SpanningTree, *, replay_returns: bool = False,
              threads: int = 1, stats: STStats | None = None) -> np.ndarray:
    """Exact ``a @ b`` by delta updates along a traversal of ``tree``.

    The root row is multiplied directly; each later row along the walk starts
    from its predecessor and, per coordinate ``h`` where the two rows differ,
    gains ``B[h, :]`` if the new row has a 1 there and loses it if the old row
    does. All columns of the product are carried together as one vector.

    A step that returns to an already computed row would reproduce values that
    are already stored; such steps are skipped unless ``replay_returns`` is
    set. Correctness holds for any spanning tree; only the speed depends on
    its Hamming cost.
    """
    if a.cols != b.rows:
        raise DimensionError(f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")
    if tree.n != a.rows or tree.points.shape != a.shape or not np.array_equal(tree.points.data, a.data):
        raise ContractError("spanning tree is not over the rows of A")
    walk = traverse(tree)
    a_bits = a.to_dense()
    b_int = b.to_dense().astype(np.int32)
    out = np.empty((a.rows, b.cols), dtype=np.int32)

    plan = []
    updates = 0
    for (m, i), diff, new in zip(walk.steps, walk.diffs, walk.first_visit):
        if not new and not replay_returns:
            continue
        plus = diff[a_bits[i, diff] == 1]
        minus = diff[a_bits[m, diff] == 1]
        plan.append((m, i, plus, minus))
        updates += len(diff)

    def run(cols: slice) -> None:
        bj = b_int[:, cols]
        out[tree.root, cols] = a_bits[tree.root].astype(np.int32) @ bj
        for m, i, plus, minus in plan:
            row = out[m, cols].copy()
            if len(plus):
                row += bj[plus].sum(axis=0, dtype=np.int32)
            if len(minus):
                row -= bj[minus].sum(axis=0, dtype=np.int32)
            out[i, cols] = row

    if threads > 1 and b.cols > 1:
        bounds = np.linspace(0, b.cols, min(threads, b.cols) + 1, dtype=int)
        with ThreadPoolExecutor(threads) as pool:
            list(pool.map(run, [slice(s, e) for s, e in zip(bounds, bounds[1:])]))
    else:
        run(slice(None))
    if stats is not None:
        stats.delta_updates_per_column = updates
        stats.steps = len(walk.steps)
    return out


@dataclass(frozen=True, eq=False)
class ExactResult:
    C: np.ndarray
    side: str
    row_clustering: Clustering
    col_clustering: Clustering
    ham_cost_rows: int
    ham_cost_cols: int
    delta_updates: int  # summed over every output column of the walk that ran

    @property
    def ham_cost(self) -> int:
        return self.ham_cost_rows if self.side == "rows" else self.ham_cost_cols


def exact_clustered(a: BitMatrix, b: BitMatrix, ell: int, k: int, *, side: str | None = None,
                    first: int = 0, threads: int = 1) -> ExactResult:
    """Exact product via the cheaper of the row tree of A and the column tree of B.

    Both clusterings and tree costs are computed up front; the walk runs only
    on the side with the smaller predicted update work ``r * ham(T_A)`` vs
    ``p * ham(T_B)``, unless ``side`` forces one.
    """
    if a.cols != b.rows:
        raise DimensionError(f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")
    bt = transpose(b)
    row_clus = gonzalez(a, ell, first)
    col_clus = gonzalez(bt, k, first)
    tree_a = build_cluster_spanning_tree(a, row_clus)
    tree_b = build_cluster_spanning_tree(bt, col_clus)
    if side is None:
        side = "rows" if b.cols * tree_a.ham_cost <= a.rows * tree_b.ham_cost else "cols"
    else:
        side = choose_side(a, b, side)
    stats = STStats()
    if side == "rows":
        c = mmclus_st(a, b, tree_a, threads=threads, stats=stats)
        width = b.cols
    else:
        c = np.ascontiguousarray(mmclus_st(bt, transpose(a), tree_b, threads=threads, stats=stats).T)
        width = a.rows
    return ExactResult(c, side, row_clus, col_clus, tree_a.ham_cost, tree_b.ham_cost,
                       stats.delta_updates_per_column * width)


def random_spanning_tree(points: BitMatrix, rng: np.random.Generator) -> SpanningTree:
    """Uniformly shuffled random recursive tree; used to stress correctness."""
    order = rng.permutation(points.rows)
    edges = [(int(order[rng.integers(0, t)]), int(order[t])) for t in range(1, points.rows)]
    return tree_from_edges(points, edges, int(order[0]))


def parse_edges(lines: Sequence[str]) -> tuple[list[tuple[int, int]], int]:
    """Edge list text: one ``u v`` pair per line; the first ``u`` is the root."""
    edges = []
    for n, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise FormatError(f"line {n}: expected 'u v', got {line!r}")
        edges.append((int(parts[0]), int(parts[1])))
    root = edges[0][0] if edges else 0
    return edges, root
