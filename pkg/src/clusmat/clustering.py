"""k-center clustering of bit vectors under the Hamming metric."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable

import numpy as np

from .bitmatrix import BitMatrix, DimensionError, ParameterError, hamming_to_row, pairwise_hamming

# Projection dimension is ceil(PROJECTION_C0 * ln(n) / eps^2), clamped to d.
PROJECTION_C0 = 8.0

BRUTE_FORCE_MAX_POINTS = 16
BRUTE_FORCE_MAX_K = 4


@dataclass(frozen=True, eq=False)
class Clustering:
    """Centers, nearest-center assignment and the achieved max radius.

    ``centers`` always holds the center vectors explicitly; ``center_indices``
    is set when every center is one of the input points.
    """

    centers: BitMatrix
    assignment: np.ndarray
    distances: np.ndarray
    radius: int
    center_indices: np.ndarray | None = None
    # radius after 1, 2, ..., k centers (farthest-point runs only)
    radius_history: tuple[int, ...] = field(default=())

    @property
    def k(self) -> int:
        return self.centers.rows

    @property
    def n(self) -> int:
        return len(self.assignment)


def _check_k(n: int, k: int) -> None:
    if n == 0:
        raise ParameterError("empty point set")
    if not 1 <= k <= n:
        raise ParameterError(f"k must lie in [1, {n}], got {k}")


def _farthest_point(dist_to: Callable[[int], np.ndarray], n: int, k: int, first: int):
    """Generic farthest-point traversal.

    ``dist_to(c)`` returns the distance array from every point to point ``c``.
    Returns chosen indices, per-point nearest-center slot and distance, and the
    radius after each new center. Ties go to the lowest index in both the
    farthest-point choice and the nearest-center assignment.
    """
    if not 0 <= first < n:
        raise ParameterError(f"first center index {first} out of range [0, {n})")
    chosen = [first]
    nearest = dist_to(first)
    slot = np.zeros(n, dtype=np.int64)
    history = [int(nearest.max())]
    is_center = np.zeros(n, dtype=bool)
    is_center[first] = True
    for t in range(1, k):
        # centers stay distinct even when the remaining points are duplicates
        candidate = np.where(is_center, -1, nearest)
        c = int(candidate.argmax())
        chosen.append(c)
        is_center[c] = True
        d = dist_to(c)
        closer = d < nearest
        slot[closer] = t
        nearest = np.where(closer, d, nearest)
        history.append(int(nearest.max()))
    return np.asarray(chosen, dtype=np.int64), slot, nearest, history


def gonzalez(points: BitMatrix, k: int, first: int = 0) -> Clustering:
    """Deterministic farthest-point k-center clustering (2-approximation).

    Centers are input points; ``first`` is the index of the initial center.
    Each round updates every point's nearest-center distance against the new
    center only, so the total work is O(n d k).
    """
    _check_k(points.rows, k)
    chosen, slot, dist, history = _farthest_point(
        lambda c: hamming_to_row(points, points.data[c]), points.rows, k, first
    )
    return Clustering(
        centers=points.take_rows(chosen),
        assignment=slot,
        distances=dist,
        radius=int(dist.max()),
        center_indices=chosen,
        radius_history=tuple(history),
    )


def assign_nearest(points: BitMatrix, centers: BitMatrix,
                   center_indices: np.ndarray | None = None) -> Clustering:
    """Map each point to its nearest center in exact Hamming distance.

    Ties are broken toward the lowest center index.
    """
    if points.cols != centers.cols:
        raise DimensionError(f"points have {points.cols} bits, centers have {centers.cols}")
    best = np.full(points.rows, np.iinfo(np.int64).max, dtype=np.int64)
    slot = np.zeros(points.rows, dtype=np.int64)
    for c in range(centers.rows):
        d = hamming_to_row(points, centers.data[c])
        closer = d < best
        slot[closer] = c
        best = np.where(closer, d, best)
    return Clustering(
        centers=centers,
        assignment=slot,
        distances=best,
        radius=int(best.max()),
        center_indices=None if center_indices is None else np.asarray(center_indices, dtype=np.int64),
    )


@dataclass(frozen=True, eq=False)
class ProjectedPoints:
    """Integer images of the points under a sparse {+1, 0, -1} projection.

    ``coords[i] = x_i @ R`` with R of shape (d, m). For 0-1 vectors the
    expected squared distance between two images is ``scale * ham``.
    """

    coords: np.ndarray
    dim: int
    seed: int | None

    @property
    def scale(self) -> float:
        # E[r^2] = 1/3 for r drawn from {+1: 1/6, 0: 2/3, -1: 1/6}
        return self.dim / 3.0

    def sq_distances_to(self, c: int) -> np.ndarray:
        diff = self.coords.astype(np.int64) - self.coords[c]
        return np.einsum("ij,ij->i", diff, diff)


def projection_dim(n: int, epsilon: float, d: int, c0: float = PROJECTION_C0) -> int:
    return max(1, min(d, math.ceil(c0 * math.log(n) / epsilon**2)))


def _check_epsilon(epsilon: float) -> None:
    if not 0.0 < epsilon < 0.5:
        raise ParameterError(f"epsilon must lie in (0, 1/2), got {epsilon}")


def project(points: BitMatrix, epsilon: float, seed: int | np.random.SeedSequence | None = None,
            c0: float = PROJECTION_C0) -> ProjectedPoints:
    """Random sparse sign projection of the points to m = O(log n / eps^2) dims."""
    _check_epsilon(epsilon)
    n = points.rows
    if n < 2:
        raise ParameterError("projection needs at least two points")
    m = projection_dim(n, epsilon, points.cols, c0)
    rng = np.random.default_rng(seed)
    signs = rng.choice(np.array([1.0, 0.0, -1.0]), size=(points.cols, m), p=[1 / 6, 2 / 3, 1 / 6])
    # float64 BLAS product is exact here: |entries| <= d << 2**53
    coords = np.rint(points.to_dense().astype(np.float64) @ signs).astype(np.int32)
    return ProjectedPoints(coords, m, seed if isinstance(seed, int) else None)


def randomized_kcenter(points: BitMatrix, k: int, epsilon: float,
                       seed: int | np.random.SeedSequence | None = None,
                       first: int = 0) -> Clustering:
    """Farthest-point clustering in a random low-dimensional projection.

    Centers are chosen by comparing projected squared distances, then every
    original point is re-assigned to its nearest chosen center in exact
    Hamming distance, so ``radius`` is a true certificate in {0,1}^d.
    """
    _check_epsilon(epsilon)
    _check_k(points.rows, k)
    if points.rows == 1:
        return gonzalez(points, 1, first)
    proj = project(points, epsilon, seed)
    chosen, _, _, _ = _farthest_point(proj.sq_distances_to, points.rows, k, first)
    return assign_nearest(points, points.take_rows(chosen), chosen)


def brute_force_discrete_kcenter(points: BitMatrix, k: int) -> int:
    """Optimal k-center radius with centers restricted to input points.

    Exhaustive over all C(n, k) subsets; only for tiny instances.
    """
    n = points.rows
    _check_k(n, k)
    if n > BRUTE_FORCE_MAX_POINTS or k > BRUTE_FORCE_MAX_K:
        raise ParameterError(
            f"instance too large for brute force (n={n} > {BRUTE_FORCE_MAX_POINTS} "
            f"or k={k} > {BRUTE_FORCE_MAX_K})"
        )
    dist = pairwise_hamming(points)
    return min(int(dist[list(subset)].min(axis=0).max()) for subset in combinations(range(n), k))
