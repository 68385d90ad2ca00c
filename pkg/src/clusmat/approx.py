"""Approximate 0-1 matrix products with a certified additive error.

``mmclus_approx`` clusters one side (rows of A, or columns of B through the
transpose identity) and multiplies only the centers. ``mmclus_r_approx``
clusters both sides with the randomized k-center routine.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .bitmatrix import BitMatrix, DimensionError, ParameterError, naive_multiply, transpose
from .clustering import Clustering, gonzalez, randomized_kcenter

Side = Literal["rows", "cols", "both"]


@dataclass(frozen=True, eq=False)
class ApproxResult:
    D: np.ndarray
    side: Side
    certificate: int
    row_clustering: Clustering | None = None
    col_clustering: Clustering | None = None
    epsilon: float | None = None


def choose_side(a: BitMatrix, b: BitMatrix, side: str | None) -> str:
    """Cluster rows of A when p >= r, otherwise columns of B."""
    if side is None:
        return "rows" if a.rows >= b.cols else "cols"
    if side not in ("rows", "cols"):
        raise ParameterError(f"side must be 'rows' or 'cols', got {side!r}")
    return side


def _check_shapes(a: BitMatrix, b: BitMatrix) -> None:
    if a.cols != b.rows:
        raise DimensionError(f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")


def _approx_rows(a: BitMatrix, b: BitMatrix, ell: int, first: int, threads: int):
    if not 1 <= ell <= a.rows:
        raise ParameterError(f"number of centers must lie in [1, {a.rows}], got {ell}")
    clus = gonzalez(a, ell, first)
    c_small = naive_multiply(clus.centers, b, threads)
    return c_small[clus.assignment], clus


def mmclus_approx(a: BitMatrix, b: BitMatrix, ell: int, *, side: str | None = None,
                  first: int = 0, threads: int = 1) -> ApproxResult:
    """Approximate ``a @ b`` from an ``ell``-center clustering of one side.

    With ``side="rows"`` the rows of ``a`` are clustered and every row of the
    result is the product of the row's center with ``b``. With ``side="cols"``
    the same is done on ``(b.T, a.T)``, and ``ell`` counts column centers.
    Each entry is off by at most the achieved clustering radius, which is
    returned as ``certificate``.
    """
    _check_shapes(a, b)
    side = choose_side(a, b, side)
    if side == "rows":
        d, clus = _approx_rows(a, b, ell, first, threads)
        return ApproxResult(d, "rows", clus.radius, row_clustering=clus)
    d, clus = _approx_rows(transpose(b), transpose(a), ell, first, threads)
    return ApproxResult(np.ascontiguousarray(d.T), "cols", clus.radius, col_clustering=clus)


def split_seed(seed) -> tuple[np.random.SeedSequence, np.random.SeedSequence]:
    """Independent child seeds for the row and column clusterings."""
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    rows, cols = ss.spawn(2)
    return rows, cols


def two_sided_clusterings(a: BitMatrix, b: BitMatrix, ell: int, k: int, epsilon: float,
                          seed) -> tuple[Clustering, Clustering]:
    _check_shapes(a, b)
    if not 1 <= ell <= a.rows:
        raise ParameterError(f"ell must lie in [1, {a.rows}], got {ell}")
    if not 1 <= k <= b.cols:
        raise ParameterError(f"k must lie in [1, {b.cols}], got {k}")
    seed_rows, seed_cols = split_seed(seed)
    row_clus = randomized_kcenter(a, ell, epsilon, seed_rows)
    col_clus = randomized_kcenter(transpose(b), k, epsilon, seed_cols)
    return row_clus, col_clus


def mmclus_r_approx(a: BitMatrix, b: BitMatrix, ell: int, k: int, epsilon: float = 0.25,
                    seed=None, *, threads: int = 1) -> ApproxResult:
    """Approximate ``a @ b`` from randomized clusterings of both sides.

    Only the ``ell x k`` product of row centers with column centers is
    computed; the certificate is the sum of both achieved radii.
    """
    row_clus, col_clus = two_sided_clusterings(a, b, ell, k, epsilon, seed)
    c_small = naive_multiply(row_clus.centers, transpose(col_clus.centers), threads)
    d = c_small[np.ix_(row_clus.assignment, col_clus.assignment)]
    return ApproxResult(
        d, "both", row_clus.radius + col_clus.radius,
        row_clustering=row_clus, col_clustering=col_clus, epsilon=epsilon,
    )
