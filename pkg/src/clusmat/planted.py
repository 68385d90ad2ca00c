"""Synthetic matrices with planted cluster structure.

Every row is a hidden center with at most ``radius`` bits flipped, so the
optimal k-center radius of the rows (k = num_clusters) is at most ``radius``.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .bitmatrix import BitMatrix, ParameterError, transpose


@dataclass(frozen=True)
class PlantedSpec:
    rows: int
    cols: int
    num_clusters: int
    radius: int
    density: float = 0.5
    seed: int = 0
    by: str = "rows"  # "cols": the columns are the clustered vectors

    def validate(self) -> None:
        if self.rows <= 0 or self.cols <= 0:
            raise ParameterError("matrix dimensions must be positive")
        if self.by not in ("rows", "cols"):
            raise ParameterError(f"by must be 'rows' or 'cols', got {self.by!r}")
        n, d = (self.rows, self.cols) if self.by == "rows" else (self.cols, self.rows)
        if not 1 <= self.num_clusters <= n:
            raise ParameterError(f"num_clusters must lie in [1, {n}]")
        if not 0 <= self.radius <= d:
            raise ParameterError(f"radius must lie in [0, {d}]")
        if not 0.0 <= self.density <= 1.0:
            raise ParameterError("density must lie in [0, 1]")
        if d < 64 and self.num_clusters > 2**d:
            raise ParameterError(f"cannot place {self.num_clusters} distinct centers in {{0,1}}^{d}")

    def to_meta(self) -> str:
        return " ".join(f"{k}={v}" for k, v in asdict(self).items())

    @classmethod
    def from_meta(cls, line: str) -> "PlantedSpec":
        fields = dict(tok.split("=", 1) for tok in line.split())
        types = {"rows": int, "cols": int, "num_clusters": int, "radius": int,
                 "density": float, "seed": int, "by": str}
        return cls(**{k: types[k](v) for k, v in fields.items()})


@dataclass(frozen=True, eq=False)
class PlantedInstance:
    matrix: BitMatrix
    centers: np.ndarray  # num_clusters x d, dense
    labels: np.ndarray
    spec: PlantedSpec


def _distinct_centers(rng: np.random.Generator, k: int, d: int, density: float) -> np.ndarray:
    centers = rng.random((k, d)) < density
    for _ in range(1000):
        _, first = np.unique(centers, axis=0, return_index=True)
        dup = np.setdiff1d(np.arange(k), first)
        if not len(dup):
            return centers
        # low-entropy densities collide often; fall back to fair coins
        centers[dup] = rng.random((len(dup), d)) < (density if 0 < density < 1 else 0.5)
    raise ParameterError("could not draw distinct centers; lower num_clusters or raise cols")


def generate(spec: PlantedSpec) -> PlantedInstance:
    """Deterministic planted matrix for ``spec``.

    The first ``num_clusters`` vectors cover every cluster once; the rest pick
    a cluster uniformly. Each vector flips a uniform number in [0, radius] of
    distinct coordinates of its center.
    """
    spec.validate()
    n, d = (spec.rows, spec.cols) if spec.by == "rows" else (spec.cols, spec.rows)
    rng = np.random.default_rng(spec.seed)
    centers = _distinct_centers(rng, spec.num_clusters, d, spec.density)
    labels = np.concatenate([
        np.arange(spec.num_clusters),
        rng.integers(0, spec.num_clusters, n - spec.num_clusters),
    ])
    rng.shuffle(labels)
    points = centers[labels].copy()
    for i in range(n):
        flips = rng.choice(d, size=int(rng.integers(0, spec.radius + 1)), replace=False)
        points[i, flips] ^= True
    m = BitMatrix.from_dense(points.astype(np.uint8))
    if spec.by == "cols":
        m = transpose(m)
    return PlantedInstance(m, centers.astype(np.uint8), labels, spec)


def random_matrix(rows: int, cols: int, density: float, rng: np.random.Generator) -> BitMatrix:
    return BitMatrix.from_dense((rng.random((rows, cols)) < density).astype(np.uint8))
