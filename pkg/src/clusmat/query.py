"""Preprocessing for exact single-entry queries on a 0-1 matrix product.

After clustering, each row keeps the sorted coordinates where it differs from
its center. An entry ``C[i, j]`` is then recovered from the approximation
``D[i, j]`` by a +-1 correction per differing coordinate, so a query costs
time proportional to the row's distance from its center.
"""
from __future__ import annotations

import io
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .approx import choose_side, mmclus_approx, mmclus_r_approx
from .bitmatrix import BitMatrix, DimensionError, _unpack, transpose
from .clustering import Clustering
from .formats import FormatError, from_bmb_bytes, matrix_digest, to_bmb_bytes

PPS_MAGIC = b"PPS1"
_FLAG_TRANSPOSED = 1
_FLAG_TWO_SIDED = 2


class StateMismatchError(ValueError):
    """A saved preprocessing state does not belong to the given matrices."""


def difference_sets(points: BitMatrix, clus: Clustering) -> list[np.ndarray]:
    """For every point, the sorted coordinates where it differs from its center."""
    xor = points.data ^ clus.centers.data[clus.assignment]
    diff = _unpack(xor, points.cols)
    rows, cols = np.nonzero(diff)
    cuts = np.searchsorted(rows, np.arange(1, points.rows))
    return [c.astype(np.uint32) for c in np.split(cols, cuts)]


@dataclass(frozen=True, eq=False)
class PreprocState:
    """Everything a query needs, stored in the orientation that was clustered.

    When ``transposed`` is set, the state describes ``(B.T, A.T)`` and a query
    for ``(i, j)`` is answered as ``(j, i)`` on that pair.
    """

    D: np.ndarray
    transposed: bool
    left_centers: BitMatrix
    left_assignment: np.ndarray
    ind_left: list[np.ndarray]
    radius_left: int
    right: BitMatrix  # the right operand as stored: its columns are rows here
    right_centers: BitMatrix | None = None
    right_assignment: np.ndarray | None = None
    ind_right: list[np.ndarray] | None = None
    radius_right: int = 0
    epsilon: float | None = None
    digests: tuple[bytes, bytes] | None = None

    def __post_init__(self):
        object.__setattr__(self, "_left_bits", self.left_centers.to_dense())
        object.__setattr__(self, "_right_cols", self.right.to_dense())

    @property
    def two_sided(self) -> bool:
        return self.right_centers is not None

    @property
    def shape(self) -> tuple[int, int]:
        """Shape of the product C = A @ B (original orientation)."""
        p, r = self.D.shape
        return (r, p) if self.transposed else (p, r)

    @property
    def max_work(self) -> int:
        return self.radius_left + self.radius_right


def mmclus_preproc(a: BitMatrix, b: BitMatrix, ell: int, *, side: str | None = None,
                   first: int = 0, threads: int = 1) -> PreprocState:
    """One-sided preprocessing: cluster, approximate, record difference sets.

    The orientation rule matches :func:`mmclus_approx`; with ``side="cols"``
    ``ell`` is the number of column centers of ``b``.
    """
    side = choose_side(a, b, side)
    res = mmclus_approx(a, b, ell, side=side, first=first, threads=threads)
    if side == "rows":
        left, right, clus, d = a, transpose(b), res.row_clustering, res.D
    else:
        left, right, clus, d = transpose(b), a, res.col_clustering, np.ascontiguousarray(res.D.T)
    return PreprocState(
        D=d,
        transposed=side == "cols",
        left_centers=clus.centers,
        left_assignment=clus.assignment,
        ind_left=difference_sets(left, clus),
        radius_left=clus.radius,
        right=right,
        digests=(matrix_digest(a), matrix_digest(b)),
    )


def mmclus_r_preproc(a: BitMatrix, b: BitMatrix, ell: int, k: int, epsilon: float = 0.25,
                     seed=None, *, threads: int = 1) -> PreprocState:
    """Two-sided randomized preprocessing (rows of A and columns of B clustered)."""
    res = mmclus_r_approx(a, b, ell, k, epsilon, seed, threads=threads)
    bt = transpose(b)
    return PreprocState(
        D=res.D,
        transposed=False,
        left_centers=res.row_clustering.centers,
        left_assignment=res.row_clustering.assignment,
        ind_left=difference_sets(a, res.row_clustering),
        radius_left=res.row_clustering.radius,
        right=bt,
        right_centers=res.col_clustering.centers,
        right_assignment=res.col_clustering.assignment,
        ind_right=difference_sets(bt, res.col_clustering),
        radius_right=res.col_clustering.radius,
        epsilon=epsilon,
        digests=(matrix_digest(a), matrix_digest(b)),
    )


def query_with_work(state: PreprocState, i: int, j: int) -> tuple[int, int]:
    """Exact ``C[i, j]`` and the number of correction iterations it took."""
    p, r = state.shape
    if not (0 <= i < p and 0 <= j < r):
        raise IndexError(f"entry ({i}, {j}) outside product of shape {p}x{r}")
    if state.transposed:
        i, j = j, i
    value = int(state.D[i, j])
    center = state._left_bits[state.left_assignment[i]]
    col = state._right_cols[j]
    work = 0
    if state.two_sided:
        # center_A . center_B  ->  center_A . B[:, j]
        ind = state.ind_right[j]
        cen_bits, col_bits = center[ind], col[ind]
        value += int(np.count_nonzero(cen_bits & col_bits)) - int(np.count_nonzero(cen_bits & ~col_bits & 1))
        work += len(ind)
    # center_A . B[:, j]  ->  A[i] . B[:, j]; a differing coordinate has A bit = 1 - center bit
    ind = state.ind_left[i]
    cen_bits, col_bits = center[ind], col[ind]
    value += int(np.count_nonzero(col_bits & ~cen_bits & 1)) - int(np.count_nonzero(col_bits & cen_bits))
    work += len(ind)
    return value, work


def mmclus_query(state: PreprocState, i: int, j: int) -> int:
    return query_with_work(state, i, j)[0]


def mmclus_query_batch(state: PreprocState, pairs: Iterable[tuple[int, int]]) -> np.ndarray:
    return np.array([query_with_work(state, i, j)[0] for i, j in pairs], dtype=np.int64)


def answer_all(state: PreprocState) -> np.ndarray:
    """All p*r queries at once, vectorized over each row's r queries."""
    right = state._right_cols.T.astype(np.int32)  # q x r'
    left = state._left_bits.astype(np.int32)
    out = np.array(state.D, dtype=np.int32, copy=True)
    if state.two_sided:
        # stage-one correction depends only on (row center, column)
        stage1 = np.zeros((left.shape[0], out.shape[1]), dtype=np.int32)
        for j, ind in enumerate(state.ind_right):
            if len(ind):
                sign = 2 * right[ind, j] - 1
                stage1[:, j] = left[:, ind] @ sign
        out += stage1[state.left_assignment]
    for i, ind in enumerate(state.ind_left):
        if len(ind):
            sign = 1 - 2 * left[state.left_assignment[i], ind]
            out[i] += sign @ right[ind]
    return np.ascontiguousarray(out.T) if state.transposed else out


def total_query_work(state: PreprocState) -> int:
    """Sum of correction iterations over all p*r queries."""
    p, r = state.D.shape
    work = sum(len(ind) for ind in state.ind_left) * r
    if state.two_sided:
        work += sum(len(ind) for ind in state.ind_right) * p
    return work


def exact_via_queries(a: BitMatrix, b: BitMatrix, ell: int, *, randomized: bool = False,
                      k: int | None = None, epsilon: float = 0.25, seed=None,
                      side: str | None = None, first: int = 0, threads: int = 1) -> np.ndarray:
    """Exact product by preprocessing once and answering every entry."""
    if randomized:
        if k is None:
            raise ValueError("randomized mode needs k")
        state = mmclus_r_preproc(a, b, ell, k, epsilon, seed, threads=threads)
    else:
        state = mmclus_preproc(a, b, ell, side=side, first=first, threads=threads)
    return answer_all(state)


# --- .pps container ---------------------------------------------------------
#
# PPS1 | u8 flags | 32-byte digest(A) | 32-byte digest(B)
# D:    u64 rows, u64 cols, rows*cols u32
# left: u64 len + .bmb centers | u64 n + n u32 assignment | u64 radius | ind sets
# right (two-sided only): same block as left, then f64 epsilon
# ind sets: u64 n, then per set u32 len + len u32 indices. Everything little-endian.


def _write_u32_array(out: io.BytesIO, arr: np.ndarray) -> None:
    out.write(struct.pack("<Q", len(arr)))
    out.write(np.asarray(arr, dtype="<u4").tobytes())


def _write_block(out: io.BytesIO, centers: BitMatrix, assignment: np.ndarray,
                 radius: int, ind: list[np.ndarray]) -> None:
    blob = to_bmb_bytes(centers)
    out.write(struct.pack("<Q", len(blob)) + blob)
    _write_u32_array(out, assignment)
    out.write(struct.pack("<QQ", radius, len(ind)))
    for s in ind:
        out.write(struct.pack("<I", len(s)))
        out.write(np.asarray(s, dtype="<u4").tobytes())


class _Reader:
    def __init__(self, buf: bytes):
        self.buf, self.pos = buf, 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.buf):
            raise FormatError("truncated .pps file")
        chunk = self.buf[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def unpack(self, fmt: str):
        s = struct.Struct(fmt)
        return s.unpack(self.take(s.size))

    def u32_array(self, n: int) -> np.ndarray:
        return np.frombuffer(self.take(4 * n), dtype="<u4").astype(np.uint32)

    def block(self):
        (nbytes,) = self.unpack("<Q")
        centers = from_bmb_bytes(self.take(nbytes))
        (n,) = self.unpack("<Q")
        assignment = self.u32_array(n).astype(np.int64)
        radius, nsets = self.unpack("<QQ")
        ind = []
        for _ in range(nsets):
            (length,) = self.unpack("<I")
            ind.append(self.u32_array(length))
        return centers, assignment, int(radius), ind


def dump_state(state: PreprocState) -> bytes:
    if state.digests is None:
        raise ValueError("state has no matrix digests to record")
    out = io.BytesIO()
    flags = (_FLAG_TRANSPOSED if state.transposed else 0) | (_FLAG_TWO_SIDED if state.two_sided else 0)
    out.write(PPS_MAGIC + struct.pack("<B", flags) + state.digests[0] + state.digests[1])
    rows, cols = state.D.shape
    out.write(struct.pack("<QQ", rows, cols))
    out.write(np.asarray(state.D, dtype="<u4").tobytes())
    _write_block(out, state.left_centers, state.left_assignment, state.radius_left, state.ind_left)
    if state.two_sided:
        _write_block(out, state.right_centers, state.right_assignment, state.radius_right, state.ind_right)
        out.write(struct.pack("<d", state.epsilon))
    return out.getvalue()


def load_state(buf: bytes, a: BitMatrix, b: BitMatrix) -> PreprocState:
    """Rebuild a state from ``dump_state`` output; A and B must match the digests."""
    rd = _Reader(buf)
    if rd.take(4) != PPS_MAGIC:
        raise FormatError("not a .pps file")
    (flags,) = rd.unpack("<B")
    digests = (rd.take(32), rd.take(32))
    if digests != (matrix_digest(a), matrix_digest(b)):
        raise StateMismatchError("matrices do not match the digests stored in the state")
    if a.cols != b.rows:
        raise DimensionError("stored matrices are not multiplicable")
    rows, cols = rd.unpack("<QQ")
    d = np.frombuffer(rd.take(4 * rows * cols), dtype="<u4").astype(np.int32).reshape(rows, cols)
    transposed = bool(flags & _FLAG_TRANSPOSED)
    left_centers, left_assign, left_radius, ind_left = rd.block()
    kwargs = {}
    if flags & _FLAG_TWO_SIDED:
        rc, ra, rr, ind_right = rd.block()
        (eps,) = rd.unpack("<d")
        kwargs = dict(right_centers=rc, right_assignment=ra, radius_right=rr,
                      ind_right=ind_right, epsilon=eps)
    if rd.pos != len(buf):
        raise FormatError("trailing bytes in .pps file")
    return PreprocState(
        D=d, transposed=transposed, left_centers=left_centers, left_assignment=left_assign,
        ind_left=ind_left, radius_left=left_radius, right=a if transposed else transpose(b),
        digests=digests, **kwargs,
    )


def save_state(state: PreprocState, path: str | Path) -> None:
    Path(path).write_bytes(dump_state(state))


def read_state(path: str | Path, a: BitMatrix, b: BitMatrix) -> PreprocState:
    return load_state(Path(path).read_bytes(), a, b)
