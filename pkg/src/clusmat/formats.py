"""Matrix file formats.

``.bm``   text: a ``p q`` header, then p lines of exactly q characters in {0,1}.
``.bmb``  binary: ``BM01``, u64 p, u64 q, then p*ceil(q/64) u64 words, all
          little-endian, row-major, padding bits zero.
CSV       integer matrices, one row per line, comma separated.
"""
from __future__ import annotations

import hashlib
import io
import struct
from pathlib import Path
from typing import IO

import numpy as np

from .bitmatrix import BitMatrix, words_for

BMB_MAGIC = b"BM01"
_HEADER = struct.Struct("<4sQQ")


class FormatError(ValueError):
    """A matrix file is malformed."""


def parse_bm(text: str) -> BitMatrix:
    lines = text.splitlines()
    if not lines:
        raise FormatError("empty .bm input")
    header = lines[0].split()
    if len(header) != 2 or not all(h.isdigit() for h in header):
        raise FormatError(f"bad .bm header: {lines[0]!r}")
    p, q = int(header[0]), int(header[1])
    if p <= 0 or q <= 0:
        raise FormatError(f"matrix dimensions must be positive, got {p}x{q}")
    body = lines[1:]
    while body and body[-1] == "":
        body.pop()
    if len(body) != p:
        raise FormatError(f"expected {p} rows, found {len(body)}")
    for n, line in enumerate(body, start=2):
        if len(line) != q:
            raise FormatError(f"line {n}: expected {q} characters, found {len(line)}")
    raw = np.frombuffer("".join(body).encode("ascii", errors="replace"), dtype=np.uint8)
    dense = raw.reshape(p, q) - ord("0")
    bad = np.argwhere(dense > 1)
    if len(bad):
        i, h = bad[0]
        raise FormatError(f"line {i + 2}, column {h + 1}: invalid character {body[i][h]!r}")
    return BitMatrix.from_dense(dense)


def format_bm(m: BitMatrix) -> str:
    dense = m.to_dense() + ord("0")
    body = "\n".join(row.tobytes().decode("ascii") for row in dense)
    return f"{m.rows} {m.cols}\n{body}\n"


def to_bmb_bytes(m: BitMatrix) -> bytes:
    return _HEADER.pack(BMB_MAGIC, m.rows, m.cols) + m.data.astype("<u8").tobytes()


def from_bmb_bytes(buf: bytes) -> BitMatrix:
    if len(buf) < _HEADER.size:
        raise FormatError("truncated .bmb header")
    magic, p, q = _HEADER.unpack_from(buf)
    if magic != BMB_MAGIC:
        raise FormatError(f"bad .bmb magic {magic!r}")
    if p == 0 or q == 0:
        raise FormatError("matrix dimensions must be positive")
    n = p * words_for(q)
    if len(buf) != _HEADER.size + 8 * n:
        raise FormatError(f".bmb payload has {len(buf) - _HEADER.size} bytes, expected {8 * n}")
    words = np.frombuffer(buf, dtype="<u8", offset=_HEADER.size).reshape(p, words_for(q))
    try:
        return BitMatrix(p, q, words.astype(np.uint64))
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def load_matrix(path: str | Path) -> BitMatrix:
    path = Path(path)
    if path.suffix == ".bmb":
        return from_bmb_bytes(path.read_bytes())
    if path.suffix == ".bm":
        return parse_bm(path.read_text(encoding="ascii", errors="replace"))
    raise FormatError(f"unknown matrix extension {path.suffix!r} (want .bm or .bmb)")


def save_matrix(m: BitMatrix, path: str | Path) -> None:
    path = Path(path)
    if path.suffix == ".bmb":
        path.write_bytes(to_bmb_bytes(m))
    elif path.suffix == ".bm":
        path.write_text(format_bm(m), encoding="ascii")
    else:
        raise FormatError(f"unknown matrix extension {path.suffix!r} (want .bm or .bmb)")


def matrix_digest(m: BitMatrix) -> bytes:
    """SHA-256 of the canonical ``.bmb`` encoding (independent of source format)."""
    return hashlib.sha256(to_bmb_bytes(m)).digest()


def write_csv(c: np.ndarray, out: IO[str]) -> None:
    np.savetxt(out, np.asarray(c), fmt="%d", delimiter=",")


def format_csv(c: np.ndarray) -> str:
    buf = io.StringIO()
    write_csv(c, buf)
    return buf.getvalue()


def read_csv(src: str | Path | IO[str]) -> np.ndarray:
    return np.loadtxt(src, dtype=np.int64, delimiter=",", ndmin=2)
