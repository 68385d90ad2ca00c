import numpy as np
import pytest
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from clusmat import BitMatrix

_ACCEPTANCE_LINES: list[str] = []


def schoolbook(a, b):
    """Triple-loop product over Python ints; independent of the packed path."""
    a, b = np.asarray(a).tolist(), np.asarray(b).tolist()
    q = len(b)
    return [[sum(a[i][h] * b[h][j] for h in range(q)) for j in range(len(b[0]))] for i in range(len(a))]


def dense_oracle(a: BitMatrix, b: BitMatrix) -> np.ndarray:
    """Reference product via int64 matmul of the unpacked matrices."""
    return a.to_dense().astype(np.int64) @ b.to_dense().astype(np.int64)


def coord_ham(a, b) -> int:
    return sum(int(x) != int(y) for x, y in zip(a, b))


def random_bits(rng, rows, cols, density=0.5) -> BitMatrix:
    return BitMatrix.from_dense((rng.random((rows, cols)) < density).astype(np.uint8))


@st.composite
def bit_arrays(draw, max_rows=12, max_cols=140, rows=None, cols=None):
    rows = rows if rows is not None else draw(st.integers(1, max_rows))
    cols = cols if cols is not None else draw(st.integers(1, max_cols))
    return draw(arrays(np.uint8, (rows, cols), elements=st.integers(0, 1)))


@st.composite
def product_pairs(draw, max_dim=20, max_inner=140):
    p = draw(st.integers(1, max_dim))
    q = draw(st.integers(1, max_inner))
    r = draw(st.integers(1, max_dim))
    a = draw(arrays(np.uint8, (p, q), elements=st.integers(0, 1)))
    b = draw(arrays(np.uint8, (q, r), elements=st.integers(0, 1)))
    return a, b


@pytest.fixture
def acceptance_report():
    def record(criterion: int, passed: bool, detail: str) -> None:
        _ACCEPTANCE_LINES.append(f"{'PASS' if passed else 'FAIL'} criterion {criterion}: {detail}")
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
