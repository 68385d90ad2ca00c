import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clusmat import (BitMatrix, ParameterError, assign_nearest, brute_force_discrete_kcenter,
                     gonzalez, project, randomized_kcenter)
from clusmat.bitmatrix import DimensionError
from clusmat.clustering import projection_dim
from clusmat.planted import PlantedSpec, generate

from conftest import bit_arrays, coord_ham


def pts(*rows):
    return BitMatrix.from_strings(list(rows))


def test_gonzalez_hand_trace():
    c = gonzalez(pts("000", "001", "111"), 2, first=0)
    assert c.center_indices.tolist() == [0, 2]
    assert c.assignment.tolist() == [0, 0, 1]
    assert c.radius == 1
    assert c.radius_history == (3, 1)


def test_gonzalez_trivial_cases():
    rng = np.random.default_rng(1)
    m = BitMatrix.from_dense((rng.random((9, 20)) < 0.5).astype(np.uint8))
    assert gonzalez(m, 9).radius == 0
    assert gonzalez(pts("00", "00", "00"), 1).radius == 0
    # duplicates still give distinct center indices
    c = gonzalez(pts("00", "00", "00"), 3)
    assert sorted(c.center_indices.tolist()) == [0, 1, 2]


@pytest.mark.parametrize("k", [0, 4])
def test_gonzalez_bad_k(k):
    with pytest.raises(ParameterError):
        gonzalez(pts("0", "1", "1"), k)


def test_gonzalez_bad_first():
    with pytest.raises(ParameterError):
        gonzalez(pts("0", "1"), 1, first=2)


def test_assign_nearest_examples():
    c = assign_nearest(pts("01", "10"), pts("01"))
    assert c.assignment.tolist() == [0, 0] and c.radius == 2
    m = pts("0110", "1011", "0000")
    assert assign_nearest(m, m).radius == 0
    c = assign_nearest(pts("000", "011"), pts("001", "111"))
    assert c.assignment.tolist() == [0, 0]
    assert c.radius == 1
    with pytest.raises(DimensionError):
        assign_nearest(pts("00"), pts("000"))


def test_brute_force_examples():
    assert brute_force_discrete_kcenter(pts("000", "001", "111"), 2) == 1
    assert brute_force_discrete_kcenter(pts("0101", "1100", "0011"), 3) == 0
    assert brute_force_discrete_kcenter(pts("00", "11"), 1) == 2


def test_brute_force_guard():
    m = BitMatrix.from_dense(np.zeros((17, 3), dtype=np.uint8))
    with pytest.raises(ParameterError):
        brute_force_discrete_kcenter(m, 2)
    with pytest.raises(ParameterError):
        brute_force_discrete_kcenter(m.take_rows(range(10)), 5)


@settings(max_examples=150)
@given(bit_arrays(max_rows=12, max_cols=10), st.data())
def test_gonzalez_invariants(arr, data):
    m = BitMatrix.from_dense(arr)
    k = data.draw(st.integers(1, min(3, m.rows)))
    first = data.draw(st.integers(0, m.rows - 1))
    c = gonzalez(m, k, first)
    assert c.center_indices[0] == first
    assert len(set(c.center_indices.tolist())) == k
    # nearest assignment with lowest-index tie-break, radius certified
    table = [[coord_ham(arr[i], arr[j]) for j in c.center_indices] for i in range(m.rows)]
    assert c.assignment.tolist() == [int(np.argmin(row)) for row in table]
    assert c.radius == max(min(row) for row in table)
    assert c.radius <= 2 * brute_force_discrete_kcenter(m, k)
    assert all(x >= y for x, y in zip(c.radius_history, c.radius_history[1:]))
    # re-assigning against the same centers changes nothing
    again = assign_nearest(m, c.centers)
    assert np.array_equal(again.assignment, c.assignment)


def test_projection_dimension_rule():
    assert projection_dim(64, 0.25, 10_000) == int(np.ceil(8 * np.log(64) / 0.0625))
    assert projection_dim(64, 0.25, 100) == 100


def test_project_identical_points_and_determinism():
    m = pts("0110", "0110")
    pr = project(m, 0.3, seed=5)
    assert np.array_equal(pr.coords[0], pr.coords[1])
    assert pr.sq_distances_to(0).tolist() == [0, 0]
    rng = np.random.default_rng(0)
    x = BitMatrix.from_dense((rng.random((30, 90)) < 0.5).astype(np.uint8))
    assert np.array_equal(project(x, 0.2, seed=11).coords, project(x, 0.2, seed=11).coords)


@pytest.mark.parametrize("eps", [0.0, 0.5, -0.1, 0.7])
def test_project_rejects_epsilon(eps):
    with pytest.raises(ParameterError):
        project(pts("01", "10"), eps, seed=0)


def test_projection_preserves_distances():
    rng = np.random.default_rng(2024)
    dense = (rng.random((64, 256)) < 0.5).astype(np.uint8)
    m = BitMatrix.from_dense(dense)
    eps = 0.25
    pr = project(m, eps, seed=7)
    good = total = 0
    for i in range(64):
        sq = pr.sq_distances_to(i)
        for j in range(i + 1, 64):
            h = coord_ham(dense[i], dense[j])
            ratio = sq[j] / (pr.scale * h)
            good += 1 - eps <= ratio <= 1 + eps
            total += 1
    assert good / total >= 0.95


def test_randomized_kcenter_trivial_and_deterministic():
    rng = np.random.default_rng(4)
    m = BitMatrix.from_dense((rng.random((12, 40)) < 0.5).astype(np.uint8))
    assert randomized_kcenter(m, 12, 0.25, seed=1).radius == 0
    c1 = randomized_kcenter(m, 4, 0.25, seed=9)
    c2 = randomized_kcenter(m, 4, 0.25, seed=9)
    assert np.array_equal(c1.center_indices, c2.center_indices)
    assert np.array_equal(c1.assignment, c2.assignment)


@settings(max_examples=40)
@given(bit_arrays(max_rows=30, max_cols=70), st.data())
def test_randomized_radius_is_exact(arr, data):
    m = BitMatrix.from_dense(arr)
    if m.rows < 2:
        return
    k = data.draw(st.integers(1, m.rows))
    c = randomized_kcenter(m, k, 0.25, seed=data.draw(st.integers(0, 2**32 - 1)))
    exact = [min(coord_ham(arr[i], arr[j]) for j in c.center_indices) for i in range(m.rows)]
    assert c.radius == max(exact)
    assert c.distances.tolist() == exact


def test_randomized_planted_bound():
    s, hits = 8, 0
    for seed in range(100):
        inst = generate(PlantedSpec(200, 128, 8, s, seed=seed))
        c = randomized_kcenter(inst.matrix, 8, 0.25, seed=seed)
        hits += c.radius <= 2.25 * s
    assert hits >= 90
