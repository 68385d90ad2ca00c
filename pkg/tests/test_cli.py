import numpy as np
import pytest

from clusmat import BitMatrix, naive_multiply
from clusmat.cli import main
from clusmat.formats import load_matrix, read_csv, save_matrix
from clusmat.planted import PlantedSpec

from conftest import dense_oracle, random_bits


@pytest.fixture(autouse=True)
def single_thread(monkeypatch):
    monkeypatch.setenv("CLUSMAT_THREADS", "1")


@pytest.fixture
def pair(tmp_path):
    rng = np.random.default_rng(0)
    a, b = random_bits(rng, 40, 70), random_bits(rng, 70, 25)
    save_matrix(a, tmp_path / "a.bm")
    save_matrix(b, tmp_path / "b.bmb")
    return a, b, str(tmp_path / "a.bm"), str(tmp_path / "b.bmb")


def stats_of(err: str) -> dict:
    line = [l for l in err.splitlines() if "=" in l][-1]
    return dict(tok.split("=", 1) for tok in line.split())


def test_gen_deterministic_with_meta(tmp_path):
    args = ["gen", "--rows", "30", "--cols", "50", "--clusters", "4", "--radius", "3", "--seed", "9"]
    assert main(args[:1] + [str(tmp_path / "x.bm")] + args[1:]) == 0
    assert main(args[:1] + [str(tmp_path / "y.bm")] + args[1:]) == 0
    assert (tmp_path / "x.bm").read_bytes() == (tmp_path / "y.bm").read_bytes()
    meta = (tmp_path / "x.bm.meta").read_text().strip()
    assert PlantedSpec.from_meta(meta) == PlantedSpec(30, 50, 4, 3, 0.5, 9, "rows")


def test_gen_zero_radius(tmp_path):
    out = tmp_path / "z.bmb"
    assert main(["gen", str(out), "--rows", "25", "--cols", "20", "--clusters", "6", "--radius", "0"]) == 0
    assert len({tuple(r) for r in load_matrix(out).to_dense().tolist()}) == 6


def test_convert_round_trip(tmp_path, pair):
    _, _, a_path, _ = pair
    assert main(["convert", a_path, str(tmp_path / "a2.bmb")]) == 0
    assert main(["convert", str(tmp_path / "a2.bmb"), str(tmp_path / "a3.bm")]) == 0
    assert (tmp_path / "a3.bm").read_bytes() == open(a_path, "rb").read()


def test_multiply_identity(tmp_path, capsys):
    eye = BitMatrix.from_dense(np.eye(4, dtype=np.uint8))
    save_matrix(eye, tmp_path / "i.bm")
    assert main(["multiply", str(tmp_path / "i.bm"), str(tmp_path / "i.bm")]) == 0
    out = capsys.readouterr().out
    assert out == "".join(",".join("1" if i == j else "0" for j in range(4)) + "\n" for i in range(4))


@pytest.mark.parametrize("extra", [
    ["--algo", "st", "--ell", "5", "--k", "4"],
    ["--algo", "query", "--ell", "5"],
    ["--algo", "query", "--randomized", "--ell", "5", "--k", "4", "--seed", "3"],
    ["--algo", "st", "--ell", "5", "--k", "4", "--first-center", "random", "--seed", "2"],
])
def test_multiply_matches_naive(tmp_path, pair, capsys, extra):
    _, _, a_path, b_path = pair
    assert main(["multiply", a_path, b_path, "-o", str(tmp_path / "naive.csv")]) == 0
    assert main(["multiply", a_path, b_path, "-o", str(tmp_path / "other.csv")] + extra) == 0
    assert (tmp_path / "naive.csv").read_bytes() == (tmp_path / "other.csv").read_bytes()
    stats = stats_of(capsys.readouterr().err)
    assert float(stats["time"]) >= 0


def test_multiply_with_tree_file(tmp_path, pair, capsys):
    a, b, a_path, b_path = pair
    edges = "\n".join(f"{i - 1} {i}" for i in range(1, a.rows))
    (tmp_path / "t.txt").write_text(edges + "\n")
    assert main(["multiply", a_path, b_path, "--algo", "st", "--tree", str(tmp_path / "t.txt"),
                 "-o", str(tmp_path / "c.csv")]) == 0
    assert np.array_equal(read_csv(tmp_path / "c.csv"), dense_oracle(a, b))


def test_multiply_stats_line(pair, capsys):
    _, _, a_path, b_path = pair
    assert main(["multiply", a_path, b_path, "--algo", "st", "--ell", "4", "--k", "4"]) == 0
    stats = stats_of(capsys.readouterr().err)
    for key in ("time", "radius_a", "radius_b", "ham_cost_a", "ham_cost_b", "delta_updates", "side"):
        assert key in stats


def test_shape_mismatch_exit_code(tmp_path, pair, capsys):
    _, _, a_path, _ = pair
    assert main(["multiply", a_path, a_path]) == 2
    assert "error" in capsys.readouterr().err


def test_parse_error_exit_code(tmp_path, pair):
    _, _, a_path, _ = pair
    (tmp_path / "bad.bm").write_text("2 2\n10\n2x\n")
    assert main(["multiply", str(tmp_path / "bad.bm"), a_path]) == 3


def test_missing_cluster_count(pair):
    _, _, a_path, b_path = pair
    assert main(["multiply", a_path, b_path, "--algo", "st", "--ell", "3"]) == 4


def test_approx_certificate_and_verify(tmp_path, pair, capsys):
    a, b, a_path, b_path = pair
    assert main(["approx", a_path, b_path, "--ell", "6", "--verify", "-o", str(tmp_path / "d.csv")]) == 0
    stats = stats_of(capsys.readouterr().err.replace("\n", " "))
    assert int(stats["observed_max_err"]) <= int(stats["certificate"])
    d = read_csv(tmp_path / "d.csv")
    assert np.abs(d - dense_oracle(a, b)).max() == int(stats["observed_max_err"])


def test_approx_all_centers_zero_certificate(pair, capsys):
    _, _, a_path, b_path = pair
    assert main(["approx", a_path, b_path, "--ell", "40"]) == 0
    assert "certificate=0" in capsys.readouterr().err


def test_approx_randomized_reproducible(tmp_path, pair, capsys):
    _, _, a_path, b_path = pair
    for name in ("r1.csv", "r2.csv"):
        args = ["approx", a_path, b_path, "--randomized", "--ell", "5", "--k", "4",
                "--epsilon", "0.3", "--seed", "17", "--verify", "-o", str(tmp_path / name)]
        assert main(args) == 0
    assert (tmp_path / "r1.csv").read_bytes() == (tmp_path / "r2.csv").read_bytes()
    err = capsys.readouterr().err
    certs = [int(l.split("=")[1]) for l in err.splitlines() if l.startswith("certificate=")]
    errs = [int(l.split("=")[1]) for l in err.splitlines() if l.startswith("observed_max_err=")]
    assert all(e <= c for e, c in zip(errs, certs))


def test_approx_planted_certificate(tmp_path, capsys):
    a_path, b_path = tmp_path / "pa.bmb", tmp_path / "pb.bmb"
    assert main(["gen", str(a_path), "--rows", "120", "--cols", "96", "--clusters", "8",
                 "--radius", "5", "--seed", "1"]) == 0
    assert main(["gen", str(b_path), "--rows", "96", "--cols", "40", "--clusters", "4",
                 "--radius", "3", "--seed", "2", "--by", "cols"]) == 0
    assert main(["approx", str(a_path), str(b_path), "--ell", "8", "-o", str(tmp_path / "d.csv")]) == 0
    cert = int(capsys.readouterr().err.split("certificate=")[1].split()[0])
    assert cert <= 2 * 5


@pytest.mark.parametrize("randomized", [False, True])
def test_preproc_and_query(tmp_path, pair, capsys, randomized):
    a, b, a_path, b_path = pair
    state = str(tmp_path / "s.pps")
    extra = ["--randomized", "--ell", "6", "--k", "5", "--seed", "4"] if randomized else ["--ell", "6"]
    assert main(["preproc", a_path, b_path, "-o", state] + extra) == 0
    (tmp_path / "pairs.txt").write_text("0,0\n39, 24\n")
    capsys.readouterr()
    assert main(["query", state, a_path, b_path, "--pair", "3,7", "--pairs-file",
                 str(tmp_path / "pairs.txt")]) == 0
    out = capsys.readouterr().out.split()
    c = naive_multiply(a, b)
    for line in out:
        i, j, v = map(int, line.split(","))
        assert v == c[i, j]
    assert len(out) == 3


def test_query_rejects_wrong_matrices(tmp_path, pair):
    a, b, a_path, b_path = pair
    state = str(tmp_path / "s.pps")
    assert main(["preproc", a_path, b_path, "--ell", "3", "-o", state]) == 0
    rng = np.random.default_rng(99)
    save_matrix(random_bits(rng, 40, 70), tmp_path / "other.bm")
    assert main(["query", state, str(tmp_path / "other.bm"), b_path, "--pair", "0,0"]) == 4
    assert main(["query", state, a_path, b_path, "--pair", "40,0"]) == 4


def test_threads_env_override(monkeypatch):
    from clusmat.cli import resolve_threads
    monkeypatch.setenv("CLUSMAT_THREADS", "3")
    assert resolve_threads(8) == 3
    monkeypatch.delenv("CLUSMAT_THREADS")
    assert resolve_threads(5) == 5
    assert resolve_threads(None) >= 1
