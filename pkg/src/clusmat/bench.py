"""Benchmark sweeps over shapes, cluster counts and seeds, reported as CSV."""
from __future__ import annotations

import csv
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO

import numpy as np

from .approx import mmclus_approx, mmclus_r_approx
from .bitmatrix import BitMatrix, naive_multiply
from .exact import exact_clustered
from .planted import PlantedSpec, generate, random_matrix
from .query import answer_all, mmclus_preproc, total_query_work

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

ALGOS = ("naive", "st", "query", "approx", "rapprox")
COLUMNS = ("shape", "p", "q", "r", "ell", "k", "seed", "algo", "side", "time",
           "radius", "ham_cost", "delta_updates", "max_err")


class ConfigError(ValueError):
    pass


@dataclass
class BenchConfig:
    shapes: list[tuple[int, int, int]]
    ells: list[int]
    ks: list[int]
    seeds: list[int] = field(default_factory=lambda: [0])
    algos: list[str] = field(default_factory=lambda: list(ALGOS))
    epsilon: float = 0.25
    density: float = 0.5
    planted_clusters: int | None = None
    planted_radius: int = 0
    threads: int = 1

    @classmethod
    def from_toml(cls, text: str) -> "BenchConfig":
        try:
            raw = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"bad bench config: {exc}") from exc
        planted = raw.pop("planted", None)
        try:
            shapes = [_parse_shape(s) for s in raw.pop("shapes")]
            cfg = cls(shapes=shapes, ells=list(raw.pop("ells")), ks=list(raw.pop("ks")))
        except KeyError as exc:
            raise ConfigError(f"bench config is missing {exc.args[0]!r}") from exc
        for key in ("seeds", "algos", "epsilon", "density", "threads"):
            if key in raw:
                setattr(cfg, key, raw.pop(key))
        if planted is not None:
            cfg.planted_clusters = int(planted.get("clusters", 1))
            cfg.planted_radius = int(planted.get("radius", 0))
            cfg.density = float(planted.get("density", cfg.density))
        if raw:
            raise ConfigError(f"unknown bench config keys: {sorted(raw)}")
        unknown = set(cfg.algos) - set(ALGOS)
        if unknown:
            raise ConfigError(f"unknown algorithms {sorted(unknown)}; choose from {ALGOS}")
        return cfg

    @classmethod
    def load(cls, path: str | Path) -> "BenchConfig":
        return cls.from_toml(Path(path).read_text())


def _parse_shape(s: str) -> tuple[int, int, int]:
    parts = s.lower().split("x")
    if len(parts) != 3 or not all(p.strip().isdigit() for p in parts):
        raise ConfigError(f"shape must look like 'PxQxR', got {s!r}")
    return tuple(int(p) for p in parts)


def make_pair(cfg: BenchConfig, p: int, q: int, r: int, seed: int) -> tuple[BitMatrix, BitMatrix]:
    if cfg.planted_clusters is None:
        rng = np.random.default_rng(seed)
        return random_matrix(p, q, cfg.density, rng), random_matrix(q, r, cfg.density, rng)
    a = generate(PlantedSpec(p, q, min(cfg.planted_clusters, p), cfg.planted_radius,
                             cfg.density, seed, "rows")).matrix
    b = generate(PlantedSpec(q, r, min(cfg.planted_clusters, r), cfg.planted_radius,
                             cfg.density, seed + 1_000_003, "cols")).matrix
    return a, b


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def run_bench(cfg: BenchConfig) -> list[dict]:
    rows = []
    for p, q, r in cfg.shapes:
        shape = f"{p}x{q}x{r}"
        for seed in cfg.seeds:
            a, b = make_pair(cfg, p, q, r, seed)
            exact, t = _timed(lambda: naive_multiply(a, b, cfg.threads))
            base = dict(shape=shape, p=p, q=q, r=r, seed=seed)
            rows.append(dict(base, ell="", k="", algo="naive", side="", time=t, radius="",
                             ham_cost="", delta_updates="", max_err=0))
            for ell in cfg.ells:
                for k in cfg.ks:
                    if ell > p or k > r:
                        continue
                    rows.extend(_run_cell(cfg, a, b, exact, dict(base, ell=ell, k=k)))
    return rows


def _max_err(c: np.ndarray, exact: np.ndarray) -> int:
    return int(np.abs(c.astype(np.int64) - exact).max())


def _run_cell(cfg: BenchConfig, a, b, exact, base: dict) -> list[dict]:
    ell, k = base["ell"], base["k"]
    out = []
    for algo in cfg.algos:
        row = dict(base, algo=algo, side="", radius="", ham_cost="", delta_updates="")
        if algo == "naive":
            continue
        if algo == "st":
            res, t = _timed(lambda: exact_clustered(a, b, ell, k, threads=cfg.threads))
            clus = res.row_clustering if res.side == "rows" else res.col_clustering
            row.update(side=res.side, radius=clus.radius, ham_cost=res.ham_cost,
                       delta_updates=res.delta_updates, max_err=_max_err(res.C, exact))
        elif algo == "query":
            count = ell if a.rows >= b.cols else k

            def job():
                state = mmclus_preproc(a, b, count, threads=cfg.threads)
                return state, answer_all(state)

            (state, c), t = _timed(job)
            row.update(side="cols" if state.transposed else "rows", radius=state.radius_left,
                       delta_updates=total_query_work(state), max_err=_max_err(c, exact))
        elif algo == "approx":
            count = ell if a.rows >= b.cols else k
            res, t = _timed(lambda: mmclus_approx(a, b, count, threads=cfg.threads))
            row.update(side=res.side, radius=res.certificate, max_err=_max_err(res.D, exact))
        else:
            res, t = _timed(lambda: mmclus_r_approx(a, b, ell, k, cfg.epsilon, base["seed"],
                                                     threads=cfg.threads))
            row.update(side=res.side, radius=res.certificate, max_err=_max_err(res.D, exact))
        row["time"] = t
        out.append(row)
    return out


def write_report(rows: list[dict], out: IO[str]) -> None:
    writer = csv.DictWriter(out, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({**row, "time": f"{row['time']:.6f}"})
