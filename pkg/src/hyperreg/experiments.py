"""Experiment configuration and seed batteries with CSV/JSON reports."""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Callable, Mapping

from .complex import (
    MAX_K,
    Complex,
    UniformHypergraph,
    VertexClasses,
    complete_complex,
    downward_closure,
    induced_subcomplex,
)
from .counting import count_copies, expected_copies, extension_statistics
from .density import DensityVector
from .errors import ValidationError
from .random_models import SliceSpec, generate_regular_complex, slice_level
from .ramsey import PipelineConfig, color_complete, ramsey_pipeline

KINDS = ("counting-lemma", "extension-lemma", "slicing", "pipeline")


class HierarchyWarning(UserWarning):
    """A constant hierarchy inequality does not hold for this configuration."""


@dataclass
class ExperimentConfig:
    k: int = 3
    ell: int = 3
    n: int = 40
    densities: tuple[float, ...] = (0.5, 0.5)
    delta: float = 0.1
    delta_k: float = 0.2
    r: int = 16
    epsilon: float = 0.25
    beta: float = 0.1
    seeds: tuple[int, ...] = tuple(range(20))
    budget: int = 10**6
    samples: int = 64
    m: int = 40
    slice_p: tuple[float, ...] = (0.5, 0.5)
    slice_tol: float = 0.05
    count_mean_tol: float = 0.10
    count_max_tol: float = 0.25
    typical_min: float = 0.9
    variance_max: float = 0.1
    seed_quorum: float = 0.9
    pipeline_quorum: float = 0.8
    out: str = "results"
    threads: int = 1

    def __post_init__(self):
        for name in ("densities", "seeds", "slice_p"):
            setattr(self, name, tuple(getattr(self, name)))

    def problems(self) -> list[str]:
        """Every violated hard constraint, empty when valid."""
        out = []
        if not self.seeds:
            out.append("seeds must be nonempty")
        if not 2 <= self.k <= MAX_K:
            out.append(f"k must be in 2..{MAX_K}")
        if self.k > self.ell:
            out.append("need k <= ell")
        if len(self.densities) != self.k - 1:
            out.append(f"densities needs {self.k - 1} entries (levels 2..k)")
        ratios = {"delta": self.delta, "delta_k": self.delta_k, "epsilon": self.epsilon,
                  "beta": self.beta, "slice_tol": self.slice_tol,
                  "typical_min": self.typical_min, "seed_quorum": self.seed_quorum,
                  "pipeline_quorum": self.pipeline_quorum}
        ratios.update({f"densities[{i}]": d for i, d in enumerate(self.densities)})
        ratios.update({f"slice_p[{i}]": p for i, p in enumerate(self.slice_p)})
        for name, val in ratios.items():
            if not 0 < val <= 1:
                out.append(f"{name}={val} outside (0,1]")
        if sum(self.slice_p) > 1 + 1e-12:
            out.append("slice_p sums above 1")
        for name in ("n", "m", "r", "budget", "samples", "threads"):
            if getattr(self, name) < 1:
                out.append(f"{name} must be positive")
        return out

    def validate(self) -> None:
        bad = self.problems()
        if bad:
            raise ValidationError("invalid config: " + "; ".join(bad))

    def hierarchy_warnings(self) -> list[str]:
        """Advisory checks of ``1/n << 1/r, delta << delta_k <= min(d)`` and friends."""
        msgs = []
        if not 1 / self.n < self.delta:
            msgs.append(f"1/n={1 / self.n:.3g} is not below delta={self.delta}")
        if not self.delta < self.delta_k:
            msgs.append(f"delta={self.delta} is not below delta_k={self.delta_k}")
        if not 1 / self.r < self.delta_k:
            msgs.append(f"1/r={1 / self.r:.3g} is not below delta_k={self.delta_k}")
        if self.delta_k > min(self.densities):
            msgs.append(f"delta_k={self.delta_k} exceeds the smallest density")
        if self.delta > self.epsilon:
            msgs.append(f"delta={self.delta} exceeds epsilon={self.epsilon}")
        msgs.extend(DensityVector(self.densities).integrality_issues())
        return msgs

    def density_vector(self) -> DensityVector:
        return DensityVector(self.densities)

    def to_dict(self) -> dict:
        d = asdict(self)
        for name in ("densities", "seeds", "slice_p"):
            d[name] = list(d[name])
        return d

    @classmethod
    def from_dict(cls, data: Mapping) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise ValidationError(f"unknown config keys: {sorted(extra)}")
        return cls(**dict(data))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        return cls.from_dict(json.loads(text))

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        return cls.from_json(Path(path).read_text())


def fmt(x) -> str:
    """Report formatting: 6 significant digits for floats, plain decimals for ints."""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        return f"{x:.6g}"
    if x is None:
        return ""
    return str(x)


# -- per-seed workers ----------------------------------------------------------------


def _edge_pattern(k: int, ell: int) -> Complex:
    """Closure of one ``k``-edge, one vertex per class, padded to ``ell`` classes."""
    vc = VertexClasses([[i] for i in range(k)] + [[] for _ in range(ell - k)])
    return downward_closure(UniformHypergraph(k, [tuple(range(k))], vc))


def _counting_row(cfg: ExperimentConfig, seed: int) -> list[dict]:
    d = cfg.density_vector()
    g = generate_regular_complex(cfg.ell, cfg.n, d, seed)
    h = _edge_pattern(cfg.k, cfg.ell)
    exact = count_copies(h, g)
    pred = expected_copies(h, cfg.n, d)
    return [{"seed": seed, "exact": exact, "predicted": pred, "rel_err": abs(exact - pred) / pred}]


def _extension_row(cfg: ExperimentConfig, seed: int) -> list[dict]:
    if cfg.k == 2:
        raise ValidationError("extension battery needs k >= 3")
    d = cfg.density_vector()
    g = generate_regular_complex(cfg.ell, cfg.n, d, seed)
    h_prime = _edge_pattern(cfg.k, cfg.ell)
    h = induced_subcomplex(h_prime, range(cfg.k - 1))
    st = extension_statistics(h, h_prime, g, cfg.epsilon, d, n=cfg.n)
    return [{"seed": seed, "copies": len(st.counts), "mean": st.mean, "predicted": st.predicted,
             "typical_fraction": st.typical_fraction, "relative_variance": st.relative_variance}]


def _slicing_rows(cfg: ExperimentConfig, seed: int) -> list[dict]:
    g = complete_complex(2, cfg.n, 2)
    parts = slice_level(g, 2, SliceSpec(cfg.slice_p, seed=seed))
    union = set().union(*parts)
    disjoint = sum(len(p) for p in parts) == len(union)
    exact = disjoint and union == g.edges[2]
    total = len(g.edges[2])
    rows = []
    for i, p in enumerate(cfg.slice_p, start=1):
        dens = len(parts[i]) / total
        rows.append({"seed": seed, "part": i, "size": len(parts[i]), "density": dens,
                     "target": p, "deviation": abs(dens - p), "exact_partition": exact})
    return rows


def _pipeline_row(cfg: ExperimentConfig, seed: int) -> list[dict]:
    h = UniformHypergraph(cfg.k, [tuple(range(cfg.k)), tuple(range(cfg.k, 2 * cfg.k))])
    c = color_complete(cfg.m, cfg.k, seed=seed)
    pc = PipelineConfig(delta_k=cfg.delta_k, r=cfg.r, samples=cfg.samples, seed=seed,
                        budget=cfg.budget)
    res = ramsey_pipeline(h, c, pc)
    red = res.trace.get("reduced", {})
    return [{"seed": seed, "success": res.success, "colour": res.colour or "",
             "failed_stage": res.failed_stage or "",
             "fruitful_fraction": red.get("fruitful_fraction"),
             "nodes": res.trace.get("embedding", {}).get("nodes")}]


WORKERS: dict[str, Callable[[ExperimentConfig, int], list[dict]]] = {
    "counting-lemma": _counting_row,
    "extension-lemma": _extension_row,
    "slicing": _slicing_rows,
    "pipeline": _pipeline_row,
}

COLUMNS = {
    "counting-lemma": ["seed", "exact", "predicted", "rel_err"],
    "extension-lemma": ["seed", "copies", "mean", "predicted", "typical_fraction",
                        "relative_variance"],
    "slicing": ["seed", "part", "size", "density", "target", "deviation", "exact_partition"],
    "pipeline": ["seed", "success", "colour", "failed_stage", "fruitful_fraction", "nodes"],
}


def _verdict(kind: str, cfg: ExperimentConfig, rows: list[dict]) -> tuple[bool, dict]:
    seeds = len(cfg.seeds)
    if kind == "counting-lemma":
        errs = [r["rel_err"] for r in rows]
        agg = {"mean_rel_err": sum(errs) / len(errs), "max_rel_err": max(errs)}
        ok = agg["mean_rel_err"] <= cfg.count_mean_tol and agg["max_rel_err"] <= cfg.count_max_tol
    elif kind == "extension-lemma":
        good = sum(1 for r in rows if r["typical_fraction"] >= cfg.typical_min
                   and r["relative_variance"] <= cfg.variance_max)
        agg = {"good_seeds": good,
               "mean_typical_fraction": sum(r["typical_fraction"] for r in rows) / seeds,
               "mean_relative_variance": sum(r["relative_variance"] for r in rows) / seeds}
        ok = good >= math.ceil(cfg.seed_quorum * seeds)
    elif kind == "slicing":
        agg = {"max_deviation": max(r["deviation"] for r in rows),
               "exact_partitions": sum(1 for r in rows if r["part"] == 1 and r["exact_partition"])}
        ok = agg["max_deviation"] <= cfg.slice_tol and agg["exact_partitions"] == seeds
    else:
        wins = sum(1 for r in rows if r["success"])
        agg = {"successes": wins, "success_rate": wins / seeds}
        ok = wins >= math.ceil(cfg.pipeline_quorum * seeds)
    return ok, agg


@dataclass
class ExperimentReport:
    kind: str
    passed: bool
    rows: list[dict]
    aggregate: dict
    warnings: list[str] = field(default_factory=list)
    errors: dict[int, str] = field(default_factory=dict)
    csv_path: Path | None = None
    json_path: Path | None = None

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        cols = COLUMNS[self.kind]
        w.writerow(cols)
        for row in self.rows:
            w.writerow([fmt(row.get(c)) for c in cols])
        return buf.getvalue()

    def summary(self, cfg: ExperimentConfig) -> dict:
        return {
            "kind": self.kind,
            "pass": self.passed,
            "aggregate": {k: fmt(v) if isinstance(v, float) else v for k, v in self.aggregate.items()},
            "warnings": self.warnings,
            "errors": {str(s): e for s, e in sorted(self.errors.items())},
            "config": cfg.to_dict(),
        }


def _run_seed(args) -> tuple[int, list[dict] | None, str | None]:
    kind, cfg_dict, seed = args
    cfg = ExperimentConfig.from_dict(cfg_dict)
    try:
        return seed, WORKERS[kind](cfg, seed), None
    except Exception as exc:  # recorded per seed
        return seed, None, f"{type(exc).__name__}: {exc}"


def run_experiment(cfg: ExperimentConfig, kind: str, out_dir: str | Path | None = None) -> ExperimentReport:
    """Run one battery over every seed and write ``<kind>.csv`` and ``<kind>.json``.

    Seeds may run in parallel (``cfg.threads``); rows are merged in seed order
    so reruns of the same config produce identical files.
    """
    if kind not in WORKERS:
        raise ValidationError(f"unknown experiment kind {kind!r}; choose from {KINDS}")
    cfg.validate()
    notes = cfg.hierarchy_warnings()
    for msg in notes:
        warnings.warn(msg, HierarchyWarning, stacklevel=2)
    jobs = [(kind, cfg.to_dict(), s) for s in cfg.seeds]
    if cfg.threads > 1:
        with ProcessPoolExecutor(cfg.threads) as pool:
            results = list(pool.map(_run_seed, jobs))
    else:
        results = [_run_seed(j) for j in jobs]
    results.sort(key=lambda t: cfg.seeds.index(t[0]))
    rows: list[dict] = []
    errors: dict[int, str] = {}
    for seed, seed_rows, err in results:
        if err is not None:
            errors[seed] = err
        else:
            rows.extend(seed_rows)
    if rows:
        passed, agg = _verdict(kind, cfg, rows)
        passed = passed and not errors
    else:
        passed, agg = False, {}
    report = ExperimentReport(kind, passed, rows, agg, notes, errors)
    out = Path(out_dir if out_dir is not None else cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    report.csv_path = out / f"{kind}.csv"
    report.json_path = out / f"{kind}.json"
    report.csv_path.write_text(report.csv_text())
    report.json_path.write_text(json.dumps(report.summary(cfg), indent=2, sort_keys=True) + "\n")
    return report
