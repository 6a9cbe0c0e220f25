"""Multi-run experiments: per-(instance, algorithm) statistics and emission.

Instances are given either as paths to canonical ``.sukp`` files or as
generator specs ``gen:m:n:density:ratio:seed``. Algorithms are looked up by
name in :data:`ALGORITHMS`.

Run ``r`` of instance ``i`` under algorithm ``a`` is seeded with
``derive_seed(master_seed, i, a, r)``, so results do not depend on how runs
are scheduled across workers. Standard deviations are population standard
deviations (divide by the number of runs).
"""

from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from sukp.dtlbo import DtlboParams, derive_seed, run
from sukp.instance import generate_instance, read_instance
from sukp.repair import Repairer
from sukp.stats import RankTable, friedman_ranks

STD_CONVENTION = "population"
FORMATS = ("csv", "json", "markdown")


@dataclass(frozen=True)
class AlgorithmSpec:
    name: str
    mode: str
    repair: str
    eos: bool = True
    sf: bool = True


ALGORITHMS = {
    spec.name: spec
    for spec in (
        AlgorithmSpec("I-DTLBO", "item", "isro"),
        AlgorithmSpec("E-DTLBO", "element", "esro"),
        AlgorithmSpec("S-DTLBO", "item", "static"),
        AlgorithmSpec("I-TLBO", "item", "isro", eos=False, sf=False),
        AlgorithmSpec("E-TLBO", "element", "esro", eos=False, sf=False),
        AlgorithmSpec("S-TLBO", "item", "static", eos=False, sf=False),
    )
}


def algorithm(name: str) -> AlgorithmSpec:
    try:
        return ALGORITHMS[name]
    except KeyError:
        raise ValueError(f"unknown algorithm {name!r}; known: {', '.join(ALGORITHMS)}") from None


def load_instance_spec(spec: str):
    """Load a ``.sukp`` path or build a ``gen:m:n:density:ratio:seed`` instance."""
    if spec.startswith("gen:"):
        parts = spec[4:].split(":")
        if len(parts) != 5:
            raise ValueError(f"generator spec {spec!r} must be gen:m:n:density:ratio:seed")
        try:
            m, n, seed = int(parts[0]), int(parts[1]), int(parts[4])
            density, ratio = float(parts[2]), float(parts[3])
        except ValueError:
            raise ValueError(f"generator spec {spec!r} has a non-numeric field") from None
        return generate_instance(m, n, density, ratio, seed)
    return read_instance(spec)


@lru_cache(maxsize=32)
def _cached_instance(spec: str):
    return load_instance_spec(spec)


@lru_cache(maxsize=64)
def _cached_repairer(spec: str, kind: str):
    return Repairer(_cached_instance(spec), kind)


def instance_label(spec: str) -> str:
    inst = _cached_instance(spec)
    if inst.name:
        return inst.name
    return os.path.splitext(os.path.basename(spec))[0]


@dataclass
class ExperimentConfig:
    instances: list
    algorithms: list
    runs: int = 50
    master_seed: int = 0
    popsize: int = 20
    mfc: int | None = None
    output: str | None = None
    format: str = "csv"
    jobs: int = 1

    def validate(self):
        if not self.instances:
            raise ValueError("instances: at least one instance is required")
        if not self.algorithms:
            raise ValueError("algorithms: at least one algorithm is required")
        for name in self.algorithms:
            algorithm(name)
        if self.runs < 1:
            raise ValueError("runs: must be at least 1")
        if self.popsize < 2:
            raise ValueError("popsize: must be at least 2")
        if self.master_seed < 0:
            raise ValueError("master_seed: must be nonnegative")
        if self.format not in FORMATS:
            raise ValueError(f"format: must be one of {FORMATS}")
        if self.jobs < 1:
            raise ValueError("jobs: must be at least 1")
        return self


class ConfigError(ValueError):
    pass


_CONFIG_FIELDS = {
    "instances": lambda v: [s.strip() for s in v.split(",") if s.strip()],
    "algorithms": lambda v: [s.strip() for s in v.split(",") if s.strip()],
    "runs": int,
    "master_seed": int,
    "popsize": int,
    "mfc": lambda v: int(v) if v else None,
    "output": lambda v: v or None,
    "format": str,
    "jobs": int,
}


def parse_config(text: str, source: str = "config") -> ExperimentConfig:
    """Parse the flat ``key = value`` experiment format (``#`` starts a comment)."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, _, value = (s.strip() for s in line.partition("="))
        if key not in _CONFIG_FIELDS:
            raise ConfigError(f"{source}:{lineno}: {key}: unknown key")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: {key}: duplicate key")
        try:
            values[key] = _CONFIG_FIELDS[key](value)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: {key}: {exc}") from None
    for key in ("instances", "algorithms"):
        if key not in values:
            raise ConfigError(f"{source}: {key}: missing required key")
    try:
        return ExperimentConfig(**values).validate()
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from None


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), source=str(path))


@dataclass
class StatsRow:
    instance: str
    algorithm: str
    best: float
    worst: float
    mean: float
    std: float
    per_run: list = field(default_factory=list)
    seeds: list = field(default_factory=list)
    evaluations: list = field(default_factory=list)

    @classmethod
    def from_runs(cls, instance, algorithm, fitnesses, seeds=(), evaluations=()):
        f = np.asarray(fitnesses, dtype=np.float64)
        return cls(
            instance, algorithm,
            float(f.max()), float(f.min()), float(f.mean()), float(f.std(ddof=0)),
            [float(v) for v in f], list(seeds), list(evaluations),
        )


def _run_task(task):
    spec, alg_name, popsize, mfc, seed = task
    alg = algorithm(alg_name)
    repair = _cached_repairer(spec, alg.repair)
    params = DtlboParams(
        popsize=popsize, mfc=mfc, mode=alg.mode, seed=seed,
        repair=alg.repair, eos=alg.eos, sf=alg.sf,
    )
    result = run(repair.inst, params, repair)
    return result.fitness, result.evaluations_used


def run_experiment(config: ExperimentConfig) -> list[StatsRow]:
    config.validate()
    for spec in config.instances:
        _cached_instance(spec)
    tasks, keys = [], []
    for i, spec in enumerate(config.instances):
        for a, name in enumerate(config.algorithms):
            for r in range(config.runs):
                seed = derive_seed(config.master_seed, i, a, r)
                tasks.append((spec, name, config.popsize, config.mfc, seed))
                keys.append((i, a))
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(_run_task, tasks, chunksize=max(1, config.runs // 4)))
    else:
        results = [_run_task(t) for t in tasks]

    rows = []
    for i, spec in enumerate(config.instances):
        for a, name in enumerate(config.algorithms):
            picked = [(t, res) for t, k, res in zip(tasks, keys, results) if k == (i, a)]
            rows.append(StatsRow.from_runs(
                instance_label(spec), name,
                [res[0] for _, res in picked],
                seeds=[t[4] for t, _ in picked],
                evaluations=[res[1] for _, res in picked],
            ))
    return rows


def means_matrix(rows: list[StatsRow]) -> tuple[list, list, np.ndarray]:
    instances = list(dict.fromkeys(r.instance for r in rows))
    algorithms = list(dict.fromkeys(r.algorithm for r in rows))
    x = np.full((len(instances), len(algorithms)), np.nan)
    for r in rows:
        x[instances.index(r.instance), algorithms.index(r.algorithm)] = r.mean
    return instances, algorithms, x


def rank_rows(rows: list[StatsRow], alpha: float = 0.05) -> RankTable | None:
    """Friedman ranks on per-instance means; ``None`` when fewer than 2 algorithms or instances."""
    instances, algorithms, x = means_matrix(rows)
    if len(algorithms) < 2 or len(instances) < 2:
        return None
    return friedman_ranks(x, algorithms, alpha)


# ---------------------------------------------------------------------------
# emission

RUN_FIELDS = ["instance", "algorithm", "run", "seed", "best_fitness", "evaluations"]
SUMMARY_FIELDS = ["instance", "algorithm", "best", "worst", "mean", "std"]
RANK_FIELDS = ["algorithm", "avg_rank", "diff_to_leader", "significant"]


def fmt(x) -> str:
    """Shortest lossless text for a number (integers without a trailing .0)."""
    if isinstance(x, (bool, np.bool_)):
        return "yes" if x else "no"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if x.is_integer() and abs(x) < 2**53:
        return str(int(x))
    return repr(x)


def _run_records(rows):
    for row in rows:
        for r, (f, s, e) in enumerate(zip(row.per_run, row.seeds, row.evaluations)):
            yield {"instance": row.instance, "algorithm": row.algorithm, "run": r,
                   "seed": s, "best_fitness": f, "evaluations": e}


def _rank_records(ranks: RankTable | None):
    if ranks is None:
        return []
    diffs = ranks.differences()
    sig = ranks.significant()
    out = []
    for a, r in zip(ranks.algorithms, ranks.avg_ranks):
        out.append({"algorithm": a, "avg_rank": float(r),
                    "diff_to_leader": diffs.get(a, 0.0), "significant": sig.get(a, False)})
    return out


def _write_csv(path, fields, records):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(fields)
        for rec in records:
            w.writerow([v if isinstance(v, str) else fmt(v) for v in (rec[f] for f in fields)])


def _summary_records(rows):
    return [{f: getattr(r, f) for f in SUMMARY_FIELDS} for r in rows]


def _markdown(rows, ranks) -> str:
    instances, algorithms, _ = means_matrix(rows) if rows else ([], [], None)
    by_key = {(r.instance, r.algorithm): r for r in rows}
    lines = ["| Instance | Result | " + " | ".join(algorithms) + " |",
             "|---|---|" + "---|" * len(algorithms)]
    for inst in instances:
        for label, attr in (("Best", "best"), ("Mean", "mean"), ("Worst", "worst"), ("Std", "std")):
            cells = []
            for a in algorithms:
                row = by_key.get((inst, a))
                cells.append("" if row is None else f"{getattr(row, attr):.2f}".rstrip("0").rstrip("."))
            lines.append(f"| {inst if label == 'Best' else ''} | {label} | " + " | ".join(cells) + " |")
    lines.append("")
    lines.append(f"Std is the {STD_CONVENTION} standard deviation over runs.")
    if ranks is not None:
        lines += ["", "| Algorithm | Average rank | Difference to leader | Significant |",
                  "|---|---|---|---|"]
        for rec in _rank_records(ranks):
            lines.append(f"| {rec['algorithm']} | {rec['avg_rank']:.3f} | "
                         f"{rec['diff_to_leader']:.3f} | {fmt(rec['significant'])} |")
        lines += ["", f"Friedman chi-square = {ranks.friedman_statistic:.4f}, "
                  f"p-value = {ranks.p_value:.3g}, Nemenyi CD (alpha={ranks.alpha}) = "
                  f"{ranks.nemenyi_cd:.3f}"]
    return "\n".join(lines) + "\n"


def emit(rows: list[StatsRow], ranks: RankTable | None, format: str, path) -> list[str]:
    """Write results into directory ``path`` and return the written file paths.

    ``csv`` writes ``runs.csv``, ``summary.csv`` and (with ranks)
    ``ranks.csv`` plus ``friedman.csv``; ``json`` writes ``results.json``;
    ``markdown`` writes ``results.md`` laid out like the published result
    tables.
    """
    if format not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}")
    os.makedirs(path, exist_ok=True)
    written = []
    if format == "csv":
        p = os.path.join(path, "runs.csv")
        _write_csv(p, RUN_FIELDS, _run_records(rows))
        written.append(p)
        p = os.path.join(path, "summary.csv")
        _write_csv(p, SUMMARY_FIELDS, _summary_records(rows))
        written.append(p)
        if ranks is not None:
            p = os.path.join(path, "ranks.csv")
            _write_csv(p, RANK_FIELDS, _rank_records(ranks))
            written.append(p)
            p = os.path.join(path, "friedman.csv")
            _write_csv(p, ["statistic", "p_value", "nemenyi_cd", "alpha"], [{
                "statistic": ranks.friedman_statistic, "p_value": ranks.p_value,
                "nemenyi_cd": ranks.nemenyi_cd, "alpha": ranks.alpha}])
            written.append(p)
    elif format == "json":
        doc = {
            "std_convention": STD_CONVENTION,
            "runs": list(_run_records(rows)),
            "summary": _summary_records(rows),
            "ranks": None if ranks is None else {
                "algorithms": _rank_records(ranks),
                "friedman_statistic": ranks.friedman_statistic,
                "p_value": ranks.p_value,
                "nemenyi_cd": ranks.nemenyi_cd,
                "alpha": ranks.alpha,
            },
        }
        p = os.path.join(path, "results.json")
        with open(p, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, default=_json_default)
            fh.write("\n")
        written.append(p)
    else:
        p = os.path.join(path, "results.md")
        with open(p, "w", encoding="utf-8") as fh:
            fh.write(_markdown(rows, ranks))
        written.append(p)
    return written


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.bool_):
        return bool(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


def read_runs_csv(path) -> list[StatsRow]:
    """Rebuild :class:`StatsRow` objects from an emitted ``runs.csv``."""
    grouped: dict = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for rec in csv.DictReader(fh):
            key = (rec["instance"], rec["algorithm"])
            grouped.setdefault(key, []).append(
                (int(rec["run"]), float(rec["best_fitness"]), int(rec["seed"]), int(rec["evaluations"]))
            )
    rows = []
    for (inst, alg), recs in grouped.items():
        recs.sort()
        rows.append(StatsRow.from_runs(
            inst, alg, [r[1] for r in recs], seeds=[r[2] for r in recs], evaluations=[r[3] for r in recs]
        ))
    return rows
