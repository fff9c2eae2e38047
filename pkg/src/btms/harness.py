"""Experiment runner: configuration, run matrices, persistence, indicators and ranking.

Output layout::

    output_dir/<problem_id>/<seed>.json   one file per run
    output_dir/indicators.csv             one row per run
    output_dir/timings.json               wall times (not part of the reproducible set)
"""

from __future__ import annotations

import csv
import io
import json
import math
import statistics
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import problems as _problems
from .metrics import IndicatorReport, hypervolume, igd_plus, mean_rank, normalize
from .moea import ALGORITHM_ID, AlgoConfig, ConfigError, RunRecord, archive_indices, nsga2_run
from .oracle import (
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    ReferenceFront,
    nadir_and_ideal,
    read_front_csv,
    reference_point,
    sample_reference_front,
    write_front_csv,
)
from .suite import ProblemDescriptor, evaluate_batch, get_problem, with_sense_overrides

CONFIG_VERSION = 1
RUN_FORMAT = "btms-run/1"
_MASK64 = (1 << 64) - 1

__all__ = [
    "ExperimentConfig",
    "MissingReferenceFrontError",
    "RankReport",
    "derive_seed",
    "emit_front_plot_data",
    "load_config",
    "load_reference_front",
    "rank_report",
    "read_plot_data",
    "record_from_json",
    "record_to_json",
    "run_experiment",
    "shipped_front_path",
]


class MissingReferenceFrontError(FileNotFoundError):
    pass


class RecordValidationError(ValueError):
    pass


# -- configuration -------------------------------------------------------------------


@dataclass
class ExperimentConfig:
    seeds: list[int]
    output_dir: Path
    problems: list[str] | str = "all"
    algorithm: dict = field(default_factory=lambda: {"id": ALGORITHM_ID})
    master_seed: int = 0
    reference_front_dir: Path | None = None
    objective_sense_overrides: dict[str, dict[str, str]] = field(default_factory=dict)
    workers: int = 1
    indicators: bool = True
    generate_fronts: bool = False
    front_samples: int = DEFAULT_SAMPLES
    front_seed: int = DEFAULT_SEED
    normalize: bool = False
    strict_paper: bool = False
    track_hypervolume: bool = False
    version: int = CONFIG_VERSION

    def __post_init__(self):
        self.output_dir = Path(self.output_dir)
        if self.reference_front_dir is not None:
            self.reference_front_dir = Path(self.reference_front_dir)
        self.validate()

    @property
    def problem_ids(self) -> list[str]:
        if self.problems == "all":
            return list(_problems.PROBLEM_IDS)
        return [get_problem(pid).id for pid in self.problems]

    def algo_config(self) -> AlgoConfig:
        settings = {k: v for k, v in self.algorithm.items() if k != "id"}
        if "seed" in settings:
            raise ConfigError("per-run seeds are derived; set 'seeds' and 'master_seed' instead of algorithm.seed")
        return AlgoConfig.from_dict(settings)

    def validate(self) -> None:
        if self.version != CONFIG_VERSION:
            raise ConfigError(f"unsupported config version {self.version!r}; expected {CONFIG_VERSION}")
        if not self.seeds:
            raise ConfigError("seeds must be nonempty")
        if any(isinstance(s, bool) or not isinstance(s, int) for s in self.seeds):
            raise ConfigError("seeds must be integers")
        if len(set(self.seeds)) != len(self.seeds):
            raise ConfigError("seeds must be distinct")
        if self.problems != "all":
            if not isinstance(self.problems, list) or not self.problems:
                raise ConfigError("problems must be 'all' or a nonempty list of ids")
            try:
                ids = self.problem_ids
            except KeyError as exc:
                raise ConfigError(str(exc.args[0])) from None
            if len(set(ids)) != len(ids):
                raise ConfigError("problems must be distinct")
        if self.algorithm.get("id", ALGORITHM_ID) != ALGORITHM_ID:
            raise ConfigError(f"unknown algorithm {self.algorithm.get('id')!r}; available: {ALGORITHM_ID}")
        self.algo_config()
        for pid, overrides in self.objective_sense_overrides.items():
            try:
                problem = get_problem(pid)
            except KeyError as exc:
                raise ConfigError(str(exc.args[0])) from None
            try:
                with_sense_overrides(problem, _override_map(overrides))
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")

    def overrides_for(self, pid: str) -> dict[int, str]:
        for key, value in self.objective_sense_overrides.items():
            if key.lower() == pid.lower():
                return _override_map(value)
        return {}


def _override_map(raw) -> dict[int, str]:
    if not isinstance(raw, dict):
        raise ConfigError("objective_sense_overrides entries must map objective index to 'minimize'/'maximize'")
    try:
        return {int(k): v for k, v in raw.items()}
    except (TypeError, ValueError):
        raise ConfigError("objective indices must be integers") from None


_CONFIG_KEYS = {
    "version",
    "problems",
    "algorithm",
    "seeds",
    "master_seed",
    "output_dir",
    "reference_front_dir",
    "objective_sense_overrides",
    "workers",
    "indicators",
    "generate_fronts",
    "front_samples",
    "front_seed",
    "normalize",
    "strict_paper",
    "track_hypervolume",
}


def config_from_dict(data: dict, base_dir: Path | None = None) -> ExperimentConfig:
    """Build a config from parsed JSON; relative paths resolve against ``base_dir``."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(data) - _CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    for key in ("version", "seeds", "output_dir"):
        if key not in data:
            raise ConfigError(f"missing required config key {key!r}")
    data = dict(data)
    for key in ("output_dir", "reference_front_dir"):
        if data.get(key) is not None and base_dir is not None:
            data[key] = base_dir / data[key]
    return ExperimentConfig(**data)


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return config_from_dict(data, base_dir=path.parent)


# -- seeds ------------------------------------------------------------------------------


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_seed(master_seed: int, problem_index: int, seed: int) -> int:
    """Per-run RNG seed; independent of the order in which runs are listed."""
    h = _splitmix64(master_seed & _MASK64)
    h = _splitmix64(h ^ (problem_index & _MASK64))
    return _splitmix64(h ^ (seed & _MASK64))


# -- reference fronts --------------------------------------------------------------------


def shipped_front_path(problem_id: str) -> Path:
    return Path(str(resources.files("btms") / "data" / "fronts" / f"{problem_id}.csv.gz"))


def _front_name(pid: str, overrides: dict[int, str], strict_paper: bool = False) -> str:
    tags = []
    if strict_paper and get_problem(pid, True) != get_problem(pid):
        tags.append("strict")
    if any(v == "maximize" for v in overrides.values()):
        tags.append("-".join(f"{k}{'max' if v == 'maximize' else 'min'}" for k, v in sorted(overrides.items())))
    return f"{pid}.csv.gz" if not tags else f"{pid}__{'__'.join(tags)}.csv.gz"


def load_reference_front(path: str | Path) -> tuple[ReferenceFront, np.ndarray]:
    """Front and reference point stored in a front CSV (plain or gzip)."""
    path = Path(path)
    if not path.exists():
        raise MissingReferenceFrontError(f"reference front not found: {path}")
    front, ref = read_front_csv(path)
    return front, ref if ref is not None else reference_point(front)


def save_front(front: ReferenceFront, path: str | Path) -> Path:
    return write_front_csv(front, path)


def build_reference_fronts(
    directory: str | Path,
    problem_ids: list[str] | None = None,
    n: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    strict_paper: bool = False,
) -> list[Path]:
    """Regenerate front files ``<directory>/<id>.csv.gz`` for the given problems.

    Under ``strict_paper`` a problem whose definition changes (BTMS-9) is
    written as ``<id>__strict.csv.gz``, the name :func:`run_experiment` looks for.
    """
    out = []
    for pid in problem_ids or _problems.PROBLEM_IDS:
        front = sample_reference_front(get_problem(pid, strict_paper), n, seed)
        out.append(save_front(front, Path(directory) / _front_name(pid, {}, strict_paper)))
    return out


# -- persistence --------------------------------------------------------------------------


def _floats(arr) -> list:
    return np.asarray(arr, dtype=float).tolist()


def record_to_dict(record: RunRecord) -> dict:
    """JSON-ready dict of ``record`` without the wall time (kept out of reproducible files)."""
    return {
        "format": RUN_FORMAT,
        "suite_version": record.suite_version,
        "build_version": record.build_version,
        "algorithm_id": record.algorithm_id,
        "problem_id": record.problem_id,
        "seed": record.seed,
        "config": record.config,
        "evaluations": record.evaluations,
        "archive": {"x": _floats(record.archive_x), "f": _floats(record.archive_f)},
        "population": {
            "x": _floats(record.population_x),
            "f": _floats(record.population_f),
            "cv": _floats(record.population_cv),
            "rank": [int(r) for r in record.population_rank],
            "crowding": ["inf" if math.isinf(c) else float(c) for c in record.population_crowding],
        },
        "generations": record.generations,
    }


def record_to_json(record: RunRecord) -> str:
    return json.dumps(record_to_dict(record), indent=1, sort_keys=True) + "\n"


def _problem_for(pid: str, config: dict) -> ProblemDescriptor:
    problem = get_problem(pid, bool(config.get("strict_paper", False)))
    overrides = {int(k): v for k, v in config.get("objective_sense_overrides", {}).items()}
    return with_sense_overrides(problem, overrides) if overrides else problem


def record_from_json(text: str) -> RunRecord:
    """Load a run file and re-check its archive (feasible, exact objectives, nondominated).

    Raises:
        RecordValidationError: if the stored archive violates the invariant.
    """
    data = json.loads(text)
    if data.get("format") != RUN_FORMAT:
        raise RecordValidationError(f"unsupported run format {data.get('format')!r}")
    pop = data["population"]
    m = len(pop["f"][0]) if pop["f"] else 0
    n = len(pop["x"][0]) if pop["x"] else 0
    record = RunRecord(
        problem_id=data["problem_id"],
        seed=data["seed"],
        config=data["config"],
        archive_x=np.array(data["archive"]["x"], dtype=float).reshape(-1, n),
        archive_f=np.array(data["archive"]["f"], dtype=float).reshape(-1, m),
        population_x=np.array(pop["x"], dtype=float),
        population_f=np.array(pop["f"], dtype=float),
        population_cv=np.array(pop["cv"], dtype=float),
        population_rank=np.array(pop["rank"], dtype=int),
        population_crowding=np.array([math.inf if c == "inf" else c for c in pop["crowding"]], dtype=float),
        generations=data["generations"],
        evaluations=data["evaluations"],
        algorithm_id=data["algorithm_id"],
        suite_version=data["suite_version"],
        build_version=data["build_version"],
    )
    validate_archive(record)
    return record


def validate_archive(record: RunRecord) -> None:
    if len(record.archive_x) == 0:
        return
    problem = _problem_for(record.problem_id, record.config)
    F, _, cv = evaluate_batch(problem, record.archive_x)
    if np.any(cv != 0.0):
        raise RecordValidationError(f"{record.problem_id} seed {record.seed}: archive holds infeasible members")
    if not np.array_equal(F, record.archive_f):
        raise RecordValidationError(f"{record.problem_id} seed {record.seed}: archive objectives do not match evaluation")
    if len(archive_indices(F, cv)) != len(F):
        raise RecordValidationError(f"{record.problem_id} seed {record.seed}: archive members are not mutually nondominated")


# -- runs ------------------------------------------------------------------------------------


def _run_task(task: tuple) -> RunRecord:
    pid, seed, rng_seed, algo, overrides, strict_paper, ref = task
    problem = get_problem(pid, strict_paper)
    if overrides:
        problem = with_sense_overrides(problem, overrides)
    cfg = AlgoConfig(**{**algo, "seed": rng_seed})
    record = nsga2_run(problem, cfg, reference_point=ref)
    record.seed = seed
    record.config = {
        **record.config,
        "objective_sense_overrides": {str(k): v for k, v in sorted(overrides.items())},
        "strict_paper": strict_paper,
    }
    return record


def _front_for(cfg: ExperimentConfig, pid: str) -> tuple[ReferenceFront, np.ndarray]:
    overrides = cfg.overrides_for(pid)
    name = _front_name(pid, overrides, cfg.strict_paper)
    candidates = []
    if cfg.reference_front_dir is not None:
        candidates.append(cfg.reference_front_dir / name)
    else:
        if name == f"{pid}.csv.gz":
            candidates.append(shipped_front_path(pid))
        candidates.append(cfg.output_dir / "fronts" / name)
    for path in candidates:
        if path.exists():
            return load_reference_front(path)
    if not cfg.generate_fronts:
        raise MissingReferenceFrontError(
            f"no reference front for {pid} (looked in {', '.join(map(str, candidates))}); "
            "set generate_fronts or provide reference_front_dir"
        )
    problem = get_problem(pid, cfg.strict_paper)
    if overrides:
        problem = with_sense_overrides(problem, overrides)
    front = sample_reference_front(problem, cfg.front_samples, cfg.front_seed)
    save_front(front, candidates[-1])
    return front, reference_point(front)


def indicator_report(record: RunRecord, front: ReferenceFront, ref: np.ndarray, normalized: bool = False) -> IndicatorReport:
    A = record.archive_f
    R = front.points
    if normalized:
        nadir, ideal = nadir_and_ideal(front)
        A, R, ref = normalize(A, ideal, nadir), normalize(R, ideal, nadir), normalize(ref, ideal, nadir)
    return IndicatorReport(
        problem_id=record.problem_id,
        algorithm_id=record.algorithm_id,
        seed=record.seed,
        hypervolume=hypervolume(A, ref) if len(A) else 0.0,
        igd_plus=igd_plus(A, R),
        feasible_ratio=record.feasible_ratio(),
        reference_point=tuple(float(v) for v in ref),
    )


def write_indicator_csv(reports: list[IndicatorReport], path: str | Path) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(IndicatorReport.CSV_HEADER)
        for rep in reports:
            w.writerow(rep.csv_row())
    return path


def run_experiment(cfg: ExperimentConfig, workers: int | None = None) -> list[RunRecord]:
    """Execute every (problem, seed) run of ``cfg`` and persist the results.

    Runs are independent and may execute in ``workers`` processes; files are
    written by this process after all runs finish, in (problem, seed) order,
    so their bytes do not depend on the worker count.
    """
    workers = cfg.workers if workers is None else workers
    try:
        cfg.output_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {cfg.output_dir}: {exc}") from exc
    algo = cfg.algo_config().to_dict()
    algo.pop("seed")
    pids = sorted(cfg.problem_ids, key=_problems.PROBLEM_IDS.index)
    fronts = {pid: _front_for(cfg, pid) for pid in pids} if (cfg.indicators or cfg.track_hypervolume) else {}
    tasks = []
    for pid in pids:
        pindex = _problems.PROBLEM_IDS.index(pid) + 1
        ref = fronts[pid][1].tolist() if cfg.track_hypervolume else None
        for seed in sorted(cfg.seeds):
            tasks.append(
                (pid, seed, derive_seed(cfg.master_seed, pindex, seed), algo, cfg.overrides_for(pid), cfg.strict_paper, ref)
            )
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_task, tasks))
    else:
        records = [_run_task(t) for t in tasks]

    timings = {}
    for rec in records:
        path = cfg.output_dir / rec.problem_id / f"{rec.seed}.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(record_to_json(rec))
        timings[f"{rec.problem_id}/{rec.seed}"] = rec.wall_time
    (cfg.output_dir / "timings.json").write_text(json.dumps(timings, indent=1, sort_keys=True) + "\n")
    if cfg.indicators:
        reports = [indicator_report(rec, *fronts[rec.problem_id], normalized=cfg.normalize) for rec in records]
        write_indicator_csv(reports, cfg.output_dir / "indicators.csv")
    return records


# -- plot data ------------------------------------------------------------------------------


def emit_front_plot_data(source: RunRecord | ReferenceFront, path: str | Path) -> Path:
    """Whitespace-separated objective columns (one row per point) for external plotting."""
    if isinstance(source, RunRecord):
        pts, label = source.archive_f, f"{source.problem_id} seed={source.seed} archive"
    else:
        pts, label = source.points, f"{source.problem_id} reference front n={source.sample_count}"
    pts = np.asarray(pts, dtype=float)
    if len(pts) == 0:
        raise ValueError(f"{label}: nothing to plot, the front is empty")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# {label}", "# " + " ".join(f"f{j + 1}" for j in range(pts.shape[1]))]
    lines += [" ".join(format(v, ".17g") for v in row) for row in pts]
    path.write_text("\n".join(lines) + "\n")
    return path


def read_plot_data(path: str | Path) -> np.ndarray:
    rows = [
        [float(v) for v in line.split()]
        for line in Path(path).read_text().splitlines()
        if line.strip() and not line.startswith("#")
    ]
    return np.array(rows, dtype=float)


# -- ranking ------------------------------------------------------------------------------------

_METRIC_COLUMNS = {"hv": ("hv", True), "igd_plus": ("igd_plus", False), "igdplus": ("igd_plus", False)}


@dataclass
class RankReport:
    metric: str
    medians: dict[tuple[str, str], float]
    ranks: list[tuple[str, float]]

    def text(self) -> str:
        algorithms = sorted({a for a, _ in self.medians})
        problems = sorted({p for _, p in self.medians}, key=_problem_sort_key)
        width = max(12, *(len(a) + 2 for a in algorithms))
        lines = [f"median {self.metric} over seeds", "problem".ljust(10) + "".join(a.rjust(width) for a in algorithms)]
        for p in problems:
            lines.append(p.ljust(10) + "".join(f"{self.medians[(a, p)]:.6g}".rjust(width) for a in algorithms))
        lines += ["", f"mean rank ({self.metric})", "algorithm".ljust(width) + "mean_rank".rjust(12)]
        lines += [a.ljust(width) + f"{r:.4f}".rjust(12) for a, r in self.ranks]
        return "\n".join(lines) + "\n"

    def medians_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["algorithm_id", "problem_id", f"median_{self.metric}"])
        for (a, p), v in sorted(self.medians.items(), key=lambda kv: (kv[0][0], _problem_sort_key(kv[0][1]))):
            w.writerow([a, p, repr(v)])
        return buf.getvalue()

    def ranks_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["algorithm_id", "mean_rank"])
        for a, r in self.ranks:
            w.writerow([a, repr(r)])
        return buf.getvalue()


def _problem_sort_key(pid: str):
    head, _, tail = pid.rpartition("-")
    return (head, int(tail)) if tail.isdigit() else (pid, 0)


def rank_report(indicator_csv: str | Path, indicator: str = "hv") -> RankReport:
    """Median-over-seeds score per (algorithm, problem), then mean ranks across problems.

    Raises:
        IncompleteMatrixError: if some algorithm has no rows for some problem.
    """
    if indicator not in _METRIC_COLUMNS:
        raise ValueError(f"unknown indicator {indicator!r}; expected hv or igdplus")
    column, higher = _METRIC_COLUMNS[indicator]
    scores: dict[tuple[str, str], list[float]] = defaultdict(list)
    with open(indicator_csv, newline="") as fh:
        reader = csv.DictReader(fh)
        missing_cols = {"problem_id", "algorithm_id", column} - set(reader.fieldnames or ())
        if missing_cols:
            raise ValueError(f"{indicator_csv}: missing columns {sorted(missing_cols)}")
        for row in reader:
            scores[(row["algorithm_id"], row["problem_id"])].append(float(row[column]))
    medians = {key: float(statistics.median(vals)) for key, vals in scores.items()}
    name = "igd_plus" if column == "igd_plus" else "hv"
    return RankReport(metric=name, medians=medians, ranks=mean_rank(medians, higher_is_better=higher))
