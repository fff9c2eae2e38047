import csv
import json

import numpy as np
import pytest

from btms.harness import (
    ExperimentConfig,
    MissingReferenceFrontError,
    RecordValidationError,
    config_from_dict,
    derive_seed,
    emit_front_plot_data,
    load_config,
    load_reference_front,
    rank_report,
    read_plot_data,
    record_from_json,
    record_to_json,
    run_experiment,
    shipped_front_path,
)
from btms.metrics import IncompleteMatrixError
from btms.moea import AlgoConfig, ConfigError, nsga2_run
from btms.oracle import ReferenceFront
from btms.suite import get_problem

FAST = {"id": "nsga2", "population_size": 12, "generations": 4}


def make_config(tmp_path, **kw):
    base = {"version": 1, "problems": ["BTMS-5", "BTMS-12"], "algorithm": FAST, "seeds": [1, 2, 3], "output_dir": str(tmp_path / "out")}
    base.update(kw)
    return config_from_dict(base)


# -- configuration -----------------------------------------------------------------


def test_load_config_resolves_relative_paths(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"version": 1, "seeds": [0], "output_dir": "runs"}))
    cfg = load_config(path)
    assert cfg.output_dir == tmp_path / "runs"
    assert cfg.problem_ids[0] == "BTMS-1" and len(cfg.problem_ids) == 12


@pytest.mark.parametrize(
    "patch",
    [
        {"seedz": [1]},
        {"version": 2},
        {"seeds": []},
        {"seeds": [1, 1]},
        {"seeds": [1.5]},
        {"problems": ["BTMS-99"]},
        {"problems": ["BTMS-1", "btms-1"]},
        {"algorithm": {"id": "moead"}},
        {"algorithm": {"id": "nsga2", "population_size": 7}},
        {"algorithm": {"id": "nsga2", "seed": 4}},
        {"objective_sense_overrides": {"BTMS-6": {"5": "maximize"}}},
        {"objective_sense_overrides": {"BTMS-6": {"1": "largest"}}},
        {"workers": 0},
    ],
)
def test_config_errors(tmp_path, patch):
    with pytest.raises(ConfigError):
        make_config(tmp_path, **patch)


def test_config_requires_keys_and_valid_json(tmp_path):
    with pytest.raises(ConfigError):
        config_from_dict({"version": 1, "seeds": [1]})
    bad = tmp_path / "bad.json"
    bad.write_text("{version: 1}")
    with pytest.raises(ConfigError):
        load_config(bad)


def test_derive_seed_is_stable_and_distinct():
    assert derive_seed(0, 1, 1) == derive_seed(0, 1, 1)
    seeds = {derive_seed(m, p, s) for m in (0, 1) for p in range(1, 13) for s in range(20)}
    assert len(seeds) == 2 * 12 * 20
    assert all(0 <= s < 2**64 for s in seeds)


# -- runs ------------------------------------------------------------------------------


def test_run_experiment_cardinality_and_layout(tmp_path):
    cfg = make_config(tmp_path)
    records = run_experiment(cfg)
    assert len(records) == 6
    files = sorted(p.relative_to(cfg.output_dir).as_posix() for p in cfg.output_dir.rglob("*.json"))
    assert files == ["BTMS-12/1.json", "BTMS-12/2.json", "BTMS-12/3.json", "BTMS-5/1.json", "BTMS-5/2.json", "BTMS-5/3.json", "timings.json"]
    with open(cfg.output_dir / "indicators.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 6
    assert list(rows[0]) == ["problem_id", "algorithm_id", "seed", "hv", "igd_plus", "feasible_ratio", "ref_point"]
    assert [(r["problem_id"], r["seed"]) for r in rows] == [("BTMS-5", "1"), ("BTMS-5", "2"), ("BTMS-5", "3"), ("BTMS-12", "1"), ("BTMS-12", "2"), ("BTMS-12", "3")]


def test_rerun_and_listing_order_do_not_change_files(tmp_path):
    a = make_config(tmp_path / "a")
    b = make_config(tmp_path / "b", seeds=[3, 1, 2], problems=["BTMS-12", "BTMS-5"])
    run_experiment(a)
    run_experiment(b, workers=3)
    for path in a.output_dir.rglob("*"):
        if path.is_file() and path.name != "timings.json":
            assert path.read_bytes() == (b.output_dir / path.relative_to(a.output_dir)).read_bytes()


def test_run_file_round_trip(tmp_path):
    cfg = make_config(tmp_path, problems=["BTMS-9"], seeds=[5], objective_sense_overrides={"BTMS-9": {"1": "maximize"}}, generate_fronts=True, front_samples=20_000)
    (rec,) = run_experiment(cfg)
    text = (cfg.output_dir / "BTMS-9" / "5.json").read_text()
    back = record_from_json(text)
    assert np.array_equal(back.archive_f, rec.archive_f)
    assert back.config["objective_sense_overrides"] == {"1": "maximize"}
    assert record_to_json(back) == text
    assert (cfg.output_dir / "fronts" / "BTMS-9__1max.csv.gz").exists()


def test_tampered_run_file_is_rejected(tmp_path):
    rec = nsga2_run(get_problem("BTMS-8"), AlgoConfig(population_size=12, generations=3, seed=2))
    data = json.loads(record_to_json(rec))
    assert data["archive"]["f"]
    data["archive"]["f"][0][0] += 1.0
    with pytest.raises(RecordValidationError):
        record_from_json(json.dumps(data))
    data = json.loads(record_to_json(rec))
    data["archive"]["x"].append(data["archive"]["x"][0])
    data["archive"]["f"].append(data["archive"]["f"][0])
    with pytest.raises(RecordValidationError):
        record_from_json(json.dumps(data))


def test_crowding_infinities_serialize_as_strings():
    rec = nsga2_run(get_problem("BTMS-5"), AlgoConfig(population_size=8, generations=1, seed=0))
    data = json.loads(record_to_json(rec))
    assert "inf" in data["population"]["crowding"]
    assert "wall_time" not in data


def test_missing_reference_front(tmp_path):
    cfg = make_config(tmp_path, reference_front_dir=str(tmp_path / "nothing"))
    with pytest.raises(MissingReferenceFrontError):
        run_experiment(cfg)
    cfg = make_config(tmp_path, reference_front_dir=str(tmp_path / "nothing"), indicators=False)
    assert len(run_experiment(cfg)) == 6


def test_normalized_indicators(tmp_path):
    cfg = make_config(tmp_path, problems=["BTMS-5"], seeds=[1], normalize=True)
    run_experiment(cfg)
    with open(cfg.output_dir / "indicators.csv") as fh:
        (row,) = list(csv.DictReader(fh))
    assert [float(v) for v in row["ref_point"].split(";")] == pytest.approx([1.1, 1.1])
    assert 0.0 <= float(row["hv"]) <= 1.1**2


def test_shipped_fronts_load():
    front, ref = load_reference_front(shipped_front_path("BTMS-12"))
    assert front.problem_id == "BTMS-12" and front.sample_count == 1_000_000
    assert np.all(ref > front.points.max(axis=0))


# -- plot data ---------------------------------------------------------------------------


def test_plot_data_round_trip(tmp_path):
    rec = nsga2_run(get_problem("BTMS-7"), AlgoConfig(population_size=12, generations=3, seed=0))
    path = emit_front_plot_data(rec, tmp_path / "arch.dat")
    back = read_plot_data(path)
    assert back.shape == (len(rec.archive_f), 2)
    assert np.array_equal(back, rec.archive_f)
    front, _ = load_reference_front(shipped_front_path("BTMS-1"))
    assert np.array_equal(read_plot_data(emit_front_plot_data(front, tmp_path / "ref.dat")), front.points)


def test_plot_data_rejects_empty(tmp_path):
    with pytest.raises(ValueError):
        emit_front_plot_data(ReferenceFront("X", np.empty((0, 2)), 1, 1), tmp_path / "e.dat")


# -- ranking ---------------------------------------------------------------------------------


def write_indicators(path, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["problem_id", "algorithm_id", "seed", "hv", "igd_plus", "feasible_ratio", "ref_point"])
        w.writerows(rows)
    return path


def test_rank_report_two_algorithms(tmp_path):
    rows = []
    for p in ("BTMS-1", "BTMS-2", "BTMS-10"):
        for s in range(3):
            rows.append([p, "good", s, 2.0 + s, 0.1, 1.0, "1;1"])
            rows.append([p, "bad", s, 1.0 + s, 0.2, 1.0, "1;1"])
    path = write_indicators(tmp_path / "ind.csv", rows)
    hv = rank_report(path, "hv")
    assert hv.ranks == [("good", 1.0), ("bad", 2.0)]
    assert hv.medians[("good", "BTMS-2")] == 3.0
    igd = rank_report(path, "igdplus")
    assert igd.ranks == [("good", 1.0), ("bad", 2.0)]
    text = hv.text()
    assert text.index("BTMS-2") < text.index("BTMS-10")
    assert hv.ranks_csv().splitlines() == ["algorithm_id,mean_rank", "good,1.0", "bad,2.0"]
    assert len(hv.medians_csv().splitlines()) == 7


def test_rank_report_single_algorithm_and_incomplete(tmp_path):
    path = write_indicators(tmp_path / "one.csv", [["BTMS-1", "a", 0, 1.0, 0.0, 1.0, "1"]])
    assert rank_report(path, "hv").ranks == [("a", 1.0)]
    path = write_indicators(tmp_path / "gap.csv", [["BTMS-1", "a", 0, 1.0, 0.0, 1.0, "1"], ["BTMS-2", "b", 0, 1.0, 0.0, 1.0, "1"]])
    with pytest.raises(IncompleteMatrixError):
        rank_report(path, "hv")
    with pytest.raises(ValueError):
        rank_report(path, "r2")


def test_experiment_config_dataclass_defaults(tmp_path):
    cfg = ExperimentConfig(seeds=[1], output_dir=tmp_path)
    assert cfg.workers == 1 and cfg.indicators and not cfg.normalize and cfg.problems == "all"


def test_strict_paper_front_is_kept_apart(tmp_path):
    cfg = make_config(tmp_path, problems=["BTMS-9", "BTMS-5"], seeds=[1], strict_paper=True, generate_fronts=True, front_samples=20_000)
    run_experiment(cfg)
    assert [p.name for p in (cfg.output_dir / "fronts").iterdir()] == ["BTMS-9__strict.csv.gz"]
    front, _ = load_reference_front(cfg.output_dir / "fronts" / "BTMS-9__strict.csv.gz")
    assert front.sample_count == 20_000
