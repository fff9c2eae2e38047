"""Acceptance gate: the ten release criteria at their stated tolerances.

Every criterion prints one ``PASS``/``FAIL`` line (also collected into the
pytest terminal summary). Criteria 6 and 7 share one 12-problem x 11-seed
experiment run; criterion 9 drives the installed ``btms`` command.

Run just this gate with::

    pytest tests/test_acceptance.py -v
"""

import csv
import hashlib
import os
import statistics
import subprocess
import sys
import time
from fractions import Fraction
from pathlib import Path

import moocore
import numpy as np
import pytest

from btms_literal import LITERAL, RANGES
from btms.harness import derive_seed, load_config, run_experiment, shipped_front_path
from btms.metrics import hypervolume, hypervolume_mc, hypervolume_slicing
from btms.moea import AlgoConfig, fast_nondominated_sort, nsga2_run
from btms.oracle import (
    GENERATOR_VERSION,
    front_csv_text,
    pareto_filter,
    read_front_csv,
    read_front_text,
    sample_design,
    sample_reference_front,
)
from btms.polynomial import Polynomial, grad_poly
from btms.problems import PROBLEM_IDS
from btms.suite import EvaluationResult, build_suite, evaluate_batch, export_problem, get_problem, import_problem

DATA = Path(__file__).parent / "data"
RESULTS: dict[int, str] = {}
SEEDS = list(range(1, 12))


def report(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail})"
    RESULTS[number] = line
    print(line)
    assert ok, line


def in_box(problem, n, seed, margin=0.0):
    rng = np.random.default_rng(seed)
    span = problem.upper - problem.lower
    lo, hi = problem.lower + margin * span, problem.upper - margin * span
    return lo + rng.random((n, problem.n_vars)) * (hi - lo)


# -- 1 -------------------------------------------------------------------------------


def test_criterion_1_suite_fidelity():
    start = time.perf_counter()
    worst, worst_id = 0.0, ""
    for problem in build_suite():
        X = in_box(problem, 1000, 101)
        F, V, _ = evaluate_batch(problem, X)
        objs, cons = LITERAL[problem.id](*X.T)
        L = np.column_stack(objs + cons)
        lo = np.array([r[0] for r in RANGES.get(problem.id, [])], dtype=float)
        hi = np.array([r[1] for r in RANGES.get(problem.id, [])], dtype=float)
        G = L[:, problem.n_objectives:]
        lit_v = np.maximum(0.0, np.maximum(lo - G, G - hi)) if cons else np.empty((1000, 0))
        engine_cons = [
            c.expr.evaluate_many(X) if isinstance(c.expr, Polynomial) else F[:, c.expr] for c in problem.constraints
        ]
        E = np.column_stack([F] + [e[:, None] for e in engine_cons])
        rel = float(np.max(np.abs(E - L) / np.abs(L)))
        if rel > worst:
            worst, worst_id = rel, problem.id
        if cons:
            assert np.allclose(V, lit_v, rtol=1e-10, atol=1e-9)
    elapsed = time.perf_counter() - start
    report(1, "suite fidelity vs literal transcription", worst <= 1e-10 and elapsed < 10,
           f"max rel err {worst:.2e} on {worst_id}, 12x1000 points in {elapsed:.2f}s")


# -- 2 -------------------------------------------------------------------------------


def printed_to_float(text: str) -> float:
    text = text.replace(" ", "")
    if "\\times10^" in text:
        mantissa, exponent = text.split("\\times10^")
        return float(f"{mantissa}e{exponent.strip('{}')}")
    return float(text)


def exponents_of(monomial: str, n_vars: int) -> tuple:
    exps = [0] * n_vars
    if monomial != "1":
        for factor in monomial.split("*"):
            name, _, power = factor.partition("^")
            exps[int(name[1:]) - 1] += int(power or 1)
    return tuple(exps)


def stored_polynomial(problem, function: str):
    kind, index = function[0], int(function[1:]) - 1
    return problem.objectives[index].body if kind == "f" else problem.constraints[index].expr


def test_criterion_2_transcription_audit():
    with open(DATA / "coefficients_verbatim.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    mismatches, seen = [], {}
    for row in rows:
        problem = get_problem(row["problem"])
        poly = stored_polynomial(problem, row["function"])
        exps = exponents_of(row["stored_monomial"], problem.n_vars)
        c = printed_to_float(row["printed_coefficient"])
        transform = row["transform"]
        if transform == "none":
            expected = c
        elif transform.startswith("complement:"):
            k = float(transform.split(":")[1])
            expected = k - c if not any(exps) else -c
        elif transform.startswith("scale:"):
            expected = float(transform.split(":")[1]) * c
        else:
            raise AssertionError(f"unknown transform {transform}")
        if poly.coefficient(exps) != expected:
            mismatches.append((row["problem"], row["function"], row["printed_monomial"], poly.coefficient(exps), expected))
        seen.setdefault((row["problem"], row["function"]), set()).add(exps)
    # every stored term is accounted for by a table row
    extra = []
    for problem in build_suite():
        for k, obj in enumerate(problem.objectives):
            extra += [(problem.id, f"f{k + 1}", t.exponents) for t in obj.body.terms if t.exponents not in seen[(problem.id, f"f{k + 1}")]]
        for k, con in enumerate(problem.constraints):
            if isinstance(con.expr, Polynomial) and (problem.id, f"g{k + 1}") in seen:
                extra += [(problem.id, f"g{k + 1}", t.exponents) for t in con.expr.terms if t.exponents not in seen[(problem.id, f"g{k + 1}")]]
    edited = [(r["problem"], r["function"], r["printed_monomial"], r["stored_monomial"]) for r in rows if r["status"] == "EDITED"]
    ok = not mismatches and not extra and edited == [("BTMS-9", "f3", "x1*x2*x4", "x1*x2*x3")]
    report(2, "transcription audit vs verbatim coefficient table", ok,
           f"{len(rows)} printed terms, {len(mismatches)} mismatches, {len(extra)} unlisted terms, edited={edited}")


# -- 3 -------------------------------------------------------------------------------


def exact_value(poly: Polynomial, x) -> Fraction:
    total = Fraction(0)
    for t in poly.terms:
        v = Fraction(t.coefficient)
        for xi, e in zip(x, t.exponents):
            if e:
                v *= xi**e
        total += v
    return total


def test_criterion_3_gradient_check():
    # the central difference is formed in exact rational arithmetic so its
    # own rounding does not mask the comparison
    h = Fraction(1, 10**6)
    worst, count = 0.0, 0
    for problem in build_suite():
        polys = [o.body for o in problem.objectives] + [c.expr for c in problem.constraints if isinstance(c.expr, Polynomial)]
        for q_index, poly in enumerate(polys):
            for x in in_box(problem, 100, 300 + q_index, margin=0.01):
                g = grad_poly(poly, x)
                X = [Fraction(v) for v in x]
                for i in range(problem.n_vars):
                    up, down = list(X), list(X)
                    up[i] += h
                    down[i] -= h
                    fd = float((exact_value(poly, up) - exact_value(poly, down)) / (2 * h))
                    err = abs(fd - g[i]) / abs(fd) if fd else abs(g[i])
                    worst = max(worst, err)
                    count += 1
    report(3, "analytic gradients vs central differences (h=1e-6)", worst <= 1e-6,
           f"max rel err {worst:.2e} over {count} partial derivatives")


# -- 4 -------------------------------------------------------------------------------


def brute_force_fronts(F, cv):
    n = len(F)

    def dom(i, j):
        if cv[i] == 0 and cv[j] > 0:
            return True
        if cv[i] > 0 or cv[j] > 0:
            return cv[i] > 0 and cv[j] > 0 and cv[i] < cv[j]
        return all(F[i][k] <= F[j][k] for k in range(len(F[i]))) and any(F[i][k] < F[j][k] for k in range(len(F[i])))

    dominated_by = [[j for j in range(n) if dom(j, i)] for i in range(n)]
    rank = [None] * n
    level = 0
    while any(r is None for r in rank):
        current = [i for i in range(n) if rank[i] is None and all(rank[j] is not None and rank[j] < level for j in dominated_by[i])]
        for i in current:
            rank[i] = level
        level += 1
    return [[i for i in range(n) if rank[i] == r] for r in range(level)]


def test_criterion_4_sorting_oracle():
    rng = np.random.default_rng(404)
    mismatches = 0
    for trial in range(100):
        n, m = int(rng.integers(1, 201)), [2, 3, 4][trial % 3]
        F = rng.integers(0, 10, size=(n, m)).astype(float) if trial % 2 else rng.random((n, m))
        cv = np.where(rng.random(n) < 0.35, rng.choice([0.05, 0.2, 1.0, 3.0], size=n), 0.0)
        pop = [EvaluationResult(np.zeros(1), F[i], np.array([cv[i]]), float(cv[i]), cv[i] == 0) for i in range(n)]
        if fast_nondominated_sort(pop) != brute_force_fronts(F.tolist(), cv.tolist()):
            mismatches += 1
    report(4, "fast nondominated sort vs O(n^2 m) brute force", mismatches == 0, f"{mismatches}/100 populations differ")


# -- 5 -------------------------------------------------------------------------------


def spread_front(rng, n, m):
    pts = rng.random((3 * n, m))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    return pareto_filter(pts)[:n]


def test_criterion_5_hypervolume_cross_checks():
    rng = np.random.default_rng(505)
    worst_a = max(
        abs(hypervolume(f, (1.1, 1.1)) - hypervolume_slicing(f, (1.1, 1.1)))
        for f in (spread_front(rng, int(rng.integers(1, 80)), 2) for _ in range(100))
    )
    z_scores = []
    for m in (2, 3, 4):
        front = spread_front(rng, 25, m)
        ref = np.full(m, 1.1)
        est, se = hypervolume_mc(front, ref, samples=1_000_000, seed=m)
        z_scores.append(abs(est - hypervolume(front, ref)) / se)
    worked = hypervolume([(1, 2), (2, 1)], (3, 3))
    ok = worst_a <= 1e-12 and all(z <= 3 for z in z_scores) and worked == 3.0
    report(5, "hypervolume cross-checks", ok,
           f"(a) max |sweep-slicing| {worst_a:.1e}; (b) |exact-MC|/stderr for m=2,3,4: "
           + ", ".join(f"{z:.2f}" for z in z_scores) + f"; (c) worked example {worked!r}")


# -- 6 and 7 -------------------------------------------------------------------------


@pytest.fixture(scope="module")
def full_matrix(tmp_path_factory):
    out = tmp_path_factory.mktemp("matrix")
    from btms.harness import config_from_dict

    cfg = config_from_dict({"version": 1, "problems": "all", "seeds": SEEDS, "output_dir": str(out), "workers": 1})
    start = time.perf_counter()
    records = run_experiment(cfg)
    return cfg, records, time.perf_counter() - start


@pytest.mark.slow
def test_criterion_6_constraint_exercise(full_matrix):
    _, records, _ = full_matrix
    problems = ("BTMS-8", "BTMS-9", "BTMS-10", "BTMS-12")
    failures = []
    sizes = []
    for rec in records:
        if rec.problem_id not in problems:
            continue
        problem = get_problem(rec.problem_id)
        if len(rec.archive_x) == 0:
            failures.append((rec.problem_id, rec.seed, "empty"))
            continue
        F, _, cv = evaluate_batch(problem, rec.archive_x)
        if np.any(cv != 0.0) or not np.array_equal(F, rec.archive_f):
            failures.append((rec.problem_id, rec.seed, "infeasible"))
        if rec.problem_id == "BTMS-9" and np.any(rec.archive_x[:, 1] + rec.archive_x[:, 2] > 1.0):
            failures.append((rec.problem_id, rec.seed, "x2+x3>1"))
        sizes.append(len(rec.archive_x))
    runs = sum(rec.problem_id in problems for rec in records)
    report(6, "constraint exercise on BTMS-8/9/10/12", not failures and runs == 44,
           f"{runs} runs, archive sizes {min(sizes)}-{max(sizes)}, failures {failures}")


@pytest.mark.slow
def test_criterion_7_optimizer_sanity(full_matrix):
    cfg, records, elapsed = full_matrix
    failing = []
    for pid in PROBLEM_IDS:
        _, ref = read_front_csv(shipped_front_path(pid))
        problem = get_problem(pid)
        pindex = PROBLEM_IDS.index(pid) + 1
        final, initial = [], []
        for rec in (r for r in records if r.problem_id == pid):
            final.append(hypervolume(rec.archive_f, ref) if len(rec.archive_f) else 0.0)
            # a zero-generation run with the same seed reproduces the initial population
            start = nsga2_run(problem, AlgoConfig(generations=0, seed=derive_seed(cfg.master_seed, pindex, rec.seed)))
            initial.append(hypervolume(start.archive_f, ref) if len(start.archive_f) else 0.0)
        if statistics.median(final) < statistics.median(initial):
            failing.append(pid)
    report(7, "median final HV >= median initial HV on all 12 problems, full run < 15 min",
           not failing and elapsed < 900 and len(records) == 132,
           f"{len(records)} runs in {elapsed:.0f}s, problems below initial: {failing}")


# -- 8 -------------------------------------------------------------------------------


@pytest.mark.slow
def test_criterion_8_reference_fronts():
    problems = []
    details = []
    for pid in PROBLEM_IDS:
        path = shipped_front_path(pid)
        shipped, ref = read_front_csv(path)
        problem = get_problem(pid)
        assert shipped.generator_version == GENERATOR_VERSION
        regenerated = sample_reference_front(problem, shipped.sample_count, shipped.seed)
        identical = front_csv_text(regenerated) == read_front_text(path)

        X = sample_design(problem, shipped.sample_count, shipped.seed)
        F, _, cv = evaluate_batch(problem, X)
        feasible_rows = {tuple(r) for r in F[cv == 0.0].tolist()}
        feasible = all(tuple(r) in feasible_rows for r in shipped.points.tolist())

        pts = shipped.points
        nondominated = bool(np.all(moocore.is_nondominated(pts, keep_weakly=False))) and len(np.unique(pts, axis=0)) == len(pts)
        if pts.shape[1] >= 4 and len(pts) > 20_000:
            # the filter delegated to moocore here, so add a direct check of a sample
            rng = np.random.default_rng(8)
            sample = pts[rng.choice(len(pts), 3000, replace=False)]
            for s in range(0, len(sample), 100):
                c = sample[s : s + 100]
                dominated = (np.all(pts[None, :, :] <= c[:, None, :], axis=2) & np.any(pts[None, :, :] < c[:, None, :], axis=2)).any(axis=1)
                nondominated &= not dominated.any()

        small = sample_reference_front(problem, 10_000, shipped.seed)
        monotone = hypervolume(pts, ref) >= hypervolume(small.points, ref)
        if not (identical and feasible and nondominated and monotone):
            problems.append((pid, identical, feasible, nondominated, monotone))
        details.append(f"{pid}:{len(pts)}")
    report(8, "shipped reference fronts regenerate, feasible, nondominated, HV(1e6) >= HV(1e4)", not problems,
           f"sizes {' '.join(details)}; failures {problems}")


# -- 9 -------------------------------------------------------------------------------


def artifact_digest(directory: Path) -> dict:
    return {
        p.relative_to(directory).as_posix(): hashlib.sha256(p.read_bytes()).hexdigest()
        for p in sorted(directory.rglob("*"))
        if p.is_file() and p.name != "timings.json"
    }


@pytest.mark.slow
def test_criterion_9_reproducibility(tmp_path):
    config = tmp_path / "experiment.json"
    config.write_text(
        '{"version": 1, "problems": "all", "seeds": [1, 2], "master_seed": 9,'
        ' "algorithm": {"id": "nsga2", "population_size": 40, "generations": 40}, "output_dir": "out"}'
    )
    digests = []
    for label, workers in (("first", "1"), ("second", "1"), ("parallel", "8")):
        target = tmp_path / label
        cfg_path = tmp_path / f"{label}.json"
        cfg_path.write_text(config.read_text().replace('"out"', f'"{label}"'))
        cmd = [sys.executable, "-m", "btms.cli", "run", "--config", str(cfg_path), "--workers", workers]
        proc = subprocess.run(cmd, capture_output=True, text=True, env={**os.environ}, check=False)
        assert proc.returncode == 0, proc.stderr
        digests.append(artifact_digest(target))
    ok = digests[0] == digests[1] == digests[2] and len(digests[0]) == 25
    report(9, "byte-identical run artifacts across invocations and workers 1/8", ok,
           f"{len(digests[0])} artifacts compared across 3 invocations")
    assert load_config(tmp_path / "first.json").problem_ids == list(PROBLEM_IDS)


# -- 10 ------------------------------------------------------------------------------


def test_criterion_10_round_trip():
    failures = []
    for problem in build_suite():
        clone = import_problem(export_problem(problem))
        X = in_box(problem, 100, 1000)
        for a, b in zip(evaluate_batch(problem, X), evaluate_batch(clone, X)):
            if not np.array_equal(a, b):
                failures.append(problem.id)
                break
    report(10, "export/import round trip preserves evaluation exactly", not failures,
           f"12 problems x 100 points, failures {failures}")
