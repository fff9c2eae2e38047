"""Quality indicators and rank aggregation.

All indicators assume minimisation. Hypervolume is exact for 2 to 4
objectives; :func:`hypervolume_mc` gives a seeded Monte Carlo estimate for any
number of objectives and is used as an independent cross-check.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

import numpy as np

__all__ = [
    "IncompleteMatrixError",
    "IndicatorReport",
    "UnsupportedDimensionError",
    "feasible_ratio",
    "hypervolume",
    "hypervolume_mc",
    "hypervolume_slicing",
    "igd_plus",
    "mean_rank",
    "normalize",
]

# above this size 4-objective sets go to moocore's HV4D+ implementation
LARGE_4D = 256


class UnsupportedDimensionError(ValueError):
    pass


class IncompleteMatrixError(ValueError):
    """A ranking table is missing (algorithm, problem) cells."""

    def __init__(self, missing: Sequence[tuple[str, str]]):
        self.missing = list(missing)
        cells = ", ".join(f"({a}, {p})" for a, p in self.missing[:10])
        more = f" and {len(self.missing) - 10} more" if len(self.missing) > 10 else ""
        super().__init__(f"missing scores for {cells}{more}")


@dataclass(frozen=True)
class IndicatorReport:
    problem_id: str
    algorithm_id: str
    seed: int
    hypervolume: float
    igd_plus: float
    feasible_ratio: float
    reference_point: tuple[float, ...]

    def __post_init__(self):
        if self.hypervolume < 0 or self.igd_plus < 0:
            raise ValueError("indicator values must be non-negative")
        if not 0.0 <= self.feasible_ratio <= 1.0:
            raise ValueError("feasible_ratio must lie in [0, 1]")

    CSV_HEADER = ("problem_id", "algorithm_id", "seed", "hv", "igd_plus", "feasible_ratio", "ref_point")

    def csv_row(self) -> list[str]:
        return [
            self.problem_id,
            self.algorithm_id,
            str(self.seed),
            repr(float(self.hypervolume)),
            repr(float(self.igd_plus)),
            repr(float(self.feasible_ratio)),
            ";".join(repr(float(v)) for v in self.reference_point),
        ]


def _as_points(front, m: int | None = None) -> np.ndarray:
    arr = np.asarray(front, dtype=float)
    if arr.size == 0:
        return np.empty((0, m if m is not None else 0))
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise ValueError(f"expected a set of objective vectors, got shape {arr.shape}")
    if m is not None and arr.shape[1] != m:
        raise ValueError(f"objective vectors have dimension {arr.shape[1]}, expected {m}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("objective vectors must be finite")
    return arr


# -- hypervolume --------------------------------------------------------------------


def _hv2d(pts: np.ndarray, ref: np.ndarray) -> float:
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    area = 0.0
    best_y = float(ref[1])
    for x, y in pts[order].tolist():
        if y < best_y:
            area += (ref[0] - x) * (best_y - y)
            best_y = y
    return float(area)


def _hv3d(pts: np.ndarray, ref: np.ndarray) -> float:
    """Sweep along the third objective keeping the 2-D slice area up to date."""
    r0, r1, r2 = (float(v) for v in ref)
    order = np.lexsort((pts[:, 1], pts[:, 0], pts[:, 2]))
    xs: list[float] = []  # staircase of the current slice, x ascending
    ys: list[float] = []  # matching y values, strictly descending
    area = 0.0
    volume = 0.0
    z_prev = None
    for x, y, z in pts[order].tolist():
        if z_prev is not None:
            volume += area * (z - z_prev)
        z_prev = z
        k = bisect_right(xs, x)
        if k and ys[k - 1] <= y:
            continue
        k0 = bisect_left(xs, x)
        h = ys[k0 - 1] if k0 else r1
        u = x
        added = 0.0
        j = k0
        while j < len(xs) and ys[j] >= y:
            added += (xs[j] - u) * (h - y)
            u, h = xs[j], ys[j]
            j += 1
        added += ((xs[j] if j < len(xs) else r0) - u) * (h - y)
        xs[k0:j] = [x]
        ys[k0:j] = [y]
        area += added
    if z_prev is not None:
        volume += area * (r2 - z_prev)
    return float(volume)


def _hv4d(pts: np.ndarray, ref: np.ndarray) -> float:
    order = np.argsort(pts[:, 3], kind="stable")
    pts = pts[order]
    z = pts[:, 3]
    volume = 0.0
    for i in range(len(pts)):
        top = z[i + 1] if i + 1 < len(pts) else ref[3]
        if top > z[i]:
            volume += _hv3d(pts[: i + 1, :3], ref[:3]) * (top - z[i])
    return float(volume)


def _hv_moocore(pts: np.ndarray, ref: np.ndarray) -> float:
    import moocore

    return float(moocore.hypervolume(pts, ref=ref))


def _dominating(front, ref) -> tuple[np.ndarray, np.ndarray]:
    ref = np.asarray(ref, dtype=float)
    if ref.ndim != 1 or not np.all(np.isfinite(ref)):
        raise ValueError("reference point must be a finite vector")
    pts = _as_points(front, len(ref))
    return pts[np.all(pts < ref, axis=1)], ref


def hypervolume(front, ref) -> float:
    """Exact hypervolume dominated by ``front`` and bounded by ``ref``.

    Points that do not strictly dominate ``ref`` contribute nothing.

    Raises:
        UnsupportedDimensionError: for fewer than 2 or more than 4 objectives.
    """
    pts, ref = _dominating(front, ref)
    m = len(ref)
    if m not in (2, 3, 4):
        raise UnsupportedDimensionError(f"exact hypervolume supports 2-4 objectives, got {m}; use hypervolume_mc")
    if len(pts) == 0:
        return 0.0
    if m == 2:
        return _hv2d(pts, ref)
    if m == 3:
        return _hv3d(pts, ref)
    if len(pts) > LARGE_4D:
        return _hv_moocore(pts, ref)
    return _hv4d(pts, ref)


def hypervolume_slicing(front, ref) -> float:
    """Exact hypervolume by plain recursive slicing, for any dimension.

    Cost grows like ``n ** (m - 1)``; intended for cross-checking small sets.
    """
    pts, ref = _dominating(front, ref)
    if len(pts) == 0:
        return 0.0
    return _slice(pts, ref)


def _slice(pts: np.ndarray, ref: np.ndarray) -> float:
    if pts.shape[1] == 1:
        return float(ref[0] - pts[:, 0].min())
    order = np.argsort(pts[:, -1], kind="stable")
    pts = pts[order]
    z = pts[:, -1]
    volume = 0.0
    for i in range(len(pts)):
        top = z[i + 1] if i + 1 < len(pts) else ref[-1]
        if top > z[i]:
            volume += _slice(pts[: i + 1, :-1], ref[:-1]) * (top - z[i])
    return volume


def hypervolume_mc(front, ref, samples: int = 1_000_000, seed: int = 0, chunk: int = 20_000) -> tuple[float, float]:
    """Hit-or-miss estimate over the box spanned by the front's ideal point and ``ref``.

    Returns:
        ``(estimate, standard_error)``; ``(0.0, 0.0)`` if no point dominates ``ref``.
    """
    pts, ref = _dominating(front, ref)
    if len(pts) == 0:
        return 0.0, 0.0
    lo = pts.min(axis=0)
    box = float(np.prod(ref - lo))
    rng = np.random.default_rng(seed)
    hits = 0
    done = 0
    while done < samples:
        k = min(chunk, samples - done)
        S = lo + rng.random((k, len(ref))) * (ref - lo)
        covered = np.zeros(k, dtype=bool)
        for s in range(0, len(pts), 64):
            covered |= np.all(pts[s : s + 64, None, :] <= S[None, :, :], axis=2).any(axis=0)
        hits += int(covered.sum())
        done += k
    p = hits / samples
    return box * p, box * math.sqrt(p * (1.0 - p) / samples)


# -- other indicators ----------------------------------------------------------------


def igd_plus(front, reference_front, chunk: int = 4096) -> float:
    """Mean over reference points of the dominance-clamped distance to ``front``.

    Returns ``inf`` for an empty ``front``.

    Raises:
        ValueError: if ``reference_front`` is empty or dimensions differ.
    """
    R = _as_points(reference_front)
    if len(R) == 0:
        raise ValueError("reference front must be nonempty")
    A = _as_points(front, R.shape[1])
    if len(A) == 0:
        return math.inf
    total = 0.0
    for s in range(0, len(R), chunk):
        r = R[s : s + chunk]
        d = np.maximum(A[None, :, :] - r[:, None, :], 0.0)
        total += float(np.sqrt((d * d).sum(axis=2)).min(axis=1).sum())
    return total / len(R)


def feasible_ratio(evals) -> float:
    """Share of feasible entries; accepts EvaluationResults or booleans."""
    flags = [e.feasible if hasattr(e, "feasible") else bool(e) for e in evals]
    if not flags:
        raise ValueError("feasible_ratio needs at least one evaluation")
    return sum(flags) / len(flags)


def normalize(points, ideal, nadir) -> np.ndarray:
    """Map objectives so that ``ideal`` goes to 0 and ``nadir`` to 1."""
    ideal = np.asarray(ideal, dtype=float)
    span = np.asarray(nadir, dtype=float) - ideal
    span = np.where(span > 0, span, 1.0)
    return (np.asarray(points, dtype=float) - ideal) / span


# -- ranking ---------------------------------------------------------------------------


def _average_ranks(values: Sequence[float], higher_is_better: bool) -> list[float]:
    keyed = sorted(range(len(values)), key=lambda i: -values[i] if higher_is_better else values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(keyed):
        j = i
        while j + 1 < len(keyed) and values[keyed[j + 1]] == values[keyed[i]]:
            j += 1
        for k in range(i, j + 1):
            ranks[keyed[k]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def mean_rank(table: Mapping[tuple[str, str], float], higher_is_better: bool) -> list[tuple[str, float]]:
    """Mean over problems of each algorithm's per-problem rank (ties share the average rank).

    ``table`` maps ``(algorithm, problem)`` to a score.

    Raises:
        IncompleteMatrixError: if some algorithm lacks a score on some problem.
    """
    algorithms = sorted({a for a, _ in table})
    problems = sorted({p for _, p in table})
    missing = [(a, p) for a in algorithms for p in problems if (a, p) not in table]
    if missing:
        raise IncompleteMatrixError(missing)
    totals = dict.fromkeys(algorithms, 0.0)
    for p in problems:
        scores = [float(table[(a, p)]) for a in algorithms]
        for a, r in zip(algorithms, _average_ranks(scores, higher_is_better)):
            totals[a] += r
    result = [(a, totals[a] / len(problems)) for a in algorithms] if problems else []
    return sorted(result, key=lambda t: (t[1], t[0]))
