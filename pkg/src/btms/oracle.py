"""Reference fronts by dense Latin-hypercube sampling and Pareto filtering."""

from __future__ import annotations

import gzip
from bisect import bisect_left, bisect_right
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .suite import ProblemDescriptor, evaluate_batch

GENERATOR_VERSION = "lhs-1"
DEFAULT_SAMPLES = 1_000_000
DEFAULT_SEED = 20250101
REFERENCE_OFFSET = 0.1
DESIGN_BLOCK = 10_000
# above this size, 4+ objective filtering goes to moocore
LARGE_FILTER = 20_000

__all__ = [
    "EmptyFrontError",
    "ReferenceFront",
    "front_csv_text",
    "latin_hypercube",
    "nadir_and_ideal",
    "pareto_filter",
    "read_front_csv",
    "read_front_text",
    "reference_point",
    "sample_reference_front",
    "write_front_csv",
]


class EmptyFrontError(RuntimeError):
    """No feasible sample was drawn for a problem."""


@dataclass(frozen=True)
class ReferenceFront:
    problem_id: str
    points: np.ndarray
    sample_count: int
    seed: int
    generator_version: str = GENERATOR_VERSION

    def __len__(self) -> int:
        return len(self.points)


def _dominated_by(cands: np.ndarray, by: np.ndarray, chunk: int = 512) -> np.ndarray:
    """Mask of ``cands`` rows dominated by some row of ``by``."""
    out = np.zeros(len(cands), dtype=bool)
    if len(by) == 0 or len(cands) == 0:
        return out
    for s in range(0, len(by), chunk):
        b = by[s : s + chunk, None, :]
        c = cands[None, :, :]
        out |= (np.all(b <= c, axis=2) & np.any(b < c, axis=2)).any(axis=0)
    return out


def _filter_sorted_unique(arr: np.ndarray, block: int = 2048) -> np.ndarray:
    # rows are unique and lexicographically sorted, so a dominator always precedes
    # the point it dominates
    if arr.shape[1] == 1:
        return arr[:1]
    if arr.shape[1] == 2:
        prev = np.concatenate(([np.inf], np.minimum.accumulate(arr[:-1, 1])))
        return arr[arr[:, 1] < prev]
    if arr.shape[1] == 3:
        return arr[_sweep3(arr)]
    front = np.empty((0, arr.shape[1]))
    for s in range(0, len(arr), block):
        blk = arr[s : s + block]
        blk = blk[~_dominated_by(blk, front)]
        D = np.all(blk[:, None, :] <= blk[None, :, :], axis=2)
        np.fill_diagonal(D, False)
        front = np.concatenate([front, blk[~D.any(axis=0)]])
    return front


def _sweep3(arr: np.ndarray) -> list[int]:
    """Indices of nondominated rows, keeping a 2-D staircase of (f2, f3)."""
    ys: list[float] = []  # f2 ascending
    zs: list[float] = []  # f3 strictly descending
    keep = []
    for i, (_, y, z) in enumerate(arr.tolist()):
        k = bisect_right(ys, y)
        if k and zs[k - 1] <= z:
            continue
        keep.append(i)
        k0 = bisect_left(ys, y)
        j = k0
        while j < len(ys) and zs[j] >= z:
            j += 1
        ys[k0:j] = [y]
        zs[k0:j] = [z]
    return keep


def pareto_filter(points) -> np.ndarray:
    """Nondominated subset of ``points`` (minimisation).

    Duplicates collapse to a single row. The result is sorted
    lexicographically, which makes it a canonical representation of the set.

    Raises:
        ValueError: if rows have mixed dimensions or contain non-finite values.
    """
    try:
        arr = np.array(points, dtype=float)
    except ValueError:
        raise ValueError("points must all have the same dimension") from None
    if arr.size == 0:
        return np.empty((0, arr.shape[1] if arr.ndim == 2 else 0))
    if arr.ndim != 2:
        raise ValueError(f"expected a list of objective vectors, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("objective vectors must be finite")
    arr = np.unique(arr, axis=0)
    if arr.shape[1] >= 4 and len(arr) > LARGE_FILTER:
        import moocore

        return arr[moocore.is_nondominated(arr, keep_weakly=False)]
    return _filter_sorted_unique(arr)


def latin_hypercube(n: int, dim: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` points in ``[0, 1)^dim`` with exactly one point per stratum per axis."""
    u = rng.random((n, dim))
    out = np.empty((n, dim))
    for j in range(dim):
        out[:, j] = (rng.permutation(n) + u[:, j]) / n
    return out


def block_seed(seed: int, block: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=seed, spawn_key=(block,))


def sample_design(problem: ProblemDescriptor, n: int, seed: int) -> np.ndarray:
    """Decision vectors of the reference design: consecutive LHS blocks.

    Block ``b`` holds rows ``[b * DESIGN_BLOCK, (b + 1) * DESIGN_BLOCK)`` and
    is drawn from its own derived seed, so a smaller design is always a prefix
    of a larger one with the same seed.
    """
    return sample_design_range(problem, seed, 0, n, n)


def sample_design_range(problem: ProblemDescriptor, seed: int, start: int, stop: int, n: int) -> np.ndarray:
    """Rows ``[start, stop)`` of ``sample_design(problem, n, seed)``; ``start`` is block aligned."""
    blocks = []
    for s in range(start, stop, DESIGN_BLOCK):
        b = s // DESIGN_BLOCK
        rng = np.random.default_rng(block_seed(seed, b))
        U = latin_hypercube(min(DESIGN_BLOCK, n - s), problem.n_vars, rng)
        blocks.append(problem.lower + U * (problem.upper - problem.lower))
    X = np.concatenate(blocks)[: stop - start]
    return np.minimum(np.maximum(X, problem.lower), problem.upper)


def _feasible_front(problem: ProblemDescriptor, X: np.ndarray) -> np.ndarray:
    F, _, cv = evaluate_batch(problem, X)
    return pareto_filter(F[cv == 0.0]) if np.any(cv == 0.0) else np.empty((0, problem.n_objectives))


def sample_reference_front(
    problem: ProblemDescriptor,
    n: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
    chunk: int = 10 * DESIGN_BLOCK,
) -> ReferenceFront:
    """Feasible nondominated objective vectors of an ``n``-point LHS design.

    Disjoint index ranges (multiples of the design block) are drawn, evaluated
    and filtered independently, optionally on ``workers`` threads. Local
    fronts are merged and filtered again, so the result does not depend on
    ``workers``.

    Raises:
        EmptyFrontError: if none of the ``n`` samples is feasible.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if chunk % DESIGN_BLOCK:
        raise ValueError("chunk must be a multiple of the design block")
    starts = range(0, n, chunk)

    def part(start: int) -> np.ndarray:
        X = sample_design_range(problem, seed, start, min(start + chunk, n), n)
        return _feasible_front(problem, X)

    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(part, starts))
    else:
        parts = [part(s) for s in starts]
    merged = np.concatenate(parts) if parts else np.empty((0, problem.n_objectives))
    if len(merged) == 0:
        raise EmptyFrontError(f"{problem.id}: no feasible point among {n} samples (seed {seed})")
    return ReferenceFront(problem.id, pareto_filter(merged), n, seed, GENERATOR_VERSION)


def nadir_and_ideal(front: ReferenceFront | np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Componentwise ``(max, min)`` of the front points."""
    pts = np.asarray(front.points if isinstance(front, ReferenceFront) else front, dtype=float)
    if pts.size == 0:
        raise EmptyFrontError("nadir and ideal points are undefined for an empty front")
    return pts.max(axis=0), pts.min(axis=0)


def reference_point(front: ReferenceFront | np.ndarray, offset: float = REFERENCE_OFFSET) -> np.ndarray:
    """Nadir pushed ``offset`` times the ideal-nadir range away from the ideal."""
    nadir, ideal = nadir_and_ideal(front)
    span = nadir - ideal
    # degenerate objectives still need a strictly worse reference coordinate
    span = np.where(span > 0, span, np.maximum(np.abs(nadir), 1.0))
    return nadir + offset * span


def _fmt(v: float) -> str:
    return format(v, ".17g")


def front_csv_text(front: ReferenceFront) -> str:
    """Canonical CSV text of ``front``: two header comments, then one row per point."""
    ref = reference_point(front)
    lines = [
        f"# problem={front.problem_id}, n={front.sample_count}, seed={front.seed}, version={front.generator_version}",
        f"# reference_point={';'.join(_fmt(v) for v in ref)}",
    ]
    lines += [",".join(_fmt(v) for v in row) for row in front.points]
    return "\n".join(lines) + "\n"


def write_front_csv(front: ReferenceFront, path: str | Path) -> Path:
    """Write ``front``; gzip-compressed with a zero timestamp when ``path`` ends in ``.gz``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = front_csv_text(front).encode()
    if path.suffix == ".gz":
        with open(path, "wb") as fh, gzip.GzipFile(filename="", mode="wb", fileobj=fh, mtime=0) as gz:
            gz.write(data)
    else:
        path.write_bytes(data)
    return path


def read_front_text(path: str | Path) -> str:
    path = Path(path)
    if path.suffix == ".gz":
        with gzip.open(path, "rt") as fh:
            return fh.read()
    return path.read_text()


def read_front_csv(path: str | Path) -> tuple[ReferenceFront, np.ndarray | None]:
    """Load a front CSV; returns the front and its stored reference point."""
    meta: dict[str, str] = {}
    ref = None
    rows = []
    for line in read_front_text(path).splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("reference_point="):
                ref = np.array([float(v) for v in body.split("=", 1)[1].split(";")])
            else:
                for item in body.split(","):
                    if "=" in item:
                        k, v = item.split("=", 1)
                        meta[k.strip()] = v.strip()
            continue
        rows.append([float(v) for v in line.split(",")])
    pts = np.array(rows, dtype=float) if rows else np.empty((0, len(ref) if ref is not None else 0))
    front = ReferenceFront(
        problem_id=meta.get("problem", ""),
        points=pts,
        sample_count=int(meta.get("n", len(rows))),
        seed=int(meta.get("seed", 0)),
        generator_version=meta.get("version", GENERATOR_VERSION),
    )
    return front, ref
