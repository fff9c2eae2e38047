"""Constrained NSGA-II with SBX crossover and polynomial mutation.

Constraint handling follows the usual feasibility rules: a feasible solution
beats an infeasible one, two infeasible solutions compare by total violation,
and two feasible ones by Pareto dominance.
"""

from __future__ import annotations

import math
import time
from collections.abc import Sequence
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .metrics import hypervolume
from .suite import SUITE_VERSION, EvaluationResult, ProblemDescriptor, evaluate_batch, repair_to_box

__all__ = [
    "AlgoConfig",
    "ConfigError",
    "Individual",
    "RunRecord",
    "archive_indices",
    "constrained_dominance_matrix",
    "constrained_dominates",
    "crowding_distance",
    "fast_nondominated_sort",
    "nondominated_fronts",
    "nsga2_run",
    "polynomial_mutation",
    "sbx_crossover",
]

BUILD_VERSION = "0.1.0"
ALGORITHM_ID = "nsga2"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class AlgoConfig:
    """NSGA-II settings; ``mutation_probability=None`` means ``1 / n_vars``."""

    population_size: int = 100
    generations: int = 250
    crossover_probability: float = 0.9
    crossover_eta: float = 20.0
    mutation_probability: float | None = None
    mutation_eta: float = 20.0
    seed: int = 0

    def validate(self) -> AlgoConfig:
        if isinstance(self.population_size, bool) or not isinstance(self.population_size, int):
            raise ConfigError("population_size must be an integer")
        if self.population_size < 4 or self.population_size % 2:
            raise ConfigError(f"population_size must be even and at least 4, got {self.population_size}")
        if isinstance(self.generations, bool) or not isinstance(self.generations, int) or self.generations < 0:
            raise ConfigError(f"generations must be a non-negative integer, got {self.generations!r}")
        if not 0.0 <= self.crossover_probability <= 1.0:
            raise ConfigError("crossover_probability must lie in [0, 1]")
        if self.mutation_probability is not None and not 0.0 <= self.mutation_probability <= 1.0:
            raise ConfigError("mutation_probability must lie in [0, 1]")
        if not (self.crossover_eta > 0 and self.mutation_eta > 0):
            raise ConfigError("distribution indices must be positive")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int):
            raise ConfigError("seed must be an integer")
        return self

    def resolved(self, n_vars: int) -> AlgoConfig:
        if self.mutation_probability is not None:
            return self
        return AlgoConfig(**{**asdict(self), "mutation_probability": 1.0 / n_vars})

    @classmethod
    def from_dict(cls, data: dict) -> AlgoConfig:
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown algorithm settings: {', '.join(unknown)}")
        return cls(**data).validate()

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class Individual:
    x: np.ndarray
    eval: EvaluationResult
    rank: int | None = None
    crowding: float | None = None


def _unpack(item) -> tuple[np.ndarray, float]:
    ev = item.eval if isinstance(item, Individual) else item
    return np.asarray(ev.f, dtype=float), float(ev.cv)


def constrained_dominates(a, b) -> bool:
    """Whether ``a`` beats ``b`` under the feasibility rules (Individuals or EvaluationResults)."""
    fa, ca = _unpack(a)
    fb, cb = _unpack(b)
    if fa.shape != fb.shape:
        raise ValueError(f"objective dimensions differ: {fa.shape} vs {fb.shape}")
    if ca == 0.0 and cb > 0.0:
        return True
    if ca > 0.0 or cb > 0.0:
        return ca > 0.0 and cb > 0.0 and ca < cb
    return bool(np.all(fa <= fb) and np.any(fa < fb))


def constrained_dominance_matrix(F: np.ndarray, cv: np.ndarray) -> np.ndarray:
    """``D[i, j]`` is true iff row ``i`` constrained-dominates row ``j``."""
    feas = cv == 0.0
    le = np.all(F[:, None, :] <= F[None, :, :], axis=2)
    lt = np.any(F[:, None, :] < F[None, :, :], axis=2)
    both = feas[:, None] & feas[None, :]
    neither = ~feas[:, None] & ~feas[None, :]
    return (feas[:, None] & ~feas[None, :]) | (neither & (cv[:, None] < cv[None, :])) | (both & le & lt)


def nondominated_fronts(F, cv=None) -> list[list[int]]:
    """Stratify rows into fronts under constrained dominance (indices ascending)."""
    F = np.asarray(F, dtype=float)
    if len(F) == 0:
        return []
    cv = np.zeros(len(F)) if cv is None else np.asarray(cv, dtype=float)
    D = constrained_dominance_matrix(F, cv)
    count = D.sum(axis=0)
    assigned = np.zeros(len(F), dtype=bool)
    fronts = []
    while not assigned.all():
        front = np.flatnonzero((count == 0) & ~assigned)
        fronts.append(front.tolist())
        assigned[front] = True
        count = count - D[front].sum(axis=0)
    return fronts


def fast_nondominated_sort(pop: Sequence[Individual | EvaluationResult]) -> list[list[int]]:
    """Fronts of indices into ``pop``; front 0 is nondominated under constrained dominance."""
    if len(pop) == 0:
        return []
    pairs = [_unpack(p) for p in pop]
    F = np.array([f for f, _ in pairs])
    cv = np.array([c for _, c in pairs])
    return nondominated_fronts(F, cv)


def crowding_distance(front_objs) -> np.ndarray:
    """Crowding distance of each vector within one front.

    Extreme points of every objective (first and last after a stable sort)
    get ``inf``; an objective with zero range adds nothing to interior points.
    """
    F = np.asarray(front_objs, dtype=float)
    n = len(F)
    if n == 0:
        return np.zeros(0)
    d = np.zeros(n)
    if n <= 2:
        d[:] = math.inf
        return d
    for j in range(F.shape[1]):
        order = np.argsort(F[:, j], kind="stable")
        col = F[order, j]
        span = col[-1] - col[0]
        if span > 0:
            d[order[1:-1]] += (col[2:] - col[:-2]) / span
        d[order[0]] = math.inf
        d[order[-1]] = math.inf
    return d


# -- variation ------------------------------------------------------------------------


def _sbx(P1, P2, eta, lower, upper, u, do, swap, clamp=True):
    expo = 1.0 / (eta + 1.0)
    beta = np.where(u <= 0.5, (2.0 * u) ** expo, (1.0 / (2.0 * (1.0 - u))) ** expo)
    c1 = 0.5 * ((1.0 + beta) * P1 + (1.0 - beta) * P2)
    c2 = 0.5 * ((1.0 - beta) * P1 + (1.0 + beta) * P2)
    keep = ~do | (np.abs(P1 - P2) < 1e-14)
    c1 = np.where(keep, P1, c1)
    c2 = np.where(keep, P2, c2)
    c1, c2 = np.where(swap, c2, c1), np.where(swap, c1, c2)
    if clamp:
        c1 = np.minimum(np.maximum(c1, lower), upper)
        c2 = np.minimum(np.maximum(c2, lower), upper)
    return c1, c2


def sbx_crossover(p1, p2, eta: float, bounds, rng: np.random.Generator, *, prob_var: float = 0.5, clamp: bool = True):
    """Simulated binary crossover of two parents.

    Each variable is recombined with probability ``prob_var`` and the two
    children swap values per variable with probability 0.5. Without clamping
    the children's sum equals the parents' sum for every variable.

    Args:
        bounds: ``(lower, upper)`` arrays of the variable box.

    Returns:
        ``(child1, child2)``.
    """
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    lower, upper = (np.asarray(b, dtype=float) for b in bounds)
    n = len(p1)
    u = rng.random(n)
    do = rng.random(n) < prob_var
    swap = rng.random(n) < 0.5
    return _sbx(p1, p2, eta, lower, upper, u, do, swap, clamp)


def _pm(X, eta, lower, upper, mask, r):
    span = upper - lower
    d1 = (X - lower) / span
    d2 = (upper - X) / span
    expo = 1.0 / (eta + 1.0)
    low = r < 0.5
    val_lo = 2.0 * r + (1.0 - 2.0 * r) * (1.0 - d1) ** (eta + 1.0)
    val_hi = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * (1.0 - d2) ** (eta + 1.0)
    dq = np.where(low, val_lo ** expo - 1.0, 1.0 - val_hi ** expo)
    Y = np.where(mask, X + dq * span, X)
    return np.minimum(np.maximum(Y, lower), upper)


def polynomial_mutation(x, eta: float, pm: float, bounds, rng: np.random.Generator) -> np.ndarray:
    """Bounded polynomial mutation; each variable mutates with probability ``pm``."""
    x = np.asarray(x, dtype=float)
    lower, upper = (np.asarray(b, dtype=float) for b in bounds)
    mask = rng.random(x.shape) < pm
    r = rng.random(x.shape)
    return _pm(x, eta, lower, upper, mask, r)


# -- selection ---------------------------------------------------------------------------


def _rank_and_crowding(F: np.ndarray, cv: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    rank = np.empty(len(F), dtype=int)
    crowd = np.empty(len(F))
    for r, front in enumerate(nondominated_fronts(F, cv)):
        rank[front] = r
        crowd[front] = crowding_distance(F[front])
    return rank, crowd


def _tournament(rank: np.ndarray, crowd: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    a, b = rng.integers(0, len(rank), size=(2, k))
    a_wins = (rank[a] < rank[b]) | ((rank[a] == rank[b]) & (crowd[a] > crowd[b]))
    b_wins = (rank[b] < rank[a]) | ((rank[a] == rank[b]) & (crowd[b] > crowd[a]))
    tie = ~a_wins & ~b_wins
    return np.where(a_wins | (tie & (a <= b)), a, b)


def _environmental_selection(F: np.ndarray, cv: np.ndarray, n: int) -> np.ndarray:
    chosen: list[int] = []
    for front in nondominated_fronts(F, cv):
        if len(chosen) + len(front) <= n:
            chosen.extend(front)
            if len(chosen) == n:
                break
            continue
        d = crowding_distance(F[front])
        # descending crowding; stable, so ties keep the lower index
        order = np.argsort(-d, kind="stable")
        chosen.extend(np.asarray(front)[order[: n - len(chosen)]].tolist())
        break
    return np.array(chosen, dtype=int)


def archive_indices(F: np.ndarray, cv: np.ndarray) -> np.ndarray:
    """Indices of the feasible nondominated rows, one per distinct objective vector, in lexicographic order of F."""
    feas = np.flatnonzero(cv == 0.0)
    if len(feas) == 0:
        return feas
    G = F[feas]
    order = np.lexsort(G.T[::-1])
    G = G[order]
    idx = feas[order]
    distinct = np.ones(len(G), dtype=bool)
    distinct[1:] = np.any(G[1:] != G[:-1], axis=1)
    G, idx = G[distinct], idx[distinct]
    le = np.all(G[:, None, :] <= G[None, :, :], axis=2)
    np.fill_diagonal(le, False)
    return idx[~le.any(axis=0)]


# -- run ---------------------------------------------------------------------------------


@dataclass
class RunRecord:
    """Outcome of one seeded run."""

    problem_id: str
    seed: int
    config: dict
    archive_x: np.ndarray
    archive_f: np.ndarray
    population_x: np.ndarray
    population_f: np.ndarray
    population_cv: np.ndarray
    population_rank: np.ndarray
    population_crowding: np.ndarray
    generations: list[dict] = field(default_factory=list)
    evaluations: int = 0
    wall_time: float = 0.0
    algorithm_id: str = ALGORITHM_ID
    suite_version: str = SUITE_VERSION
    build_version: str = BUILD_VERSION

    def individuals(self, problem: ProblemDescriptor) -> list[Individual]:
        _, V, _ = evaluate_batch(problem, self.population_x)
        out = []
        for i, x in enumerate(self.population_x):
            c = float(self.population_cv[i])
            ev = EvaluationResult(x=x.copy(), f=self.population_f[i].copy(), violations=V[i], cv=c, feasible=c == 0.0)
            out.append(Individual(x.copy(), ev, int(self.population_rank[i]), float(self.population_crowding[i])))
        return out

    def feasible_ratio(self) -> float:
        return float(np.mean(self.population_cv == 0.0))


def nsga2_run(
    problem: ProblemDescriptor,
    cfg: AlgoConfig,
    reference_point: Sequence[float] | None = None,
) -> RunRecord:
    """Run constrained NSGA-II on ``problem``.

    The result depends only on ``problem`` and ``cfg`` (including its seed).
    With ``reference_point`` the archive hypervolume is logged every
    generation.
    """
    cfg = cfg.validate().resolved(problem.n_vars)
    started = time.perf_counter()
    rng = np.random.default_rng(cfg.seed)
    lower, upper = problem.lower, problem.upper
    N, n = cfg.population_size, problem.n_vars
    ref = None if reference_point is None else np.asarray(reference_point, dtype=float)

    X = repair_to_box(problem, lower + rng.random((N, n)) * (upper - lower))
    F, _, cv = evaluate_batch(problem, X)
    evaluations = N
    rank, crowd = _rank_and_crowding(F, cv)
    history = [_stats(0, F, cv, ref)]

    half = N // 2
    for gen in range(1, cfg.generations + 1):
        mates = _tournament(rank, crowd, N, rng)
        P1, P2 = X[mates[:half]], X[mates[half:]]
        pair_do = rng.random(half) < cfg.crossover_probability
        u = rng.random((half, n))
        do = (rng.random((half, n)) < 0.5) & pair_do[:, None]
        swap = rng.random((half, n)) < 0.5
        C1, C2 = _sbx(P1, P2, cfg.crossover_eta, lower, upper, u, do, swap)
        C = np.concatenate([C1, C2])
        mask = rng.random(C.shape) < cfg.mutation_probability
        r = rng.random(C.shape)
        C = _pm(C, cfg.mutation_eta, lower, upper, mask, r)
        FC, _, cvC = evaluate_batch(problem, C)
        evaluations += N

        XX = np.concatenate([X, C])
        FF = np.concatenate([F, FC])
        CC = np.concatenate([cv, cvC])
        keep = _environmental_selection(FF, CC, N)
        X, F, cv = XX[keep], FF[keep], CC[keep]
        rank, crowd = _rank_and_crowding(F, cv)
        history.append(_stats(gen, F, cv, ref))

    arch = archive_indices(F, cv)
    return RunRecord(
        problem_id=problem.id,
        seed=cfg.seed,
        config=cfg.to_dict(),
        archive_x=X[arch],
        archive_f=F[arch],
        population_x=X,
        population_f=F,
        population_cv=cv,
        population_rank=rank,
        population_crowding=crowd,
        generations=history,
        evaluations=evaluations,
        wall_time=time.perf_counter() - started,
    )


def _stats(gen: int, F: np.ndarray, cv: np.ndarray, ref: np.ndarray | None) -> dict:
    arch = archive_indices(F, cv)
    row = {
        "generation": gen,
        "best_cv": float(cv.min()),
        "feasible_count": int((cv == 0.0).sum()),
        "archive_size": int(len(arch)),
    }
    if ref is not None:
        row["hypervolume"] = hypervolume(F[arch], ref) if len(arch) else 0.0
    return row
