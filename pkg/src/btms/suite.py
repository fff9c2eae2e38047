"""Problem descriptors, evaluation and JSON exchange for the BTMS suite."""

from __future__ import annotations

import json
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from . import problems
from .polynomial import Polynomial, PolynomialParseError, parse_poly, serialize_poly

SUITE_VERSION = "1.0"

__all__ = [
    "SUITE_VERSION",
    "ConstraintSpec",
    "EvaluationResult",
    "ObjectiveSpec",
    "ProblemDescriptor",
    "ProblemInputError",
    "ProblemValidationError",
    "VariableSpec",
    "build_suite",
    "evaluate",
    "evaluate_batch",
    "export_problem",
    "get_problem",
    "import_problem",
    "random_point",
    "repair_to_box",
    "with_sense_overrides",
]


class ProblemInputError(ValueError):
    """Decision vector has the wrong length or lies outside the box."""


class ProblemValidationError(ValueError):
    """Descriptor data violates an invariant."""


@dataclass(frozen=True)
class VariableSpec:
    symbol: str
    description: str
    units: str
    lower: float
    upper: float

    def __post_init__(self):
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            raise ProblemValidationError(f"variable {self.symbol}: bounds must be finite")
        if not self.lower < self.upper:
            raise ProblemValidationError(
                f"variable {self.symbol}: lower bound {self.lower} must be below upper bound {self.upper}"
            )


@dataclass(frozen=True)
class ObjectiveSpec:
    name: str
    units: str
    body: Polynomial
    printed_sense: str = "minimize"
    effective_sense: str = "minimize"

    def __post_init__(self):
        if self.printed_sense not in ("minimize", "maximize"):
            raise ProblemValidationError(f"objective {self.name}: unknown sense {self.printed_sense!r}")
        if self.effective_sense != "minimize":
            raise ProblemValidationError(f"objective {self.name}: stored objectives are always minimized")


@dataclass(frozen=True)
class ConstraintSpec:
    """``lower <= expr <= upper``; ``expr`` is a polynomial or an objective index."""

    label: str
    expr: Polynomial | int
    lower: float = -math.inf
    upper: float = math.inf

    def __post_init__(self):
        if not (math.isfinite(self.lower) or math.isfinite(self.upper)):
            raise ProblemValidationError(f"constraint {self.label!r}: at least one bound must be finite")
        if self.lower > self.upper:
            raise ProblemValidationError(f"constraint {self.label!r}: lower bound exceeds upper bound")


@dataclass(frozen=True)
class ProblemDescriptor:
    id: str
    title: str
    citation: str
    variables: tuple[VariableSpec, ...]
    objectives: tuple[ObjectiveSpec, ...]
    constraints: tuple[ConstraintSpec, ...] = ()
    lower: np.ndarray = field(init=False, repr=False, compare=False)
    upper: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "objectives", tuple(self.objectives))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        n = len(self.variables)
        if n == 0:
            raise ProblemValidationError(f"{self.id}: no variables")
        if not self.objectives:
            raise ProblemValidationError(f"{self.id}: no objectives")
        for obj in self.objectives:
            if obj.body.n_vars != n:
                raise ProblemValidationError(
                    f"{self.id}: objective {obj.name} has {obj.body.n_vars} variables, expected {n}"
                )
        for con in self.constraints:
            if isinstance(con.expr, Polynomial):
                if con.expr.n_vars != n:
                    raise ProblemValidationError(
                        f"{self.id}: constraint {con.label!r} has {con.expr.n_vars} variables, expected {n}"
                    )
            elif not 0 <= con.expr < len(self.objectives):
                raise ProblemValidationError(f"{self.id}: constraint {con.label!r} references missing objective")
        lower = np.array([v.lower for v in self.variables])
        upper = np.array([v.upper for v in self.variables])
        lower.flags.writeable = False
        upper.flags.writeable = False
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def n_vars(self) -> int:
        return len(self.variables)

    @property
    def n_objectives(self) -> int:
        return len(self.objectives)

    @property
    def n_constraints(self) -> int:
        return len(self.constraints)

    @property
    def var_names(self) -> list[str]:
        return [v.symbol for v in self.variables]


@dataclass(frozen=True)
class EvaluationResult:
    x: np.ndarray
    f: np.ndarray
    violations: np.ndarray
    cv: float
    feasible: bool

    def to_dict(self) -> dict:
        return {
            "x": self.x.tolist(),
            "f": self.f.tolist(),
            "violations": self.violations.tolist(),
            "cv": self.cv,
            "feasible": self.feasible,
        }


# -- suite construction ---------------------------------------------------------


def _build(pid: str, strict_paper: bool) -> ProblemDescriptor:
    variables = [VariableSpec(*row) for row in problems.variable_rows(pid)]
    objectives = [
        ObjectiveSpec(name, units, body, printed_sense=sense)
        for name, units, sense, body in problems.objective_rows(pid, strict_paper=strict_paper)
    ]
    constraints = [ConstraintSpec(*row) for row in problems.constraint_rows(pid)]
    return ProblemDescriptor(
        id=pid,
        title=problems.TITLES[pid],
        citation=problems.CITATIONS[pid],
        variables=variables,
        objectives=objectives,
        constraints=constraints,
    )


@lru_cache(maxsize=2)
def _suite(strict_paper: bool) -> tuple[ProblemDescriptor, ...]:
    return tuple(_build(pid, strict_paper) for pid in problems.PROBLEM_IDS)


def build_suite(strict_paper: bool = False) -> list[ProblemDescriptor]:
    """All twelve problems, ``BTMS-1`` to ``BTMS-12``.

    With ``strict_paper`` the BTMS-9 Q_f term printed with an undeclared
    fourth variable is dropped instead of being mapped onto ``x3``.
    """
    return list(_suite(strict_paper))


def get_problem(problem_id: str, strict_paper: bool = False) -> ProblemDescriptor:
    for p in _suite(strict_paper):
        if p.id.lower() == problem_id.lower():
            return p
    raise KeyError(f"unknown problem id {problem_id!r}; expected one of {', '.join(problems.PROBLEM_IDS)}")


def with_sense_overrides(problem: ProblemDescriptor, overrides: Mapping[int, str]) -> ProblemDescriptor:
    """Copy of ``problem`` where objectives marked ``"maximize"`` are negated.

    Keys are zero-based objective indices. Objective-range constraints keep
    referring to the printed (un-negated) values.
    """
    objectives = list(problem.objectives)
    constraints = list(problem.constraints)
    for idx, sense in overrides.items():
        idx = int(idx)
        if sense not in ("minimize", "maximize"):
            raise ProblemValidationError(f"unknown sense {sense!r}")
        if not 0 <= idx < len(objectives):
            raise ProblemValidationError(f"{problem.id}: no objective with index {idx}")
        if sense == "maximize":
            obj = objectives[idx]
            objectives[idx] = replace(obj, name=f"-({obj.name})", body=-obj.body)
            constraints = [
                replace(c, expr=obj.body) if not isinstance(c.expr, Polynomial) and c.expr == idx else c
                for c in constraints
            ]
    return replace(problem, objectives=tuple(objectives), constraints=tuple(constraints))


# -- evaluation -------------------------------------------------------------------


def _check_box(problem: ProblemDescriptor, X: np.ndarray) -> None:
    if X.ndim != 2 or X.shape[1] != problem.n_vars:
        raise ProblemInputError(f"{problem.id}: expected {problem.n_vars} variables, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ProblemInputError(f"{problem.id}: decision vector contains non-finite values")
    below = X < problem.lower
    above = X > problem.upper
    if below.any() or above.any():
        row, col = np.argwhere(below | above)[0]
        v = problem.variables[col]
        raise ProblemInputError(
            f"{problem.id}: {v.symbol}={X[row, col]!r} outside [{v.lower}, {v.upper}]"
        )


def evaluate_batch(problem: ProblemDescriptor, X) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised evaluation of rows of ``X``.

    Returns:
        ``(F, V, cv)`` with shapes ``(k, n_obj)``, ``(k, n_con)`` and ``(k,)``.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    _check_box(problem, X)
    k = X.shape[0]
    F = np.empty((k, problem.n_objectives))
    for j, obj in enumerate(problem.objectives):
        F[:, j] = obj.body._eval_rows(X)
    V = np.empty((k, problem.n_constraints))
    cv = np.zeros(k)
    for j, con in enumerate(problem.constraints):
        e = con.expr._eval_rows(X) if isinstance(con.expr, Polynomial) else F[:, con.expr]
        v = np.zeros(k)
        if math.isfinite(con.lower):
            v = np.maximum(v, con.lower - e)
        if math.isfinite(con.upper):
            v = np.maximum(v, e - con.upper)
        V[:, j] = v
        cv = cv + v
    return F, V, cv


def evaluate(problem: ProblemDescriptor, x: Sequence[float]) -> EvaluationResult:
    """Objectives and constraint violations of one in-box decision vector.

    Raises:
        ProblemInputError: if ``x`` has the wrong length or leaves the box.
    """
    arr = np.array(x, dtype=float)
    if arr.ndim != 1:
        raise ProblemInputError(f"{problem.id}: expected a 1-D decision vector")
    F, V, cv = evaluate_batch(problem, arr[None, :])
    c = float(cv[0])
    return EvaluationResult(x=arr, f=F[0], violations=V[0], cv=c, feasible=c == 0.0)


def repair_to_box(problem: ProblemDescriptor, x) -> np.ndarray:
    """Clamp ``x`` (or each row of a 2-D array) into the variable box."""
    arr = np.asarray(x, dtype=float)
    if arr.shape[-1] != problem.n_vars:
        raise ProblemInputError(f"{problem.id}: expected {problem.n_vars} variables, got {arr.shape[-1]}")
    return np.minimum(np.maximum(arr, problem.lower), problem.upper)


def random_point(problem: ProblemDescriptor, rng: np.random.Generator) -> np.ndarray:
    """Uniform sample of the variable box."""
    u = rng.random(problem.n_vars)
    return repair_to_box(problem, problem.lower + u * (problem.upper - problem.lower))


# -- JSON exchange -----------------------------------------------------------------


def _num(value: float) -> float | str:
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


def _unnum(value, what: str) -> float:
    if value is None:
        return math.inf if what == "upper" else -math.inf
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ProblemValidationError(f"{what}: expected a number, got {value!r}") from None


def problem_to_dict(problem: ProblemDescriptor) -> dict:
    names = problem.var_names
    constraints = []
    for c in problem.constraints:
        row = {"label": c.label}
        if isinstance(c.expr, Polynomial):
            row["poly"] = serialize_poly(c.expr, names)
        else:
            row["objective_index"] = c.expr
        row["lower"] = _num(c.lower)
        row["upper"] = _num(c.upper)
        constraints.append(row)
    return {
        "id": problem.id,
        "title": problem.title,
        "citation": problem.citation,
        "variables": [
            {"symbol": v.symbol, "description": v.description, "units": v.units, "lower": v.lower, "upper": v.upper}
            for v in problem.variables
        ],
        "objectives": [
            {"name": o.name, "units": o.units, "printed_sense": o.printed_sense, "poly": serialize_poly(o.body, names)}
            for o in problem.objectives
        ],
        "constraints": constraints,
    }


def export_problem(problem: ProblemDescriptor) -> str:
    """JSON text of ``problem``; floats are written in shortest round-trip form."""
    return json.dumps(problem_to_dict(problem), indent=2)


def _require(obj: Mapping, key: str, where: str):
    if not isinstance(obj, Mapping):
        raise ProblemValidationError(f"{where}: expected an object")
    if key not in obj:
        raise ProblemValidationError(f"{where}: missing key {key!r}")
    return obj[key]


def problem_from_dict(data: Mapping) -> ProblemDescriptor:
    pid = str(_require(data, "id", "problem"))
    raw_vars = _require(data, "variables", pid)
    if not isinstance(raw_vars, list) or not raw_vars:
        raise ProblemValidationError(f"{pid}: 'variables' must be a nonempty list")
    variables = []
    for i, v in enumerate(raw_vars):
        where = f"{pid}.variables[{i}]"
        variables.append(
            VariableSpec(
                symbol=str(_require(v, "symbol", where)),
                description=str(v.get("description", "")),
                units=str(v.get("units", "")),
                lower=_unnum(_require(v, "lower", where), f"{where}.lower"),
                upper=_unnum(_require(v, "upper", where), f"{where}.upper"),
            )
        )
    names = [v.symbol for v in variables]
    if len(set(names)) != len(names):
        raise ProblemValidationError(f"{pid}: duplicate variable symbols")

    def poly(text, where: str) -> Polynomial:
        try:
            return parse_poly(str(text), names)
        except PolynomialParseError as exc:
            raise ProblemValidationError(f"{where}: {exc}") from None

    raw_objs = _require(data, "objectives", pid)
    if not isinstance(raw_objs, list) or not raw_objs:
        raise ProblemValidationError(f"{pid}: 'objectives' must be a nonempty list")
    objectives = []
    for i, o in enumerate(raw_objs):
        where = f"{pid}.objectives[{i}]"
        objectives.append(
            ObjectiveSpec(
                name=str(_require(o, "name", where)),
                units=str(o.get("units", "")),
                body=poly(_require(o, "poly", where), where),
                printed_sense=str(o.get("printed_sense", "minimize")),
            )
        )
    constraints = []
    for i, c in enumerate(data.get("constraints", [])):
        where = f"{pid}.constraints[{i}]"
        if ("poly" in c) == ("objective_index" in c):
            raise ProblemValidationError(f"{where}: exactly one of 'poly' or 'objective_index' is required")
        if "poly" in c:
            expr = poly(c["poly"], where)
        else:
            expr = c["objective_index"]
            if not isinstance(expr, int) or isinstance(expr, bool):
                raise ProblemValidationError(f"{where}: objective_index must be an integer")
        constraints.append(
            ConstraintSpec(
                label=str(c.get("label", f"c{i + 1}")),
                expr=expr,
                lower=_unnum(c.get("lower"), "lower"),
                upper=_unnum(c.get("upper"), "upper"),
            )
        )
    return ProblemDescriptor(
        id=pid,
        title=str(data.get("title", pid)),
        citation=str(data.get("citation", "")),
        variables=variables,
        objectives=objectives,
        constraints=constraints,
    )


def import_problem(text: str) -> ProblemDescriptor:
    """Parse and validate problem JSON produced by :func:`export_problem`.

    Raises:
        ProblemValidationError: on malformed JSON, missing keys, bound
            inversion or polynomial/variable mismatches.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemValidationError(f"invalid JSON: {exc}") from None
    return problem_from_dict(data)
