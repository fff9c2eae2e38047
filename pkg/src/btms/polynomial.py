"""Sparse multivariate polynomials.

Every objective and constraint in the suite is a low-degree polynomial in the
decision variables. A :class:`Polynomial` keeps its terms in graded
lexicographic order and always sums them in that order, so repeated
evaluation of the same point is bit-reproducible, and scalar and batched
evaluation agree exactly.

Text form::

    term       := [coeff] ('*' var ('^' nat)?)*
    polynomial := ['+'|'-'] term (('+'|'-') term)*

A term may omit the coefficient when it starts with a variable (``x1*x2``).
Whitespace is insignificant.
"""

from __future__ import annotations

import math
import re
from collections.abc import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "DomainError",
    "InputShapeError",
    "Monomial",
    "PolynomialParseError",
    "Polynomial",
    "eval_poly",
    "grad_poly",
    "parse_poly",
    "serialize_poly",
]

Exponents = tuple[int, ...]


class InputShapeError(ValueError):
    """Point dimension does not match the polynomial."""


class DomainError(ValueError):
    """Point contains NaN or infinite components."""


class PolynomialParseError(ValueError):
    """Malformed polynomial text."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


def _grlex_key(exponents: Exponents) -> tuple:
    # total degree first, then larger powers of earlier variables first
    return (sum(exponents), tuple(-e for e in exponents))


class Monomial:
    """A single ``coefficient * prod(x_j ** e_j)`` term."""

    __slots__ = ("coefficient", "exponents")

    def __init__(self, coefficient: float, exponents: Sequence[int]):
        coefficient = float(coefficient)
        if not math.isfinite(coefficient):
            raise ValueError(f"coefficient must be finite, got {coefficient!r}")
        if coefficient == 0.0:
            raise ValueError("zero-coefficient monomials are not stored")
        exps = tuple(int(e) for e in exponents)
        if any(e < 0 for e in exps):
            raise ValueError(f"exponents must be natural numbers, got {exps}")
        self.coefficient = coefficient
        self.exponents = exps

    @property
    def degree(self) -> int:
        return sum(self.exponents)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Monomial):
            return NotImplemented
        return self.coefficient == other.coefficient and self.exponents == other.exponents

    def __hash__(self) -> int:
        return hash((self.coefficient, self.exponents))

    def __repr__(self) -> str:
        return f"Monomial({self.coefficient!r}, {self.exponents})"


class Polynomial:
    """Immutable sparse polynomial in ``n_vars`` real variables.

    Args:
        n_vars: Number of variables.
        terms: Either a mapping ``{exponents: coefficient}`` or an iterable of
            :class:`Monomial` / ``(coefficient, exponents)`` pairs. Terms with
            equal exponents are merged by summing coefficients (in input
            order) and zero results are dropped.
    """

    __slots__ = ("n_vars", "_terms", "_coeffs", "_exps", "_grad")

    def __init__(
        self,
        n_vars: int,
        terms: Mapping[Sequence[int], float] | Iterable[Monomial | tuple[float, Sequence[int]]] = (),
    ):
        if n_vars < 0:
            raise ValueError("n_vars must be non-negative")
        self.n_vars = int(n_vars)
        items = terms.items() if isinstance(terms, Mapping) else (
            (t.exponents, t.coefficient) if isinstance(t, Monomial) else (t[1], t[0]) for t in terms
        )
        merged: dict[Exponents, float] = {}
        for exps, coeff in items:
            exps = tuple(int(e) for e in exps)
            if len(exps) != self.n_vars:
                raise InputShapeError(
                    f"exponent vector {exps} has length {len(exps)}, expected {self.n_vars}"
                )
            merged[exps] = merged[exps] + float(coeff) if exps in merged else float(coeff)
        ordered = sorted((e for e, c in merged.items() if c != 0.0), key=_grlex_key)
        self._terms = tuple(Monomial(merged[e], e) for e in ordered)
        self._coeffs = tuple(t.coefficient for t in self._terms)
        self._exps = tuple(t.exponents for t in self._terms)
        self._grad: tuple[Polynomial, ...] | None = None

    # -- construction helpers -------------------------------------------------

    @classmethod
    def constant(cls, value: float, n_vars: int) -> Polynomial:
        return cls(n_vars, {(0,) * n_vars: value})

    @classmethod
    def variable(cls, index: int, n_vars: int) -> Polynomial:
        exps = [0] * n_vars
        exps[index] = 1
        return cls(n_vars, {tuple(exps): 1.0})

    # -- inspection ------------------------------------------------------------

    @property
    def terms(self) -> tuple[Monomial, ...]:
        return self._terms

    @property
    def degree(self) -> int:
        return max((t.degree for t in self._terms), default=0)

    def as_dict(self) -> dict[Exponents, float]:
        return dict(zip(self._exps, self._coeffs))

    def coefficient(self, exponents: Sequence[int]) -> float:
        return self.as_dict().get(tuple(exponents), 0.0)

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.n_vars == other.n_vars and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.n_vars, self._terms))

    def __repr__(self) -> str:
        names = [f"x{i + 1}" for i in range(self.n_vars)]
        return f"Polynomial({self.n_vars}, {serialize_poly(self, names)!r})"

    # -- arithmetic ------------------------------------------------------------

    def _coerce(self, other: object) -> Polynomial | None:
        if isinstance(other, Polynomial):
            if other.n_vars != self.n_vars:
                raise InputShapeError(f"cannot combine {self.n_vars}- and {other.n_vars}-variable polynomials")
            return other
        if isinstance(other, (int, float)):
            return Polynomial.constant(float(other), self.n_vars)
        return None

    def __add__(self, other: object) -> Polynomial:
        q = self._coerce(other)
        if q is None:
            return NotImplemented
        return Polynomial(self.n_vars, [*self._terms, *q._terms])

    __radd__ = __add__

    def __neg__(self) -> Polynomial:
        return Polynomial(self.n_vars, [(-c, e) for c, e in zip(self._coeffs, self._exps)])

    def __sub__(self, other: object) -> Polynomial:
        q = self._coerce(other)
        if q is None:
            return NotImplemented
        return self + (-q)

    def __rsub__(self, other: object) -> Polynomial:
        q = self._coerce(other)
        if q is None:
            return NotImplemented
        return q + (-self)

    def __mul__(self, other: object) -> Polynomial:
        if isinstance(other, (int, float)):
            return Polynomial(self.n_vars, [(float(other) * c, e) for c, e in zip(self._coeffs, self._exps)])
        q = self._coerce(other)
        if q is None:
            return NotImplemented
        out = [
            (a * b, tuple(i + j for i, j in zip(ea, eb)))
            for a, ea in zip(self._coeffs, self._exps)
            for b, eb in zip(q._coeffs, q._exps)
        ]
        return Polynomial(self.n_vars, out)

    __rmul__ = __mul__

    # -- evaluation ------------------------------------------------------------

    def _check_points(self, x) -> tuple[np.ndarray, bool]:
        arr = np.asarray(x, dtype=float)
        single = arr.ndim == 1
        if single:
            arr = arr[None, :]
        if arr.ndim != 2 or arr.shape[1] != self.n_vars:
            raise InputShapeError(f"expected points of dimension {self.n_vars}, got shape {np.shape(x)}")
        if not np.all(np.isfinite(arr)):
            raise DomainError("point contains non-finite components")
        return arr, single

    def evaluate_many(self, X) -> np.ndarray:
        """Evaluate at every row of ``X`` (shape ``(k, n_vars)``)."""
        arr, _ = self._check_points(X)
        return self._eval_rows(arr)

    def _eval_rows(self, arr: np.ndarray) -> np.ndarray:
        total = np.zeros(arr.shape[0])
        for coeff, exps in zip(self._coeffs, self._exps):
            term = np.full(arr.shape[0], coeff)
            for j, e in enumerate(exps):
                for _ in range(e):
                    term = term * arr[:, j]
            total = total + term
        return total

    def __call__(self, x) -> float | np.ndarray:
        arr, single = self._check_points(x)
        out = self._eval_rows(arr)
        return float(out[0]) if single else out

    def derivative(self, index: int) -> Polynomial:
        out = []
        for c, e in zip(self._coeffs, self._exps):
            if e[index]:
                d = list(e)
                d[index] -= 1
                out.append((c * e[index], tuple(d)))
        return Polynomial(self.n_vars, out)

    def gradient(self, x) -> np.ndarray:
        """Analytic gradient; for a 2-D ``x`` returns shape ``(k, n_vars)``."""
        arr, single = self._check_points(x)
        if self._grad is None:
            self._grad = tuple(self.derivative(j) for j in range(self.n_vars))
        g = np.column_stack([d._eval_rows(arr) for d in self._grad]) if self.n_vars else np.zeros((len(arr), 0))
        return g[0] if single else g


def eval_poly(p: Polynomial, x: Sequence[float]) -> float:
    """Value of ``p`` at a single point ``x``."""
    if np.ndim(x) != 1:
        raise InputShapeError(f"expected a 1-D point, got shape {np.shape(x)}")
    return p(x)


def grad_poly(p: Polynomial, x: Sequence[float]) -> np.ndarray:
    """Analytic gradient of ``p`` at a single point ``x``."""
    if np.ndim(x) != 1:
        raise InputShapeError(f"expected a 1-D point, got shape {np.shape(x)}")
    return p.gradient(x)


# -- text form -----------------------------------------------------------------

_NUMBER = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NAT = re.compile(r"\d+")


class _Parser:
    def __init__(self, text: str, var_names: Sequence[str]):
        self.text = text
        self.pos = 0
        self.index = {name: i for i, name in enumerate(var_names)}
        self.n = len(var_names)

    def skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def match(self, pattern: re.Pattern) -> str | None:
        self.skip()
        m = pattern.match(self.text, self.pos)
        if m is None:
            return None
        self.pos = m.end()
        return m.group()

    def factor(self, exps: list[int]) -> None:
        start = self.pos
        name = self.match(_NAME)
        if name is None:
            raise PolynomialParseError("expected variable name", self.pos)
        if name not in self.index:
            raise PolynomialParseError(f"unknown variable {name!r}", start)
        power = 1
        if self.peek() == "^":
            self.pos += 1
            where = self.pos
            digits = self.match(_NAT)
            if digits is None:
                raise PolynomialParseError("malformed exponent", where)
            power = int(digits)
        exps[self.index[name]] += power

    def term(self, sign: float) -> tuple[float, Exponents]:
        exps = [0] * self.n
        number = self.match(_NUMBER)
        coeff = float(number) if number is not None else 1.0
        if number is None:
            self.factor(exps)
        while self.peek() == "*":
            self.pos += 1
            self.factor(exps)
        return sign * coeff, tuple(exps)

    def parse(self) -> Polynomial:
        if not self.text.strip():
            raise PolynomialParseError("empty polynomial", 0)
        terms = []
        sign = 1.0
        if self.peek() in "+-" and self.peek():
            sign = -1.0 if self.text[self.pos] == "-" else 1.0
            self.pos += 1
        terms.append(self.term(sign))
        while self.peek():
            op = self.peek()
            if op not in "+-":
                raise PolynomialParseError(f"unexpected character {op!r}", self.pos)
            self.pos += 1
            terms.append(self.term(-1.0 if op == "-" else 1.0))
        return Polynomial(self.n, terms)


def parse_poly(text: str, var_names: Sequence[str]) -> Polynomial:
    """Parse polynomial text over the ordered variable names ``var_names``.

    Raises:
        PolynomialParseError: on empty input, unknown variables or malformed
            exponents; ``position`` points at the offending character.
    """
    names = list(var_names)
    if not names:
        raise ValueError("var_names must be nonempty")
    if len(set(names)) != len(names):
        raise ValueError(f"var_names must be distinct, got {names}")
    return _Parser(text, names).parse()


def serialize_poly(p: Polynomial, var_names: Sequence[str]) -> str:
    """Canonical text of ``p``; coefficients use shortest round-trip repr."""
    if len(var_names) != p.n_vars:
        raise InputShapeError(f"need {p.n_vars} variable names, got {len(var_names)}")
    if not p.terms:
        return "0"
    parts = []
    for k, t in enumerate(p.terms):
        mag = abs(t.coefficient)
        factors = [
            name if e == 1 else f"{name}^{e}" for name, e in zip(var_names, t.exponents) if e
        ]
        body = "*".join(factors)
        if not body:
            text = repr(mag)
        elif mag == 1.0:
            text = body
        else:
            text = f"{mag!r}*{body}"
        if k == 0:
            parts.append(f"-{text}" if t.coefficient < 0 else text)
        else:
            parts.append(f" - {text}" if t.coefficient < 0 else f" + {text}")
    return "".join(parts)
