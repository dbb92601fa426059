"""Payoff matrices and their parametrizations.

All scoring in this package uses the integer quadruple (T, R, P, S) directly;
the rational parametrizations exist to classify matrices and to generate the
standard suite, never to compute scores.  S is 0 throughout: every strategy
plays the same number of games, so a common offset cancels.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable


@dataclass(frozen=True)
class PayoffMatrix:
    """Single-game payoffs: T(emptation) > R(eward) > P(unishment) > S(ucker)."""

    T: int
    R: int
    P: int
    S: int = 0

    def __post_init__(self) -> None:
        for name in ("T", "R", "P", "S"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {v!r}")
        if not (self.T > self.R > self.P > self.S):
            raise ValueError(f"need T > R > P > S, got {self}")

    @property
    def key(self) -> str:
        """Report key, e.g. "6-5-3"."""
        return f"{self.T}-{self.R}-{self.P}"

    def scaled(self, factor: int) -> "PayoffMatrix":
        return PayoffMatrix(self.T * factor, self.R * factor,
                            self.P * factor, self.S * factor)

    def to_json(self) -> dict:
        return {"T": self.T, "R": self.R, "P": self.P, "S": self.S}

    @classmethod
    def from_json(cls, obj: dict) -> "PayoffMatrix":
        return cls(int(obj["T"]), int(obj["R"]), int(obj["P"]), int(obj.get("S", 0)))


@dataclass(frozen=True)
class PriceParams:
    """Trade-model parameters: a transfer worth beta to the receiver costs
    the giver gamma, on top of a base payoff alpha."""

    alpha: Fraction
    beta: Fraction
    gamma: Fraction

    def to_matrix(self) -> PayoffMatrix:
        t = self.alpha + self.beta
        r = self.alpha + self.beta - self.gamma
        p = self.alpha
        s = self.alpha - self.gamma
        for name, v in (("T", t), ("R", r), ("P", p), ("S", s)):
            if v.denominator != 1:
                raise ValueError(f"{name}={v} is not an integer")
        return PayoffMatrix(int(t), int(r), int(p), int(s))


@dataclass(frozen=True)
class ABParams:
    """Reparametrization T = (1+a+b)P, R = (1+a)P with a, b > 0."""

    a: Fraction
    b: Fraction
    P: int

    def __post_init__(self) -> None:
        if self.a <= 0 or self.b <= 0:
            raise ValueError(f"need a > 0 and b > 0, got a={self.a}, b={self.b}")
        if self.P <= 0:
            raise ValueError(f"need P > 0, got {self.P}")


def from_ab(params: ABParams) -> PayoffMatrix:
    """Build the integer matrix (T, R, P, 0) from (a, b, P)."""
    t = (1 + params.a + params.b) * params.P
    r = (1 + params.a) * params.P
    if t.denominator != 1:
        raise ValueError(f"T = (1+a+b)P = {t} is not an integer")
    if r.denominator != 1:
        raise ValueError(f"R = (1+a)P = {r} is not an integer")
    return PayoffMatrix(int(t), int(r), params.P)


def ab_of(matrix: PayoffMatrix) -> ABParams:
    """Recover (a, b, P) from an S=0 matrix."""
    if matrix.S != 0:
        raise ValueError("a/b parametrization assumes S = 0")
    p = matrix.P
    return ABParams(
        a=Fraction(matrix.R, p) - 1,
        b=Fraction(matrix.T - matrix.R, p),
        P=p,
    )


def _cmp(x: Fraction, y) -> int:
    return (x > y) - (x < y)


@dataclass(frozen=True)
class RelationFlags:
    """Classification of a matrix by the standard relations.

    three-way comparisons are -1 / 0 / +1 for < / = / >.
    """

    t_eq_r_plus_p: bool   # T + S = P + R, i.e. b = 1
    two_r_gt_t: bool      # 2R > T + S, i.e. a + 1 > b
    a_vs_1: int
    a_vs_b: int
    b_vs_1: int


def classify(matrix: PayoffMatrix) -> RelationFlags:
    ab = ab_of(matrix)
    return RelationFlags(
        t_eq_r_plus_p=matrix.T + matrix.S == matrix.R + matrix.P,
        two_r_gt_t=2 * matrix.R > matrix.T + matrix.S,
        a_vs_1=_cmp(ab.a, 1),
        a_vs_b=_cmp(ab.a, ab.b),
        b_vs_1=_cmp(ab.b, 1),
    )


# The 17 investigated matrices: for every consistent combination of the
# relation conditions, the smallest integers realizing it.
_STANDARD_TRIPLES = (
    (3, 2, 1), (4, 3, 1), (5, 3, 2), (5, 4, 2), (6, 5, 2), (4, 3, 2),
    (6, 4, 3), (6, 5, 3), (5, 3, 1), (7, 4, 2), (9, 5, 3), (4, 2, 1),
    (5, 2, 1), (6, 3, 1), (7, 3, 1), (6, 3, 2), (7, 3, 2),
)


def standard_suite() -> tuple[PayoffMatrix, ...]:
    """The fixed 17-matrix suite, in canonical order."""
    return tuple(PayoffMatrix(t, r, p) for t, r, p in _STANDARD_TRIPLES)


def load_suite(path: str | Path) -> tuple[PayoffMatrix, ...]:
    """Read a suite from a JSON file: a list of {"T":..,"R":..,"P":..,"S":0}."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, list) or not data:
        raise ValueError(f"suite file {path} must hold a non-empty JSON list")
    matrices = tuple(PayoffMatrix.from_json(obj) for obj in data)
    keys = [m.key for m in matrices]
    if len(set(keys)) != len(keys):
        raise ValueError(f"suite file {path} contains duplicate matrices")
    return matrices


def save_suite(matrices: Iterable[PayoffMatrix], path: str | Path) -> None:
    Path(path).write_text(
        json.dumps([m.to_json() for m in matrices], indent=2) + "\n",
        encoding="utf-8",
    )
