from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from ..numkit import SymbolicReal, to_fraction
from ..qindep import GroupSlice, value_text

FOUND = "found"
NOT_FOUND = "not-found(budget)"


def exact_point(x) -> Fraction:
    """Exact binary/rational value of a numeric point (symbolic points must be rational)."""
    if isinstance(x, SymbolicReal) and not x.is_rational:
        raise TypeError(f"symbolic point {x.text()} needs an assignment before approximation")
    return to_fraction(x)


@dataclass(frozen=True)
class UnimodularTarget:
    """Target values ``f(x_j) = exp(2 pi i phase_j)`` on finitely many points."""

    points: tuple
    phases: tuple

    def __post_init__(self):
        if len(self.points) != len(self.phases):
            raise ValueError("points and phases must have equal length")
        if not self.points:
            raise ValueError("at least one point is required")
        exact = [exact_point(x) for x in self.points]
        if len(set(exact)) != len(exact):
            raise ValueError("points must be pairwise distinct")
        for p in self.phases:
            if not 0 <= p < 1:
                raise ValueError(f"phase {p} outside [0, 1)")

    @classmethod
    def of(cls, points: Sequence, phases: Sequence | None = None) -> "UnimodularTarget":
        phases = [0] * len(points) if phases is None else phases
        return cls(tuple(points), tuple(to_fraction(p) for p in phases))

    def exact(self) -> tuple[list[Fraction], list[Fraction]]:
        return [exact_point(x) for x in self.points], [to_fraction(p) for p in self.phases]


@dataclass(frozen=True)
class ApproxWitness:
    t: float
    residuals: tuple[float, ...]
    max_residual: float
    method: str
    search_bound: float
    status: str = FOUND
    attempts: int = 0

    def __post_init__(self):
        if self.residuals and abs(max(self.residuals) - self.max_residual) > 0:
            raise ValueError("max_residual must equal max(residuals)")

    @property
    def found(self) -> bool:
        return self.status == FOUND

    def to_dict(self) -> dict:
        return {"t": self.t, "residuals": list(self.residuals), "max_residual": self.max_residual,
                "method": self.method, "search_bound": self.search_bound,
                "status": self.status, "attempts": self.attempts}


@dataclass(frozen=True)
class KroneckerSetSpec:
    points: tuple
    certificate: str  # "symbolic-fresh-transcendental" or "numeric-no-relation(...)"
    slice: GroupSlice
    assignment: dict = field(default_factory=dict)
    rounds: int = 1

    def realized(self) -> list:
        """``L = union over h in the slice of h * points``."""
        return [h * x for h in self.slice.values for x in self.points]

    def to_dict(self) -> dict:
        return {
            "points": [value_text(x) for x in self.points],
            "certificate": self.certificate,
            "slice": {"generators": [value_text(g) for g in self.slice.generators],
                      "radius": self.slice.radius},
            "assignment": {k: value_text(v) for k, v in sorted(self.assignment.items())},
            "rounds": self.rounds,
        }


CONSTANT = "constant"
CHARACTER = "character"
AFFINE = "affine"


@dataclass(frozen=True)
class WeakTarget:
    """``g = c1 + c2 * xi_u`` with ``|c1| + |c2| <= 1``; constants and characters are special cases."""

    c1: complex = 0j
    c2: complex = 0j
    u: float = 0.0

    def __post_init__(self):
        if abs(self.c1) + abs(self.c2) > 1 + 1e-12:
            raise ValueError("weak targets must be bounded by 1 in modulus")

    @classmethod
    def constant(cls, c) -> "WeakTarget":
        return cls(complex(c), 0j, 0.0)

    @classmethod
    def character(cls, u) -> "WeakTarget":
        return cls(0j, 1 + 0j, float(u))

    @classmethod
    def affine(cls, c1, c2, u) -> "WeakTarget":
        return cls(complex(c1), complex(c2), float(u))

    @property
    def form(self) -> str:
        if self.c2 == 0:
            return CONSTANT
        if self.c1 == 0 and self.c2 == 1:
            return CHARACTER
        return AFFINE

    def __call__(self, x: float) -> complex:
        return self.c1 + self.c2 * cmath.exp(2j * math.pi * self.u * x)
