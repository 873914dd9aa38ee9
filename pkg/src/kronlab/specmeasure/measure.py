"""Finite positive measures on the line: atoms plus piecewise-constant density."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from ..numkit import NumericReal, SymbolicReal, evaluate_to_float
from ..qindep import TierError

EPS_POS = 1e-9

SYMBOLIC = "symbolic"
NUMERIC = "numeric"


class AtomCollisionError(ValueError):
    """Two numeric atoms closer than ``EPS_POS`` without being equal."""


def _is_exact(x) -> bool:
    return isinstance(x, (SymbolicReal, Fraction)) or (isinstance(x, int) and not isinstance(x, bool))


def _coerce_weight(w):
    if isinstance(w, (Fraction, float)):
        out = w
    elif isinstance(w, int) and not isinstance(w, bool):
        out = Fraction(w)
    elif isinstance(w, NumericReal):
        out = float(w)
    elif isinstance(w, str):
        out = Fraction(w) if "/" in w or w.lstrip("-").isdigit() else float(w)
    else:
        out = float(w)
    if not out > 0:
        raise ValueError(f"weights must be positive, got {w!r}")
    return out


def _coerce_level(v):
    if isinstance(v, int) and not isinstance(v, bool):
        v = Fraction(v)
    elif isinstance(v, NumericReal):
        v = float(v)
    elif not isinstance(v, (Fraction, float)):
        v = float(v)
    if v < 0:
        raise ValueError("density levels must be >= 0")
    return v


def position_key(p):
    if isinstance(p, SymbolicReal):
        if p.is_rational:
            return (0, p.rational_part, "")
        return (1, 0, p.text())
    return (0, p, "")


def position_text(p) -> str:
    if isinstance(p, SymbolicReal):
        return p.text()
    if isinstance(p, Fraction):
        return f"{p.numerator}/{p.denominator}"
    return repr(float(p))


def endpoint_value(x):
    """Density endpoints must be orderable: rationals or floats."""
    if isinstance(x, SymbolicReal):
        if not x.is_rational:
            raise TierError("density endpoints must be rational or numeric")
        return x.rational_part
    if isinstance(x, int) and not isinstance(x, bool):
        return Fraction(x)
    if isinstance(x, (Fraction, float)):
        return x
    if isinstance(x, NumericReal):
        return float(x)
    return float(x)


def _normalize_density(pieces) -> tuple:
    """Sum overlapping pieces into disjoint ``[l, u)`` pieces of positive level."""
    events: dict = {}
    for l, u, level in pieces:
        if not l < u:
            if l == u:
                continue
            raise ValueError(f"density interval [{l}, {u}) is reversed")
        if level == 0:
            continue
        events[l] = events.get(l, 0) + level
        events[u] = events.get(u, 0) - level
    out = []
    current = 0
    points = sorted(events)
    for a, b in zip(points, points[1:]):
        current = current + events[a]
        if isinstance(current, float) and abs(current) < 1e-15:
            current = 0.0
        if current > 0:
            if out and out[-1][1] == a and out[-1][2] == current:
                out[-1] = (out[-1][0], b, current)
            else:
                out.append((a, b, current))
    return tuple(out)


@dataclass(frozen=True, eq=False)
class Measure:
    """Finite positive measure ``sum w_i delta_{x_i} + sum level_k * Leb|[l_k, u_k)``.

    ``tier`` is ``"symbolic"`` (exact positions as ``SymbolicReal``, rational
    density endpoints) or ``"numeric"`` (float positions).  Instances are
    normalized: atoms sorted and merged, density pieces disjoint.
    """

    atoms: tuple = ()
    density: tuple = ()
    tier: str = SYMBOLIC

    @classmethod
    def build(cls, atoms: Iterable | Mapping = (), density: Iterable = (), tier: str | None = None) -> "Measure":
        atom_items = list(atoms.items() if isinstance(atoms, Mapping) else atoms)
        pieces = [tuple(p) for p in density]
        positions = [p for p, _ in atom_items]
        endpoints = [e for l, u, _ in pieces for e in (l, u)]
        if tier is None:
            numeric = any(isinstance(x, (float, NumericReal)) for x in positions + endpoints)
            tier = NUMERIC if numeric else SYMBOLIC
        if tier not in (SYMBOLIC, NUMERIC):
            raise ValueError(f"unknown tier {tier!r}")

        merged: dict = {}
        for p, w in atom_items:
            pos = _coerce_position(p, tier)
            w = _coerce_weight(w)
            merged[pos] = merged[pos] + w if pos in merged else w
        atoms_t = tuple(sorted(merged.items(), key=lambda pw: position_key(pw[0])))
        if tier == NUMERIC:
            for (p1, _), (p2, _) in zip(atoms_t, atoms_t[1:]):
                if p2 - p1 <= EPS_POS:
                    raise AtomCollisionError(f"atoms at {p1!r} and {p2!r} closer than {EPS_POS}")

        dens = []
        for l, u, level in pieces:
            l, u = endpoint_value(l), endpoint_value(u)
            if tier == NUMERIC:
                l, u = float(l), float(u)
            dens.append((l, u, _coerce_level(level)))
        return cls(atoms_t, _normalize_density(dens), tier)

    # -- inspection ---------------------------------------------------------

    @property
    def is_atomic(self) -> bool:
        return not self.density

    @property
    def positions(self) -> list:
        return [p for p, _ in self.atoms]

    @property
    def atomic_mass(self):
        return sum((w for _, w in self.atoms), Fraction(0))

    @property
    def density_mass(self):
        return sum(((u - l) * v for l, u, v in self.density), Fraction(0))

    @property
    def total_mass(self):
        return self.atomic_mass + self.density_mass

    def is_zero(self) -> bool:
        return not self.atoms and not self.density

    def weight_at(self, pos):
        for p, w in self.atoms:
            if p == pos:
                return w
        return 0

    def float_atoms(self, assignment: Mapping | None = None) -> list[tuple[float, float]]:
        return [(evaluate_to_float(p, assignment), float(w)) for p, w in self.atoms]

    def float_density(self) -> list[tuple[float, float, float]]:
        return [(float(l), float(u), float(v)) for l, u, v in self.density]

    def symbols(self) -> set[str]:
        out: set[str] = set()
        for p, _ in self.atoms:
            if isinstance(p, SymbolicReal):
                out |= p.symbols()
        return out

    def evaluate(self, assignment: Mapping | None = None) -> "Measure":
        """Numeric-tier copy with symbols replaced by ``assignment`` values."""
        return Measure.build(self.float_atoms(assignment),
                             self.float_density(), NUMERIC)

    def scaled_weights(self, c) -> "Measure":
        """Same support, every weight and level multiplied by ``c > 0``."""
        return Measure(tuple((p, w * c) for p, w in self.atoms),
                       tuple((l, u, v * c) for l, u, v in self.density), self.tier)

    # -- equality -------------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, Measure):
            return NotImplemented
        return (self.tier == other.tier and self.atoms == other.atoms
                and self.density == other.density)

    def __hash__(self) -> int:
        return hash((self.tier, self.atoms, self.density))

    def approx_equal(self, other: "Measure", tol: float = 1e-12) -> bool:
        if len(self.atoms) != len(other.atoms) or len(self.density) != len(other.density):
            return False
        for (p, w), (q, v) in zip(self.atoms, other.atoms):
            if isinstance(p, SymbolicReal) or isinstance(q, SymbolicReal):
                if p != q or abs(float(w) - float(v)) > tol:
                    return False
            elif abs(p - q) > tol or abs(float(w) - float(v)) > tol:
                return False
        for a, b in zip(self.density, other.density):
            if any(abs(float(x) - float(y)) > tol for x, y in zip(a, b)):
                return False
        return True

    def __repr__(self) -> str:
        atoms = ", ".join(f"({position_text(p)}, {w})" for p, w in self.atoms)
        dens = ", ".join(f"[{l}, {u}):{v}" for l, u, v in self.density)
        return f"Measure<{self.tier}>(atoms=[{atoms}], density=[{dens}])"


def _coerce_position(p, tier: str):
    if tier == SYMBOLIC:
        if isinstance(p, (float, NumericReal)):
            raise TierError("numeric position in a symbolic measure")
        if isinstance(p, str):
            return SymbolicReal.parse(p)
        return SymbolicReal.coerce(p)
    if isinstance(p, SymbolicReal):
        if not p.is_rational:
            raise TierError(f"symbolic position {p.text()} in a numeric measure; evaluate it first")
        return float(p.rational_part)
    if isinstance(p, str):
        return float(Fraction(p)) if "/" in p else float(p)
    return float(p) + 0.0


def atomic(pairs: Iterable | Mapping, tier: str | None = None) -> Measure:
    """Shorthand for a purely atomic measure from ``(position, weight)`` pairs."""
    return Measure.build(pairs, (), tier)


def uniform(l, u, level=1) -> Measure:
    return Measure.build((), [(l, u, level)])
