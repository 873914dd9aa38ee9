"""Exact reals over a declared, algebraically independent basis of symbols.

A :class:`SymbolicReal` is ``r + sum(c_m * m)`` with rational ``r`` and ``c_m``
and Laurent monomials ``m`` in basis symbols.  The basis symbols are treated as
algebraically independent transcendentals, so distinct monomials are linearly
independent over the rationals; that is what makes independence checks exact.
"""

from __future__ import annotations

import re
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping

_SYMBOL_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def as_fraction(value) -> Fraction:
    """Coerce an exact number to ``Fraction``; floats are rejected."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def format_fraction(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


class Monomial:
    """Laurent monomial ``prod(symbol**exponent)``; the empty product is 1."""

    __slots__ = ("exponents", "_hash")

    def __init__(self, exponents: Mapping[str, int] | Iterable[tuple[str, int]] = ()):
        items = exponents.items() if isinstance(exponents, Mapping) else exponents
        merged: dict[str, int] = {}
        for sym, exp in items:
            if not isinstance(sym, str) or not _SYMBOL_RE.match(sym):
                raise ValueError(f"invalid basis symbol {sym!r}")
            merged[sym] = merged.get(sym, 0) + int(exp)
        clean = tuple(sorted((s, e) for s, e in merged.items() if e != 0))
        object.__setattr__(self, "exponents", clean)
        object.__setattr__(self, "_hash", hash(clean))

    def __setattr__(self, name, value):
        raise AttributeError("Monomial is immutable")

    @classmethod
    def symbol(cls, name: str, exp: int = 1) -> "Monomial":
        return cls(((name, exp),))

    @property
    def is_one(self) -> bool:
        return not self.exponents

    def symbols(self) -> set[str]:
        return {s for s, _ in self.exponents}

    def degree(self) -> int:
        return sum(abs(e) for _, e in self.exponents)

    def __mul__(self, other: "Monomial") -> "Monomial":
        return Monomial(self.exponents + other.exponents)

    def __truediv__(self, other: "Monomial") -> "Monomial":
        return self * other.inverse()

    def __pow__(self, n: int) -> "Monomial":
        return Monomial(tuple((s, e * n) for s, e in self.exponents))

    def inverse(self) -> "Monomial":
        return self ** -1

    def __eq__(self, other) -> bool:
        return isinstance(other, Monomial) and self.exponents == other.exponents

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: "Monomial") -> bool:
        return self.exponents < other.exponents

    def text(self) -> str:
        return "*".join(f"{s}^{e}" for s, e in self.exponents)

    def __repr__(self) -> str:
        return f"Monomial({self.text() or '1'})"


ONE = Monomial()


class SymbolicReal:
    """Immutable exact real ``rational_part + sum(coeff * monomial)``.

    Zero coefficients are never stored and the constant monomial is folded into
    ``rational_part``, so structural equality is mathematical equality.
    """

    __slots__ = ("rational_part", "terms", "_hash")

    def __init__(self, rational_part=0, terms: Mapping[Monomial, object] | Iterable = ()):
        r = as_fraction(rational_part)
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Monomial, Fraction] = {}
        for mono, coeff in items:
            c = as_fraction(coeff)
            if mono.is_one:
                r += c
                continue
            acc[mono] = acc.get(mono, Fraction(0)) + c
        clean = {m: c for m, c in sorted(acc.items(), key=lambda kv: kv[0].exponents) if c != 0}
        object.__setattr__(self, "rational_part", r)
        object.__setattr__(self, "terms", MappingProxyType(clean))
        object.__setattr__(self, "_hash", hash((r, tuple(clean.items()))))

    def __setattr__(self, name, value):
        raise AttributeError("SymbolicReal is immutable")

    def __reduce__(self):
        return (SymbolicReal, (self.rational_part, tuple(self.terms.items())))

    # construction -----------------------------------------------------------

    @classmethod
    def symbol(cls, name: str, exp: int = 1, coeff=1) -> "SymbolicReal":
        return cls(0, {Monomial.symbol(name, exp): coeff})

    @classmethod
    def coerce(cls, value) -> "SymbolicReal":
        if isinstance(value, SymbolicReal):
            return value
        return cls(as_fraction(value))

    # inspection -------------------------------------------------------------

    @property
    def is_rational(self) -> bool:
        return not self.terms

    def as_fraction(self) -> Fraction:
        if self.terms:
            raise ValueError(f"{self.text()} is not rational")
        return self.rational_part

    def symbols(self) -> set[str]:
        out: set[str] = set()
        for m in self.terms:
            out |= m.symbols()
        return out

    def coordinates(self) -> dict[Monomial, Fraction]:
        """Coordinates in the monomial basis, with ``ONE`` for the rational part."""
        coords = dict(self.terms)
        if self.rational_part:
            coords[ONE] = self.rational_part
        return coords

    def single_term(self) -> tuple[Fraction, Monomial] | None:
        """``(c, m)`` when the value is exactly ``c*m`` with ``c != 0``."""
        if not self.terms and self.rational_part:
            return self.rational_part, ONE
        if len(self.terms) == 1 and not self.rational_part:
            (m, c), = self.terms.items()
            return c, m
        return None

    @property
    def is_invertible(self) -> bool:
        return self.single_term() is not None

    def is_zero(self) -> bool:
        return not self.terms and self.rational_part == 0

    # arithmetic -------------------------------------------------------------

    def _coerce_other(self, other):
        if isinstance(other, SymbolicReal):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return SymbolicReal(other)
        return None

    def __add__(self, other):
        o = self._coerce_other(other)
        if o is None:
            return NotImplemented
        return SymbolicReal(self.rational_part + o.rational_part,
                            list(self.terms.items()) + list(o.terms.items()))

    __radd__ = __add__

    def __neg__(self):
        return SymbolicReal(-self.rational_part, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        o = self._coerce_other(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce_other(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce_other(other)
        if o is None:
            return NotImplemented
        a = self.coordinates()
        b = o.coordinates()
        prod = [(ma * mb, ca * cb) for ma, ca in a.items() for mb, cb in b.items()]
        return SymbolicReal(0, prod)

    __rmul__ = __mul__

    def inverse(self) -> "SymbolicReal":
        st = self.single_term()
        if st is None:
            raise ZeroDivisionError(f"{self.text()} is not invertible in the Laurent ring")
        c, m = st
        return SymbolicReal(0, {m.inverse(): 1 / c})

    def __truediv__(self, other):
        o = self._coerce_other(other)
        if o is None:
            return NotImplemented
        if o.is_invertible:
            return self * o.inverse()
        q = self.divide_exact(o)
        if q is None:
            raise ZeroDivisionError(f"cannot divide {self.text()} by {o.text()} exactly")
        return q

    def __rtruediv__(self, other):
        o = self._coerce_other(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out = SymbolicReal(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def divide_exact(self, other: "SymbolicReal") -> "SymbolicReal | None":
        """Return ``q = c*m`` with ``self == q*other`` if such a term exists."""
        if other.is_zero():
            raise ZeroDivisionError("division by zero")
        if self.is_zero():
            return SymbolicReal(0)
        a = self.coordinates()
        b = other.coordinates()
        # leading terms in a fixed monomial order multiply under monomial scaling
        ma = max(a, key=lambda m: m.exponents)
        mb = max(b, key=lambda m: m.exponents)
        q = SymbolicReal(0, {ma / mb: a[ma] / b[mb]})
        return q if q * other == self else None

    # comparison -------------------------------------------------------------

    def __eq__(self, other) -> bool:
        o = self._coerce_other(other)
        if o is None:
            return False
        return self.rational_part == o.rational_part and dict(self.terms) == dict(o.terms)

    def __hash__(self) -> int:
        return self._hash

    # text form --------------------------------------------------------------

    def text(self) -> str:
        parts = [format_fraction(self.rational_part)]
        for m, c in self.terms.items():
            parts.append(f"{format_fraction(c)}*{m.text()}")
        return " + ".join(parts)

    __str__ = text

    def __repr__(self) -> str:
        return f"SymbolicReal({self.text()!r})"

    @classmethod
    def parse(cls, text: str) -> "SymbolicReal":
        """Inverse of :meth:`text`; whitespace around ``+`` is optional."""
        chunks = [c.strip() for c in re.split(r"\s*\+\s*(?=[-0-9])", text.strip())]
        if not chunks or not chunks[0]:
            raise ValueError(f"empty symbolic real: {text!r}")
        rational = Fraction(0)
        terms: list[tuple[Monomial, Fraction]] = []
        for i, chunk in enumerate(chunks):
            factors = chunk.split("*")
            try:
                coeff = Fraction(factors[0])
            except (ValueError, ZeroDivisionError) as exc:
                raise ValueError(f"bad coefficient in {chunk!r}") from exc
            if len(factors) == 1:
                if i != 0:
                    raise ValueError(f"constant term must come first: {text!r}")
                rational += coeff
                continue
            exps = []
            for f in factors[1:]:
                sym, _, exp = f.partition("^")
                if not _SYMBOL_RE.match(sym):
                    raise ValueError(f"bad symbol {sym!r} in {text!r}")
                exps.append((sym, int(exp) if exp else 1))
            terms.append((Monomial(exps), coeff))
        return cls(rational, terms)


def fresh_symbols(count: int, taken: Iterable[str] = (), prefix: str = "tau") -> list[str]:
    """``count`` symbol names of the form ``prefix<k>`` not present in ``taken``."""
    used = set(taken)
    out = []
    k = 1
    while len(out) < count:
        name = f"{prefix}{k}"
        if name not in used:
            out.append(name)
            used.add(name)
        k += 1
    return out
