"""Exact integer lattice reduction (LLL) and Babai nearest-plane rounding."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

DEFAULT_DELTA = Fraction(99, 100)


class DependentBasisError(ValueError):
    pass


def _dot(u, v) -> int:
    return sum(a * b for a, b in zip(u, v))


def _round_div(a: int, b: int) -> int:
    """Nearest integer to a/b for b > 0 (ties toward +inf)."""
    return (2 * a + b) // (2 * b)


def lll_reduce(basis: Sequence[Sequence[int]], delta: Fraction = DEFAULT_DELTA) -> list[list[int]]:
    """Return a delta-LLL-reduced basis of the lattice spanned by the rows of ``basis``.

    All-integer variant (Cohen, Alg. 2.6.7): Gram-Schmidt data are kept as the
    integers ``d_i`` and ``lambda_ij = d_j * mu_ij``, so no rounding ever occurs.
    """
    delta = Fraction(delta)
    if not Fraction(1, 4) < delta < 1:
        raise ValueError("delta must satisfy 1/4 < delta < 1")
    n = len(basis)
    if n == 0:
        return []
    width = len(basis[0])
    if any(len(row) != width for row in basis):
        raise ValueError("basis vectors must have equal length")
    p, q = delta.numerator, delta.denominator

    # 1-indexed to follow the textbook recurrences
    b: list[list[int]] = [[]] + [[int(x) for x in row] for row in basis]
    d = [0] * (n + 1)
    d[0] = 1
    lam = [[0] * (n + 1) for _ in range(n + 1)]

    def redi(k: int, l: int) -> None:
        if 2 * abs(lam[k][l]) > d[l]:
            r = _round_div(lam[k][l], d[l])
            b[k] = [x - r * y for x, y in zip(b[k], b[l])]
            lam[k][l] -= r * d[l]
            for i in range(1, l):
                lam[k][i] -= r * lam[l][i]

    def swapi(k: int, kmax: int) -> None:
        b[k], b[k - 1] = b[k - 1], b[k]
        for j in range(1, k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        lm = lam[k][k - 1]
        new_d = (d[k - 2] * d[k] + lm * lm) // d[k - 1]
        for i in range(k + 1, kmax + 1):
            t = lam[i][k]
            lam[i][k] = (d[k] * lam[i][k - 1] - lm * t) // d[k - 1]
            lam[i][k - 1] = (new_d * t + lm * lam[i][k]) // d[k]
        d[k - 1] = new_d

    d[1] = _dot(b[1], b[1])
    if d[1] == 0:
        raise DependentBasisError("basis vectors are linearly dependent")
    k, kmax = 2, 1
    while k <= n:
        if k > kmax:
            kmax = k
            for j in range(1, k + 1):
                u = _dot(b[k], b[j])
                for i in range(1, j):
                    u = (d[i] * u - lam[k][i] * lam[j][i]) // d[i - 1]
                if j < k:
                    lam[k][j] = u
                else:
                    if u == 0:
                        raise DependentBasisError("basis vectors are linearly dependent")
                    d[k] = u
        redi(k, k - 1)
        if q * (d[k] * d[k - 2] + lam[k][k - 1] ** 2) < p * d[k - 1] ** 2:
            swapi(k, kmax)
            k = max(2, k - 1)
        else:
            for l in range(k - 2, 0, -1):
                redi(k, l)
            k += 1
    return b[1:]


def gram_schmidt(basis: Sequence[Sequence[int]]) -> tuple[list[list[Fraction]], list[list[Fraction]]]:
    """Exact Gram-Schmidt: returns ``(b_star, mu)``."""
    n = len(basis)
    bstar: list[list[Fraction]] = []
    norms: list[Fraction] = []
    mu = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        v = [Fraction(x) for x in basis[i]]
        for j in range(i):
            if norms[j] == 0:
                continue
            mu[i][j] = sum(Fraction(x) * y for x, y in zip(basis[i], bstar[j])) / norms[j]
            v = [a - mu[i][j] * c for a, c in zip(v, bstar[j])]
        bstar.append(v)
        norms.append(sum(a * a for a in v))
    return bstar, mu


def gram_determinant(basis: Sequence[Sequence[int]]) -> int:
    """``det(B B^T)`` computed exactly by fraction-free elimination."""
    n = len(basis)
    g = [[_dot(basis[i], basis[j]) for j in range(n)] for i in range(n)]
    det = Fraction(1)
    m = [[Fraction(x) for x in row] for row in g]
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            m[r] = [a - f * b for a, b in zip(m[r], m[c])]
    return int(det)


class NearestPlane:
    """Babai nearest-plane rounding against a fixed (ideally reduced) basis."""

    def __init__(self, basis: Sequence[Sequence[int]]):
        self.basis = [list(map(int, row)) for row in basis]
        self.bstar, _ = gram_schmidt(self.basis)
        self.norms = [sum(a * a for a in v) for v in self.bstar]

    def coefficients(self, target: Sequence[int | Fraction]) -> list[int]:
        """Integer coefficients ``c`` with ``sum(c_i b_i)`` near ``target``."""
        n = len(self.basis)
        resid = [Fraction(x) for x in target]
        coeffs = [0] * n
        for i in range(n - 1, -1, -1):
            proj = sum(a * b for a, b in zip(resid, self.bstar[i])) / self.norms[i]
            c = round(proj)
            coeffs[i] = c
            if c:
                resid = [a - c * x for a, x in zip(resid, self.basis[i])]
        return coeffs

    def closest(self, target: Sequence[int | Fraction]) -> list[int]:
        c = self.coefficients(target)
        out = [0] * len(self.basis[0])
        for ci, row in zip(c, self.basis):
            if ci:
                out = [a + ci * x for a, x in zip(out, row)]
        return out
