"""Small exact linear algebra over Q used to find classical eigensymbols."""

from __future__ import annotations

from fractions import Fraction
from math import gcd


def rref(rows: list[list], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form of a list of rows over Q."""
    work = [[Fraction(x) for x in r] for r in rows if any(r)]
    pivots: list[int] = []
    out: list[list[Fraction]] = []
    for col in range(ncols):
        piv = None
        for idx, r in enumerate(work):
            if r[col] != 0:
                piv = idx
                break
        if piv is None:
            continue
        prow = work.pop(piv)
        inv = 1 / prow[col]
        prow = [x * inv for x in prow]
        nz = [j for j in range(col, ncols) if prow[j] != 0]
        for r in work:
            f = r[col]
            if f:
                for j in nz:
                    r[j] -= f * prow[j]
        for r in out:
            f = r[col]
            if f:
                for j in nz:
                    r[j] -= f * prow[j]
        work = [r for r in work if any(r)]
        out.append(prow)
        pivots.append(col)
    return out, pivots


def kernel(rows: list[list], ncols: int) -> list[list[Fraction]]:
    """Basis of the right kernel ``{x : A x = 0}``."""
    R, pivots = rref(rows, ncols)
    free = [j for j in range(ncols) if j not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r, pc in zip(R, pivots):
            v[pc] = -r[f]
        basis.append(v)
    return basis


def rank(rows: list[list], ncols: int) -> int:
    return len(rref(rows, ncols)[1])


def primitive_integral(v: list) -> list[int]:
    """Scale a rational vector to a primitive integer vector."""
    v = [Fraction(x) for x in v]
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return ints
    return [x // g for x in ints]


def kernel_with_free(rows: list[list], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    """Kernel basis together with its free columns (basis vector ``i`` is 1 at ``free[i]``)."""
    R, pivots = rref(rows, ncols)
    ps = set(pivots)
    free = [j for j in range(ncols) if j not in ps]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r, pc in zip(R, pivots):
            v[pc] = -r[f]
        basis.append(v)
    return basis, free


def matmul(A: list[list], B: list[list]) -> list[list]:
    cols = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in cols] for row in A]
