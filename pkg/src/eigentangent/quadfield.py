"""Arithmetic in the rings of integers of the Euclidean imaginary quadratic fields.

Elements of ``O_K = Z[w]`` are pairs ``(x, y)`` meaning ``x + y w`` with
``w = sqrt(d)`` for ``d = -1, -2`` and ``w = (1 + sqrt(d)) / 2`` for
``d = -3, -7, -11``.  Field elements use Fraction coordinates.  Cusps are
pairs ``(num, den)`` of ring elements; ``den = 0`` is infinity.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

EUCLIDEAN = (-1, -2, -3, -7, -11)


class UnsupportedFieldError(ValueError):
    """Only the five Euclidean imaginary quadratic fields are supported."""


Elt = tuple[int, int]


@dataclass(frozen=True)
class QuadField:
    d: int

    def __post_init__(self):
        if self.d not in EUCLIDEAN:
            raise UnsupportedFieldError(f"d = {self.d} is not a Euclidean imaginary quadratic field")
        half = self.d % 4 == 1
        object.__setattr__(self, "_t", 1 if half else 0)
        object.__setattr__(self, "_n", (1 - self.d) // 4 if half else -self.d)

    # w^2 = tr * w - nm
    @property
    def half_integral(self) -> bool:
        return self.d % 4 == 1

    @property
    def trace_w(self) -> int:
        return 1 if self.half_integral else 0

    @property
    def norm_w(self) -> int:
        return (1 - self.d) // 4 if self.half_integral else -self.d

    # -- ring operations ---------------------------------------------------------------

    def add(self, a, b):
        return (a[0] + b[0], a[1] + b[1])

    def sub(self, a, b):
        return (a[0] - b[0], a[1] - b[1])

    def neg(self, a):
        return (-a[0], -a[1])

    def mul(self, a, b):
        x1, y1 = a
        x2, y2 = b
        t, n = self._t, self._n
        # y1 y2 w^2 = y1 y2 (t w - n)
        return (x1 * x2 - n * y1 * y2, x1 * y2 + x2 * y1 + t * y1 * y2)

    def conj(self, a):
        x, y = a
        if self.half_integral:
            return (x + y, -y)
        return (x, -y)

    def norm(self, a) -> int:
        x, y = a
        return x * x + self._t * x * y + self._n * y * y

    def div_exact_q(self, a, b) -> tuple[Fraction, Fraction]:
        """``a / b`` as field coordinates."""
        nb = self.norm(b)
        num = self.mul(a, self.conj(b))
        return (Fraction(num[0], nb), Fraction(num[1], nb))

    def divides(self, b, a) -> bool:
        if b == (0, 0):
            return a == (0, 0)
        x, y = self.div_exact_q(a, b)
        return x.denominator == 1 and y.denominator == 1

    def exact_div(self, a, b) -> Elt:
        x, y = self.div_exact_q(a, b)
        if x.denominator != 1 or y.denominator != 1:
            raise ArithmeticError("not divisible")
        return (int(x), int(y))

    def round_quotient(self, a, b) -> Elt:
        """A ring element ``q`` with ``N(a - q b) < N(b)``."""
        nb = self.norm(b)
        num = self.mul(a, self.conj(b))
        fx, fy = num[0] // nb, num[1] // nb
        best = None
        for xi in (fx, fx + 1):
            for yi in (fy, fy + 1):
                r = self.sub(a, self.mul((xi, yi), b))
                nr = self.norm(r)
                if best is None or nr < best[0]:
                    best = (nr, (xi, yi))
        if best[0] >= self.norm(b):  # pragma: no cover - impossible for Euclidean fields
            raise ArithmeticError("Euclidean step failed")
        return best[1]

    def divmod(self, a, b) -> tuple[Elt, Elt]:
        q = self.round_quotient(a, b)
        return q, self.sub(a, self.mul(q, b))

    def xgcd(self, a, b) -> tuple[Elt, Elt, Elt]:
        """``(g, x, y)`` with ``x a + y b = g``."""
        x0, x1, y0, y1 = (1, 0), (0, 0), (0, 0), (1, 0)
        while b != (0, 0):
            q, r = self.divmod(a, b)
            a, b = b, r
            x0, x1 = x1, self.sub(x0, self.mul(q, x1))
            y0, y1 = y1, self.sub(y0, self.mul(q, y1))
        return a, x0, y0

    @property
    def units(self) -> list[Elt]:
        if self.d == -1:
            return [(1, 0), (0, 1), (-1, 0), (0, -1)]
        if self.d == -3:
            # w = (1 + sqrt(-3)) / 2 is a primitive sixth root of unity
            out, u = [], (1, 0)
            for _ in range(6):
                out.append(u)
                u = self.mul(u, (0, 1))
            return out
        return [(1, 0), (-1, 0)]

    def is_unit(self, a) -> bool:
        return self.norm(a) == 1

    def inverse_unit(self, a) -> Elt:
        return self.conj(a)

    def complex(self, a) -> complex:
        x, y = a
        if self.half_integral:
            return complex(x + y / 2, y * math.sqrt(-self.d) / 2)
        return complex(x, y * math.sqrt(-self.d))

    def canonical_generator(self, a) -> Elt:
        """Associate with lexicographically smallest ``(real, imaginary)`` among those with both >= 0.

        Falls back to the lexicographic minimum over all associates when no
        associate lies in the closed first quadrant.
        """
        cands = [self.mul(u, a) for u in self.units]

        def key(z):
            c = self.complex(z)
            return (round(c.real, 9), round(c.imag, 9))

        firstq = [z for z in cands if key(z)[0] >= 0 and key(z)[1] >= 0]
        pool = firstq or cands
        return min(pool, key=key)

    # -- parsing and printing --------------------------------------------------------------

    def parse(self, text: str) -> Elt:
        """Parse an expression in ``w`` (or ``sqrt(d)``), e.g. ``"(9+5*sqrt(-11))/2"``."""
        return _parse_elt(self, text)

    def format(self, a) -> str:
        x, y = a
        if y == 0:
            return str(x)
        ys = "w" if y == 1 else "-w" if y == -1 else f"{y}*w"
        if x == 0:
            return ys
        return f"{x}+{ys}" if y > 0 else f"{x}{ys}"

    def sqrt_d(self) -> tuple[Fraction, Fraction]:
        """Coordinates of ``sqrt(d)`` in the basis ``(1, w)``."""
        if self.half_integral:
            return (Fraction(-1), Fraction(2))
        return (Fraction(0), Fraction(1))


# -- expression parser ---------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(sqrt\(\s*-?\d+\s*\)|\d+|w|s|[-+*/()])")


def _parse_elt(K: QuadField, text: str) -> Elt:
    toks = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"cannot parse {text!r}")
        toks.append(m.group(1).replace(" ", ""))
        pos = m.end()
    idx = 0

    def mulq(a, b):
        x1, y1 = a
        x2, y2 = b
        t, n = K.trace_w, K.norm_w
        return (x1 * x2 - n * y1 * y2, x1 * y2 + x2 * y1 + t * y1 * y2)

    def divq(a, b):
        bx, by = b
        conj = (bx + by, -by) if K.half_integral else (bx, -by)
        nbv = bx * bx + K.trace_w * bx * by + K.norm_w * by * by
        num = mulq(a, conj)
        return (num[0] / nbv, num[1] / nbv)

    def atom():
        nonlocal idx
        t = toks[idx]
        idx += 1
        if t == "(":
            v = expr()
            if toks[idx] != ")":
                raise ValueError("unbalanced parentheses")
            idx += 1
            return v
        if t == "-":
            v = atom()
            return (-v[0], -v[1])
        if t == "+":
            return atom()
        if t == "w":
            return (Fraction(0), Fraction(1))
        if t == "s" or t.startswith("sqrt"):
            if t.startswith("sqrt"):
                dd = int(t[5:-1])
                if dd != K.d:
                    raise ValueError(f"sqrt({dd}) does not belong to Q(sqrt({K.d}))")
            return K.sqrt_d()
        return (Fraction(int(t)), Fraction(0))

    def term():
        nonlocal idx
        v = atom()
        while idx < len(toks) and toks[idx] in "*/":
            op = toks[idx]
            idx += 1
            w = atom()
            v = mulq(v, w) if op == "*" else divq(v, w)
        return v

    def expr():
        nonlocal idx
        v = term()
        while idx < len(toks) and toks[idx] in "+-":
            op = toks[idx]
            idx += 1
            w = term()
            v = (v[0] + w[0], v[1] + w[1]) if op == "+" else (v[0] - w[0], v[1] - w[1])
        return v

    val = expr()
    if idx != len(toks):
        raise ValueError(f"trailing input in {text!r}")
    x, y = val
    if x.denominator != 1 or y.denominator != 1:
        raise ValueError(f"{text!r} is not an algebraic integer of Q(sqrt({K.d}))")
    return (int(x), int(y))


# -- ideals, residues and the projective line ------------------------------------------------


def lattice_hnf(K: QuadField, g: Elt) -> tuple[int, int, int]:
    """HNF ``(n1, m, n2)`` of the ideal ``(g)``: basis ``(n1, 0)`` and ``(m, n2)``."""
    v1 = g
    v2 = K.mul(g, (0, 1))
    # column operations on the y-coordinates to get gcd in y
    a, b = v1, v2
    while b[1] != 0:
        q = a[1] // b[1]
        a, b = b, (a[0] - q * b[0], a[1] - q * b[1])
    if a[1] < 0:
        a = (-a[0], -a[1])
    n2 = a[1]
    n1 = abs(b[0])
    m = a[0] % n1 if n1 else a[0]
    return n1, m, n2


class ResidueRing:
    """``O_K / (g)`` with canonical representatives."""

    def __init__(self, K: QuadField, g: Elt):
        self.K = K
        self.g = g
        self.n1, self.m, self.n2 = lattice_hnf(K, g)
        self.size = self.n1 * self.n2

    def reduce(self, a) -> Elt:
        x, y = a
        t = y // self.n2
        x, y = x - t * self.m, y - t * self.n2
        return (x % self.n1, y)

    def elements(self):
        for y in range(self.n2):
            for x in range(self.n1):
                yield (x, y)

    def is_zero(self, a) -> bool:
        return self.reduce(a) == (0, 0)


def factor_norm(n: int) -> list[tuple[int, int]]:
    out, f = [], 2
    while f * f <= n:
        e = 0
        while n % f == 0:
            n //= f
            e += 1
        if e:
            out.append((f, e))
        f += 1
    if n > 1:
        out.append((n, 1))
    return out


@lru_cache(maxsize=None)
def primes_above(d: int, q: int) -> tuple[Elt, ...]:
    """Canonical generators of the primes of ``O_K`` above the rational prime ``q``."""
    K = QuadField(d)
    found = []
    # an element of norm q has |x + y w| <= sqrt(q), so both coordinates are below 2 sqrt(q)
    bound = 2 * math.isqrt(q) + 3
    for x in range(-bound, bound + 1):
        for y in range(-bound, bound + 1):
            nn = K.norm((x, y))
            if nn == q:
                g = K.canonical_generator((x, y))
                if g not in found:
                    found.append(g)
    if not found:
        return (K.canonical_generator((q, 0)),)
    # conjugate primes may coincide (ramified): keep distinct ideals
    distinct = []
    for g in found:
        if not any(K.divides(h, g) and K.divides(g, h) for h in distinct):
            distinct.append(g)
    return tuple(sorted(distinct))


def factor_ideal(K: QuadField, g: Elt) -> list[tuple[Elt, int]]:
    """Prime factorization of the principal ideal ``(g)``."""
    out = []
    rest = g
    for q, _ in factor_norm(K.norm(g)):
        for pi in primes_above(K.d, q):
            e = 0
            while K.divides(pi, rest):
                rest = K.exact_div(rest, pi)
                e += 1
            if e:
                out.append((pi, e))
    if not K.is_unit(rest):  # pragma: no cover - factorization is complete
        raise ArithmeticError("incomplete factorization")
    return out


def ideal_index(K: QuadField, g: Elt) -> int:
    """``[SL2(O_K) : Gamma0(g)] = Nm(g) prod (1 + 1/Nm(q))``."""
    out = Fraction(K.norm(g))
    for pi, _ in factor_ideal(K, g):
        nq = K.norm(pi)
        out *= Fraction(nq + 1, nq)
    return int(out)


def power(K: QuadField, a: Elt, e: int) -> Elt:
    out = (1, 0)
    for _ in range(e):
        out = K.mul(out, a)
    return out


class P1Quad:
    """``P^1(O_K / N)`` via the Chinese remainder theorem on prime-power factors."""

    def __init__(self, K: QuadField, level: Elt):
        self.K = K
        self.level = level
        self.factors = factor_ideal(K, level)
        self.local = []
        for pi, e in self.factors:
            ge = power(K, pi, e)
            self.local.append((pi, e, ge, ResidueRing(K, ge)))
        # CRT idempotents
        self.idem = []
        for i, (_, _, ge, R) in enumerate(self.local):
            other = (1, 0)
            for j, (_, _, gj, _) in enumerate(self.local):
                if j != i:
                    other = K.mul(other, gj)
            _, x, _ = K.xgcd(other, ge)
            g, x, y = K.xgcd(other, ge)
            inv = K.mul(x, K.inverse_unit(g))
            self.idem.append(K.mul(other, inv))
        labels = [[]]
        for pi, e, ge, R in self.local:
            loc = [("c", r) for r in R.elements()]  # (r : 1)
            loc += [("d", r) for r in R.elements() if K.divides(pi, r)]  # (1 : r), r in pi
            labels = [lab + [x] for lab in labels for x in loc]
        self.elements = [tuple(lab) for lab in labels]
        self._index = {lab: i for i, lab in enumerate(self.elements)}
        # residue tables: inverses of local units (non-units are absent)
        self._inverse = []
        for pi, e, ge, R in self.local:
            inv = {}
            for r in R.elements():
                if not K.divides(pi, r):
                    inv[r] = R.reduce(self._inv_mod(r, ge))
            self._inverse.append(inv)
        self._ring = ResidueRing(K, level) if self.local else None
        self._memo: dict = {}

    def __len__(self):
        return len(self.elements)

    def _inv_mod(self, a, ge):
        g, x, _ = self.K.xgcd(a, ge)
        return self.K.mul(x, self.K.inverse_unit(g))

    def local_label(self, i: int, c: Elt, d: Elt):
        K = self.K
        R = self.local[i][3]
        inv = self._inverse[i]
        cr, dr = R.reduce(c), R.reduce(d)
        if dr in inv:
            return ("c", R.reduce(K.mul(cr, inv[dr])))
        if cr not in inv:
            raise ValueError("pair is not primitive modulo the level")
        return ("d", R.reduce(K.mul(dr, inv[cr])))

    def label(self, c: Elt, d: Elt):
        return tuple(self.local_label(i, c, d) for i in range(len(self.local)))

    def index(self, c: Elt, d: Elt) -> int:
        if not self.local:
            return 0
        key = (self._ring.reduce(c), self._ring.reduce(d))
        idx = self._memo.get(key)
        if idx is None:
            idx = self._memo[key] = self._index[self.label(c, d)]
        return idx

    def pair(self, idx: int) -> tuple[Elt, Elt]:
        """A global pair ``(c, d)`` in ``O_K^2`` with the given label."""
        K = self.K
        c, d = (0, 0), (0, 0)
        for (kind, r), e in zip(self.elements[idx], self.idem):
            lc, ld = (r, (1, 0)) if kind == "c" else ((1, 0), r)
            c = K.add(c, K.mul(lc, e))
            d = K.add(d, K.mul(ld, e))
        return c, d

    def lift(self, idx: int):
        """A matrix in SL2(O_K) whose bottom row has label ``idx``."""
        K = self.K
        if not self.local:
            return ((1, 0), (0, 0), (0, 0), (1, 0))
        c, d = self.pair(idx)
        if self.elements[idx] == tuple(("c", (0, 0)) for _ in self.local):
            return ((1, 0), (0, 0), (0, 0), (1, 0))
        N = self.level
        C = c if c != (0, 0) else N
        span = 0
        while True:
            for tx in range(-span, span + 1):
                for ty in range(-span, span + 1):
                    if max(abs(tx), abs(ty)) != span:
                        continue
                    D = K.add(d, K.mul((tx, ty), N))
                    g, x, y = K.xgcd(D, C)
                    if K.is_unit(g):
                        ginv = K.inverse_unit(g)
                        x, y = K.mul(x, ginv), K.mul(y, ginv)
                        return (x, K.neg(y), C, D)
            span += 1
