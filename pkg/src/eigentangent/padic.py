"""Capped-precision p-adic numbers and the Iwasawa logarithm.

Elements of ``Q_p`` are stored as ``p^valuation * unit`` where the unit is an
integer known modulo ``p^relprec``.  An inexact zero ``O(p^m)`` has
``unit == 0``, ``relprec == 0`` and ``valuation == m``; the exact zero has
``valuation == INF``.

The heavy lifting elsewhere in the package works on plain integers modulo
``p^n`` for speed; this module supplies the user-facing scalar and the
series helpers that those kernels share.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

INF = math.inf


class PadicError(ValueError):
    """Raised for domain errors (non-units, divergent series, bad prime)."""


def valuation(x: int, p: int) -> float:
    """Return ``v_p(x)`` for an integer, ``INF`` for zero."""
    if x == 0:
        return INF
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def int_valuation(x: int, p: int, cap: int) -> int:
    """``v_p(x)`` capped at ``cap`` (zero counts as ``cap``)."""
    v = valuation(x, p)
    return cap if v >= cap else int(v)


@dataclass(frozen=True)
class PadicNumber:
    prime: int
    valuation: float
    unit: int
    relprec: int

    # -- construction ----------------------------------------------------------

    @classmethod
    def from_int(cls, x: int, p: int, prec: int) -> "PadicNumber":
        """``x`` known modulo ``p^prec`` (absolute precision)."""
        x = int(x) % p**prec if prec > 0 else 0
        if x == 0:
            return cls.inexact_zero(p, prec)
        v = int(valuation(x, p))
        return cls(p, v, (x // p**v) % p ** (prec - v), prec - v)

    @classmethod
    def from_rational(cls, q, p: int, prec: int) -> "PadicNumber":
        """A rational (or int) to absolute precision ``prec``."""
        q = Fraction(q)
        if q == 0:
            return cls.inexact_zero(p, prec)
        vn = int(valuation(q.numerator, p))
        vd = int(valuation(q.denominator, p))
        v = vn - vd
        rel = prec - v
        if rel <= 0:
            return cls.inexact_zero(p, prec)
        num = q.numerator // p**vn
        den = q.denominator // p**vd
        mod = p**rel
        return cls(p, v, num * pow(den, -1, mod) % mod, rel)

    @classmethod
    def exact_zero(cls, p: int) -> "PadicNumber":
        return cls(p, INF, 0, 0)

    @classmethod
    def inexact_zero(cls, p: int, prec: int) -> "PadicNumber":
        return cls(p, prec, 0, 0)

    @classmethod
    def from_residue(cls, x: int, p: int, prec: int, shift: int = 0) -> "PadicNumber":
        """``p^shift * x`` where ``x`` is known modulo ``p^prec``."""
        z = cls.from_int(x, p, prec)
        if z.unit == 0:
            return cls.inexact_zero(p, prec + shift)
        return cls(p, z.valuation + shift, z.unit, z.relprec)

    # -- basic queries ---------------------------------------------------------

    @property
    def precision(self) -> float:
        """Absolute precision ``valuation + relprec``."""
        return self.valuation + self.relprec

    def is_zero(self) -> bool:
        return self.unit == 0

    def is_unit(self) -> bool:
        return self.unit != 0 and self.valuation == 0

    def residue(self, n: int | None = None) -> int:
        """Integer representative modulo ``p^n`` (default: the absolute precision).

        Only valid for elements of ``Z_p``.
        """
        if self.valuation < 0 and self.unit != 0:
            raise PadicError("element is not integral")
        if n is None:
            n = int(self.precision)
        if self.unit == 0 or self.valuation >= n:
            return 0
        return (self.unit * self.prime ** int(self.valuation)) % self.prime**n

    def digits(self) -> list[int]:
        """Base-``p`` digits from ``p^valuation`` up to the precision."""
        out = []
        u = self.unit
        for _ in range(self.relprec):
            out.append(u % self.prime)
            u //= self.prime
        return out

    def _check(self, other: "PadicNumber") -> None:
        if other.prime != self.prime:
            raise PadicError("mismatched primes")

    def _coerce(self, other) -> "PadicNumber":
        if isinstance(other, PadicNumber):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            prec = self.precision if self.precision != INF else 64
            return PadicNumber.from_rational(other, self.prime, int(max(prec, 1)) + 8)
        return NotImplemented

    # -- arithmetic --------------------------------------------------------------

    def __neg__(self) -> "PadicNumber":
        if self.unit == 0:
            return self
        mod = self.prime**self.relprec
        return PadicNumber(self.prime, self.valuation, (-self.unit) % mod, self.relprec)

    def __add__(self, other) -> "PadicNumber":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.prime
        prec = min(self.precision, other.precision)
        if prec == INF:
            raise PadicError("sum of two exact zeros has no precision")
        if self.unit == 0:
            return other._truncate(prec)
        if other.unit == 0:
            return self._truncate(prec)
        v = int(min(self.valuation, other.valuation))
        prec = int(prec)
        if prec <= v:
            return PadicNumber.inexact_zero(p, prec)
        mod = p ** (prec - v)
        a = self.unit * p ** int(self.valuation - v)
        b = other.unit * p ** int(other.valuation - v)
        return PadicNumber.from_residue((a + b) % mod, p, prec - v, v)

    __radd__ = __add__

    def __sub__(self, other) -> "PadicNumber":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "PadicNumber":
        return (-self) + other

    def __mul__(self, other) -> "PadicNumber":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.prime
        if self.unit == 0 or other.unit == 0:
            # a zero times anything: valuation of the product bounds the result
            va = self.precision if self.unit == 0 else self.valuation
            vb = other.precision if other.unit == 0 else other.valuation
            v = va + vb
            return PadicNumber.exact_zero(p) if v == INF else PadicNumber.inexact_zero(p, int(v))
        rel = min(self.relprec, other.relprec)
        mod = p**rel
        return PadicNumber(p, self.valuation + other.valuation,
                           self.unit * other.unit % mod, rel)

    __rmul__ = __mul__

    def inverse(self) -> "PadicNumber":
        if self.unit == 0:
            raise ZeroDivisionError("inverse of a p-adic zero")
        mod = self.prime**self.relprec
        return PadicNumber(self.prime, -self.valuation, pow(self.unit, -1, mod), self.relprec)

    def __truediv__(self, other) -> "PadicNumber":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other) -> "PadicNumber":
        return self.inverse() * other

    def __pow__(self, e: int) -> "PadicNumber":
        if e < 0:
            return self.inverse() ** (-e)
        if e == 0:
            return PadicNumber(self.prime, 0, 1, max(self.relprec, 1))
        out = self
        for _ in range(e - 1):
            out = out * self
        return out

    def shift(self, k: int) -> "PadicNumber":
        """Multiply by ``p^k`` without precision loss."""
        if self.unit == 0:
            return PadicNumber(self.prime, self.valuation + k, 0, 0)
        return PadicNumber(self.prime, self.valuation + k, self.unit, self.relprec)

    def _truncate(self, prec) -> "PadicNumber":
        if prec >= self.precision:
            return self
        prec = int(prec)
        if self.unit == 0 or prec <= self.valuation:
            return PadicNumber.inexact_zero(self.prime, prec)
        rel = prec - int(self.valuation)
        return PadicNumber(self.prime, self.valuation, self.unit % self.prime**rel, rel)

    def add_bigoh(self, prec: int) -> "PadicNumber":
        """Reduce the absolute precision to at most ``prec``."""
        return self._truncate(prec)

    def equals(self, other, prec: int | None = None) -> bool:
        """Equality to the common (or given) absolute precision."""
        other = self._coerce(other)
        diff = self - other
        if prec is not None:
            diff = diff._truncate(prec)
        return diff.unit == 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, (PadicNumber, int, Fraction)):
            return NotImplemented
        return self.equals(other)

    def __hash__(self) -> int:
        return hash((self.prime, self.valuation, self.unit, self.relprec))

    # -- rendering ------------------------------------------------------------

    def __str__(self) -> str:
        return render(self)

    def __repr__(self) -> str:
        return f"PadicNumber({render(self)})"


def _power_str(p: int, e: int) -> str:
    if e == 0:
        return ""
    if e == 1:
        return str(p)
    return f"{p}^{e}"


def render(x: PadicNumber) -> str:
    """``"c0 + c1*p + ... + O(p^m)"`` with zero digits omitted."""
    p = x.prime
    if x.valuation == INF:
        return "0"
    terms = []
    if x.unit != 0:
        for i, c in enumerate(x.digits()):
            if c == 0:
                continue
            e = int(x.valuation) + i
            pw = _power_str(p, e)
            if not pw:
                terms.append(str(c))
            elif c == 1:
                terms.append(pw)
            else:
                terms.append(f"{c}*{pw}")
    m = int(x.precision)
    big = f"O({p})" if m == 1 else f"O({p}^{m})"
    if not terms:
        terms.append("0")
    return " + ".join(terms + [big])


def _parse_power(tok: str, p_expected: int | None) -> tuple[int, int]:
    if "^" in tok:
        base, e = tok.split("^")
        return int(base), int(e)
    return int(tok), 1


def parse(text: str) -> PadicNumber:
    """Inverse of :func:`render` (also accepts ``3\\times`` for multiplication)."""
    s = text.replace("\\times", "*").replace("×", "*").replace(" ", "")
    s = s.replace("\\mathcal{O}", "O").replace("{", "").replace("}", "")
    parts = s.split("+")
    big = [t for t in parts if t.startswith("O(")]
    if len(big) != 1:
        raise PadicError(f"missing big-oh term in {text!r}")
    p, m = _parse_power(big[0][2:-1], None)
    acc = 0
    for t in parts:
        if t.startswith("O(") or t == "0":
            continue
        if "*" in t:
            c, pw = t.split("*")
            base, e = _parse_power(pw, p)
            coeff = int(c)
        elif f"{p}" in t and (t == str(p) or t.startswith(f"{p}^")):
            base, e = _parse_power(t, p)
            coeff = 1
        else:
            coeff, base, e = int(t), p, 0
        if base != p:
            raise PadicError(f"inconsistent prime in {text!r}")
        acc += coeff * p**e
    return PadicNumber.from_int(acc, p, m)


# -- Teichmuller and logarithm ------------------------------------------------


def _check_prime(p: int) -> None:
    if p == 2:
        raise PadicError("p = 2 is not supported")


def teichmuller_int(u: int, p: int, n: int) -> int:
    """Teichmuller lift of ``u mod p`` as an integer modulo ``p^n``."""
    _check_prime(p)
    if u % p == 0:
        raise PadicError("Teichmuller lift of a non-unit")
    mod = p**n
    x = u % mod
    for _ in range(n):
        x = pow(x, p, mod)
    return x


def teichmuller(u: PadicNumber) -> PadicNumber:
    if not u.is_unit():
        raise PadicError("Teichmuller lift of a non-unit")
    n = u.relprec
    return PadicNumber.from_int(teichmuller_int(u.unit, u.prime, n), u.prime, n)


def _log1p_int(z: int, p: int, n: int) -> int:
    """``log(1 + z) mod p^n`` for an integer ``z`` divisible by ``p``.

    Terms ``z^k / k`` with ``v(z) k - v(k) >= n`` are dropped.
    """
    if z % p:
        raise PadicError("log series diverges: argument not in 1 + pZ_p")
    if z % p**n == 0:
        return 0
    vz = int(valuation(z, p)) if z else n
    extra = int(math.log(n * 4 + 4, p)) + 2
    mod = p ** (n + extra)
    total = 0
    zk = 1
    k = 0
    while True:
        k += 1
        zk = zk * z % mod
        vk = int(valuation(k, p))
        if vz * k - vk >= n:
            # later terms only grow in valuation once k > n
            if k > n + extra:
                break
            continue
        num = zk // p**vk
        term = num * pow(k // p**vk, -1, mod) % mod
        total += term if k % 2 else -term
    return total % p**n


def iwasawa_log_int(u: int, p: int, n: int) -> int:
    """Iwasawa logarithm of the unit ``u`` modulo ``p^n`` (``p`` odd)."""
    _check_prime(p)
    if u % p == 0:
        raise PadicError("Iwasawa log of a non-unit")
    mod = p ** (n + 2)
    w = pow(u, p - 1, mod)
    val = _log1p_int(w - 1, p, n + 1)
    return val * pow(p - 1, -1, p**n) % p**n


def iwasawa_log(u: PadicNumber) -> PadicNumber:
    """``log(u / omega(u))`` with the convention ``log p = 0``.

    For a unit known modulo ``p^m`` the result is known modulo ``p^m``.
    """
    if not u.is_unit():
        raise PadicError("Iwasawa log of a non-unit")
    n = u.relprec
    return PadicNumber.from_int(iwasawa_log_int(u.unit, u.prime, n), u.prime, n)


@dataclass(frozen=True)
class LogSeries:
    """Coefficients of ``log(a + c x)`` as a power series in ``x``."""

    coefficients: tuple[PadicNumber, ...]

    @property
    def length(self) -> int:
        return len(self.coefficients)

    def __getitem__(self, i: int) -> PadicNumber:
        return self.coefficients[i]

    def at_zero(self) -> PadicNumber:
        return self.coefficients[0]


def log_series(a: PadicNumber, c: PadicNumber, order: int) -> LogSeries:
    """``iwasawa_log(a) + sum_{n<order} (-1)^(n+1) (c/a)^n x^n / n``."""
    if not a.is_unit():
        raise PadicError("log_series needs a unit constant term")
    p = a.prime
    if c.unit != 0 and c.valuation < 1:
        raise PadicError("log_series diverges: c must be divisible by p")
    coeffs = [iwasawa_log(a)]
    ratio = c / a
    power = None
    for n in range(1, order):
        power = ratio if power is None else power * ratio
        term = power / PadicNumber.from_int(n, p, power.relprec + 8) if power.unit else power.shift(-int(valuation(n, p)))
        coeffs.append(term if n % 2 else -term)
    return LogSeries(tuple(coeffs))


def log_series_int(a: int, c: int, p: int, order: int, n: int) -> list[int]:
    """Integer version of :func:`log_series` modulo ``p^n`` (``v(c) >= 1``)."""
    if a % p == 0:
        raise PadicError("log_series needs a unit constant term")
    if c % p:
        raise PadicError("log_series diverges: c must be divisible by p")
    extra = int(math.log(max(order, 2), p)) + 2
    mod = p ** (n + extra)
    ratio = c * pow(a, -1, mod) % mod
    out = [iwasawa_log_int(a, p, n)]
    rk = 1
    for k in range(1, order):
        rk = rk * ratio % mod
        vk = int(valuation(k, p))
        term = (rk // p**vk) * pow(k // p**vk, -1, mod)
        out.append((term if k % 2 else -term) % p**n)
    return out


# -- ordinary unit roots -------------------------------------------------------


class NonOrdinaryError(PadicError):
    """The Hecke eigenvalue at p is not a p-adic unit."""


def hensel_quadratic_unit_root(a_p, k: int, p: int, prec: int) -> PadicNumber:
    """Unit root of ``X^2 - a_p X + p^(k+1)`` to ``prec`` digits."""
    if isinstance(a_p, PadicNumber):
        ap = a_p.residue(prec) if a_p.valuation >= 0 else None
        if ap is None:
            raise NonOrdinaryError("a_p is not integral")
    else:
        frac = Fraction(a_p)
        mod = p**prec
        ap = frac.numerator * pow(frac.denominator, -1, mod) % mod
    if ap % p == 0:
        raise NonOrdinaryError(f"a_{p} is not a unit: stabilisation is not ordinary")
    mod = p**prec
    c = p ** (k + 1)
    x = ap % mod
    for _ in range(prec.bit_length() + 2):
        f = (x * x - ap * x + c) % mod
        df = (2 * x - ap) % mod
        x = (x - f * pow(df, -1, mod)) % mod
    return PadicNumber.from_int(x, p, prec)
