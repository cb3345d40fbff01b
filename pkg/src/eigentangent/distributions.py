"""Finite approximation modules of p-adic distributions.

A distribution ``mu`` on ``Z_p`` (resp. ``Z_p^2``) is stored through its
moments ``mu(x^j)`` (resp. ``mu(x^i y^j)``).  At depth ``N`` moment ``j`` is
only meaningful modulo ``p^(N-j)`` (resp. ``p^(N-i-j)``); every operation
here re-reduces to that filtration so equal elements compare equal.

Matrices act on functions on the left,

    (g . f)(x) = (a + c x)^k f((b + d x) / (a + c x)),

and on distributions on the right by ``(mu | g)(f) = mu(g . f)``.  In moment
coordinates this is ``m'_j = sum_i A[j, i] m_i`` where ``A[j, i]`` is the
coefficient of ``x^i`` in ``(a + c x)^(k-j) (b + d x)^j``.  The two-variable
action of a pair ``(g1, g2)`` is ``m' = A1 m A2^T``.

The "log-twisted" action replaces ``(a + c x)^k`` by
``log(a + c x) (a + c x)^k``; it is the epsilon-part of the weight action
over the dual numbers and only its low moments (``j <= k``) are ever needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .padic import PadicError, iwasawa_log_int, valuation

BIG = 2**62


def _dtype_for(q: int, width: int):
    return np.int64 if width * q * q < BIG else object


def _zeros(shape, q, width):
    dt = _dtype_for(q, width)
    if dt is object:
        z = np.empty(shape, dtype=object)
        z.fill(0)
        return z
    return np.zeros(shape, dtype=np.int64)


def _col(x, q, width):
    dt = _dtype_for(q, width)
    if dt is object:
        return np.array([int(v) % q for v in x], dtype=object)
    return np.array([int(v) % q for v in x], dtype=np.int64)


def _series_mul(S, T, q, N):
    """Truncated product of batched power series (shape ``(B, N)``)."""
    out = _zeros(S.shape, q, N)
    for i in range(N):
        acc = S[:, 0] * T[:, i]
        for l in range(1, i + 1):
            acc = acc + S[:, l] * T[:, i - l]
        out[:, i] = acc % q
    return out


def _inverse_linear(a, c, q, N):
    """Series of ``1 / (a + c x)`` for unit ``a``."""
    inv_a = np.array([pow(int(v), -1, q) for v in a], dtype=a.dtype)
    r = (-(c % q) * inv_a) % q
    out = _zeros((len(a), N), q, N)
    term = inv_a.copy()
    for i in range(N):
        out[:, i] = term
        term = (term * r) % q
    return out


def _linear(a, c, q, N):
    out = _zeros((len(a), N), q, N)
    out[:, 0] = a % q
    if N > 1:
        out[:, 1] = c % q
    return out


def action_matrices(a, b, c, d, k: int, N: int, q: int, rows: int | None = None,
                    series: bool = True, p: int | None = None) -> np.ndarray:
    """Batched moment-action matrices, shape ``(B, rows, N)``.

    ``series=False`` requests the polynomial (classical ``V_k``) action, for
    which ``rows = N = k + 1`` and no unit condition on ``a`` is needed.
    """
    rows = N if rows is None else rows
    a = _col(a, q, N)
    b = _col(b, q, N)
    c = _col(c, q, N)
    d = _col(d, q, N)
    B = len(a)
    out = _zeros((B, rows, N), q, N)
    lin_a = _linear(a, c, q, N)
    lin_b = _linear(b, d, q, N)
    if not series:
        # a polynomial identity: (a+cx)^(k-j) (b+dx)^j, valid for all j <= k
        for j in range(rows):
            S = _zeros((B, N), q, N)
            S[:, 0] = 1
            for _ in range(k - j):
                S = _series_mul(S, lin_a, q, N)
            for _ in range(j):
                S = _series_mul(S, lin_b, q, N)
            out[:, j, :] = S
        return out
    if p is not None and any(int(v) % p == 0 for v in a):
        raise PadicError("upper-left entry must be a unit")
    S = _zeros((B, N), q, N)
    S[:, 0] = 1
    for _ in range(k):
        S = _series_mul(S, lin_a, q, N)
    ratio = _series_mul(lin_b, _inverse_linear(a, c, q, N), q, N)
    for j in range(rows):
        out[:, j, :] = S
        S = _series_mul(S, ratio, q, N)
    return out


def log_series_batch(a, c, p: int, N: int, n: int) -> np.ndarray:
    """Batched coefficients of ``log(a + c x)`` modulo ``p^n`` (``c`` divisible by ``p``)."""
    q = p**n
    extra = int(math.log(max(N, 2), p)) + 2
    Q = p ** (n + extra)
    out = np.empty((len(a), N), dtype=object)
    for t, (av, cv) in enumerate(zip(a, c)):
        av, cv = int(av), int(cv)
        if cv % p:
            raise PadicError("log series diverges: lower-left entry not divisible by p")
        out[t, 0] = iwasawa_log_int(av, p, n)
        ratio = cv * pow(av, -1, Q) % Q
        rk = 1
        for kk in range(1, N):
            rk = rk * ratio % Q
            vk = int(valuation(kk, p))
            term = (rk // p**vk) * pow(kk // p**vk, -1, q) % q
            out[t, kk] = term if kk % 2 else (-term) % q
    if _dtype_for(q, N) is np.int64:
        return out.astype(np.int64)
    return out


def log_action_matrices(a, b, c, d, k: int, N: int, p: int, n: int) -> np.ndarray:
    """Batched log-twisted action matrices, shape ``(B, k + 1, N)``."""
    q = p**n
    A = action_matrices(a, b, c, d, k, N, q, rows=k + 1, p=p)
    L = log_series_batch(a, c, p, N, n)
    if L.dtype != A.dtype:
        L = L.astype(A.dtype)
    out = np.empty_like(A)
    for j in range(k + 1):
        out[:, j, :] = _series_mul(A[:, j, :], L, q, N)
    return out


def _log_coeff_bound(p: int, i: int, j: int) -> int:
    """Valuation lower bound for the ``x^i`` coefficient of row ``j`` of a log-twisted action."""
    best = None
    for nn in range(0, i + 1):
        vlog = 1 if nn == 0 else nn - int(valuation(nn, p))
        v = vlog + max(0, i - nn - j)
        best = v if best is None else min(best, v)
    return best


def log_precision(p: int, N: int, k: int, twovar: bool = False) -> int:
    """Certified absolute precision of the log-twisted action on a depth-``N`` approximation.

    Each stored moment carries an error of valuation ``N - i`` (resp.
    ``N - i - l``) and moments beyond the depth are unknown but integral;
    both are weighed against valuation bounds on the action coefficients.
    """
    span = N + 2 * p + 8
    best = None
    for j in range(k + 1):
        if twovar:
            for s in range(k + 1):
                for i in range(span):
                    lb = _log_coeff_bound(p, i, j)
                    for l in range(span):
                        v = lb + max(0, l - s) + max(0, N - i - l)
                        best = v if best is None else min(best, v)
        else:
            for i in range(span):
                v = _log_coeff_bound(p, i, j) + max(0, N - i)
                best = v if best is None else min(best, v)
    return best


def filtration_moduli(p: int, N: int, twovar: bool = False) -> np.ndarray:
    """``p^(N - j)`` (resp. ``p^(N-i-j)``, at least 1) for each moment slot."""
    if twovar:
        vals = [[p ** max(N - i - j, 0) for j in range(N)] for i in range(N)]
    else:
        vals = [p ** max(N - j, 0) for j in range(N)]
    return np.array(vals, dtype=_dtype_for(p**N, N))


def reduce_filtration(m: np.ndarray, p: int, N: int, twovar: bool = False) -> np.ndarray:
    return m % filtration_moduli(p, N, twovar)


def act_moments(A: np.ndarray, m: np.ndarray, q: int) -> np.ndarray:
    """Batched one-variable action: ``A`` (B, r, N), ``m`` (B, N) -> (B, r)."""
    if A.dtype == object or m.dtype == object:
        return np.einsum("brn,bn->br", A.astype(object), m.astype(object)) % q
    return np.einsum("brn,bn->br", A, m) % q


def act_moments2(A1: np.ndarray, A2: np.ndarray, m: np.ndarray, q: int) -> np.ndarray:
    """Batched two-variable action ``A1 m A2^T``: (B, r1, N), (B, r2, N), (B, N, N)."""
    if A1.dtype == object or A2.dtype == object or m.dtype == object:
        A1, A2, m = A1.astype(object), A2.astype(object), m.astype(object)
        t = np.einsum("brn,bnk->brk", A1, m) % q
        return np.einsum("brk,bsk->brs", t, A2) % q
    t = np.matmul(A1, m) % q
    return np.matmul(t, np.transpose(A2, (0, 2, 1))) % q


# -- value types ------------------------------------------------------------------


@dataclass(frozen=True)
class Sigma0Element:
    """Integer matrix ``(a b; c d)`` over ``Z_p`` with ``a`` a unit, ``p | c``."""

    a: int
    b: int
    c: int
    d: int
    p: int

    def __post_init__(self):
        if self.a % self.p == 0:
            raise PadicError("Sigma0(p) needs a unit upper-left entry")
        if self.c % self.p:
            raise PadicError("Sigma0(p) needs p to divide the lower-left entry")
        if self.a * self.d - self.b * self.c == 0:
            raise PadicError("Sigma0(p) element must have nonzero determinant")

    def __matmul__(self, other: "Sigma0Element") -> "Sigma0Element":
        a, b, c, d = self.a, self.b, self.c, self.d
        e, f, g, h = other.a, other.b, other.c, other.d
        return Sigma0Element(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h, self.p)

    @property
    def entries(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)


@dataclass(frozen=True)
class PolyDual:
    """An element of ``V_k`` (or ``V_{k,k}``) with values modulo ``p^n``."""

    p: int
    n: int
    k: int
    values: np.ndarray

    @property
    def twovar(self) -> bool:
        return self.values.ndim == 2

    def act(self, g: Sigma0Element | tuple) -> "PolyDual":
        q = self.p**self.n
        k = self.k
        if self.twovar:
            g1, g2 = g
            A1 = action_matrices(*[[x] for x in g1.entries], k, k + 1, q, series=False)
            A2 = action_matrices(*[[x] for x in g2.entries], k, k + 1, q, series=False)
            vals = act_moments2(A1, A2, self.values[None].astype(A1.dtype), q)[0]
        else:
            A = action_matrices(*[[x] for x in g.entries], k, k + 1, q, series=False)
            vals = act_moments(A, self.values[None].astype(A.dtype), q)[0]
        return PolyDual(self.p, self.n, k, vals)

    def __add__(self, other: "PolyDual") -> "PolyDual":
        return PolyDual(self.p, self.n, self.k, (self.values + other.values) % self.p**self.n)

    def scale(self, c: int) -> "PolyDual":
        return PolyDual(self.p, self.n, self.k, (self.values * c) % self.p**self.n)

    def is_zero(self) -> bool:
        return not np.any(self.values % self.p**self.n)

    def __eq__(self, other) -> bool:
        q = self.p ** min(self.n, other.n)
        return bool(np.all((np.asarray(self.values, dtype=object) - np.asarray(other.values, dtype=object)) % q == 0))


@dataclass(frozen=True)
class FinApproxDist:
    """One-variable distribution at depth ``N``: moment ``j`` mod ``p^(N-j)``."""

    p: int
    k: int
    N: int
    moments: np.ndarray

    def __post_init__(self):
        m = np.array([int(v) for v in self.moments], dtype=object)
        m = m % np.array([self.p ** max(self.N - j, 0) for j in range(self.N)], dtype=object)
        object.__setattr__(self, "moments", m)

    @property
    def modulus(self) -> int:
        return self.p**self.N

    def act(self, g: Sigma0Element) -> "FinApproxDist":
        return act_dist(g, self)

    def __eq__(self, other) -> bool:
        return (self.p, self.k, self.N) == (other.p, other.k, other.N) and bool(np.all(self.moments == other.moments))

    def __add__(self, other: "FinApproxDist") -> "FinApproxDist":
        return FinApproxDist(self.p, self.k, self.N, self.moments + other.moments)


@dataclass(frozen=True)
class FinApproxDist2:
    """Two-variable distribution: moment ``(i, j)`` mod ``p^(N-i-j)``."""

    p: int
    k: int
    N: int
    moments: np.ndarray

    def __post_init__(self):
        m = np.array(self.moments, dtype=object).reshape(self.N, self.N)
        m = m % np.array([[self.p ** max(self.N - i - j, 0) for j in range(self.N)]
                          for i in range(self.N)], dtype=object)
        object.__setattr__(self, "moments", m)

    @property
    def modulus(self) -> int:
        return self.p**self.N

    def __eq__(self, other) -> bool:
        return (self.p, self.k, self.N) == (other.p, other.k, other.N) and bool(np.all(self.moments == other.moments))

    def __add__(self, other: "FinApproxDist2") -> "FinApproxDist2":
        return FinApproxDist2(self.p, self.k, self.N, self.moments + other.moments)


def act_dist(g: Sigma0Element, mu: FinApproxDist) -> FinApproxDist:
    q = mu.modulus
    A = action_matrices([g.a], [g.b], [g.c], [g.d], mu.k, mu.N, q)
    out = act_moments(A, mu.moments[None].astype(A.dtype), q)[0]
    return FinApproxDist(mu.p, mu.k, mu.N, out)


def act_dist2(pair: tuple[Sigma0Element, Sigma0Element], mu: FinApproxDist2) -> FinApproxDist2:
    g1, g2 = pair
    q = mu.modulus
    A1 = action_matrices([g1.a], [g1.b], [g1.c], [g1.d], mu.k, mu.N, q)
    A2 = action_matrices([g2.a], [g2.b], [g2.c], [g2.d], mu.k, mu.N, q)
    out = act_moments2(A1, A2, mu.moments[None].astype(A1.dtype), q)[0]
    return FinApproxDist2(mu.p, mu.k, mu.N, out)


def specialize(mu: FinApproxDist | FinApproxDist2) -> PolyDual:
    """Keep the moments of degree at most ``k`` in each variable."""
    k = mu.k
    if mu.N <= 2 * k if isinstance(mu, FinApproxDist2) else mu.N <= k:
        raise PadicError("depth too small to specialize")
    n = mu.N - (2 * k if isinstance(mu, FinApproxDist2) else k)
    q = mu.p**n
    if isinstance(mu, FinApproxDist2):
        vals = np.array(mu.moments[: k + 1, : k + 1], dtype=object) % q
    else:
        vals = np.array(mu.moments[: k + 1], dtype=object) % q
    return PolyDual(mu.p, n, k, vals)


def epsilon_error(g, mu: FinApproxDist | FinApproxDist2, direction: tuple[int, int] = (1, 0)) -> PolyDual:
    """Epsilon-part of ``mu | g`` over the dual numbers, as a ``V_k``-valued vector.

    ``g`` is a :class:`Sigma0Element` (one variable) or a pair of them.
    For a pair, ``direction`` selects which weight is deformed; general
    ``(t1, t2)`` gives ``t1 E(1,0) + t2 E(0,1)``.
    """
    p, N, k = mu.p, mu.N, mu.k
    n = N
    q = p**n
    if isinstance(mu, FinApproxDist):
        L = log_action_matrices([g.a], [g.b], [g.c], [g.d], k, N, p, n)
        vals = act_moments(L, mu.moments[None].astype(L.dtype), q)[0]
        prec = log_precision(p, N, k)
        return PolyDual(p, prec, k, vals % p**prec)
    g1, g2 = g
    t1, t2 = direction
    out = np.zeros((k + 1, k + 1), dtype=object)
    m = mu.moments[None]
    if t1:
        L1 = log_action_matrices([g1.a], [g1.b], [g1.c], [g1.d], k, N, p, n)
        A2 = action_matrices([g2.a], [g2.b], [g2.c], [g2.d], k, N, q, rows=k + 1)
        out = out + t1 * act_moments2(L1.astype(object), A2.astype(object), m.astype(object), q)[0]
    if t2:
        A1 = action_matrices([g1.a], [g1.b], [g1.c], [g1.d], k, N, q, rows=k + 1)
        L2 = log_action_matrices([g2.a], [g2.b], [g2.c], [g2.d], k, N, p, n)
        out = out + t2 * act_moments2(A1.astype(object), L2.astype(object), m.astype(object), q)[0]
    prec = log_precision(p, N, k, twovar=True)
    return PolyDual(p, prec, k, out % p**prec)
