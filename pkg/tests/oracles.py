"""Independent brute-force oracles shared by the unit and acceptance tests."""

import itertools

import numpy as np


def all_vectors(q, c):
    """Every vector of ``(Z/q)^c`` as rows of an array."""
    return np.array(list(itertools.product(range(q), repeat=c)), dtype=np.int64).reshape(-1, c)


def image_set(M, q):
    X = all_vectors(q, M.shape[1])
    return {tuple(r) for r in (X @ M.T) % q}


def kernel_set(M, q):
    X = all_vectors(q, M.shape[1])
    return {tuple(x) for x, r in zip(X, (X @ M.T) % q) if not r.any()}


def span_set(gens, q, c):
    """Additive closure of the generators in ``(Z/q)^c``."""
    seen = {tuple([0] * c)}
    frontier = list(seen)
    gens = [np.asarray(g, dtype=np.int64) % q for g in gens]
    while frontier:
        nxt = []
        for v in frontier:
            for g in gens:
                w = tuple((np.array(v) + g) % q)
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return seen


def pencil_set(M, E1, E2, q):
    """All ``t`` mod ``q`` with ``M x = E1 + t E2`` solvable, by enumeration."""
    img = image_set(M, q)
    return {t for t in range(q) if tuple((np.asarray(E1) + t * np.asarray(E2)) % q) in img}


def action_poly_oracle(a, b, c, d, k, f):
    """(g . f)(x) = (a + c x)^k f((b + d x)/(a + c x)) for a polynomial ``f`` of degree <= k.

    ``f`` is a coefficient list; the result is computed by expanding each
    monomial with plain integer arithmetic.
    """
    out = [0] * (k + 1)
    for i, coeff in enumerate(f):
        if not coeff:
            continue
        # (b + d x)^i (a + c x)^(k-i)
        poly = [1]
        for _ in range(i):
            poly = _mul(poly, [b, d])
        for _ in range(k - i):
            poly = _mul(poly, [a, c])
        for j, v in enumerate(poly):
            out[j] += coeff * v
    return out


def _mul(f, g):
    out = [0] * (len(f) + len(g) - 1)
    for i, x in enumerate(f):
        for j, y in enumerate(g):
            out[i + j] += x * y
    return out


def tate_l_invariant(j_num, j_den, p, prec, terms=8):
    """log(q_E) / ord(q_E) for a curve with split multiplicative reduction at ``p``.

    The Tate parameter solves ``1/j(q) = J`` with ``1/j = Delta / E4^3`` expanded
    as an integer power series in ``q``; ``J = j_den / j_num`` has positive
    valuation so the fixed-point iteration converges.  Returns ``(L mod p^n, n)``.
    """
    from eigentangent.padic import iwasawa_log_int

    mod = p ** (prec + 8)

    def mul(a, b):
        out = [0] * terms
        for i, x in enumerate(a):
            for l, y in enumerate(b[: terms - i]):
                out[i + l] += x * y
        return out

    sig3 = lambda n: sum(d**3 for d in range(1, n + 1) if n % d == 0)
    E4 = [1] + [240 * sig3(n) for n in range(1, terms)]
    D = [1] + [0] * (terms - 1)
    for n in range(1, terms):
        f = [0] * terms
        f[0], f[n] = 1, -1
        for _ in range(24):
            D = mul(D, f)
    D = [0] + D[: terms - 1]
    E43 = mul(mul(E4, E4), E4)
    inv = [1] + [0] * (terms - 1)
    for n in range(1, terms):
        inv[n] = -sum(E43[i] * inv[n - i] for i in range(1, n + 1))
    h = mul(D, inv)
    J = j_den * pow(j_num, -1, mod) % mod
    q = J
    for _ in range(2 * prec + 4):
        q = (q + J - sum(c * pow(q, i, mod) for i, c in enumerate(h))) % mod
    v, u = 0, q
    while u % p == 0:
        u //= p
        v += 1
    n = prec
    return iwasawa_log_int(u, p, n) * pow(v, -1, p**n) % p**n, n
