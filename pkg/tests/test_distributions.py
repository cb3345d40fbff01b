"""Moment actions, filtration compatibility and certified precision of log-twisted errors."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eigentangent.distributions import (
    FinApproxDist,
    FinApproxDist2,
    PolyDual,
    Sigma0Element,
    act_dist,
    act_dist2,
    action_matrices,
    epsilon_error,
    filtration_moduli,
    log_precision,
    specialize,
)
from eigentangent.padic import PadicError, iwasawa_log_int
from oracles import action_poly_oracle

PRIMES = [3, 5, 7]


@st.composite
def sigma0(draw, p=None):
    p = p or draw(st.sampled_from(PRIMES))
    a = draw(st.integers(-50, 50).filter(lambda v: v % p != 0))
    b = draw(st.integers(-50, 50))
    c = p * draw(st.integers(-20, 20))
    d = draw(st.integers(-50, 50))
    if a * d - b * c == 0:
        d += 1
    if a * d - b * c == 0:
        d += 1
    return Sigma0Element(a, b, c, d, p)


def _series_oracle(a, b, c, d, k, j, N):
    """Power series (a + c x)^k ((b + d x)/(a + c x))^j to N terms, exact rationals."""
    def mul(f, g):
        out = [Fraction(0)] * N
        for i, x in enumerate(f):
            if x:
                for l, y in enumerate(g[: N - i]):
                    out[i + l] += x * y
        return out

    inv = [Fraction((-c) ** i, a ** (i + 1)) for i in range(N)]
    S = [Fraction(1)] + [Fraction(0)] * (N - 1)
    for _ in range(k):
        S = mul(S, [Fraction(a), Fraction(c)] + [Fraction(0)] * (N - 2))
    ratio = mul([Fraction(b), Fraction(d)] + [Fraction(0)] * (N - 2), inv)
    for _ in range(j):
        S = mul(S, ratio)
    return S


def _mod(fr, q):
    return fr.numerator * pow(fr.denominator, -1, q) % q


def test_sigma0_validation():
    with pytest.raises(PadicError):
        Sigma0Element(3, 0, 0, 1, 3)
    with pytest.raises(PadicError):
        Sigma0Element(1, 0, 1, 1, 3)
    with pytest.raises(PadicError):
        Sigma0Element(1, 1, 3, 3, 3)


@given(st.integers(-9, 9), st.integers(-9, 9), st.integers(-9, 9), st.integers(-9, 9), st.integers(0, 4))
def test_polynomial_action_matches_expansion(a, b, c, d, k):
    q = 10**9
    A = action_matrices([a], [b], [c], [d], k, k + 1, q, series=False)[0]
    for j in range(k + 1):
        e = [0] * (k + 1)
        e[j] = 1
        want = action_poly_oracle(a, b, c, d, k, e)
        assert [int(v) for v in A[j]] == [w % q for w in want]


@settings(max_examples=60)
@given(sigma0(), st.integers(0, 3), st.integers(4, 9))
def test_series_action_matches_rational_expansion(g, k, N):
    q = g.p**N
    A = action_matrices([g.a], [g.b], [g.c], [g.d], k, N, q)[0]
    for j in range(N):
        want = _series_oracle(g.a, g.b, g.c, g.d, k, j, N)
        assert [int(v) for v in A[j]] == [_mod(w, q) for w in want]


@settings(max_examples=60)
@given(st.data())
def test_right_action_composes(data):
    p = data.draw(st.sampled_from(PRIMES))
    g, h = data.draw(sigma0(p)), data.draw(sigma0(p))
    k = data.draw(st.integers(0, 3))
    N = data.draw(st.integers(k + 2, 9))
    mu = FinApproxDist(p, k, N, data.draw(st.lists(st.integers(0, p**N), min_size=N, max_size=N)))
    assert act_dist(h, act_dist(g, mu)) == act_dist(g @ h, mu)


@settings(max_examples=40)
@given(st.data())
def test_two_variable_action_composes(data):
    p = data.draw(st.sampled_from(PRIMES))
    g1, g2, h1, h2 = (data.draw(sigma0(p)) for _ in range(4))
    k = data.draw(st.integers(0, 2))
    N = data.draw(st.integers(2 * k + 2, 7))
    m = np.array(data.draw(st.lists(st.integers(0, p**N), min_size=N * N, max_size=N * N)), dtype=object)
    mu = FinApproxDist2(p, k, N, m)
    assert act_dist2((h1, h2), act_dist2((g1, g2), mu)) == act_dist2((g1 @ h1, g2 @ h2), mu)


def test_filtration_moduli_shapes():
    m1 = filtration_moduli(3, 4)
    assert list(m1) == [81, 27, 9, 3]
    m2 = filtration_moduli(3, 3, twovar=True)
    assert m2[0, 0] == 27 and m2[1, 1] == 3 and m2[2, 2] == 1


def test_specialize_keeps_low_moments():
    mu = FinApproxDist(5, 2, 6, [1, 2, 3, 4, 5, 6])
    P = specialize(mu)
    assert P.n == 4 and list(P.values) == [1, 2, 3]
    with pytest.raises(PadicError):
        specialize(FinApproxDist(5, 2, 2, [1, 2]))


@settings(max_examples=60)
@given(st.data())
def test_specialization_is_equivariant(data):
    """specialize(mu | g) = specialize(mu) | g, the classical polynomial action."""
    p = data.draw(st.sampled_from(PRIMES))
    g = data.draw(sigma0(p))
    k = data.draw(st.integers(0, 3))
    N = data.draw(st.integers(k + 2, 9))
    mu = FinApproxDist(p, k, N, data.draw(st.lists(st.integers(0, p**N), min_size=N, max_size=N)))
    assert specialize(act_dist(g, mu)) == specialize(mu).act(g)


def _log_epsilon_oracle(g, k, m, p, prec):
    """Sum_i coeff_i(log(a + c x) (a + c x)^(k-j) (b + d x)^j) m_i with exact rational series."""
    a, b, c, d = g.entries
    n = len(m)
    Q = p**prec
    logc = [Fraction(iwasawa_log_int(a, p, prec + 4))] + [
        Fraction((-1) ** (i + 1) * c**i, i * a**i) for i in range(1, n)]
    out = []
    for j in range(k + 1):
        S = _series_oracle(a, b, c, d, k, j, n)
        prod = [sum((S[i] * logc[l - i] for i in range(l + 1)), Fraction(0)) for l in range(n)]
        out.append(sum((_mod(x, p ** (prec + 30)) * int(mi) for x, mi in zip(prod, m)), 0) % Q)
    return out


@settings(max_examples=40)
@given(st.data())
def test_epsilon_error_matches_series_oracle(data):
    p = data.draw(st.sampled_from(PRIMES))
    g = data.draw(sigma0(p))
    k = data.draw(st.integers(0, 2))
    N = data.draw(st.integers(k + 3, 8))
    mu = FinApproxDist(p, k, N, data.draw(st.lists(st.integers(0, p**N), min_size=N, max_size=N)))
    E = epsilon_error(g, mu)
    assert E.n == log_precision(p, N, k)
    want = _log_epsilon_oracle(g, k, mu.moments, p, E.n)
    assert [int(v) for v in E.values] == want


def _lift(mu_small, N2, rng):
    """A deeper representative of the same distribution: perturb inside the filtration, add moments."""
    p, N = mu_small.p, mu_small.N
    m = [int(v) + p ** max(N - j, 0) * int(rng.integers(0, p**N)) for j, v in enumerate(mu_small.moments)]
    m += [int(rng.integers(0, p**N2)) for _ in range(N2 - N)]
    return FinApproxDist(p, mu_small.k, N2, m)


def _lift2(mu_small, N2, rng):
    p, N = mu_small.p, mu_small.N
    m = np.zeros((N2, N2), dtype=object)
    for i in range(N2):
        for j in range(N2):
            if i < N and j < N:
                m[i, j] = int(mu_small.moments[i, j]) + p ** max(N - i - j, 0) * int(rng.integers(0, p**N))
            else:
                m[i, j] = int(rng.integers(0, p**N2))
    return FinApproxDist2(p, mu_small.k, N2, m)


@settings(max_examples=50)
@given(st.data(), st.integers(0, 2**32 - 1))
def test_certified_precision_is_honest_one_variable(data, seed):
    rng = np.random.default_rng(seed)
    p = data.draw(st.sampled_from(PRIMES))
    g = data.draw(sigma0(p))
    k = data.draw(st.integers(0, 2))
    N = data.draw(st.integers(k + 3, 8))
    mu = FinApproxDist(p, k, N, [int(v) for v in rng.integers(0, p**N, size=N)])
    big = _lift(mu, N + 5, rng)
    E, Eb = epsilon_error(g, mu), epsilon_error(g, big)
    assert E == Eb
    # the plain action is exact in the filtration
    assert act_dist(g, mu) == FinApproxDist(p, k, N, act_dist(g, big).moments[:N])


@settings(max_examples=25)
@given(st.data(), st.integers(0, 2**32 - 1))
def test_certified_precision_is_honest_two_variable(data, seed):
    rng = np.random.default_rng(seed)
    p = data.draw(st.sampled_from(PRIMES))
    g1, g2 = data.draw(sigma0(p)), data.draw(sigma0(p))
    N = data.draw(st.integers(3, 6))
    mu = FinApproxDist2(p, 0, N, rng.integers(0, p**N, size=N * N).astype(object))
    big = _lift2(mu, N + 4, rng)
    for direction in [(1, 0), (0, 1), (1, 1)]:
        assert epsilon_error((g1, g2), mu, direction) == epsilon_error((g1, g2), big, direction)


@given(st.data())
def test_epsilon_error_linear_in_direction(data):
    p = data.draw(st.sampled_from(PRIMES))
    g = (data.draw(sigma0(p)), data.draw(sigma0(p)))
    t1, t2 = data.draw(st.integers(-5, 5)), data.draw(st.integers(-5, 5))
    N = 5
    mu = FinApproxDist2(p, 0, N, np.array(data.draw(st.lists(st.integers(0, p**N), min_size=N * N,
                                                             max_size=N * N)), dtype=object))
    E = epsilon_error(g, mu, (t1, t2))
    combo = epsilon_error(g, mu, (1, 0)).scale(t1) + epsilon_error(g, mu, (0, 1)).scale(t2)
    assert E == combo


def test_log_precision_grows_with_depth():
    precs = [log_precision(5, N, 0) for N in range(3, 12)]
    assert precs == sorted(precs) and precs[-1] > precs[0]
    assert log_precision(3, 8, 0, twovar=True) <= log_precision(3, 8, 0)


def test_polydual_equality_uses_common_precision():
    a = PolyDual(3, 2, 1, np.array([1, 2], dtype=object))
    b = PolyDual(3, 4, 1, np.array([10, 11], dtype=object))
    assert a == b
