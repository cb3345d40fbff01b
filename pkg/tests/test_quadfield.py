"""Arithmetic in the Euclidean imaginary quadratic fields and P^1 over residue rings."""

import pytest
from hypothesis import given, strategies as st

from eigentangent.quadfield import (
    EUCLIDEAN,
    P1Quad,
    QuadField,
    ResidueRing,
    UnsupportedFieldError,
    factor_ideal,
    ideal_index,
    power,
    primes_above,
)

fields = st.sampled_from(EUCLIDEAN).map(QuadField)
small = st.integers(-30, 30)
elts = st.tuples(small, small)
nonzero = elts.filter(lambda a: a != (0, 0))


def test_unsupported_field():
    with pytest.raises(UnsupportedFieldError):
        QuadField(-5)


@given(fields, elts, elts)
def test_multiplication_matches_complex_embedding(K, a, b):
    z = K.complex(K.mul(a, b))
    assert abs(z - K.complex(a) * K.complex(b)) < 1e-6
    assert K.norm(K.mul(a, b)) == K.norm(a) * K.norm(b)
    assert abs(K.norm(a) - abs(K.complex(a)) ** 2) < 1e-6


@given(fields, elts, nonzero)
def test_euclidean_division(K, a, b):
    q, r = K.divmod(a, b)
    assert K.add(K.mul(q, b), r) == a
    assert K.norm(r) < K.norm(b)


@given(fields, nonzero, nonzero)
def test_xgcd(K, a, b):
    g, x, y = K.xgcd(a, b)
    assert K.add(K.mul(x, a), K.mul(y, b)) == g
    assert K.divides(g, a) and K.divides(g, b)


@given(fields, nonzero)
def test_canonical_generator_is_unit_invariant(K, a):
    c = K.canonical_generator(a)
    for u in K.units:
        assert K.canonical_generator(K.mul(u, a)) == c
    assert K.norm(c) == K.norm(a)


@given(fields, elts)
def test_format_parse_roundtrip(K, a):
    assert K.parse(K.format(a)) == a


def test_parse_sqrt_forms():
    K = QuadField(-11)
    assert K.parse("sqrt(-11)") == (-1, 2)
    assert K.parse("(1+sqrt(-11))/2") == (0, 1)
    assert K.parse("(9+5*sqrt(-11))/2") == (2, 5)
    assert K.norm(K.parse("9+sqrt(-11)")) == 92
    K3 = QuadField(-3)
    assert K3.norm(K3.parse("(17+sqrt(-3))/2")) == 73


def test_units():
    assert len(QuadField(-1).units) == 4
    assert len(QuadField(-3).units) == 6
    assert all(QuadField(-3).is_unit(u) for u in QuadField(-3).units)


@pytest.mark.parametrize("d", EUCLIDEAN)
def test_primes_above(d):
    K = QuadField(d)
    disc = d if d % 4 == 1 else 4 * d
    for q in [2, 3, 5, 7, 11, 13, 101]:
        ps = primes_above(d, q)
        assert all(K.divides(pi, (q, 0)) for pi in ps)
        if disc % q == 0:
            kind = "ramified"
        elif q == 2:
            kind = "split" if d % 8 == 1 else "inert"
        else:
            kind = "split" if pow(d % q, (q - 1) // 2, q) == 1 else "inert"
        norms = sorted(K.norm(pi) for pi in ps)
        assert norms == {"ramified": [q], "split": [q, q], "inert": [q * q]}[kind]


@given(fields, nonzero.filter(lambda a: abs(a[0]) + abs(a[1]) > 1))
def test_factor_ideal_reconstructs(K, a):
    acc = (1, 0)
    for pi, e in factor_ideal(K, a):
        acc = K.mul(acc, power(K, pi, e))
    assert K.canonical_generator(acc) == K.canonical_generator(a) or K.is_unit(a)


def _brute_p1_count(K, N):
    R = ResidueRing(K, N)
    els = list(R.elements())
    unit = lambda a, b: K.is_unit(K.xgcd(K.xgcd(a, b)[0], N)[0]) if a != (0, 0) or b != (0, 0) else K.is_unit(N)
    nunits = sum(1 for a in els if unit(a, (0, 0)))
    pairs = sum(1 for c in els for d in els if unit(c, d))
    return pairs // nunits


@pytest.mark.parametrize("d,level", [(-11, "9+sqrt(-11)"), (-11, "6-sqrt(-11)"), (-11, "(9+5*sqrt(-11))/2"),
                                     (-3, "(17+sqrt(-3))/2"), (-1, "3"), (-2, "2+w")])
def test_p1_size_matches_index_and_enumeration(d, level):
    K = QuadField(d)
    N = K.parse(level)
    P = P1Quad(K, N)
    assert len(P) == ideal_index(K, N) == _brute_p1_count(K, N)


@pytest.mark.parametrize("d,level", [(-11, "9+sqrt(-11)"), (-3, "(17+sqrt(-3))/2"), (-7, "4")])
def test_p1_lifts_and_unit_scaling(d, level):
    K = QuadField(d)
    N = K.parse(level)
    P = P1Quad(K, N)
    for i in range(len(P)):
        a, b, c, dd = P.lift(i)
        assert K.sub(K.mul(a, dd), K.mul(b, c)) == (1, 0)
        assert P.index(c, dd) == i
        for u in K.units:
            assert P.index(K.mul(u, c), K.mul(u, dd)) == i


def test_residue_ring_size():
    K = QuadField(-11)
    g = K.parse("9+sqrt(-11)")
    assert len(list(ResidueRing(K, g).elements())) == 92
