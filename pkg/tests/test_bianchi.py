"""Bianchi modular symbols: presentation, path reduction, Hecke operators, eigensymbols."""

import random

import pytest

from eigentangent import bianchi, pipeline, ratlinalg
from eigentangent.bianchi import (
    SplitEmbedding,
    act_cusp,
    build_bianchi_presentation,
    canonical_cusp,
    hecke_terms_bianchi,
    load_templates,
    path_divisor,
    qdet,
    reduce_path_bianchi,
    symbol_space_dimension,
    term_divisor,
)
from eigentangent.elliptic import IdentificationError
from eigentangent.padic import PadicError
from eigentangent.quadfield import EUCLIDEAN, QuadField, ideal_index, primes_above

from conftest import BIANCHI_ROWS

FIG_LEVELS = [(d, level) for d, level, _, _, _ in BIANCHI_ROWS]
TELESCOPE_LEVEL = (3, 1)  # norms 10, 11, 13, 14, 15 across the five fields


def random_cusp(K, rng, size=12):
    while True:
        den = (rng.randint(-size, size), rng.randint(-size, size))
        if den != (0, 0):
            return ((rng.randint(-size, size), rng.randint(-size, size)), den)


def random_paths(K, n, seed):
    rng = random.Random(seed)
    return [(random_cusp(K, rng), random_cusp(K, rng)) for _ in range(n)]


def telescoping_failures(pres, paths):
    bad = 0
    for a, b in paths:
        if term_divisor(pres, reduce_path_bianchi(pres, a, b)) != path_divisor(pres.K, a, b):
            bad += 1
    return bad


@pytest.fixture(scope="module")
def fig_presentations():
    out = {}
    for d, level in FIG_LEVELS:
        K = QuadField(d)
        out[(d, level)] = build_bianchi_presentation(K, K.parse(level))
    return out


@pytest.mark.parametrize("d,level", FIG_LEVELS)
def test_generator_count_matches_index(fig_presentations, d, level):
    pres = fig_presentations[(d, level)]
    assert pres.ngens == ideal_index(pres.K, pres.level)


@pytest.mark.parametrize("d", EUCLIDEAN)
def test_cycle_templates_are_closed_unimodular_cycles(d):
    K = QuadField(d)
    temps = load_templates(d)
    assert temps
    for t in temps:
        div = {}
        for g in t:
            assert K.is_unit(qdet(K, g))
            for cusp, s in ((act_cusp(K, g, bianchi.INF), 1), (act_cusp(K, g, (bianchi.ZERO, bianchi.ONE)), -1)):
                div[cusp] = div.get(cusp, 0) + s
        assert not any(div.values())


@pytest.mark.parametrize("d", EUCLIDEAN)
def test_level_one_has_no_symbols(d):
    K = QuadField(d)
    assert symbol_space_dimension(build_bianchi_presentation(K, (1, 0))) == 0


@pytest.mark.parametrize("d", EUCLIDEAN)
def test_small_prime_levels_only_eisenstein(d):
    """Prime levels of small norm carry no cusp forms: one boundary class (two cusps)."""
    K = QuadField(d)
    for q in [2, 3, 5, 7]:
        for pi in primes_above(d, q):
            if K.norm(pi) <= 50:
                assert symbol_space_dimension(build_bianchi_presentation(K, pi)) == 1


@pytest.mark.parametrize("d,level", [(-1, "11"), (-3, "11"), (-11, "sqrt(-11)")])
def test_base_change_of_11a_appears(d, level):
    """The base change of the level-11 elliptic curve adds one cuspidal class."""
    K = QuadField(d)
    assert symbol_space_dimension(build_bianchi_presentation(K, K.parse(level))) == 2


@pytest.mark.parametrize("d", EUCLIDEAN)
def test_path_reduction_telescopes(d):
    K = QuadField(d)
    pres = build_bianchi_presentation(K, TELESCOPE_LEVEL)
    assert telescoping_failures(pres, random_paths(K, 60, seed=d)) == 0


def test_canonical_cusp_unit_invariant():
    K = QuadField(-3)
    rng = random.Random(1)
    for _ in range(50):
        num, den = random_cusp(K, rng)
        c = canonical_cusp(K, (num, den))
        for u in K.units:
            assert canonical_cusp(K, (K.mul(u, num), K.mul(u, den))) == c


def _hecke_on_basis(pres, pi, basis):
    terms = hecke_terms_bianchi(pres, pi)
    return [bianchi.apply_terms_trivial(terms, v) for v in basis]


def _symbol_basis(pres):
    n = pres.ngens
    rows = bianchi.relation_rows_bianchi(pres)
    return ratlinalg.kernel([[r.get(c, 0) for c in range(n)] for r in rows], n)


@pytest.mark.parametrize("d,level", FIG_LEVELS)
def test_hecke_commutes(fig_presentations, d, level):
    pres = fig_presentations[(d, level)]
    K = pres.K
    basis = _symbol_basis(pres)
    primes = [pi for q in (2, 3, 5, 7) for pi in primes_above(d, q) if not K.divides(pi, pres.level)]
    pairs = list(zip(primes, primes[1:]))[:3]
    assert len(pairs) == 3
    for a, b in pairs:
        ab = _hecke_on_basis(pres, b, _hecke_on_basis(pres, a, basis))
        ba = _hecke_on_basis(pres, a, _hecke_on_basis(pres, b, basis))
        assert ab == ba


def test_hecke_independent_of_generator(fig_presentations):
    pres = fig_presentations[FIG_LEVELS[0]]
    K = pres.K
    basis = _symbol_basis(pres)
    pi = primes_above(K.d, 3)[0]
    assert _hecke_on_basis(pres, pi, basis) == _hecke_on_basis(pres, K.neg(pi), basis)


@pytest.mark.parametrize("d,level", FIG_LEVELS)
def test_shipped_eigen_data_identifies_one_symbol(entries, fig_presentations, d, level):
    pres = fig_presentations[(d, level)]
    K = pres.K
    data = pipeline.find_bianchi(entries, d, pres.level)
    ev = bianchi.eigenvalue_map(K, data.eigenvalues)
    for pi, a in ev.items():
        assert abs(a) <= 2 * K.norm(pi) ** 0.5  # Ramanujan bound
    good = {g: a for g, a in ev.items() if not K.divides(g, pres.level)}
    sym = bianchi.bianchi_eigensymbol_exact(pres, good)
    assert sym.satisfies_relations()
    for pi, a in good.items():
        assert bianchi.hecke_bianchi(pres, sym.values, pi) == [a * v for v in sym.values]


def test_wrong_eigenvalue_rejected(fig_presentations):
    pres = fig_presentations[FIG_LEVELS[0]]
    K = pres.K
    pi = primes_above(K.d, 3)[0]
    with pytest.raises(IdentificationError):
        bianchi.bianchi_eigensymbol_exact(pres, {pi: 3})


def test_base_change_eigenvalues_match_elliptic(entries):
    """a(pi) = a_q for split q, a((q)) = a_q^2 - 2q for inert q (base change of 11a)."""
    K = QuadField(-11)
    bc = pipeline.find_bianchi(entries, -11, K.parse("sqrt(-11)"))
    ell = pipeline.find_elliptic(entries, "11.2.a.a")
    ev = bianchi.eigenvalue_map(K, bc.eigenvalues)
    checked = 0
    for pi, a in ev.items():
        nm = K.norm(pi)
        q = next(f for f in range(2, nm + 1) if nm % f == 0)
        if str(q) not in ell.eigenvalues or q == 11:
            continue
        if nm == q:  # split
            assert a == ell.eigenvalue(q)
        else:  # inert, norm q^2
            assert nm == q * q and a == ell.eigenvalue(q) ** 2 - 2 * q
        checked += 1
    assert checked >= 4


@pytest.mark.parametrize("d,pi_text", [(-11, "w"), (-11, "(3+sqrt(-11))/2"), (-3, "(5+sqrt(-3))/2")])
def test_split_embedding(d, pi_text):
    K = QuadField(d)
    pi = K.parse(pi_text)
    n = 6
    emb = SplitEmbedding.make(K, pi, n)
    p, q = emb.p, emb.p**n
    assert emb(pi) % p == 0 and emb.conj(pi) % p != 0
    rng = random.Random(0)
    for _ in range(50):
        a = (rng.randint(-99, 99), rng.randint(-99, 99))
        b = (rng.randint(-99, 99), rng.randint(-99, 99))
        assert emb(K.mul(a, b)) == emb(a) * emb(b) % q
        assert emb(K.add(a, b)) == (emb(a) + emb(b)) % q
        assert emb(a) * emb.conj(a) % q == K.norm(a) % q


def test_split_embedding_rejects_inert():
    K = QuadField(-11)
    with pytest.raises(PadicError):
        SplitEmbedding.make(K, (2, 0), 4)


def test_stabilized_symbol_is_up_eigen(entries):
    K = QuadField(-11)
    data = pipeline.find_bianchi(entries, -11, K.parse("sqrt(-11)"))
    pres = build_bianchi_presentation(K, data.level)
    sym = bianchi.bianchi_eigensymbol(pres, bianchi.eigenvalue_map(K, data.eigenvalues), (0, 1), 6)
    assert K.norm(sym.pres.level) == 11 * 9
    q = 3**6
    vals = sym.values
    for prime, lam in ((sym.pi, sym.alpha), (K.conj(sym.pi), sym.alpha_bar)):
        out = bianchi.apply_terms_trivial(hecke_terms_bianchi(sym.pres, prime), vals)
        assert all((o - lam * v) % q == 0 for o, v in zip(out, vals))
        # unit root of X^2 - a X + 3 with a = -1
        assert (lam * lam + lam + 3) % q == 0
    assert any(v % 3 for v in vals)


def test_ideal_labels():
    K = QuadField(-3)
    g = K.parse("(17+sqrt(-3))/2")
    lab = bianchi.ideal_label(K, g)
    assert lab.startswith("73.")
    assert bianchi.parse_ideal_label(K, lab) == K.canonical_generator(g)
    with pytest.raises(ValueError):
        bianchi.parse_ideal_label(K, "7." + lab.split(".", 1)[1])


def test_zero_level_rejected():
    with pytest.raises(ValueError):
        build_bianchi_presentation(QuadField(-1), (0, 0))
