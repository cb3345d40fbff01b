"""Linear algebra over Z/p^n against exhaustive enumeration."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eigentangent.zpn import (
    SparseMatrix,
    ZpnMatrix,
    howell_form,
    kernel,
    matmul_mod,
    solve,
    solve_pencil,
    sparse_from_terms,
    vvaluation,
)
from oracles import image_set, kernel_set, pencil_set, span_set

RINGS = [(3, 3), (5, 2), (3, 2), (2, 3), (7, 1)]


@st.composite
def systems(draw, max_rows=3, max_cols=3):
    p, n = draw(st.sampled_from(RINGS))
    q = p**n
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    # bias entries towards multiples of p so non-unit pivots show up
    entry = st.one_of(st.integers(0, q - 1), st.integers(0, q // p - 1).map(lambda v: p * v))
    M = np.array(draw(st.lists(st.lists(entry, min_size=c, max_size=c), min_size=r, max_size=r)),
                 dtype=np.int64)
    b = np.array(draw(st.lists(entry, min_size=r, max_size=r)), dtype=np.int64)
    b2 = np.array(draw(st.lists(entry, min_size=r, max_size=r)), dtype=np.int64)
    return p, n, M, b, b2


@settings(max_examples=150)
@given(systems())
def test_solve_matches_enumeration(sysm):
    p, n, M, b, _ = sysm
    q = p**n
    x = solve(ZpnMatrix(p, n, M), b)
    solvable = tuple(b % q) in image_set(M, q)
    assert (x is not None) == solvable
    if x is not None:
        assert not np.any((M @ np.asarray(x, dtype=np.int64) - b) % q)


@settings(max_examples=150)
@given(systems())
def test_kernel_generators_span_the_kernel(sysm):
    p, n, M, _, _ = sysm
    q = p**n
    K = kernel(ZpnMatrix(p, n, M))
    gens = [np.asarray(r, dtype=np.int64) for r in K.entries]
    for g in gens:
        assert not np.any((M @ g) % q)
    assert span_set(gens, q, M.shape[1]) == kernel_set(M, q)


@settings(max_examples=150)
@given(systems())
def test_pencil_matches_enumeration(sysm):
    p, n, M, E1, E2 = sysm
    q = p**n
    sol = solve_pencil(ZpnMatrix(p, n, M), E1, E2)
    want = pencil_set(M, E1, E2, q)
    assert {t for t in range(q) if sol.contains(t)} == want
    if sol.kind == "class":
        assert len(want) == p ** (n - sol.s)
    if sol.witness is not None and sol.kind != "empty":
        t = sol.t0
        assert not np.any((M @ np.asarray(sol.witness, dtype=np.int64) - E1 - t * E2) % q)


@settings(max_examples=100)
@given(systems(max_rows=4))
def test_howell_form_transform_and_span(sysm):
    p, n, M, b, _ = sysm
    q = p**n
    Z = ZpnMatrix(p, n, M)
    H, U = howell_form(Z)
    assert np.array_equal(np.asarray(matmul_mod(U.entries, Z.entries, q)) % q, np.asarray(H.entries) % q)
    span = span_set(list(M), q, M.shape[1])
    assert span_set(list(np.asarray(H.entries, dtype=np.int64)), q, M.shape[1]) == span
    assert Z.row_span_contains(b[: M.shape[1]] if len(b) >= M.shape[1] else np.resize(b, M.shape[1])) == \
        (tuple(np.resize(b, M.shape[1]) % q) in span)


def test_howell_example_non_unit_pivot():
    # over Z/9 the row (3, 0) has kernel generated by (3, 0) and (0, 1)
    M = ZpnMatrix(3, 2, np.array([[3, 0]]))
    K = kernel(M)
    assert span_set(list(np.asarray(K.entries, dtype=np.int64)), 9, 2) == kernel_set(np.array([[3, 0]]), 9)


def test_vvaluation():
    a = np.array([0, 1, 3, 9, 18, 81], dtype=np.int64)
    assert list(vvaluation(a, 3, 3)) == [3, 0, 1, 2, 2, 3]


def test_matmul_mod_large_modulus_object_path():
    q = 7**25
    a = np.array([[q - 1, 2]], dtype=object)
    b = np.array([[q - 1], [3]], dtype=object)
    assert matmul_mod(a, b, q)[0, 0] == (1 + 6) % q


@pytest.mark.parametrize("seed", range(5))
def test_sparse_elimination_with_planted_solution(seed):
    """Above the sparse threshold the unit-pivot elimination path is used."""
    rng = np.random.default_rng(seed)
    p, n, ncols, nrows = 3, 4, 90, 70
    q = p**n
    triples = []
    for i in range(nrows):
        for j in rng.choice(ncols, size=4, replace=False):
            triples.append((i, int(j), int(rng.integers(0, q))))
    S = sparse_from_terms(triples, nrows, ncols, p, n)
    x0 = rng.integers(0, q, size=ncols)
    b = S.apply(x0)
    x = solve(S, b)
    assert x is not None
    assert not np.any((S.apply(x) - b) % q)
    assert np.array_equal(S.dense() @ np.asarray(x, dtype=object) % q, np.asarray(b, dtype=object) % q)


def test_sparse_pencil_planted_class():
    rng = np.random.default_rng(7)
    p, n, ncols, nrows = 5, 3, 80, 60
    q = p**n
    triples = [(i, int(j), int(rng.integers(0, q))) for i in range(nrows)
               for j in rng.choice(ncols, size=3, replace=False)]
    S = sparse_from_terms(triples, nrows, ncols, p, n)
    E2 = rng.integers(0, q, size=nrows)
    t_true = 17
    E1 = (S.apply(rng.integers(0, q, size=ncols)) - t_true * E2) % q
    sol = solve_pencil(S, E1, E2)
    assert sol.contains(t_true)


def test_empty_sparse_matrix():
    S = SparseMatrix(3, 2, 2, [])
    assert S.dense().shape == (0, 2)
