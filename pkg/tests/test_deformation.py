"""Overconvergent lifts, deformed eigen-systems and deformation directions."""

import numpy as np
import pytest

from eigentangent import elliptic, pipeline
from eigentangent.deformation import (
    CriticalSlopeError,
    OverconvergentSymbol,
    deformation_direction,
    deformed_eigensystem,
    eigen_identity_residual,
    l_invariant,
    lift_overconvergent,
    relation_errors,
)
from eigentangent.distributions import reduce_filtration
from eigentangent.operators import TermOperator
from eigentangent.padic import PadicNumber, parse, render
from oracles import tate_l_invariant


def _setup(entries, label, p, N):
    data = pipeline.find_elliptic(entries, label)
    ps = elliptic.eigensymbol(data, p, N + 2)
    U = TermOperator.from_terms(elliptic.hecke_terms(ps.pres, p))
    rel = TermOperator.from_terms(ps.pres.relations)
    return data, ps, U, rel


@pytest.fixture(scope="module")
def eleven(entries):
    N = 9
    data, ps, U, rel = _setup(entries, "11.2.a.a", 11, N)
    Phi = lift_overconvergent([U], ps.values, ps.up_eigenvalue, 11, 0, N)
    return data, ps, U, rel, Phi


def test_lift_is_fixed_point_and_specializes(eleven):
    _, ps, U, rel, Phi = eleven
    p, N = 11, Phi.N
    q = p**N
    UPhi = reduce_filtration(U.apply(Phi.values, 0, N, p), p, N)
    assert np.array_equal(UPhi % q, reduce_filtration(Phi.values * ps.up_eigenvalue % q, p, N))
    assert not np.any((Phi.specialize() - np.asarray(ps.values, dtype=object)[:, :1]) % p**(N - 0))
    # relations hold on the overconvergent symbol
    assert not np.any(reduce_filtration(rel.apply(Phi.values, 0, N, p), p, N))


def test_lift_independent_of_start(eleven):
    _, ps, U, _, Phi = eleven
    rng = np.random.default_rng(3)
    start = rng.integers(0, 11**Phi.N, size=Phi.values.shape)
    other = lift_overconvergent([U], ps.values, ps.up_eigenvalue, 11, 0, Phi.N, start=start)
    assert np.array_equal(other.values, Phi.values)


def test_lift_cache_roundtrip(eleven, tmp_path):
    _, ps, U, _, Phi = eleven
    key = {"kind": "test"}
    a = lift_overconvergent([U], ps.values, ps.up_eigenvalue, 11, 0, Phi.N, cache_dir=str(tmp_path), cache_key=key)
    assert list(tmp_path.iterdir())
    b = lift_overconvergent([U], ps.values, ps.up_eigenvalue, 11, 0, Phi.N, cache_dir=str(tmp_path), cache_key=key)
    assert b.iterations == 0 and np.array_equal(a.values, b.values)


def test_non_ordinary_lift_rejected(eleven):
    _, ps, U, _, _ = eleven
    with pytest.raises(CriticalSlopeError):
        lift_overconvergent([U], ps.values, 11, 11, 0, 6)


def test_relation_error_precision(eleven):
    _, _, _, rel, Phi = eleven
    E, m = relation_errors(rel, Phi)
    assert m >= 8 and E.shape[0] == rel.nout == 3 * 12


@pytest.fixture(scope="module")
def eleven_result(eleven):
    _, ps, U, rel, Phi = eleven
    hops = {"U_11": U, "T_2": TermOperator.from_terms(elliptic.hecke_terms(ps.pres, 2))}
    ev = {"U_11": ps.up_eigenvalue, "T_2": ps.eigenvalues[2]}
    return deformed_eigensystem(rel, hops, ev, Phi), hops, ev


def test_eigen_identity_residual_vanishes(eleven, eleven_result):
    *_, Phi = eleven
    res, hops, ev = eleven_result
    for lab, op in hops.items():
        a1 = res.derived_eigenvalues[lab]
        m = int(a1.precision)
        assert not np.any(eigen_identity_residual(op, ev[lab], a1.residue(m), res.epsilon_part, Phi, m))


def test_a_p_prime_matches_tate_parameter(eleven_result):
    """-2 a_p' equals log(q_E)/ord(q_E) for 11a, with q_E from j = -2^12 31^3 / 11^5."""
    res, _, _ = eleven_result
    ap = res.derived_eigenvalues["U_11"]
    m = int(ap.precision)
    L, n = tate_l_invariant(-122023936, 161051, 11, m)
    assert (-2 * ap.residue(m) - L) % 11**min(m, n) == 0


@pytest.mark.parametrize("trial", range(5))
def test_shifting_psi_by_phi_keeps_identity(eleven, eleven_result, trial):
    *_, Phi = eleven
    res, hops, ev = eleven_result
    rng = np.random.default_rng(trial)
    c = int(rng.integers(1, 11**6))
    for lab, op in hops.items():
        a1 = res.derived_eigenvalues[lab]
        m = int(a1.precision)
        psi = (res.epsilon_part + c * Phi.specialize()) % 11**m
        assert not np.any(eigen_identity_residual(op, ev[lab], a1.residue(m), psi, Phi, m))


def test_unit_rescaling_leaves_derivatives(eleven, eleven_result):
    _, ps, U, rel, Phi = eleven
    res, hops, ev = eleven_result
    u = 1 + 3 * 11
    scaled = OverconvergentSymbol(11, 0, Phi.N, reduce_filtration(Phi.values * u % 11**Phi.N, 11, Phi.N))
    res2 = deformed_eigensystem(rel, hops, ev, scaled)
    for lab in hops:
        assert res2.derived_eigenvalues[lab] == res.derived_eigenvalues[lab]


def test_l_invariant_formula():
    ap = parse("4*5 + 2*5^3 + O(5^5)")
    L = l_invariant(ap, 0, 5)
    assert L == ap * PadicNumber.from_int(-2, 5, 6)
    # weight 4: divide by p
    L4 = l_invariant(parse("2*3 + 2*3^2 + O(3^5)"), 2, 3)
    assert render(L4) == render(parse("2*3 + 2*3^2 + O(3^5)").shift(-1) * PadicNumber.from_int(-2, 3, 6))
    with pytest.raises(ValueError):
        l_invariant(ap, 1, 5)


def test_direction_needs_two_variables(eleven):
    _, _, _, rel, Phi = eleven
    with pytest.raises(ValueError):
        deformation_direction(rel, Phi)


def test_base_change_direction_is_parallel(runs):
    """Base change of 11a to Q(sqrt(-11)) deforms along (1, 1)."""
    run = runs.bianchi_at(-11, "sqrt(-11)", "w", 4, depth=8)
    assert run.result.solvable == "class"
    t = run.t
    assert t.precision >= 4 and t.residue(4) == 1
    assert run.result.extra["probe_linear"]
