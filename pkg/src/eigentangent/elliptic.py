"""Modular symbols for Gamma0(M) in SL2(Z).

Symbols are determined by their values on the Manin generators
``r_i {0, oo}``, one per point of ``P^1(Z/M)``, with ``r_i`` a fixed coset
representative.  Everything linear (relations, Hecke operators, the
plus-involution) is stored as a *term list*: for each output slot a list of
``(generator j, integer matrix m, sign)`` meaning ``sum sign * (v_j | m)``
under the right action on the coefficient module.  The same term lists
drive classical (exact) computations and the distribution-valued lift.

Equivariance is ``phi(g D) = phi(D) | g^-1`` and the Hecke action is
``(phi | beta)(D) = phi(beta D) | beta``.  Paths ``{a, b}`` are divisors
``[b] - [a]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

import numpy as np

from . import ratlinalg
from .padic import NonOrdinaryError, PadicError, PadicNumber, hensel_quadratic_unit_root

Mat = tuple[int, int, int, int]
IDENTITY: Mat = (1, 0, 0, 1)
S_MAT: Mat = (0, -1, 1, 0)
TAU_MAT: Mat = (0, -1, 1, -1)
MINUS_I: Mat = (-1, 0, 0, -1)
IOTA: Mat = (-1, 0, 0, 1)


class IdentificationError(PadicError):
    """Eigen-data does not single out a unique eigensymbol."""


def mat_mul(x, y):
    a, b, c, d = x
    e, f, g, h = y
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def mat_adj(x):
    """Adjugate; the inverse for determinant one."""
    a, b, c, d = x
    return (d, -b, -c, a)


def mat_det(x):
    return x[0] * x[3] - x[1] * x[2]


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        qt, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - qt * x1
        y0, y1 = y1, y0 - qt * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def prime_factors(n: int) -> list[int]:
    out, f = [], 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def index_gamma0(M: int) -> int:
    """``[SL2(Z) : Gamma0(M)] = M prod (1 + 1/q)``."""
    out = Fraction(M)
    for q in prime_factors(M):
        out *= Fraction(q + 1, q)
    return int(out)


class P1List:
    """The projective line over ``Z/M`` with canonical labels."""

    def __init__(self, M: int):
        self.M = M
        units = [u for u in range(M) if gcd(u, M) == 1] if M > 1 else [0]
        canon: dict[tuple[int, int], tuple[int, int]] = {}
        for c in range(M):
            for d in range(M):
                if gcd(gcd(c, d), M) != 1:
                    continue
                if (c, d) in canon:
                    continue
                orbit = {((u * c) % M, (u * d) % M) for u in units}
                rep = min(orbit)
                for o in orbit:
                    canon[o] = rep
        if M == 1:
            canon = {(0, 0): (0, 0)}
        self.elements = sorted(set(canon.values()))
        pos = {e: i for i, e in enumerate(self.elements)}
        self._index = {k: pos[v] for k, v in canon.items()}

    def __len__(self):
        return len(self.elements)

    def index(self, c: int, d: int) -> int:
        return self._index[(c % self.M, d % self.M)] if self.M > 1 else 0

    def lift(self, i: int) -> Mat:
        """An SL2(Z) matrix whose bottom row reduces to label ``i``."""
        M = self.M
        c, d = self.elements[i]
        if M == 1 or (c % M, d % M) == (0, 1 % M):
            return IDENTITY
        C = c if c else M
        D = d
        while gcd(C, D) != 1:
            D += M
        _, x, y = xgcd(D, C)
        return (x, -y, C, D)


def _cusp(x) -> tuple[int, int]:
    """Normalize a cusp to a coprime pair ``(num, den)`` with ``den >= 0``."""
    if x is None:
        return (1, 0)
    if isinstance(x, tuple):
        n, d = x
    else:
        fr = Fraction(x)
        n, d = fr.numerator, fr.denominator
    g = gcd(n, d)
    n, d = n // g, d // g
    if d < 0 or (d == 0 and n < 0):
        n, d = -n, -d
    return (n, d)


def unimodular_pieces(num: int, den: int) -> list[Mat]:
    """SL2(Z) matrices ``g_i`` with ``sum g_i {0, oo} = {oo, num/den}``.

    Built from the convergents of the continued fraction of ``num/den``.
    """
    num, den = _cusp((num, den))
    if den == 0:
        return []
    pieces = []
    p_prev, q_prev = 1, 0
    p_pp, q_pp = 0, 1
    a, b = num, den
    while True:
        qt = a // b
        p_cur, q_cur = qt * p_prev + p_pp, qt * q_prev + q_pp
        g = (p_cur, p_prev, q_cur, q_prev)
        if mat_det(g) == -1:
            g = (-p_cur, p_prev, -q_cur, q_prev)
        pieces.append(g)
        a, b = b, a - qt * b
        p_pp, q_pp, p_prev, q_prev = p_prev, q_prev, p_cur, q_cur
        if b == 0:
            break
    return pieces


@dataclass
class ManinPresentation:
    level: int
    p1: P1List
    reps: list[Mat]
    relations: list[list[tuple[int, Mat, int]]]

    @property
    def generators(self) -> list[tuple[int, int]]:
        return self.p1.elements

    @property
    def ngens(self) -> int:
        return len(self.reps)

    def reduce_matrix(self, g: Mat) -> tuple[int, Mat]:
        """For ``g`` in SL2(Z): ``phi(g {0,oo}) = phi_j | m``; returns ``(j, m)``."""
        j = self.p1.index(g[2], g[3])
        return j, mat_mul(self.reps[j], mat_adj(g))

    def path_terms(self, alpha, beta) -> list[tuple[int, Mat, int]]:
        """Terms expressing ``phi({alpha, beta})``; cusps are Fractions, ``None`` is infinity."""
        out = []
        for cusp, sign in ((beta, 1), (alpha, -1)):
            n, d = _cusp(cusp)
            for g in unimodular_pieces(n, d):
                j, m = self.reduce_matrix(g)
                out.append((j, m, sign))
        return out

    def matrix_path_terms(self, g: Mat) -> list[tuple[int, Mat, int]]:
        """Terms for ``phi(g {0, oo})`` with ``g`` any integer matrix of nonzero determinant."""
        a, b, c, d = g
        return self.path_terms((b, d), (a, c))


def build_presentation(M: int) -> ManinPresentation:
    if M < 1:
        raise ValueError("level must be positive")
    p1 = P1List(M)
    reps = [p1.lift(i) for i in range(len(p1))]
    pres = ManinPresentation(M, p1, reps, [])
    rels = []
    for i, r in enumerate(reps):
        j, m = pres.reduce_matrix(mat_mul(r, S_MAT))
        rels.append([(i, IDENTITY, 1), (j, m, 1)])
        j1, m1 = pres.reduce_matrix(mat_mul(r, TAU_MAT))
        j2, m2 = pres.reduce_matrix(mat_mul(r, mat_mul(TAU_MAT, TAU_MAT)))
        rels.append([(i, IDENTITY, 1), (j1, m1, 1), (j2, m2, 1)])
        rels.append([(i, IDENTITY, 1), (i, MINUS_I, -1)])
    pres.relations = rels
    return pres


# -- exact coefficient actions -------------------------------------------------------


def _poly_mul(f, g):
    out = [0] * (len(f) + len(g) - 1)
    for i, x in enumerate(f):
        if x:
            for j, y in enumerate(g):
                out[i + j] += x * y
    return out


def poly_action(m: Mat, k: int) -> list[list[int]]:
    """Exact moment action of ``m`` on ``V_k``: row ``j``, column ``i``."""
    a, b, c, d = m
    rows = []
    for j in range(k + 1):
        f = [1]
        for _ in range(k - j):
            f = _poly_mul(f, [a, c])
        for _ in range(j):
            f = _poly_mul(f, [b, d])
        f = f + [0] * (k + 1 - len(f))
        rows.append(f[: k + 1])
    return rows


_ACTION_CACHE: dict[tuple[Mat, int], list[list[int]]] = {}


def _cached_action(m: Mat, k: int):
    key = (m, k)
    A = _ACTION_CACHE.get(key)
    if A is None:
        A = poly_action(m, k)
        if len(_ACTION_CACHE) > 200000:
            _ACTION_CACHE.clear()
        _ACTION_CACHE[key] = A
    return A


def terms_to_rows(term_lists, ngens: int, k: int) -> list[dict[int, int]]:
    """Sparse integer rows of the linear map ``V_k^gens -> V_k^rows`` given by term lists."""
    size = k + 1
    out = []
    for terms in term_lists:
        block = [dict() for _ in range(size)]
        for j, m, s in terms:
            A = _cached_action(m, k)
            for r in range(size):
                row = block[r]
                for i in range(size):
                    v = A[r][i]
                    if v:
                        col = j * size + i
                        row[col] = row.get(col, 0) + s * v
        out.extend({c: v for c, v in row.items() if v} for row in block)
    return out


def apply_terms_exact(term_lists, values, k: int) -> list[list]:
    """Apply a term-list operator to exact generator values (list of length-(k+1) lists)."""
    out = []
    for terms in term_lists:
        acc = [0] * (k + 1)
        for j, m, s in terms:
            A = _cached_action(m, k)
            v = values[j]
            for r in range(k + 1):
                acc[r] += s * sum(A[r][i] * v[i] for i in range(k + 1))
        out.append(acc)
    return out


def _dense(rows: list[dict[int, int]], ncols: int):
    return [[r.get(c, 0) for c in range(ncols)] for r in rows]


def relation_rows(pres: ManinPresentation, k: int) -> list[dict[int, int]]:
    return terms_to_rows(pres.relations, pres.ngens, k)


def symbol_space(pres: ManinPresentation, k: int) -> list[list[Fraction]]:
    """Basis (flattened generator values) of the classical symbol space over Q."""
    n = pres.ngens * (k + 1)
    return ratlinalg.kernel(_dense(relation_rows(pres, k), n), n)


# -- Hecke operators ------------------------------------------------------------------


def hecke_matrices(q: int, level: int) -> list[Mat]:
    """Degeneracy matrices: ``U_q`` when ``q | level``, else ``T_q``."""
    mats = [(1, a, 0, q) for a in range(q)]
    if level % q:
        mats.append((q, 0, 0, 1))
    return mats


def terms_for_matrices(pres: ManinPresentation, mats: list[Mat]) -> list[list[tuple[int, Mat, int]]]:
    """Term lists for ``sum_beta phi|beta`` evaluated at every generator."""
    out = []
    for r in pres.reps:
        terms = []
        for beta in mats:
            for j, m, s in pres.matrix_path_terms(mat_mul(beta, r)):
                terms.append((j, mat_mul(m, beta), s))
        out.append(_merge(terms))
    return out


def _merge(terms):
    acc: dict[tuple[int, Mat], int] = {}
    for j, m, s in terms:
        acc[(j, m)] = acc.get((j, m), 0) + s
    return [(j, m, s) for (j, m), s in acc.items() if s]


def hecke_terms(pres: ManinPresentation, q: int, kind: str | None = None) -> list[list[tuple[int, Mat, int]]]:
    """Term lists of ``T_q`` (``q`` prime to the level) or ``U_q`` (``q`` dividing it)."""
    if kind == "T" and pres.level % q == 0:
        raise ValueError(f"T_{q} requested but {q} divides the level")
    if kind == "U" and pres.level % q:
        raise ValueError(f"U_{q} requested but {q} does not divide the level")
    return terms_for_matrices(pres, hecke_matrices(q, pres.level))


def involution_terms(pres: ManinPresentation) -> list[list[tuple[int, Mat, int]]]:
    """The plus/minus involution ``phi -> phi | diag(-1, 1)``."""
    out = []
    for r in pres.reps:
        g = mat_mul(IOTA, mat_mul(r, IOTA))
        j, m = pres.reduce_matrix(g)
        out.append([(j, mat_mul(m, IOTA), 1)])
    return out


def hecke(pres: ManinPresentation, values, q: int, k: int):
    """Apply the Hecke operator at ``q`` to exact generator values."""
    return apply_terms_exact(hecke_terms(pres, q), values, k)


def evaluate_path(pres: ManinPresentation, values, k: int, alpha, beta) -> list:
    """Value of an exact symbol on the path ``{alpha, beta}``."""
    return apply_terms_exact([pres.path_terms(alpha, beta)], values, k)[0]


# -- eigen-data and eigensymbols ---------------------------------------------------------


@dataclass
class EigenData:
    label: str
    weight: int
    level: int
    eigenvalues: dict[str, int]
    kind: str = "elliptic"
    field_d: int | None = None

    @property
    def k(self) -> int:
        return self.weight - 2

    def eigenvalue(self, q: int) -> int:
        for key in (str(q), f"T_{q}", f"U_{q}", f"a_{q}"):
            if key in self.eigenvalues:
                return int(self.eigenvalues[key])
        raise KeyError(q)

    def primes(self) -> list[int]:
        out = []
        for key in self.eigenvalues:
            out.append(int(str(key).split("_")[-1]))
        return sorted(out)


@dataclass
class ClassicalSymbol:
    """Exact integral generator values, shape ``(gens, k + 1)`` as nested lists."""

    pres: ManinPresentation
    k: int
    values: list[list[int]]

    def satisfies_relations(self) -> bool:
        res = apply_terms_exact(self.pres.relations, self.values, self.k)
        return all(x == 0 for r in res for x in r)


def eigensymbol_exact(pres: ManinPresentation, k: int, eigenvalues: dict[int, int],
                      sign: int = 1) -> ClassicalSymbol:
    """The unique (up to scaling) symbol with the given eigenvalues and involution sign."""
    n = pres.ngens * (k + 1)
    rows = relation_rows(pres, k)
    ident = [{j * (k + 1) + i: 1} for j in range(pres.ngens) for i in range(k + 1)]

    def minus(op_rows, scalar):
        out = []
        for r, e in zip(op_rows, ident):
            rr = dict(r)
            for c, v in e.items():
                rr[c] = rr.get(c, 0) - scalar * v
            out.append({c: v for c, v in rr.items() if v})
        return out

    rows = rows + minus(terms_to_rows(involution_terms(pres), pres.ngens, k), sign)
    for q, a in sorted(eigenvalues.items()):
        rows = rows + minus(terms_to_rows(hecke_terms(pres, q), pres.ngens, k), a)
    ker = ratlinalg.kernel(_dense(rows, n), n)
    if len(ker) != 1:
        raise IdentificationError(f"eigen-data cuts out a space of dimension {len(ker)}, expected 1")
    v = ratlinalg.primitive_integral(ker[0])
    vals = [v[j * (k + 1):(j + 1) * (k + 1)] for j in range(pres.ngens)]
    return ClassicalSymbol(pres, k, vals)


def normalize_mod(values: np.ndarray, p: int, n: int) -> tuple[np.ndarray, int]:
    """Divide p-adic generator values by their content; returns (values, valuation removed)."""
    flat = [int(x) for x in np.asarray(values, dtype=object).ravel()]
    q = p**n
    vmin = None
    for x in flat:
        x %= q
        if x:
            v = 0
            while x % p == 0:
                x //= p
                v += 1
            vmin = v if vmin is None else min(vmin, v)
    if vmin is None:
        raise PadicError("symbol vanishes to working precision")
    arr = np.array([(int(x) % q) // p**vmin for x in flat], dtype=object).reshape(np.shape(values))
    return arr, vmin


@dataclass
class PadicEigensymbol:
    """A classical eigensymbol with values in ``Z/p^n`` on a presentation of level divisible by ``p``."""

    pres: ManinPresentation
    k: int
    p: int
    n: int
    values: np.ndarray  # object array (gens, k + 1)
    up_eigenvalue: int  # residue modulo p^n
    eigenvalues: dict[int, int] = field(default_factory=dict)  # residues mod p^n, levels of pres
    exact: ClassicalSymbol | None = None


def stabilize(sym: ClassicalSymbol, p: int, a_p: int, n: int) -> PadicEigensymbol:
    """Ordinary p-stabilization of a level-M eigensymbol to level ``M p``.

    ``phi_alpha(D) = phi(D) - alpha^-1 (phi | diag(p, 1))(D)``.
    """
    pres, k = sym.pres, sym.k
    if pres.level % p == 0:
        raise ValueError("p already divides the level")
    extra = 2
    W = n + extra
    alpha = hensel_quadratic_unit_root(PadicNumber.from_int(a_p, p, W + k + 2), k, p, W + k + 2)
    alpha_int = alpha.residue(W)
    q = p**W
    inv_alpha = pow(alpha_int, -1, q)
    new = build_presentation(pres.level * p)
    beta = (p, 0, 0, 1)
    vals = []
    for r in new.reps:
        a, b, c, d = r
        base = evaluate_path(pres, sym.values, k, (b, d), (a, c))
        br = mat_mul(beta, r)
        other = apply_terms_exact([[(j, mat_mul(m, beta), s) for j, m, s in pres.matrix_path_terms(br)]],
                                  sym.values, k)[0]
        vals.append([(int(x) - inv_alpha * int(y)) % q for x, y in zip(base, other)])
    arr = np.array(vals, dtype=object)
    arr, _ = normalize_mod(arr, p, W)
    return PadicEigensymbol(new, k, p, n, arr % p**n, alpha_int % p**n)


def eigensymbol(data: EigenData, p: int, n: int, sign: int = 1) -> PadicEigensymbol:
    """Eigensymbol at a level divisible by ``p`` with unit ``U_p`` eigenvalue.

    For ``p | level`` the eigen-data symbol is used directly, otherwise its
    ordinary p-stabilization.
    """
    M, k = data.level, data.k
    pres = build_presentation(M)
    ev = {q: data.eigenvalue(q) for q in data.primes()}
    sym = eigensymbol_exact(pres, k, ev, sign)
    q = p**n
    if M % p == 0:
        a_p = ev[p]
        if a_p % p == 0:
            raise NonOrdinaryError(f"U_{p} eigenvalue {a_p} is not a unit")
        arr = np.array(sym.values, dtype=object)
        arr, _ = normalize_mod(arr, p, n)
        eig = {r: a % q for r, a in ev.items()}
        return PadicEigensymbol(pres, k, p, n, arr, a_p % q, eig, sym)
    if p not in ev:
        raise IdentificationError(f"eigen-data lacks a_{p} needed for stabilization")
    a_p = ev[p]
    if a_p % p == 0:
        raise NonOrdinaryError(f"a_{p} = {a_p} is not a unit")
    st = stabilize(sym, p, a_p, n)
    st.exact = sym
    st.eigenvalues = {r: a % q for r, a in ev.items() if r != p}
    st.eigenvalues[p] = st.up_eigenvalue
    return st
