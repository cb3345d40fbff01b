"""Bianchi modular symbols for Gamma0(N) over a Euclidean imaginary quadratic field.

The level group is ``Gamma0(N)`` inside ``GL2(O_K)`` (determinants are
units), which is what makes eigenvalues independent of the choice of
generator of a prime ideal.  Generators are Manin symbols ``r_i {0, oo}``
indexed by ``P^1(O_K/N)``.  Relations:

* ``{0,oo} + S{0,oo} = 0``;
* invariance under ``diag(u, 1)`` and ``diag(1, u)`` for a generator ``u``
  of the unit group;
* one relation per cycle template: a closed chain of unimodular edges
  ``sum_e g_e {0, oo} = 0`` found by ``tools/find_cycle_templates.py``.

Matrices are 4-tuples of ring elements ``(a, b, c, d)``; ring elements are
pairs ``(x, y)`` meaning ``x + y w``.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from functools import lru_cache


from . import ratlinalg
from .elliptic import IdentificationError
from .padic import NonOrdinaryError, PadicError, PadicNumber, hensel_quadratic_unit_root, valuation
from .quadfield import P1Quad, QuadField, ResidueRing

ONE = (1, 0)
ZERO = (0, 0)
INF = (ONE, ZERO)

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")


# -- matrices and cusps ------------------------------------------------------------------------


def qmul(K: QuadField, x, y):
    a, b, c, d = x
    e, f, g, h = y
    m, s = K.mul, K.add
    return (s(m(a, e), m(b, g)), s(m(a, f), m(b, h)), s(m(c, e), m(d, g)), s(m(c, f), m(d, h)))


def qdet(K: QuadField, x):
    a, b, c, d = x
    return K.sub(K.mul(a, d), K.mul(b, c))


def qinv(K: QuadField, x):
    """Inverse of a matrix with unit determinant."""
    a, b, c, d = x
    u = K.inverse_unit(qdet(K, x))
    m = K.mul
    return (m(d, u), m(K.neg(b), u), m(K.neg(c), u), m(a, u))


def qconj(K: QuadField, x):
    return tuple(K.conj(e) for e in x)


def qidentity():
    return (ONE, ZERO, ZERO, ONE)


def canonical_cusp(K: QuadField, cusp):
    """Coprime representative of a cusp, normalized over units."""
    num, den = cusp
    if den == ZERO:
        return INF
    if num == ZERO:
        return (ZERO, ONE)
    g, _, _ = K.xgcd(num, den)
    num, den = K.exact_div(num, g), K.exact_div(den, g)
    best = None
    for u in K.units:
        cand = (K.mul(u, num), K.mul(u, den))
        key = (cand[1], cand[0])
        if best is None or key < best[0]:
            best = (key, cand)
    return best[1]


def act_cusp(K: QuadField, g, cusp):
    a, b, c, d = g
    num, den = cusp
    return canonical_cusp(K, (K.add(K.mul(a, num), K.mul(b, den)), K.add(K.mul(c, num), K.mul(d, den))))


def is_unimodular(K: QuadField, alpha, beta) -> bool:
    (a, c), (b, d) = alpha, beta
    return K.is_unit(K.sub(K.mul(a, d), K.mul(b, c)))


def edge_matrix(K: QuadField, alpha, beta):
    """Determinant-one matrix ``g`` with ``g 0 = alpha`` and ``g oo = beta``."""
    (p0, q0), (p1, q1) = alpha, beta
    g = (p1, p0, q1, q0)
    u = K.inverse_unit(qdet(K, g))
    return (K.mul(p1, u), p0, K.mul(q1, u), q0)


def cycle_matrices(K: QuadField, cusps):
    n = len(cusps)
    return [edge_matrix(K, cusps[i], cusps[(i + 1) % n]) for i in range(n)]


def cycle_key(K: QuadField, cusps):
    """Canonical key of a cycle modulo GL2(O_K), rotation and reversal."""
    n = len(cusps)
    best = None
    for seq in (list(cusps), list(reversed(cusps))):
        for i in range(n):
            rot = seq[i:] + seq[:i]
            g = edge_matrix(K, rot[1], rot[0])  # g 0 = rot[1], g oo = rot[0]
            ginv = qinv(K, g)
            for u in K.units:
                t = qmul(K, (u, ZERO, ZERO, ONE), ginv)
                key = tuple(act_cusp(K, t, c) for c in rot)
                if best is None or key < best:
                    best = key
    return best


def unimodular_pieces_quad(K: QuadField, cusp):
    """Matrices ``g_i`` in SL2(O_K) with ``sum g_i {0, oo} = {oo, cusp}``."""
    num, den = canonical_cusp(K, cusp)
    if den == ZERO:
        return []
    pieces = []
    p_prev, q_prev = ONE, ZERO
    p_pp, q_pp = ZERO, ONE
    a, b = num, den
    sign = -1
    while True:
        qt, r = K.divmod(a, b)
        p_cur = K.add(K.mul(qt, p_prev), p_pp)
        q_cur = K.add(K.mul(qt, q_prev), q_pp)
        g = (p_cur, p_prev, q_cur, q_prev)
        if sign == -1:
            g = (K.neg(p_cur), p_prev, K.neg(q_cur), q_prev)
        pieces.append(g)
        sign = -sign
        a, b = b, r
        p_pp, q_pp, p_prev, q_prev = p_prev, q_prev, p_cur, q_cur
        if b == ZERO:
            break
    return pieces


@lru_cache(maxsize=None)
def load_templates(d: int) -> list[list]:
    path = os.path.join(DATA_DIR, "cycle_templates.json")
    with open(path) as fh:
        data = json.load(fh)
    temps = data["fields"][str(d)]
    out = []
    for t in temps:
        out.append([tuple(tuple(e) for e in m) for m in t["matrices"]])
    return out


# -- presentation ---------------------------------------------------------------------------


@dataclass
class BianchiPresentation:
    K: QuadField
    level: tuple
    p1: P1Quad
    reps: list
    relations: list = field(default_factory=list)

    @property
    def ngens(self) -> int:
        return len(self.reps)

    @property
    def level_norm(self) -> int:
        return self.K.norm(self.level)

    def reduce_matrix(self, g):
        """``phi(g {0,oo}) = phi_j | m`` for ``g`` with unit determinant."""
        j = self.p1.index(g[2], g[3])
        return j, qmul(self.K, self.reps[j], qinv(self.K, g))

    def path_terms(self, alpha, beta):
        out = []
        for cusp, sign in ((beta, 1), (alpha, -1)):
            for g in unimodular_pieces_quad(self.K, cusp):
                j, m = self.reduce_matrix(g)
                out.append((j, m, sign))
        return out

    def matrix_path_terms(self, g):
        a, b, c, d = g
        return self.path_terms((b, d), (a, c))


def reduce_path_bianchi(pres: BianchiPresentation, alpha, beta):
    """Terms ``(j, m, s)`` with ``{alpha, beta} = sum s * m^-1 r_j {0, oo}``."""
    return pres.path_terms(alpha, beta)


def term_divisor(pres: BianchiPresentation, terms) -> dict:
    """The divisor ``sum s ([g oo] - [g 0])`` of a term list, ``g = m^-1 r_j``."""
    K = pres.K
    div: dict = {}
    for j, m, s in terms:
        g = qmul(K, qinv(K, m), pres.reps[j])
        for cusp, sg in ((act_cusp(K, g, INF), s), (act_cusp(K, g, (ZERO, ONE)), -s)):
            div[cusp] = div.get(cusp, 0) + sg
    return {c: v for c, v in div.items() if v}


def path_divisor(K: QuadField, alpha, beta) -> dict:
    a, b = canonical_cusp(K, alpha), canonical_cusp(K, beta)
    return {} if a == b else {b: 1, a: -1}


def build_bianchi_presentation(K: QuadField, level) -> BianchiPresentation:
    if level == ZERO:
        raise ValueError("level must be non-zero")
    p1 = P1Quad(K, level)
    reps = [p1.lift(i) for i in range(len(p1))]
    pres = BianchiPresentation(K, level, p1, reps)
    S = (ZERO, (-1, 0), ONE, ZERO)
    u = K.units[1]
    diag_units = [(u, ZERO, ZERO, ONE), (ONE, ZERO, ZERO, u)]
    templates = load_templates(K.d)
    rels = []
    for i, r in enumerate(reps):
        j, m = pres.reduce_matrix(qmul(K, r, S))
        rels.append([(i, qidentity(), 1), (j, m, 1)])
        for dg in diag_units:
            j, m = pres.reduce_matrix(qmul(K, r, dg))
            rels.append([(i, qidentity(), 1), (j, m, -1)])
        for t in templates:
            terms = []
            for g in t:
                j, m = pres.reduce_matrix(qmul(K, r, g))
                terms.append((j, m, 1))
            rels.append(terms)
    pres.relations = rels
    return pres


# -- Hecke operators ----------------------------------------------------------------------------


def residues(K: QuadField, pi) -> list:
    R = ResidueRing(K, pi)
    return list(R.elements())


def hecke_matrices_bianchi(K: QuadField, pi, level) -> list:
    mats = [(ONE, a, ZERO, pi) for a in residues(K, pi)]
    if not K.divides(pi, level):
        mats.append((pi, ZERO, ZERO, ONE))
    return mats


def hecke_terms_bianchi(pres: BianchiPresentation, pi, kind: str | None = None):
    K = pres.K
    divides = K.divides(pi, pres.level)
    if kind == "T" and divides:
        raise ValueError("T requested at a prime dividing the level")
    mats = hecke_matrices_bianchi(K, pi, pres.level)
    out = []
    for r in pres.reps:
        acc = {}
        for beta in mats:
            for j, m, s in pres.matrix_path_terms(qmul(K, beta, r)):
                key = (j, qmul(K, m, beta))
                acc[key] = acc.get(key, 0) + s
        out.append([(j, m, s) for (j, m), s in acc.items() if s])
    return out


def hecke_bianchi(pres: BianchiPresentation, values, pi, kind: str | None = None) -> list:
    """Hecke operator at the prime ``(pi)`` on weight-zero symbol values."""
    return apply_terms_trivial(hecke_terms_bianchi(pres, pi, kind), values)


def apply_terms_trivial(term_lists, values):
    """Apply a term operator to weight-zero (scalar) generator values."""
    return [sum(s * values[j] for j, _, s in terms) for terms in term_lists]


def _rows_trivial(term_lists, ngens):
    out = []
    for terms in term_lists:
        row = {}
        for j, _, s in terms:
            row[j] = row.get(j, 0) + s
        out.append({c: v for c, v in row.items() if v})
    return out


def relation_rows_bianchi(pres):
    return _rows_trivial(pres.relations, pres.ngens)


def symbol_space_dimension(pres: BianchiPresentation) -> int:
    n = pres.ngens
    rows = relation_rows_bianchi(pres)
    dense = [[r.get(c, 0) for c in range(n)] for r in rows]
    return n - ratlinalg.rank(dense, n)


def eisenstein_value(K: QuadField, pi, k: int = 0) -> int:
    nq = K.norm(pi)
    return 1 + nq ** (k + 1)


@dataclass
class BianchiClassicalSymbol:
    pres: BianchiPresentation
    values: list[int]

    def satisfies_relations(self) -> bool:
        return all(x == 0 for x in apply_terms_trivial(self.pres.relations, self.values))


def bianchi_eigensymbol_exact(pres: BianchiPresentation, eigenvalues: dict, k: int = 0) -> BianchiClassicalSymbol:
    """The weight-zero symbol with the given ``T`` eigenvalues (keys: prime generators)."""
    if k != 0:
        raise NotImplementedError("classical Bianchi eigensymbols are implemented for k = 0")
    n = pres.ngens
    rows = relation_rows_bianchi(pres)
    for pi, a in eigenvalues.items():
        op = _rows_trivial(hecke_terms_bianchi(pres, pi), n)
        for i, r in enumerate(op):
            rr = dict(r)
            rr[i] = rr.get(i, 0) - a
            rows.append({c: v for c, v in rr.items() if v})
    dense = [[r.get(c, 0) for c in range(n)] for r in rows]
    ker = ratlinalg.kernel(dense, n)
    if len(ker) != 1:
        raise IdentificationError(f"eigen-data cuts out a space of dimension {len(ker)}, expected 1")
    return BianchiClassicalSymbol(pres, ratlinalg.primitive_integral(ker[0]))


# -- p-adic embedding and stabilization -------------------------------------------------------


@dataclass(frozen=True)
class SplitEmbedding:
    """Embedding ``O_K -> Z/p^n`` in which ``pi`` (a prime above ``p``) has positive valuation."""

    K: QuadField
    pi: tuple
    p: int
    n: int
    root: int

    @classmethod
    def make(cls, K: QuadField, pi, n: int) -> "SplitEmbedding":
        p = K.norm(pi)
        t, nm = K.trace_w, K.norm_w
        roots = [r for r in range(p) if (r * r - t * r + nm) % p == 0]
        if len(roots) != 2:
            raise PadicError(f"{p} does not split in Q(sqrt({K.d}))")
        for r0 in roots:
            if (pi[0] + pi[1] * r0) % p == 0:
                break
        else:  # pragma: no cover
            raise PadicError("no root compatible with the prime")
        r = r0
        q = p**n
        for _ in range(n + 2):  # Newton
            f = (r * r - t * r + nm) % q
            df = (2 * r - t) % q
            r = (r - f * pow(df, -1, q)) % q
        return cls(K, pi, p, n, r)

    def __call__(self, a) -> int:
        return (a[0] + a[1] * self.root) % self.p**self.n

    def conj(self, a) -> int:
        return self(self.K.conj(a))

    def pair(self, m):
        """``((a, b, c, d) under the embedding, same for the conjugate matrix)``."""
        return (tuple(self(e) for e in m), tuple(self.conj(e) for e in m))


def unit_root(a: int, k: int, p: int, prec: int) -> int:
    if a % p == 0:
        raise NonOrdinaryError(f"eigenvalue {a} is not a p-adic unit")
    return hensel_quadratic_unit_root(PadicNumber.from_int(a, p, prec), k, p, prec).residue(prec)


def _evaluate(pres, values, g) -> int:
    return sum(s * values[j] for j, _, s in pres.matrix_path_terms(g))


def stabilize_at(pres: BianchiPresentation, values, pi, alpha: int, q: int):
    """``phi - alpha^-1 phi | diag(pi, 1)`` at level ``N pi`` (values modulo ``q``)."""
    K = pres.K
    new = build_bianchi_presentation(K, K.mul(pres.level, pi))
    beta = (pi, ZERO, ZERO, ONE)
    ia = pow(alpha, -1, q)
    vals = [(_evaluate(pres, values, r) - ia * _evaluate(pres, values, qmul(K, beta, r))) % q
            for r in new.reps]
    return new, vals


def _content_free(vals, p: int, q: int):
    nz = [v % q for v in vals if v % q]
    if not nz:
        raise PadicError("symbol vanishes to working precision")
    v = min(int(valuation(x, p)) for x in nz)
    return [(x % q) // p**v for x in vals], v


@dataclass
class BianchiEigensymbol:
    """Weight-zero eigensymbol at a level divisible by both primes above ``p``."""

    pres: BianchiPresentation
    pi: tuple
    p: int
    n: int
    values: list[int]  # residues modulo p^n
    alpha: int  # U_pi eigenvalue
    alpha_bar: int  # U_pibar eigenvalue
    exact: BianchiClassicalSymbol | None = None

    @property
    def up_eigenvalue(self) -> int:
        return self.alpha * self.alpha_bar % self.p**self.n


def bianchi_eigensymbol(pres: BianchiPresentation, eigenvalues: dict, pi, n: int, k: int = 0) -> BianchiEigensymbol:
    """Eigensymbol with unit ``U_pi`` and ``U_pibar`` eigenvalues, stabilizing where needed.

    ``eigenvalues`` maps canonical prime generators to ``T``/``U`` eigenvalues
    at the level of ``pres``; ``pi`` generates a split prime.
    """
    K = pres.K
    p = K.norm(pi)
    pibar = K.conj(pi)
    if K.divides(pi, pibar):
        raise PadicError(f"{p} does not split in Q(sqrt({K.d}))")
    good = {g: a for g, a in eigenvalues.items() if not K.divides(g, pres.level)}
    sym = bianchi_eigensymbol_exact(pres, good, k)
    extra = 3
    W = n + extra
    q = p**W
    cur_pres, vals = pres, [v % q for v in sym.values]
    roots = []
    for prime in (pi, pibar):
        a = eigenvalue_at(K, eigenvalues, prime)
        if K.divides(prime, cur_pres.level):
            if a % p == 0:
                raise NonOrdinaryError(f"U eigenvalue {a} at {ideal_label(K, prime)} is not a unit")
            roots.append(a % q)
            continue
        alpha = unit_root(a, k, p, W + 2) % q
        cur_pres, vals = stabilize_at(cur_pres, vals, prime, alpha, q)
        roots.append(alpha)
    vals, _ = _content_free(vals, p, q)
    qn = p**n
    return BianchiEigensymbol(cur_pres, pi, p, n, [v % qn for v in vals], roots[0] % qn, roots[1] % qn, sym)


# -- ideal labels and eigen-data --------------------------------------------------------------


def ideal_label(K: QuadField, g) -> str:
    """``"norm.generator"`` with the canonical generator of ``(g)``."""
    return f"{K.norm(g)}.{K.format(K.canonical_generator(g))}"


def parse_ideal_label(K: QuadField, label: str):
    norm, _, gen = str(label).partition(".")
    g = K.canonical_generator(K.parse(gen))
    if K.norm(g) != int(norm):
        raise ValueError(f"ideal label {label!r}: generator has norm {K.norm(g)}")
    return g


def eigenvalue_map(K: QuadField, eigenvalues: dict) -> dict:
    """Eigen-data keyed by canonical prime generators."""
    return {parse_ideal_label(K, lab): int(a) for lab, a in eigenvalues.items()}


def eigenvalue_at(K: QuadField, ev: dict, pi) -> int:
    g = K.canonical_generator(pi)
    if g not in ev:
        raise KeyError(f"no eigenvalue for the prime {ideal_label(K, pi)}")
    return ev[g]
