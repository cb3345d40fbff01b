"""Linear algebra over ``Z/p^n``.

Everything is built on the Howell (strong echelon) form: row spans become
membership-testable, kernels are read off an augmented echelonization, and
the one-parameter pencil ``M x = E1 + t E2`` is handled by treating ``t`` as
one more unknown.

Large, mostly-unit sparse systems (the Manin relation matrices) are first
shrunk by eliminating variables through unit pivots; only the residual core
goes through the dense Howell code.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

INT64_SAFE = 3_000_000_000  # q*q must stay below 2**63


def _dtype(q: int):
    return np.int64 if q < INT64_SAFE else object


def as_array(x, q: int) -> np.ndarray:
    """Integer array reduced into ``[0, q)`` with a dtype safe for ``q``."""
    dt = _dtype(q)
    if dt is object:
        arr = np.array(x, dtype=object)
        flat = arr.reshape(-1)
        for i, v in enumerate(flat):
            flat[i] = int(v) % q
        return arr
    return np.asarray(np.array(x, dtype=object) % q, dtype=np.int64) if np.asarray(x).dtype == object \
        else np.asarray(x, dtype=np.int64) % q


def vvaluation(a: np.ndarray, p: int, n: int) -> np.ndarray:
    """Elementwise ``v_p`` capped at ``n`` (zero entries map to ``n``)."""
    t = np.array(a, dtype=object) if a.dtype == object else a.copy()
    v = np.zeros(t.shape, dtype=np.int64)
    live = (t % (p**n)) != 0
    v[~live] = n
    for _ in range(n):
        m = live & (t % p == 0)
        if not m.any():
            break
        v[m] += 1
        t = np.where(m, t // p, t)
        live = m
    return v


@dataclass(frozen=True)
class ZpnMatrix:
    p: int
    n: int
    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", as_array(np.atleast_2d(self.entries), self.modulus))

    @classmethod
    def from_rows(cls, rows, p: int, n: int, ncols: int | None = None) -> "ZpnMatrix":
        rows = list(rows)
        if not rows:
            return cls(p, n, np.zeros((0, ncols or 0), dtype=object))
        return cls(p, n, np.array(rows, dtype=object))

    @classmethod
    def identity(cls, size: int, p: int, n: int) -> "ZpnMatrix":
        return cls(p, n, np.eye(size, dtype=np.int64))

    @property
    def modulus(self) -> int:
        return self.p**self.n

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    def __matmul__(self, other):
        q = self.modulus
        if isinstance(other, ZpnMatrix):
            return ZpnMatrix(self.p, self.n, matmul_mod(self.entries, other.entries, q))
        return matmul_mod(self.entries, as_array(other, q), q)

    def row_span_contains(self, v) -> bool:
        H, _ = howell_form(self)
        return _reduce_by_howell(H.entries, _pivots_of(H.entries, self.p, self.n),
                                 as_array(v, self.modulus), self.p, self.n)[0]

    def __eq__(self, other) -> bool:
        return (isinstance(other, ZpnMatrix) and self.p == other.p and self.n == other.n
                and self.entries.shape == other.entries.shape
                and bool(np.all(self.entries == other.entries)))


def matmul_mod(a: np.ndarray, b: np.ndarray, q: int) -> np.ndarray:
    """``a @ b mod q`` without int64 overflow."""
    if a.dtype != object and b.dtype != object:
        k = a.shape[-1]
        if k * q * q < 2**63:
            return (a @ b) % q
        out = None
        step = max(1, (2**63 - 1) // (q * q))
        for s in range(0, k, step):
            part = (a[..., s:s + step] @ b[s:s + step, ...] if b.ndim == 2 else
                    a[..., s:s + step] @ b[s:s + step]) % q
            out = part if out is None else (out + part) % q
        return out
    return (np.asarray(a, dtype=object) @ np.asarray(b, dtype=object)) % q


# -- dense Howell form -------------------------------------------------------------


def _howell(A: np.ndarray, p: int, n: int, pivot_cols: int):
    """Howell-echelonize the first ``pivot_cols`` columns of ``A`` (a copy).

    Returns the echelonized array and the pivot list ``[(row, col, w)]`` where
    the pivot entry equals ``p^w``.  Saturation rows ``p^(n-w) * pivot_row``
    are appended as needed, so the row count can grow.
    """
    q = p**n
    A = A.copy() % q
    extra = []
    pivots = []
    r = 0
    for j in range(pivot_cols):
        if extra:
            A = np.vstack([A] + extra)
            extra = []
        if r >= A.shape[0]:
            break
        col = A[r:, j]
        nzi = np.nonzero(col)[0]
        if len(nzi) == 0:
            continue
        vs = vvaluation(col[nzi], p, n)
        i = r + int(nzi[int(np.argmin(vs))])
        w = int(vs.min())
        if i != r:
            A[[r, i]] = A[[i, r]]
        unit = int(A[r, j]) // p**w
        A[r] = (A[r] * pow(unit, -1, q)) % q
        pw = p**w
        below = A[r + 1:, j]
        nz = np.nonzero(below)[0]
        if len(nz):
            fac = below[nz] // pw
            A[r + 1 + nz] = (A[r + 1 + nz] - (fac[:, None] * A[r]) % q) % q
        if w > 0:
            s = (A[r] * p ** (n - w)) % q
            if np.any(s):
                extra.append(s[None, :])
        pivots.append((r, j, w))
        r += 1
    if extra:
        A = np.vstack([A] + extra)
    for (i, j, w) in pivots:
        if i == 0:
            continue
        pw = p**w
        above = A[:i, j]
        nz = np.nonzero(above // pw)[0]
        if len(nz):
            fac = above[nz] // pw
            A[nz] = (A[nz] - (fac[:, None] * A[i]) % q) % q
    return A, pivots


def _pivots_of(H: np.ndarray, p: int, n: int):
    piv = []
    for i in range(H.shape[0]):
        nz = np.nonzero(H[i])[0]
        if len(nz):
            j = int(nz[0])
            piv.append((i, j, int(vvaluation(H[i, j:j + 1], p, n)[0])))
    return piv


def _reduce_by_howell(H, pivots, v, p, n):
    """Reduce ``v`` against Howell rows; returns (member?, coefficients, remainder)."""
    q = p**n
    v = v.copy() % q
    coef = {}
    for (i, j, w) in pivots:
        e = int(v[j])
        if e == 0:
            continue
        pw = p**w
        if e % pw:
            return False, coef, v
        c = e // pw
        coef[i] = c
        v = (v - c * H[i]) % q
    return not np.any(v[: H.shape[1]]), coef, v


def howell_form(M: ZpnMatrix) -> tuple[ZpnMatrix, ZpnMatrix]:
    """Howell form ``H`` of ``M`` with transform ``U`` such that ``H = U M``.

    ``H`` keeps only its nonzero rows; each pivot is a power of ``p`` and the
    entries above a pivot ``p^w`` are reduced into ``[0, p^w)``.  Rows of
    ``U`` are the corresponding combinations of the rows of ``M``.
    """
    p, n, q = M.p, M.n, M.modulus
    R, C = M.entries.shape
    A = np.hstack([M.entries, as_array(np.eye(R, dtype=np.int64), q)])
    A, pivots = _howell(A, p, n, C)
    keep = [i for (i, _, _) in pivots]
    H = A[keep, :C] if keep else np.zeros((0, C), dtype=A.dtype)
    U = A[keep, C:] if keep else np.zeros((0, R), dtype=A.dtype)
    return ZpnMatrix(p, n, H), ZpnMatrix(p, n, U)


def _kernel_dense(M: np.ndarray, p: int, n: int) -> np.ndarray:
    q = p**n
    R, C = M.shape
    A = np.hstack([M.T % q, as_array(np.eye(C, dtype=np.int64), q)])
    A, _ = _howell(A, p, n, R + C)
    rows = [A[i, R:] for i in range(A.shape[0]) if not np.any(A[i, :R]) and np.any(A[i, R:])]
    if not rows:
        return np.zeros((0, C), dtype=A.dtype)
    return np.array(rows, dtype=A.dtype)


def _solve_dense(M: np.ndarray, b: np.ndarray, p: int, n: int, want_kernel: bool = False):
    """Solve ``M x = b``; returns (x or None, kernel generators or None)."""
    q = p**n
    R, C = M.shape
    A = np.hstack([M.T % q, as_array(np.eye(C, dtype=np.int64), q)])
    A, pivots = _howell(A, p, n, R + C if want_kernel else R)
    left = [(i, j, w) for (i, j, w) in pivots if j < R]
    ok, coef, _ = _reduce_by_howell(A[:, :R], left, as_array(b, q), p, n)
    x = None
    if ok:
        x = as_array(np.zeros(C, dtype=np.int64), q)
        for i, c in coef.items():
            x = (x + c * A[i, R:]) % q
    ker = None
    if want_kernel:
        rows = [A[i, R:] for i in range(A.shape[0]) if not np.any(A[i, :R]) and np.any(A[i, R:])]
        ker = np.array(rows, dtype=A.dtype) if rows else np.zeros((0, C), dtype=A.dtype)
    return x, ker


# -- sparse pre-elimination ------------------------------------------------------------


class _Sparse:
    """Row-dict system with unit-pivot elimination of unprotected columns."""

    def __init__(self, rows: list[dict], p: int, n: int, protected: set[int]):
        self.p, self.n, self.q = p, n, p**n
        self.rows = {i: r for i, r in enumerate(rows) if r}
        self.protected = protected
        self.col_rows: dict[int, set[int]] = {}
        for i, r in self.rows.items():
            for c in r:
                self.col_rows.setdefault(c, set()).add(i)
        self.eliminated: list[tuple[int, dict]] = []

    def _add(self, target: int, src: dict, factor: int):
        q = self.q
        row = self.rows[target]
        for c, v in src.items():
            nv = (row.get(c, 0) + factor * v) % q
            if nv:
                if c not in row:
                    self.col_rows.setdefault(c, set()).add(target)
                row[c] = nv
            elif c in row:
                del row[c]
                self.col_rows[c].discard(target)
        if not row:
            del self.rows[target]

    def eliminate(self, max_cost: int = 4000):
        p, q = self.p, self.q
        changed = True
        while changed:
            changed = False
            for i in sorted(self.rows, key=lambda i: len(self.rows[i])):
                r = self.rows.get(i)
                if not r:
                    continue
                best = None
                for c, v in r.items():
                    if c in self.protected or v % p == 0:
                        continue
                    cnt = len(self.col_rows[c])
                    if best is None or cnt < best[0]:
                        best = (cnt, c)
                if best is None or (len(r) - 1) * (best[0] - 1) > max_cost:
                    continue
                c = best[1]
                row = self.rows.pop(i)
                for cc in row:
                    self.col_rows[cc].discard(i)
                inv = pow(row[c], -1, q)
                norm = {cc: v * inv % q for cc, v in row.items()}
                for t in list(self.col_rows.get(c, ())):
                    if t in self.rows:
                        self._add(t, norm, -self.rows[t][c])
                self.eliminated.append((c, norm))
                changed = True

    def residual(self):
        return list(self.rows.values())

    def back_substitute(self, values: dict[int, int]) -> dict[int, int]:
        """Given values of residual columns, fill in eliminated ones (others 0)."""
        q = self.q
        vals = dict(values)
        for c, norm in reversed(self.eliminated):
            s = 0
            for cc, v in norm.items():
                if cc != c:
                    s += v * vals.get(cc, 0)
            vals[c] = (-s) % q
        return vals


def _to_dicts(M: np.ndarray, q: int) -> list[dict]:
    out = []
    for row in M:
        nz = np.nonzero(row % q)[0]
        out.append({int(j): int(row[j]) % q for j in nz})
    return out


@dataclass
class SparseMatrix:
    """Row-dict sparse matrix over ``Z/p^n`` (``rows``: list of ``{col: value}``)."""

    p: int
    n: int
    ncols: int
    rows: list[dict] = field(default_factory=list)

    @property
    def modulus(self) -> int:
        return self.p**self.n

    def dense(self) -> np.ndarray:
        q = self.modulus
        A = as_array(np.zeros((len(self.rows), self.ncols), dtype=np.int64), q)
        for i, r in enumerate(self.rows):
            for j, v in r.items():
                A[i, j] = (A[i, j] + v) % q
        return A

    def apply(self, x) -> np.ndarray:
        q = self.modulus
        out = [0] * len(self.rows)
        for i, r in enumerate(self.rows):
            out[i] = sum(int(v) * int(x[j]) for j, v in r.items()) % q
        return np.array(out, dtype=object)


def _system_rows(M, q):
    if isinstance(M, SparseMatrix):
        return [dict(r) for r in M.rows], M.ncols
    arr = M.entries if isinstance(M, ZpnMatrix) else np.asarray(M)
    return _to_dicts(arr, q), arr.shape[1]


def _pn(M, p, n):
    if isinstance(M, (ZpnMatrix, SparseMatrix)):
        return M.p, M.n
    return p, n


def _affine_solve(M, rhs_cols: Sequence, p: int, n: int, tcols: int, sparse_threshold: int = 60):
    """Core solver for ``M x + sum_k t_k T_k = b``.

    ``rhs_cols[:-1]`` are the columns multiplying the extra unknowns ``t``
    (always protected) and ``rhs_cols[-1]`` is ``b``.  Returns
    ``(solution dict or None, kernel generators restricted to the t's, nunknowns)``.
    """
    q = p**n
    rows, ncols = _system_rows(M, q)
    extra = [as_array(c, q) for c in rhs_cols]
    for k, col in enumerate(extra):
        for i, v in enumerate(col):
            v = int(v) % q
            if v:
                rows[i][ncols + k] = (rows[i].get(ncols + k, 0) + (q - v if k == len(extra) - 1 else v)) % q
    # the last augmented column carries -b so that all rows read "... = 0"
    bcol = ncols + len(extra) - 1
    protected = set(range(ncols, ncols + len(extra)))
    sp = _Sparse(rows, p, n, protected)
    if ncols > sparse_threshold:
        sp.eliminate()
    residual = sp.residual()
    live = sorted({c for r in residual for c in r if c < bcol})
    index = {c: i for i, c in enumerate(live)}
    A = as_array(np.zeros((len(residual), len(live)), dtype=np.int64), q)
    b = as_array(np.zeros(len(residual), dtype=np.int64), q)
    for i, r in enumerate(residual):
        for c, v in r.items():
            if c == bcol:
                b[i] = (-v) % q
            else:
                A[i, index[c]] = v
    # an extra unknown absent from the residual system is unconstrained
    free_t = np.zeros((sum(ncols + k not in index for k in range(tcols)), tcols), dtype=object)
    for row, k in enumerate(k for k in range(tcols) if ncols + k not in index):
        free_t[row, k] = 1
    if len(live) == 0:
        ok = not np.any(b)
        sol = sp.back_substitute({bcol: 1}) if ok else None
        return sol, free_t, ncols
    x, ker = _solve_dense(A, b, p, n, want_kernel=True)
    tker = np.zeros((ker.shape[0], tcols), dtype=object)
    for k in range(tcols):
        c = ncols + k
        if c in index:
            tker[:, k] = ker[:, index[c]]
    tker = np.vstack([tker, free_t])
    if x is None:
        return None, tker, ncols
    vals = {c: int(x[index[c]]) for c in live}
    vals[bcol] = 1
    sol = sp.back_substitute(vals)
    return sol, tker, ncols


def solve(M, b, p: int | None = None, n: int | None = None):
    """A solution of ``M x = b`` mod ``p^n``, or ``None`` when unsolvable."""
    p, n = _pn(M, p, n)
    q = p**n
    sol, _, ncols = _affine_solve(M, [b], p, n, 0)
    if sol is None:
        return None
    return as_array([sol.get(j, 0) for j in range(ncols)], q)


def kernel(M: ZpnMatrix) -> ZpnMatrix:
    """Generators (not a free basis) of ``{x : M x = 0 mod p^n}``."""
    K = _kernel_dense(M.entries, M.p, M.n)
    return ZpnMatrix(M.p, M.n, K if K.shape[0] else np.zeros((0, M.cols), dtype=np.int64))


@dataclass(frozen=True)
class PencilSolution:
    """Solvable set of ``M x = E1 + t E2`` for ``t`` modulo ``p^m``.

    ``kind`` is ``"empty"``, ``"all"`` or ``"class"``; for a class the set is
    ``t = t0 mod p^s``.  ``witness`` solves the system at ``t = t0`` exactly
    (``t0`` is kept modulo ``p^n``, not reduced to ``p^s``).
    """

    kind: str
    t0: int | None
    s: int
    witness: np.ndarray | None
    certified_precision: int
    p: int

    def contains(self, t: int) -> bool:
        if self.kind == "empty":
            return False
        if self.kind == "all":
            return True
        return (t - self.t0) % self.p**self.s == 0


def solve_pencil(M, E1, E2, p: int | None = None, n: int | None = None) -> PencilSolution:
    """All ``t`` (mod ``p^n``) for which ``M x = E1 + t E2`` has a solution."""
    p, n = _pn(M, p, n)
    q = p**n
    E2neg = (-as_array(E2, q)) % q
    sol, tker, ncols = _affine_solve(M, [E2neg, E1], p, n, 1)
    if sol is None:
        return PencilSolution("empty", None, 0, None, n, p)
    t0 = sol.get(ncols, 0) % q
    s = n
    for v in tker[:, 0] if tker.shape[0] else []:
        v = int(v) % q
        if v:
            vv = 0
            while v % p == 0:
                v //= p
                vv += 1
            s = min(s, vv)
    witness = as_array([sol.get(j, 0) for j in range(ncols)], q)
    if s == 0:
        return PencilSolution("all", t0, 0, witness, n, p)
    return PencilSolution("class", t0, s, witness, n, p)


def sparse_from_terms(entries: Iterable[tuple[int, int, int]], nrows: int, ncols: int,
                      p: int, n: int) -> SparseMatrix:
    """Accumulate ``(row, col, value)`` triples into a :class:`SparseMatrix`."""
    q = p**n
    rows: list[dict] = [dict() for _ in range(nrows)]
    for i, j, v in entries:
        r = rows[i]
        nv = (r.get(j, 0) + int(v)) % q
        if nv:
            r[j] = nv
        elif j in r:
            del r[j]
    return SparseMatrix(p, n, ncols, rows)
