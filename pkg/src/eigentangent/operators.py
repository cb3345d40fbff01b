"""Vectorized term-list operators acting on distribution-valued assignments.

A term list assigns to each output slot a list of ``(source generator,
matrix, sign)``.  Here the matrices are already p-adic integers (residues),
so the same code serves elliptic symbols (one matrix per term) and Bianchi
symbols (a pair of matrices per term, one per completion at the split
prime).
"""

from __future__ import annotations

import numpy as np

from .distributions import (
    act_moments,
    act_moments2,
    action_matrices,
    log_action_matrices,
    reduce_filtration,
)


def _accumulate(nout: int, tgt: np.ndarray, contrib: np.ndarray) -> np.ndarray:
    out = np.zeros((nout,) + contrib.shape[1:], dtype=contrib.dtype)
    if contrib.dtype == object:
        for t, c in zip(tgt, contrib):
            out[t] = out[t] + c
        return out
    np.add.at(out, tgt, contrib)
    return out


class TermOperator:
    """Linear map on generator assignments given by flattened term lists.

    Parameters
    ----------
    nout, tgt, src, sign : output count and per-term target, source, sign.
    mats : list of one (elliptic) or two (Bianchi) tuples ``(a, b, c, d)`` of
        integer arrays, residues of the term matrices.
    """

    def __init__(self, nout, tgt, src, sign, mats):
        self.nout = nout
        self.tgt = np.asarray(tgt, dtype=np.int64)
        self.src = np.asarray(src, dtype=np.int64)
        self.sign = np.asarray(sign, dtype=np.int64)
        self.mats = mats
        self._cache: dict = {}

    @classmethod
    def from_terms(cls, term_lists, embed=None, p: int | None = None):
        """Build from term lists. ``embed`` maps a term matrix to a tuple of residue 4-tuples."""
        tgt, src, sign, raw = [], [], [], []
        for i, terms in enumerate(term_lists):
            for j, m, s in terms:
                tgt.append(i)
                src.append(j)
                sign.append(s)
                raw.append(embed(m) if embed else (m,))
        nm = len(raw[0]) if raw else 1
        mats = []
        for t in range(nm):
            cols = list(zip(*[r[t] for r in raw])) if raw else [(), (), (), ()]
            mats.append(tuple(np.array([int(x) for x in col], dtype=object) for col in cols))
        return cls(len(term_lists), tgt, src, sign, mats)

    @property
    def twovar(self) -> bool:
        return len(self.mats) == 2

    def __len__(self):
        return len(self.tgt)

    def _actions(self, k, N, p, rows=None):
        key = ("act", k, N, p, rows)
        if key not in self._cache:
            q = p**N
            self._cache[key] = [action_matrices(*[x % q for x in m], k, N, q, rows=rows, p=p)
                                for m in self.mats]
        return self._cache[key]

    def _logs(self, k, N, p):
        key = ("log", k, N, p)
        if key not in self._cache:
            self._cache[key] = [log_action_matrices(*m, k, N, p, N) for m in self.mats]
        return self._cache[key]

    def apply(self, values: np.ndarray, k: int, N: int, p: int) -> np.ndarray:
        """Apply to distribution assignments shape ``(gens, N)`` or ``(gens, N, N)``."""
        q = p**N
        A = self._actions(k, N, p)
        v = values[self.src]
        if self.twovar:
            contrib = act_moments2(A[0], A[1], v.astype(A[0].dtype), q)
        else:
            contrib = act_moments(A[0], v.astype(A[0].dtype), q)
        contrib = (contrib * self._signs(contrib)) % q
        out = _accumulate(self.nout, self.tgt, contrib) % q
        return reduce_filtration(out, p, N, self.twovar)

    def _signs(self, contrib):
        s = self.sign.astype(contrib.dtype)
        return s.reshape((-1,) + (1,) * (contrib.ndim - 1))

    def apply_log(self, values: np.ndarray, k: int, N: int, p: int,
                  direction: tuple[int, int] = (1, 0)) -> np.ndarray:
        """Epsilon-part: log-twisted action summed over terms, ``(nout, k+1[, k+1])`` mod ``p^N``."""
        q = p**N
        L = self._logs(k, N, p)
        v = values[self.src]
        if self.twovar:
            A = self._actions(k, N, p, rows=k + 1)
            dt = np.result_type(L[0].dtype, A[0].dtype, v.dtype)
            v = v.astype(dt)
            contrib = None
            t1, t2 = direction
            if t1:
                contrib = t1 * act_moments2(L[0].astype(dt), A[1].astype(dt), v, q)
            if t2:
                c2 = t2 * act_moments2(A[0].astype(dt), L[1].astype(dt), v, q)
                contrib = c2 if contrib is None else contrib + c2
        else:
            contrib = act_moments(L[0], v.astype(L[0].dtype), q)
        contrib = (contrib * self._signs(contrib)) % q
        return _accumulate(self.nout, self.tgt, contrib) % q

    def apply_classical(self, values: np.ndarray, k: int, p: int, n: int) -> np.ndarray:
        """Apply to ``V_k`` (or ``V_{k,k}``) assignments modulo ``p^n``."""
        q = p**n
        A = self._classical(k, p, n)
        v = values[self.src]
        if self.twovar:
            contrib = act_moments2(A[0], A[1], v.astype(A[0].dtype), q)
        else:
            contrib = act_moments(A[0], v.astype(A[0].dtype), q)
        contrib = (contrib * self._signs(contrib)) % q
        return _accumulate(self.nout, self.tgt, contrib) % q

    def _classical(self, k, p, n):
        key = ("cl", k, p, n)
        if key not in self._cache:
            q = p**n
            self._cache[key] = [action_matrices(*[x % q for x in m], k, k + 1, q, series=False)
                                for m in self.mats]
        return self._cache[key]

    def classical_rows(self, k: int, p: int, n: int) -> list[dict[int, int]]:
        """Sparse rows of the classical map ``V^gens -> V^nout`` modulo ``p^n``.

        Coordinates are flattened generator-major; two-variable coordinates
        ``(i, j)`` flatten to ``i (k+1) + j``.
        """
        q = p**n
        A = self._classical(k, p, n)
        size = (k + 1) ** 2 if self.twovar else k + 1
        rows = [dict() for _ in range(self.nout * size)]
        for t in range(len(self.tgt)):
            if self.twovar:
                blk = np.kron(np.asarray(A[0][t], dtype=object), np.asarray(A[1][t], dtype=object))
            else:
                blk = np.asarray(A[0][t], dtype=object)
            s = int(self.sign[t])
            base_r = int(self.tgt[t]) * size
            base_c = int(self.src[t]) * size
            for r in range(size):
                row = rows[base_r + r]
                for c in range(size):
                    v = int(blk[r, c])
                    if v:
                        row[base_c + c] = (row.get(base_c + c, 0) + s * v) % q
        return [{c: v for c, v in r.items() if v} for r in rows]
