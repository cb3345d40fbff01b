"""Overconvergent lifts and first-order weight deformations of eigensymbols.

Pipeline for one eigensymbol ``phi`` with unit ``U_p`` eigenvalue ``lam``:

1. ``lift_overconvergent``: iterate ``Phi -> U_p(Phi) / lam`` on the finite
   approximation module, starting from the assignment whose low moments are
   ``phi`` and whose higher moments vanish.  The difference from the true lift
   lies in the moment-vanishing submodule, which ``U_p`` scales by
   ``p^(k+1)``, so the iteration reaches the true lift as an exact fixed point.
2. ``relation_errors``: the trivial dual-number deformation ``Phi + eps * 0``
   fails each Manin relation by the log-twisted action of its terms.
3. Linear algebra over ``Z/p^m``: in the elliptic case solve for ``psi`` and
   the derivatives ``a_q'``; in the Bianchi case find the directions
   ``(1, t)`` for which the two error vectors can be absorbed.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field

import numpy as np

from . import zpn
from .distributions import log_precision, reduce_filtration
from .operators import TermOperator
from .padic import PadicError, PadicNumber, valuation


class LiftError(PadicError):
    """The lifting iteration did not reach a fixed point."""


class CriticalSlopeError(PadicError):
    """Slope too large for a certified lift."""


class EigenMismatchError(PadicError):
    """Derived eigen-identity fails: eigen-data inconsistent with the symbol."""


class InconsistencyError(PadicError):
    """No deformation direction at all; never valid for non-critical inputs."""


@dataclass
class OverconvergentSymbol:
    p: int
    k: int
    N: int
    values: np.ndarray  # (gens, N) or (gens, N, N)
    iterations: int = 0

    @property
    def twovar(self) -> bool:
        return self.values.ndim == 3

    def specialize(self) -> np.ndarray:
        k = self.k
        if self.twovar:
            return self.values[:, : k + 1, : k + 1]
        return self.values[:, : k + 1]


@dataclass
class DeformationResult:
    p: int
    k: int
    certified_precision: int
    derived_eigenvalues: dict[str, PadicNumber] = field(default_factory=dict)
    epsilon_part: np.ndarray | None = None
    direction: tuple | None = None
    solvable: str | None = None
    l_invariant: PadicNumber | None = None
    extra: dict = field(default_factory=dict)

    @property
    def tangent_dimension(self) -> str:
        return "1" if self.solvable == "class" else ">= 2"


def _slope(lam: int, p: int, n: int) -> int:
    v = valuation(lam % p**n, p)
    return n if v == float("inf") else int(v)


def _cache_path(cache_dir, key: dict) -> str:
    h = hashlib.sha256(json.dumps(key, sort_keys=True).encode()).hexdigest()[:24]
    return os.path.join(cache_dir, f"lift-{h}.npy")


def lift_overconvergent(ops: list[TermOperator], phi: np.ndarray, lam: int, p: int, k: int, N: int,
                        max_iter: int | None = None, start: np.ndarray | None = None,
                        cache_dir: str | None = None, cache_key: dict | None = None) -> OverconvergentSymbol:
    """Overconvergent lift of ``phi`` with ``U_p`` eigenvalue ``lam``.

    ``ops`` is the list of term operators whose composite is ``U_p``
    (one operator in the elliptic case, two in the Bianchi case).  ``phi``
    has shape ``(gens, k+1)`` or ``(gens, k+1, k+1)`` with residues mod at
    least ``p^N``.  ``start`` optionally supplies higher moments of the
    starting assignment (used to check independence of the start).
    """
    q = p**N
    if _slope(lam, p, N) >= k + 1:
        raise CriticalSlopeError("slope at least k + 1: lift not certified")
    if lam % p == 0:
        raise CriticalSlopeError("only ordinary (slope zero) eigenvalues are supported")
    twovar = phi.ndim == 3
    gens = phi.shape[0]
    path = None
    if cache_dir and cache_key is not None:
        path = _cache_path(cache_dir, dict(cache_key, p=p, k=k, N=N, lam=int(lam % q)))
        if os.path.exists(path):
            vals = np.load(path, allow_pickle=True)
            return OverconvergentSymbol(p, k, N, vals, 0)
    dt = np.int64 if _fits(q, N) else object
    shape = (gens, N, N) if twovar else (gens, N)
    cur = np.zeros(shape, dtype=dt) if start is None else np.asarray(start).astype(dt) % q
    if twovar:
        cur[:, : k + 1, : k + 1] = np.asarray(phi, dtype=object).astype(dt) % q
    else:
        cur[:, : k + 1] = np.asarray(phi, dtype=object).astype(dt) % q
    cur = reduce_filtration(cur, p, N, twovar)
    inv = pow(int(lam), -1, q)
    budget = max_iter or (2 * N + 10)
    for it in range(1, budget + 1):
        nxt = cur
        for op in ops:
            nxt = op.apply(nxt, k, N, p)
        nxt = reduce_filtration((nxt * inv) % q, p, N, twovar)
        if np.array_equal(nxt, cur):
            if path:
                os.makedirs(cache_dir, exist_ok=True)
                np.save(path, cur, allow_pickle=True)
            return OverconvergentSymbol(p, k, N, cur, it)
        cur = nxt
    raise LiftError(f"no fixed point after {budget} iterations")


def _fits(q, N):
    return N * q * q < 2**62


def relation_errors(rel_op: TermOperator, Phi: OverconvergentSymbol,
                    direction: tuple[int, int] = (1, 0)) -> tuple[np.ndarray, int]:
    """Error of the trivial deformation on every relation, with its certified precision."""
    E = rel_op.apply_log(Phi.values, Phi.k, Phi.N, Phi.p, direction)
    prec = log_precision(Phi.p, Phi.N, Phi.k, Phi.twovar)
    return E % Phi.p**prec, prec


def _flatten(x: np.ndarray) -> np.ndarray:
    return np.asarray(x, dtype=object).reshape(-1)


def _minus_identity(rows: list[dict], scalar: int, q: int) -> list[dict]:
    out = []
    for i, r in enumerate(rows):
        rr = dict(r)
        rr[i] = (rr.get(i, 0) - scalar) % q
        out.append({c: v for c, v in rr.items() if v})
    return out


def deformed_eigensystem(rel_op: TermOperator, hecke_ops: dict[str, TermOperator],
                         eigenvalues: dict[str, int], Phi: OverconvergentSymbol,
                         precision: int | None = None) -> DeformationResult:
    """Derivatives ``a_q'`` along the weight direction (elliptic case).

    Solves ``R psi = -E`` together with ``(T_q - a_q) psi - a_q' phi = -G_q``
    for all operators in ``hecke_ops`` simultaneously, over ``Z/p^m``.
    """
    p, k, N = Phi.p, Phi.k, Phi.N
    E, m = relation_errors(rel_op, Phi)
    if precision is not None:
        m = min(m, precision)
    q = p**m
    phi = Phi.specialize() % q
    phi_flat = _flatten(phi) % q
    n = len(phi_flat)
    rows = [dict(r) for r in rel_op.classical_rows(k, p, m)]
    rhs = list((-_flatten(E)) % q)
    labels = list(hecke_ops)
    spans = []
    for lab in labels:
        op = hecke_ops[lab]
        G = op.apply_log(Phi.values, k, N, p) % q
        start = len(rows)
        rows.extend(_minus_identity(op.classical_rows(k, p, m), eigenvalues[lab], q))
        rhs.extend(list((-_flatten(G)) % q))
        spans.append((start, len(rows)))
    tcols = []
    for start, stop in spans:
        col = [0] * len(rows)
        col[start:stop] = list((-phi_flat) % q)
        tcols.append(col)
    M = zpn.SparseMatrix(p, m, n, rows)
    sol, tker, _ = zpn._affine_solve(M, tcols + [rhs], p, m, len(labels))
    if sol is None:
        raise EigenMismatchError("augmented deformation system is unsolvable")
    psi = np.array([sol.get(j, 0) % q for j in range(n)], dtype=object).reshape(phi.shape)
    result = DeformationResult(p, k, m, epsilon_part=psi)
    for idx, lab in enumerate(labels):
        val = sol.get(n + idx, 0) % q
        s = m
        for row in tker:
            x = int(row[idx]) % q
            if x:
                s = min(s, int(valuation(x, p)))
        result.derived_eigenvalues[lab] = PadicNumber.from_int(val, p, s)
    result.extra["relation_error"] = E
    result.extra["phi"] = phi
    return result


def eigen_identity_residual(op: TermOperator, a_q: int, a_q_prime: int, psi: np.ndarray,
                            Phi: OverconvergentSymbol, m: int) -> np.ndarray:
    """``(T_q - a_q) psi + G_q - a_q' phi`` modulo ``p^m`` (zero for a valid result)."""
    p, k = Phi.p, Phi.k
    q = p**m
    G = op.apply_log(Phi.values, k, Phi.N, p) % q
    Tpsi = op.apply_classical(np.asarray(psi, dtype=object) % q, k, p, m)
    phi = Phi.specialize() % q
    return (Tpsi - a_q * np.asarray(psi, dtype=object) + G - a_q_prime * phi) % q


def l_invariant(a_p_prime: PadicNumber, k: int, p: int) -> PadicNumber:
    """``-2 p^(-k/2) a_p'``."""
    if a_p_prime is None:
        raise ValueError("a_p' is required")
    if k % 2:
        raise ValueError("odd k needs a square root of p")
    two = PadicNumber.from_int(-2, p, a_p_prime.precision + 1)
    return (two * a_p_prime).shift(-(k // 2))


def deformation_direction(rel_op: TermOperator, Phi: OverconvergentSymbol,
                          probe: tuple[int, int] | None = None,
                          precision: int | None = None) -> DeformationResult:
    """Direction ``(1, t)`` (or ``(0, 1)``) over two-dimensional weight space (Bianchi case).

    Finds every ``t`` for which ``E1 + t E2`` lies in the image of the
    classical relation map, i.e. the trivial deformation can be corrected
    by some ``psi``.  With ``probe`` the error along that direction is also
    computed independently and compared with the linear combination.
    """
    if not Phi.twovar:
        raise ValueError("deformation directions need two-variable distributions")
    p, k = Phi.p, Phi.k
    E1, m = relation_errors(rel_op, Phi, (1, 0))
    E2, _ = relation_errors(rel_op, Phi, (0, 1))
    if precision is not None:
        m = min(m, precision)
    q = p**m
    E1, E2 = E1 % q, E2 % q
    ncols = Phi.values.shape[0] * (k + 1) ** 2
    M = zpn.SparseMatrix(p, m, ncols, [dict(r) for r in rel_op.classical_rows(k, p, m)])
    sol = zpn.solve_pencil(M, _flatten(E1), _flatten(E2), p, m)
    result = DeformationResult(p, k, m, solvable=sol.kind)
    result.extra.update(E1=E1, E2=E2, pencil=sol)
    if sol.kind == "class":
        result.direction = (1, PadicNumber.from_int(sol.t0, p, sol.s))
        result.epsilon_part = (-np.asarray(sol.witness, dtype=object) % q).reshape(Phi.specialize().shape)
    elif sol.kind == "all":
        result.direction = None
    else:
        rows_only = zpn._affine_solve(M, [_flatten(E2)], p, m, 0)[0]
        if rows_only is None:
            raise InconsistencyError("no deformation direction: precision exhausted or inconsistent input")
        result.direction = (0, 1)
        result.solvable = "axis"
    if probe is not None:
        Ep, _ = relation_errors(rel_op, Phi, probe)
        comb = (probe[0] * E1 + probe[1] * E2) % q
        result.extra["probe"] = probe
        result.extra["probe_linear"] = bool(np.all((Ep % q - comb) % q == 0))
    return result
