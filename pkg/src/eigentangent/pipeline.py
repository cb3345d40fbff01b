"""End-to-end runs: eigen-data in, derivatives or deformation directions out."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from . import bianchi, elliptic
from .deformation import (
    DeformationResult,
    EigenMismatchError,
    deformation_direction,
    deformed_eigensystem,
    eigen_identity_residual,
    l_invariant,
    lift_overconvergent,
)
from .distributions import log_precision
from .elliptic import EigenData
from .operators import TermOperator
from .padic import PadicError
from .quadfield import QuadField

DEFAULT_DATA = os.path.join(os.path.dirname(__file__), "data", "eigendata.json")


class DataError(ValueError):
    """Malformed eigen-data file or unknown entry."""


class PrecisionError(PadicError):
    """Requested digits not reached within the depth budget."""


class ConfigError(ValueError):
    """Invalid run configuration."""


def check_depth(depth: int | None, digits: int, k: int) -> None:
    if digits < 1:
        raise ConfigError("digits must be at least 1")
    if depth is not None and depth < digits + 2 * k + 2:
        raise ConfigError(f"depth {depth} too small: need at least digits + 2k + 2 = {digits + 2 * k + 2}")


# -- eigen-data ---------------------------------------------------------------------------------


def load_eigendata(path: str | None = None) -> list[EigenData]:
    try:
        with open(path or DEFAULT_DATA, encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read eigen-data: {exc}") from exc
    if not isinstance(raw, dict) or raw.get("format_version") != 1 or "entries" not in raw:
        raise DataError("eigen-data must be an object with format_version 1 and entries")
    out, seen = [], set()
    for e in raw["entries"]:
        try:
            ent = EigenData(label=str(e["label"]), weight=int(e["weight"]), level=e["level"],
                            eigenvalues={str(k): int(v) for k, v in e["eigenvalues"].items()},
                            kind=e.get("kind", "elliptic"), field_d=e.get("field_d"))
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"malformed entry {e!r}: {exc}") from exc
        if ent.label in seen:
            raise DataError(f"duplicate label {ent.label}")
        seen.add(ent.label)
        if ent.kind == "elliptic":
            ent.level = int(ent.level)
        elif ent.kind == "bianchi":
            K = QuadField(int(ent.field_d))
            ent.level = K.canonical_generator(K.parse(str(ent.level)))
            bianchi.eigenvalue_map(K, ent.eigenvalues)  # every label must parse
        else:
            raise DataError(f"unknown kind {ent.kind!r}")
        out.append(ent)
    return out


def find_elliptic(entries, label: str) -> EigenData:
    for e in entries:
        if e.kind == "elliptic" and e.label == label:
            return e
    raise DataError(f"unknown label {label}")


def find_bianchi(entries, d: int, level) -> EigenData:
    K = QuadField(d)
    g = K.canonical_generator(level)
    for e in entries:
        if e.kind == "bianchi" and e.field_d == d and K.canonical_generator(e.level) == g:
            return e
    raise DataError(f"no Bianchi eigen-data for d={d}, level {K.format(g)}")


# -- elliptic -----------------------------------------------------------------------------------


def _op_label(q: int, level: int) -> str:
    return f"{'U' if level % q == 0 else 'T'}_{q}"


def _parse_op(text: str) -> int:
    return int(str(text).strip().split("_")[-1])


@dataclass
class EllipticRun:
    result: DeformationResult
    depth: int
    labels: dict  # operator label -> prime
    l_invariant: object = None


def _depth_for(p: int, digits: int, k: int, twovar: bool) -> int:
    N = k + 2
    while log_precision(p, N, k, twovar) < digits + 1:
        N += 1
    return N


def elliptic_deformation(data: EigenData, p: int, digits: int, depth: int | None = None,
                         ops: list | None = None, cache: str | None = None,
                         max_retries: int = 3) -> EllipticRun:
    """Derivatives ``a_q'`` for the ordinary eigensymbol of ``data`` at ``p``."""
    k = data.k
    check_depth(depth, digits, k)
    N = depth or _depth_for(p, digits, k, False)
    primes = [p] + [q for q in data.primes() if q != p] if ops is None else [_parse_op(o) for o in ops]
    for attempt in range(max_retries + 1):
        ps = elliptic.eigensymbol(data, p, N + 2)
        pres = ps.pres
        U = TermOperator.from_terms(elliptic.hecke_terms(pres, p))
        key = {"kind": "elliptic", "label": data.label} if cache else None
        Phi = lift_overconvergent([U], ps.values, ps.up_eigenvalue, p, k, N, cache_dir=cache, cache_key=key)
        rel = TermOperator.from_terms(pres.relations)
        hops, ev, labels = {}, {}, {}
        for q in primes:
            if q != p and q not in ps.eigenvalues:
                raise DataError(f"eigen-data for {data.label} has no eigenvalue at {q}")
            lab = _op_label(q, pres.level)
            labels[lab] = q
            hops[lab] = U if q == p else TermOperator.from_terms(elliptic.hecke_terms(pres, q))
            ev[lab] = ps.up_eigenvalue if q == p else ps.eigenvalues[q]
        res = deformed_eigensystem(rel, hops, ev, Phi)
        m = res.certified_precision
        psi = res.epsilon_part
        for lab, op in hops.items():
            a1 = res.derived_eigenvalues[lab]
            mm = int(min(m, a1.precision))
            if np.any(eigen_identity_residual(op, ev[lab], a1.residue(mm), psi, Phi, mm)):
                raise EigenMismatchError(f"eigen-identity fails for {lab}")
        worst = min(v.precision for v in res.derived_eigenvalues.values())
        if depth is not None or worst >= digits or attempt == max_retries:
            break
        N += int(digits - worst) + 1
    res.extra["depth"] = N
    run = EllipticRun(res, N, labels)
    up = f"U_{p}"  # p divides the (stabilized) level
    if k % 2 == 0 and up in res.derived_eigenvalues:
        run.l_invariant = l_invariant(res.derived_eigenvalues[up], k, p)
    return run


# -- Bianchi ------------------------------------------------------------------------------------


@dataclass
class BianchiRun:
    result: DeformationResult
    depth: int
    symbol: bianchi.BianchiEigensymbol

    @property
    def t(self):
        return self.result.direction[1] if self.result.direction else None

    def parallel_mod_p(self) -> bool:
        """Whether ``t = 1 mod p`` (direction congruent to the parallel one)."""
        t = self.t
        return t is not None and t.precision >= 1 and t.residue(1) == 1


def bianchi_operators(sym: bianchi.BianchiEigensymbol, width: int):
    K = sym.pres.K
    emb = bianchi.SplitEmbedding.make(K, sym.pi, width)
    up = TermOperator.from_terms(bianchi.hecke_terms_bianchi(sym.pres, sym.pi), emb.pair)
    upb = TermOperator.from_terms(bianchi.hecke_terms_bianchi(sym.pres, K.conj(sym.pi)), emb.pair)
    rel = TermOperator.from_terms(sym.pres.relations, emb.pair)
    return up, upb, rel


def bianchi_deformation(data: EigenData, pi, digits: int, depth: int | None = None,
                        cache: str | None = None, probe: tuple[int, int] | None = None,
                        max_retries: int = 3, check: bool = True) -> BianchiRun:
    """Deformation direction ``(1, t)`` for the weight-(2, 2) form of ``data`` at the prime ``(pi)``."""
    d = int(data.field_d)
    K = QuadField(d)
    if data.k != 0:
        raise NotImplementedError("Bianchi runs are implemented for weight (2, 2)")
    pres = bianchi.build_bianchi_presentation(K, data.level)
    ev = bianchi.eigenvalue_map(K, data.eigenvalues)
    p = K.norm(pi)
    check_depth(depth, digits, 0)
    N = depth or _depth_for(p, digits, 0, True)
    sym = None
    for attempt in range(max_retries + 1):
        if sym is None or sym.n < N + 2:
            sym = bianchi.bianchi_eigensymbol(pres, ev, pi, N + 2)
        up, upb, rel = bianchi_operators(sym, N + 4)
        q = p ** (N + 2)
        phi = np.array(sym.values, dtype=object).reshape(-1, 1, 1)
        if check:
            for op, lam in ((up, sym.alpha), (upb, sym.alpha_bar)):
                if np.any((op.apply_classical(phi, 0, p, N + 2) - lam * phi) % q):
                    raise EigenMismatchError("stabilized symbol is not a U eigenvector")
            if np.any(rel.apply_classical(phi, 0, p, N + 2) % q):
                raise EigenMismatchError("stabilized symbol violates the relations")
        key = None
        if cache:
            key = {"kind": "bianchi", "d": d, "level": list(data.level), "prime": list(K.canonical_generator(pi))}
        Phi = lift_overconvergent([up, upb], phi, sym.up_eigenvalue, p, 0, N, cache_dir=cache, cache_key=key)
        res = deformation_direction(rel, Phi, probe=probe)
        done = res.solvable != "class" or res.direction[1].precision >= digits
        if depth is not None or done or attempt == max_retries:
            break
        N += int(digits - res.direction[1].precision)
    res.extra["depth"] = N
    return BianchiRun(res, N, sym)
