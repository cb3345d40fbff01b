"""Compute the rational cuspidal eigen-systems shipped in ``data/eigendata.json``.

Each entry is certified by exact linear algebra over Q: the listed Hecke
eigenvalues cut out a one-dimensional subspace of the symbol space.  For
elliptic levels the plus part of ``diag(-1, 1)`` is used.

Usage: python3 tools/find_eigendata.py [--out PATH]
"""

import argparse
import json
import math
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from eigentangent import bianchi, elliptic, ratlinalg  # noqa: E402
from eigentangent.eigensearch import Operator, rational_eigensystems  # noqa: E402
from eigentangent.quadfield import QuadField, primes_above  # noqa: E402

ELLIPTIC = [("11.2.a.a", 11, 2), ("15.2.a.a", 15, 2), ("55.2.a.a", 55, 2), ("5.4.a.a", 5, 4)]
BIANCHI = [(-11, (8, 2)), (-11, (7, -2)), (-11, (2, 5)), (-3, (8, 1)), (-11, (-1, 2))]
SMALL_PRIMES = [2, 3, 5, 7, 11, 13]


def _flat_apply(terms, k):
    w = k + 1

    def apply(v):
        vals = [v[i * w:(i + 1) * w] for i in range(len(v) // w)]
        out = elliptic.apply_terms_exact(terms, vals, k)
        return [x for row in out for x in row]

    return apply


def elliptic_entry(label, M, weight):
    k = weight - 2
    pres = elliptic.build_presentation(M)
    n = pres.ngens * (k + 1)
    basis, free = ratlinalg.kernel_with_free(elliptic._dense(elliptic.relation_rows(pres, k), n), n)
    ops = [Operator("sign", _flat_apply(elliptic.involution_terms(pres), k), [1])]
    for q in SMALL_PRIMES:
        bound = q ** (k + 1) if M % q == 0 else math.isqrt(4 * q ** (k + 1))
        ops.append(Operator(str(q), _flat_apply(elliptic.hecke_terms(pres, q), k), range(-bound, bound + 1)))
    systems = rational_eigensystems(basis, free, ops)
    if len(systems) != 1:
        raise SystemExit(f"{label}: expected one rational system, found {len(systems)}")
    ev = {q: a for q, a in systems[0][0].items() if q != "sign"}
    return {"label": label, "kind": "elliptic", "weight": weight, "level": str(M), "eigenvalues": ev}


def bianchi_entry(d, level, max_norm=30):
    K = QuadField(d)
    pres = bianchi.build_bianchi_presentation(K, level)
    n = pres.ngens
    rows = bianchi.relation_rows_bianchi(pres)
    basis, free = ratlinalg.kernel_with_free([[r.get(c, 0) for c in range(n)] for r in rows], n)
    ops = []
    for q in range(2, max_norm + 1):
        if any(q % r == 0 for r in range(2, q)):
            continue
        for pi in primes_above(d, q):
            nm = K.norm(pi)
            if nm > max_norm or K.divides(pi, level):
                continue
            terms = bianchi.hecke_terms_bianchi(pres, pi)
            bound = math.isqrt(4 * nm)
            ops.append(Operator(bianchi.ideal_label(K, pi),
                                lambda v, t=terms: bianchi.apply_terms_trivial(t, v),
                                range(-bound, bound + 1)))
    systems = rational_eigensystems(basis, free, ops)
    if len(systems) != 1:
        raise SystemExit(f"d={d} level {level}: expected one rational cuspidal system, found {len(systems)}")
    nm = K.norm(level)
    return {"label": f"bianchi{d}.{nm}", "kind": "bianchi", "weight": 2, "field_d": d,
            "level": K.format(level), "eigenvalues": systems[0][0]}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "src", "eigentangent",
                                                   "data", "eigendata.json"))
    args = ap.parse_args()
    entries = []
    for label, M, weight in ELLIPTIC:
        entries.append(elliptic_entry(label, M, weight))
        print(entries[-1])
    for d, level in BIANCHI:
        entries.append(bianchi_entry(d, level))
        print(entries[-1])
    with open(args.out, "w") as fh:
        json.dump({"format_version": 1, "entries": entries}, fh, indent=1)


if __name__ == "__main__":
    main()
