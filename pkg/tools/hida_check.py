"""Finite-difference check of weight derivatives along an ordinary Hida family.

For 5.4.a.a at p = 3 the ordinary cuspidal family through its 3-stabilization
(level 15) has rank one.  Classical eigenvalues at weights k+2 with
k = 2, 20, 56 are computed from symbols mod 3^12 by ordinary projection, and

    (a_q(k') - a_q(2)) / (k' - 2)

approximates the derivative in the weight variable to the precision set by
v_3(k' - 2).  The script prints these next to the deformation pipeline.

Usage: python3 tools/hida_check.py
"""

import os
import random
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from eigentangent import pipeline, zpn  # noqa: E402
from eigentangent.elliptic import (  # noqa: E402
    apply_terms_exact,
    build_presentation,
    hecke_terms,
    involution_terms,
    terms_to_rows,
)
from eigentangent.padic import render, valuation  # noqa: E402

P, PREC, LEVEL = 3, 12, 15
OPS = (3, 2, 7, 11, 13)
MOD = P**PREC


def ordinary_eigenvalues(pres, k):
    """Eigenvalues mod ``3^PREC`` (up to a loss of the leading valuation) in weight ``k + 2``."""
    ng, w = pres.ngens, k + 1
    rows = terms_to_rows(pres.relations, ng, k)
    A = np.zeros((len(rows), ng * w), dtype=np.int64)
    for i, r in enumerate(rows):
        for c, v in r.items():
            A[i, c] = v % MOD
    gens = zpn.kernel(zpn.ZpnMatrix(P, PREC, A)).entries

    def split(v):
        return [[int(x) for x in v[j * w:(j + 1) * w]] for j in range(ng)]

    def flat(vals):
        return np.array([x for r in vals for x in r], dtype=object) % MOD

    rng = random.Random(1)
    v = np.zeros(ng * w, dtype=object)
    for g in gens:
        v = (v + rng.randrange(MOD) * np.array(g, dtype=object)) % MOD
    v = (v + flat(apply_terms_exact(involution_terms(pres), split(v), k))) % MOD
    U = hecke_terms(pres, P)
    for _ in range(3 * PREC):  # ordinary projection
        v = flat(apply_terms_exact(U, split(v), k))
    T2, e2 = hecke_terms(pres, 2), 1 + 2 ** (k + 1)
    for _ in range(3):  # kill the Eisenstein part
        v = (flat(apply_terms_exact(T2, split(v), k)) - e2 * v) % MOD

    vv = [int(x) for x in v]
    vmin = min(valuation(x, P) for x in vv if x)
    i0 = next(i for i, x in enumerate(vv) if x and valuation(x, P) == vmin)
    out = {}
    for q in OPS:
        img = flat(apply_terms_exact(hecke_terms(pres, q), split(v), k))
        lam = (img[i0] // P**vmin) * pow(vv[i0] // P**vmin, -1, MOD) % MOD
        if np.any((img - lam * v) % P ** (PREC - vmin - 1)):
            raise RuntimeError(f"not an eigenvector for T_{q} in weight {k + 2}")
        out[q] = lam
    return out


def main():
    pres = build_presentation(LEVEL)
    base = ordinary_eigenvalues(pres, 2)
    data = pipeline.find_elliptic(pipeline.load_eigendata(), "5.4.a.a")
    run = pipeline.elliptic_deformation(data, P, 7)
    for k2 in (20, 56):
        far = ordinary_eigenvalues(pres, k2)
        s = k2 - 2
        vs = valuation(s, P)
        digits = vs + 2  # the second-order term has valuation >= v(s) + 2
        print(f"weight {k2 + 2}: finite differences mod 3^{digits}")
        for q in OPS:
            diff = (far[q] - base[q]) % MOD
            fd = (diff // P**vs) * pow(s // P**vs, -1, MOD) % P**digits
            lab = f"{'U' if LEVEL % q == 0 else 'T'}_{q}"
            ours = run.result.derived_eigenvalues[lab].residue(digits)
            print(f"  {lab:<5} difference {fd:>4}  pipeline {ours:>4}  {'agree' if fd == ours else 'DIFFER'}"
                  f"   ({render(run.result.derived_eigenvalues[lab])})")


if __name__ == "__main__":
    main()
