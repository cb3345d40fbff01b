"""
Deformation directions over an imaginary quadratic field
=========================================================

Over K = Q(sqrt(-d)) the weight space is two-dimensional, and a Bianchi
eigenform at a split prime deforms along a line (1, t) in it.  A base change
from Q must deform in the parallel direction (t = 1); a form that is not a
base change generally does not.
"""

from eigentangent import pipeline
from eigentangent.padic import render
from eigentangent.quadfield import QuadField

entries = pipeline.load_eigendata()
K = QuadField(-11)


def direction(level, prime, digits):
    form = pipeline.find_bianchi(entries, -11, K.parse(level))
    run = pipeline.bianchi_deformation(form, K.parse(prime), digits, probe=(1, 1))
    res = run.result
    print(f"level ({level}), prime ({prime}), depth {run.depth}")
    print("  solvable set:", res.solvable, " tangent dimension:", res.tangent_dimension)
    print("  t =", render(run.t.add_bigoh(digits)), " parallel mod p:", run.parallel_mod_p())
    print("  error along (1, 1) equals e1 + e2:", res.extra["probe_linear"])


# base change of 11a: level (sqrt(-11)), prime w = (1 + sqrt(-11))/2 of norm 3
direction("sqrt(-11)", "(1+sqrt(-11))/2", 4)

# a form at level norm 92 that is not a base change
direction("9+sqrt(-11)", "(1+sqrt(-11))/2", 5)
