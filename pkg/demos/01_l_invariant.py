"""
L-invariant of the elliptic curve 11a at p = 11
================================================

The curve 11a has split multiplicative reduction at 11, so its weight-two
newform is ordinary there and sits in a Hida family.  Differentiating the
U_11 eigenvalue along that family gives the L-invariant

    L = -2 p^(-k/2) a_p'  (k = 0 here),

which for a Tate curve equals log(q_E) / ord(q_E).
"""

from eigentangent import pipeline
from eigentangent.padic import render

entries = pipeline.load_eigendata()
form = pipeline.find_elliptic(entries, "11.2.a.a")
print("level", form.level, "weight", form.weight, "a_2 =", form.eigenvalues["2"])

# depth is chosen automatically from the target precision
run = pipeline.elliptic_deformation(form, p=11, digits=8)
print("finite approximation depth:", run.depth)

ap = run.result.derived_eigenvalues["U_11"]
print("a_11' =", render(ap.add_bigoh(8)))
print("L     =", render(run.l_invariant.add_bigoh(8)))

# The same class solves the weight-direction equation for every Hecke operator,
# so the derivatives of all eigenvalues come out of one linear solve.
for lab, v in run.result.derived_eigenvalues.items():
    print(f"  {lab:<5} {render(v.add_bigoh(8))}")
