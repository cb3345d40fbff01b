"""
Hecke eigenvalue derivatives for several newforms
==================================================

Tables of a_q' for a few ordinary newforms.  Weight two needs only the
classical modular symbol; weight four (5.4.a.a at p = 3) exercises the
weight-k action on distributions.
"""

import time

from eigentangent import pipeline
from eigentangent.padic import render

entries = pipeline.load_eigendata()

for label, p, digits in [("15.2.a.a", 3, 7), ("55.2.a.a", 5, 8), ("5.4.a.a", 3, 7)]:
    form = pipeline.find_elliptic(entries, label)
    t0 = time.perf_counter()
    run = pipeline.elliptic_deformation(form, p, digits)
    print(f"\n{label} at p = {p}  (depth {run.depth}, {time.perf_counter() - t0:.1f} s)")
    for lab, v in run.result.derived_eigenvalues.items():
        print(f"  {lab:<5} {render(v.add_bigoh(digits))}")
