"""Wall-time benchmarks for the deformation pipelines.

Records one row per run: kind, label, N (depth), k, d (field, 0 for Q), p and
seconds.  Nothing is asserted; the output is for tracking scaling.

Usage: python3 benchmarks/bench.py [--full] [--out bench.json]
"""

import argparse
import json
import platform
import time

from eigentangent import pipeline
from eigentangent.quadfield import QuadField

QUICK = {
    "elliptic": [("11.2.a.a", 11, [8, 10, 12]), ("15.2.a.a", 3, [8, 10, 12]), ("5.4.a.a", 3, [10, 12])],
    "bianchi": [(-11, "sqrt(-11)", "(1+sqrt(-11))/2", [4, 5, 6])],
}
FULL = {
    "elliptic": QUICK["elliptic"] + [("55.2.a.a", 5, [10, 12, 14]), ("11.2.a.a", 11, [16, 20])],
    "bianchi": QUICK["bianchi"] + [(-11, "9+sqrt(-11)", "(1+sqrt(-11))/2", [7]),
                                   (-11, "6-sqrt(-11)", "(-3+sqrt(-11))/2", [6]),
                                   (-3, "(17+sqrt(-3))/2", "(5+sqrt(-3))/2", [6])],
}


def run(cases):
    entries = pipeline.load_eigendata()
    rows = []
    for label, p, depths in cases["elliptic"]:
        form = pipeline.find_elliptic(entries, label)
        for N in depths:
            t0 = time.perf_counter()
            pipeline.elliptic_deformation(form, p, N - 2 * form.k - 2, depth=N)
            rows.append({"kind": "elliptic", "label": label, "N": N, "k": form.k, "d": 0, "p": p,
                         "seconds": round(time.perf_counter() - t0, 3)})
            print(rows[-1], flush=True)
    for d, level, prime, depths in cases["bianchi"]:
        K = QuadField(d)
        form = pipeline.find_bianchi(entries, d, K.parse(level))
        pi = K.parse(prime)
        for N in depths:
            t0 = time.perf_counter()
            pipeline.bianchi_deformation(form, pi, N - 2, depth=N)
            rows.append({"kind": "bianchi", "label": form.label, "N": N, "k": 0, "d": d, "p": K.norm(pi),
                         "seconds": round(time.perf_counter() - t0, 3)})
            print(rows[-1], flush=True)
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--full", action="store_true", help="include the slow Bianchi levels")
    ap.add_argument("--out", default=None, help="write results as JSON")
    args = ap.parse_args()
    rows = run(FULL if args.full else QUICK)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump({"python": platform.python_version(), "machine": platform.machine(), "runs": rows}, fh,
                      indent=1)


if __name__ == "__main__":
    main()
