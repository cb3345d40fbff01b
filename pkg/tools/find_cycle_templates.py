"""Search for relation templates of the Bianchi Manin presentation.

Every closed cycle of unimodular edges between cusps of K gives a relation
among Manin symbols.  This script enumerates chordless cycles through the
edge {0, oo}, reduces them modulo GL2(O_K), and writes one template per
equivalence class to ``src/eigentangent/data/cycle_templates.json``.

Usage: python3 tools/find_cycle_templates.py [--max-length 6] [--box 3]
"""

import argparse
import json
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from eigentangent.quadfield import EUCLIDEAN, QuadField  # noqa: E402
from eigentangent.bianchi import canonical_cusp, cycle_key, cycle_matrices, is_unimodular  # noqa: E402


def neighbours(K, cusp, box):
    a, c = cusp
    if c == (0, 0):
        return [((x, y), (1, 0)) for x in range(-box, box + 1) for y in range(-box, box + 1)]
    g, x, y = K.xgcd(c, a)  # x c + y a = g (unit)
    ginv = K.inverse_unit(g)
    x, y = K.mul(x, ginv), K.mul(y, ginv)
    # M = [[x', a], [y', c]] with x' c - a y' = 1: x' = x, y' = -y
    xp, yp = x, K.neg(y)
    out = [canonical_cusp(K, (xp, yp))]
    for bx in range(-box, box + 1):
        for by in range(-box, box + 1):
            b = (bx, by)
            num = K.sub(K.mul(a, b), xp)
            den = K.sub(K.mul(c, b), yp)
            out.append(canonical_cusp(K, (num, den)))
    return out


def search(K, max_len, box, max_height):
    inf = (((1, 0), (0, 0)))
    zero = canonical_cusp(K, ((0, 0), (1, 0)))
    found = {}

    def height(c):
        return K.norm(c[1]) if c[1] != (0, 0) else 0

    def dfs(path):
        last = path[-1]
        for nb in neighbours(K, last, box):
            if nb in path or height(nb) > max_height:
                continue
            closes = is_unimodular(K, nb, inf)
            # chordless: nb may touch only `last` (and oo if it closes)
            chord = False
            for v in path[:-1]:
                if v == inf and closes:
                    continue
                if is_unimodular(K, nb, v):
                    chord = True
                    break
            if chord:
                continue
            cyc = path + [nb]
            if closes:
                if len(cyc) >= 3:
                    key = cycle_key(K, cyc)
                    if key not in found:
                        found[key] = cyc
                continue
            if len(cyc) < max_len:
                dfs(cyc)

    dfs([inf, zero])
    return found


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-length", type=int, default=6)
    ap.add_argument("--box", type=int, default=3)
    ap.add_argument("--max-height", type=int, default=30)
    args = ap.parse_args()
    data = {"format_version": 1, "fields": {}}
    for d in EUCLIDEAN:
        K = QuadField(d)
        found = search(K, args.max_length, args.box, args.max_height)
        temps = []
        for key in sorted(found, key=lambda k: (len(k), k)):
            cyc = found[key]
            temps.append({"cusps": [[list(a), list(c)] for a, c in cyc],
                          "matrices": [[list(e) for e in m] for m in cycle_matrices(K, cyc)]})
        data["fields"][str(d)] = temps
        print(d, [len(t["cusps"]) for t in temps])
    out = os.path.join(os.path.dirname(__file__), "..", "src", "eigentangent", "data", "cycle_templates.json")
    with open(out, "w") as fh:
        json.dump(data, fh, indent=1)


if __name__ == "__main__":
    main()
