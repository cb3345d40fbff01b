"""Command-line interface: ``eigentangent {elliptic-deform,bianchi-deform,l-invariant}``.

Exit codes
----------
0  success at the requested precision
2  usage error
3  eigen-data error (unknown label, malformed file)
4  eigensymbol identification failed
5  critical or non-ordinary slope
6  requested precision not reached
7  eigen-data inconsistent with the computed symbol
8  unsupported field
"""

from __future__ import annotations

import argparse
import json
import sys

from . import pipeline
from .deformation import (
    CriticalSlopeError,
    EigenMismatchError,
    InconsistencyError,
    LiftError,
)
from .elliptic import IdentificationError
from .padic import NonOrdinaryError, PadicNumber, render
from .quadfield import QuadField, UnsupportedFieldError

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_IDENT, EXIT_SLOPE, EXIT_PRECISION, EXIT_MISMATCH, EXIT_FIELD = 0, 2, 3, 4, 5, 6, 7, 8


def padic_json(x: PadicNumber) -> dict:
    """Digits from ``p^valuation`` up to the absolute precision."""
    val = None if x.unit == 0 else int(x.valuation)
    return {"value": render(x), "p": x.prime, "valuation": val, "digits": x.digits() if x.unit else [],
            "precision": int(x.precision)}


def padic_from_json(obj: dict) -> PadicNumber:
    p, prec = int(obj["p"]), int(obj["precision"])
    if obj["valuation"] is None:
        return PadicNumber.inexact_zero(p, prec)
    unit = sum(c * p**i for i, c in enumerate(obj["digits"]))
    return PadicNumber(p, int(obj["valuation"]), unit, len(obj["digits"]))


def _cap(x: PadicNumber, digits: int) -> PadicNumber:
    return x.add_bigoh(digits) if x.precision > digits else x


def _emit(payload: dict, lines: list[str], fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(payload, indent=1))
    else:
        print("\n".join(lines))


def cmd_elliptic_deform(args) -> int:
    entries = pipeline.load_eigendata(args.data)
    data = pipeline.find_elliptic(entries, args.label)
    ops = [o for o in args.ops.split(",") if o] if args.ops else None
    run = pipeline.elliptic_deformation(data, args.p, args.digits, depth=args.depth, ops=ops, cache=args.cache)
    derived = {lab: _cap(v, args.digits) for lab, v in run.result.derived_eigenvalues.items()}
    lines = [f"Derivatives of Hecke eigenvalues for {data.label} at p = {args.p} (depth {run.depth})",
             f"{'Operator':<10} Derivative"]
    lines += [f"{lab:<10} {render(v)}" for lab, v in derived.items()]
    payload = {"label": data.label, "p": args.p, "depth": run.depth,
               "certified_precision": min(int(v.precision) for v in derived.values()),
               "derivatives": {lab: padic_json(v) for lab, v in derived.items()}}
    _emit(payload, lines, args.format)
    short = [lab for lab, v in derived.items() if v.precision < args.digits]
    if short:
        print(f"precision below O({args.p}^{args.digits}) for: {', '.join(short)}", file=sys.stderr)
        return EXIT_PRECISION
    return EXIT_OK


def cmd_l_invariant(args) -> int:
    entries = pipeline.load_eigendata(args.data)
    data = pipeline.find_elliptic(entries, args.label)
    run = pipeline.elliptic_deformation(data, args.p, args.digits, depth=args.depth, ops=[f"U_{args.p}"],
                                        cache=args.cache)
    ap = _cap(run.result.derived_eigenvalues[f"U_{args.p}"], args.digits)
    L = pipeline.l_invariant(ap, data.k, args.p)
    nonzero = not L.is_zero()
    lines = [f"L-invariant of {data.label} at p = {args.p}: {render(L)}",
             f"a_p' = {render(ap)}",
             f"non-zero: {'yes' if nonzero else 'NO'}"]
    payload = {"label": data.label, "p": args.p, "l_invariant": padic_json(L), "a_p_prime": padic_json(ap),
               "nonzero": nonzero, "certified_precision": int(L.precision)}
    _emit(payload, lines, args.format)
    return EXIT_OK if ap.precision >= args.digits else EXIT_PRECISION


def _parse_probe(text: str | None):
    if not text:
        return None
    a, b = text.split(",")
    return int(a), int(b)


def cmd_bianchi_deform(args) -> int:
    K = QuadField(args.d)
    entries = pipeline.load_eigendata(args.data)
    level = K.parse(args.level)
    prime = K.parse(args.prime)
    data = pipeline.find_bianchi(entries, args.d, level)
    run = pipeline.bianchi_deformation(data, prime, args.digits, depth=args.depth, cache=args.cache,
                                       probe=_parse_probe(args.direction_probe))
    res = run.result
    if res.solvable == "class":
        t = _cap(res.direction[1], args.digits)
        direction = render(t)
    elif res.solvable == "axis":
        t, direction = None, "(0, 1)"
    else:
        t, direction = None, "undetermined (every t solvable)"
    parallel = run.parallel_mod_p()
    lines = [f"Field      Q(sqrt({args.d}))",
             f"Level      ({K.format(data.level)}), norm {K.norm(data.level)}",
             f"Prime      ({K.format(K.canonical_generator(prime))}), norm {K.norm(prime)}",
             f"Direction of deformation (1, _): {direction}",
             f"Tangent dimension: {res.tangent_dimension}",
             f"t = 1 mod p (parallel direction): {'yes' if parallel else 'no'}",
             f"Depth {run.depth}, certified error precision O({K.norm(prime)}^{res.certified_precision})"]
    payload = {"d": args.d, "level": K.format(data.level), "prime": K.format(K.canonical_generator(prime)),
               "solvable": res.solvable, "tangent_dimension": res.tangent_dimension,
               "t": padic_json(t) if t is not None else None, "parallel_mod_p": parallel,
               "depth": run.depth, "certified_precision": res.certified_precision}
    if "probe" in res.extra:
        ok = res.extra["probe_linear"]
        lines.append(f"Direction probe {res.extra['probe']}: error equals the linear combination: "
                     f"{'yes' if ok else 'NO'}")
        payload["probe"] = {"direction": list(res.extra["probe"]), "linear": ok}
    _emit(payload, lines, args.format)
    if "probe" in res.extra and not res.extra["probe_linear"]:
        return EXIT_MISMATCH
    if t is not None and t.precision < args.digits:
        return EXIT_PRECISION
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="eigentangent", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--digits", type=int, default=6, help="target p-adic precision")
        p.add_argument("--depth", type=int, default=None, help="override the finite approximation depth N")
        p.add_argument("--data", default=None, help="eigen-data JSON (default: shipped file)")
        p.add_argument("--format", choices=["table", "json"], default="table")
        p.add_argument("--cache", default=None, help="directory for cached overconvergent lifts")

    e = sub.add_parser("elliptic-deform", help="derivatives of Hecke eigenvalues along weight")
    e.add_argument("--label", required=True)
    e.add_argument("--p", type=int, required=True)
    e.add_argument("--ops", default=None, help="comma separated, e.g. U_11,T_2,T_3")
    common(e)
    e.set_defaults(func=cmd_elliptic_deform)

    li = sub.add_parser("l-invariant", help="L-invariant -2 p^(-k/2) a_p'")
    li.add_argument("--label", required=True)
    li.add_argument("--p", type=int, required=True)
    common(li)
    li.set_defaults(func=cmd_l_invariant)

    b = sub.add_parser("bianchi-deform", help="deformation direction over two-dimensional weight space")
    b.add_argument("--d", type=int, required=True)
    b.add_argument("--level", required=True, help="level generator, e.g. '9+sqrt(-11)' or '8+2*w'")
    b.add_argument("--prime", required=True, help="generator of a split prime, e.g. '(1+sqrt(-11))/2'")
    b.add_argument("--direction-probe", default=None, help="also check the error along a,b for linearity")
    common(b)
    b.set_defaults(func=cmd_bianchi_deform)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.digits < 1:
        parser.error("--digits must be at least 1")
    try:
        return args.func(args)
    except pipeline.ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except pipeline.DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except UnsupportedFieldError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FIELD
    except IdentificationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IDENT
    except (NonOrdinaryError, CriticalSlopeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SLOPE
    except (EigenMismatchError, InconsistencyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except (LiftError, pipeline.PrecisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECISION


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
