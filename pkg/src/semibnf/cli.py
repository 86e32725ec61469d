"""Command-line front end: ``semibnf <command> ...``.

Exit status: 0 on success, 1 when a check runs and fails (round-trip,
scan or partition), 2 on invalid input, 3 on numerical failure.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
import time
from fractions import Fraction
from typing import List, Optional, Sequence

from .bnf import BNFData, bnf_of_hamiltonian
from .errors import BNFError, NumericError, ValidationError
from .inverse import invert_spectrum
from .oracle import eigenvalues_1d, eigenvalues_2d, hbar_scan
from .resonant import cluster_spectrum, resonant_average
from .scalars import ExactReal, format_exact, parse_exact
from .serialize import (dump_bnf, dump_spectrum, format_float, load_json, parse_bnf, parse_hamiltonian,
                        parse_potential, parse_spectrum, parse_symbol, write_json)
from .spectrum import partition_identity_check, spectrum_forward

EXIT_OK, EXIT_MISMATCH, EXIT_VALIDATION, EXIT_NUMERIC = 0, 1, 2, 3


def _floats(text: str) -> List[float]:
    try:
        return [float(Fraction(t)) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ValidationError(f"expected a comma-separated list of numbers, got {text!r}") from None


def _ints(text: str) -> List[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ValidationError(f"expected a comma-separated list of integers, got {text!r}") from None


# ---------------------------------------------------------------------------
# commands


def cmd_bnf(args) -> int:
    if args.degree < 4 or args.degree % 2:
        raise ValidationError("--degree must be even and >= 4")
    H = parse_hamiltonian(load_json(args.input), truncation=args.degree)
    write_json(dump_bnf(bnf_of_hamiltonian(H)), args.out)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    b = parse_bnf(load_json(args.bnf))
    if not isinstance(b, BNFData):
        raise ValidationError("spectrum needs an exact normal form")
    write_json(dump_spectrum(spectrum_forward(b, args.levels, args.order)), args.out)
    return EXIT_OK


def cmd_invert(args) -> int:
    ds = parse_spectrum(load_json(args.input))
    if ds.order < 2:
        raise ValidationError("invert needs order J >= 2")
    b = invert_spectrum(ds, d=args.dim, tolerance=args.tolerance, check_tail=not args.no_tail_check)
    write_json(dump_bnf(b), args.out)
    return EXIT_OK


def random_bnf(rng: random.Random, omegas=("1", "sqrt(2)"), max_order: int = 4) -> BNFData:
    """Seeded random normal form with small rational coefficients."""
    d = len(omegas)
    coeffs = {}
    for order in range(2, max_order + 1):
        for l in range(order + 1):
            for alpha in _compositions(order - l, d):
                if rng.random() < 0.6:
                    coeffs[(l, alpha)] = Fraction(rng.randint(-9, 9), rng.randint(1, 9))
    E0 = Fraction(rng.randint(-5, 5), rng.randint(1, 5))
    E1 = Fraction(rng.randint(-5, 5), rng.randint(1, 5))
    return BNFData([parse_exact(w) for w in omegas], E0, E1, coeffs)


def _compositions(n: int, d: int):
    if d == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in _compositions(n - first, d - 1):
            yield (first,) + rest


def roundtrip_once(b: BNFData, levels: int, order: int) -> bool:
    ds = spectrum_forward(b, levels, order)
    back = invert_spectrum(ds, d=b.dim)
    return back == b


def cmd_roundtrip(args) -> int:
    if args.bnf:
        cases = [parse_bnf(load_json(args.bnf))]
        if not isinstance(cases[0], BNFData):
            raise ValidationError("roundtrip needs an exact normal form")
    elif args.random_instances:
        rng = random.Random(args.seed)
        cases = [random_bnf(rng) for _ in range(args.random_instances)]
    else:
        raise ValidationError("give --bnf FILE or --random-instances N")
    start = time.perf_counter()
    failures = [n for n, b in enumerate(cases) if not roundtrip_once(b, args.levels, args.order)]
    elapsed = time.perf_counter() - start
    if failures:
        print(f"MISMATCH in {len(failures)} of {len(cases)} instance(s): {failures}")
        return EXIT_MISMATCH
    print(f"EXACT MATCH ({len(cases)} instance(s), {elapsed:.2f} s)")
    return EXIT_OK


def cmd_clusters(args) -> int:
    B = parse_symbol(load_json(args.input), truncation=args.degree)
    if args.average:
        B = resonant_average(B)
    out = []
    for N in _ints(args.N):
        for h in _floats(args.hbar):
            cs = cluster_spectrum(B, N, h, digits=args.digits)
            out.append({"N": N, "hbar": format_float(h), "dimension": cs.dimension,
                        "center": format_float(cs.center), "width": format_float(cs.width),
                        "eigenvalues": [format_float(e) for e in cs.eigenvalues]})
    write_json({"clusters": out}, args.out)
    return EXIT_OK


def cmd_oracle(args) -> int:
    V = parse_potential(load_json(args.potential))
    if args.bnf:
        b = parse_bnf(load_json(args.bnf))
        reports = []
        for k in args.k:
            r = hbar_scan(V, b, _ints(k), args.order, _floats(args.hbar), basis_size=args.basis_size,
                          K=args.K, dps=args.dps)
            reports.append({"level": list(r.level), "order": r.order,
                            "hbar_grid": [format_float(h) for h in r.hbar_grid],
                            "residuals": [format_float(x) for x in r.residuals],
                            "slope": format_float(r.slope), "intercept": format_float(r.intercept),
                            "status": r.status})
        write_json({"scans": reports}, args.out)
        return EXIT_OK if all(r["status"] != "FAIL" for r in reports) else EXIT_MISMATCH
    out = []
    for h in _floats(args.hbar):
        if V.dim == 1:
            E = eigenvalues_1d(V, h, args.basis_size, n_levels=args.levels, dps=args.dps)
        else:
            E = eigenvalues_2d(V, h, args.K, n_levels=args.levels)
        out.append({"hbar": format_float(h), "eigenvalues": [format_float(float(e)) for e in E]})
    write_json({"spectra": out}, args.out)
    return EXIT_OK


def cmd_check_partition(args) -> int:
    ds = parse_spectrum(load_json(args.spectrum)) if args.spectrum else None
    if args.omegas:
        omegas = [parse_exact(w) for w in args.omegas]
    elif ds is not None:
        omegas = invert_spectrum(ds, check_tail=False).omegas if ds.order >= 2 else None
        if omegas is None:
            raise ValidationError("give --omegas for an order-1 spectrum")
    else:
        raise ValidationError("give --omegas and/or --spectrum")
    report = partition_identity_check(omegas, args.levels, dataset=ds, E1=parse_exact(args.E1),
                                      z_values=_floats(args.z), digits=args.digits)
    doc = {"M": report.M, "multiset_ok": report.multiset_ok, "ok": report.ok,
           "omegas": [format_exact(ExactReal.coerce(w)) if not isinstance(w, float) else format_float(w)
                      for w in omegas],
           "samples": [{"z": format_float(s.z.real), "truncated": format_float(float(s.truncated.real)),
                        "closed_form": format_float(float(s.closed_form.real)),
                        "difference": format_float(float(s.difference)),
                        "tail_bound": format_float(float(s.tail_bound)),
                        "geometric_estimate": format_float(float(s.geometric_estimate)),
                        "ok": bool(s.ok)} for s in report.samples]}
    write_json(doc, args.out)
    return EXIT_OK if report.ok else EXIT_MISMATCH


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="semibnf", description="Semiclassical Birkhoff normal forms and spectra.")
    p.add_argument("--precision-bits", type=int, default=None,
                   help="refinement ceiling for opaque reals (overrides BNF_PRECISION_BITS)")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("bnf", help="normal form of a Hamiltonian document")
    s.add_argument("--input", required=True)
    s.add_argument("--degree", type=int, required=True, help="truncation D (even, >= 4)")
    s.add_argument("--out")
    s.set_defaults(func=cmd_bnf)

    s = sub.add_parser("spectrum", help="eigenvalue expansions from a normal form")
    s.add_argument("--bnf", required=True)
    s.add_argument("--levels", type=int, required=True)
    s.add_argument("--order", type=int, required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_spectrum)

    s = sub.add_parser("invert", help="normal form from eigenvalue expansions")
    s.add_argument("--input", required=True)
    s.add_argument("--dim", type=int)
    s.add_argument("--tolerance", type=float, default=1e-9, help="approximate-mode tolerance")
    s.add_argument("--no-tail-check", action="store_true")
    s.add_argument("--out")
    s.set_defaults(func=cmd_invert)

    s = sub.add_parser("roundtrip", help="forward then inverse, compared exactly")
    s.add_argument("--bnf")
    s.add_argument("--random-instances", type=int, default=0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--levels", type=int, default=60)
    s.add_argument("--order", type=int, default=4)
    s.set_defaults(func=cmd_roundtrip)

    s = sub.add_parser("clusters", help="resonant cluster eigenvalues")
    s.add_argument("--input", required=True, help="symbol in the hamiltonian schema (omegas optional)")
    s.add_argument("--degree", type=int)
    s.add_argument("--N", default="1", help="comma-separated cluster indices")
    s.add_argument("--hbar", default="0.1", help="comma-separated hbar values")
    s.add_argument("--average", action="store_true", help="average the symbol along the flow of Sigma first")
    s.add_argument("--digits", type=int)
    s.add_argument("--out")
    s.set_defaults(func=cmd_clusters)

    s = sub.add_parser("oracle", help="numerical eigenvalues, or an hbar scan against a normal form")
    s.add_argument("--potential", required=True)
    s.add_argument("--hbar", default="0.1", help="comma-separated hbar values")
    s.add_argument("--levels", type=int)
    s.add_argument("--basis-size", type=int, default=64)
    s.add_argument("--K", type=int, default=20, help="2d basis: |k| <= K")
    s.add_argument("--dps", type=int, help="extended precision digits (1d)")
    s.add_argument("--bnf", help="scan the residuals against this normal form")
    s.add_argument("--k", action="append", default=[], help="lattice point, e.g. 0 or 1,0 (repeatable)")
    s.add_argument("--order", type=int, default=2)
    s.add_argument("--out")
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("check-partition", help="partition-function identity on the first levels")
    s.add_argument("--omegas", nargs="+")
    s.add_argument("--spectrum")
    s.add_argument("--levels", type=int, default=100)
    s.add_argument("--E1", default="0")
    s.add_argument("--z", default="0.5,1,2")
    s.add_argument("--digits", type=int, default=50)
    s.add_argument("--out")
    s.set_defaults(func=cmd_check_partition)
    return p


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.precision_bits is not None:
        os.environ["BNF_PRECISION_BITS"] = str(args.precision_bits)
    if args.command == "oracle" and args.bnf and not args.k:
        parser.error("--bnf needs at least one --k")
    try:
        return args.func(args)
    except NumericError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_NUMERIC
    except (BNFError, ValueError) as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_VALIDATION


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
