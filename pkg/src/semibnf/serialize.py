"""JSON documents for Hamiltonians, normal forms, spectra and potentials.

Exact values travel as strings in the ``format_exact`` text form; floats
(approximate mode only) as shortest round-trip decimal strings, so both
round-trip bit for bit.
"""

from __future__ import annotations

import json
import sys
from fractions import Fraction
from typing import Any, Dict, List, Optional

from .bnf import BNFData, HamiltonianInput
from .errors import SchemaError, ValidationError
from .inverse import ApproximateBNF
from .oracle import PolynomialPotential
from .scalars import ExactReal, Surd, format_exact, parse_exact
from .spectrum import SpectralDataset
from .weyl import FormalSymbol

# ---------------------------------------------------------------------------
# field helpers


def _get(doc: dict, key: str, path: str, kind=None, optional=False):
    if not isinstance(doc, dict):
        raise SchemaError("expected an object", path=path)
    if key not in doc:
        if optional:
            return None
        raise SchemaError(f"missing field {key!r}", path=path)
    value = doc[key]
    if kind is not None and (not isinstance(value, kind) or isinstance(value, bool)):
        raise SchemaError(f"field {key!r} has the wrong type", path=f"{path}.{key}")
    return value


def _int(doc, key, path, optional=False) -> Optional[int]:
    return _get(doc, key, path, int, optional)


def _list(doc, key, path) -> list:
    return _get(doc, key, path, list)


def _exact(text, path: str) -> ExactReal:
    if isinstance(text, int) and not isinstance(text, bool):
        return ExactReal.rational(text)
    try:
        return parse_exact(text)
    except ValidationError as exc:
        raise SchemaError(str(exc).split(": ", 1)[-1], path=path) from None


def _float(text, path: str) -> float:
    try:
        return float(text)
    except (TypeError, ValueError):
        raise SchemaError(f"not a decimal number: {text!r}", path=path) from None


def _index(seq, path: str, dim: int) -> tuple:
    if not isinstance(seq, list) or len(seq) != dim or not all(
            isinstance(v, int) and not isinstance(v, bool) and v >= 0 for v in seq):
        raise SchemaError(f"expected {dim} non-negative integers", path=path)
    return tuple(seq)


def format_float(x: float) -> str:
    return repr(float(x))


def _surd_text(c: Surd, path: str) -> str:
    if not c.is_real():
        raise SchemaError("coefficient is not real", path=path)
    return format_exact(c.to_exact(None))


# ---------------------------------------------------------------------------
# hamiltonian: {dim, omegas[], E0, E1, taylor: [{hbar, x[], xi[], coeff}], truncation?}


def _taylor_terms(doc: dict, dim: int, path: str) -> dict:
    terms = {}
    for n, item in enumerate(_list(doc, "taylor", path)):
        p = f"{path}.taylor[{n}]"
        j = _int(item, "hbar", p)
        if j < 0:
            raise SchemaError("hbar power must be >= 0", path=f"{p}.hbar")
        a = _index(_get(item, "x", p), f"{p}.x", dim)
        b = _index(_get(item, "xi", p), f"{p}.xi", dim)
        c = _exact(_get(item, "coeff", p), f"{p}.coeff").to_surd()
        key = (j, a, b)
        terms[key] = terms.get(key, Surd(0)) + c
    return terms


def _grade(key) -> int:
    j, a, b = key
    return 2 * j + sum(a) + sum(b)


def parse_symbol(doc: dict, truncation: Optional[int] = None, path: str = "$") -> FormalSymbol:
    """The Taylor series of a hamiltonian document as a FormalSymbol.

    The truncation comes from the argument, else from the document's
    ``truncation`` field, else from the largest grade present.
    """
    dim = _int(doc, "dim", path)
    if dim < 1:
        raise SchemaError("dim must be >= 1", path=f"{path}.dim")
    terms = _taylor_terms(doc, dim, path)
    if truncation is None:
        truncation = _int(doc, "truncation", path, optional=True)
    if truncation is None:
        truncation = max((_grade(k) for k in terms), default=2)
    over = [k for k in terms if _grade(k) > truncation]
    if over:
        raise SchemaError(f"term {over[0]} exceeds truncation {truncation}", path=f"{path}.taylor")
    return FormalSymbol(dim, truncation, terms)


def parse_hamiltonian(doc: dict, truncation: Optional[int] = None, path: str = "$") -> HamiltonianInput:
    symbol = parse_symbol(doc, truncation, path)
    omegas = [_exact(w, f"{path}.omegas[{i}]") for i, w in enumerate(_list(doc, "omegas", path))]
    if len(omegas) != symbol.dim:
        raise SchemaError(f"{len(omegas)} frequencies for dim={symbol.dim}", path=f"{path}.omegas")
    E0 = _exact(_get(doc, "E0", path), f"{path}.E0")
    E1 = _exact(_get(doc, "E1", path), f"{path}.E1")
    return HamiltonianInput(omegas, E0, E1, symbol)


def dump_symbol(f: FormalSymbol, omegas=None, E0=0, E1=0) -> dict:
    taylor = []
    for (j, a, b), c in sorted(f.terms.items(), key=lambda kv: (_grade(kv[0]), kv[0])):
        taylor.append({"hbar": j, "x": list(a), "xi": list(b),
                       "coeff": _surd_text(c, f"$.taylor[{len(taylor)}].coeff")})
    doc: Dict[str, Any] = {"dim": f.dim}
    if omegas is not None:
        doc["omegas"] = [format_exact(ExactReal.coerce(w)) for w in omegas]
        doc["E0"] = format_exact(ExactReal.coerce(E0))
        doc["E1"] = format_exact(ExactReal.coerce(E1))
    doc["truncation"] = f.truncation
    doc["taylor"] = taylor
    return doc


def dump_hamiltonian(H: HamiltonianInput) -> dict:
    return dump_symbol(H.taylor, H.omegas, H.E0, H.E1)


# ---------------------------------------------------------------------------
# bnf: {dim, omegas[], E0, E1, coeffs: [{l, alpha[], c}], mode?}


def parse_bnf(doc: dict, path: str = "$"):
    dim = _int(doc, "dim", path)
    mode = _get(doc, "mode", path, str, optional=True) or "exact"
    if mode not in ("exact", "approximate"):
        raise SchemaError(f"unknown mode {mode!r}", path=f"{path}.mode")
    value = _exact if mode == "exact" else _float
    omegas = [value(w, f"{path}.omegas[{i}]") for i, w in enumerate(_list(doc, "omegas", path))]
    if len(omegas) != dim:
        raise SchemaError(f"{len(omegas)} frequencies for dim={dim}", path=f"{path}.omegas")
    E0 = value(_get(doc, "E0", path), f"{path}.E0")
    E1 = value(_get(doc, "E1", path), f"{path}.E1")
    coeffs = {}
    for n, item in enumerate(_list(doc, "coeffs", path)):
        p = f"{path}.coeffs[{n}]"
        l = _int(item, "l", p)
        if l < 0:
            raise SchemaError("l must be >= 0", path=f"{p}.l")
        alpha = _index(_get(item, "alpha", p), f"{p}.alpha", dim)
        if (l, alpha) in coeffs:
            raise SchemaError(f"duplicate coefficient {(l, alpha)}", path=p)
        coeffs[(l, alpha)] = value(_get(item, "c", p), f"{p}.c")
    if mode == "approximate":
        return ApproximateBNF(omegas, E0, E1, coeffs)
    try:
        return BNFData(omegas, E0, E1, coeffs)
    except ValidationError as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(str(exc).split(": ", 1)[-1], path=f"{path}.coeffs") from None


def dump_bnf(b) -> dict:
    approximate = isinstance(b, ApproximateBNF)
    text = format_float if approximate else (lambda v: format_exact(ExactReal.coerce(v)))
    doc: Dict[str, Any] = {
        "dim": b.dim,
        "omegas": [text(w) for w in b.omegas],
        "E0": text(b.E0),
        "E1": text(b.E1),
        "coeffs": [{"l": l, "alpha": list(alpha), "c": text(c)}
                   for (l, alpha), c in sorted(b.coeffs.items(), key=lambda kv: (kv[0][0] + sum(kv[0][1]), kv[0]))],
    }
    if approximate:
        doc["mode"] = "approximate"
    return doc


# ---------------------------------------------------------------------------
# spectrum: {dim?, order, levels: [{N, a[]}], mode?}


def parse_spectrum(doc: dict, path: str = "$") -> SpectralDataset:
    order = _int(doc, "order", path)
    dim = _int(doc, "dim", path, optional=True)
    mode = _get(doc, "mode", path, str, optional=True) or "exact"
    if mode not in ("exact", "approximate"):
        raise SchemaError(f"unknown mode {mode!r}", path=f"{path}.mode")
    value = _exact if mode == "exact" else _float
    rows: Dict[int, List] = {}
    for n, item in enumerate(_list(doc, "levels", path)):
        p = f"{path}.levels[{n}]"
        N = _int(item, "N", p)
        if N in rows:
            raise SchemaError(f"duplicate level N={N}", path=f"{p}.N")
        a = _get(item, "a", p, list)
        if len(a) != order + 1:
            raise SchemaError(f"expected {order + 1} coefficients", path=f"{p}.a")
        rows[N] = [value(v, f"{p}.a[{i}]") for i, v in enumerate(a)]
    if sorted(rows) != list(range(1, len(rows) + 1)):
        raise SchemaError("levels must be N = 1..M without gaps", path=f"{path}.levels")
    if not rows:
        raise SchemaError("no levels", path=f"{path}.levels")
    return SpectralDataset(order, [rows[N] for N in sorted(rows)], dim=dim)


def dump_spectrum(ds: SpectralDataset) -> dict:
    text = (lambda v: format_exact(v)) if ds.exact else format_float
    doc: Dict[str, Any] = {}
    if ds.dim is not None:
        doc["dim"] = ds.dim
    doc["order"] = ds.order
    doc["mode"] = "exact" if ds.exact else "approximate"
    doc["levels"] = [{"N": N, "a": [text(v) for v in row]} for N, row in enumerate(ds.levels, start=1)]
    return doc


# ---------------------------------------------------------------------------
# potential: {dim, coeffs: [{alpha[], c}]}; c is a decimal or "p/q" string


def parse_potential(doc: dict, path: str = "$") -> PolynomialPotential:
    dim = _int(doc, "dim", path)
    coeffs = {}
    for n, item in enumerate(_list(doc, "coeffs", path)):
        p = f"{path}.coeffs[{n}]"
        alpha = _index(_get(item, "alpha", p), f"{p}.alpha", dim)
        raw = _get(item, "c", p)
        try:
            c = float(Fraction(raw)) if isinstance(raw, str) else float(raw)
        except (TypeError, ValueError):
            raise SchemaError(f"not a number: {raw!r}", path=f"{p}.c") from None
        coeffs[alpha] = coeffs.get(alpha, 0.0) + c
    return PolynomialPotential(dim, coeffs)


# ---------------------------------------------------------------------------
# files


def load_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON in {path}: {exc.msg} (line {exc.lineno})", path="$") from None
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def write_json(doc: Any, path: Optional[str]) -> None:
    """Write to ``path``, or to standard output when it is None or '-'."""
    text = dumps(doc)
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
