"""Deterministic text, LaTeX and JSON renderings of polynomials and graded objects.

The plain-text rendering is valid input for the expression parser, and
rendering the parse of a rendered object gives back the same string.
"""

from __future__ import annotations

import json

from .coeff import Poly, latex_coord
from .errors import KindError, DegreeError
from .exterior import Form, Graded, Multivector, sort_with_sign


def _basis_prefix(obj):
    return "d" if isinstance(obj, Form) else "D"


def _is_single_term(p):
    return len(p.terms) == 1


def to_text(obj):
    if isinstance(obj, Poly):
        return str(obj)
    if not obj.terms:
        return "0"
    names = obj.cs.names
    pre = _basis_prefix(obj)
    pieces = []
    for key, c in obj.sorted_terms():
        basis = "^".join(pre + names[k] for k in key)
        negative = False
        if _is_single_term(c):
            (e, v), = c.terms.items()
            if v < 0:
                negative = True
                c = -c
            coeff = str(c)
            body = basis if coeff == "1" and basis else (f"{coeff}*{basis}" if basis else coeff)
        else:
            body = f"({c})*{basis}" if basis else str(c)
        if not pieces:
            pieces.append(f"-{body}" if negative else body)
        else:
            pieces.append(f" - {body}" if negative else f" + {body}")
    return "".join(pieces)


# LaTeX -------------------------------------------------------------------------

def _latex_differential(cs, k):
    return "d" + latex_coord(cs.coords[k])


def _latex_vector(cs, k):
    return r"\partial_{" + latex_coord(cs.coords[k]) + "}"


def _latex_form_basis(cs, key):
    """Write dz^key as sign * (non-x differentials) ^ d^n x_{M}."""
    xs = [k for k in key if k < cs.n]
    others = [k for k in key if k >= cs.n]
    if not xs:
        return 1, r" \wedge ".join(_latex_differential(cs, k) for k in others)
    missing = [mu for mu in range(1, cs.n + 1) if (mu - 1) not in xs]
    # d^n x_M = i_{d_{mr}} ... i_{d_{m1}} (dx^1 ^ ... ^ dx^n): removing m1 first, then m2, ...
    sign = 1
    rest = list(range(cs.n))
    for mu in missing:
        pos = rest.index(mu - 1)
        if pos & 1:
            sign = -sign
        del rest[pos]
    # dz^xs ^ dz^others = (-1)^{|xs||others|} dz^others ^ dz^xs and dz^xs = sign * d^n x_M
    if (len(xs) * len(others)) & 1:
        sign = -sign
    vol = f"d^{{{cs.n}}}x" + (f"_{{{''.join(str(m) for m in missing)}}}" if missing else "")
    parts = [_latex_differential(cs, k) for k in others] + [vol]
    return sign, r" \wedge ".join(parts)


def to_latex(obj):
    if isinstance(obj, Poly):
        return obj.latex()
    if not obj.terms:
        return "0"
    cs = obj.cs
    pieces = []
    for key, c in obj.sorted_terms():
        if isinstance(obj, Form):
            sign, basis = _latex_form_basis(cs, key)
        else:
            sign, basis = 1, r" \wedge ".join(_latex_vector(cs, k) for k in key)
        if sign < 0:
            c = -c
        negative = _is_single_term(c) and next(iter(c.terms.values())) < 0
        if negative:
            c = -c
        if _is_single_term(c):
            coeff = c.latex()
            body = basis if coeff == "1" and basis else (f"{coeff} \\, {basis}" if basis else coeff)
        else:
            body = rf"\left({c.latex()}\right) {basis}" if basis else c.latex()
        if not pieces:
            pieces.append(f"-{body}" if negative else body)
        else:
            pieces.append(f" - {body}" if negative else f" + {body}")
    return "".join(pieces)


# JSON --------------------------------------------------------------------------

def to_record(obj):
    """Plain dict following the graded-object schema."""
    cs = obj.cs
    return {
        "kind": obj.kind,
        "n": cs.n,
        "N": cs.N,
        "degree": obj.degree,
        "terms": [
            {"basis": [cs.names[k] for k in key], "coeff": str(c)}
            for key, c in obj.sorted_terms()
        ],
    }


def to_json(obj):
    return json.dumps(to_record(obj), indent=2)


def from_record(rec, cs=None):
    """Rebuild a Form or Multivector from ``to_record`` output."""
    from .coeff import CoordSystem
    from .cli.parser import parse_poly

    if cs is None:
        cs = CoordSystem(rec["n"], rec["N"])
    elif ("n" in rec and rec["n"] != cs.n) or ("N" in rec and rec["N"] != cs.N):
        raise DegreeError("record was written for a different coordinate system")
    cls = {"form": Form, "multivector": Multivector}.get(rec.get("kind"))
    if cls is None:
        raise KindError(f"unknown kind {rec.get('kind')!r}")
    degree = rec["degree"]
    out = cls(cs, degree)
    for term in rec["terms"]:
        idx = [cs.index_of_name(name) for name in term["basis"]]
        if len(idx) != degree:
            raise DegreeError("basis length does not match the declared degree")
        sign, _ = sort_with_sign(idx)
        if not sign:
            continue
        out = out + cls.basis(cs, idx, parse_poly(term["coeff"], cs))
    return out


def from_json(text, cs=None):
    return from_record(json.loads(text), cs)


__all__ = ["to_text", "to_latex", "to_record", "to_json", "from_record", "from_json", "Graded"]
