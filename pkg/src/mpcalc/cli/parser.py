"""Expression language for polynomials, forms and multivectors.

Grammar, loosest binding first::

    sum     := product (('+' | '-') product)*
    product := wedge (('*' | '/') wedge)*
    wedge   := unary ('^' unary)*
    unary   := '-' unary | power
    power   := atom ('**' INT)?
    atom    := NUMBER | NAME | call | '(' sum ')'
    call    := 'd(' sum ')' | 'i(' sum ';' sum ')' | 'L(' sum ';' sum ')'
             | 'sch(' sum ';' sum ')' | 'vol(' [INT (',' INT)*] ')'

Names are coordinates (x1, q2, p1_2, w), differentials (dx1, dw), vectors
(Dx1, Dw) and the structures theta, omega, Sigma.  ``p`` is accepted as an
alias for the energy variable w, so ``dp`` and ``Dp`` work too.  ``*``
scales by a polynomial and ``^`` is the wedge product; wedging a form with
a multivector is a GradeError.  Whitespace is ignored.
"""

from __future__ import annotations

import re
from fractions import Fraction

from ..coeff import CoordSystem, Poly
from ..errors import ExprSyntaxError, GradeError, UnknownCoordinate
from ..exterior import Form, Graded, Multivector, contract, ext_d, lie_form, lie_multivector, schouten, wedge

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>\*\*|[-+*/^();,]))"
)
_COORD_SHAPE = re.compile(r"(?:x\d+|q\d+|p\d+_\d+)$")
_CALLS = {"d", "i", "L", "sch", "vol"}
_STRUCTURES = {"theta", "omega", "Sigma"}


def _tokenize(src):
    tokens = []
    pos = 0
    while pos < len(src):
        if src[pos:].strip() == "":
            break
        m = _TOKEN.match(src, pos)
        if not m:
            bad = pos + len(src[pos:]) - len(src[pos:].lstrip())
            raise ExprSyntaxError(f"unexpected character {src[bad]!r}", bad)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src, cs, ctx_factory):
        self.src = src
        self.cs = cs
        self._ctx_factory = ctx_factory
        self.tokens = _tokenize(src)
        self.i = 0

    # token helpers
    @property
    def tok(self):
        return self.tokens[self.i]

    def accept(self, value):
        if self.tok[0] == "op" and self.tok[1] == value:
            self.i += 1
            return True
        return False

    def expect(self, value):
        if not self.accept(value):
            kind, text, pos = self.tok
            found = "end of input" if kind == "end" else repr(text)
            raise ExprSyntaxError(f"expected {value!r}, found {found}", pos)

    def parse(self):
        value = self.sum()
        kind, text, pos = self.tok
        if kind != "end":
            raise ExprSyntaxError(f"unexpected {text!r}", pos)
        return value

    # grammar
    def sum(self):
        left = self.product()
        while True:
            pos = self.tok[2]
            if self.accept("+"):
                left = _add(left, self.product(), pos)
            elif self.accept("-"):
                left = _add(left, _neg(self.product()), pos)
            else:
                return left

    def product(self):
        left = self.wedge()
        while True:
            pos = self.tok[2]
            if self.accept("*"):
                left = _mul(left, self.wedge(), pos)
            elif self.accept("/"):
                right = self.wedge()
                if not isinstance(right, Poly) or not right.is_constant() or not right:
                    raise ExprSyntaxError("division only by a nonzero number", pos)
                left = _scale(left, 1 / right.constant_term())
            else:
                return left

    def wedge(self):
        left = self.unary()
        while True:
            pos = self.tok[2]
            if self.accept("^"):
                left = _wedge(left, self.unary(), pos)
            else:
                return left

    def unary(self):
        if self.accept("-"):
            return _neg(self.unary())
        if self.accept("+"):
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        pos = self.tok[2]
        if self.accept("**"):
            kind, text, epos = self.tok
            if kind != "num":
                raise ExprSyntaxError("exponent must be a non-negative integer", epos)
            self.i += 1
            if not isinstance(base, Poly):
                raise GradeError(f"only polynomials can be raised to a power (position {pos})")
            return base ** int(text)
        return base

    def atom(self):
        kind, text, pos = self.tok
        if kind == "num":
            self.i += 1
            return Poly.const(self.cs, int(text))
        if kind == "name":
            self.i += 1
            if text in _CALLS and self.tok[0] == "op" and self.tok[1] == "(":
                return self.call(text, pos)
            return self.name(text, pos)
        if self.accept("("):
            value = self.sum()
            self.expect(")")
            return value
        found = "end of input" if kind == "end" else repr(text)
        raise ExprSyntaxError(f"unexpected {found}", pos)

    def call(self, fn, pos):
        self.expect("(")
        if fn == "vol":
            mus = []
            if not self.accept(")"):
                while True:
                    kind, text, npos = self.tok
                    if kind != "num":
                        raise ExprSyntaxError("vol() takes space-time indices", npos)
                    mu = int(text)
                    if not 1 <= mu <= self.cs.n:
                        raise UnknownCoordinate(f"space-time index {mu} outside 1..{self.cs.n}")
                    mus.append(mu)
                    self.i += 1
                    if self.accept(")"):
                        break
                    self.expect(",")
            from ..multiphase import volume_family

            return volume_family(self.cs, tuple(mus))
        if fn == "d":
            arg = self.sum()
            self.expect(")")
            return ext_d(_as_form(arg, "d()"))
        first = self.sum()
        self.expect(";")
        second = self.sum()
        self.expect(")")
        X = _as_multivector(first, f"{fn}()")
        if fn == "sch":
            return schouten(X, _as_multivector(second, "sch()"))
        if fn == "i":
            return contract(X, _as_form(second, "i()"))
        # L: Lie derivative of a form, or Schouten bracket with a multivector
        if isinstance(second, Multivector):
            return lie_multivector(X, second)
        return lie_form(X, _as_form(second, "L()"))

    def name(self, text, pos):
        cs = self.cs
        if text in _STRUCTURES:
            ctx = self._ctx_factory()
            return {"theta": ctx.theta, "omega": ctx.omega, "Sigma": ctx.sigma}[text]
        k = _coordinate(cs, text)
        if k is not None:
            return Poly.var(cs, k)
        if text[:1] in ("d", "D") and len(text) > 1:
            k = _coordinate(cs, text[1:])
            if k is not None:
                cls = Form if text[0] == "d" else Multivector
                return cls.basis(cs, [k])
            if _COORD_SHAPE.match(text[1:]):
                raise UnknownCoordinate(f"{text[1:]} does not exist for n={cs.n}, N={cs.N}")
        if _COORD_SHAPE.match(text):
            raise UnknownCoordinate(f"{text} does not exist for n={cs.n}, N={cs.N}")
        raise ExprSyntaxError(f"unknown name {text!r}", pos)


def _coordinate(cs, text):
    if text == "p":
        return cs.w
    try:
        return cs.index_of_name(text)
    except UnknownCoordinate:
        return None


# typed arithmetic -----------------------------------------------------------------------

def _as_form(v, where):
    if isinstance(v, Poly):
        return Form.scalar(v)
    if isinstance(v, Form):
        return v
    raise GradeError(f"{where} expects a form, got a multivector")


def _as_multivector(v, where):
    if isinstance(v, Poly):
        return Multivector.scalar(v)
    if isinstance(v, Multivector):
        return v
    raise GradeError(f"{where} expects a multivector, got a form")


def _neg(v):
    return -v


def _scale(v, c):
    return v * c


def _add(a, b, pos):
    if isinstance(a, Poly) and isinstance(b, Poly):
        return a + b
    if isinstance(a, Poly):
        a, b = b, a
    if isinstance(b, Poly):
        if a.degree != 0:
            raise GradeError(f"cannot add a polynomial to a degree-{a.degree} object (position {pos})")
        b = type(a).scalar(b)
    if type(a) is not type(b):
        raise GradeError(f"cannot add a form and a multivector (position {pos})")
    if a.degree != b.degree and a.terms and b.terms:
        raise GradeError(f"cannot add degrees {a.degree} and {b.degree} (position {pos})")
    return a + b


def _mul(a, b, pos):
    if isinstance(a, Poly) and isinstance(b, Poly):
        return a * b
    if isinstance(a, Poly):
        return b * a
    if isinstance(b, Poly):
        return a * b
    raise GradeError(f"'*' multiplies by a polynomial; use '^' for the wedge product (position {pos})")


def _wedge(a, b, pos):
    if isinstance(a, Poly) or isinstance(b, Poly):
        return _mul(a, b, pos)
    if type(a) is not type(b):
        raise GradeError(f"cannot wedge a form with a multivector (position {pos})")
    return wedge(a, b)


# entry points -------------------------------------------------------------------------------

def _resolve(ctx):
    from ..multiphase import MultiphaseContext, context_for

    if isinstance(ctx, MultiphaseContext):
        return ctx.cs, lambda: ctx
    if isinstance(ctx, CoordSystem):
        return ctx, lambda: context_for(ctx)
    raise TypeError("expected a MultiphaseContext or CoordSystem")


def evaluate(src, ctx):
    """Parse and evaluate; the result may be a Poly, a Form or a Multivector."""
    cs, factory = _resolve(ctx)
    return _Parser(src, cs, factory).parse()


def parse(src, ctx, scalar="form"):
    """Parse to a Form or Multivector; a bare polynomial becomes a degree-0 object of kind ``scalar``."""
    value = evaluate(src, ctx)
    if isinstance(value, Poly):
        return (Multivector if scalar == "multivector" else Form).scalar(value)
    return value


def parse_poly(src, cs):
    value = evaluate(src, cs)
    if isinstance(value, Graded):
        if value.degree != 0:
            raise GradeError(f"expected a polynomial, got a degree-{value.degree} object")
        return value.scalar_part()
    return value


__all__ = ["parse", "parse_poly", "evaluate"]
