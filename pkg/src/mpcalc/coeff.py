"""Exact polynomial coefficients over the adapted coordinates (x, q, p_i^mu, w).

Coordinates are enumerated in a fixed order: x1..xn, q1..qN, the momenta
p_i^mu (i major, mu minor), and finally the energy variable w.  A polynomial
stores a dict from exponent tuples (one slot per coordinate) to Fractions.
Momenta and w carry scaling weight 1, everything else weight 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from numbers import Rational

from .errors import CoordinateSystemMismatch, DegreeError, NonzeroConstantPart, UnknownCoordinate


@dataclass(frozen=True)
class Coord:
    """A named coordinate.  ``kind`` is one of 'x', 'q', 'p', 'w'.

    ``i`` is the fiber index and ``mu`` the space-time index (both 1-based);
    unused fields stay 0.
    """

    kind: str
    i: int = 0
    mu: int = 0

    @property
    def weight(self):
        return 1 if self.kind in ("p", "w") else 0

    @property
    def name(self):
        if self.kind == "x":
            return f"x{self.mu}"
        if self.kind == "q":
            return f"q{self.i}"
        if self.kind == "p":
            return f"p{self.i}_{self.mu}"
        return "w"


def X(mu):
    return Coord("x", mu=mu)


def Q(i):
    return Coord("q", i=i)


def P(i, mu):
    return Coord("p", i=i, mu=mu)


W = Coord("w")


@dataclass(frozen=True)
class CoordSystem:
    n: int
    N: int

    def __post_init__(self):
        if self.n < 1 or self.N < 1:
            raise DegreeError(f"need n >= 1 and N >= 1, got n={self.n}, N={self.N}")

    # integer positions in the fixed enumeration
    def x(self, mu):
        return mu - 1

    def q(self, i):
        return self.n + i - 1

    def p(self, i, mu):
        return self.n + self.N + (i - 1) * self.n + (mu - 1)

    @property
    def w(self):
        return self.n + self.N + self.n * self.N

    @property
    def size(self):
        return self.n + self.N + self.n * self.N + 1

    @cached_property
    def coords(self):
        out = [X(mu) for mu in range(1, self.n + 1)]
        out += [Q(i) for i in range(1, self.N + 1)]
        out += [P(i, mu) for i in range(1, self.N + 1) for mu in range(1, self.n + 1)]
        out.append(W)
        return tuple(out)

    @cached_property
    def weights(self):
        return tuple(c.weight for c in self.coords)

    @cached_property
    def names(self):
        return tuple(c.name for c in self.coords)

    @cached_property
    def _by_name(self):
        return {name: k for k, name in enumerate(self.names)}

    @cached_property
    def x_indices(self):
        return tuple(range(self.n))

    @cached_property
    def q_indices(self):
        return tuple(range(self.n, self.n + self.N))

    @cached_property
    def p_indices(self):
        return tuple(range(self.n + self.N, self.w))

    @cached_property
    def momentum_indices(self):
        """All scaling-weight-one coordinates: the p_i^mu and w."""
        return self.p_indices + (self.w,)

    def index(self, c):
        """Position of a Coord (or an already-resolved int) in the enumeration."""
        if isinstance(c, int):
            if not 0 <= c < self.size:
                raise UnknownCoordinate(f"coordinate index {c} out of range")
            return c
        if c.kind == "x" and 1 <= c.mu <= self.n:
            return self.x(c.mu)
        if c.kind == "q" and 1 <= c.i <= self.N:
            return self.q(c.i)
        if c.kind == "p" and 1 <= c.i <= self.N and 1 <= c.mu <= self.n:
            return self.p(c.i, c.mu)
        if c.kind == "w":
            return self.w
        raise UnknownCoordinate(f"{c.name} does not exist for n={self.n}, N={self.N}")

    def index_of_name(self, name):
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownCoordinate(f"unknown coordinate {name!r} for n={self.n}, N={self.N}") from None

    def coord(self, k):
        return self.coords[k]

    def kind(self, k):
        return self.coords[k].kind


def _mono_key(exps):
    # graded-lex: higher total degree first, then lexicographically larger exponents first
    return (-sum(exps), tuple(-e for e in exps))


def _fmt_rational(c):
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


class Poly:
    """Sparse multivariate polynomial with Fraction coefficients.

    Treat instances as immutable; every operation returns a new Poly.
    """

    __slots__ = ("cs", "terms")

    def __init__(self, cs, terms=None):
        self.cs = cs
        self.terms = {} if terms is None else terms

    # construction ---------------------------------------------------------

    @classmethod
    def zero(cls, cs):
        return cls(cs)

    @classmethod
    def const(cls, cs, c):
        c = Fraction(c)
        return cls(cs, {(0,) * cs.size: c} if c else {})

    @classmethod
    def var(cls, cs, z):
        k = cs.index(z)
        e = [0] * cs.size
        e[k] = 1
        return cls(cs, {tuple(e): Fraction(1)})

    @classmethod
    def monomial(cls, cs, exps, c=1):
        c = Fraction(c)
        exps = tuple(exps)
        if len(exps) != cs.size:
            raise DegreeError("exponent vector has the wrong length")
        return cls(cs, {exps: c} if c else {})

    def _coerce(self, other):
        if isinstance(other, Poly):
            if other.cs != self.cs:
                raise CoordinateSystemMismatch(f"{self.cs} vs {other.cs}")
            return other
        if isinstance(other, (int, Rational)):
            return Poly.const(self.cs, other)
        return NotImplemented

    # arithmetic -------------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Poly(self.cs, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.cs, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def scale(self, c):
        c = Fraction(c)
        if not c:
            return Poly(self.cs)
        if c == 1:
            return self
        return Poly(self.cs, {e: v * c for e, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Rational)) and not isinstance(other, Poly):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = out.get(e, 0) + c1 * c2
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return Poly(self.cs, out)

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise DegreeError("polynomial powers need a non-negative integer exponent")
        out = Poly.const(self.cs, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.cs == other.cs and self.terms == other.terms
        if isinstance(other, (int, Rational)):
            return self.terms == Poly.const(self.cs, other).terms
        return NotImplemented

    def __hash__(self):
        return hash((self.cs, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    # calculus and grading -------------------------------------------------------

    def partial(self, z):
        k = self.cs.index(z)
        out = {}
        for e, c in self.terms.items():
            m = e[k]
            if m:
                e2 = e[:k] + (m - 1,) + e[k + 1:]
                out[e2] = c * m
        return Poly(self.cs, out)

    def scaling_split(self):
        """Map scaling degree -> homogeneous component (empty for the zero polynomial)."""
        w = self.cs.weights
        parts = {}
        for e, c in self.terms.items():
            s = sum(a * b for a, b in zip(e, w))
            parts.setdefault(s, {})[e] = c
        return {s: Poly(self.cs, t) for s, t in sorted(parts.items())}

    def euler(self):
        """Apply the scaling derivation sum_z weight(z) z d/dz."""
        w = self.cs.weights
        out = {}
        for e, c in self.terms.items():
            s = sum(a * b for a, b in zip(e, w))
            if s:
                out[e] = c * s
        return Poly(self.cs, out)

    def sigma_inverse(self):
        w = self.cs.weights
        out = {}
        for e, c in self.terms.items():
            s = sum(a * b for a, b in zip(e, w))
            if s == 0:
                raise NonzeroConstantPart(f"{self} has a component of scaling degree 0")
            out[e] = c / s
        return Poly(self.cs, out)

    def total_degree(self):
        return max((sum(e) for e in self.terms), default=-1)

    def depends_on(self, z):
        k = self.cs.index(z)
        return any(e[k] for e in self.terms)

    def depends_only_on(self, indices):
        allowed = set(indices)
        return all(k in allowed for e in self.terms for k, m in enumerate(e) if m)

    def subs_zero(self, indices):
        """Set the listed coordinates to zero."""
        idx = tuple(indices)
        return Poly(self.cs, {e: c for e, c in self.terms.items() if not any(e[k] for k in idx)})

    def is_constant(self):
        return all(not any(e) for e in self.terms)

    def constant_term(self):
        return self.terms.get((0,) * self.cs.size, Fraction(0))

    def evaluate(self, point):
        """Evaluate at a full point (sequence of numbers indexed like the enumeration)."""
        total = Fraction(0)
        for e, c in self.terms.items():
            v = c
            for k, m in enumerate(e):
                if m:
                    v *= Fraction(point[k]) ** m
            total += v
        return total

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: _mono_key(t[0]))

    # text -------------------------------------------------------------------

    def _mono_text(self, e, mul="*", power="**", names=None):
        names = names or self.cs.names
        parts = []
        for k, m in enumerate(e):
            if m == 1:
                parts.append(names[k])
            elif m:
                parts.append(f"{names[k]}{power}{m}")
        return mul.join(parts)

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for e, c in self.sorted_terms():
            mono = self._mono_text(e)
            mag = abs(c)
            if not mono:
                body = _fmt_rational(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{_fmt_rational(mag)}*{mono}"
            sign = "-" if c < 0 else "+"
            if not out:
                out.append(body if c > 0 else f"-{body}")
            else:
                out.append(f" {sign} {body}")
        return "".join(out)

    def __repr__(self):
        return f"Poly({self})"

    def latex(self):
        if not self.terms:
            return "0"
        out = []
        names = [latex_coord(c) for c in self.cs.coords]
        for e, c in self.sorted_terms():
            mono = " ".join(
                names[k] if m == 1 else f"({names[k]})^{{{m}}}" for k, m in enumerate(e) if m
            )
            mag = abs(c)
            if mag.denominator != 1:
                num = rf"\frac{{{mag.numerator}}}{{{mag.denominator}}}"
            else:
                num = str(mag.numerator)
            if not mono:
                body = num
            elif mag == 1:
                body = mono
            else:
                body = f"{num} {mono}"
            if not out:
                out.append(body if c > 0 else f"-{body}")
            else:
                out.append(f" {'-' if c < 0 else '+'} {body}")
        return "".join(out)


def latex_coord(c):
    if c.kind == "x":
        return f"x^{{{c.mu}}}"
    if c.kind == "q":
        return f"q^{{{c.i}}}"
    if c.kind == "p":
        return f"p_{{{c.i}}}^{{{c.mu}}}"
    return "p"
