"""Forms and multivectors with polynomial coefficients.

Both kinds are sparse maps from strictly increasing tuples of coordinate
positions to Poly.  A key ``(a, b, c)`` stands for dz^a ^ dz^b ^ dz^c on the
form side and for d/dz^a ^ d/dz^b ^ d/dz^c on the multivector side.  Any
reordering that happens during a computation is turned into a sign at once,
so stored keys are always sorted.

The interior product of a decomposable multivector is taken in the order
i_{X1 ^ ... ^ Xr} = i_{Xr} o ... o i_{X1}, so that contracting d^n x with
d/dx^1 ^ d/dx^2 gives d^n x_{12}.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from numbers import Rational

from .coeff import Poly
from .errors import CoordinateSystemMismatch, DegreeError, KindError


def sort_with_sign(seq):
    """Sort a sequence of distinct items, returning (sign, sorted tuple).

    A repeated item gives (0, None).
    """
    items = list(seq)
    if len(set(items)) != len(items):
        return 0, None
    sign = 1
    # insertion sort; each swap flips the sign
    for a in range(1, len(items)):
        b = a
        while b > 0 and items[b - 1] > items[b]:
            items[b - 1], items[b] = items[b], items[b - 1]
            sign = -sign
            b -= 1
    return sign, tuple(items)


@lru_cache(maxsize=None)
def merge_sign(a, b):
    """Sign and key of the concatenation a + b of two sorted keys (0, None on overlap)."""
    if set(a) & set(b):
        return 0, None
    inversions = sum(1 for x in a for y in b if x > y)
    return (-1 if inversions & 1 else 1), tuple(sorted(a + b))


@lru_cache(maxsize=None)
def _contract_key(vec_key, form_key):
    """Apply i_{d_{j1}}, then i_{d_{j2}}, ... to the basis form dz^{form_key}."""
    if not set(vec_key) <= set(form_key):
        return 0, None
    sign = 1
    rest = list(form_key)
    for j in vec_key:
        pos = rest.index(j)
        if pos & 1:
            sign = -sign
        del rest[pos]
    return sign, tuple(rest)


class Graded:
    """Common storage for forms and multivectors; use the subclasses."""

    __slots__ = ("cs", "degree", "terms")
    kind = "graded"
    basis_weight = 0

    def __init__(self, cs, degree, terms=None):
        self.cs = cs
        self.degree = degree
        self.terms = {} if terms is None else terms

    # construction -------------------------------------------------------------

    @classmethod
    def zero(cls, cs, degree):
        return cls(cs, degree)

    @classmethod
    def scalar(cls, p):
        """Degree-0 object holding the polynomial ``p``."""
        return cls(p.cs, 0, {(): p} if p else {})

    @classmethod
    def basis(cls, cs, indices, coeff=1):
        """Wedge of basis elements given in any order, times ``coeff``."""
        idx = tuple(cs.index(z) for z in indices)
        sign, key = sort_with_sign(idx)
        if not isinstance(coeff, Poly):
            coeff = Poly.const(cs, coeff)
        out = cls(cs, len(idx))
        if sign and coeff:
            out.terms[key] = coeff if sign > 0 else -coeff
        return out

    def _new(self, degree, terms):
        return type(self)(self.cs, degree, terms)

    def _check(self, other):
        if type(other) is not type(self):
            raise KindError(f"cannot combine {self.kind} with {getattr(other, 'kind', type(other).__name__)}")
        if other.cs != self.cs:
            raise CoordinateSystemMismatch(f"{self.cs} vs {other.cs}")

    # vector-space structure ------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        self._check(other)
        if self.degree != other.degree and self.terms and other.terms:
            raise DegreeError(f"cannot add degree {self.degree} and degree {other.degree}")
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k)
            v = c if v is None else v + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return self._new(self.degree, out)

    __radd__ = __add__

    def __neg__(self):
        return self._new(self.degree, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        """Multiplication by a polynomial or a rational number."""
        if isinstance(c, Poly):
            if c.cs != self.cs:
                raise CoordinateSystemMismatch(f"{self.cs} vs {c.cs}")
        elif isinstance(c, (int, Rational)):
            c = Fraction(c)
            if c == 1:
                return self
        else:
            return NotImplemented
        out = {}
        for k, v in self.terms.items():
            prod = v * c
            if prod:
                out[k] = prod
        return self._new(self.degree, out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Graded):
            return NotImplemented
        if type(other) is not type(self) or other.cs != self.cs:
            return False
        if not self.terms and not other.terms:
            return True
        return self.degree == other.degree and self.terms == other.terms

    def __hash__(self):
        return hash((self.kind, self.degree, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    # inspection -----------------------------------------------------------------

    def sorted_terms(self):
        return sorted(self.terms.items())

    def coefficient(self, indices):
        """Coefficient of the basis wedge of ``indices`` (in the given order)."""
        idx = tuple(self.cs.index(z) for z in indices)
        sign, key = sort_with_sign(idx)
        if not sign:
            return Poly.zero(self.cs)
        c = self.terms.get(key)
        if c is None:
            return Poly.zero(self.cs)
        return c if sign > 0 else -c

    def scalar_part(self):
        """The Poly of a degree-0 object."""
        return self.terms.get((), Poly.zero(self.cs))

    def map_coeffs(self, fn):
        out = {}
        for k, c in self.terms.items():
            v = fn(c)
            if v:
                out[k] = v
        return self._new(self.degree, out)

    def filter_keys(self, keep):
        return self._new(self.degree, {k: c for k, c in self.terms.items() if keep(k)})

    def term_scaling_degrees(self):
        """Map scaling degree -> object built from the matching monomials."""
        w = self.cs.weights
        sign = self.basis_weight
        buckets = {}
        for k, c in self.terms.items():
            base = sign * sum(w[j] for j in k)
            for s, part in c.scaling_split().items():
                buckets.setdefault(base + s, {})[k] = part
        return {s: self._new(self.degree, t) for s, t in sorted(buckets.items())}

    def __repr__(self):
        from .render import to_text

        return f"{type(self).__name__}({to_text(self)})"

    def __str__(self):
        from .render import to_text

        return to_text(self)


class Form(Graded):
    __slots__ = ()
    kind = "form"
    basis_weight = 1


class Multivector(Graded):
    __slots__ = ()
    kind = "multivector"
    basis_weight = -1


def _accumulate(out, key, coeff):
    v = out.get(key)
    v = coeff if v is None else v + coeff
    if v:
        out[key] = v
    else:
        out.pop(key, None)


def wedge(a, b):
    """Graded wedge product of two forms or two multivectors."""
    a._check(b)
    out = {}
    for ka, ca in a.terms.items():
        for kb, cb in b.terms.items():
            sign, key = merge_sign(ka, kb)
            if sign:
                prod = ca * cb
                _accumulate(out, key, prod if sign > 0 else -prod)
    return a._new(a.degree + b.degree, out)


def wedge_all(*objs):
    out = objs[0]
    for o in objs[1:]:
        out = wedge(out, o)
    return out


def contract(X, alpha):
    """Interior product i_X alpha; degree-0 multivectors act by multiplication."""
    if not isinstance(X, Multivector) or not isinstance(alpha, Form):
        raise KindError("contract needs a multivector and a form")
    if X.cs != alpha.cs:
        raise CoordinateSystemMismatch(f"{X.cs} vs {alpha.cs}")
    r = X.degree
    if r > alpha.degree:
        return Form(alpha.cs, 0)
    out = {}
    for kx, cx in X.terms.items():
        for ka, ca in alpha.terms.items():
            sign, key = _contract_key(kx, ka)
            if sign:
                prod = cx * ca
                _accumulate(out, key, prod if sign > 0 else -prod)
    return Form(alpha.cs, alpha.degree - r, out)


def ext_d(alpha):
    if not isinstance(alpha, Form):
        raise KindError("exterior derivative is defined on forms")
    cs = alpha.cs
    out = {}
    for key, c in alpha.terms.items():
        for z in range(cs.size):
            if z in key:
                continue
            dc = c.partial(z)
            if not dc:
                continue
            sign, new = merge_sign((z,), key)
            _accumulate(out, new, dc if sign > 0 else -dc)
    return Form(cs, alpha.degree + 1, out)


def lie_form(X, alpha):
    """L_X alpha = d i_X alpha - (-1)^r i_X d alpha."""
    r = X.degree
    first = ext_d(contract(X, alpha))
    second = contract(X, ext_d(alpha))
    return first - second if r % 2 == 0 else first + second


def schouten(X, Y):
    """Schouten bracket [X, Y] of multivectors, of degree r + s - 1.

    For f d_A and g d_B with A = (a_1..a_r), B = (b_1..b_s):

        [f d_A, g d_B] = sum_i (-1)^(r+i) f (d_{a_i} g) d_{A - a_i} ^ d_B
                       + sum_j (-1)^j g (d_{b_j} f) d_A ^ d_{B - b_j}

    which is the decomposable formula with the coefficient kept on the first
    factor of each side, expanded using [d_a, d_b] = 0.
    """
    if not isinstance(X, Multivector) or not isinstance(Y, Multivector):
        raise KindError("Schouten bracket is defined on multivectors")
    X._check(Y)
    r, s = X.degree, Y.degree
    deg = r + s - 1
    if deg < 0:
        return Multivector(X.cs, 0)
    out = {}
    for A, f in X.terms.items():
        for B, g in Y.terms.items():
            for i, a in enumerate(A, start=1):
                dg = g.partial(a)
                if not dg:
                    continue
                rest = A[: i - 1] + A[i:]
                sign, key = merge_sign(rest, B)
                if sign:
                    term = f * dg
                    if (r + i) % 2 == 1:
                        sign = -sign
                    _accumulate(out, key, term if sign > 0 else -term)
            for j, b in enumerate(B, start=1):
                df = f.partial(b)
                if not df:
                    continue
                rest = B[: j - 1] + B[j:]
                sign, key = merge_sign(A, rest)
                if sign:
                    term = g * df
                    if j % 2 == 1:
                        sign = -sign
                    _accumulate(out, key, term if sign > 0 else -term)
    return Multivector(X.cs, deg, out)


def lie_multivector(X, Y):
    """L_X Y, which is defined to be the Schouten bracket [X, Y]."""
    return schouten(X, Y)


def radial_homotopy(alpha, along=None):
    """Homotopy operator contracting the coordinates listed in ``along`` to zero.

    A term c * z^m dz^K whose monomial has degree d in the chosen coordinates
    and whose key holds k of them maps to c/(d+k) * z^m * i_E dz^K, with
    E = sum over the chosen z of z d/dz.  For every form,
    alpha = d H(alpha) + H(d alpha) + (alpha with the chosen coordinates and
    their differentials set to zero).
    """
    cs = alpha.cs
    chosen = set(range(cs.size) if along is None else along)
    out = {}
    for key, c in alpha.terms.items():
        slots = [pos for pos, z in enumerate(key) if z in chosen]
        if not slots:
            continue
        for e, v in c.terms.items():
            d = sum(e[z] for z in chosen)
            factor = v / (d + len(slots))
            for pos in slots:
                z = key[pos]
                e2 = list(e)
                e2[z] += 1
                coeff = Poly(cs, {tuple(e2): factor if pos % 2 == 0 else -factor})
                _accumulate(out, key[:pos] + key[pos + 1:], coeff)
    return Form(cs, alpha.degree - 1, out)


def poincare_potential(alpha):
    """Primitive of a closed form of degree >= 1 on the star-shaped coordinate patch."""
    from .errors import NotClosed

    if alpha.degree < 1:
        raise DegreeError("a primitive needs a form of degree at least 1")
    if ext_d(alpha):
        raise NotClosed("form is not closed")
    return radial_homotopy(alpha)
