"""Seeded random polynomials, forms and multivectors for the verification suites."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .coeff import Poly
from .exterior import Form, Multivector


def rational(rng, span=3):
    """A small nonzero rational."""
    while True:
        num = rng.randint(-span, span)
        if num:
            return Fraction(num, rng.choice((1, 1, 1, 2, 3)))


def poly(cs, rng, max_deg=3, terms=2, variables=None, min_deg=0):
    """Random polynomial with up to ``terms`` monomials of total degree in [min_deg, max_deg]."""
    variables = list(range(cs.size)) if variables is None else list(variables)
    out = Poly.zero(cs)
    for _ in range(terms):
        e = [0] * cs.size
        deg = rng.randint(min_deg, max_deg) if variables else 0
        for _ in range(deg):
            e[rng.choice(variables)] += 1
        out = out + Poly.monomial(cs, e, rational(rng))
    return out


def graded(cls, cs, rng, degree, terms=2, max_deg=2, variables=None, basis=None, poly_terms=2):
    """Random form or multivector of the given degree.

    ``basis`` restricts the coordinate positions allowed in keys and
    ``variables`` the coordinates allowed in coefficients.
    """
    basis = list(range(cs.size)) if basis is None else sorted(basis)
    out = cls(cs, degree)
    if degree > len(basis):
        return out
    for _ in range(terms):
        key = tuple(sorted(rng.sample(basis, degree)))
        out = out + cls.basis(cs, key, poly(cs, rng, max_deg, poly_terms, variables))
    return out


def form(cs, rng, degree, **kw):
    return graded(Form, cs, rng, degree, **kw)


def multivector(cs, rng, degree, **kw):
    return graded(Multivector, cs, rng, degree, **kw)


def antisym_keys(n, size):
    """Strictly increasing space-time index tuples of the given length (1-based)."""
    return list(combinations(range(1, n + 1), size))


def lh_data(ctx, rng, r, minus=True):
    """Random free data for a locally Hamiltonian r-field, 0 < r < n."""
    from .hamiltonian import LHFreeData

    cs = ctx.cs
    n, N = cs.n, cs.N
    xq = cs.x_indices + cs.q_indices
    # with one field component any q-dependence of the base coefficients is admissible
    base_vars = cs.x_indices + (cs.q_indices if N == 1 else ())
    data = LHFreeData(r)
    for M in antisym_keys(n, r):
        data.base_x[M] = poly(cs, rng, 2, 2, base_vars)
        if minus:
            data.minus[M] = poly(cs, rng, 2, 2, xq)
    for s in range(1, r + 1):
        fam = {}
        for I in combinations(range(1, N + 1), s):
            for M in antisym_keys(n, r - s):
                fam[(I, M)] = poly(cs, rng, 2, 2, xq)
        if fam:
            data.y_fams[s] = fam
    return data


def horizontal_form(ctx, rng, degree, terms=2):
    """Random form over (x, q) whose basis elements are volume-family members."""
    from .multiphase import volume_family

    cs = ctx.cs
    n = cs.n
    out = Form(cs, degree)
    keys = antisym_keys(n, n - degree)
    xq = cs.x_indices + cs.q_indices
    for _ in range(terms):
        out = out + volume_family(cs, rng.choice(keys)) * poly(cs, rng, 2, 2, xq)
    return out


@dataclass
class PoissonSample:
    """A Poisson form f = f0 + J(F) + fc together with a witness X (i_X omega = df)."""

    f: Form
    X: Multivector
    f0: Form
    F: Multivector
    fc: Form


def poisson_form(ctx, rng, r):
    """Random Poisson form of degree n - r (0 < r < n) assembled from its canonical pieces."""
    from .exterior import contract, ext_d
    from .hamiltonian import generate_lh, nvector_from_function
    from .multiphase import lie_sigma
    from .poisson import pullback_analysis

    cs = ctx.cs
    n = cs.n
    f0 = horizontal_form(ctx, rng, n - r) + ext_d(horizontal_form(ctx, rng, n - r - 1))
    F = generate_lh(ctx, lh_data(ctx, rng, r, minus=False))
    J = contract(F, ctx.theta)
    if r % 2 == 0:
        J = -J
    X = pullback_analysis(ctx, f0).X0 + F + lie_sigma(ctx, F)
    if r + 1 < n:
        Fc = generate_lh(ctx, lh_data(ctx, rng, r + 1, minus=False))
    else:
        # a potential vanishing at zero momentum keeps the degree -1 part of Fc away
        h = Poly.var(cs, rng.choice(cs.momentum_indices)) * poly(cs, rng, 2, 2)
        Fc = nvector_from_function(ctx, h)
    fc = contract(Fc, ctx.omega)
    if r % 2:
        fc = -fc
    return PoissonSample(f0 + J + fc, X, f0, F, fc)
