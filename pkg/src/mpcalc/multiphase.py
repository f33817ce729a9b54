"""Canonical structures on the extended multiphase space and their bookkeeping.

Holds the multicanonical form theta, the multisymplectic form omega, the
scaling field Sigma, the volume-form family d^n x_{mu1...mur}, the
vertical/horizontal gradings for the three projections (onto M, E and P0),
the kernel of omega, and the scaling-degree decomposition.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from fractions import Fraction

from .coeff import CoordSystem, Poly
from .errors import DegreeError, MPCError
from .exterior import Form, Multivector, contract, ext_d, lie_form, schouten, wedge


@dataclass(frozen=True, eq=False)
class MultiphaseContext:
    cs: CoordSystem
    theta: Form
    omega: Form
    sigma: Multivector

    @property
    def n(self):
        return self.cs.n

    @property
    def N(self):
        return self.cs.N

    def __eq__(self, other):
        return isinstance(other, MultiphaseContext) and other.cs == self.cs

    def __hash__(self):
        return hash(self.cs)


def volume_family(cs, mus=()):
    """d^n x_{mu1...mur} = i_{d_{mur}} ... i_{d_{mu1}} d^n x (indices 1-based)."""
    if isinstance(cs, MultiphaseContext):
        cs = cs.cs
    for mu in mus:
        if not 1 <= mu <= cs.n:
            raise DegreeError(f"space-time index {mu} outside 1..{cs.n}")
    return _volume(cs, tuple(mus))


@lru_cache(maxsize=None)
def _volume(cs, mus):
    top = Form.basis(cs, [cs.x(mu) for mu in range(1, cs.n + 1)])
    if not mus:
        return top
    vec = Multivector.basis(cs, [cs.x(mu) for mu in mus])
    return contract(vec, top)


def dform(cs, z):
    """The basis 1-form dz for a coordinate position or Coord."""
    return Form.basis(cs, [z])


def dvec(cs, z):
    """The basis vector d/dz."""
    return Multivector.basis(cs, [z])


@lru_cache(maxsize=None)
def canonical_structures(n, N):
    cs = CoordSystem(n, N)
    theta = Form(cs, n)
    omega = Form(cs, n + 1)
    sigma = Multivector(cs, 1)
    for i in range(1, N + 1):
        dq = dform(cs, cs.q(i))
        for mu in range(1, n + 1):
            pvar = Poly.var(cs, cs.p(i, mu))
            vol_mu = volume_family(cs, (mu,))
            theta = theta + wedge(dq, vol_mu) * pvar
            omega = omega + wedge(wedge(dq, dform(cs, cs.p(i, mu))), vol_mu)
            sigma = sigma + dvec(cs, cs.p(i, mu)) * pvar
    w = Poly.var(cs, cs.w)
    theta = theta + volume_family(cs) * w
    omega = omega - wedge(dform(cs, cs.w), volume_family(cs))
    sigma = sigma + dvec(cs, cs.w) * w
    ctx = MultiphaseContext(cs, theta, omega, sigma)
    _check_structures(ctx)
    return ctx


def _check_structures(ctx):
    th, om, sg = ctx.theta, ctx.omega, ctx.sigma
    failures = []
    if ext_d(th) + om:
        failures.append("d theta = -omega")
    if lie_form(sg, th) != th:
        failures.append("L_Sigma theta = theta")
    if lie_form(sg, om) != om:
        failures.append("L_Sigma omega = omega")
    if contract(sg, th):
        failures.append("i_Sigma theta = 0")
    if contract(sg, om) + th:
        failures.append("i_Sigma omega = -theta")
    if failures:
        raise MPCError("canonical structures inconsistent: " + ", ".join(failures))


def context_for(cs):
    return canonical_structures(cs.n, cs.N)


# verticality and horizontality -------------------------------------------------

PROJECTIONS = ("M", "E", "P0")

_ALIASES = {"M": "M", "ontoM": "M", "E": "E", "ontoE": "E", "P0": "P0", "ontoP0": "P0"}

# kinds of basis vectors that are vertical for each projection
_VERTICAL = {"M": {"q", "p", "w"}, "E": {"p", "w"}, "P0": {"w"}}
# kinds of basis 1-forms that are horizontal for each projection
_HORIZONTAL = {"M": {"x"}, "E": {"x", "q"}, "P0": {"x", "q", "p"}}


def _projection(name):
    try:
        return _ALIASES[name]
    except KeyError:
        raise ValueError(f"unknown projection {name!r}; use one of M, E, P0") from None


def vertical_positions(cs, projection):
    kinds = _VERTICAL[_projection(projection)]
    return frozenset(k for k in range(cs.size) if cs.kind(k) in kinds)


def horizontal_positions(cs, projection):
    kinds = _HORIZONTAL[_projection(projection)]
    return frozenset(k for k in range(cs.size) if cs.kind(k) in kinds)


def verticality(X, projection):
    """Largest s such that X is s-vertical (X = 0 counts as fully vertical)."""
    vert = vertical_positions(X.cs, projection)
    return min((sum(1 for k in key if k in vert) for key in X.terms), default=X.degree)


def horizontality(alpha, projection):
    """Largest l such that alpha is l-horizontal."""
    hor = horizontal_positions(alpha.cs, projection)
    return min((sum(1 for k in key if k in hor) for key in alpha.terms), default=alpha.degree)


# kernel of omega -----------------------------------------------------------------

def kernel_generators(ctx, r):
    """Generators (over the polynomials) of the multivectors X of degree r with i_X omega = 0."""
    if r <= 1:
        return []
    return list(_kernel_generators(ctx.cs, r))


@lru_cache(maxsize=None)
def _kernel_generators(cs, r):
    n, N = cs.n, cs.N
    if r > cs.size:
        return ()
    gens = []
    seen = set()

    def add(mv):
        if not mv:
            return
        sig = frozenset((k, str(c)) for k, c in mv.terms.items())
        neg = frozenset((k, str(-c)) for k, c in mv.terms.items())
        if sig in seen or neg in seen:
            return
        seen.add(sig)
        gens.append(mv)

    xs = list(range(1, n + 1))
    for key in combinations(range(cs.size), r):
        kinds = [cs.kind(k) for k in key]
        nq, np_, nw = kinds.count("q"), kinds.count("p"), kinds.count("w")
        vert = nq + np_ + nw
        if vert >= 3:
            add(Multivector.basis(cs, key))
        elif vert == 2 and not (nq == 1 and np_ == 1):
            add(Multivector.basis(cs, key))

    # (d/dq^i ^ d/dp_k^kappa + delta_i^k d/dp ^ d/dx^kappa) ^ d/dx^{rest}
    for rest in combinations(xs, r - 2):
        tail = [cs.x(mu) for mu in rest]
        for i in range(1, N + 1):
            for k in range(1, N + 1):
                for kappa in xs:
                    g = Multivector.basis(cs, [cs.q(i), cs.p(k, kappa)] + tail)
                    if i == k:
                        g = g + Multivector.basis(cs, [cs.w, cs.x(kappa)] + tail)
                    add(g)
    # (d/dp_i^mu1 ^ d/dx^mu2 + d/dp_i^mu2 ^ d/dx^mu1) ^ d/dx^{rest}
    for rest in combinations(xs, r - 2):
        tail = [cs.x(mu) for mu in rest]
        for i in range(1, N + 1):
            for mu1 in xs:
                for mu2 in xs:
                    if mu2 < mu1:
                        continue
                    g = Multivector.basis(cs, [cs.p(i, mu1), cs.x(mu2)] + tail)
                    g = g + Multivector.basis(cs, [cs.p(i, mu2), cs.x(mu1)] + tail)
                    add(g)
    # at top degree d/dq^i ^ d/dx^1 ^ ... ^ d/dx^n is also annihilated (omega has no
    # dq ^ d^n x term); the listed families miss it, the rank check in the suites finds it
    if r == n + 1:
        for i in range(1, N + 1):
            add(Multivector.basis(cs, [cs.q(i)] + [cs.x(mu) for mu in xs]))
    return tuple(gens)


def in_kernel(ctx, X):
    return not contract(X, ctx.omega)


def vanishes_on_kernel(ctx, f):
    """True iff i_G f = 0 for every kernel generator G of degree 2..deg f."""
    for r in range(2, f.degree + 1):
        for g in _kernel_generators(ctx.cs, r):
            if contract(g, f):
                return False
    return True


# scaling ----------------------------------------------------------------------------

def lie_sigma(ctx, obj):
    """L_Sigma acting on a form or a multivector."""
    if isinstance(obj, Multivector):
        return schouten(ctx.sigma, obj)
    return lie_form(ctx.sigma, obj)


def _degree_bounds(obj):
    """Range of scaling degrees an object can have, read off without bucketing."""
    cs = obj.cs
    mom = cs.momentum_indices
    top = 0
    for key, c in obj.terms.items():
        d = max((sum(e[k] for k in mom) for e in c.terms), default=0)
        if isinstance(obj, Form):
            d += sum(1 for k in key if k in mom)
        top = max(top, d)
    low = -obj.degree if isinstance(obj, Multivector) else 0
    return low, top


def scaling_project(ctx, obj, s, degrees=None):
    """Component of scaling degree s via the polynomial prod_{t != s} (L_Sigma - t)/(s - t)."""
    if degrees is None:
        low, high = _degree_bounds(obj)
        degrees = range(low, high + 1)
    out = obj
    for t in degrees:
        if t == s:
            continue
        out = (lie_sigma(ctx, out) - out * t) * Fraction(1, s - t)
    return out


def scaling_decompose(obj, ctx=None, check=False):
    """Map scaling degree -> homogeneous component.

    Components are read off the weighted degree of each monomial.  With
    ``check=True`` each component is recomputed with the projector polynomial
    in L_Sigma and the two are compared.
    """
    parts = obj.term_scaling_degrees()
    if check:
        if ctx is None:
            ctx = context_for(obj.cs)
        low, high = _degree_bounds(obj)
        for s in range(low, high + 1):
            proj = scaling_project(ctx, obj, s, range(low, high + 1))
            if proj != parts.get(s, type(obj)(obj.cs, obj.degree)):
                raise MPCError(f"projector and bucketing disagree in scaling degree {s}")
    return parts


def is_homogeneous(ctx, obj, s):
    return lie_sigma(ctx, obj) == obj * s


# pull-backs from E -----------------------------------------------------------------------

def basic_witness(ctx, alpha):
    """The base form on E that pulls back to alpha, or None if alpha is not scale invariant."""
    if lie_form(ctx.sigma, alpha):
        return None
    # with L_Sigma alpha = 0 no momentum or momentum differential survives
    return Form(alpha.cs, alpha.degree, dict(alpha.terms))


def zero_section(alpha):
    """Restriction to the zero section: momenta set to 0, momentum differentials dropped."""
    cs = alpha.cs
    mom = set(cs.momentum_indices)
    out = {}
    for key, c in alpha.terms.items():
        if any(k in mom for k in key):
            continue
        c0 = c.subs_zero(cs.momentum_indices)
        if c0:
            out[key] = c0
    return Form(cs, alpha.degree, out)


def depends_on_momenta(obj):
    mom = obj.cs.momentum_indices
    return any(c.depends_on(k) for c in obj.terms.values() for k in mom)


__all__ = [
    "MultiphaseContext",
    "canonical_structures",
    "context_for",
    "volume_family",
    "dform",
    "dvec",
    "verticality",
    "horizontality",
    "vertical_positions",
    "horizontal_positions",
    "kernel_generators",
    "in_kernel",
    "vanishes_on_kernel",
    "lie_sigma",
    "scaling_project",
    "scaling_decompose",
    "is_homogeneous",
    "basic_witness",
    "zero_section",
    "depends_on_momenta",
    "PROJECTIONS",
]
