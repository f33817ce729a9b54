"""Hamiltonian multivector fields: normal coordinates, classification, generation.

Coefficient families of an r-multivector are stored as dicts keyed by sorted
index tuples, with the antisymmetric extension implied:

    coeff_x[M]         X^{mu1...mur}          (|M| = r)
    coeff_q[(i, M')]   X^{i, mu2...mur}       (|M'| = r - 1)
    coeff_p[(i, M)]    X_i^{mu1...mur}        (|M| = r)
    coeff_w[M']        X~^{mu2...mur}         (|M'| = r - 1)

so that X is the sum over sorted tuples of

    coeff_x[M] d_x^M + coeff_q[i, M'] d_{q^i} ^ d_x^{M'}
    + coeff_p[i, M] (1/r) sum_a (-1)^a d_{p_i^{m_a}} ^ d_x^{M - m_a}
    + coeff_w[M'] d_p ^ d_x^{M'}

plus a remainder xi with values in the kernel of omega.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations, product
from math import factorial

from .coeff import Poly
from .errors import DegreeError, MPCError, NonProjectable, NotLocallyHamiltonian
from .exterior import (
    Form,
    Multivector,
    contract,
    ext_d,
    lie_form,
    poincare_potential,
    radial_homotopy,
    sort_with_sign,
    wedge,
)
from .multiphase import in_kernel, volume_family


def anti_get(fam, idx, zero):
    """Read an antisymmetric family at an arbitrary index tuple."""
    sign, key = sort_with_sign(idx)
    if not sign:
        return zero
    v = fam.get(key)
    if v is None:
        return zero
    return v if sign > 0 else -v


def anti_get_q(fam, i, idx, zero):
    sign, key = sort_with_sign(idx)
    if not sign:
        return zero
    v = fam.get((i, key))
    if v is None:
        return zero
    return v if sign > 0 else -v


def _put(fam, key, value):
    if value:
        fam[key] = value


def _xs(cs, mus):
    return [cs.x(mu) for mu in mus]


def _combos(n, k):
    return list(combinations(range(1, n + 1), k)) if k >= 0 else []


@dataclass
class StdDecomposition:
    r: int
    coeff_x: dict = field(default_factory=dict)
    coeff_q: dict = field(default_factory=dict)
    coeff_p: dict = field(default_factory=dict)
    coeff_w: dict = field(default_factory=dict)
    xi: Multivector | None = None

    def recombine(self, cs):
        out = assemble(cs, self.r, self.coeff_x, self.coeff_q, self.coeff_p, self.coeff_w)
        return out + self.xi if self.xi is not None else out

    def to_record(self):
        from .render import to_record

        def fam(d, with_i):
            if with_i:
                return [{"i": i, "mu": list(m), "coeff": str(c)} for (i, m), c in sorted(d.items())]
            return [{"mu": list(m), "coeff": str(c)} for m, c in sorted(d.items())]

        return {
            "r": self.r,
            "coeff_x": fam(self.coeff_x, False),
            "coeff_q": fam(self.coeff_q, True),
            "coeff_p": fam(self.coeff_p, True),
            "coeff_w": fam(self.coeff_w, False),
            "xi": to_record(self.xi) if self.xi is not None else None,
        }


def assemble(cs, r, coeff_x=None, coeff_q=None, coeff_p=None, coeff_w=None):
    """Build the multivector described by the four coefficient families."""
    out = Multivector(cs, r)
    for M, c in (coeff_x or {}).items():
        out = out + Multivector.basis(cs, _xs(cs, M), c)
    for (i, M), c in (coeff_q or {}).items():
        out = out + Multivector.basis(cs, [cs.q(i)] + _xs(cs, M), c)
    inv_r = Fraction(1, r) if r else Fraction(0)
    for (i, M), c in (coeff_p or {}).items():
        for a, m in enumerate(M):
            rest = M[:a] + M[a + 1:]
            term = Multivector.basis(cs, [cs.p(i, m)] + _xs(cs, rest), c * inv_r)
            out = out - term if a % 2 else out + term
    for M, c in (coeff_w or {}).items():
        out = out + Multivector.basis(cs, [cs.w] + _xs(cs, M), c)
    return out


def standard_decomposition(ctx, X):
    cs = ctx.cs
    n, N, r = cs.n, cs.N, X.degree
    if not 1 <= r <= n + 1:
        raise DegreeError(f"standard decomposition needs 1 <= r <= {n + 1}, got {r}")
    std = StdDecomposition(r)
    if r <= n:
        for M in _combos(n, r):
            _put(std.coeff_x, M, X.coefficient(_xs(cs, M)))
        for i in range(1, N + 1):
            for M in _combos(n, r - 1):
                _put(std.coeff_q, (i, M), X.coefficient([cs.q(i)] + _xs(cs, M)))
        for i in range(1, N + 1):
            for M in _combos(n, r):
                total = Poly.zero(cs)
                for a, m in enumerate(M):
                    c = X.coefficient([cs.p(i, m)] + _xs(cs, M[:a] + M[a + 1:]))
                    total = total - c if a % 2 else total + c
                _put(std.coeff_p, (i, M), total)
    for M in _combos(n, r - 1):
        total = X.coefficient([cs.w] + _xs(cs, M))
        for i in range(1, N + 1):
            for t, mu in enumerate(M):
                c = X.coefficient([cs.q(i), cs.p(i, mu)] + _xs(cs, M[:t] + M[t + 1:]))
                total = total + c if t % 2 else total - c
        _put(std.coeff_w, M, total)
    std.xi = X - assemble(cs, r, std.coeff_x, std.coeff_q, std.coeff_p, std.coeff_w)
    if not in_kernel(ctx, std.xi):
        raise MPCError("standard decomposition left a remainder outside the kernel")
    return std


def omega_contraction_formula(ctx, std):
    """i_X omega evaluated from the coefficient families alone."""
    cs = ctx.cs
    n, N, r = cs.n, cs.N, std.r
    sgn_r = -1 if r % 2 else 1
    out = Form(cs, n + 1 - r)
    for M, c in std.coeff_w.items():
        out = out - volume_family(cs, M) * c
    for (i, M), c in std.coeff_p.items():
        out = out + wedge(Form.basis(cs, [cs.q(i)]), volume_family(cs, M)) * (c * sgn_r)
    for (i, M), c in std.coeff_q.items():
        for mu in range(1, n + 1):
            if mu in M:
                continue
            out = out - wedge(Form.basis(cs, [cs.p(i, mu)]), volume_family(cs, (mu,) + M)) * (c * sgn_r)
    for M, c in std.coeff_x.items():
        for i in range(1, N + 1):
            for mu in range(1, n + 1):
                if mu in M:
                    continue
                dqdp = Form.basis(cs, [cs.q(i), cs.p(i, mu)])
                out = out + wedge(dqdp, volume_family(cs, (mu,) + M)) * c
        out = out - wedge(Form.basis(cs, [cs.w]), volume_family(cs, M)) * (c * sgn_r)
    return out


def theta_contraction_formula(ctx, std):
    """i_X theta evaluated from the coefficient families alone."""
    cs = ctx.cs
    n, N, r = cs.n, cs.N, std.r
    sgn_r = -1 if r % 2 else 1
    w = Poly.var(cs, cs.w)
    out = Form(cs, n - r)
    for (i, M), c in std.coeff_q.items():
        for mu in range(1, n + 1):
            if mu not in M:
                out = out + volume_family(cs, (mu,) + M) * (Poly.var(cs, cs.p(i, mu)) * c)
    for M, c in std.coeff_x.items():
        out = out + volume_family(cs, M) * (w * c)
        for i in range(1, N + 1):
            for mu in range(1, n + 1):
                if mu in M:
                    continue
                piece = wedge(Form.basis(cs, [cs.q(i)]), volume_family(cs, (mu,) + M))
                out = out + piece * (Poly.var(cs, cs.p(i, mu)) * c * sgn_r)
    return out


# classification ---------------------------------------------------------------------

@dataclass(frozen=True)
class Classification:
    kind: str  # "not-hamiltonian", "locally" or "exact"
    potential: Form | None = None

    @property
    def hamiltonian(self):
        return self.kind != "not-hamiltonian"


def classify(ctx, X):
    n = ctx.n
    r = X.degree
    if not 0 <= r <= n + 1:
        raise DegreeError(f"classification needs 0 <= r <= {n + 1}, got {r}")
    if lie_form(X, ctx.omega):
        return Classification("not-hamiltonian")
    if not lie_form(X, ctx.theta):
        pot = contract(X, ctx.theta)
        return Classification("exact", pot if r % 2 == 1 else -pot)
    if r <= n:
        return Classification("locally", poincare_potential(contract(X, ctx.omega)))
    return Classification("locally", None)


def is_locally_hamiltonian(ctx, X):
    return not lie_form(X, ctx.omega)


# generation from free data ---------------------------------------------------------------------

@dataclass
class LHFreeData:
    """Free data of a locally Hamiltonian r-field with 0 < r < n.

    ``y_fams[s]`` maps (I, M) with |I| = s, |M| = r - s (both sorted) to the
    polynomial Y_{s-1}^{I, M}; ``base_x`` and ``minus`` map sorted M with
    |M| = r to X^M and X_-^M.
    """

    r: int
    base_x: dict = field(default_factory=dict)
    y_fams: dict = field(default_factory=dict)
    minus: dict = field(default_factory=dict)

    def to_record(self):
        return {
            "r": self.r,
            "base_x": [{"mu": list(m), "coeff": str(c)} for m, c in sorted(self.base_x.items())],
            "y_fams": {
                str(s): [{"i": list(I), "mu": list(M), "coeff": str(c)} for (I, M), c in sorted(fam.items())]
                for s, fam in sorted(self.y_fams.items())
            },
            "minus": [{"mu": list(m), "coeff": str(c)} for m, c in sorted(self.minus.items())],
        }


def _validate_data(cs, data):
    n, N, r = cs.n, cs.N, data.r
    if not 0 < r < n:
        raise DegreeError(f"free data needs 0 < r < {n}, got {r}")
    base_vars = cs.x_indices + (cs.q_indices if N == 1 else ())
    xq = cs.x_indices + cs.q_indices
    for M, c in data.base_x.items():
        if len(M) != r or tuple(sorted(set(M))) != tuple(M):
            raise ValueError(f"base_x key {M} is not a sorted index tuple of length {r}")
        if not c.depends_only_on(base_vars):
            raise ValueError(f"base_x[{M}] may depend on x only" + (" and q" if N == 1 else ""))
    for s, fam in data.y_fams.items():
        if not 1 <= s <= r:
            raise ValueError(f"y_fams index {s} outside 1..{r}")
        for (I, M), c in fam.items():
            if len(I) != s or tuple(sorted(set(I))) != tuple(I) or any(not 1 <= i <= N for i in I):
                raise ValueError(f"y_fams[{s}] fiber block {I} is not antisymmetric-sorted")
            if len(M) != r - s or tuple(sorted(set(M))) != tuple(M):
                raise ValueError(f"y_fams[{s}] space-time block {M} is not antisymmetric-sorted")
            if not c.depends_only_on(xq):
                raise ValueError("y_fams entries may depend on x and q only")
    for M, c in data.minus.items():
        if len(M) != r or tuple(sorted(set(M))) != tuple(M):
            raise ValueError(f"minus key {M} is not a sorted index tuple of length {r}")
        if not c.depends_only_on(xq):
            raise ValueError("minus entries may depend on x and q only")


def _perm_sign(perm, ref):
    """Sign of ``perm`` as a rearrangement of the tuple ``ref``."""
    pos = {v: k for k, v in enumerate(ref)}
    sign, _ = sort_with_sign([pos[v] for v in perm])
    return sign


def lh_coeff_q(cs, data):
    """X^{i, mu2...mur} assembled from the Y families (sorted keys only)."""
    n, N, r = cs.n, cs.N, data.r
    zero = Poly.zero(cs)
    out = {}
    for i in range(1, N + 1):
        for Mp in _combos(n, r - 1):
            total = zero
            for s in range(1, r + 1):
                fam = data.y_fams.get(s)
                if not fam:
                    continue
                acc = zero
                for perm in permutations(Mp):
                    sign = _perm_sign(perm, Mp)
                    head, tail = perm[: s - 1], perm[s - 1:]
                    for js in product(range(1, N + 1), repeat=s - 1):
                        y = _y_get(fam, (i,) + js, tail, zero)
                        if not y:
                            continue
                        mono = Poly.const(cs, sign)
                        for j, mu in zip(js, head):
                            mono = mono * Poly.var(cs, cs.p(j, mu))
                        acc = acc + mono * y
                total = total + acc * Fraction(1, factorial(s - 1) * factorial(r - s))
            _put(out, (i, Mp), total)
    return out


def _y_get(fam, I, M, zero):
    si, ki = sort_with_sign(I)
    sm, km = sort_with_sign(M)
    if not si or not sm:
        return zero
    v = fam.get((ki, km))
    if v is None:
        return zero
    return v if si * sm > 0 else -v


def generate_lh(ctx, data):
    """The locally Hamiltonian r-field (kernel part set to zero) built from free data."""
    cs = ctx.cs
    _validate_data(cs, data)
    n, N, r = cs.n, cs.N, data.r
    zero = Poly.zero(cs)
    w = Poly.var(cs, cs.w)
    sgn_r = -1 if r % 2 else 1

    def p(i, mu):
        return Poly.var(cs, cs.p(i, mu))

    def X(idx):
        return anti_get(data.base_x, idx, zero)

    def Xm(idx):
        return anti_get(data.minus, idx, zero)

    coeff_x = {M: c for M, c in data.base_x.items() if c}
    coeff_q = lh_coeff_q(cs, data)

    def Xq(i, idx):
        return anti_get_q(coeff_q, i, idx, zero)

    coeff_p = {}
    for i in range(1, N + 1):
        qi = cs.q(i)
        for M in _combos(n, r):
            total = -(w * X(M).partial(qi))
            for mu in range(1, n + 1):
                total = total + p(i, mu) * X(M).partial(cs.x(mu))
            for a, m in enumerate(M):
                for nu in range(1, n + 1):
                    replaced = M[:a] + (nu,) + M[a + 1:]
                    total = total - p(i, m) * X(replaced).partial(cs.x(nu))
            inner = zero
            for a, m in enumerate(M):
                rest = M[:a] + M[a + 1:]
                for j in range(1, N + 1):
                    piece = p(j, m) * Xq(j, rest).partial(qi)
                    inner = inner - piece if a % 2 else inner + piece
            total = total - inner.sigma_inverse()
            total = total + Xm(M).partial(qi)
            _put(coeff_p, (i, M), total)

    coeff_w = {}
    for Mp in _combos(n, r - 1):
        total = zero
        for nu in range(1, n + 1):
            total = total + w * X(Mp + (nu,)).partial(cs.x(nu)) * sgn_r
        inner = zero
        for i in range(1, N + 1):
            for mu in range(1, n + 1):
                inner = inner + p(i, mu) * Xq(i, Mp).partial(cs.x(mu))
            for t, m in enumerate(Mp):
                for nu in range(1, n + 1):
                    replaced = Mp[:t] + (nu,) + Mp[t + 1:]
                    inner = inner - p(i, m) * Xq(i, replaced).partial(cs.x(nu))
        total = total - inner.sigma_inverse()
        for nu in range(1, n + 1):
            total = total - Xm(Mp + (nu,)).partial(cs.x(nu)) * sgn_r
        _put(coeff_w, Mp, total)

    return assemble(cs, r, coeff_x, coeff_q, coeff_p, coeff_w)


def vol_coefficient(form, M):
    """Coefficient of d^n x_M (M sorted) in a form."""
    cs = form.cs
    vol = volume_family(cs, M)
    (key, sign), = ((k, c.constant_term()) for k, c in vol.terms.items())
    c = form.terms.get(key)
    if c is None:
        return Poly.zero(cs)
    return c if sign > 0 else -c


def extract_lh_data(ctx, X):
    """Free data reproducing X modulo the kernel of omega."""
    cs = ctx.cs
    n, N, r = cs.n, cs.N, X.degree
    if not 0 < r < n:
        raise DegreeError(f"free data exists for 0 < r < {n}, got {r}")
    if not is_locally_hamiltonian(ctx, X):
        raise NotLocallyHamiltonian("L_X omega does not vanish")
    std = standard_decomposition(ctx, X)
    mom = cs.momentum_indices
    data = LHFreeData(r)
    for M, c in std.coeff_x.items():
        _put(data.base_x, M, c)
    zero = Poly.zero(cs)
    for s in range(1, r + 1):
        fam = {}
        for I in combinations(range(1, N + 1), s):
            for Mrest in _combos(n, r - s):
                free = [mu for mu in range(1, n + 1) if mu not in Mrest][: s - 1]
                c = anti_get_q(std.coeff_q, I[0], tuple(free) + Mrest, zero)
                for j, mu in zip(I[1:], free):
                    c = c.partial(cs.p(j, mu))
                _put(fam, (I, Mrest), c.subs_zero(mom))
        if fam:
            data.y_fams[s] = fam

    # X_- from the scaling-degree-0 part of i_X omega, which equals (-1)^r d g
    # for the horizontal form g = sum_M X_-^M d^n x_M
    beta = contract(X, ctx.omega).term_scaling_degrees().get(0, Form(cs, n + 1 - r))
    if r % 2:
        beta = -beta
    along_q = cs.q_indices
    g = radial_homotopy(beta, along_q)
    base = beta.filter_keys(lambda key: not any(k in along_q for k in key)).map_coeffs(
        lambda c: c.subs_zero(along_q)
    )
    if base:
        g = g + poincare_potential(base)
    if ext_d(g) != beta:
        raise NotLocallyHamiltonian("degree-0 part of i_X omega is not of the expected exact form")
    for M in _combos(n, r):
        _put(data.minus, M, vol_coefficient(g, M))
    return data


def minus_is_trivial(cs, data):
    """True when the X_- data contributes nothing to the generated field."""
    zero = Poly.zero(cs)
    for M, c in data.minus.items():
        if any(c.partial(q) for q in cs.q_indices):
            return False
    for Mp in _combos(cs.n, data.r - 1):
        div = zero
        for nu in range(1, cs.n + 1):
            div = div + anti_get(data.minus, Mp + (nu,), zero).partial(cs.x(nu))
        if div:
            return False
    return True



def exactness_conditions(cs, data):
    """The data-side criterion for an exact field: no p-dependent X^{i,...} and trivial X_-."""
    for s, fam in data.y_fams.items():
        if s >= 2 and any(fam.values()):
            return False
    return minus_is_trivial(cs, data)

# degree n -------------------------------------------------------------------------------

def nvector_from_function(ctx, f):
    """An n-multivector X with i_X omega = df."""
    cs = ctx.cs
    n, N = cs.n, cs.N
    top = tuple(range(1, n + 1))
    sgn_n1 = -1 if (n - 1) % 2 else 1
    coeff_x = {}
    coeff_q = {}
    coeff_p = {}
    coeff_w = {}
    _put(coeff_x, top, f.partial(cs.w) * sgn_n1)
    for i in range(1, N + 1):
        _put(coeff_p, (i, top), f.partial(cs.q(i)) * (-sgn_n1))
    for mu in range(1, n + 1):
        Mp = tuple(m for m in top if m != mu)
        eps, _ = sort_with_sign(Mp + (mu,))
        for i in range(1, N + 1):
            _put(coeff_q, (i, Mp), f.partial(cs.p(i, mu)) * eps)
        _put(coeff_w, Mp, -f.partial(cs.x(mu)) * eps)
    return assemble(cs, n, coeff_x, coeff_q, coeff_p, coeff_w)


# lifts and projections ---------------------------------------------------------------------

def canonical_lift(ctx, XE):
    """Lift of a vector field on E (components along x and q only) to P."""
    cs = ctx.cs
    n, N = cs.n, cs.N
    if not isinstance(XE, Multivector) or XE.degree != 1:
        raise DegreeError("canonical lift takes a vector field")
    xq = cs.x_indices + cs.q_indices
    for (k,), c in XE.terms.items():
        if k not in xq:
            raise NonProjectable("vector field has components along the momenta")
        if not c.depends_only_on(xq):
            raise NonProjectable("vector field coefficients depend on the momenta")
        if N > 1 and k in cs.x_indices and not c.depends_only_on(cs.x_indices):
            raise NonProjectable("x-components depend on q while N > 1")
    zero = Poly.zero(cs)
    Xx = {mu: XE.terms.get((cs.x(mu),), zero) for mu in range(1, n + 1)}
    Xq = {i: XE.terms.get((cs.q(i),), zero) for i in range(1, N + 1)}
    w = Poly.var(cs, cs.w)

    def p(i, mu):
        return Poly.var(cs, cs.p(i, mu))

    div = zero
    for nu in range(1, n + 1):
        div = div + Xx[nu].partial(cs.x(nu))
    out = XE
    for i in range(1, N + 1):
        for mu in range(1, n + 1):
            c = zero
            for j in range(1, N + 1):
                c = c + Xq[j].partial(cs.q(i)) * p(j, mu)
            for nu in range(1, n + 1):
                c = c - Xx[mu].partial(cs.x(nu)) * p(i, nu)
            c = c + div * p(i, mu) + Xx[mu].partial(cs.q(i)) * w
            out = out - Multivector.basis(cs, [cs.p(i, mu)], c)
    c = div * w
    for i in range(1, N + 1):
        for mu in range(1, n + 1):
            c = c + Xq[i].partial(cs.x(mu)) * p(i, mu)
    return out - Multivector.basis(cs, [cs.w], c)


def split_vector_lh(ctx, X):
    """(X_minus, X_plus) with scaling degrees -1 and 0."""
    if X.degree != 1:
        raise DegreeError("split_vector_lh takes a vector field")
    if not is_locally_hamiltonian(ctx, X):
        raise NotLocallyHamiltonian("L_X omega does not vanish")
    parts = X.term_scaling_degrees()
    if set(parts) - {-1, 0}:
        raise NotLocallyHamiltonian(f"unexpected scaling degrees {sorted(parts)}")
    zero = Multivector(ctx.cs, 1)
    return parts.get(-1, zero), parts.get(0, zero)


@dataclass(frozen=True)
class Projectability:
    M: bool
    E: bool
    P0: bool


_FIBER = {"M": ("q", "p", "w"), "E": ("p", "w"), "P0": ("w",)}


def _projectable(cs, X, fiber_kinds):
    fiber = [k for k in range(cs.size) if cs.kind(k) in fiber_kinds]
    fset = set(fiber)
    for key, c in X.terms.items():
        if any(k in fset for k in key):
            continue
        if any(c.depends_on(z) for z in fiber):
            return False
    return True


def projectability(ctx, X):
    cs = ctx.cs
    return Projectability(*(_projectable(cs, X, _FIBER[name]) for name in ("M", "E", "P0")))


__all__ = [
    "StdDecomposition",
    "assemble",
    "standard_decomposition",
    "omega_contraction_formula",
    "theta_contraction_formula",
    "Classification",
    "classify",
    "is_locally_hamiltonian",
    "poincare_potential",
    "LHFreeData",
    "generate_lh",
    "extract_lh_data",
    "minus_is_trivial",
    "lh_coeff_q",
    "vol_coefficient",
    "nvector_from_function",
    "canonical_lift",
    "split_vector_lh",
    "Projectability",
    "projectability",
    "anti_get",
    "anti_get_q",
]
