"""Poisson and Hamiltonian forms, their canonical decomposition and the Poisson bracket.

A form f of degree n - r is Hamiltonian when df = i_X omega for some
r-multivector X, and Poisson when in addition it vanishes on the kernel of
omega.  Coefficient families use sorted space-time index tuples, as in
``hamiltonian``:

    c_plain[M]        f^{mu1...mur}           |M| = r
    c_q[(i, M0)]      f_i^{mu0...mur}         |M0| = r + 1
    c_p[(i, M)]       f^{i, mu1...mur}        |M| = r
    c_mixed[M0]       f'^{mu0...mur}          |M0| = r + 1
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .coeff import Poly
from .errors import (
    DegreeError,
    NotHamiltonian,
    NotKernelVanishing,
    NotLocallyHamiltonian,
    NotPoisson,
    WitnessMismatch,
)
from .exterior import Form, Multivector, contract, ext_d, wedge
from .hamiltonian import (
    anti_get,
    anti_get_q,
    assemble,
    is_locally_hamiltonian,
    nvector_from_function,
    vol_coefficient,
)
from .multiphase import horizontality, vanishes_on_kernel, volume_family, zero_section


def _combos(n, k):
    return list(combinations(range(1, n + 1), k)) if k >= 0 else []


def _put(fam, key, value):
    if value:
        fam[key] = value


def _single(form):
    """(key, sign) of a form that is plus or minus one basis element, or (None, 0)."""
    if not form.terms:
        return None, 0
    (key, c), = form.terms.items()
    return key, (1 if c.constant_term() > 0 else -1)


def _read(f, piece):
    key, sign = _single(piece)
    if key is None:
        return Poly.zero(f.cs)
    c = f.terms.get(key)
    if c is None:
        return Poly.zero(f.cs)
    return c if sign > 0 else -c


def _dq(cs, i):
    return Form.basis(cs, [cs.q(i)])


def _dp(cs, i, mu):
    return Form.basis(cs, [cs.p(i, mu)])


def _dw(cs):
    return Form.basis(cs, [cs.w])


# normal form ------------------------------------------------------------------------

@dataclass
class PoissonNormalForm:
    r: int
    c_plain: dict = field(default_factory=dict)
    c_q: dict = field(default_factory=dict)
    c_p: dict = field(default_factory=dict)
    c_mixed: dict = field(default_factory=dict)

    def assemble(self, cs):
        n, N = cs.n, cs.N
        out = Form(cs, n - self.r)
        for M, c in self.c_plain.items():
            out = out + volume_family(cs, M) * c
        for (i, M0), c in self.c_q.items():
            out = out + wedge(_dq(cs, i), volume_family(cs, M0)) * c
        for (i, M), c in self.c_p.items():
            for mu in range(1, n + 1):
                if mu not in M:
                    out = out + wedge(_dp(cs, i, mu), volume_family(cs, (mu,) + M)) * c
        for M0, c in self.c_mixed.items():
            block = wedge(_dw(cs), volume_family(cs, M0))
            for i in range(1, N + 1):
                for mu in range(1, n + 1):
                    if mu not in M0:
                        dqdp = Form.basis(cs, [cs.q(i), cs.p(i, mu)])
                        block = block - wedge(dqdp, volume_family(cs, M0 + (mu,)))
            out = out + block * c
        return out

    def to_record(self):
        def fam(d, with_i):
            if with_i:
                return [{"i": i, "mu": list(m), "coeff": str(c)} for (i, m), c in sorted(d.items())]
            return [{"mu": list(m), "coeff": str(c)} for m, c in sorted(d.items())]

        return {
            "r": self.r,
            "c_plain": fam(self.c_plain, False),
            "c_q": fam(self.c_q, True),
            "c_p": fam(self.c_p, True),
            "c_mixed": fam(self.c_mixed, False),
        }


def normal_form(ctx, f):
    cs = ctx.cs
    n, N = cs.n, cs.N
    r = n - f.degree
    if not -1 <= r <= n:
        raise DegreeError(f"normal form needs a form of degree 0..{n + 1}, got {f.degree}")
    if not vanishes_on_kernel(ctx, f):
        raise NotKernelVanishing("form does not vanish on the kernel of omega")
    nf = PoissonNormalForm(r)
    for M in _combos(n, r):
        _put(nf.c_plain, M, vol_coefficient(f, M))
        for i in range(1, N + 1):
            free = [mu for mu in range(1, n + 1) if mu not in M]
            if free:
                mu = free[0]
                piece = wedge(_dp(cs, i, mu), volume_family(cs, (mu,) + M))
                _put(nf.c_p, (i, M), _read(f, piece))
    for M0 in _combos(n, r + 1):
        for i in range(1, N + 1):
            _put(nf.c_q, (i, M0), _read(f, wedge(_dq(cs, i), volume_family(cs, M0))))
        _put(nf.c_mixed, M0, _read(f, wedge(_dw(cs), volume_family(cs, M0))))
    if nf.assemble(cs) != f:
        raise NotKernelVanishing("form does not match the kernel-vanishing normal form")
    return nf


def witness_from_form(ctx, f):
    """An (r+1)-multivector X with i_X omega = f, for kernel-vanishing f of degree n - r."""
    cs = ctx.cs
    n = cs.n
    r = n - f.degree
    if not 0 <= r <= n:
        raise DegreeError(f"witness construction needs a form of degree 0..{n}, got {f.degree}")
    nf = normal_form(ctx, f)
    sgn_r = -1 if r % 2 else 1
    coeff_x = {M0: c * sgn_r for M0, c in nf.c_mixed.items()}
    coeff_q = {key: c * sgn_r for key, c in nf.c_p.items()}
    coeff_p = {key: c * (-sgn_r) for key, c in nf.c_q.items()}
    coeff_w = {M: -c for M, c in nf.c_plain.items()}
    return assemble(cs, r + 1, coeff_x, coeff_q, coeff_p, coeff_w)


# momentum map and pull-backs ----------------------------------------------------------

def universal_momentum(ctx, F):
    """J(F) = (-1)^(r-1) i_F theta for locally Hamiltonian F."""
    if not is_locally_hamiltonian(ctx, F):
        raise NotLocallyHamiltonian("L_F omega does not vanish")
    j = contract(F, ctx.theta)
    return j if F.degree % 2 == 1 else -j


def _check_base_form(f0):
    cs = f0.cs
    xq = set(cs.x_indices + cs.q_indices)
    for key, c in f0.terms.items():
        if any(k not in xq for k in key) or not c.depends_only_on(xq):
            raise ValueError("expected a form in x and q only")


@dataclass
class PullbackAnalysis:
    hamiltonian: bool
    poisson: bool
    X0: Multivector | None = None
    local_split: tuple | None = None


def pullback_analysis(ctx, f0):
    cs = ctx.cs
    n, N = cs.n, cs.N
    r = n - f0.degree
    if not 0 < r < n:
        raise DegreeError(f"pull-back analysis needs 0 < r < {n}, got r = {r}")
    _check_base_form(f0)
    df0 = ext_d(f0)
    hamiltonian = horizontality(df0, "M") >= n - r
    poisson = hamiltonian and horizontality(f0, "M") >= n - r - 1
    if not hamiltonian:
        return PullbackAnalysis(False, False)
    zero = Poly.zero(cs)
    plain = {M: vol_coefficient(f0, M) for M in _combos(n, r)}
    with_q = {}
    for M0 in _combos(n, r + 1):
        for i in range(1, N + 1):
            _put(with_q, (i, M0), _read(f0, wedge(_dq(cs, i), volume_family(cs, M0))))
    sgn_r = -1 if r % 2 else 1
    coeff_p = {}
    for i in range(1, N + 1):
        for M in _combos(n, r):
            c = plain[M].partial(cs.q(i))
            for nu in range(1, n + 1):
                c = c - anti_get_q(with_q, i, M + (nu,), zero).partial(cs.x(nu))
            _put(coeff_p, (i, M), c * sgn_r)
    coeff_w = {}
    for Mp in _combos(n, r - 1):
        c = zero
        for nu in range(1, n + 1):
            c = c - anti_get(plain, Mp + (nu,), zero).partial(cs.x(nu))
        _put(coeff_w, Mp, c)
    X0 = assemble(cs, r, {}, {}, coeff_p, coeff_w)
    split = None
    if poisson:
        phi = Form(cs, n - r - 1)
        for M0 in _combos(n, r + 1):
            prim = zero
            for i in range(1, N + 1):
                c = with_q.get((i, M0))
                if c is None:
                    continue
                prim = prim + _q_primitive(cs, c, i)
            if prim:
                phi = phi + volume_family(cs, M0) * prim
        f_c = ext_d(phi)
        split = (f0 - f_c, f_c)
    return PullbackAnalysis(hamiltonian, poisson, X0, split)


def _q_primitive(cs, c, i):
    """Radial contribution q^i * int_0^1 c(x, t q) dt of the i-th component."""
    qs = cs.q_indices
    qi = cs.q(i)
    out = {}
    for e, v in c.terms.items():
        d = sum(e[k] for k in qs)
        e2 = list(e)
        e2[qi] += 1
        out[tuple(e2)] = v / (d + 1)
    return Poly(cs, out)


# canonical decomposition ----------------------------------------------------------------

@dataclass
class CanonicalDecomposition:
    f0: Form
    F: Multivector
    parts: dict
    fc: Form

    def total(self, ctx):
        out = self.f0 + self.fc
        for part in self.parts.values():
            out = out + part
        return out

    def to_record(self):
        from .render import to_record

        return {
            "f0": to_record(self.f0),
            "F": to_record(self.F),
            "parts": {str(s): to_record(p) for s, p in sorted(self.parts.items())},
            "fc": to_record(self.fc),
        }


def check_witness(ctx, f, X):
    if contract(X, ctx.omega) != ext_d(f):
        raise WitnessMismatch("i_X omega differs from df")


def canonical_decomposition(ctx, f, X):
    cs = ctx.cs
    n = cs.n
    r = X.degree
    if not 0 < r < n or f.degree != n - r:
        raise DegreeError(f"need 0 < r < {n} and a form of degree n - r; got r={r}, deg f={f.degree}")
    check_witness(ctx, f, X)
    comps = X.term_scaling_degrees()
    F = Multivector(cs, r)
    parts = {}
    for s in range(1, r + 1):
        Xs = comps.get(s - 1)
        if Xs is None:
            parts[s] = Form(cs, n - r)
            continue
        F = F + Xs * Fraction(1, s)
        piece = contract(Xs, ctx.theta) * Fraction(1, s)
        parts[s] = piece if r % 2 == 1 else -piece
    J = contract(F, ctx.theta)
    if r % 2 == 0:
        J = -J
    f0 = zero_section(f - J)
    fc = f - f0 - J
    return CanonicalDecomposition(f0, F, parts, fc)


def decompose_form(ctx, f):
    """Canonical decomposition with the witness supplied by field_from_form."""
    return canonical_decomposition(ctx, f, field_from_form(ctx, f))


# edge degrees ---------------------------------------------------------------------------

def nform_split(ctx, f):
    """Write a Hamiltonian n-form as c * theta + closed."""
    cs = ctx.cs
    if f.degree != cs.n:
        raise DegreeError(f"expected an {cs.n}-form")
    df = ext_d(f)
    key, ref = next(iter(ctx.omega.terms.items()))
    g = df.terms.get(key, Poly.zero(cs)) * (1 / ref.constant_term())
    if not g.is_constant() or df != ctx.omega * g:
        raise NotHamiltonian("df is not a constant multiple of omega")
    c = -g.constant_term()
    closed = f - ctx.theta * c
    return c, closed


def is_hamiltonian_form(ctx, f):
    return vanishes_on_kernel(ctx, ext_d(f))


def is_poisson_form(ctx, f):
    return vanishes_on_kernel(ctx, f) and vanishes_on_kernel(ctx, ext_d(f))


def field_from_form(ctx, f):
    """Hamiltonian r-multivector of a Poisson form of degree n - r, 0 < r < n."""
    cs = ctx.cs
    n, N = cs.n, cs.N
    r = n - f.degree
    if not 0 < r < n:
        raise DegreeError(f"field_from_form needs 0 < r < {n}, got r = {r}")
    if not is_poisson_form(ctx, f):
        raise NotPoisson("form is not Poisson")
    nf = normal_form(ctx, f)
    zero = Poly.zero(cs)
    w = cs.w
    sgn_r = -1 if r % 2 else 1

    def plain(idx):
        return anti_get(nf.c_plain, idx, zero)

    def mixed(idx):
        return anti_get(nf.c_mixed, idx, zero)

    coeff_x = {}
    coeff_p = {}
    for M in _combos(n, r):
        c = plain(M).partial(w)
        for nu in range(1, n + 1):
            c = c - mixed(M + (nu,)).partial(cs.x(nu))
        _put(coeff_x, M, c * (-sgn_r))
        for i in range(1, N + 1):
            c = plain(M).partial(cs.q(i))
            for nu in range(1, n + 1):
                c = c - anti_get_q(nf.c_q, i, M + (nu,), zero).partial(cs.x(nu))
            _put(coeff_p, (i, M), c * sgn_r)
    coeff_q = {}
    coeff_w = {}
    scale = Fraction(1, n - r + 1)
    # x-derivatives of the dp-family also feed the dp ^ d^n x_{M' mu} slots; they
    # drop out for f = f0 + J(F) but not for a general closed summand
    d_mom = ext_d(PoissonNormalForm(r, c_p=nf.c_p).assemble(cs))
    for Mp in _combos(n, r - 1):
        for i in range(1, N + 1):
            c = zero
            for mu in range(1, n + 1):
                if mu in Mp:
                    continue
                c = c + plain(Mp + (mu,)).partial(cs.p(i, mu))
                c = c + _read(d_mom, wedge(_dp(cs, i, mu), volume_family(cs, Mp + (mu,))))
            _put(coeff_q, (i, Mp), c * scale)
        c = zero
        for nu in range(1, n + 1):
            c = c - plain(Mp + (nu,)).partial(cs.x(nu))
        _put(coeff_w, Mp, c)
    return assemble(cs, r, coeff_x, coeff_q, coeff_p, coeff_w)


def hamiltonian_witness(ctx, f):
    """Some multivector X with i_X omega = df, chosen by the degree of f."""
    cs = ctx.cs
    n = cs.n
    if f.degree == 0:
        return nvector_from_function(ctx, f.scalar_part())
    if f.degree == n:
        c, _ = nform_split(ctx, f)
        return Multivector.scalar(Poly.const(cs, -c))
    if 0 < f.degree < n:
        return field_from_form(ctx, f)
    raise DegreeError(f"no Hamiltonian witness for forms of degree {f.degree}")


# bracket ----------------------------------------------------------------------------------

def poisson_bracket(ctx, f, Xf, g, Xg):
    cs = ctx.cs
    check_witness(ctx, f, Xf)
    check_witness(ctx, g, Xg)
    r, s = Xf.degree, Xg.degree

    def sgn(k):
        return -1 if k % 2 else 1

    term = contract(Xg, contract(Xf, ctx.omega)) * sgn(r * (s - 1))
    inner = (
        contract(Xg, f) * sgn((r - 1) * (s - 1))
        - contract(Xf, g)
        - contract(Xg, contract(Xf, ctx.theta)) * sgn((r - 1) * s)
    )
    out = term + ext_d(inner)
    return Form(cs, cs.n + 1 - r - s, dict(out.terms))


__all__ = [
    "PoissonNormalForm",
    "normal_form",
    "witness_from_form",
    "universal_momentum",
    "PullbackAnalysis",
    "pullback_analysis",
    "CanonicalDecomposition",
    "canonical_decomposition",
    "decompose_form",
    "check_witness",
    "nform_split",
    "is_hamiltonian_form",
    "is_poisson_form",
    "field_from_form",
    "hamiltonian_witness",
    "poisson_bracket",
]
