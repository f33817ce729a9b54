from fractions import Fraction
from itertools import combinations

import pytest

from conftest import sign
from mpcalc import randgen as R
from mpcalc.coeff import Poly
from mpcalc.errors import DegreeError, NonProjectable, NotLocallyHamiltonian
from mpcalc.exterior import Form, Multivector, contract, ext_d, lie_form, schouten, wedge
from mpcalc.hamiltonian import (
    LHFreeData,
    assemble,
    canonical_lift,
    classify,
    exactness_conditions,
    extract_lh_data,
    generate_lh,
    nvector_from_function,
    omega_contraction_formula,
    projectability,
    split_vector_lh,
    standard_decomposition,
    theta_contraction_formula,
)
from mpcalc.multiphase import canonical_structures, in_kernel, kernel_generators, lie_sigma, scaling_decompose


def D(cs, *ks):
    return Multivector.basis(cs, list(ks))


def var(cs, k):
    return Poly.var(cs, k)


# standard decomposition --------------------------------------------------------------------

def test_std_examples(ctx21):
    cs = ctx21.cs
    std = standard_decomposition(ctx21, D(cs, cs.x(1), cs.x(2)))
    assert std.coeff_x == {(1, 2): Poly.const(cs, 1)}
    assert not (std.coeff_q or std.coeff_p or std.coeff_w)
    assert not std.xi
    K = D(cs, cs.q(1), cs.w)
    std = standard_decomposition(ctx21, K)
    assert not (std.coeff_x or std.coeff_q or std.coeff_p or std.coeff_w)
    assert std.xi == K


def test_std_roundtrip_and_contraction_formulas(ctx, rng):
    cs = ctx.cs
    for _ in range(15):
        X = R.multivector(cs, rng, rng.randint(1, ctx.n + 1), terms=4, max_deg=2)
        std = standard_decomposition(ctx, X)
        assert std.recombine(cs) == X
        assert in_kernel(ctx, std.xi)
        assert omega_contraction_formula(ctx, std) == contract(X, ctx.omega)
        assert theta_contraction_formula(ctx, std) == contract(X, ctx.theta)


def test_std_degree_range(ctx21):
    with pytest.raises(DegreeError):
        standard_decomposition(ctx21, Multivector.scalar(Poly.const(ctx21.cs, 1)))


# classification ---------------------------------------------------------------------------------

def test_classify_examples(ctx21):
    cs = ctx21.cs
    assert classify(ctx21, ctx21.sigma).kind == "not-hamiltonian"
    lift = canonical_lift(ctx21, D(cs, cs.x(1)))
    res = classify(ctx21, lift)
    assert res.kind == "exact"
    assert ext_d(res.potential) == contract(lift, ctx21.omega)
    data = LHFreeData(1, minus={(1,): var(cs, cs.q(1))})
    Xm = generate_lh(ctx21, data)
    res = classify(ctx21, Xm)
    assert res.kind == "locally"
    assert ext_d(res.potential) == contract(Xm, ctx21.omega)
    assert classify(ctx21, Multivector.scalar(Poly.const(cs, 3))).kind == "exact"
    assert classify(ctx21, Multivector.scalar(var(cs, cs.x(1)))).kind == "not-hamiltonian"


def test_top_degree_fields(ctx21):
    cs = ctx21.cs
    top = [cs.w] + [cs.x(mu) for mu in (1, 2)]
    assert classify(ctx21, D(cs, *top) * 2).kind == "locally"
    assert classify(ctx21, D(cs, *top) * var(cs, cs.x(1))).kind == "not-hamiltonian"
    assert classify(ctx21, Multivector(cs, 3)).kind == "exact"


# generation from free data ------------------------------------------------------------------------

def test_generate_examples(ctx21):
    cs = ctx21.cs
    assert not generate_lh(ctx21, LHFreeData(1))
    assert generate_lh(ctx21, LHFreeData(1, base_x={(1,): Poly.const(cs, 1)})) == D(cs, cs.x(1))


def test_minus_only_field(ctx22, rng):
    cs = ctx22.cs
    xq = cs.x_indices + cs.q_indices
    minus = {(mu,): R.poly(cs, rng, 2, 3, xq) for mu in (1, 2)}
    X = generate_lh(ctx22, LHFreeData(1, minus=minus))
    expected = Multivector(cs, 1)
    for i in (1, 2):
        for mu in (1, 2):
            expected = expected + D(cs, cs.p(i, mu)) * minus[(mu,)].partial(cs.q(i))
    div = minus[(1,)].partial(cs.x(1)) + minus[(2,)].partial(cs.x(2))
    expected = expected + D(cs, cs.w) * div
    assert X == expected


def _bivector_oracle(ctx, Xmn, Y1, Y0, Xm):
    """Locally Hamiltonian bivector assembled term by term from the explicit formulas."""
    cs = ctx.cs
    n, N = cs.n, cs.N
    zero = Poly.zero(cs)
    w = var(cs, cs.w)

    def p(i, mu):
        return var(cs, cs.p(i, mu))

    def A(fam, a, b):
        if a == b:
            return zero
        return fam.get((a, b), zero) if a < b else -fam.get((b, a), zero)

    def Yq(i, j):
        return A(Y1, i, j)

    cq, cp, cw = {}, {}, {}
    for i in range(1, N + 1):
        for mu in range(1, n + 1):
            c = Y0.get((i, mu), zero)
            for j in range(1, N + 1):
                c = c + p(j, mu) * Yq(i, j)
            cq[(i, (mu,))] = c
    for i in range(1, N + 1):
        qi = cs.q(i)
        for mu, nu in combinations(range(1, n + 1), 2):
            c = zero
            if N == 1:
                c = c - w * A(Xmn, mu, nu).partial(qi)
            for k in range(1, n + 1):
                c = c + p(i, k) * A(Xmn, mu, nu).partial(cs.x(k))
                c = c - p(i, mu) * A(Xmn, k, nu).partial(cs.x(k))
                c = c - p(i, nu) * A(Xmn, mu, k).partial(cs.x(k))
            for j in range(1, N + 1):
                for k in range(1, N + 1):
                    c = c - p(j, mu) * p(k, nu) * Yq(j, k).partial(qi) * Fraction(1, 2)
                    c = c + p(j, nu) * p(k, mu) * Yq(j, k).partial(qi) * Fraction(1, 2)
                c = c - p(j, mu) * Y0.get((j, nu), zero).partial(qi)
                c = c + p(j, nu) * Y0.get((j, mu), zero).partial(qi)
            c = c + A(Xm, mu, nu).partial(qi)
            cp[(i, (mu, nu))] = c
    for mu in range(1, n + 1):
        c = zero
        for nu in range(1, n + 1):
            xn = cs.x(nu)
            c = c + w * A(Xmn, mu, nu).partial(xn)
            for i in range(1, N + 1):
                for j in range(1, N + 1):
                    c = c - p(i, nu) * p(j, mu) * Yq(i, j).partial(xn) * Fraction(1, 2)
                    c = c + p(i, mu) * p(j, nu) * Yq(i, j).partial(xn) * Fraction(1, 2)
                c = c - p(i, nu) * Y0.get((i, mu), zero).partial(xn)
                c = c + p(i, mu) * Y0.get((i, nu), zero).partial(xn)
            c = c - A(Xm, mu, nu).partial(xn)
        cw[(mu,)] = c
    cx = {k: v for k, v in Xmn.items()}
    return assemble(cs, 2, cx, cq, cp, cw)


@pytest.mark.parametrize("N", [1, 2])
def test_bivector_fixture(N, rng):
    ctx = canonical_structures(3, N)
    cs = ctx.cs
    xq = cs.x_indices + cs.q_indices
    base_vars = xq if N == 1 else cs.x_indices
    for _ in range(5):
        Xmn = {M: R.poly(cs, rng, 2, 2, base_vars) for M in combinations(range(1, 4), 2)}
        Xm = {M: R.poly(cs, rng, 2, 2, xq) for M in combinations(range(1, 4), 2)}
        Y0 = {(i, mu): R.poly(cs, rng, 2, 2, xq) for i in range(1, N + 1) for mu in range(1, 4)}
        Y1 = {(1, 2): R.poly(cs, rng, 2, 2, xq)} if N == 2 else {}
        data = LHFreeData(2, base_x=dict(Xmn), minus=dict(Xm))
        data.y_fams[1] = {((i,), (mu,)): c for (i, mu), c in Y0.items()}
        if Y1:
            data.y_fams[2] = {((1, 2), ()): Y1[(1, 2)]}
        X = generate_lh(ctx, data)
        assert X == _bivector_oracle(ctx, Xmn, Y1, Y0, Xm)
        assert not lie_form(X, ctx.omega)


def test_roundtrip_and_exactness(ctx, rng):
    for _ in range(15):
        r = rng.randint(1, ctx.n - 1)
        data = R.lh_data(ctx, rng, r, minus=rng.random() < 0.5)
        X = generate_lh(ctx, data)
        cls = classify(ctx, X)
        assert cls.kind in ("locally", "exact")
        assert in_kernel(ctx, generate_lh(ctx, extract_lh_data(ctx, X)) - X)
        assert (cls.kind == "exact") == exactness_conditions(ctx.cs, data)


def test_extract_examples(ctx21, ctx22):
    cs = ctx21.cs
    d = extract_lh_data(ctx21, D(cs, cs.x(1)))
    assert d.base_x == {(1,): Poly.const(cs, 1)}
    assert not any(d.y_fams.values()) and not d.minus
    cs2 = ctx22.cs
    lift = canonical_lift(ctx22, D(cs2, cs2.q(1)) * var(cs2, cs2.q(1)))
    d = extract_lh_data(ctx22, lift)
    assert d.y_fams[1] == {((1,), ()): var(cs2, cs2.q(1))}
    assert not d.minus
    with pytest.raises(NotLocallyHamiltonian):
        extract_lh_data(ctx21, ctx21.sigma)


# degree n ------------------------------------------------------------------------------------------

def test_nvector_examples(ctx, rng):
    cs = ctx.cs
    assert not nvector_from_function(ctx, Poly.const(cs, 5))
    for _ in range(10):
        f = R.poly(cs, rng, 3, 3)
        X = nvector_from_function(ctx, f)
        assert contract(X, ctx.omega) == ext_d(Form.scalar(f))
        assert contract(X, ctx.theta) == Form.scalar(f.euler()) * sign(ctx.n - 1)


def test_nvector_of_energy(ctx21):
    cs = ctx21.cs
    X = nvector_from_function(ctx21, var(cs, cs.w))
    assert X == -D(cs, cs.x(1), cs.x(2))
    assert contract(X, ctx21.omega) == Form.basis(cs, [cs.w])
    lin = var(cs, cs.w) * var(cs, cs.x(1)) + var(cs, cs.p(1, 2)) * var(cs, cs.q(1))
    assert classify(ctx21, nvector_from_function(ctx21, lin)).kind == "exact"


# canonical lift ------------------------------------------------------------------------------------

def _lift_oracle(ctx, Xx, Xq):
    cs = ctx.cs
    n, N = cs.n, cs.N
    w = var(cs, cs.w)
    zero = Poly.zero(cs)

    def p(i, mu):
        return var(cs, cs.p(i, mu))

    out = Multivector(cs, 1)
    for mu in range(1, n + 1):
        out = out + D(cs, cs.x(mu)) * Xx[mu]
    for i in range(1, N + 1):
        out = out + D(cs, cs.q(i)) * Xq[i]
    div = sum((Xx[nu].partial(cs.x(nu)) for nu in range(1, n + 1)), zero)
    for i in range(1, N + 1):
        for mu in range(1, n + 1):
            c = zero
            for j in range(1, N + 1):
                c = c + Xq[j].partial(cs.q(i)) * p(j, mu)
            for nu in range(1, n + 1):
                c = c - Xx[mu].partial(cs.x(nu)) * p(i, nu)
            c = c + div * p(i, mu) + Xx[mu].partial(cs.q(i)) * w
            out = out - D(cs, cs.p(i, mu)) * c
    c = div * w
    for i in range(1, N + 1):
        for mu in range(1, n + 1):
            c = c + Xq[i].partial(cs.x(mu)) * p(i, mu)
    return out - D(cs, cs.w) * c


def test_lift_examples(ctx21, ctx22):
    cs = ctx21.cs
    assert canonical_lift(ctx21, D(cs, cs.x(1))) == D(cs, cs.x(1))
    q1 = var(cs, cs.q(1))
    expected = D(cs, cs.q(1)) * q1 - D(cs, cs.p(1, 1)) * var(cs, cs.p(1, 1)) - D(cs, cs.p(1, 2)) * var(cs, cs.p(1, 2))
    assert canonical_lift(ctx21, D(cs, cs.q(1)) * q1) == expected
    x2 = var(cs, cs.x(2))
    assert canonical_lift(ctx21, D(cs, cs.x(1)) * x2) == D(cs, cs.x(1)) * x2 + D(cs, cs.p(1, 1)) * var(cs, cs.p(1, 2))
    cs2 = ctx22.cs
    with pytest.raises(NonProjectable):
        canonical_lift(ctx22, D(cs2, cs2.x(1)) * var(cs2, cs2.q(1)))


def test_lift_matches_formula(ctx, rng):
    cs = ctx.cs
    xq = cs.x_indices + cs.q_indices
    xvars = xq if cs.N == 1 else cs.x_indices
    for _ in range(10):
        Xx = {mu: R.poly(cs, rng, 2, 2, xvars) for mu in range(1, ctx.n + 1)}
        Xq = {i: R.poly(cs, rng, 2, 2, xq) for i in range(1, ctx.N + 1)}
        XE = Multivector(cs, 1)
        for mu, c in Xx.items():
            XE = XE + D(cs, cs.x(mu)) * c
        for i, c in Xq.items():
            XE = XE + D(cs, cs.q(i)) * c
        lift = canonical_lift(ctx, XE)
        assert lift == _lift_oracle(ctx, Xx, Xq)
        assert classify(ctx, lift).kind == "exact"
        assert set(scaling_decompose(lift)) <= {0}


# vector fields -------------------------------------------------------------------------------------

def test_split_vector(ctx22, rng):
    cs = ctx22.cs
    plus = canonical_lift(ctx22, D(cs, cs.x(1)) * var(cs, cs.x(2)))
    assert split_vector_lh(ctx22, plus) == (Multivector(cs, 1), plus)
    xq = cs.x_indices + cs.q_indices
    minus = generate_lh(ctx22, LHFreeData(1, minus={(1,): R.poly(cs, rng, 2, 2, xq), (2,): R.poly(cs, rng, 2, 2, xq)}))
    m, p_ = split_vector_lh(ctx22, minus + plus)
    assert m == minus and p_ == plus
    assert lie_sigma(ctx22, m) == -m
    assert not lie_sigma(ctx22, p_)
    with pytest.raises(NotLocallyHamiltonian):
        split_vector_lh(ctx22, ctx22.sigma)


def test_projectability(ctx21, ctx22, rng):
    cs = ctx21.cs
    assert projectability(ctx21, D(cs, cs.x(1))) == projectability(ctx21, D(cs, cs.x(1))).__class__(True, True, True)
    data = LHFreeData(1, base_x={(1,): var(cs, cs.q(1)), (2,): Poly.const(cs, 1)})
    X = generate_lh(ctx21, data)
    pr = projectability(ctx21, X)
    assert pr.E and not pr.M
    for _ in range(10):
        X = generate_lh(ctx21, R.lh_data(ctx21, rng, 1))
        pr = projectability(ctx21, X)
        assert pr.M == pr.P0
    for _ in range(10):
        pr = projectability(ctx22, generate_lh(ctx22, R.lh_data(ctx22, rng, 1)))
        assert pr.M and pr.E and pr.P0


# invariants ----------------------------------------------------------------------------------------

def test_sigma_stability_and_ltio(ctx, rng):
    for _ in range(10):
        r = rng.randint(1, ctx.n - 1)
        X = generate_lh(ctx, R.lh_data(ctx, rng, r))
        SX = lie_sigma(ctx, X)
        assert not lie_form(SX, ctx.omega)
        assert lie_form(X, ctx.theta) == contract(SX, ctx.omega) * sign(r - 1)
        f = classify(ctx, X).potential
        assert contract(SX, ctx.omega) == ext_d(lie_sigma(ctx, f) - f)
        E = scaling_decompose(X).get(0)
        if E is not None:
            assert not lie_form(E, ctx.theta)
            assert not lie_form(lie_sigma(ctx, E), ctx.theta)


def test_theorem_ranges_with_kernel_noise(ctx, rng):
    cs = ctx.cs
    for _ in range(10):
        r = rng.randint(1, ctx.n - 1)
        X = generate_lh(ctx, R.lh_data(ctx, rng, r))
        for g in kernel_generators(ctx, r)[:3]:
            X = X + g * R.poly(cs, rng, 3, 2)
        for s, part in scaling_decompose(X).items():
            if not -1 <= s <= r - 1:
                assert in_kernel(ctx, part)
