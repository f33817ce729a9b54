"""Randomized invariant suites shared by ``mpcalc verify`` and the acceptance tests.

Each suite is a function ``trial(ctx, rng)`` returning a list of
``(check_name, passed)`` pairs.  A trial passes when every check does;
exceptions raised inside a trial count as a failure of that trial.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

from . import randgen as R
from .exterior import Form, Multivector, contract, ext_d, lie_form, schouten, wedge
from .hamiltonian import (
    classify,
    exactness_conditions,
    extract_lh_data,
    generate_lh,
    nvector_from_function,
)
from .multiphase import (
    _check_structures,
    canonical_structures,
    in_kernel,
    horizontality,
    kernel_generators,
    lie_sigma,
    scaling_decompose,
    vanishes_on_kernel,
    zero_section,
)
from .poisson import (
    canonical_decomposition,
    field_from_form,
    poisson_bracket,
    pullback_analysis,
    universal_momentum,
)

CONFIGS = ((2, 1), (2, 2), (3, 2))


def _sign(k):
    return -1 if k % 2 else 1


# structure ---------------------------------------------------------------------------

def structure_trial(ctx, rng):
    fresh = canonical_structures.__wrapped__(ctx.n, ctx.N)
    th, om, sg = fresh.theta, fresh.omega, fresh.sigma
    checks = [
        ("d theta = -omega", ext_d(th) == -om),
        ("L_Sigma theta = theta", lie_form(sg, th) == th),
        ("L_Sigma omega = omega", lie_form(sg, om) == om),
        ("i_Sigma theta = 0", not contract(sg, th)),
        ("i_Sigma omega = -theta", contract(sg, om) == -th),
    ]
    checks.append(("d omega = 0", not ext_d(om)))
    try:
        _check_structures(fresh)
        checks.append(("self check", True))
    except Exception:
        checks.append(("self check", False))
    return checks


# Lie identities ------------------------------------------------------------------------

def lie_identities_trial(ctx, rng):
    cs = ctx.cs
    top = cs.size
    r, s = rng.randint(0, min(3, top)), rng.randint(0, min(3, top))
    k = rng.randint(0, top)
    X = R.multivector(cs, rng, r, max_deg=3)
    Y = R.multivector(cs, rng, s, max_deg=3)
    a = R.form(cs, rng, k, max_deg=3)
    Z = R.multivector(cs, rng, rng.randint(0, 2), max_deg=2)
    t = Z.degree
    jacobi = (
        schouten(X, schouten(Y, Z)) * _sign((r - 1) * (t - 1))
        + schouten(Y, schouten(Z, X)) * _sign((s - 1) * (r - 1))
        + schouten(Z, schouten(X, Y)) * _sign((t - 1) * (s - 1))
    )
    derivation = schouten(Z, schouten(X, Y)) == schouten(schouten(Z, X), Y) + schouten(X, schouten(Z, Y)) * _sign(
        (t - 1) * (r - 1)
    )
    Xs, Ys, As = scaling_decompose(X), scaling_decompose(Y), scaling_decompose(a)
    additive = True
    if Xs and Ys and As:
        kx, ky, ka = rng.choice(sorted(Xs)), rng.choice(sorted(Ys)), rng.choice(sorted(As))
        Xk, Yl, Am = Xs[kx], Ys[ky], As[ka]
        additive = (
            is_degree(ctx, schouten(Xk, Yl), kx + ky)
            and is_degree(ctx, contract(Xk, Am), kx + ka)
            and is_degree(ctx, wedge(Xk, Yl), kx + ky)
            and is_degree(ctx, lie_form(Xk, Am), kx + ka)
        )
    return [
        ("d L_X = (-1)^(r-1) L_X d", ext_d(lie_form(X, a)) == lie_form(X, ext_d(a)) * _sign(r - 1)),
        (
            "i_[X,Y] = (-1)^((r-1)s) L_X i_Y - i_Y L_X",
            contract(schouten(X, Y), a)
            == lie_form(X, contract(Y, a)) * _sign((r - 1) * s) - contract(Y, lie_form(X, a)),
        ),
        (
            "L_[X,Y] = (-1)^((r-1)(s-1)) L_X L_Y - L_Y L_X",
            lie_form(schouten(X, Y), a)
            == lie_form(X, lie_form(Y, a)) * _sign((r - 1) * (s - 1)) - lie_form(Y, lie_form(X, a)),
        ),
        (
            "L_(X^Y) = (-1)^s i_Y L_X + L_Y i_X",
            lie_form(wedge(X, Y), a) == contract(Y, lie_form(X, a)) * _sign(s) + lie_form(Y, contract(X, a)),
        ),
        ("graded antisymmetry", schouten(X, Y) == -schouten(Y, X) * _sign((r - 1) * (s - 1))),
        ("graded Jacobi", not jacobi),
        ("Jacobi as a derivation", derivation),
        ("scaling degrees add", additive),
    ]


# kernel ----------------------------------------------------------------------------------

def _rank(rows):
    """Rank of a list of sparse rows (dict column -> Fraction) by Gaussian elimination."""
    pivots = {}
    rank = 0
    for row in rows:
        row = {c: Fraction(v) for c, v in row.items() if v}
        while row:
            col = min(row)
            if col not in pivots:
                pivots[col] = row
                rank += 1
                break
            prow = pivots[col]
            factor = row[col] / prow[col]
            for c, v in prow.items():
                nv = row.get(c, 0) - factor * v
                if nv:
                    row[c] = nv
                else:
                    row.pop(c, None)
    return rank


def _const_vector(obj):
    out = {}
    for key, c in obj.terms.items():
        if not c.is_constant():
            raise ValueError("expected constant coefficients")
        out[key] = c.constant_term()
    return out


def kernel_rank_report(ctx, r):
    return _kernel_rank_report(ctx.cs, r)


@lru_cache(maxsize=None)
def _kernel_rank_report(cs, r):
    """(nullity of X -> i_X omega on degree-r monomials, rank of the generator span, all generators in kernel)."""
    ctx = canonical_structures(cs.n, cs.N)
    images = [
        _const_vector(contract(Multivector.basis(cs, key), ctx.omega))
        for key in combinations(range(cs.size), r)
    ]
    monomials = len(images)
    nullity = monomials - _rank(images)
    gens = kernel_generators(ctx, r)
    contained = all(in_kernel(ctx, g) for g in gens)
    return nullity, _rank([_const_vector(g) for g in gens]), contained


def kernel_trial(ctx, rng):
    cs = ctx.cs
    r = rng.randint(2, cs.n + 1)
    gens = kernel_generators(ctx, r)
    K = Multivector(cs, r)
    for g in rng.sample(gens, min(4, len(gens))):
        K = K + g * R.poly(cs, rng, 3, 2)
    checks = [
        ("i_K omega = 0", not contract(K, ctx.omega)),
        ("i_K theta = 0", not contract(K, ctx.theta)),
        ("[Sigma, K] in kernel", in_kernel(ctx, lie_sigma(ctx, K))),
    ]
    nullity, span, contained = kernel_rank_report(ctx, r)
    checks.append(("generators span the nullspace", nullity == span and contained))
    f = R.form(cs, rng, rng.randint(0, cs.n), max_deg=2)
    if vanishes_on_kernel(ctx, f):
        checks.append(("L_Sigma keeps kernel vanishing", vanishes_on_kernel(ctx, lie_sigma(ctx, f))))
    return checks


# locally Hamiltonian round trip ------------------------------------------------------------

def _random_lh_data(ctx, rng, r):
    data = R.lh_data(ctx, rng, r, minus=rng.random() < 0.5)
    # sometimes drop the p-dependent families so that both sides of the exactness test occur
    if rng.random() < 0.5:
        for s in list(data.y_fams):
            if s >= 2:
                del data.y_fams[s]
    return data


def lh_roundtrip_trial(ctx, rng):
    r = rng.randint(1, ctx.n - 1)
    data = _random_lh_data(ctx, rng, r)
    X = generate_lh(ctx, data)
    cls = classify(ctx, X)
    X2 = generate_lh(ctx, extract_lh_data(ctx, X))
    return [
        ("classified Hamiltonian", cls.kind in ("locally", "exact")),
        ("extract-regenerate up to kernel", in_kernel(ctx, X2 - X)),
        ("exact iff data conditions", (cls.kind == "exact") == exactness_conditions(ctx.cs, data)),
    ]


# scaling -----------------------------------------------------------------------------------

def scaling_trial(ctx, rng):
    cs = ctx.cs
    checks = []
    obj = R.form(cs, rng, rng.randint(0, cs.size), max_deg=3) if rng.random() < 0.5 else R.multivector(
        cs, rng, rng.randint(0, 3), max_deg=3
    )
    try:
        parts = scaling_decompose(obj, ctx, check=True)
        checks.append(("projector agrees with bucketing", True))
    except Exception:
        parts = scaling_decompose(obj)
        checks.append(("projector agrees with bucketing", False))
    total = type(obj)(cs, obj.degree)
    for s, part in parts.items():
        total = total + part
        checks.append(("component homogeneous", lie_sigma(ctx, part) == part * s))
    checks.append(("components sum", total == obj))

    # LH components outside [-1, r-1] lie in the kernel
    r = rng.randint(1, ctx.n - 1)
    gens = kernel_generators(ctx, r)
    X = generate_lh(ctx, R.lh_data(ctx, rng, r))
    for g in gens[:2]:
        X = X + g * R.poly(cs, rng, 3, 1)
    for s, part in scaling_decompose(X).items():
        if not -1 <= s <= r - 1:
            checks.append(("LH component outside range is kernel-valued", in_kernel(ctx, part)))
    sample = R.poisson_form(ctx, rng, r)
    for s, part in scaling_decompose(sample.f).items():
        if not 0 <= s <= r:
            checks.append(("form component outside range is closed", not ext_d(part)))

    # exactness and the scaling components of locally Hamiltonian fields
    cls = classify(ctx, X)
    checks.append(("exact iff [Sigma,X] in kernel", (cls.kind == "exact") == in_kernel(ctx, lie_sigma(ctx, X))))
    for s, part in scaling_decompose(X).items():
        if 0 <= s <= r - 1:
            pot = contract(part, ctx.theta) * Fraction(_sign(r - 1), s + 1)
            checks.append(("homogeneous potential", ext_d(pot) == contract(part, ctx.omega)))
        elif s == -1:
            checks.append(("degree -1 part annihilates theta", not contract(part, ctx.theta)))
    return checks


# J map -----------------------------------------------------------------------------------------

def jmap_trial(ctx, rng):
    checks = []
    for r in range(1, ctx.n):
        F = generate_lh(ctx, R.lh_data(ctx, rng, r))
        J = universal_momentum(ctx, F)
        checks.append(("dJ(F) = i_(F+[Sigma,F]) omega", ext_d(J) == contract(F + lie_sigma(ctx, F), ctx.omega)))
        checks.append(("J(F) vanishes on kernel", vanishes_on_kernel(ctx, J)))
    return checks


# canonical decomposition -------------------------------------------------------------------------

def canonical_trial(ctx, rng):
    n = ctx.n
    r = rng.randint(1, n - 1)
    sample = R.poisson_form(ctx, rng, r)
    cd = canonical_decomposition(ctx, sample.f, sample.X)
    cs = ctx.cs
    xq = set(cs.x_indices + cs.q_indices)
    over_base = all(set(k) <= xq and c.depends_only_on(xq) for k, c in cd.f0.terms.items())
    parts_ok = True
    comps = scaling_decompose(sample.X)
    for s, part in cd.parts.items():
        Xs = comps.get(s - 1, Multivector(cs, r))
        parts_ok &= part == contract(Xs, ctx.theta) * Fraction(_sign(r - 1), s)
    return [
        ("reconstructs f", cd.total(ctx) == sample.f),
        ("fc closed", not ext_d(cd.fc)),
        ("fc vanishes on zero section", not zero_section(cd.fc)),
        ("fc vanishes on kernel", vanishes_on_kernel(ctx, cd.fc)),
        ("f0 over base", over_base),
        ("f0 horizontal enough", horizontality(cd.f0, "M") >= n - r - 1),
        ("parts formula", parts_ok),
        ("f0 recovered", cd.f0 == sample.f0),
        ("F recovered up to kernel", in_kernel(ctx, cd.F - sample.F)),
        ("fc recovered", cd.fc == sample.fc),
        ("F has no degree -1 part", -1 not in scaling_decompose(cd.F)),
    ]


# field from form ------------------------------------------------------------------------------------

def field_from_form_trial(ctx, rng):
    cs = ctx.cs
    r = rng.randint(1, ctx.n - 1)
    sample = R.poisson_form(ctx, rng, r)
    Xf = field_from_form(ctx, sample.f)
    checks = [
        ("i_X omega = df", contract(Xf, ctx.omega) == ext_d(sample.f)),
        ("agrees with supplied witness up to kernel", in_kernel(ctx, Xf - sample.X)),
    ]
    if r == 1:
        mu = rng.randint(1, ctx.n)
        d_mu = Multivector.basis(cs, [cs.x(mu)])
        got = field_from_form(ctx, universal_momentum(ctx, d_mu))
        checks.append(("J(d_mu) recovers d_mu", in_kernel(ctx, got - d_mu)))
    return checks


# bracket -----------------------------------------------------------------------------------------------

def _homogeneous_pairs(ctx, rng):
    n = ctx.n
    r = rng.randint(1, n - 1)
    s = rng.randint(1, min(n - 1, n + 1 - r))
    X = generate_lh(ctx, R.lh_data(ctx, rng, r))
    Y = generate_lh(ctx, R.lh_data(ctx, rng, s))
    return r, s, X, Y


def bracket_trial(ctx, rng):
    cs = ctx.cs
    n = ctx.n
    th, om = ctx.theta, ctx.omega
    checks = []
    r, s, X, Y = _homogeneous_pairs(ctx, rng)
    Xc, Yc = scaling_decompose(X), scaling_decompose(Y)

    for k in range(1, r + 1):
        for l in range(1, s + 1):
            Xk = Xc.get(k - 1, Multivector(cs, r))
            Yl = Yc.get(l - 1, Multivector(cs, s))
            fk = contract(Xk, th) * Fraction(_sign(r - 1), k)
            gl = contract(Yl, th) * Fraction(_sign(s - 1), l)
            br = poisson_bracket(ctx, fk, Xk, gl, Yl)
            rhs = contract(schouten(Yl, Xk), th) * Fraction(_sign(r + s), k + l - 1) - ext_d(
                contract(Xk, contract(Yl, th))
            ) * (_sign((r - 1) * s) * Fraction((k - 1) * (l - 1) * (k + l), k * l * (k + l - 1)))
            checks.append(("explicit bracket of homogeneous forms", br == rhs))
            checks.append(("bracket scaling degree k+l-1", lie_sigma(ctx, br) == br * (k + l - 1)))
            checks.append(("bracket vanishes on kernel", vanishes_on_kernel(ctx, br)))
            XY = schouten(Xk, Yl)
            checks.append(("Schouten scaling additivity", lie_sigma(ctx, XY) == XY * (k + l - 2)))
            checks.append(("homogeneous potential", ext_d(lie_sigma(ctx, fk)) == ext_d(fk) * k))
            if k == 1 and l == 1:
                checks.append(("degree-1 closure", is_degree(ctx, br, 1) and vanishes_on_kernel(ctx, br)))

    Xm, Ym = Xc.get(-1), Yc.get(-1)
    if Xm is not None and Ym is not None:
        checks.append(("degree -1 fields bracket into kernel", in_kernel(ctx, schouten(Xm, Ym))))

    f0 = R.horizontal_form(ctx, rng, n - r) + ext_d(R.horizontal_form(ctx, rng, n - r - 1))
    g0 = R.horizontal_form(ctx, rng, n - s) + ext_d(R.horizontal_form(ctx, rng, n - s - 1))
    X0, Y0 = pullback_analysis(ctx, f0).X0, pullback_analysis(ctx, g0).X0
    checks.append(("scaling-degree-0 forms commute", not poisson_bracket(ctx, f0, X0, g0, Y0)))

    E = Xc.get(0, Multivector(cs, r))
    f1 = universal_momentum(ctx, E)
    checks.append(("{J(X0), g0} = -L_X0 g0", poisson_bracket(ctx, f1, E, g0, Y0) == -lie_form(E, g0)))

    if s + 1 < n:
        Gc = generate_lh(ctx, R.lh_data(ctx, rng, s + 1, minus=False))
    else:
        Gc = nvector_from_function(ctx, R.poly(cs, rng, 2, 2, cs.x_indices + cs.q_indices))
    gc = contract(Gc, om) * _sign(s)
    checks.append(
        (
            "closed argument",
            poisson_bracket(ctx, f1, E, gc, Multivector(cs, s)) == contract(schouten(Gc, E), om) * _sign(r + s - 1),
        )
    )

    h = R.poly(cs, rng, 3, 2)
    W = nvector_from_function(ctx, h)
    fh = Form.scalar(h)
    checks.append(("functions are Poisson", contract(W, om) == ext_d(fh) and vanishes_on_kernel(ctx, fh)))
    return checks


def is_degree(ctx, obj, s):
    return lie_sigma(ctx, obj) == obj * s


# registry ------------------------------------------------------------------------------------------------------

SUITES = {
    "structure": structure_trial,
    "lie-identities": lie_identities_trial,
    "kernel": kernel_trial,
    "lh-roundtrip": lh_roundtrip_trial,
    "scaling": scaling_trial,
    "jmap": jmap_trial,
    "canonical": canonical_trial,
    "field-from-form": field_from_form_trial,
    "bracket": bracket_trial,
}


@dataclass
class SuiteResult:
    suite: str
    n: int
    N: int
    trials: int
    passed: int = 0
    failures: Counter = field(default_factory=Counter)

    @property
    def ok(self):
        return self.passed == self.trials

    def summary(self):
        line = f"{self.suite} (n={self.n}, N={self.N}): {self.passed}/{self.trials} pass"
        if self.failures:
            detail = ", ".join(f"{name} x{count}" for name, count in sorted(self.failures.items()))
            line += f" [failed: {detail}]"
        return line


def trial_rng(seed, n, N, index):
    return random.Random(f"{seed}:{n}:{N}:{index}")


def run_suite(name, n, N, trials=50, seed=0):
    try:
        trial = SUITES[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}") from None
    if n < 2:
        raise ValueError("the suites need n >= 2")
    ctx = canonical_structures(n, N)
    result = SuiteResult(name, n, N, trials)
    for t in range(trials):
        try:
            checks = trial(ctx, trial_rng(seed, n, N, t))
        except Exception as exc:  # a crash is a failed trial, reported by type
            result.failures[f"raised {type(exc).__name__}"] += 1
            continue
        bad = [label for label, good in checks if not good]
        if bad:
            result.failures.update(bad)
        else:
            result.passed += 1
    return result
