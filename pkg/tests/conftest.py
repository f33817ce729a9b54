import random

import pytest
from hypothesis import strategies as st

from mpcalc.coeff import CoordSystem, Poly
from mpcalc.exterior import Form, Multivector
from mpcalc.multiphase import canonical_structures


@pytest.fixture
def ctx21():
    return canonical_structures(2, 1)


@pytest.fixture
def ctx22():
    return canonical_structures(2, 2)


@pytest.fixture
def ctx32():
    return canonical_structures(3, 2)


@pytest.fixture(params=[(2, 1), (2, 2), (3, 2)], ids=lambda c: f"n{c[0]}N{c[1]}")
def ctx(request):
    return canonical_structures(*request.param)


@pytest.fixture
def rng():
    return random.Random(20261015)


CS21 = CoordSystem(2, 1)

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@st.composite
def polys(draw, cs=CS21, max_terms=3, max_exp=2):
    terms = draw(
        st.lists(
            st.tuples(st.lists(st.integers(0, max_exp), min_size=cs.size, max_size=cs.size), rationals),
            max_size=max_terms,
        )
    )
    out = Poly.zero(cs)
    for exps, c in terms:
        out = out + Poly.monomial(cs, exps, c)
    return out


@st.composite
def graded(draw, cls, degree=None, cs=CS21, max_terms=2):
    if degree is None:
        degree = draw(st.integers(0, 3))
    out = cls(cs, degree)
    for _ in range(draw(st.integers(0, max_terms))):
        key = draw(st.lists(st.integers(0, cs.size - 1), min_size=degree, max_size=degree, unique=True))
        out = out + cls.basis(cs, key, draw(polys(cs, max_terms=2, max_exp=1)))
    return out


def forms(degree=None, cs=CS21):
    return graded(Form, degree, cs)


def multivectors(degree=None, cs=CS21):
    return graded(Multivector, degree, cs)


def sign(k):
    return -1 if k % 2 else 1
