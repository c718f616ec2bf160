"""Property-based checks of the algebraic building blocks."""

import numpy as np
from hypothesis import given, settings, strategies as st

from qortho.laurent import BasisFunction, Laurent, SymLaurent, divide_by_z_minus_zinv, from_x_poly, shift_z, to_x_poly
from qortho.qcore import QContext, qpochhammer, qpochhammer_inf
from qortho.qops import apply_generator, check_commutator
from qortho.qpoly import hermite_eval

qs = st.floats(0.15, 0.9)
coef = st.floats(-2, 2, allow_nan=False)
real_poly = st.lists(coef, min_size=1, max_size=9)


@given(real_poly)
def test_x_poly_round_trip(p):
    back = to_x_poly(from_x_poly(p)).real
    back = np.pad(back, (0, max(0, len(p) - len(back))))  # trailing zeros are trimmed
    assert np.abs(back[: len(p)] - np.array(p)).max() <= 1e-10 * max(1, max(map(abs, p)))


@given(st.dictionaries(st.integers(-6, 6), coef, max_size=8))
def test_antisymmetrised_is_divisible(c):
    f = Laurent(c)
    g = f - f.reflect()
    if g.is_zero():
        return
    h = divide_by_z_minus_zinv(g, 1e-10)
    assert (h * Laurent({1: 1.0, -1: -1.0}) - g).norm() <= 1e-10 * max(g.norm(), 1)


@given(st.dictionaries(st.integers(-5, 5), coef, max_size=6), qs, st.integers(-3, 3))
def test_shift_inverse(c, q, k):
    f = Laurent(c)
    assert (shift_z(shift_z(f, k, q), -k, q) - f).norm() <= 1e-12 * max(f.norm(), 1)


@given(qs, st.floats(-0.9, 0.9), st.integers(0, 8), st.integers(0, 8))
def test_pochhammer_splits(q, a, n, m):
    ctx = QContext(q)
    lhs = qpochhammer(a, n + m, ctx)
    rhs = qpochhammer(a, n, ctx) * qpochhammer(a * q ** n, m, ctx)
    assert abs(lhs - rhs) <= 1e-12 * max(1, abs(lhs))


@given(qs, st.floats(-0.9, 0.9))
def test_infinite_pochhammer_functional_equation(q, a):
    ctx = QContext(q)
    assert abs(qpochhammer_inf(a, ctx) - (1 - a) * qpochhammer_inf(a * q, ctx)) < 1e-12


@settings(max_examples=25, deadline=None)
@given(qs, real_poly)
def test_operators_are_linear_on_random_polynomials(q, p):
    ctx = QContext(q)
    f = BasisFunction(from_x_poly(p), 0)
    g = BasisFunction(from_x_poly(list(reversed(p))), 0)
    for tag in ("tau", "tau_star", "mu"):
        lhs = apply_generator(tag, f + g, ctx)
        rhs = apply_generator(tag, f, ctx) + apply_generator(tag, g, ctx)
        assert (lhs - rhs).norm() <= 1e-9 * max(lhs.norm(), 1)


@settings(max_examples=15, deadline=None)
@given(qs)
def test_heisenberg_relation_any_q(q):
    assert check_commutator("heisenberg", 8, QContext(q)).passed


@given(qs, st.integers(0, 12), st.floats(-1, 1))
def test_hermite_parity(q, n, x):
    ctx = QContext(q)
    assert abs(hermite_eval(n, -x, ctx) - (-1) ** n * hermite_eval(n, x, ctx)) <= 1e-12 * max(1, abs(hermite_eval(n, x, ctx)))
