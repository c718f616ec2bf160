import numpy as np
import pytest

from qortho.laurent import (BasisFunction, Laurent, LaurentError, NotDivisibleError, SymLaurent,
                            SymmetryError, divide_by_z_minus_zinv, expand_in_Q_basis, from_x_poly,
                            reconstruct, shift_z, to_x_poly, z_plus_zinv)
from qortho.qops import closed_form_action
from qortho.qpoly import q_basis


def test_arithmetic_and_evaluation():
    f = Laurent({2: 1.0, -1: 3.0})
    g = Laurent({-1: -3.0, 0: 1.0})
    assert (f + g).coeffs == {0: 1.0, 2: 1.0}
    assert (f * g).coeffs == pytest.approx({1: -3.0, 2: 1.0, -1: 3.0, -2: -9.0})
    z = 0.7 + 0.2j
    assert f(z) == pytest.approx(z ** 2 + 3 / z)
    assert Laurent().is_zero()


def test_symmetry_enforced():
    with pytest.raises(SymmetryError):
        SymLaurent({1: 1.0})
    x = np.linspace(-1, 1, 7)
    assert np.allclose(z_plus_zinv().eval_x(x), 2 * x)


def test_shift_z(ctx):
    q = ctx.q
    f = Laurent({1: 1.0, -1: 1.0})
    assert shift_z(f, 1, q).coeffs == pytest.approx({1: q ** 0.5, -1: q ** -0.5})
    assert shift_z(Laurent.constant(1.0), 3, q).coeffs == {0: 1}
    h = Laurent({-3: 0.2, 0: 1.5, 4: -2.0})
    assert shift_z(shift_z(h, 1, q), -1, q).close_to(h, 1e-14)


def test_division_by_z_minus_zinv():
    assert divide_by_z_minus_zinv(Laurent({1: 1.0, -1: -1.0}), 1e-12).coeffs == {0: 1}
    assert divide_by_z_minus_zinv(Laurent({2: 1.0, -2: -1.0}), 1e-12).coeffs == {1: 1, -1: 1}
    f = Laurent({3: 1.0, -3: -1.0})
    g = divide_by_z_minus_zinv(f, 1e-12)
    assert g.coeffs == {2: 1, 0: 1, -2: 1}
    assert (g * Laurent({1: 1.0, -1: -1.0})).close_to(f, 1e-14)
    with pytest.raises(NotDivisibleError):
        divide_by_z_minus_zinv(Laurent({2: 1.0, 0: 1.0}), 1e-12)


def test_x_poly_conversion():
    assert np.allclose(to_x_poly(SymLaurent({0: 1.0})), [1])
    assert np.allclose(to_x_poly(z_plus_zinv()), [0, 2])
    assert np.allclose(to_x_poly(SymLaurent({2: 1.0, -2: 1.0})), [-2, 0, 4])
    assert from_x_poly([1]).coeffs == {0: 1}
    assert from_x_poly([0, 2]).close_to(z_plus_zinv(), 1e-15)


def test_x_poly_round_trip():
    rng = np.random.default_rng(7)
    p = rng.normal(size=11)
    back = to_x_poly(from_x_poly(p)).real
    assert np.abs(back - p).max() < 1e-10


def test_expand_basis_element(ctx):
    for ell, m in [(1, 1), (4, 2), (6, 3), (2, 2), (3, 0)]:
        out = expand_in_Q_basis(q_basis(ell, m, ctx), ctx)
        assert out[(ell, m)] == pytest.approx(1.0)
        assert all(abs(v) < ctx.tol_exact for k, v in out.items() if k != (ell, m))
    assert expand_in_Q_basis(BasisFunction(SymLaurent({0: 1.0}), 2), ctx) == pytest.approx({(2, 2): 1.0})


def test_expand_two_x_t_matches_closed_form(ctx):
    g = BasisFunction(z_plus_zinv(), 1)
    got = expand_in_Q_basis(g, ctx)
    want = {k: 2 * v for k, v in closed_form_action("P0", 1, 1, ctx.q).items()}
    # x t has no Q_1^1 component; the closed form's lower term sits at l = 0 < m
    assert set(got) == {(2, 1)}
    assert want[(0, 1)] == 0
    for k in got:
        assert abs(got.get(k, 0) - want[k]) < 1e-12


def test_reconstruct_inverts_expansion(ctx):
    rng = np.random.default_rng(3)
    coeffs = {(ell, 2): complex(rng.normal()) for ell in range(2, 8)}
    f = reconstruct(coeffs, ctx)
    back = expand_in_Q_basis(f, ctx)
    for k, v in coeffs.items():
        assert abs(back[k] - v) < 1e-10
    with pytest.raises(ValueError):
        reconstruct({(2, 1): 1.0, (2, 2): 1.0}, ctx)


def test_expand_rejects_underflow(ctx):
    with pytest.raises(LaurentError):
        expand_in_Q_basis(BasisFunction(SymLaurent({400: 1.0, -400: 1.0}), 300), ctx)
