import numpy as np
import pytest

from qortho.laurent import BasisFunction, SymLaurent, expand_in_Q_basis, to_x_poly
from qortho.qcore import QContext
from qortho.qfuncs import psi_n_laurent
from qortho.qops import (ACTIONS, LADDERS, RELATIONS, NegativeTDegreeError, OperatorTag,
                         apply_generator, apply_mu, apply_tau, apply_tau_star, apply_tau_tilde,
                         check_commutator, check_ladder, check_module_action, closed_form_action,
                         compose, oracle_action)
from qortho.qpoly import hermite_laurent, q_basis


def H(n, ctx):
    return BasisFunction(hermite_laurent(n, ctx), 0)


def one(m=0):
    return BasisFunction(SymLaurent({0: 1.0}), m)


def test_tau_on_low_hermite(ctx):
    q = ctx.q
    assert apply_tau(one(), ctx).poly.is_zero()
    assert apply_tau(H(1, ctx), ctx).poly.close_to(SymLaurent({0: q ** 0.5 - q ** -0.5}), 1e-14)


def test_tau_star_on_low_hermite(ctx):
    q = ctx.q
    assert apply_tau_star(one(), ctx).poly.close_to(H(1, ctx).poly * -q ** -0.5, 1e-14)
    assert apply_tau_star(H(1, ctx), ctx).poly.close_to(H(2, ctx).poly * -1 / q, 1e-13)


def test_tau_star_tends_to_minus_x():
    ctx = QContext(0.999)
    f = H(2, ctx)
    got = -to_x_poly(apply_tau_star(f, ctx).poly).real / 2
    want = np.polynomial.polynomial.polymulx(to_x_poly(f.poly).real)
    assert np.abs(got - want).max() < 1e-2


def test_mu(ctx):
    q = ctx.q
    assert apply_mu(one(), ctx).poly.close_to(SymLaurent({0: 1.0}), 1e-14)
    assert apply_mu(H(3, ctx), ctx).poly.close_to(H(3, ctx).poly * q ** -1.5, 1e-12)
    c = QContext(0.999)
    g = apply_mu(H(2, c), c).poly
    assert (g - H(2, c).poly).norm() / H(2, c).norm() < 1e-2


def test_tau_tilde_constant(ctx):
    q = ctx.q
    got = apply_tau_tilde(one(0), ctx).poly
    # numerator reduces to -(1 - q)(z - 1/z)(z + 1/z)
    assert got.close_to(SymLaurent({1: 1.0, -1: 1.0}) * (-(1 - q) * q ** -0.5), 1e-14)


def test_jminus_built_on_tau_tilde(ctx):
    q, f = ctx.q, q_basis(1, 1, ctx)
    jm = apply_generator("Jminus", f, ctx)
    tt = apply_tau_tilde(f, ctx, t_power=0)
    assert jm.tdeg == 0
    assert jm.poly.close_to(tt.poly * (q / (1 - q) * q ** -0.5), 1e-14)


def test_linearity(ctx):
    rng = np.random.default_rng(1)
    a, b = rng.normal(size=2)
    f, g = H(3, ctx), H(5, ctx)
    for tag in ("tau", "tau_star", "mu", "tau_tilde"):
        lhs = apply_generator(tag, f * a + g * b, ctx)
        rhs = apply_generator(tag, f, ctx) * a + apply_generator(tag, g, ctx) * b
        assert (lhs - rhs).norm() < 1e-12 * max(lhs.norm(), 1)


def test_k_and_raising(ctx):
    q = ctx.q
    f = q_basis(5, 2, ctx)
    assert apply_generator(OperatorTag.K, f, ctx).poly.close_to(f.poly * q ** 1.5, 1e-15)
    got = apply_generator("P0", q_basis(1, 1, ctx), ctx)
    want = closed_form_action("P0", 1, 1, q)
    assert expand_in_Q_basis(got, ctx)[(2, 1)] == pytest.approx(want[(2, 1)], rel=1e-12)
    assert expand_in_Q_basis(apply_generator("Pplus", q_basis(1, 1, ctx), ctx), ctx) == pytest.approx({(2, 2): 1.0})


def test_lowering_from_zero_degree_raises(ctx):
    for tag in ("Jminus", "Pminus"):
        with pytest.raises(NegativeTDegreeError):
            apply_generator(tag, one(0), ctx)


def test_compose_order(ctx):
    f = H(2, ctx)
    assert compose(["tau", "mu"], f, ctx).poly.close_to(apply_tau(apply_mu(f, ctx), ctx).poly, 1e-15)


@pytest.mark.parametrize("rel", RELATIONS)
def test_relations(rel):
    for q in (0.5, 0.7):
        rep = check_commutator(rel, 10 if rel in RELATIONS[:4] else 3, QContext(q))
        assert rep.passed, (rel, q, rep.max_residual)


def test_x_mu_needs_factor_two(ctx):
    rep = check_commutator("x_mu", 10, ctx)
    assert rep.passed
    assert rep.metadata["without_factor_two_max_residual"] > 1


def test_unknown_relation(ctx):
    with pytest.raises(ValueError):
        check_commutator("nope", 3, ctx)


@pytest.mark.parametrize("name", LADDERS)
def test_ladders(name, ctx_grid):
    assert check_ladder(name, 12, ctx_grid).passed


def test_module_actions_support_and_coefficients(ctx):
    for action in ("Jminus", "P0", "Pplus", "Jplus"):
        rep = check_module_action(action, 3, 6, ctx)
        assert rep.passed, (action, rep.max_residual)
    assert check_module_action("Jminus", 3, 6, ctx).metadata["coefficient_mismatches"] == 0


def test_jplus_closed_form_ratio(ctx):
    q = ctx.q
    for ell, m in [(3, 1), (5, 2)]:
        got = oracle_action("Jplus", ell, m, ctx)[(ell, m + 1)]
        want = closed_form_action("Jplus", ell, m, q)[(ell, m + 1)]
        assert got / want == pytest.approx((1 - q ** m) / (1 + q ** m), rel=1e-10)


def test_pminus_literal_support_is_three_terms(ctx):
    rep = check_module_action("Pminus", 3, 6, ctx)
    assert not rep.passed
    assert rep.metadata["points_with_extra_support"] > 0
    assert rep.metadata["two_term_alternative"]["max_mass_outside_two_terms"] < 1e-12
    got = oracle_action("Pminus", 4, 2, ctx)
    assert {k for k, v in got.items() if abs(v) > 1e-12} == {(3, 1), (5, 1), (1, 1)}


def test_actions_enumerated():
    assert set(ACTIONS) == {"Jplus", "Jminus", "P0", "Pplus", "Pminus"}


def test_psi_ladder_single(ctx):
    q, a = ctx.q, 0.5
    got = apply_tau(BasisFunction(psi_n_laurent(a, 3, ctx), 0), ctx).poly
    assert got.close_to(psi_n_laurent(a, 2, ctx) * (a * q ** -1.5 * (1 - q ** 3)), 1e-12)
