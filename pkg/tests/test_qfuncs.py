import math

import numpy as np
import pytest

from qortho.laurent import BasisFunction, SymLaurent
from qortho.qcore import QContext, qpochhammer, qpochhammer_inf
from qortho.qfuncs import (EqSeriesControl, SeriesTruncationWarning, classical_bessel_j, eps_q,
                           eps_q_laurent, eps_q_laurent_converged, eps_q_series, psi_n, psi_n_laurent,
                           qbessel2)
from qortho.qops import apply_tau


def test_psi_small_orders(ctx):
    assert psi_n(0.3 + 0.1j, 0.2, 0, ctx) == 1
    a = 0.4
    assert psi_n_laurent(a, 1, ctx).close_to(SymLaurent({0: 1 + a * a, 1: -a, -1: -a}), 1e-14)
    for x in (-0.6, 0.1, 0.9):
        assert abs(psi_n(a, x, 1, ctx) - (1 + a * a - 2 * a * x)) < 1e-14


def test_psi_at_zero_with_imaginary_parameter(ctx_grid):
    q = ctx_grid.q
    assert abs(psi_n(-1j, 0.0, 2, ctx_grid) - (-(1 - q) ** 2 / q)) < 1e-13
    assert abs(psi_n(-1j, 0.0, 3, ctx_grid)) < 1e-13


def test_tau_lowers_psi(ctx):
    q, a = ctx.q, -1j
    got = apply_tau(BasisFunction(psi_n_laurent(a, 2, ctx), 0), ctx).poly
    want = psi_n_laurent(a, 1, ctx) * (a / q * (1 - q * q))
    assert got.close_to(want, 1e-13)


def test_eps_trivial_and_product_value(ctx):
    assert eps_q(0.3, 0.5, 0.0, ctx) == 1
    b, q = 0.6, ctx.q
    want = qpochhammer_inf(-q * b * b / 4, QContext(q * q)) / qpochhammer_inf(-b * b / 4, QContext(q * q))
    assert abs(eps_q(0.0, -1j, b / 2, ctx) - want) < ctx.tol_series


def test_eps_plane_wave_limit():
    q, b, x = 0.999, 1.0, 0.3
    got = eps_q(x, -1j, (1 - q) * b / 2, QContext(q))
    assert abs(got - np.exp(1j * b * x)) < 1e-2


def test_eps_series_matches_laurent(ctx):
    a, b = 0.3 + 0.2j, 0.5
    lau, order = eps_q_laurent_converged(a, b, ctx)
    for x in (-0.8, 0.0, 0.45):
        assert abs(lau.eval_x(x) - eps_q(x, a, b, ctx)) < 1e-12
    assert order > 5
    assert abs(eps_q_laurent(a, b, order, ctx).eval_x(0.2) - lau.eval_x(0.2)) < 1e-15


def test_eps_truncation_warning(ctx):
    with pytest.warns(SeriesTruncationWarning):
        eps_q(0.3, -1j, 1.8, ctx, EqSeriesControl(max_n=5))
    res = eps_q_series(0.3, -1j, 1.8, ctx, EqSeriesControl(max_n=5))
    assert not res.converged and res.terms == 6
    with pytest.raises(ValueError):
        EqSeriesControl(max_n=0)


def test_qbessel_values(ctx):
    assert qbessel2(0, 0.0, ctx) == 1
    assert qbessel2(3, 0.0, ctx) == 0
    q, z = ctx.q, 0.8
    lhs = q * qbessel2(2, z, ctx)
    rhs = (2 / z) * (1 - q) * qbessel2(1, z, ctx) - qbessel2(0, z, ctx)
    assert abs(lhs - rhs) < ctx.tol_exact
    with pytest.raises(ValueError):
        qbessel2(-1, 0.5, ctx)


def test_qbessel_against_direct_sum(ctx):
    # independent summation of the defining series
    q, nu, z = ctx.q, 2, 1.3
    want = sum((-1) ** k * q ** (k * (k + nu)) * (z / 2) ** (2 * k + nu)
               / (qpochhammer(q, k, ctx) * qpochhammer(q, k + nu, ctx)) for k in range(60))
    assert abs(qbessel2(nu, z, ctx) - want) < 1e-14


def test_classical_bessel():
    assert classical_bessel_j(0, 0.0) == 1
    # tabulated J_1(1) = 0.4400505857449335
    assert classical_bessel_j(1, 1.0) == pytest.approx(0.4400505857449335, abs=1e-15)
    assert classical_bessel_j(0, 2.404825557695773) == pytest.approx(0.0, abs=1e-14)
    assert math.isclose(classical_bessel_j(2, 3.0), 0.48609126058589103, rel_tol=1e-13)
