import math

import numpy as np
import pytest

from qortho.qcore import (ConvergenceError, E_q, E_q_series, PoleError, QContext, e_q, e_q_series,
                          phi_rs, qpochhammer, qpochhammer_inf, qpochhammer_multi, verify_q_binomial)


def test_context_validation():
    for bad in (0.0, 1.0, -0.2, 1.5):
        with pytest.raises(ValueError):
            QContext(bad)
    with pytest.raises(ValueError):
        QContext(0.5, tol_exact=1e-6, tol_series=1e-8)


def test_finite_pochhammer_trivial(ctx):
    assert qpochhammer(0.3 + 0j, 0, ctx) == 1
    assert qpochhammer(0.0, 7, ctx) == 1
    assert qpochhammer(ctx.q, 1, ctx) == pytest.approx(1 - ctx.q)


def test_infinite_pochhammer_against_long_product(ctx):
    assert qpochhammer_inf(0.0, ctx) == 1
    assert qpochhammer_inf(1.0, ctx) == 0
    brute = np.prod(1 - 0.5 * 0.5 ** np.arange(200))
    assert abs(qpochhammer_inf(0.5, ctx) - brute) < ctx.tol_exact


def test_multi_pochhammer(ctx):
    assert qpochhammer_multi([], 5, ctx) == 1
    assert qpochhammer_multi([0, 0], math.inf, ctx) == 1
    assert qpochhammer_multi([ctx.q, ctx.q], 1, ctx) == pytest.approx((1 - ctx.q) ** 2)


def test_phi_terminating(ctx):
    assert phi_rs([1.0, 0.3], [0.2], 0.7, ctx) == 1
    assert phi_rs([1.0, 0.1, 0.2, 0.3], [0.4, 0.5, 0.6], ctx.q, ctx) == 1


def test_phi_q_binomial_sum(ctx):
    # 1phi0(a;;q,z) = (az;q)_inf/(z;q)_inf
    a, z = 0.3, 0.4
    want = qpochhammer_inf(a * z, ctx) / qpochhammer_inf(z, ctx)
    assert abs(phi_rs([a], [], z, ctx) - want) < 1e-13


def test_phi_pole_and_divergence(ctx):
    with pytest.raises(PoleError):
        phi_rs([0.3], [ctx.q ** -2], 0.5, ctx)
    with pytest.raises(ConvergenceError):
        phi_rs([0.3], [], 1.5, ctx)


def test_q_exponentials(ctx):
    assert e_q(0, ctx) == 1
    assert E_q(0, ctx) == 1
    z = 0.3 + 0.2j
    assert abs(e_q(z, ctx) - e_q_series(z, ctx)) < ctx.tol_series
    assert abs(E_q(z, ctx) - E_q_series(z, ctx)) < ctx.tol_series
    # e_q(z) E_q(-z) = 1
    assert abs(e_q(z, ctx) * E_q(-z, ctx) - 1) < 1e-13


def test_q_binomial_checks():
    assert verify_q_binomial(0.0, 0.0, QContext(0.5)).max_residual == 0
    assert verify_q_binomial(0.5, 0.5, QContext(0.5)).passed
    assert verify_q_binomial(0.64 ** 2, -0.25, QContext(0.64)).passed
