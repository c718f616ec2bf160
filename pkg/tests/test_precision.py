"""Near q = 1 the series cancel heavily; compare against independent mpmath sums at 60 digits."""

import math

import mpmath
import pytest

from qortho import verify as V
from qortho.qcore import QContext
from qortho.qfuncs import eps_q_series, qbessel2

mpmath.mp.dps = 60
Q = 0.95
QM = mpmath.mpf(Q)  # the binary value of 0.95, so both sides see the same q


def mp_eps(x, a, b, nterms=600):
    z = mpmath.expj(mpmath.acos(x))
    total = mpmath.mpc(0)
    for n in range(nterms):
        psi = mpmath.mpc(1)
        for k in range(n):
            w = a * QM ** (mpmath.mpf(1 - n) / 2 + k)
            psi *= (1 - w * z) * (1 - w / z)
        total += QM ** (mpmath.mpf(n * n) / 4) / mpmath.qp(QM, QM, n) * psi * b ** n
        if n > 20 and abs(psi * b ** n) < mpmath.mpf(10) ** -40:
            break
    return complex(total)


def mp_bessel(nu, z):
    return complex(mpmath.nsum(lambda k: (-1) ** k * QM ** (k * (k + nu)) * (mpmath.mpf(z) / 2) ** (2 * k + nu)
                               / (mpmath.qp(QM, QM, k) * mpmath.qp(QM, QM, k + nu)), [0, mpmath.inf]))


def test_eps_q_near_one():
    res = eps_q_series(-0.9, -1j, 0.75, QContext(Q))
    assert res.extended_precision
    want = mp_eps(mpmath.mpf(-0.9), -1j, mpmath.mpf(0.75))
    assert abs(res.value - want) < 1e-13


def test_qbessel_near_one():
    ctx = QContext(Q)
    for nu, z in [(0, 2.0), (1, 2.0), (3, 1.0)]:
        want = mp_bessel(nu, z)
        assert abs(qbessel2(nu, z, ctx) - want) <= 1e-13 * abs(want)


def test_projection_tables_near_one():
    ctx = QContext(Q)
    u = V.hermite_projection_table(0.8, 6, ctx)
    assert "extended_bits" in u.metadata
    closed = V.hermite_gen_matrix_elements(0.8, 6, ctx)
    for k in range(7):
        assert abs(u[k] - closed[k]) <= 1e-12 * abs(closed[k])


def test_extended_path_agrees_with_double_at_moderate_q():
    ctx = QContext(0.5)
    w = V.gegenbauer_matrix_elements(2, 0.8, 6, ctx)
    assert "extended_bits" not in w.metadata
    d, _ = V._project_mp(0.8, 0.25, 6, ctx, 200)
    for k in range(7):
        assert d[k] / V.q_basis_norm(2 + k, 2, ctx) == pytest.approx(w[k], rel=1e-13)


def test_reduction_ell():
    assert V.reduction_ell(0.5) == 25
    assert Q ** V.reduction_ell(Q) <= 1e-6
