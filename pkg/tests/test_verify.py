import math

import numpy as np
import pytest

from qortho.qcore import PoleError, QContext
from qortho.qfuncs import qbessel2
from qortho import verify as V


def test_table_validation():
    with pytest.raises(ValueError):
        V.MatrixElementTable("X", 0.5, {0: 1}, "closed-form")
    with pytest.raises(ValueError):
        V.MatrixElementTable("U", 0.5, {0: 1, 2: 1}, "closed-form")
    with pytest.raises(ValueError):
        V.MatrixElementTable("U", 0.5, {0: 1}, "guess")
    t = V.MatrixElementTable("U", 0.5, {0: 1, 1: 2}, "closed-form")
    assert t.kmax == 1 and t[1] == 2 and np.allclose(t.as_array(), [1, 2])


def test_u_closed_form(ctx):
    q, b = ctx.q, 0.7
    assert V.hermite_gen_matrix_elements(0.0, 3, ctx)[0] == 1
    u = V.hermite_gen_matrix_elements(b, 10, ctx)
    assert u[1] / u[0] == pytest.approx(q ** 0.25 * 0.5j * b / (1 - q))
    for k in range(10):
        assert 0.5j * b * u[k] == pytest.approx(q ** (-(2 * k + 1) / 4) * (1 - q ** (k + 1)) * u[k + 1])


def test_u_pole():
    ctx = QContext(0.5)
    with pytest.raises(PoleError):
        V.hermite_gen_matrix_elements(2j, 2, ctx)  # (-b^2/4;q^2)_inf = (1;q^2)_inf = 0


def test_u_projection_matches_closed_form(ctx):
    assert V.verify_u_recursion(0.8, 10, ctx).passed


def test_generating_function(ctx):
    rep = V.verify_generating_function([0.3], [0.0], 5, ctx)
    assert rep.max_residual == 0
    assert V.verify_generating_function([0.0], [0.8], 40, ctx).passed
    assert V.verify_generating_function([0.6], [1.2], 60, QContext(0.7)).passed
    with pytest.raises(ValueError):
        V.verify_generating_function([1.5], [0.8], 40, ctx)


def test_w_table_at_zero_b(ctx):
    w = V.gegenbauer_matrix_elements(1, 0.0, 4, ctx)
    assert w[0] == pytest.approx(1.0)
    assert all(abs(w[k]) < ctx.tol_exact for k in range(1, 5))


def test_w_recursions(ctx):
    rep = V.verify_w_recursions(1, 0.8, 6, ctx)
    assert rep.passed, rep.max_residual


def test_y_bessel(ctx):
    rep = V.verify_Y_bessel_recurrence(1, 0.8, 6, ctx)
    assert rep.passed, rep.max_residual
    checks = {p["check"] for p in rep.grid}
    assert checks == {"recurrence", "bessel_ratio", "v_step"}


def test_gegenbauer_expansion_picks_one_prefactor(ctx):
    rep = V.verify_gegenbauer_expansion(1, [0.3], [0.8], 40, ctx)
    assert rep.passed
    assert rep.metadata["matched_prefactor"] == "1/(-b^2/4;q^2)_inf"
    others = [v for k, v in rep.metadata["candidate_max_residuals"].items() if k != "1/(-b^2/4;q^2)_inf"]
    assert min(others) > 1e-4


def test_gegenbauer_limits(ctx):
    assert V.verify_gegenbauer_small_b(ctx).passed
    assert V.verify_gegenbauer_hermite_reduction(ctx).passed


def test_orthogonality():
    ctx = QContext(0.5)
    g = V.orthogonality_matrix("hermite", (), 6, 200, ctx)
    assert np.abs(g - g.T).max() < 1e-12 * np.abs(g).max()
    assert V.gram_offdiagonal_ratio(g) < 1e-8
    assert V.verify_orthogonality("ultraspherical", (0.7,), 5, QContext(0.7)).passed
    assert V.verify_orthogonality("askey-wilson", (0.1, 0.2, -0.3, 0.4), 5, ctx).passed
    with pytest.raises(ValueError):
        V.verify_orthogonality("askey-wilson", (1.1, 0, 0, 0), 3, ctx)


def test_hermite_norms_from_quadrature():
    # h_n = 2 pi (q;q)_n / (q;q)_inf for the normalised weight used here
    ctx = QContext(0.4)
    g = V.orthogonality_matrix("hermite", (), 5, 200, ctx)
    from qortho.qcore import qpochhammer, qpochhammer_inf
    for n in range(6):
        want = 2 * math.pi * qpochhammer(0.4, n, ctx).real / qpochhammer_inf(0.4, ctx).real
        assert g[n, n] == pytest.approx(want, rel=1e-10)


def test_classical_oracles():
    assert V.classical_hermite(3, 0.5) == pytest.approx(8 * 0.125 - 12 * 0.5)
    assert V.classical_gegenbauer(2, 1.0, 0.3) == pytest.approx(4 * 0.09 - 1)


@pytest.mark.parametrize("target", V.LIMIT_TARGETS)
def test_limit_sweeps(target):
    rep = V.classical_limit_sweep(target, [0.9, 0.99, 0.999])
    assert rep.passed, (target, rep.metadata["errors"])
    assert rep.metadata["decreasing"]


def test_limit_sweep_input_checks():
    with pytest.raises(ValueError):
        V.classical_limit_sweep("hermite", [0.99, 0.9])
    with pytest.raises(ValueError):
        V.classical_limit_sweep("nope", [0.9])


def test_bessel_recurrence_and_asymptotics():
    assert V.verify_bessel_recurrence(20, [0.5, 1.0], QContext(0.6), tol=1e-12).passed
    assert V.verify_bessel_asymptotics(40, [0.5, 1.0], QContext(0.3)).passed
    rep = V.verify_bessel_asymptotics(40, [0.5, 1.0], QContext(0.8))
    # at q = 0.8 the order-40 gap (q;q)_inf/(q;q)_40 - 1 is itself far above 1e-6
    assert rep.metadata["predicted_order_nu_gap"] > 1e-4
    # the z-dependent correction is smaller, so the two agree in order of magnitude
    assert 0.5 < rep.max_residual / rep.metadata["predicted_order_nu_gap"] < 2


def test_special_values(ctx_grid):
    assert V.verify_special_values(ctx_grid).passed
    rep = V.ultraspherical_zero_report(ctx_grid)
    assert rep.passed
    assert rep.metadata["m_independent_form_mismatches"] > 0
