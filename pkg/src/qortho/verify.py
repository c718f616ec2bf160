"""Numerical certification of the generating function, the q-Fourier-Gegenbauer
expansion and the recursions between them.

Matrix elements come from two independent sources: closed forms, and a
projection oracle that expands a truncated q-exponential exactly in a
polynomial basis. Every check returns a :class:`VerificationReport`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import gmpy2
import numpy as np
from numpy.polynomial import legendre
from numpy.polynomial import polynomial as P

from .laurent import BasisFunction, Laurent, SymLaurent, expand_in_Q_basis, to_x_poly
from .qcore import PoleError, QContext, qpochhammer, qpochhammer_inf
from .qfuncs import (CANCELLATION_LIMIT, classical_bessel_j, eps_q, eps_q_laurent_sum,
                     eps_q_sym_coeffs_mp, extended_bits, qbessel2)
from .qops import apply_tau, apply_tau_star, closed_form_action
from .qpoly import (Family, askey_wilson, aw_weight, hermite_eval, hermite_laurent, q_basis_norm,
                    ultraspherical_aw_params, ultraspherical_eval)
from .report import VerificationReport

# ---------------------------------------------------------------------------
# matrix-element tables


@dataclass(frozen=True)
class MatrixElementTable:
    """Matrix elements indexed by k = 0..kmax.

    ``kind`` is "U" (q-exponential against the q-Hermite basis) or "W"
    (against Q_ell^{ell+k}); ``ell`` is only meaningful for "W".
    """

    kind: str
    b: complex
    values: dict[int, complex]
    provenance: str
    ell: int | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("U", "W"):
            raise ValueError(f"kind must be 'U' or 'W', got {self.kind!r}")
        if self.provenance not in ("projection-oracle", "closed-form"):
            raise ValueError(f"unknown provenance {self.provenance!r}")
        if sorted(self.values) != list(range(len(self.values))):
            raise ValueError("table indices must run contiguously from 0")

    @property
    def kmax(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, k: int) -> complex:
        return self.values[k]

    def as_array(self) -> np.ndarray:
        return np.array([self.values[k] for k in range(self.kmax + 1)], dtype=complex)


def _ctx2(ctx: QContext) -> QContext:
    return ctx.with_q(ctx.q ** 2)


def hermite_gen_denominator(b: complex, ctx: QContext) -> complex:
    """(-b^2/4; q^2)_inf, the normaliser of the q-Hermite generating function."""
    return qpochhammer_inf(-b * b / 4, _ctx2(ctx))


def hermite_gen_matrix_elements(b: complex, kmax: int, ctx: QContext) -> MatrixElementTable:
    """U_k(b) = q^{k^2/4}/(q;q)_k (ib/2)^k U_0 with U_0 = 1/(-b^2/4;q^2)_inf."""
    if kmax < 0:
        raise ValueError("kmax must be nonnegative")
    den = hermite_gen_denominator(b, ctx)
    if abs(den) < ctx.tol_exact:
        raise PoleError(f"(-b^2/4;q^2)_inf = {den:.3g} vanishes at b={b!r}")
    u0 = 1 / den
    q = ctx.q
    vals, qq = {}, 1.0
    for k in range(kmax + 1):
        if k:
            qq *= 1 - q ** k
        vals[k] = complex(q ** (k * k / 4) / qq * (0.5j * b) ** k * u0)
    return MatrixElementTable("U", complex(b), vals, "closed-form")


def _expand_in_hermite(f: Laurent, ctx: QContext) -> dict[int, complex]:
    # H_n has unit z^n coefficient, so eliminate the top exponent downwards
    rest = Laurent._raw(f.lo, f.c)
    out: dict[int, complex] = {}
    for n in range(rest.hi, -1, -1):
        c = rest.coeff(n)
        out[n] = c
        if c != 0:
            rest = rest - hermite_laurent(n, ctx) * c
    return out


def _needs_extended(res) -> bool:
    # the extended sum also runs to a higher order, so it covers truncation too
    return not res.converged or res.largest_term > CANCELLATION_LIMIT * max(res.poly.norm(), 1e-300)


def _extended_bits(res) -> int:
    return extended_bits(res.largest_term / max(res.poly.norm(), 1e-300), guard_digits=35)


def _project_mp(b: complex, beta: float, kmax: int, ctx: QContext, bits: int):
    """Coefficients d_0..d_kmax of eps_q(x; -i, b/2) on C_n(x; beta|q), in extended precision.

    Same top-exponent elimination as the double-precision oracle; beta = 0
    gives C_n(x; 0|q) = H_n(x|q)/(q;q)_n.
    """
    acc, order = eps_q_sym_coeffs_mp(-1j, complex(b) / 2, ctx.q, bits)
    with gmpy2.context(precision=bits):
        q, beta = gmpy2.mpfr(ctx.q), gmpy2.mpfr(beta)
        rest = acc.copy()
        top = len(rest) - 1
        # r_k = (beta;q)_k/(q;q)_k, C_n = sum_k r_k r_{n-k} z^(n-2k)
        r = [gmpy2.mpfr(1)]
        for k in range(1, top + 1):
            r.append(r[-1] * (1 - beta * q ** (k - 1)) / (1 - q ** k))
        r = np.array(r, dtype=object)
        d = {}
        for n in range(top, -1, -1):
            c = rest[n] / r[n]
            d[n] = c
            k = np.arange(n // 2 + 1)
            rest[n - 2 * k] -= c * (r[k] * r[n - k])
        return [complex(d.get(k, 0)) for k in range(kmax + 1)], order


def hermite_projection_table(b: complex, kmax: int, ctx: QContext) -> MatrixElementTable:
    """U_k(b); see :func:`_hermite_table`. Tables are cached, so treat them as read-only."""
    return _hermite_table(complex(b), int(kmax), ctx)


@lru_cache(maxsize=256)
def _hermite_table(b: complex, kmax: int, ctx: QContext) -> MatrixElementTable:
    """U_k(b) by expanding the truncated q-exponential in the q-Hermite basis.

    When the terms of the q-exponential are much larger than their sum (q
    close to 1) the expansion is redone in extended precision.
    """
    res = eps_q_laurent_sum(-1j, b / 2, ctx, min_order=kmax + 5, warn=False)
    if _needs_extended(res):
        bits = _extended_bits(res)
        d, order = _project_mp(b, 0.0, kmax, ctx, bits)
        vals = {k: d[k] / qpochhammer(ctx.q, k, ctx) for k in range(kmax + 1)}
        return MatrixElementTable("U", complex(b), vals, "projection-oracle",
                                  metadata={"order": order, "extended_bits": bits})
    coeffs = _expand_in_hermite(res.poly, ctx)
    vals = {k: complex(coeffs.get(k, 0.0)) for k in range(kmax + 1)}
    return MatrixElementTable("U", complex(b), vals, "projection-oracle", metadata={"order": res.order})


def gegenbauer_matrix_elements(ell: int, b: complex, kmax: int, ctx: QContext) -> MatrixElementTable:
    """W_ell^k(b); see :func:`_gegenbauer_table`. Tables are cached, so treat them as read-only."""
    return _gegenbauer_table(int(ell), complex(b), int(kmax), ctx)


@lru_cache(maxsize=256)
def _gegenbauer_table(ell: int, b: complex, kmax: int, ctx: QContext) -> MatrixElementTable:
    """W_ell^k(b): coefficients of eps_q(x; -i, b/2) t^ell on Q_ell^{ell+k}.

    The q-exponential is summed as an exact Laurent polynomial until its terms
    fall below 1e-30 (never fewer than kmax + 5 terms) and then expanded by
    :func:`~qortho.laurent.expand_in_Q_basis`. Multiplication by a function of
    x keeps the t-degree, so the whole expansion sits at m = ell; the expansion
    itself raises if the product is not reproduced by the basis. Near q = 1,
    where the terms cancel heavily, sum and expansion run in extended precision.
    """
    if ell < 1:
        raise ValueError("ell must be at least 1")
    if kmax < 0:
        raise ValueError("kmax must be nonnegative")
    res = eps_q_laurent_sum(-1j, b / 2, ctx, min_order=kmax + 5, warn=False)
    if _needs_extended(res):
        bits = _extended_bits(res)
        d, order = _project_mp(b, ctx.q ** ell, kmax, ctx, bits)
        vals = {k: d[k] / q_basis_norm(ell + k, ell, ctx) for k in range(kmax + 1)}
        return MatrixElementTable("W", complex(b), vals, "projection-oracle", ell=ell,
                                  metadata={"order": order, "extended_bits": bits})
    coeffs = expand_in_Q_basis(BasisFunction(res.poly, ell), ctx)
    stray = [key for key in coeffs if key[1] != ell]
    if stray:
        raise AssertionError(f"expansion left the t-degree {ell}: {stray}")
    vals = {k: complex(coeffs.get((ell + k, ell), 0.0)) for k in range(kmax + 1)}
    return MatrixElementTable("W", complex(b), vals, "projection-oracle", ell=ell,
                              metadata={"order": res.order})


# ---------------------------------------------------------------------------
# generating function and the U recursion


def hermite_generating_sum(x: float, b: complex, kmax: int, ctx: QContext) -> complex:
    """sum_{k<=kmax} q^{k^2/4}/(q;q)_k (ib/2)^k H_k(x|q).

    Redone in extended precision when the terms dwarf the sum.
    """
    q = ctx.q
    total, qq, biggest = 0j, 1.0, 0.0
    h_prev, h = 0.0, 1.0
    for k in range(kmax + 1):
        if k:
            qq *= 1 - q ** k
            h_prev, h = h, 2 * x * h - (1 - q ** (k - 1)) * h_prev
        term = q ** (k * k / 4) / qq * (0.5j * b) ** k * h
        total += term
        biggest = max(biggest, abs(term))
    ratio = biggest / max(abs(total), 1e-300)
    if ratio <= CANCELLATION_LIMIT:
        return total
    with gmpy2.context(precision=extended_bits(ratio, guard_digits=35)):
        q, x, c = gmpy2.mpfr(q), gmpy2.mpfr(x), gmpy2.mpc(0, 1) * gmpy2.mpc(b) / 2
        total, qq, h_prev, h = gmpy2.mpc(0), gmpy2.mpfr(1), gmpy2.mpfr(0), gmpy2.mpfr(1)
        for k in range(kmax + 1):
            if k:
                qq *= 1 - q ** k
                h_prev, h = h, 2 * x * h - (1 - q ** (k - 1)) * h_prev
            total += q ** (gmpy2.mpfr(k * k) / 4) / qq * c ** k * h
        return complex(total)


def verify_generating_function(x_grid, b_grid, kmax: int, ctx: QContext) -> VerificationReport:
    """Residual |(-b^2/4;q^2)_inf eps_q(x;-i,b/2) - q-Hermite sum| on the grid."""
    for x in x_grid:
        if abs(x) > 1:
            raise ValueError(f"x={x} outside [-1, 1]")
    grid, res = [], []
    for x in x_grid:
        for b in b_grid:
            lhs = hermite_gen_denominator(b, ctx) * eps_q(x, -1j, b / 2, ctx)
            rhs = hermite_generating_sum(x, b, kmax, ctx)
            grid.append({"x": float(x), "b": _num(b), "q": ctx.q})
            res.append(float(abs(lhs - rhs)))
    return VerificationReport("generating_function", grid, res, ctx.tol_series, {"kmax": kmax})


def verify_u_recursion(b: complex, kmax: int, ctx: QContext, tol: float | None = None) -> VerificationReport:
    """The two-term U recursion on the projection table, and its agreement with the closed form.

    Checks (ib/2) U_k = q^{-(2k+1)/4} (1 - q^{k+1}) U_{k+1} for k < kmax.
    """
    q = ctx.q
    proj = hermite_projection_table(b, kmax, ctx)
    closed = hermite_gen_matrix_elements(b, kmax, ctx)
    grid, res = [], []
    for k in range(kmax):
        lhs = 0.5j * b * proj[k]
        rhs = q ** (-(2 * k + 1) / 4) * (1 - q ** (k + 1)) * proj[k + 1]
        grid.append({"check": "recursion", "k": k, "b": _num(b), "q": q})
        res.append(_rel(lhs, rhs))
    for k in range(kmax + 1):
        grid.append({"check": "closed_form", "k": k, "b": _num(b), "q": q})
        res.append(_rel(proj[k], closed[k]))
    return VerificationReport("u_recursion", grid, res, ctx.tol_series if tol is None else tol,
                              {"kmax": kmax, "order": proj.metadata["order"]})


# ---------------------------------------------------------------------------
# W, Y and V recursions


def verify_w_recursions(ell: int, b: complex, kmax: int, ctx: QContext,
                        tol: float | None = None) -> VerificationReport:
    """Two independent recursions linking W_{ell+1} and W_ell.

    From multiplication by t:  W_{ell+1}^k = W_ell^{k+2} f_{ell+k+2,ell} + W_ell^k h_{ell+k,ell}.
    From the raising operator: W_{ell+1}^k = (2i/b) q^{(2ell+3)/4}
        (1-q^{-k-1})(1-q^{2ell+k+1}) / ((1-q^{2ell+1})(1+q^ell)) W_ell^{k+1}.
    """
    if b == 0:
        raise ValueError("b must be nonzero")
    q = ctx.q
    lo = gegenbauer_matrix_elements(ell, b, kmax + 2, ctx)
    hi = gegenbauer_matrix_elements(ell + 1, b, kmax, ctx)
    grid, res = [], []
    for k in range(kmax + 1):
        f = closed_form_action("Pplus", ell + k + 2, ell, q)[(ell + k + 1, ell + 1)]
        h = closed_form_action("Pplus", ell + k, ell, q)[(ell + k + 1, ell + 1)]
        grid.append({"check": "multiplication_by_t", "l": ell, "k": k, "b": _num(b), "q": q})
        res.append(_rel(hi[k], lo[k + 2] * f + lo[k] * h))
        c = (2j / b) * q ** ((2 * ell + 3) / 4) * (1 - q ** (-k - 1)) * (1 - q ** (2 * ell + k + 1)) \
            / ((1 - q ** (2 * ell + 1)) * (1 + q ** ell))
        grid.append({"check": "raising_operator", "l": ell, "k": k, "b": _num(b), "q": q})
        res.append(_rel(hi[k], c * lo[k + 1]))
    return VerificationReport("w_recursions", grid, res, ctx.tol_series if tol is None else tol,
                              {"kmax": kmax, "order": lo.metadata["order"]})


def y_from_w(table: MatrixElementTable, ctx: QContext) -> np.ndarray:
    """Strip the known k-dependence off W_ell^k:

    W_ell^k = i^k q^{k(k-2ell)/4} (q^{2ell};q)_k (1-q^{k+ell}) / (q;q)_k * Y_ell^k.
    """
    q, ell = ctx.q, table.ell
    out = []
    for k in range(table.kmax + 1):
        scale = (1j ** k * q ** (k * (k - 2 * ell) / 4) * qpochhammer(q ** (2 * ell), k, ctx)
                 * (1 - q ** (k + ell)) / qpochhammer(q, k, ctx))
        out.append(table[k] / scale)
    return np.array(out)


def verify_Y_bessel_recurrence(ell: int, b: complex, kmax: int, ctx: QContext,
                               tol: float | None = None) -> VerificationReport:
    """Y_ell^k obeys the q-Bessel three-term recurrence in s = k + ell.

    Three groups of residuals, labelled by ``check``:
      * recurrence: (2/b)(1-q^{s+1}) Y^{k+1} = q^{s+1} Y^{k+2} + Y^k,
      * bessel_ratio: Y_ell^k / J^(2)_{k+ell}(b) does not depend on k,
      * v_step: V_ell = b/(2(1-q^ell)) V_{ell+1} with V_ell = Y_ell^0 / J^(2)_ell(b).
    """
    if b == 0:
        raise ValueError("b must be nonzero")
    q = ctx.q
    y = y_from_w(gegenbauer_matrix_elements(ell, b, kmax + 2, ctx), ctx)
    y_next = y_from_w(gegenbauer_matrix_elements(ell + 1, b, 0, ctx), ctx)
    grid, res, flagged = [], [], []
    for k in range(kmax + 1):
        s = k + ell
        lhs = 2 / b * (1 - q ** (s + 1)) * y[k + 1]
        rhs = q ** (s + 1) * y[k + 2] + y[k]
        grid.append({"check": "recurrence", "l": ell, "s": s, "b": _num(b), "q": q})
        res.append(float(abs(lhs - rhs) / max(abs(lhs), abs(rhs), abs(y[k]), 1e-300)))
    j = [qbessel2(k + ell, b, ctx) for k in range(kmax + 1)]
    for k, jk in enumerate(j):
        if abs(jk) < 1e-13:
            flagged.append(k)
    v = y[0] / j[0]
    for k in range(1, kmax + 1):
        grid.append({"check": "bessel_ratio", "l": ell, "k": k, "b": _num(b), "q": q})
        res.append(_rel(y[k] / j[k], v))
    v_next = y_next[0] / qbessel2(ell + 1, b, ctx)
    grid.append({"check": "v_step", "l": ell, "b": _num(b), "q": q})
    res.append(_rel(b / (2 * (1 - q ** ell)) * v_next, v))
    meta = {"kmax": kmax, "V": _num(v)}
    if flagged:
        meta["near_zero_bessel_k"] = flagged
    return VerificationReport("y_bessel_recurrence", grid, res, ctx.tol_series if tol is None else tol, meta)


# ---------------------------------------------------------------------------
# q-Fourier-Gegenbauer expansion

PREFACTOR_CANDIDATES = ("1/(-b^2/4;q^2)_inf", "1/(-b^2/4;q)_inf", "1/(b^2/4;q^2)_inf")


def prefactor_candidate(name: str, b: complex, ctx: QContext) -> complex:
    if name == "1/(-b^2/4;q^2)_inf":
        return 1 / qpochhammer_inf(-b * b / 4, _ctx2(ctx))
    if name == "1/(-b^2/4;q)_inf":
        return 1 / qpochhammer_inf(-b * b / 4, ctx)
    if name == "1/(b^2/4;q^2)_inf":
        return 1 / qpochhammer_inf(b * b / 4, _ctx2(ctx))
    raise ValueError(f"unknown prefactor {name!r}; expected one of {PREFACTOR_CANDIDATES}")


def _bessel_shape(ell: int, b: complex, ctx: QContext) -> complex:
    # (q;q)_inf (2/b)^ell / (q^ell;q)_inf, the b-independent part of the normalisation
    return qpochhammer_inf(ctx.q, ctx) * (2 / b) ** ell / qpochhammer_inf(ctx.q ** ell, ctx)


def gegenbauer_series(x: float, ell: int, b: complex, kmax: int, ctx: QContext) -> complex:
    """sum_k i^k q^{k^2/4} (1-q^{k+ell}) J^(2)_{ell+k}(b) C_k(x; q^ell|q) times the shape factor."""
    q = ctx.q
    beta = q ** ell
    total = 0j
    c_prev, c = 0.0, 1.0
    for k in range(kmax + 1):
        if k == 1:
            c_prev, c = c, 2 * x * (1 - beta) / (1 - q)
        elif k > 1:
            n = k - 1
            c_prev, c = c, ((1 - beta * q ** n) * 2 * x * c - (1 - beta * beta * q ** (n - 1)) * c_prev) \
                / (1 - q ** (n + 1))
        total += 1j ** k * q ** (k * k / 4) * (1 - q ** (k + ell)) * qbessel2(ell + k, b, ctx) * c
    return _bessel_shape(ell, b, ctx) * total


def fit_prefactor(ell: int, b: complex, ctx: QContext) -> complex:
    """The scalar multiplying :func:`gegenbauer_series`, read off from W_ell^0."""
    w0 = gegenbauer_matrix_elements(ell, b, 0, ctx)[0]
    return w0 / (_bessel_shape(ell, b, ctx) * (1 - ctx.q ** ell) * qbessel2(ell, b, ctx))


def verify_gegenbauer_expansion(ell: int, x_grid, b_grid, kmax: int, ctx: QContext,
                                tol: float | None = None) -> VerificationReport:
    """eps_q(x; -i, b/2) = prefactor(b) * gegenbauer_series(x, ell, b).

    The prefactor is first fitted at every b from the projection table and
    matched against :data:`PREFACTOR_CANDIDATES`; the full identity is then
    evaluated on the grid for every candidate. The report passes when exactly
    one candidate reproduces the left side everywhere and it is the fitted one.
    Residuals are those of the matched candidate (the best one if none matches).
    """
    if ell < 1:
        raise ValueError("ell must be at least 1")
    if any(b == 0 for b in b_grid):
        raise ValueError("b must be nonzero")
    tol = ctx.tol_series if tol is None else tol
    fitted, fit_match = {}, []
    for b in b_grid:
        p = fit_prefactor(ell, b, ctx)
        fitted[_key(b)] = _num(p)
        hits = [n for n in PREFACTOR_CANDIDATES if _rel(prefactor_candidate(n, b, ctx), p) < tol]
        fit_match.append(hits)
    grid = []
    per_candidate = {n: [] for n in PREFACTOR_CANDIDATES}
    for x in x_grid:
        for b in b_grid:
            lhs = eps_q(x, -1j, b / 2, ctx)
            series = gegenbauer_series(x, ell, b, kmax, ctx)
            grid.append({"x": float(x), "b": _num(b), "l": ell, "q": ctx.q})
            for n in PREFACTOR_CANDIDATES:
                per_candidate[n].append(float(abs(lhs - prefactor_candidate(n, b, ctx) * series)))
    worst = {n: max(r) for n, r in per_candidate.items()}
    matched = [n for n in PREFACTOR_CANDIDATES if worst[n] < tol]
    fitted_names = {h for hits in fit_match for h in hits}
    consistent = len(matched) == 1 and all(hits == matched for hits in fit_match)
    best = min(PREFACTOR_CANDIDATES, key=lambda n: worst[n])
    residuals = per_candidate[matched[0] if matched else best]
    if not consistent:
        residuals = [max(r, tol) for r in residuals]
    meta = {"kmax": kmax, "matched_prefactor": matched[0] if consistent else None,
            "candidate_max_residuals": worst, "fitted_prefactor": fitted,
            "fit_matches": sorted(fitted_names)}
    return VerificationReport("gegenbauer_expansion", grid, residuals, tol, meta)


def verify_gegenbauer_small_b(ctx: QContext, b: float = 1e-3, x_grid=(-0.5, 0.3, 0.9),
                              kmax: int = 20, tol: float | None = None) -> VerificationReport:
    """As b -> 0 both sides of the ell = 1 expansion tend to 1; check them at small b."""
    grid, res = [], []
    for x in x_grid:
        lhs = eps_q(x, -1j, b / 2, ctx)
        rhs = prefactor_candidate(PREFACTOR_CANDIDATES[0], b, ctx) * gegenbauer_series(x, 1, b, kmax, ctx)
        grid.append({"x": x, "b": b, "l": 1, "q": ctx.q})
        res.append(float(abs(lhs - rhs)))
    meta = {"distance_from_one": max(abs(gegenbauer_series(x, 1, b, kmax, ctx)
                                         * prefactor_candidate(PREFACTOR_CANDIDATES[0], b, ctx) - 1)
                                     for x in x_grid)}
    return VerificationReport("gegenbauer_small_b", grid, res, ctx.tol_series if tol is None else tol, meta)


def reduction_ell(q: float, floor: int = 25, small: float = 1e-6) -> int:
    """Smallest ell >= floor with q^ell <= small."""
    return max(floor, int(math.ceil(math.log(small) / math.log(q))))


def verify_gegenbauer_hermite_reduction(ctx: QContext, ell: int | None = None, x_grid=(-0.9, 0.0, 0.4, 0.8),
                                        b_grid=(0.3, 0.8, 1.5), kmax: int = 40,
                                        tol: float = 1e-6) -> VerificationReport:
    """At large ell (q^ell near 0) the expansion must reproduce the q-Hermite generating function.

    The default ell is :func:`reduction_ell`, i.e. 25 unless q^25 is still above 1e-6.
    """
    ell = reduction_ell(ctx.q) if ell is None else ell
    grid, res = [], []
    for x in x_grid:
        for b in b_grid:
            lhs = prefactor_candidate(PREFACTOR_CANDIDATES[0], b, ctx) * gegenbauer_series(x, ell, b, kmax, ctx)
            rhs = hermite_generating_sum(x, b, kmax, ctx) / hermite_gen_denominator(b, ctx)
            grid.append({"x": x, "b": b, "l": ell, "q": ctx.q})
            res.append(float(abs(lhs - rhs)))
    return VerificationReport("gegenbauer_hermite_reduction", grid, res, tol,
                              {"kmax": kmax, "q_to_ell": ctx.q ** ell})


# ---------------------------------------------------------------------------
# orthogonality


def _family_eval_and_weight(family, params, ctx: QContext):
    family = Family(family)
    if family is Family.HERMITE:
        return (lambda n, x: hermite_eval(n, x, ctx)), (0.0, 0.0, 0.0, 0.0)
    if family is Family.ULTRASPHERICAL:
        (beta,) = params
        if not 0 < beta < 1:
            raise ValueError(f"ultraspherical weight needs 0 < beta < 1, got {beta}")
        return (lambda n, x: ultraspherical_eval(n, beta, x, ctx)), ultraspherical_aw_params(beta, ctx)
    a, b, c, d = params
    return (lambda n, x: np.array([askey_wilson(n, a, b, c, d, xi, ctx).real for xi in x])), (a, b, c, d)


def orthogonality_matrix(family, params, nmax: int, quad_nodes: int, ctx: QContext) -> np.ndarray:
    """Gram matrix G_mn = int_0^pi p_m p_n w dtheta by Gauss-Legendre on (0, pi).

    ``params`` is () for Hermite, (beta,) for ultraspherical and (a, b, c, d)
    for Askey-Wilson.
    """
    evaluate, abcd = _family_eval_and_weight(family, params, ctx)
    if max(abs(p) for p in abcd) >= 1:
        raise ValueError("weight is only positive for max(|a|,|b|,|c|,|d|) < 1")
    nodes, weights = legendre.leggauss(quad_nodes)
    theta = (nodes + 1) * math.pi / 2
    w = weights * math.pi / 2 * aw_weight(theta, *abcd, ctx)
    x = np.cos(theta)
    p = np.array([np.real(evaluate(n, x)) for n in range(nmax + 1)])
    return (p * w) @ p.T


def gram_offdiagonal_ratio(g: np.ndarray) -> float:
    """max |G_mn| / sqrt(G_mm G_nn) over m != n."""
    d = np.sqrt(np.abs(np.diag(g)))
    r = np.abs(g) / np.outer(d, d)
    np.fill_diagonal(r, 0.0)
    return float(r.max())


def verify_orthogonality(family, params, nmax: int, ctx: QContext, quad_nodes: int = 200,
                         tol: float = 1e-8) -> VerificationReport:
    g = orthogonality_matrix(family, params, nmax, quad_nodes, ctx)
    d = np.sqrt(np.abs(np.diag(g)))
    grid, res = [], []
    for m in range(nmax + 1):
        for n in range(m + 1, nmax + 1):
            grid.append({"m": m, "n": n, "q": ctx.q})
            res.append(float(abs(g[m, n]) / (d[m] * d[n])))
    asym = float(np.abs(g - g.T).max() / np.abs(g).max())
    return VerificationReport(f"orthogonality_{Family(family).value}", grid, res, tol,
                              {"params": [float(p) for p in params], "nodes": quad_nodes,
                               "asymmetry": asym})


# ---------------------------------------------------------------------------
# classical limits

LIMIT_TARGETS = ("hermite", "gegenbauer", "bessel", "exponential", "exponential_general",
                 "derivative", "multiplication")


def classical_hermite(n: int, x: float) -> float:
    h_prev, h = 0.0, 1.0
    for k in range(n):
        h_prev, h = h, 2 * x * h - 2 * k * h_prev
    return h


def classical_gegenbauer(n: int, lam: float, x: float) -> float:
    if n == 0:
        return 1.0
    c_prev, c = 1.0, 2 * lam * x
    for k in range(2, n + 1):
        c_prev, c = c, (2 * x * (k + lam - 1) * c - (k + 2 * lam - 2) * c_prev) / k
    return c


def _limit_error(target: str, q: float, p: dict) -> float:
    ctx = QContext(q)
    if target == "hermite":
        n, x = p.get("n", 3), p.get("x", 0.7)
        s = math.sqrt((1 - q) / 2)
        got = s ** -n * hermite_eval(n, x * s, ctx)
        return abs(got - classical_hermite(n, x)) / abs(classical_hermite(n, x))
    if target == "gegenbauer":
        n, lam, x = p.get("n", 3), p.get("lam", 2), p.get("x", 0.5)
        got = ultraspherical_eval(n, q ** lam, x, ctx)
        want = classical_gegenbauer(n, lam, x)
        return abs(got - want) / abs(want)
    if target == "bessel":
        nu, z = p.get("nu", 2), p.get("z", 1.5)
        want = classical_bessel_j(nu, z)
        return abs(qbessel2(nu, z * (1 - q), ctx) - want) / abs(want)
    if target == "exponential":
        b, x = p.get("b", 1.0), p.get("x", 0.3)
        want = np.exp(1j * b * x)
        return abs(eps_q(x, -1j, (1 - q) * b / 2, ctx) - want) / abs(want)
    if target == "exponential_general":
        a, b, x = p.get("a", 0.5), p.get("b", 1.0), p.get("x", 0.3)
        want = math.exp((1 + a * a - 2 * a * x) * b)
        return abs(eps_q(x, a, (1 - q) * b, ctx) - want) / abs(want)
    if target in ("derivative", "multiplication"):
        n = p.get("n", 3 if target == "derivative" else 2)
        f = BasisFunction(hermite_laurent(n, ctx), 0)
        fx = to_x_poly(f.poly).real
        if target == "derivative":
            got = to_x_poly(apply_tau(f, ctx).poly).real * (2 / (q ** 0.5 - q ** -0.5))
            want = P.polyder(fx)
        else:
            # tau*/2 tends to minus multiplication by x
            got = -to_x_poly(apply_tau_star(f, ctx).poly).real / 2
            want = P.polymulx(fx)
        size = max(len(got), len(want))
        got = np.pad(got, (0, size - len(got)))
        want = np.pad(want, (0, size - len(want)))
        return float(np.abs(got - want).max() / np.abs(want).max())
    raise ValueError(f"unknown target {target!r}; expected one of {LIMIT_TARGETS}")


def classical_limit_sweep(target: str, q_seq, ctx: QContext | None = None, tol: float = 1e-2,
                          **params) -> VerificationReport:
    """Relative error of a q-quantity against its classical limit along ``q_seq``.

    The check passes when the errors decrease strictly and the last one is
    below ``tol``. To keep ``passed == max_residual < tol`` the residual of
    every point but the last is ``tol`` times the ratio of the next error to
    this one; the raw errors are in the metadata. ``ctx`` only supplies
    tolerances and is otherwise unused, since each point fixes its own q.
    """
    if target not in LIMIT_TARGETS:
        raise ValueError(f"unknown target {target!r}; expected one of {LIMIT_TARGETS}")
    q_seq = [float(q) for q in q_seq]
    if not q_seq or any(not 0 < q < 1 for q in q_seq) or any(b <= a for a, b in zip(q_seq, q_seq[1:])):
        raise ValueError("q_seq must be strictly increasing inside (0, 1)")
    errors = [float(_limit_error(target, q, params)) for q in q_seq]
    res = [tol * errors[i + 1] / errors[i] if errors[i] > 0 else math.inf for i in range(len(errors) - 1)]
    res.append(errors[-1])
    grid = [{"q": q, **{k: _num(v) for k, v in params.items()}} for q in q_seq]
    return VerificationReport(f"classical_limit_{target}", grid, res, tol,
                              {"errors": errors, "decreasing": all(b < a for a, b in zip(errors, errors[1:]))})


# ---------------------------------------------------------------------------
# q-Bessel checks


def verify_bessel_recurrence(nu_max: int, z_grid, ctx: QContext, tol: float | None = None) -> VerificationReport:
    """q^nu J_{nu+1} = (2/z)(1-q^nu) J_nu - J_{nu-1}, relative to the largest term."""
    q = ctx.q
    grid, res = [], []
    for z in z_grid:
        j = [qbessel2(n, z, ctx) for n in range(nu_max + 2)]
        for nu in range(1, nu_max + 1):
            a, b, c = q ** nu * j[nu + 1], 2 / z * (1 - q ** nu) * j[nu], j[nu - 1]
            grid.append({"nu": nu, "z": _num(z), "q": q})
            res.append(float(abs(a - b + c) / max(abs(a), abs(b), abs(c))))
    return VerificationReport("bessel_recurrence", grid, res, ctx.tol_exact if tol is None else tol)


def verify_bessel_asymptotics(nu: int, z_grid, ctx: QContext, tol: float = 1e-6) -> VerificationReport:
    """|J^(2)_nu(z) (q;q)_inf / (z/2)^nu - 1| at a fixed large order.

    The metadata carries the leading correction (q;q)_inf/(q;q)_nu - 1, which
    bounds how close to 1 the ratio can be at this order.
    """
    q = ctx.q
    qinf = qpochhammer_inf(q, ctx).real
    grid, res = [], []
    for z in z_grid:
        ratio = qbessel2(nu, z, ctx) * qinf / (z / 2) ** nu
        grid.append({"nu": nu, "z": _num(z), "q": q})
        res.append(float(abs(ratio - 1)))
    predicted = abs(qinf / qpochhammer(q, nu, ctx).real - 1)
    return VerificationReport("bessel_asymptotics", grid, res, tol, {"predicted_order_nu_gap": predicted})


# ---------------------------------------------------------------------------
# values at x = 0


def verify_special_values(ctx: QContext, nmax: int = 12, b_grid=(0.3, 0.6, 1.2),
                          tol: float = 1e-12) -> VerificationReport:
    """Closed forms at x = 0, each against an independent evaluation.

    * psi_block: i^n q^{n^2/4} psi_n(-i, 0) is (q;q^2)_{n/2}^2 for even n, 0 for odd n.
    * eps_at_zero: eps_q(0; -i, b/2) equals the series sum (q;q^2)_n/(q^2;q^2)_n (-b^2/4)^n
      and the product (-q b^2/4; q^2)_inf / (-b^2/4; q^2)_inf.
    * hermite_at_zero: H_{2k}(0|q) = (-1)^k (q;q^2)_k, H_{2k+1}(0|q) = 0, against the recurrence.
    """
    from .qfuncs import psi_n
    from .qpoly import hermite_at_zero

    q = ctx.q
    c2 = _ctx2(ctx)
    grid, res = [], []
    for n in range(nmax + 1):
        got = 1j ** n * q ** (n * n / 4) * psi_n(-1j, 0.0, n, ctx)
        want = qpochhammer(q, n // 2, c2) ** 2 if n % 2 == 0 else 0.0
        grid.append({"check": "psi_block", "n": n, "q": q})
        res.append(float(abs(got - want) / max(1.0, abs(want))))
    for b in b_grid:
        direct = eps_q(0.0, -1j, b / 2, ctx)
        series, term, k = 0j, 1.0 + 0j, 0
        while abs(term) > 1e-18 * max(abs(series), 1.0) or k < 2:
            series += term
            term *= (1 - q ** (2 * k + 1)) / (1 - q ** (2 * k + 2)) * (-b * b / 4)
            k += 1
        product = qpochhammer_inf(-q * b * b / 4, c2) / qpochhammer_inf(-b * b / 4, c2)
        grid.append({"check": "eps_at_zero", "b": b, "q": q})
        res.append(max(_rel(direct, series), _rel(direct, product)))
    for n in range(nmax + 1):
        grid.append({"check": "hermite_at_zero", "n": n, "q": q})
        res.append(float(abs(hermite_at_zero(n, ctx) - hermite_eval(n, 0.0, ctx))))
    return VerificationReport("special_values", grid, res, tol, {"nmax": nmax})


def ultraspherical_zero_report(ctx: QContext, nmax: int = 12, m_values=(1, 2, 3, 4)) -> VerificationReport:
    """C_n(0; q^m|q) from the explicit sum, compared with two closed forms.

    The asserted residual is against (-1)^k (q^{2m};q^2)_k / (q^2;q^2)_k.
    The m-independent form (-1)^k (q^{2k};q^2)_k / (q^k;q^2)_k is only recorded.
    """
    from .qpoly import PolySpec, zero_value_notes

    grid, res, m_free = [], [], []
    for m in m_values:
        for n in range(0, nmax + 1, 2):
            notes = zero_value_notes(PolySpec(Family.ULTRASPHERICAL, n, (ctx.q ** m,)), ctx)
            grid.append({"n": n, "m": m, "q": ctx.q})
            res.append(notes["closed_form_deviation"] / max(1.0, abs(notes["value"])))
            m_free.append({"n": n, "m": m, "value": notes["value"], "m_independent_form": notes["m_free_form"],
                            "deviation": notes["m_free_deviation"]})
    mismatched = [p for p in m_free if p["deviation"] > ctx.tol_exact * max(1.0, abs(p["value"]))]
    meta = {"m_independent_form_mismatches": len(mismatched), "samples": mismatched[:8]}
    return VerificationReport("ultraspherical_at_zero", grid, res, ctx.tol_exact, meta)


# ---------------------------------------------------------------------------
# helpers


def _rel(a: complex, b: complex) -> float:
    d = max(abs(a), abs(b))
    return float(abs(a - b) / d) if d > 0 else 0.0


def _num(v):
    v = complex(v)
    return v.real if v.imag == 0 else [v.real, v.imag]


def _key(b) -> str:
    return repr(_num(b))
