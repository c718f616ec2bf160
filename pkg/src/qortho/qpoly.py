"""Continuous q-Hermite, q-ultraspherical (Rogers) and Askey-Wilson polynomials."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np
from numpy.polynomial import polynomial as P

from .laurent import BasisFunction, SymLaurent
from .qcore import PoleError, QContext, phi_rs, qpochhammer, qpochhammer_inf


class Family(str, Enum):
    HERMITE = "hermite"
    ULTRASPHERICAL = "ultraspherical"
    ASKEY_WILSON = "askey-wilson"


@dataclass(frozen=True)
class PolySpec:
    """A polynomial family, its degree and its parameters.

    ``params`` is empty for Hermite, ``(beta,)`` for ultraspherical and
    ``(a, b, c, d)`` for Askey-Wilson.
    """

    family: Family
    n: int
    params: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if self.n < 0:
            raise ValueError("degree must be nonnegative")
        want = {Family.HERMITE: 0, Family.ULTRASPHERICAL: 1, Family.ASKEY_WILSON: 4}[self.family]
        if len(self.params) != want:
            raise ValueError(f"{self.family.value} takes {want} parameter(s), got {len(self.params)}")


def _qbinom_row(n: int, ctx: QContext) -> np.ndarray:
    """(q;q)_n / ((q;q)_k (q;q)_{n-k}) for k = 0..n."""
    row = np.ones(n + 1)
    for k in range(1, n + 1):
        row[k] = row[k - 1] * (1 - ctx.q ** (n - k + 1)) / (1 - ctx.q ** k)
    return row


def _laurent_from_k_sum(weights: np.ndarray) -> SymLaurent:
    # sum_k w_k z^(n-2k): dense array on exponents -n..n with gaps of 2
    n = len(weights) - 1
    c = np.zeros(2 * n + 1, dtype=complex)
    c[::2] = weights[::-1]
    return SymLaurent._raw(-n, c)


@lru_cache(maxsize=4096)
def hermite_laurent(n: int, ctx: QContext) -> SymLaurent:
    """H_n(x|q) as a symmetric Laurent polynomial in z = e^{i theta}."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return _laurent_from_k_sum(_qbinom_row(n, ctx))


def hermite_eval(n: int, x, ctx: QContext):
    """H_n(x|q) by the upward three-term recurrence."""
    x = np.asarray(x, dtype=float)
    f_prev, f = np.ones_like(x), 2 * x
    if n == 0:
        return f_prev[()] if f_prev.ndim == 0 else f_prev
    for k in range(1, n):
        f_prev, f = f, 2 * x * f - (1 - ctx.q ** k) * f_prev
    return f[()] if f.ndim == 0 else f


def _ultra_weights(n: int, beta: complex, ctx: QContext) -> np.ndarray:
    # (beta;q)_k / (q;q)_k for k = 0..n
    r = np.ones(n + 1, dtype=complex)
    for k in range(1, n + 1):
        r[k] = r[k - 1] * (1 - beta * ctx.q ** (k - 1)) / (1 - ctx.q ** k)
    return r * r[::-1]


@lru_cache(maxsize=8192)
def ultraspherical_laurent(n: int, m: int, ctx: QContext, beta: complex | None = None) -> SymLaurent:
    """C_n(x; q^m|q) as a symmetric Laurent polynomial.

    Pass ``beta`` to use an arbitrary parameter instead of ``q**m``.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if beta is None:
        if m < 1:
            raise ValueError("m must be a positive integer")
        beta = ctx.q ** m
    w = _ultra_weights(n, beta, ctx)
    return _laurent_from_k_sum(w.real if np.isrealobj(beta) or complex(beta).imag == 0 else w)


def ultraspherical_eval(n: int, beta: float, x, ctx: QContext):
    """C_n(x; beta|q) by the upward recurrence in n.

    2x C_n = (1 - q^{n+1})/(1 - beta q^n) C_{n+1} + (1 - beta^2 q^{n-1})/(1 - beta q^n) C_{n-1}
    """
    q = ctx.q
    x = np.asarray(x, dtype=float)
    c_prev = np.ones_like(x)
    if n == 0:
        return c_prev[()] if c_prev.ndim == 0 else c_prev
    c = 2 * x * (1 - beta) / (1 - q)
    for k in range(1, n):
        c_prev, c = c, ((1 - beta * q ** k) * 2 * x * c - (1 - beta ** 2 * q ** (k - 1)) * c_prev) / (1 - q ** (k + 1))
    return c[()] if c.ndim == 0 else c


def ultraspherical_leading_coeff(n: int, m: int, ctx: QContext) -> float:
    """Coefficient of x^n in C_n(x; q^m|q): 2^n (q^m;q)_n / (q;q)_n."""
    if m < 1:
        raise ValueError("m must be a positive integer")
    return 2.0 ** n * (qpochhammer(ctx.q ** m, n, ctx) / qpochhammer(ctx.q, n, ctx)).real


# ---------------------------------------------------------------------------
# the Q_m^l basis


def q_basis_norm(ell: int, m: int, ctx: QContext) -> float:
    """(q;q)_{l-m} / (q^{2m};q)_{l-m} * q^{m(l-m)/2}."""
    n = ell - m
    q = ctx.q
    return (qpochhammer(q, n, ctx) / qpochhammer(q ** (2 * m), n, ctx)).real * q ** (m * n / 2)


@lru_cache(maxsize=8192)
def q_basis(ell: int, m: int, ctx: QContext) -> BasisFunction:
    """Q_m^l(x, t) as a :class:`BasisFunction`.

    For m = 0 the normalised polynomial has a finite limit as q^m -> 1, namely
    (z^l + z^-l)/2 (and 1 for l = 0); that limit is used.
    """
    if not 0 <= m <= ell:
        raise ValueError(f"need 0 <= m <= l, got m={m}, l={ell}")
    if m == 0:
        if ell == 0:
            return BasisFunction(SymLaurent({0: 1.0}), 0)
        return BasisFunction(SymLaurent({ell: 0.5, -ell: 0.5}), 0)
    poly = ultraspherical_laurent(ell - m, m, ctx) * q_basis_norm(ell, m, ctx)
    return BasisFunction(poly, m)


def q_basis_leading(ell: int, m: int, ctx: QContext) -> float:
    """Coefficient of z^(l-m) in Q_m^l."""
    if m == 0:
        return 1.0 if ell == 0 else 0.5
    n = ell - m
    q = ctx.q
    return q_basis_norm(ell, m, ctx) * (qpochhammer(q ** m, n, ctx) / qpochhammer(q, n, ctx)).real


# ---------------------------------------------------------------------------
# Askey-Wilson


def _aw_phi(n, a, b, c, d, z, ctx):
    q = ctx.q
    pref = qpochhammer(a * b, n, ctx) * qpochhammer(a * c, n, ctx) * qpochhammer(a * d, n, ctx) * a ** (-n)
    for j, low in enumerate((a * b, a * c, a * d)):
        for k in range(n):
            if abs(1 - low * q ** k) < 1e-14:
                raise PoleError(f"lower parameter {['ab', 'ac', 'ad'][j]}={low!r} equals q^-{k}")
    s = phi_rs([q ** (-n), a * b * c * d * q ** (n - 1), a * z, a / z],
               [a * b, a * c, a * d], q, ctx)
    return pref * s


def _aw_poly_in_a(n, a, b, c, d, z, ctx):
    """Same sum, organised as a polynomial in ``a`` before dividing by a^n.

    Every factor of each term is linear in ``a``; the coefficients of a^0 ..
    a^(n-1) cancel identically, so they are dropped instead of divided.
    """
    q = ctx.q
    total = np.zeros(1, dtype=complex)
    for k in range(n + 1):
        scal = qpochhammer(q ** (-n), k, ctx) * q ** k / qpochhammer(q, k, ctx)
        poly = np.array([scal], dtype=complex)
        for j in range(k):
            for root in (b * c * d * q ** (n - 1 + j), z * q ** j, q ** j / z):
                poly = P.polymul(poly, [1.0, -root])
        for j in range(k, n):
            for other in (b, c, d):
                poly = P.polymul(poly, [1.0, -other * q ** j])
        total = P.polyadd(total, poly)
    total = np.concatenate([total, np.zeros(max(0, n + 1 - len(total)))])
    return P.polyval(a, total[n:])


def askey_wilson(n: int, a: float, b: float, c: float, d: float, x: float, ctx: QContext) -> complex:
    """p_n(x; a, b, c, d|q) from its terminating 4phi3 representation.

    The polynomial is symmetric in (a, b, c, d); the largest parameter is put
    in the distinguished slot.  If every parameter is tiny the a^-n prefactor
    would cancel catastrophically, so the sum is reorganised as a polynomial
    in that parameter.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return 1.0 + 0j
    params = sorted((a, b, c, d), key=abs, reverse=True)
    z = np.exp(1j * math.acos(x))
    if abs(params[0]) > 1e-3:
        return complex(_aw_phi(n, *params, z, ctx))
    return complex(_aw_poly_in_a(n, *params, z, ctx))


def rogers_from_askey_wilson(n: int, beta: float, x: float, ctx: QContext) -> complex:
    """C_n(x; beta|q) through the Askey-Wilson specialisation and renormalisation."""
    q = ctx.q
    sb, sq = math.sqrt(beta), math.sqrt(q)
    num = qpochhammer(beta ** 2, n, ctx)
    den = (qpochhammer(beta * sq, n, ctx) * qpochhammer(-beta, n, ctx)
           * qpochhammer(-beta * sq, n, ctx) * qpochhammer(q, n, ctx))
    return num / den * askey_wilson(n, sb, sb * sq, -sb, -sb * sq, x, ctx)


def ultraspherical_aw_params(beta: float, ctx: QContext) -> tuple[float, float, float, float]:
    sb, sq = math.sqrt(beta), math.sqrt(ctx.q)
    return (sb, sb * sq, -sb, -sb * sq)


def aw_weight(theta, a: float, b: float, c: float, d: float, ctx: QContext):
    """|(e^{2i theta};q)_inf / (a e^{i theta}, b e^{i theta}, c e^{i theta}, d e^{i theta};q)_inf|^2."""
    if max(abs(a), abs(b), abs(c), abs(d)) >= 1:
        raise ValueError("Askey-Wilson weight needs max(|a|,|b|,|c|,|d|) < 1")
    theta = np.asarray(theta, dtype=float)
    flat = theta.ravel()
    out = np.empty(flat.shape)
    for i, th in enumerate(flat):
        e = np.exp(1j * th)
        num = qpochhammer_inf(e * e, ctx)
        den = 1.0 + 0j
        for p in (a, b, c, d):
            if p:
                den *= qpochhammer_inf(p * e, ctx)
        out[i] = abs(num / den) ** 2
    out = out.reshape(theta.shape)
    return out[()] if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# values at x = 0


def hermite_at_zero(n: int, ctx: QContext) -> float:
    """H_{2k}(0|q) = (-1)^k (q;q^2)_k, zero for odd degree."""
    if n % 2:
        return 0.0
    k = n // 2
    return (-1) ** k * qpochhammer(ctx.q, k, QContext(ctx.q ** 2)).real if k else 1.0


def ultraspherical_at_zero_m_free(n: int, m: int, ctx: QContext) -> float:
    """The m-independent candidate (-1)^k (q^{2k};q^2)_k / (q^k;q^2)_k; it does not match C_n(0; q^m|q)."""
    if n % 2:
        return 0.0
    k = n // 2
    q2 = QContext(ctx.q ** 2)
    return (-1) ** k * (qpochhammer(ctx.q ** (2 * k), k, q2) / qpochhammer(ctx.q ** k, k, q2)).real


def ultraspherical_at_zero_closed(n: int, beta: float, ctx: QContext) -> float:
    """C_{2k}(0; beta|q) = (-1)^k (beta^2;q^2)_k / (q^2;q^2)_k, zero for odd degree."""
    if n % 2:
        return 0.0
    k = n // 2
    q2 = QContext(ctx.q ** 2)
    return (-1) ** k * (qpochhammer(beta ** 2, k, q2) / qpochhammer(ctx.q ** 2, k, q2)).real


def special_value_at_zero(spec: PolySpec, ctx: QContext) -> float:
    """Value of the polynomial at x = 0.

    Hermite uses its closed form; ultraspherical uses the explicit z-sum at
    z = i (see :func:`zero_value_notes` for the closed-form comparison).
    """
    if spec.family is Family.HERMITE:
        return hermite_at_zero(spec.n, ctx)
    if spec.family is Family.ULTRASPHERICAL:
        (beta,) = spec.params
        return ultraspherical_laurent(spec.n, 0, ctx, beta=beta)(1j).real
    a, b, c, d = spec.params
    return askey_wilson(spec.n, a, b, c, d, 0.0, ctx).real


def zero_value_notes(spec: PolySpec, ctx: QContext) -> dict:
    """Compare :func:`special_value_at_zero` against the available closed forms."""
    v = special_value_at_zero(spec, ctx)
    if spec.family is Family.HERMITE:
        direct = hermite_laurent(spec.n, ctx)(1j).real
        return {"value": v, "direct_sum": direct, "deviation": abs(v - direct)}
    if spec.family is Family.ULTRASPHERICAL:
        (beta,) = spec.params
        closed = ultraspherical_at_zero_closed(spec.n, beta, ctx)
        notes = {"value": v, "closed_form_beta": closed, "closed_form_deviation": abs(closed - v)}
        m = math.log(beta) / math.log(ctx.q)
        if abs(m - round(m)) < 1e-9 and round(m) >= 1:
            m_free = ultraspherical_at_zero_m_free(spec.n, round(m), ctx)
            notes["m_free_form"] = m_free
            notes["m_free_deviation"] = abs(m_free - v)
            notes["m_free_matches"] = bool(abs(m_free - v) <= ctx.tol_exact * max(1.0, abs(v)))
        return notes
    return {"value": v}
