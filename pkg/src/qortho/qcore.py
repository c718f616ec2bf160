"""q-shifted factorials, basic hypergeometric series and the classical q-exponentials.

Everything here is a pure function of its arguments plus an immutable
:class:`QContext` carrying the base ``q`` and the truncation/tolerance policy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .report import VerificationReport

EPS = np.finfo(float).eps


class QSeriesError(ArithmeticError):
    """Base class for failures inside q-series evaluation."""


class PoleError(QSeriesError, ZeroDivisionError):
    pass


class ConvergenceError(QSeriesError):
    pass


@dataclass(frozen=True)
class QContext:
    """Base ``q`` in (0, 1) together with truncation and tolerance settings.

    ``product_cutoff`` caps the number of factors of an infinite product; when
    left as ``None`` it is set to the count needed for ``q**K`` to fall below
    ``EPS * tol_exact``.
    """

    q: float
    tol_exact: float = 1e-10
    tol_series: float = 1e-8
    series_cutoff: int = 500
    product_cutoff: int | None = None

    def __post_init__(self) -> None:
        q = float(self.q)
        if not (0.0 < q < 1.0):
            raise ValueError(f"q must lie strictly between 0 and 1, got {self.q!r}")
        object.__setattr__(self, "q", q)
        if not (self.tol_exact > 0 and self.tol_series > 0):
            raise ValueError("tolerances must be positive")
        if self.tol_exact > self.tol_series:
            raise ValueError("tol_exact must not exceed tol_series")
        if self.series_cutoff < 1:
            raise ValueError("series_cutoff must be a positive integer")
        implied = int(math.ceil(math.log(EPS * self.tol_exact) / math.log(q))) + 1
        if self.product_cutoff is None:
            object.__setattr__(self, "product_cutoff", implied)
        elif self.product_cutoff < 1:
            raise ValueError("product_cutoff must be a positive integer")

    @property
    def sqrtq(self) -> float:
        return math.sqrt(self.q)

    def qpow(self, e: float) -> float:
        return self.q ** e

    def with_q(self, q: float) -> "QContext":
        return QContext(q, self.tol_exact, self.tol_series, self.series_cutoff)


def qpochhammer(a: complex, n: int, ctx: QContext) -> complex:
    """Finite q-shifted factorial (a; q)_n."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    out = 1.0 + 0j
    qk = 1.0
    for _ in range(n):
        out *= 1.0 - a * qk
        qk *= ctx.q
    return out


def _tail_factors(a: complex, ctx: QContext) -> int:
    # smallest K with sum_{k>=K} |log(1 - a q^k)| below machine precision
    absa = abs(a)
    if absa == 0.0:
        return 0
    q = ctx.q
    target = 0.5 * EPS * (1.0 - q)
    # |log(1-u)| <= |u| / (1-|u|) and we need |a| q^K / (1-q) tiny
    k = max(0, int(math.ceil(math.log(target / absa) / math.log(q))))
    while absa * q ** k >= 0.5:
        k += 1
    return k + 1


def qpochhammer_inf(a: complex, ctx: QContext) -> complex:
    """Infinite product (a; q)_inf, truncated once the tail is below rounding level."""
    if a == 0:
        return 1.0 + 0j
    k = _tail_factors(a, ctx)
    if k > ctx.product_cutoff:
        raise ConvergenceError(
            f"(a;q)_inf with |a|={abs(a):.3g}, q={ctx.q} needs {k} factors, "
            f"above product_cutoff={ctx.product_cutoff}"
        )
    factors = 1.0 - complex(a) * ctx.q ** np.arange(k)
    running = np.cumprod(factors)
    if not np.all(np.isfinite(running)):
        bad = int(np.argmin(np.isfinite(running)))
        raise OverflowError(f"(a;q)_inf overflowed at factor k={bad} (a={a!r})")
    return complex(running[-1])


def qpochhammer_multi(params: Sequence[complex], n: int | float, ctx: QContext) -> complex:
    """(a_1, ..., a_k; q)_n; pass ``n=math.inf`` for the infinite product."""
    out = 1.0 + 0j
    for a in params:
        out *= qpochhammer_inf(a, ctx) if n == math.inf else qpochhammer(a, int(n), ctx)
    return out


def _termination_index(upper: Sequence[complex], ctx: QContext) -> int | None:
    # an upper parameter q^(-N) kills every term past n = N
    best = None
    for a in map(complex, upper):
        if a == 0 or abs(a.imag) > 1e-14 * abs(a) or a.real <= 0:
            continue
        n = -math.log(a.real) / math.log(ctx.q)
        nn = round(n)
        if nn >= 0 and abs(n - nn) < 1e-9:
            best = nn if best is None else min(best, nn)
    return best


def phi_rs(upper: Sequence[complex], lower: Sequence[complex], arg: complex,
           ctx: QContext) -> complex:
    """Basic hypergeometric series r_phi_s(upper; lower; q, arg).

    Terminating series (an upper parameter equal to q**-N) are summed exactly
    through n = N. Otherwise the sum runs to ``ctx.series_cutoff`` terms and
    raises :class:`ConvergenceError` if the last retained term is not small.
    """
    q = ctx.q
    r, s = len(upper), len(lower)
    stop = _termination_index(upper, ctx)
    nmax = stop if stop is not None else ctx.series_cutoff - 1
    total = 1.0 + 0j
    term = 1.0 + 0j
    for n in range(nmax):
        qn = q ** n
        num = 1.0 + 0j
        for a in upper:
            num *= 1.0 - a * qn
        den = 1.0 - q ** (n + 1)
        for j, b in enumerate(lower):
            d = 1.0 - b * qn
            if abs(d) < EPS:
                raise PoleError(f"lower parameter #{j} = {b!r} hits a pole at index n={n}")
            den *= d
        term *= num / den * arg * ((-qn) ** (1 + s - r))
        total += term
        if term == 0:
            break
    if stop is None and abs(term) > ctx.tol_series * max(abs(total), 1e-300) and term != 0:
        raise ConvergenceError(
            f"{r}phi{s} not converged after {ctx.series_cutoff} terms "
            f"(last term {abs(term):.3g}, partial sum {abs(total):.3g})"
        )
    return total


def e_q(zarg: complex, ctx: QContext) -> complex:
    """Small q-exponential e_q(z) = 1 / (z; q)_inf."""
    den = qpochhammer_inf(zarg, ctx)
    if abs(den) < ctx.tol_exact:
        raise PoleError(f"e_q evaluated at a pole: |(z;q)_inf| = {abs(den):.3g} at z={zarg!r}")
    return 1.0 / den


def E_q(zarg: complex, ctx: QContext) -> complex:
    """Big q-exponential E_q(z) = (-z; q)_inf."""
    return qpochhammer_inf(-zarg, ctx)


def e_q_series(zarg: complex, ctx: QContext, nterms: int = 60) -> complex:
    """Power-series form of e_q; only meant as an independent cross-check."""
    total, term = 0j, 1.0 + 0j
    for n in range(nterms):
        total += term
        term *= zarg / (1.0 - ctx.q ** (n + 1))
    return total


def E_q_series(zarg: complex, ctx: QContext, nterms: int = 60) -> complex:
    total, term = 0j, 1.0 + 0j
    for n in range(nterms):
        total += term
        term *= zarg * ctx.q ** n / (1.0 - ctx.q ** (n + 1))
    return total


def verify_q_binomial(a: complex, zarg: complex, ctx: QContext) -> VerificationReport:
    """Compare the q-binomial series with its product form at one point."""
    if not abs(zarg) < 1:
        raise ValueError("q-binomial theorem needs |z| < 1")
    q = ctx.q
    lhs, term = 0j, 1.0 + 0j
    for n in range(ctx.series_cutoff):
        lhs += term
        term *= (1.0 - a * q ** n) / (1.0 - q ** (n + 1)) * zarg
        if abs(term) < EPS * abs(lhs) * 1e-2:
            break
    rhs = qpochhammer_inf(a * zarg, ctx) / qpochhammer_inf(zarg, ctx)
    res = abs(lhs - rhs)
    return VerificationReport(
        "q-binomial",
        [{"a": _jsonable(a), "z": _jsonable(zarg), "q": q}],
        [res],
        ctx.tol_series,
        {"series": _jsonable(lhs), "product": _jsonable(rhs)},
    )


def _jsonable(v):
    v = complex(v)
    if v.imag == 0:
        return v.real
    return [v.real, v.imag]
