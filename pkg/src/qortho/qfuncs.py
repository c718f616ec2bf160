"""The building blocks psi_n, the q-exponential eps_q and the q-Bessel function J^(2)."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import gmpy2
import numpy as np

from .laurent import Laurent, SymLaurent
from .qcore import EPS, QContext, qpochhammer


class SeriesTruncationWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class EqSeriesControl:
    max_n: int = 400
    tail_tol: float = 1e-14

    def __post_init__(self):
        if self.max_n < 1:
            raise ValueError("max_n must be at least 1")
        if not self.tail_tol > 0:
            raise ValueError("tail_tol must be positive")


DEFAULT_CONTROL = EqSeriesControl()


def _shift_exponents(n: int) -> np.ndarray:
    # (1 - n)/2 + k for k = 0..n-1, symmetric about zero
    return (1 - n) / 2 + np.arange(n)


def psi_n(a: complex, x: float, n: int, ctx: QContext) -> complex:
    """(a q^{(1-n)/2} e^{i theta}; q)_n (a q^{(1-n)/2} e^{-i theta}; q)_n with x = cos(theta)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    z = np.exp(1j * math.acos(x))
    s = a * ctx.q ** ((1 - n) / 2)
    return qpochhammer(s * z, n, ctx) * qpochhammer(s / z, n, ctx)


def psi_n_laurent(a: complex, n: int, ctx: QContext) -> SymLaurent:
    """psi_n(a, x) as an exact symmetric Laurent polynomial of degree n."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    w = ctx.q ** _shift_exponents(n)
    left = Laurent.constant(1.0)
    for wj in w:
        left = left * Laurent({0: 1.0, 1: -a * wj})
    return SymLaurent.from_laurent(left * left.reflect(), tol=1e-9)


def psi_n_scaled_laurent(a: complex, n: int, ctx: QContext) -> SymLaurent:
    """q^{n^2/4} psi_n(a, x) built without forming the large intermediate powers.

    Each factor 1 - a q^j z with j < 0 is written q^j (q^-j - a z); the
    collected powers of q cancel q^{n^2/4} up to q^{1/4} (odd n) or 1.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    q = ctx.q
    js = _shift_exponents(n)
    first = np.where(js < 0, q ** (-js), 1.0)
    side = np.where(js < 0, 1.0, q ** js)
    leftover = n * n / 4 + 2 * float(np.sum(js[js < 0]))
    # factor j<0: (q^-j - a z); factor j>=0: (1 - a q^j z)
    c = np.array([1.0 + 0j])
    for f, s in zip(first, side):
        c = np.convolve(c, np.array([f, -a * s], dtype=complex))
    left = Laurent(lo=0, array=c)
    return SymLaurent.from_laurent(left * left.reflect() * q ** leftover, tol=1e-9)


class EqSeries(NamedTuple):
    value: complex
    terms: int
    last_term: float
    converged: bool
    extended_precision: bool = False


# Above this ratio of largest term to sum, a double-precision partial sum has
# lost more than about two digits to cancellation and is redone with MPFR.
CANCELLATION_LIMIT = 1e2


def extended_bits(ratio: float, guard_digits: int = 25) -> int:
    """Binary precision that leaves ``guard_digits`` digits after losing log10(ratio) to cancellation."""
    digits = guard_digits + math.ceil(math.log10(max(ratio, 1.0)))
    return int(math.ceil(digits * math.log2(10))) + 8


def eps_q_series(x: float, a: complex, b: complex, ctx: QContext,
                 control: EqSeriesControl = DEFAULT_CONTROL) -> EqSeries:
    """Partial sum of eps_q(x; a, b) with its truncation diagnostics.

    The rescaled blocks q^{n^2/4} psi_n stay bounded, so the terms only decay
    geometrically, roughly like |a b|^n. Summation stops once a term drops
    below ``control.tail_tol`` relative to the sum, or at ``control.max_n``.
    """
    q = ctx.q
    z = np.exp(1j * math.acos(x))
    total = 1.0 + 0j
    qq = 1.0  # (q;q)_n
    bn = 1.0 + 0j
    prev = last = biggest = 1.0
    n = 0
    while n < control.max_n:
        n += 1
        qq *= 1 - q ** n
        bn *= b
        # q^{n^2/4} psi_n evaluated factorwise, same rescaling as the Laurent form
        js = _shift_exponents(n)
        neg = js < 0
        left = np.where(neg, q ** (-js) - a * z, 1 - a * q ** js * z)
        right = np.where(neg, q ** (-js) - a / z, 1 - a * q ** js / z)
        val = np.prod(left * right) * q ** (n * n / 4 + 2 * float(np.sum(js[neg])))
        term = val * bn / qq
        total += term
        biggest = max(biggest, abs(term))
        # two consecutive small terms, since odd terms vanish identically at x = 0
        prev, last = last, abs(term)
        if max(prev, last) <= 0.1 * control.tail_tol * abs(total):
            break
    last = max(prev, last)
    converged = last <= control.tail_tol * max(abs(total), EPS)
    ratio = biggest / max(abs(total), 1e-300)
    if ratio > CANCELLATION_LIMIT:
        return EqSeries(_eps_q_mp(x, a, b, q, n, extended_bits(ratio)), n + 1, last, converged, True)
    return EqSeries(total, n + 1, last, converged)


def _eps_q_mp(x: float, a: complex, b: complex, q: float, nterms: int, bits: int) -> complex:
    # same partial sum with every term formed in extended precision; psi_n
    # gains the four factors with shift exponent +-(n-1)/2 over psi_{n-2}
    with gmpy2.context(precision=bits):
        q, a, b = gmpy2.mpfr(q), gmpy2.mpc(a), gmpy2.mpc(b)
        z = gmpy2.exp(gmpy2.mpc(0, gmpy2.acos(gmpy2.mpfr(x))))
        zi = 1 / z
        h = gmpy2.sqrt(q)
        psi = [gmpy2.mpc(1), (1 - a * z) * (1 - a * zi)]
        total, qq, bn = gmpy2.mpc(1), gmpy2.mpfr(1), gmpy2.mpc(1)
        for n in range(1, nterms + 1):
            if n >= 2:
                up, down = a * h ** (n - 1), a / h ** (n - 1)
                psi[n % 2] *= (1 - up * z) * (1 - up * zi) * (1 - down * z) * (1 - down * zi)
            qq *= 1 - q ** n
            bn *= b
            total += q ** (gmpy2.mpfr(n * n) / 4) * psi[n % 2] * bn / qq
        return complex(total)


def eps_q(x: float, a: complex, b: complex, ctx: QContext,
          control: EqSeriesControl = DEFAULT_CONTROL) -> complex:
    """The q-exponential eps_q(x; a, b) = sum q^{n^2/4}/(q;q)_n psi_n(a, x) b^n.

    A :class:`SeriesTruncationWarning` is issued when the last retained term
    is not below ``control.tail_tol`` relative to the sum.
    """
    res = eps_q_series(x, a, b, ctx, control)
    if not res.converged:
        warnings.warn(
            f"eps_q truncated at n={control.max_n} with last term {res.last_term:.3g}",
            SeriesTruncationWarning, stacklevel=2,
        )
    return res.value


def eps_q_laurent(a: complex, b: complex, nmax: int, ctx: QContext) -> SymLaurent:
    """sum_{n <= nmax} q^{n^2/4}/(q;q)_n psi_n(a, .) b^n as a Laurent polynomial."""
    acc = SymLaurent({0: 1.0})
    qq = 1.0
    for n in range(1, nmax + 1):
        qq *= 1 - ctx.q ** n
        acc = acc + psi_n_scaled_laurent(a, n, ctx) * (b ** n / qq)
    return acc


def qbessel2(nu: int, zarg: complex, ctx: QContext, max_terms: int = 400) -> complex:
    """Jackson's second q-Bessel function J^(2)_nu(z; q) for integer nu >= 0."""
    if nu < 0 or int(nu) != nu:
        raise ValueError("only integer orders nu >= 0 are supported")
    nu = int(nu)
    q = ctx.q
    half = zarg / 2
    term = half ** nu / qpochhammer(q, nu, ctx)
    total = term
    biggest = abs(term)
    for n in range(1, max_terms):
        term *= -(q ** (2 * n - 1 + nu)) * half * half / ((1 - q ** n) * (1 - q ** (n + nu)))
        total += term
        biggest = max(biggest, abs(term))
        if abs(term) <= 0.1 * EPS * abs(total) or term == 0:
            break
    ratio = biggest / abs(total) if total != 0 else math.inf
    if ratio > CANCELLATION_LIMIT and biggest > 0:
        return _qbessel2_mp(nu, zarg, q, n + 1, extended_bits(min(ratio, 1e300)))
    return complex(total)


def _qbessel2_mp(nu: int, zarg: complex, q: float, nterms: int, bits: int) -> complex:
    with gmpy2.context(precision=bits):
        q = gmpy2.mpfr(q)
        half = gmpy2.mpc(zarg) / 2
        qq = gmpy2.mpfr(1)
        for k in range(1, nu + 1):
            qq *= 1 - q ** k
        term = half ** nu / qq
        total = term
        for n in range(1, nterms):
            term *= -(q ** (2 * n - 1 + nu)) * half * half / ((1 - q ** n) * (1 - q ** (n + nu)))
            total += term
        return complex(total)


def classical_bessel_j(nu: int, x: float, nterms: int = 80) -> float:
    """Ascending series for the ordinary Bessel function J_nu(x)."""
    term = (x / 2) ** nu / math.factorial(nu)
    total = term
    for k in range(1, nterms):
        term *= -(x / 2) ** 2 / (k * (k + nu))
        total += term
    return total


class EqLaurent(NamedTuple):
    poly: SymLaurent
    order: int
    largest_term: float  # largest coefficient of any single term, a cancellation gauge
    converged: bool = True


def eps_q_laurent_sum(a: complex, b: complex, ctx: QContext, min_order: int = 0,
                      abs_tol: float = 1e-30, max_order: int = 400, warn: bool = True) -> EqLaurent:
    """Laurent form of eps_q summed until a term's coefficients drop below ``abs_tol``.

    At least ``min_order`` terms are kept. Hitting ``max_order`` warns unless
    ``warn`` is false; ``converged`` records it either way.
    """
    acc = SymLaurent({0: 1.0})
    qq, largest = 1.0, 1.0
    for n in range(1, max_order + 1):
        qq *= 1 - ctx.q ** n
        term = psi_n_scaled_laurent(a, n, ctx) * (b ** n / qq)
        acc = acc + term
        largest = max(largest, term.norm())
        if n >= min_order and term.norm() < abs_tol:
            return EqLaurent(acc, n, largest)
    if warn:
        warnings.warn(f"eps_q Laurent sum stopped at order {max_order}", SeriesTruncationWarning,
                      stacklevel=2)
    return EqLaurent(acc, max_order, largest, False)


def eps_q_laurent_converged(a: complex, b: complex, ctx: QContext, min_order: int = 0,
                            abs_tol: float = 1e-30, max_order: int = 400) -> tuple[SymLaurent, int]:
    """:func:`eps_q_laurent_sum` without the cancellation gauge: (sum, last order used)."""
    res = eps_q_laurent_sum(a, b, ctx, min_order, abs_tol, max_order)
    return res.poly, res.order


@lru_cache(maxsize=64)
def eps_q_sym_coeffs_mp(a: complex, b: complex, q: float, bits: int, rel_tol: float = 1e-30,
                        max_order: int = 3000) -> tuple[np.ndarray, int]:
    """Coefficients c_0..c_N of the eps_q Laurent sum in extended precision.

    The sum is symmetric, so c_e stands for both z^e and z^-e. psi_n is
    carried along as psi_{n-2} times the two new factors
    (1 - u z)(1 - u/z) = (1 + u^2) - u z - u/z with u = a q^{+-(n-1)/2}.
    Summation stops once a term is below ``rel_tol`` relative to the sum.
    Returns an object array of ``gmpy2.mpc`` at ``bits`` precision (cached;
    do not modify it) and the last order used.
    """
    with gmpy2.context(precision=bits):
        q, a, b = gmpy2.mpfr(q), gmpy2.mpc(a), gmpy2.mpc(b)
        h = gmpy2.sqrt(q)
        zero = gmpy2.mpc(0)
        psi = [np.array([gmpy2.mpc(1)], dtype=object), np.array([1 + a * a, -a], dtype=object)]
        acc = np.array([gmpy2.mpc(1)], dtype=object)
        qq, bn = gmpy2.mpfr(1), gmpy2.mpc(1)
        for n in range(1, max_order + 1):
            if n >= 2:
                for u in (a * h ** (n - 1), a / h ** (n - 1)):
                    psi[n % 2] = _times_sym_factor(psi[n % 2], u, zero)
            qq *= 1 - q ** n
            bn *= b
            term = psi[n % 2] * (q ** (gmpy2.mpfr(n * n) / 4) * bn / qq)
            if len(term) > len(acc):
                acc = np.concatenate([acc, np.full(len(term) - len(acc), zero, dtype=object)])
            acc[:len(term)] += term
            if max(map(abs, term)) < rel_tol * max(map(abs, acc)):
                return acc, n
    warnings.warn(f"extended eps_q Laurent sum stopped at order {max_order}", SeriesTruncationWarning,
                  stacklevel=2)
    return acc, max_order


def _times_sym_factor(c: np.ndarray, u, zero) -> np.ndarray:
    # multiply sum_e c_e (z^e + z^-e) (c_0 counted once) by (1 + u^2) - u z - u/z
    padded = np.concatenate([c[1:2] if len(c) > 1 else [zero], c, [zero, zero]])
    # padded[e + 1] = c_e for e = -1..len(c)+1, using c_{-1} = c_1
    mid = padded[1:-1]
    return (1 + u * u) * mid - u * (padded[:-2] + padded[2:])
