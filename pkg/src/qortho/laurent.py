"""Exact arithmetic on Laurent polynomials in z, with x = (z + 1/z)/2.

A :class:`Laurent` stores its coefficients densely, ``c[j]`` multiplying
``z**(lo + j)``.  :class:`SymLaurent` adds the invariance ``c_k == c_-k`` so
that the value only depends on ``x``; sums and products of symmetric
polynomials stay symmetric.  :class:`BasisFunction` pairs a symmetric
polynomial with a power of the second variable ``t``.
"""

from __future__ import annotations

from dataclasses import dataclass
from numbers import Number
from typing import Mapping

import numpy as np
from numpy.polynomial import chebyshev as _cheb

SYMMETRY_TOL = 1e-10


class LaurentError(ArithmeticError):
    pass


class NotDivisibleError(LaurentError):
    """Raised when a numerator does not vanish at z = +-1.

    ``remainder`` holds the max-norm of the remainder relative to the input.
    """

    def __init__(self, remainder: float):
        super().__init__(f"polynomial is not divisible by (z - 1/z); relative remainder {remainder:.3g}")
        self.remainder = remainder


class SymmetryError(LaurentError):
    pass


def _trim(lo: int, c: np.ndarray) -> tuple[int, np.ndarray]:
    nz = np.flatnonzero(c)
    if nz.size == 0:
        return 0, np.zeros(0, dtype=complex)
    return lo + int(nz[0]), c[nz[0]:nz[-1] + 1]


class Laurent:
    """Finitely supported Laurent polynomial with complex coefficients."""

    __slots__ = ("lo", "c")

    def __init__(self, coeffs: Mapping[int, complex] | None = None, *,
                 lo: int = 0, array=None):
        if array is not None:
            c = np.array(array, dtype=complex)
            self.lo, self.c = _trim(lo, c)
            return
        coeffs = {k: v for k, v in (coeffs or {}).items() if v != 0}
        if not coeffs:
            self.lo, self.c = 0, np.zeros(0, dtype=complex)
            return
        lo_ = min(coeffs)
        c = np.zeros(max(coeffs) - lo_ + 1, dtype=complex)
        for k, v in coeffs.items():
            c[k - lo_] = v
        self.lo, self.c = _trim(lo_, c)

    # construction helpers -------------------------------------------------
    @classmethod
    def _raw(cls, lo: int, c: np.ndarray):
        obj = cls.__new__(cls)
        obj.lo, obj.c = _trim(lo, np.asarray(c, dtype=complex))
        return obj

    @classmethod
    def constant(cls, v: complex = 1.0):
        return cls._raw(0, np.array([v], dtype=complex))

    @classmethod
    def monomial(cls, k: int, v: complex = 1.0) -> "Laurent":
        return Laurent._raw(k, np.array([v], dtype=complex))

    # views -----------------------------------------------------------------
    @property
    def coeffs(self) -> dict[int, complex]:
        return {self.lo + j: complex(v) for j, v in enumerate(self.c) if v != 0}

    @property
    def hi(self) -> int:
        return self.lo + len(self.c) - 1

    def is_zero(self) -> bool:
        return self.c.size == 0

    def coeff(self, k: int) -> complex:
        j = k - self.lo
        if 0 <= j < len(self.c):
            return complex(self.c[j])
        return 0j

    def norm(self) -> float:
        """Largest coefficient magnitude."""
        return float(np.max(np.abs(self.c))) if self.c.size else 0.0

    def exponents(self) -> list[int]:
        return sorted(self.coeffs)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if self.is_zero():
            return np.zeros_like(z)
        k = np.arange(self.lo, self.hi + 1)
        out = np.tensordot(z[..., None] ** k, self.c, axes=([-1], [0]))
        return out[()] if out.ndim == 0 else out

    def at_x(self, x):
        """Evaluate at z = exp(i arccos x)."""
        return self(np.exp(1j * np.arccos(np.asarray(x, dtype=float))))

    # arithmetic ------------------------------------------------------------
    def _result_type(self, other):
        if isinstance(self, SymLaurent) and (isinstance(other, SymLaurent) or isinstance(other, Number)):
            return SymLaurent
        return Laurent

    def __add__(self, other):
        if isinstance(other, Number):
            other = self.__class__.constant(other)
        if not isinstance(other, Laurent):
            return NotImplemented
        if self.is_zero():
            return other._result_type(self)._raw(other.lo, other.c)
        if other.is_zero():
            return self._result_type(other)._raw(self.lo, self.c)
        lo = min(self.lo, other.lo)
        hi = max(self.hi, other.hi)
        c = np.zeros(hi - lo + 1, dtype=complex)
        c[self.lo - lo:self.hi - lo + 1] += self.c
        c[other.lo - lo:other.hi - lo + 1] += other.c
        return self._result_type(other)._raw(lo, c)

    __radd__ = __add__

    def __neg__(self):
        return type(self)._raw(self.lo, -self.c)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Number):
            return type(self)._raw(self.lo, self.c * other)
        if not isinstance(other, Laurent):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return self._result_type(other)._raw(0, np.zeros(0))
        return self._result_type(other)._raw(self.lo + other.lo, np.convolve(self.c, other.c))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Number):
            return type(self)._raw(self.lo, self.c / other)
        return NotImplemented

    def __repr__(self) -> str:
        terms = " + ".join(f"({v:.6g})z^{k}" for k, v in sorted(self.coeffs.items()))
        return f"{type(self).__name__}({terms or '0'})"

    def close_to(self, other: "Laurent", tol: float) -> bool:
        return (self - other).norm() <= tol

    def mul_z_power(self, k: int) -> "Laurent":
        return Laurent._raw(self.lo + k, self.c)

    def reflect(self) -> "Laurent":
        """f(1/z)."""
        return Laurent._raw(-self.hi, self.c[::-1])

    def symmetric_defect(self) -> float:
        """max |c_k - c_-k| relative to the largest coefficient."""
        n = self.norm()
        if n == 0:
            return 0.0
        return (self - self.reflect()).norm() / n


class SymLaurent(Laurent):
    """Laurent polynomial invariant under z -> 1/z, i.e. a polynomial in x."""

    __slots__ = ()

    def __init__(self, coeffs: Mapping[int, complex] | None = None, *,
                 lo: int = 0, array=None, tol: float = SYMMETRY_TOL):
        super().__init__(coeffs, lo=lo, array=array)
        _check_symmetric(self, tol)

    @classmethod
    def from_laurent(cls, f: Laurent, tol: float = SYMMETRY_TOL) -> "SymLaurent":
        """Check the symmetry of ``f`` and return its symmetrised copy."""
        _check_symmetric(f, tol)
        half = (Laurent._raw(f.lo, f.c) + f.reflect()) * 0.5
        return cls._raw(half.lo, half.c)

    @property
    def degree(self) -> int:
        return self.hi if not self.is_zero() else -1

    def __call__(self, z):
        return super().__call__(z)

    def eval_x(self, x):
        """Real-axis evaluation via cos(k theta); keeps imaginary rounding out."""
        x = np.asarray(x, dtype=float)
        if self.is_zero():
            return np.zeros_like(x, dtype=complex)
        theta = np.arccos(x)
        k = np.arange(0, self.degree + 1)
        ck = np.array([self.coeff(j) for j in k])
        w = np.where(k == 0, 1.0, 2.0)
        out = np.tensordot(np.cos(theta[..., None] * k), ck * w, axes=([-1], [0]))
        return out[()] if out.ndim == 0 else out


def _check_symmetric(f: Laurent, tol: float) -> None:
    d = f.symmetric_defect()
    if d > tol:
        raise SymmetryError(f"coefficients are not symmetric under z -> 1/z (defect {d:.3g})")


def z_plus_zinv() -> SymLaurent:
    """2x."""
    return SymLaurent({1: 1.0, -1: 1.0})


@dataclass(frozen=True)
class BasisFunction:
    """``poly(z) * t**tdeg``."""

    poly: SymLaurent
    tdeg: int

    def __post_init__(self):
        if self.tdeg < 0:
            raise ValueError(f"t-degree must be nonnegative, got {self.tdeg}")
        if not isinstance(self.poly, SymLaurent):
            object.__setattr__(self, "poly", SymLaurent.from_laurent(self.poly))

    def _check(self, other: "BasisFunction"):
        if self.tdeg != other.tdeg and not (self.poly.is_zero() or other.poly.is_zero()):
            raise ValueError(f"cannot add t^{self.tdeg} and t^{other.tdeg} terms")

    def __add__(self, other: "BasisFunction") -> "BasisFunction":
        self._check(other)
        tdeg = other.tdeg if self.poly.is_zero() else self.tdeg
        return BasisFunction(self.poly + other.poly, tdeg)

    def __sub__(self, other: "BasisFunction") -> "BasisFunction":
        return self + other * -1.0

    def __mul__(self, s) -> "BasisFunction":
        return BasisFunction(self.poly * s, self.tdeg)

    __rmul__ = __mul__

    def norm(self) -> float:
        return self.poly.norm()


# ---------------------------------------------------------------------------
# operations


def shift_z(f: Laurent, half_steps: int, q: float) -> Laurent:
    """Apply T_z^(half_steps/2): the z**k coefficient is scaled by q**(k*half_steps/2)."""
    if f.is_zero() or half_steps == 0:
        return type(f)._raw(f.lo, f.c)
    k = np.arange(f.lo, f.hi + 1)
    scale = q ** (k * (half_steps / 2.0))
    return Laurent._raw(f.lo, f.c * scale)


def divide_by_z_minus_zinv(f: Laurent, tol: float, scale: float | None = None) -> Laurent:
    """Exact quotient f / (z - 1/z).

    The quotient is built from the top exponent down; a remainder above
    ``tol * max(f.norm(), scale)`` raises :class:`NotDivisibleError`.  Pass
    ``scale`` when ``f`` is itself a difference of much larger terms.
    """
    if f.is_zero():
        return Laurent()
    lo, hi = f.lo, f.hi
    if hi - lo < 2:
        raise NotDivisibleError(1.0 if scale is None else f.norm() / max(scale, f.norm()))
    # g has support lo+1 .. hi-1 and g_j = f_{j+1} + g_{j+2}
    n = hi - lo - 1
    g = np.zeros(n, dtype=complex)
    fc = f.c
    for j in range(n - 1, -1, -1):
        # g index j <-> exponent lo + 1 + j
        g[j] = fc[j + 2] + (g[j + 2] if j + 2 < n else 0.0)
    quotient = Laurent._raw(lo + 1, g)
    rem = f - quotient * Laurent({1: 1.0, -1: -1.0})
    scale = max(f.norm(), scale or 0.0)
    rel = rem.norm() / scale if scale else 0.0
    if rel > tol:
        raise NotDivisibleError(rel)
    return quotient


def to_x_poly(f: SymLaurent) -> np.ndarray:
    """Power coefficients p_j with f = sum p_j x**j."""
    if not isinstance(f, SymLaurent):
        _check_symmetric(f, SYMMETRY_TOL)
    if f.is_zero():
        return np.zeros(1, dtype=complex)
    d = f.hi
    cheb = np.array([f.coeff(0)] + [2 * f.coeff(k) for k in range(1, d + 1)])
    return _cheb.cheb2poly(cheb)


def from_x_poly(p) -> SymLaurent:
    """Inverse of :func:`to_x_poly`."""
    p = np.atleast_1d(np.asarray(p, dtype=complex))
    cheb = _cheb.poly2cheb(p)
    d = len(cheb) - 1
    c = np.zeros(2 * d + 1, dtype=complex)
    c[d] = cheb[0]
    for k in range(1, d + 1):
        c[d + k] = c[d - k] = cheb[k] / 2
    return SymLaurent._raw(-d, c)


def expand_in_Q_basis(g: BasisFunction, ctx) -> dict[tuple[int, int], complex]:
    """Coefficients c_l with ``g = sum_l c_l Q_m^l`` at fixed m = g.tdeg.

    Uses triangular elimination on the top z-exponent, so it does not rely on
    any orthogonality or on the displayed action formulas it is used to check.
    """
    from .qpoly import q_basis, q_basis_leading

    m = g.tdeg
    rest = Laurent._raw(g.poly.lo, g.poly.c)
    scale = max(rest.norm(), 1e-300)
    out: dict[tuple[int, int], complex] = {}
    if rest.is_zero():
        return out
    d = rest.hi
    for n in range(d, -1, -1):
        top = rest.coeff(n)
        if top == 0:
            continue
        lead = q_basis_leading(m + n, m, ctx)
        if lead == 0 or not np.isfinite(lead) or abs(lead) < 1e-300:
            raise LaurentError(f"leading coefficient of Q_{m}^{m + n} underflows")
        c = top / lead
        out[(m + n, m)] = c
        rest = rest - q_basis(m + n, m, ctx).poly * c
    rel = rest.norm() / scale
    if rel > ctx.tol_exact:
        raise LaurentError(f"basis expansion left a residual of {rel:.3g} (relative)")
    return out


def reconstruct(coeffs: Mapping[tuple[int, int], complex], ctx) -> BasisFunction:
    """Inverse of :func:`expand_in_Q_basis`."""
    from .qpoly import q_basis

    ms = {m for _, m in coeffs}
    if len(ms) > 1:
        raise ValueError("coefficients span several t-degrees")
    m = ms.pop() if ms else 0
    acc = SymLaurent()
    for (ell, mm), c in coeffs.items():
        acc = acc + q_basis(ell, mm, ctx).poly * c
    return BasisFunction(acc, m)
