"""Coefficient-level algebra for truncated inner analytic functions.

A truncated inner analytic function is stored as its Taylor coefficients
``c[0..K]``; the paired real description is the Fourier triple
``(alpha0, alpha[1..K], beta[1..K])`` with ``c0 = alpha0/2`` and
``c_k = alpha_k - i beta_k``.  Angular differentiation ``i z d/dz`` acts
diagonally as ``c_k -> (i k)^n c_k``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ValidationError

__all__ = [
    "TaylorCoefficients",
    "FourierCoefficients",
    "GrowthReport",
    "fourier_to_taylor",
    "taylor_to_fourier",
    "angular_derivative_coeffs",
    "angular_primitive_coeffs",
    "growth_order",
]

# tolerance on Im(c0) when mapping back to a real Fourier triple
IMAG_C0_TOL = 1e-12
GEOMETRIC_THRESHOLD = 1e-3
MIN_GROWTH_ORDER = 32


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class TaylorCoefficients:
    """Complex Taylor coefficients ``c_0..c_K`` of ``w(z) = sum c_k z^k``."""

    c: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c)
        if c.ndim != 1 or c.size < 2:
            raise ValidationError("need a 1-d coefficient array with K >= 1")
        if not np.all(np.isfinite(c)):
            raise ValidationError("Taylor coefficients must be finite")
        object.__setattr__(self, "c", _frozen(c, complex))

    @property
    def K(self) -> int:
        return self.c.size - 1

    @property
    def proper(self) -> bool:
        return self.c[0] == 0

    @classmethod
    def zeros(cls, K: int) -> "TaylorCoefficients":
        return cls(np.zeros(K + 1, dtype=complex))

    def with_c0(self, c0) -> "TaylorCoefficients":
        c = self.c.copy()
        c[0] = c0
        return TaylorCoefficients(c)

    def proper_part(self) -> "TaylorCoefficients":
        return self.with_c0(0.0)

    def _check_same_order(self, other):
        if not isinstance(other, TaylorCoefficients):
            return NotImplemented
        if other.K != self.K:
            raise ValidationError(f"truncation mismatch: K={self.K} vs K={other.K}")
        return None

    def __add__(self, other):
        bad = self._check_same_order(other)
        if bad is NotImplemented:
            return bad
        return TaylorCoefficients(self.c + other.c)

    def __sub__(self, other):
        bad = self._check_same_order(other)
        if bad is NotImplemented:
            return bad
        return TaylorCoefficients(self.c - other.c)

    def __neg__(self):
        return TaylorCoefficients(-self.c)

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        return TaylorCoefficients(self.c * scalar)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, TaylorCoefficients):
            return NotImplemented
        return self.K == other.K and bool(np.array_equal(self.c, other.c))

    def __repr__(self):
        return f"TaylorCoefficients(K={self.K}, c0={self.c[0]!r})"


@dataclass(frozen=True, eq=False)
class FourierCoefficients:
    """Real Fourier data ``alpha0, alpha_k, beta_k`` for ``k = 1..K``.

    ``alpha0_determinate`` is False when ``alpha0`` was lost to angular
    operations and only carries a placeholder zero.
    """

    alpha0: float
    alpha: np.ndarray
    beta: np.ndarray
    alpha0_determinate: bool = True

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=float)
        beta = np.asarray(self.beta, dtype=float)
        if alpha.ndim != 1 or alpha.shape != beta.shape or alpha.size < 1:
            raise ValidationError("alpha and beta must be 1-d arrays of equal length K >= 1")
        if not (np.isfinite(self.alpha0) and np.all(np.isfinite(alpha)) and np.all(np.isfinite(beta))):
            raise ValidationError("Fourier coefficients must be finite")
        object.__setattr__(self, "alpha0", float(self.alpha0))
        object.__setattr__(self, "alpha", _frozen(alpha, float))
        object.__setattr__(self, "beta", _frozen(beta, float))

    @property
    def K(self) -> int:
        return self.alpha.size

    @classmethod
    def from_arrays(cls, alpha0, alpha, beta):
        return cls(alpha0, alpha, beta)

    def __eq__(self, other):
        if not isinstance(other, FourierCoefficients):
            return NotImplemented
        return (
            self.alpha0 == other.alpha0
            and np.array_equal(self.alpha, other.alpha)
            and np.array_equal(self.beta, other.beta)
        )

    def __repr__(self):
        return f"FourierCoefficients(K={self.K}, alpha0={self.alpha0!r})"


@dataclass(frozen=True)
class GrowthReport:
    """Power-law exponent estimate and exponential-boundedness verdict."""

    n_hat: float
    exp_bounded: str  # "yes" | "no" | "inconclusive"
    fit_residual: float
    geometric_factor: float = 1.0
    zero_tail: bool = False
    fitted_indices: tuple = field(default=(), repr=False)


def fourier_to_taylor(fc: FourierCoefficients) -> TaylorCoefficients:
    c = np.empty(fc.K + 1, dtype=complex)
    c[0] = fc.alpha0 / 2
    c.real[1:] = fc.alpha
    c.imag[1:] = -fc.beta
    return TaylorCoefficients(c)


def taylor_to_fourier(tc: TaylorCoefficients) -> FourierCoefficients:
    c0 = tc.c[0]
    if abs(c0.imag) > IMAG_C0_TOL * max(1.0, abs(c0.real)):
        raise ValidationError(f"Im(c0) = {c0.imag!r}: no real Fourier counterpart")
    return FourierCoefficients(2 * c0.real, tc.c.real[1:].copy(), -tc.c.imag[1:])


@lru_cache(maxsize=64)
def _kpow(K: int, n: int) -> np.ndarray:
    # k**n in exact integer arithmetic, rounded once to float
    out = np.array([float(k**n) for k in range(K + 1)])
    out.setflags(write=False)
    return out


def _rotate(re, im, quarter_turns):
    """Multiply ``re + i im`` by ``i**quarter_turns`` using exact component swaps."""
    q = quarter_turns % 4
    out = np.empty(re.shape, dtype=complex)
    if q == 0:
        out.real, out.imag = re, im
    elif q == 1:
        out.real, out.imag = -im, re
    elif q == 2:
        out.real, out.imag = -re, -im
    else:
        out.real, out.imag = im, -re
    return out


def angular_derivative_coeffs(tc: TaylorCoefficients, n: int) -> TaylorCoefficients:
    """Coefficients of the n-th angular derivative: ``c_k -> i^n k^n c_k``."""
    n = int(n)
    if n < 0:
        raise ValidationError("n must be non-negative")
    if n == 0:
        return tc
    kp = _kpow(tc.K, n)
    out = _rotate(tc.c.real * kp, tc.c.imag * kp, n)
    out[0] = 0.0
    return TaylorCoefficients(out)


def angular_primitive_coeffs(tc: TaylorCoefficients, n: int) -> TaylorCoefficients:
    """Coefficients of the n-th angular primitive: ``c_k -> c_k / (i k)^n``, ``c_0 -> 0``.

    The constant term is dropped even for ``n = 0`` so that the result is
    always proper.
    """
    n = int(n)
    if n < 0:
        raise ValidationError("n must be non-negative")
    if n == 0:
        return tc.proper_part()
    kp = _kpow(tc.K, n)[1:]
    re = np.zeros(tc.K + 1)
    im = np.zeros(tc.K + 1)
    re[1:] = tc.c.real[1:] / kp
    im[1:] = tc.c.imag[1:] / kp
    out = _rotate(re, im, -n)
    out[0] = 0.0
    return TaylorCoefficients(out)


def growth_order(tc: TaylorCoefficients) -> GrowthReport:
    """Estimate the power-law growth of ``|c_k|`` and judge exponential boundedness.

    Both ``log|c_k| ~ n log k`` and ``log|c_k| ~ k log q`` are fitted over the
    upper half of the nonzero indices; the sequence is declared not
    exponentially bounded only when the geometric model fits better and
    ``q > 1 + 1e-3``.
    """
    if tc.K < MIN_GROWTH_ORDER:
        raise ValidationError(f"growth_order needs K >= {MIN_GROWTH_ORDER}, got {tc.K}")
    mag = np.abs(tc.c[1:])
    k = np.arange(1, tc.K + 1, dtype=float)
    nz = np.flatnonzero(mag > 0)
    if nz.size == 0:
        return GrowthReport(0.0, "yes", 0.0, zero_tail=True)
    idx = nz[nz.size // 2:]
    if idx.size < 4:
        return GrowthReport(0.0, "inconclusive", float("nan"), fitted_indices=tuple(idx + 1))
    y = np.log(mag[idx])
    lk = np.log(k[idx])
    p_pow, r_pow = _linfit(lk, y)
    p_geo, r_geo = _linfit(k[idx], y)
    factor = float(np.exp(p_geo[0]))
    if factor > 1 + GEOMETRIC_THRESHOLD and r_geo < r_pow:
        verdict, resid = "no", r_geo
    else:
        verdict, resid = "yes", r_pow
    return GrowthReport(
        n_hat=float(p_pow[0]),
        exp_bounded=verdict,
        fit_residual=float(resid),
        geometric_factor=factor,
        fitted_indices=tuple(int(i) + 1 for i in idx),
    )


def _linfit(x, y):
    A = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    return coef, float(np.sqrt(np.mean(resid**2)))
