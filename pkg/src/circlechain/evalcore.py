"""Evaluation on the open unit disk and recovery of boundary values.

``eval_inner`` sums the power series by Horner's rule in fixed descending
order; ``regulated_sum`` sums the damped trigonometric series directly, so
the two give independent routes to the same real part.

Boundary values are obtained from a ladder of regulators.  With the
``"abel"`` kernel each level is the Abel mean at ``rho_j = 1 - eta0 2^-j``
and the levels are Richardson-extrapolated in ``1 - rho``.  That needs
``rho_max^K`` to be negligible, which a few hundred coefficients cannot
provide near a singularity, so long truncated series use the ``"flat"``
kernel instead: level ``j`` weights coefficient ``k`` by
``exp(-36 (k h_j)^6)`` with ``h_j = 1 - rho_j``.  That weight is flat to
sixth order at ``k = 0``, so the bias decays faster than any power of
``h_j``, and the finest level is placed so that the weight has vanished by
``k = K``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .coeffs import FourierCoefficients, TaylorCoefficients
from .errors import DomainError, ValidationError

__all__ = [
    "normalize_angle",
    "DiskPoint",
    "RhoLadder",
    "BoundaryLimit",
    "eval_inner",
    "eval_inner_many",
    "regulated_sum",
    "limit_to_circle",
    "boundary_values",
]

FLAT_STEEPNESS = 36.0
FLAT_POWER = 6
# ratio of successive level differences at or above which a ladder is divergent
DIVERGENCE_RATIO = 0.75
MIN_FLAT_ORDER = 32


def normalize_angle(theta):
    """Map angles to ``(-pi, pi]``; scalars stay scalars."""
    t = np.remainder(np.asarray(theta, dtype=float) + np.pi, 2 * np.pi) - np.pi
    t = np.where(t <= -np.pi, np.pi, t)
    if t.ndim == 0:
        return float(t)
    return t


@dataclass(frozen=True)
class DiskPoint:
    rho: float
    theta: float

    def __post_init__(self):
        rho = float(self.rho)
        if not (0.0 <= rho < 1.0):
            raise DomainError(f"rho={rho!r} outside [0, 1)")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "theta", normalize_angle(self.theta))

    @property
    def z(self) -> complex:
        return self.rho * complex(math.cos(self.theta), math.sin(self.theta))


@dataclass(frozen=True)
class RhoLadder:
    """Regulator ladder ``rho_j = 1 - eta0 * 2**-j`` for ``j < levels``."""

    eta0: float = 1.0 / 16
    levels: int = 6
    order: int = 3
    kernel: str = "abel"

    def __post_init__(self):
        if self.levels < 2:
            raise ValidationError("a ladder needs at least two levels")
        if not (0.0 < self.eta0 < 1.0):
            raise ValidationError("eta0 must lie in (0, 1)")
        if self.kernel not in ("abel", "flat"):
            raise ValidationError(f"unknown kernel {self.kernel!r}")
        if self.kernel == "abel" and not (0 <= self.order <= self.levels - 1):
            raise ValidationError("Richardson order must be below the number of levels")

    @property
    def gaps(self) -> np.ndarray:
        return self.eta0 * 0.5 ** np.arange(self.levels)

    @property
    def rhos(self) -> np.ndarray:
        return 1.0 - self.gaps

    @classmethod
    def for_order(cls, K: int, levels: int = 6) -> "RhoLadder":
        """Ladder suited to a series truncated at ``K``.

        Short sequences are treated as exact polynomials and get the plain
        Abel ladder; from ``K = 32`` on the flat kernel is used, with the
        finest gap at ``1/(K+1)``.
        """
        if K < MIN_FLAT_ORDER:
            return cls(levels=levels)
        return cls(eta0=2.0 ** (levels - 1) / (K + 1), levels=levels, order=0, kernel="flat")

    def weights(self, K: int) -> np.ndarray:
        """Per-level coefficient weights, shape ``(levels, K+1)``."""
        k = np.arange(K + 1, dtype=float)
        h = self.gaps[:, None]
        if self.kernel == "abel":
            return (1.0 - h) ** k[None, :]
        return np.exp(-FLAT_STEEPNESS * (k[None, :] * h) ** FLAT_POWER)


@dataclass(frozen=True)
class BoundaryLimit:
    """Extrapolated boundary value of ``Re w`` at one angle."""

    value: float
    error: float
    divergent: bool
    theta: float
    level_values: tuple = field(default=(), repr=False)
    truncation: float = 0.0

    def __float__(self):
        if self.divergent:
            raise ValueError(f"no finite boundary limit at theta={self.theta!r}")
        return self.value


def _horner(c, z):
    acc = np.full(np.shape(z), c[-1], dtype=complex)
    for ck in c[-2::-1]:
        acc = acc * z + ck
    return acc


def eval_inner(tc: TaylorCoefficients, pt: DiskPoint) -> complex:
    """``sum_k c_k z^k`` at ``z = rho e^{i theta}`` by Horner's rule."""
    if not isinstance(pt, DiskPoint):
        pt = DiskPoint(*pt)
    return complex(_horner(tc.c, np.asarray(pt.z)))


def eval_inner_many(tc: TaylorCoefficients, rho, theta) -> np.ndarray:
    """Vectorised :func:`eval_inner` over broadcastable ``rho``/``theta`` arrays."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0) or np.any(rho >= 1):
        raise DomainError("rho must lie in [0, 1)")
    theta = np.asarray(theta, dtype=float)
    z = rho * np.exp(1j * theta)
    return _horner(tc.c, z)


def regulated_sum(fc: FourierCoefficients, pt: DiskPoint) -> float:
    """``alpha0/2 + sum_k rho^k (alpha_k cos k theta + beta_k sin k theta)``."""
    if not isinstance(pt, DiskPoint):
        pt = DiskPoint(*pt)
    k = np.arange(1, fc.K + 1, dtype=float)
    rk = np.power(pt.rho, k)
    kt = k * pt.theta
    terms = rk * (fc.alpha * np.cos(kt) + fc.beta * np.sin(kt))
    return fc.alpha0 / 2 + math.fsum(terms)


def _level_values(tc, thetas, ladder):
    """Real parts of the regulated sums, shape ``(len(thetas), levels)``."""
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    if ladder.kernel == "abel":
        out = np.empty((thetas.size, ladder.levels))
        for j, rho in enumerate(ladder.rhos):
            out[:, j] = _horner(tc.c, rho * np.exp(1j * thetas)).real
        return out
    W = ladder.weights(tc.K)  # (L, K+1)
    cw = tc.c[None, :] * W
    k = np.arange(tc.K + 1)
    out = np.empty((thetas.size, ladder.levels))
    for start in range(0, thetas.size, 256):
        E = np.exp(1j * np.outer(thetas[start:start + 256], k))
        out[start:start + 256] = (E @ cw.T).real
    return out


def _richardson(values, order):
    """Richardson table for gaps halving each level; returns (best, previous)."""
    L = len(values)
    T = [list(values)]
    for m in range(1, order + 1):
        prev = T[-1]
        f = 2.0**m - 1.0
        T.append([None] * m + [prev[j] + (prev[j] - prev[j - 1]) / f for j in range(m, L)])
    best = T[order][L - 1]
    if L - 2 >= order:
        other = T[order][L - 2]
    else:
        other = T[order - 1][L - 1]
    return best, other


def _is_divergent(values):
    v = np.asarray(values)
    d = np.abs(np.diff(v))
    if d.size < 3:
        return False
    scale = 1.0 + abs(v[-1])
    if d[-1] <= 1e-8 * scale:
        return False
    r1 = d[-1] / max(d[-2], 1e-300)
    r2 = d[-2] / max(d[-3], 1e-300)
    return r1 >= DIVERGENCE_RATIO and r2 >= DIVERGENCE_RATIO


def _finish(values, theta, ladder, K):
    if ladder.kernel == "abel":
        best, other = _richardson(values, ladder.order)
        trunc = float(ladder.rhos[-1] ** K)
    else:
        best, other = values[-1], values[-2]
        trunc = float(np.exp(-FLAT_STEEPNESS * (K * ladder.gaps[-1]) ** FLAT_POWER))
    divergent = _is_divergent(values)
    return BoundaryLimit(
        value=float("nan") if divergent else float(best),
        error=float("inf") if divergent else float(abs(best - other)),
        divergent=divergent,
        theta=float(theta),
        level_values=tuple(float(x) for x in values),
        truncation=trunc,
    )


def limit_to_circle(tc: TaylorCoefficients, theta: float, ladder: RhoLadder | None = None) -> BoundaryLimit:
    """Boundary value ``lim_{rho->1} Re w(rho e^{i theta})`` with an error estimate.

    A ladder whose level differences stop shrinking is reported as
    divergent (``value`` is NaN); this is how hard singularities, and
    logarithmic ones, show up.
    """
    ladder = ladder or RhoLadder.for_order(tc.K)
    theta = normalize_angle(theta)
    vals = _level_values(tc, [theta], ladder)[0]
    return _finish(vals, theta, ladder, tc.K)


def boundary_values(tc: TaylorCoefficients, thetas, ladder: RhoLadder | None = None):
    """Vectorised :func:`limit_to_circle`; returns ``(values, errors, divergent)`` arrays."""
    ladder = ladder or RhoLadder.for_order(tc.K)
    thetas = normalize_angle(np.atleast_1d(np.asarray(thetas, dtype=float)))
    vals = _level_values(tc, thetas, ladder)
    res = [_finish(row, t, ladder, tc.K) for row, t in zip(vals, thetas)]
    return (
        np.array([r.value for r in res]),
        np.array([r.error for r in res]),
        np.array([r.divergent for r in res]),
    )
