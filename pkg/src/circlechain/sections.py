"""Sectionally defined real functions on the circle and their primitives.

A :class:`SectionedFunction` is defined on the open arcs between its
singular points; arc ``i`` runs from point ``i`` to point ``i+1`` (cyclically)
and is named after its left endpoint.  :func:`sectional_integrate` builds
iterated primitives on every arc, measured from the arc midpoint, and
:func:`fourier_numeric` integrates any level against ``cos k theta`` and
``sin k theta``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import legendre
from numpy.polynomial import polynomial as P

from ._panels import TWO_PI, HalfSection, wrap
from .coeffs import FourierCoefficients
from .errors import NotIntegrableError, ValidationError

__all__ = [
    "QuadratureConfig",
    "SectionedFunction",
    "PiecewisePrimitive",
    "PiecewisePolynomial",
    "JumpRecord",
    "sectional_integrate",
    "fourier_numeric",
    "pp_differentiate",
]


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and panel parameters for sectional quadrature.

    ``eps`` is the distance from a singular endpoint below which panels
    stop and the endpoint model takes over.  ``order`` is the Chebyshev
    degree per panel; ``max_subdivisions`` bounds adaptive bisections per
    section half.
    """

    abs_tol: float = 1e-13
    rel_tol: float = 1e-13
    eps: float = 1e-8
    max_subdivisions: int = 2000
    order: int = 24
    gauss_order: int = 32
    workers: int = 1

    def __post_init__(self):
        if not (self.eps > 0 and self.abs_tol > 0 and self.rel_tol > 0):
            raise ValidationError("eps and tolerances must be positive")
        if self.order < 4 or self.gauss_order < 2 or self.max_subdivisions < 0:
            raise ValidationError("invalid panel parameters")


def _as_array_func(f):
    def g(theta):
        theta = np.asarray(theta, dtype=float)
        out = np.asarray(f(theta), dtype=float)
        if out.shape != theta.shape:
            out = np.broadcast_to(out, theta.shape).astype(float)
        return out

    return g


@dataclass(frozen=True, eq=False)
class SectionedFunction:
    """Real function given by one evaluator per open arc between singular points.

    Evaluators receive angles in ``(-pi, pi]`` as numpy arrays.  With no
    singular points a single evaluator covers the whole circle.
    ``declared`` optionally carries a per-point expected classification.
    """

    singular_points: tuple
    evaluators: tuple
    name: str = ""
    declared: tuple = ()

    def __post_init__(self):
        pts = np.atleast_1d(np.asarray(self.singular_points, dtype=float))
        evs = tuple(self.evaluators)
        if not np.all(np.isfinite(pts)):
            raise ValidationError("singular points must be finite")
        pts = np.atleast_1d(wrap(pts))
        if len(evs) != max(len(pts), 1):
            raise ValidationError(f"{len(pts)} singular points need {max(len(pts), 1)} evaluators, got {len(evs)}")
        order = np.argsort(pts, kind="stable")
        pts = pts[order]
        if len(pts) > 1:
            evs = tuple(evs[i] for i in order)
            gaps = np.diff(np.append(pts, pts[0] + TWO_PI))
            if np.any(gaps <= 0):
                raise ValidationError("singular points must be pairwise distinct")
        decl = tuple(self.declared)
        if decl and len(decl) != len(pts):
            raise ValidationError("declared classifications must match the singular points")
        if decl and len(pts) > 1:
            decl = tuple(decl[i] for i in order)
        object.__setattr__(self, "singular_points", tuple(float(p) for p in pts))
        object.__setattr__(self, "evaluators", tuple(_as_array_func(e) for e in evs))
        object.__setattr__(self, "declared", decl)

    @classmethod
    def uniform(cls, func: Callable, points: Sequence[float], name: str = "", declared=()):
        """Same evaluator on every arc."""
        pts = list(points)
        return cls(tuple(pts), (func,) * max(len(pts), 1), name, declared)

    @property
    def N(self) -> int:
        return len(self.singular_points)

    def arcs(self):
        """``(left_endpoint, length)`` for every arc; a virtual cut at ``pi`` when ``N = 0``."""
        if self.N == 0:
            return [(math.pi, TWO_PI)]
        pts = self.singular_points
        out = []
        for i, a in enumerate(pts):
            b = pts[i + 1] if i + 1 < len(pts) else pts[0] + TWO_PI
            out.append((a, b - a))
        return out

    def section_index(self, theta):
        """Arc index per angle, ``-1`` exactly at singular points."""
        theta = np.asarray(theta, dtype=float)
        if self.N == 0:
            return np.zeros(theta.shape, dtype=int)
        rel = np.asarray(self.singular_points) - self.singular_points[0]
        x = np.mod(theta - self.singular_points[0], TWO_PI)
        idx = np.searchsorted(rel, x, side="right") - 1
        return np.where(x == rel[idx], -1, idx)

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        scalar = theta.ndim == 0
        th = np.atleast_1d(wrap(theta))
        idx = self.section_index(th)
        out = np.full(th.shape, np.nan)
        for i in np.unique(idx):
            if i < 0:
                continue
            m = idx == i
            out[m] = self.evaluators[i](th[m])
        return float(out[0]) if scalar else out

    def scaled(self, a: float) -> "SectionedFunction":
        return SectionedFunction(
            self.singular_points,
            tuple((lambda t, e=e: a * e(t)) for e in self.evaluators),
            self.name,
            self.declared,
        )

    def shifted(self, c: float) -> "SectionedFunction":
        return SectionedFunction(
            self.singular_points,
            tuple((lambda t, e=e: e(t) + c) for e in self.evaluators),
            self.name,
            self.declared,
        )


class PiecewisePrimitive:
    """Iterated sectional primitives of a :class:`SectionedFunction`.

    Holds every level from 0 (the base itself) up to ``level``.  Level ``m``
    on arc ``i`` is the ``m``-fold integral from the arc midpoint plus the
    ``(n - m)``-th derivative of the optional added polynomial, written in
    powers of ``theta - midpoint``.
    """

    def __init__(self, base: SectionedFunction, level: int, qc: QuadratureConfig, added=None):
        if level < 0:
            raise ValidationError("level must be non-negative")
        self.base = base
        self.level = int(level)
        self.qc = qc
        nsec = max(base.N, 1)
        if added is None:
            added = [np.zeros(1)] * nsec
        added = [np.atleast_1d(np.asarray(a, dtype=float)) for a in added]
        if len(added) != nsec:
            raise ValidationError(f"need one added polynomial per section ({nsec})")
        if level == 0 and any(np.any(a != 0) for a in added):
            raise ValidationError("added polynomials need level >= 1")
        if level >= 1 and any(len(np.trim_zeros(a, "b")) > level for a in added):
            raise ValidationError(f"added polynomials must have degree <= {level - 1}")
        self.added = tuple(added)
        self.arcs = base.arcs()
        self.reference_points = tuple(float(wrap(a + L / 2)) for a, L in self.arcs)
        self.halves = []
        for i, (a, L) in enumerate(self.arcs):
            H = L / 2
            left = HalfSection(i, float(wrap(a)), +1, H, qc.eps)
            right = HalfSection(i, float(wrap(a + L)), -1, H, qc.eps)
            self.halves.append((left, right))
        self._build()

    def _build(self):
        qc = self.qc
        jobs = []
        for i, pair in enumerate(self.halves):
            f = self.base.evaluators[i]
            for h in pair:
                jobs.append((h, f))

        def run(job):
            h, f = job
            h.fit_base(f, qc.order, qc.rel_tol, qc.abs_tol, qc.max_subdivisions)
            for _ in range(self.level):
                h.integrate_level()

        if qc.workers > 1 and len(jobs) > 1:
            with ThreadPoolExecutor(max_workers=qc.workers) as ex:
                list(ex.map(run, jobs))
        else:
            for job in jobs:
                run(job)

    # -- evaluation -----------------------------------------------------
    def _added_term(self, section, offset, level):
        a = self.added[section]
        k = self.level - level
        if k < 0:
            raise ValidationError("level above the primitive's top level")
        if not np.any(a):
            return 0.0
        return P.polyval(offset, P.polyder(a, k)) if k < len(a) else 0.0

    def _check_level(self, level):
        level = self.level if level is None else int(level)
        if not 0 <= level <= self.level:
            raise ValidationError(f"level {level} outside 0..{self.level}")
        return level

    def half_eval(self, half: HalfSection, d, level=None):
        level = self._check_level(level)
        d = np.asarray(d, dtype=float)
        return half.eval(d, level) + self._added_term(half.section, half.offset(d), level)

    def lateral(self, point: int, side: int, d, level=None):
        """Values at distance ``d`` to the right (``side=+1``) or left (``-1``) of singular point ``point``."""
        if self.base.N == 0:
            raise ValidationError("no singular points")
        n = self.base.N
        if side > 0:
            half = self.halves[point % n][0]
        else:
            half = self.halves[(point - 1) % n][1]
        return self.half_eval(half, d, level)

    def section_eval(self, section: int, theta, level=None):
        """Evaluate on arc ``section`` at angles assumed to lie inside it."""
        theta = np.asarray(theta, dtype=float)
        left, right = self.halves[section]
        dl = np.mod(theta - left.anchor, TWO_PI)
        dr = np.mod(right.anchor - theta, TWO_PI)
        use_left = dl <= dr
        out = np.empty(theta.shape)
        if np.any(use_left):
            out[use_left] = self.half_eval(left, dl[use_left], level)
        if np.any(~use_left):
            out[~use_left] = self.half_eval(right, dr[~use_left], level)
        return out

    def __call__(self, theta, level=None):
        theta = np.asarray(theta, dtype=float)
        scalar = theta.ndim == 0
        th = np.atleast_1d(wrap(theta))
        idx = self.base.section_index(th)
        out = np.full(th.shape, np.nan)
        for i in np.unique(idx):
            if i < 0:
                continue
            m = idx == i
            out[m] = self.section_eval(int(i), th[m], level)
        return float(out[0]) if scalar else out

    def as_sectioned(self, level=None) -> SectionedFunction:
        level = self._check_level(level)
        evs = tuple((lambda t, i=i: self.section_eval(i, t, level)) for i in range(len(self.halves)))
        name = f"{self.base.name}^(-{level})" if self.base.name else ""
        return SectionedFunction(self.base.singular_points, evs, name)

    def endpoint_models(self, level=None):
        level = self._check_level(level)
        return [(h.section, h.sign, h.models[level]) for pair in self.halves for h in pair]


def sectional_integrate(sf: SectionedFunction, n: int, qc: QuadratureConfig | None = None, added=None) -> PiecewisePrimitive:
    """``n``-fold sectional primitive of ``sf``, measured from the arc midpoints.

    ``added`` optionally injects one polynomial of degree below ``n`` per
    arc, in ascending powers of ``theta - midpoint``.
    """
    if int(n) < 1:
        raise ValidationError("n must be a positive integer")
    return PiecewisePrimitive(sf, int(n), qc or QuadratureConfig(), added)


def _level_rep(target, level, qc):
    if isinstance(target, PiecewisePrimitive):
        return target, target._check_level(level)
    if isinstance(target, SectionedFunction):
        if level not in (None, 0):
            raise ValidationError("a SectionedFunction only has level 0")
        return PiecewisePrimitive(target, 0, qc or QuadratureConfig()), 0
    raise ValidationError("fourier_numeric needs a SectionedFunction or PiecewisePrimitive")


def fourier_numeric(target, K: int, qc: QuadratureConfig | None = None, level=None, return_accuracy=False):
    """Fourier coefficients ``alpha0, alpha_k, beta_k`` (``k <= K``) of an integrable sectioned function.

    The endpoint pieces below ``eps`` are integrated through the fitted
    endpoint models; a model with local exponent at or below ``-0.95`` that
    is not logarithmic raises :class:`NotIntegrableError`.
    """
    if K < 1:
        raise ValidationError("K must be at least 1")
    qc = qc or (target.qc if isinstance(target, PiecewisePrimitive) else QuadratureConfig())
    pp, level = _level_rep(target, level, qc)
    gl_x, gl_w = legendre.leggauss(qc.gauss_order)
    thetas, masses = [], []
    endpoint_total = 0.0
    scale = 0.0
    for pair in pp.halves:
        for h in pair:
            model = h.models[level]
            if not model.integrable:
                raise NotIntegrableError(
                    f"section {h.section}: local exponent {model.p:.3f} near its "
                    f"{'left' if h.sign > 0 else 'right'} endpoint is not integrable"
                )
            d, th, w, v = h.fourier_nodes(level, K, gl_x, gl_w)
            v = v + pp._added_term(h.section, h.offset(d), level)
            scale = max(scale, float(np.max(np.abs(v))))
            thetas.append(th)
            masses.append(w * v)
            poly_mid = pp._added_term(h.section, h.offset(np.array([0.5 * h.eps])), level)
            end = model.integral(h.eps) + h.eps * float(np.atleast_1d(poly_mid)[0])
            endpoint_total += abs(end)
            thetas.append(np.array([float(h.theta(0.0))]))
            masses.append(np.array([end]))
    theta = np.concatenate(thetas)
    mass = np.concatenate(masses)
    c = _fourier_sums(theta, mass, K) / math.pi
    fc = FourierCoefficients(c[0].real, c.real[1:], -c.imag[1:])
    if return_accuracy:
        acc = max(qc.abs_tol, qc.rel_tol * scale) + 1e-3 * endpoint_total / math.pi
        return fc, acc
    return fc


def _fourier_sums(theta, mass, K, chunk=4096):
    """``sum_j mass_j exp(-i k theta_j)`` for ``k = 0..K``."""
    k = np.arange(K + 1)
    out = np.zeros(K + 1, dtype=complex)
    for s in range(0, theta.size, chunk):
        E = np.exp(-1j * np.outer(k, theta[s:s + chunk]))
        out += E @ mass[s:s + chunk]
    return out


@dataclass(frozen=True)
class JumpRecord:
    """Jump ``right limit - left limit`` at a singular point."""

    location: float
    jump: float


@dataclass(frozen=True, eq=False)
class PiecewisePolynomial:
    """Polynomial on each arc, in ascending powers of ``theta - left endpoint``."""

    singular_points: tuple
    coeffs: tuple = field(default=())

    def __post_init__(self):
        pts = np.atleast_1d(wrap(np.asarray(self.singular_points, dtype=float)))
        cs = [np.atleast_1d(np.asarray(c, dtype=float)) for c in self.coeffs]
        if len(cs) != max(len(pts), 1):
            raise ValidationError("need one polynomial per section")
        order = np.argsort(pts, kind="stable")
        pts = pts[order]
        if len(pts) > 1:
            cs = [cs[i] for i in order]
            if np.any(np.diff(np.append(pts, pts[0] + TWO_PI)) <= 0):
                raise ValidationError("singular points must be pairwise distinct")
        if len(pts) == 0 and len(np.trim_zeros(cs[0], "b")) > 1:
            raise ValidationError("a non-constant polynomial needs at least one singular point")
        for c in cs:
            if c.size == 0 or not np.all(np.isfinite(c)):
                raise ValidationError("polynomial coefficients must be finite and non-empty")
            c.setflags(write=False)
        object.__setattr__(self, "singular_points", tuple(float(p) for p in pts))
        object.__setattr__(self, "coeffs", tuple(cs))

    @property
    def orders(self):
        return tuple(max(len(np.trim_zeros(c, "b")) - 1, 0) for c in self.coeffs)

    @property
    def order(self) -> int:
        return max(self.orders)

    @property
    def nonzero(self) -> bool:
        return any(np.any(c != 0) for c in self.coeffs)

    def lengths(self):
        pts = self.singular_points
        if not pts:
            return [TWO_PI]
        return [(pts[i + 1] if i + 1 < len(pts) else pts[0] + TWO_PI) - pts[i] for i in range(len(pts))]

    def to_sectioned(self, name: str = "") -> SectionedFunction:
        pts = self.singular_points
        left = pts if pts else (math.pi,)
        evs = tuple(
            (lambda t, a=a, c=c: P.polyval(np.mod(t - a, TWO_PI), c)) for a, c in zip(left, self.coeffs)
        )
        return SectionedFunction(pts, evs, name)

    def __call__(self, theta):
        return self.to_sectioned()(theta)


def pp_differentiate(pp: PiecewisePolynomial):
    """Term-by-term derivative plus the jump records it leaves behind.

    The jump at point ``i`` is ``P_i(0) - P_{i-1}(L_{i-1})``, evaluated
    exactly on the polynomials; jumps at roundoff level are dropped.
    """
    derivs = []
    for c in pp.coeffs:
        d = P.polyder(c)
        derivs.append(d if d.size else np.zeros(1))
    jumps = []
    n = len(pp.singular_points)
    L = pp.lengths()
    for i in range(n):
        right = float(P.polyval(0.0, pp.coeffs[i]))
        prev = (i - 1) % n
        left = float(P.polyval(L[prev], pp.coeffs[prev]))
        J = right - left
        scale = 1.0 + abs(right) + abs(left) + float(np.sum(np.abs(pp.coeffs[prev])))
        if abs(J) > 1e-12 * scale:
            jumps.append(JumpRecord(pp.singular_points[i], J))
    return PiecewisePolynomial(pp.singular_points, tuple(derivs)), jumps
