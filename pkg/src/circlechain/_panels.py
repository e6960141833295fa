"""Panel machinery behind sectional integration.

Each section is split at its midpoint into two halves.  A half is
parametrised by the distance ``d`` from the singular endpoint it touches,
which keeps full relative precision for angles very close to that point.
In ``d`` the half is covered by Chebyshev panels: uniform core panels away
from the endpoint and geometrically shrinking panels toward it, stopping at
``eps``.  Below ``eps`` each level is described by a two-parameter endpoint
model (constant, logarithmic or power law).

Level ``s + 1`` is obtained from level ``s`` by exact integration of the
panel polynomials, accumulated outward from the midpoint, so repeated
integration never re-runs quadrature.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev as C

from .errors import NotIntegrableError, QuadratureError

TWO_PI = 2.0 * math.pi
CORE_WIDTH = 0.25
# local exponents at or below this are treated as non-integrable
INTEGRABILITY_EXPONENT = -0.95


def wrap(theta):
    t = np.asarray(theta, dtype=float)
    t = np.where(t > math.pi, t - TWO_PI, t)
    t = np.where(t <= -math.pi, t + TWO_PI, t)
    return t


@dataclass(frozen=True)
class EndpointModel:
    """Behaviour of one level on ``0 < d < eps``: ``a``, ``a + b ln d`` or ``a + b d**p``."""

    kind: str
    a: float
    b: float = 0.0
    p: float = 0.0

    def __call__(self, d):
        d = np.asarray(d, dtype=float)
        if self.kind == "const":
            return np.full(d.shape, self.a)
        if self.kind == "log":
            return self.a + self.b * np.log(d)
        return self.a + self.b * d**self.p

    @property
    def integrable(self) -> bool:
        return self.kind != "power" or self.p > INTEGRABILITY_EXPONENT or self.b == 0.0

    def integral(self, eps: float) -> float:
        """Integral over ``(0, eps)``."""
        if self.kind == "const":
            return self.a * eps
        if self.kind == "log":
            return self.a * eps + self.b * (eps * math.log(eps) - eps)
        if not self.integrable:
            raise NotIntegrableError(f"local exponent {self.p:.3f} is not integrable")
        return self.a * eps + self.b * eps ** (self.p + 1) / (self.p + 1)

    @classmethod
    def fit(cls, eps: float, v1: float, v2: float, v3: float) -> "EndpointModel":
        """Fit from values at ``eps``, ``2 eps`` and ``4 eps``."""
        d1 = v2 - v1
        d2 = v3 - v2
        noise = 1e-13 * (1.0 + abs(v1) + abs(v3))
        if abs(d1) <= noise and abs(d2) <= noise:
            return cls("const", v1)
        if d1 == 0.0 or d2 / d1 <= 0.0:
            return cls("const", v1)
        r = d2 / d1
        if abs(r - 1.0) < 0.05:
            b = d1 / math.log(2.0)
            return cls("log", v1 - b * math.log(eps), b)
        p = math.log2(r)
        b = d1 / (eps**p * (r - 1.0))
        return cls("power", v1 - b * eps**p, b, p)


def half_panels(H: float, eps: float) -> np.ndarray:
    """Panel edges in ``d`` for a half of length ``H``, ascending."""
    dg = min(CORE_WIDTH, H / 2)
    ncore = max(1, math.ceil((H - dg) / CORE_WIDTH))
    edges = list(np.linspace(dg, H, ncore + 1))
    d = dg
    while d / 2 > eps:
        d /= 2
        edges.insert(0, d)
    if edges[0] > eps:
        edges.insert(0, eps)
    return np.array(edges)


class HalfSection:
    """One half of a section in the distance coordinate of its singular endpoint.

    ``sign = +1`` for the half touching the section's left endpoint
    (``theta = anchor + d``) and ``-1`` for the half touching the right one.
    """

    def __init__(self, section: int, anchor: float, sign: int, H: float, eps: float):
        self.section = section
        self.anchor = float(anchor)
        self.sign = sign
        self.H = float(H)
        self.eps = float(eps)
        self.lo = None
        self.hi = None
        self.levels = []  # per level: list of Chebyshev coefficient arrays
        self.models = []  # per level: EndpointModel

    def theta(self, d):
        return wrap(self.anchor + self.sign * np.asarray(d, dtype=float))

    def offset(self, d):
        """Signed offset ``theta - midpoint``."""
        return -self.sign * (self.H - np.asarray(d, dtype=float))

    # -- level 0 --------------------------------------------------------
    def fit_base(self, func, order, rel_tol, abs_tol, max_subdivisions):
        edges = half_panels(self.H, self.eps)
        stack = [(edges[j], edges[j + 1]) for j in range(len(edges) - 1)][::-1]
        done = []
        splits = 0
        while stack:
            lo, hi = stack.pop()

            def mapped(t, lo=lo, hi=hi):
                d = lo + (t + 1.0) * (0.5 * (hi - lo))
                vals = np.asarray(func(self.theta(d)), dtype=float)
                if vals.shape != d.shape:
                    vals = np.broadcast_to(vals, d.shape).astype(float)
                if not np.all(np.isfinite(vals)):
                    raise QuadratureError(
                        f"non-finite value in section {self.section} near distance {lo:.3g}",
                        section=self.section,
                    )
                return vals

            coef = C.chebinterpolate(mapped, order)
            scale = np.max(np.abs(coef))
            tail = np.max(np.abs(coef[-3:]))
            # angles are passed in absolute form, so their rounding limits what
            # can be resolved on very narrow panels away from theta = 0
            reach = max(abs(float(self.theta(lo))), abs(float(self.theta(hi))))
            noise = 8 * np.finfo(float).eps * reach * scale / (hi - lo)
            if tail <= rel_tol * scale + abs_tol + noise:
                done.append((lo, hi, coef))
                continue
            splits += 1
            if splits > max_subdivisions:
                raise QuadratureError(
                    f"tolerance not reached in section {self.section} "
                    f"after {max_subdivisions} subdivisions",
                    section=self.section,
                )
            mid = 0.5 * (lo + hi)
            stack.append((mid, hi))
            stack.append((lo, mid))
        done.sort(key=lambda t: t[0])
        self.lo = np.array([t[0] for t in done])
        self.hi = np.array([t[1] for t in done])
        self.levels = [[t[2] for t in done]]
        self.models = [self._fit_model(0)]

    # -- integration ----------------------------------------------------
    def integrate_level(self):
        """Append the next level: sign-aware cumulative integral from the midpoint."""
        src = self.levels[-1]
        sigma = -self.sign  # +1 on the right half, -1 on the left half
        out = [None] * len(src)
        value_at_hi = 0.0
        for j in range(len(src) - 1, -1, -1):
            half_w = 0.5 * (self.hi[j] - self.lo[j])
            G = C.chebint(src[j], scl=half_w)
            g1 = C.chebval(1.0, G)
            coef = -sigma * G
            coef[0] += value_at_hi + sigma * g1
            out[j] = coef
            value_at_hi = C.chebval(-1.0, coef)
        self.levels.append(out)
        self.models.append(self._fit_model(len(self.levels) - 1))

    def _fit_model(self, level):
        e = self.eps
        v = self.eval_panels(np.array([e, 2 * e, 4 * e]), level)
        return EndpointModel.fit(e, *v)

    # -- evaluation -----------------------------------------------------
    def eval_panels(self, d, level):
        d = np.asarray(d, dtype=float)
        out = np.empty(d.shape)
        idx = np.clip(np.searchsorted(self.lo, d, side="right") - 1, 0, len(self.lo) - 1)
        coefs = self.levels[level]
        for j in np.unique(idx):
            m = idx == j
            lo, hi = self.lo[j], self.hi[j]
            t = (2.0 * d[m] - (lo + hi)) / (hi - lo)
            out[m] = C.chebval(t, coefs[j])
        return out

    def eval(self, d, level):
        d = np.asarray(d, dtype=float)
        out = self.eval_panels(d, level)
        small = d < self.eps
        if np.any(small):
            out[small] = self.models[level](d[small])
        return out

    # -- quadrature ----------------------------------------------------
    def fourier_nodes(self, level, K, gl_x, gl_w):
        """Nodes, weights and panel values for integrating this half against ``e^{-ik theta}``.

        Returns ``(d, theta, weight, value)`` arrays.
        """
        ds, thetas, weights, values = [], [], [], []
        max_w = 16.0 / max(K, 1)
        for j in range(len(self.lo)):
            lo, hi = self.lo[j], self.hi[j]
            nsub = max(1, math.ceil((hi - lo) / max_w))
            cuts = np.linspace(lo, hi, nsub + 1)
            for s in range(nsub):
                a, b = cuts[s], cuts[s + 1]
                d = 0.5 * (a + b) + 0.5 * (b - a) * gl_x
                t = (2.0 * d - (lo + hi)) / (hi - lo)
                values.append(C.chebval(t, self.levels[level][j]))
                weights.append(0.5 * (b - a) * gl_w)
                thetas.append(self.theta(d))
                ds.append(d)
        cat = np.concatenate
        return cat(ds), cat(thetas), cat(weights), cat(values)
