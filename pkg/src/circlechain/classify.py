"""Numerical classification of singular points.

Every declared point is labelled

* ``none``: no defect found in the value or its first ``nmax`` derivatives;
* ``soft`` with a degree: finite equal lateral limits, the degree being the
  order of the first derivative whose lateral limits disagree or diverge;
* ``borderline_hard`` (degree 0): integrable but without a common finite
  limit, i.e. a finite jump, a logarithm or a power ``|d|^p`` with ``p > -1``;
* ``hard`` with a degree: the number of sectional integrations after which
  the point becomes integrable.

Oscillatory behaviour and hardness above ``nmax`` raise
:class:`~circlechain.errors.ClassificationError`.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import chebyshev as C

from ._panels import INTEGRABILITY_EXPONENT
from .errors import ClassificationError, QuadratureError, ValidationError
from .sections import PiecewisePrimitive, QuadratureConfig, SectionedFunction

__all__ = [
    "ApproachConfig",
    "SingularityRecord",
    "LateralLimit",
    "lateral_limit",
    "classify_point",
    "classify_all",
    "max_hardness",
]

KINDS = ("none", "soft", "borderline_hard", "hard")


@dataclass(frozen=True)
class ApproachConfig:
    """Approach sequence ``theta_i +- delta 2^-j`` (``j = 0..halvings``) and limit criteria."""

    delta: float = 0.1
    halvings: int = 12
    drift_tol: float = 1e-6
    blowup: float = 1e6
    fit_points: int = 8

    def distances(self, room: float) -> np.ndarray:
        d0 = min(self.delta, 0.9 * room)
        return d0 * 0.5 ** np.arange(self.halvings + 1)


@dataclass(frozen=True)
class LateralLimit:
    """One-sided behaviour of a function at a point."""

    finite: bool
    value: float
    drift: float
    model: str = ""  # for divergent sides: "power", "log" or "oscillatory"
    exponent: float = float("nan")
    residual: float = float("nan")

    @property
    def integrable(self) -> bool:
        if self.finite or self.model == "log":
            return True
        return self.model == "power" and self.exponent > INTEGRABILITY_EXPONENT


@dataclass(frozen=True)
class SingularityRecord:
    location: float
    kind: str
    degree: int
    evidence: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown kind {self.kind!r}")

    def describe(self) -> str:
        if self.kind == "none":
            return "none"
        if self.kind == "borderline_hard":
            return "borderline 0"
        suffix = "+" if self.evidence.get("degree_is_lower_bound") else ""
        return f"{self.kind} {self.degree}{suffix}"


def _fit_line(x, y):
    A = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return coef, A @ coef


def lateral_limit(values, d, cfg: ApproachConfig = ApproachConfig()) -> LateralLimit:
    """Decide whether an approach sequence converges and, if not, how it grows."""
    v = np.asarray(values, dtype=float)
    d = np.asarray(d, dtype=float)
    if not np.all(np.isfinite(v)):
        return LateralLimit(False, float("nan"), float("inf"), "oscillatory")
    ref = max(1.0, abs(v[0]))
    diff = np.diff(v)
    last = v[-1]
    blown = np.max(np.abs(v)) > cfg.blowup * ref
    if not blown:
        tiny = 1e-13 * (1.0 + np.max(np.abs(v)))
        if np.all(np.abs(diff[-4:]) <= tiny):
            return LateralLimit(True, float(last), float(np.max(np.abs(diff[-4:]))))
        lims = []
        for j in (len(v) - 1, len(v) - 2):
            d1, d2 = v[j] - v[j - 1], v[j - 1] - v[j - 2]
            den = d1 - d2
            lims.append(v[j] - d1 * d1 / den if den != 0 else v[j])
        r = diff[-3:] / np.where(diff[-4:-1] == 0, np.inf, diff[-4:-1])
        geometric = np.all(np.abs(r) < 0.9) and np.all(r >= 0)
        drift = abs(lims[0] - lims[1])
        if geometric and drift < cfg.drift_tol * (1.0 + abs(lims[0])):
            return LateralLimit(True, float(lims[0]), float(drift))
    # divergent: compare a power law against a logarithm on the closest points
    m = min(cfg.fit_points, len(v))
    vv, dd = v[-m:], d[-m:]
    ld = np.log(dd)
    if np.any(vv == 0) or np.any(np.sign(vv) != np.sign(vv[-1])):
        power_res = float("inf")
        p = float("nan")
    else:
        (p, _), pred = _fit_line(ld, np.log(np.abs(vv)))
        power_res = float(np.sqrt(np.mean((np.log(np.abs(vv)) - pred) ** 2)))
    (b, a), pred_log = _fit_line(ld, vv)
    # relative to the fitted swing, so a constant offset cannot spoil the fit
    swing = max(abs(b) * float(np.ptp(ld)), 1e-300)
    log_res = float(np.sqrt(np.mean((vv - pred_log) ** 2))) / swing
    if min(power_res, log_res) > 0.05:
        return LateralLimit(False, float("nan"), float("inf"), "oscillatory", residual=min(power_res, log_res))
    if log_res < power_res:
        return LateralLimit(False, float("nan"), float("inf"), "log", exponent=0.0, residual=log_res)
    return LateralLimit(False, float("nan"), float("inf"), "power", exponent=float(p), residual=power_res)


def _room(pp: PiecewisePrimitive, i: int) -> float:
    n = pp.base.N
    return min(pp.halves[i % n][0].H, pp.halves[(i - 1) % n][1].H)


def _one_sided_fit(pp, i, side, w, order=24, attempts=8):
    """Chebyshev fit of the base on ``(0, w]`` to one side of point ``i``; None if unresolved."""
    for _ in range(attempts):
        def g(t, w=w):
            return pp.lateral(i, side, (t + 1.0) * (0.5 * w), level=0)

        coef = C.chebinterpolate(g, order)
        scale = np.max(np.abs(coef))
        if np.max(np.abs(coef[-3:])) <= 1e-11 * scale + 1e-300:
            return coef, w
        w /= 2
    return None


def _derivative_at_endpoint(coef, w, m, side):
    dm = C.chebder(coef, m) * (2.0 / w) ** m
    return float(C.chebval(-1.0, dm)) * (side**m)


def _markov_noise(coef, w, m):
    n = len(coef) - 1
    bound = 1.0
    for j in range(m):
        bound *= (n * n - j * j) / (2 * j + 1)
    return 1e-14 * float(np.sum(np.abs(coef))) * bound * (2.0 / w) ** m


def _softness(pp, i, limit, nmax, d, left_vals, right_vals):
    """Degree of softness for a point with finite equal lateral limits."""
    room = _room(pp, i)
    w = min(0.5, 0.9 * room)
    fits = {s: _one_sided_fit(pp, i, s, w) for s in (-1, +1)}
    ev = {}
    if all(fits.values()):
        for m in range(1, nmax + 1):
            dl = _derivative_at_endpoint(*fits[-1], m, -1)
            dr = _derivative_at_endpoint(*fits[+1], m, +1)
            noise = _markov_noise(*fits[-1], m) + _markov_noise(*fits[+1], m)
            ev[f"derivative_{m}"] = (dl, dr)
            if abs(dr - dl) > 1e-6 * (1.0 + abs(dl) + abs(dr)) + 100 * noise:
                return "soft", m, ev
        ev["degree_is_lower_bound"] = True
        return "none", nmax, ev
    # not smooth up to the point on some side: read the exponent of |f - limit|
    exps = []
    for vals in (left_vals, right_vals):
        r = np.abs(np.asarray(vals) - limit)
        ok = r > 1e-13 * (1.0 + abs(limit))
        if np.count_nonzero(ok) >= 4:
            (p, _), _ = _fit_line(np.log(d[ok][-6:]), np.log(r[ok][-6:]))
            exps.append(p)
    ev["unresolved_smoothness"] = True
    if not exps:
        ev["degree_is_lower_bound"] = True
        return "none", nmax, ev
    p = min(exps)
    ev["value_exponent"] = p
    degree = max(1, math.ceil(p - 0.05))
    if degree > nmax:
        ev["degree_is_lower_bound"] = True
        degree = nmax
    return "soft", degree, ev


def _lateral_pair(pp, i, level, cfg):
    d = cfg.distances(_room(pp, i))
    left = pp.lateral(i, -1, d, level)
    right = pp.lateral(i, +1, d, level)
    return d, left, right, lateral_limit(left, d, cfg), lateral_limit(right, d, cfg)


def _classify_in(pp: PiecewisePrimitive, i: int, nmax: int, cfg: ApproachConfig) -> SingularityRecord:
    loc = pp.base.singular_points[i]
    d, left, right, L, R = _lateral_pair(pp, i, 0, cfg)
    ev = {"lateral_left": L.value, "lateral_right": R.value, "approach_delta": float(d[0])}
    if L.model == "oscillatory" or R.model == "oscillatory":
        raise ClassificationError(f"oscillatory behaviour at theta={loc:.6g}", location=loc)
    if L.finite and R.finite:
        jump = R.value - L.value
        ev["jump"] = jump
        if abs(jump) > 1e-6 * (1.0 + abs(L.value) + abs(R.value)):
            return SingularityRecord(loc, "borderline_hard", 0, ev)
        kind, degree, more = _softness(pp, i, 0.5 * (L.value + R.value), nmax, d, left, right)
        ev.update(more)
        return SingularityRecord(loc, kind, degree if kind == "soft" else 0, ev)
    exps = [s.exponent for s in (L, R) if not s.finite and s.model == "power"]
    ev["p_hat"] = min(exps) if exps else 0.0
    ev["growth_model"] = "power" if exps else "log"
    if L.integrable and R.integrable:
        ev["integrations"] = 0
        return SingularityRecord(loc, "borderline_hard", 0, ev)
    for m in range(1, nmax + 1):
        if m > pp.level:
            break
        _, _, _, Lm, Rm = _lateral_pair(pp, i, m, cfg)
        if Lm.model == "oscillatory" or Rm.model == "oscillatory":
            raise ClassificationError(f"oscillatory primitive at theta={loc:.6g}", location=loc)
        if Lm.integrable and Rm.integrable:
            ev["integrations"] = m
            return SingularityRecord(loc, "hard", m, ev)
    raise ClassificationError(
        f"degree of hardness at theta={loc:.6g} exceeds nmax={nmax}", location=loc, outcome="exceeds_nmax"
    )


def _primitive(sf, nmax, qc):
    try:
        return PiecewisePrimitive(sf, nmax, qc or QuadratureConfig())
    except QuadratureError as exc:
        raise ClassificationError(f"cannot resolve the function: {exc}", location=None) from exc


def _point_index(sf: SectionedFunction, theta: float) -> int:
    pts = np.asarray(sf.singular_points)
    dist = np.abs(np.angle(np.exp(1j * (pts - theta))))
    i = int(np.argmin(dist)) if pts.size else -1
    if i < 0 or dist[i] > 1e-12:
        raise ValidationError(f"theta={theta!r} is not a declared singular point")
    return i


def classify_point(sf: SectionedFunction, theta: float, nmax: int = 4, *, cfg: ApproachConfig | None = None,
                   qc: QuadratureConfig | None = None, primitive: PiecewisePrimitive | None = None) -> SingularityRecord:
    """Classify the declared singular point ``theta`` of ``sf``."""
    if nmax < 1:
        raise ValidationError("nmax must be at least 1")
    i = _point_index(sf, theta)
    pp = primitive if primitive is not None else _primitive(sf, nmax, qc)
    return _classify_in(pp, i, nmax, cfg or ApproachConfig())


def classify_all(sf: SectionedFunction, nmax: int = 4, *, cfg: ApproachConfig | None = None,
                 qc: QuadratureConfig | None = None, workers: int = 1):
    """Records for every singular point, in order; one primitive is shared."""
    if sf.N == 0:
        return []
    pp = _primitive(sf, nmax, qc)
    cfg = cfg or ApproachConfig()
    idx = range(sf.N)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(lambda i: _classify_in(pp, i, nmax, cfg), idx))
    return [_classify_in(pp, i, nmax, cfg) for i in idx]


def max_hardness(sf: SectionedFunction, nmax: int = 4, **kw) -> int:
    """Largest degree of hardness over all points; 0 when none is hard."""
    recs = classify_all(sf, nmax, **kw)
    return max((r.degree for r in recs if r.kind == "hard"), default=0)
