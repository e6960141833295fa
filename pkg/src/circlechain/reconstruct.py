"""Inner analytic representation of non-integrable sectioned functions.

The pipeline integrates the function sectionally as many times as its
worst singular point requires, takes Fourier coefficients of that
integrable primitive, and differentiates back on the coefficient side.
The lost constant term is fixed by comparing with the function at a
regular point.  Optionally every finite jump met on the way down is
turned into an explicit delta component and subtracted, giving the
reduced coefficients.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import chebyshev as C

from .classify import ApproachConfig, max_hardness
from .coeffs import (
    FourierCoefficients,
    TaylorCoefficients,
    _kpow,
    angular_derivative_coeffs,
    fourier_to_taylor,
)
from .errors import (
    ClassificationError,
    NotIntegrableError,
    PipelineError,
    QuadratureError,
    ValidationError,
)
from .evalcore import RhoLadder, boundary_values, limit_to_circle, normalize_angle
from .sections import PiecewisePrimitive, QuadratureConfig, SectionedFunction, fourier_numeric

__all__ = [
    "DeltaComponent",
    "ReconstructionResult",
    "RoundtripReport",
    "delta_taylor",
    "detect_deltas",
    "reconstruct",
    "extended_fourier",
    "verify_roundtrip",
    "choose_regular_point",
]

JUMP_THRESHOLD = 1e-4


@dataclass(frozen=True)
class DeltaComponent:
    """``amplitude`` times the ``order``-th derivative of a periodic delta at ``location``."""

    location: float
    order: int
    amplitude: float
    uncertainty: float = 0.0

    def __post_init__(self):
        if self.order < 0:
            raise ValidationError("delta order must be non-negative")
        if not math.isfinite(self.amplitude) or self.amplitude == 0.0:
            raise ValidationError("delta amplitude must be finite and nonzero")
        object.__setattr__(self, "location", normalize_angle(self.location))


def delta_taylor(d: DeltaComponent, K: int) -> TaylorCoefficients:
    """Taylor coefficients of a delta (``order = 0``) or its ``order``-th angular derivative.

    From the periodic expansion ``delta(theta) = 1/(2 pi) + (1/pi) sum cos k theta``:
    ``c_0 = A/(2 pi)`` and ``c_k = (A/pi) e^{-ik theta_1}``, each further
    derivative multiplying ``c_k`` by ``ik`` and removing ``c_0``.
    """
    if K < 1:
        raise ValidationError("K must be at least 1")
    k = np.arange(K + 1)
    c = (d.amplitude / math.pi) * np.exp(-1j * k * d.location)
    if d.order == 0:
        c[0] = d.amplitude / (2 * math.pi)
        return TaylorCoefficients(c)
    return angular_derivative_coeffs(TaylorCoefficients(c), d.order)


# -- jump detection ---------------------------------------------------------

def _section_scale(pp: PiecewisePrimitive, i: int, level: int) -> float:
    n = pp.base.N
    vals = []
    for sec in ((i - 1) % n, i % n):
        left, right = pp.halves[sec]
        d = np.linspace(0.1, 1.0, 8) * left.H
        vals.append(np.abs(pp.half_eval(left, d, level)))
        vals.append(np.abs(pp.half_eval(right, d, level)))
    return float(np.median(np.concatenate(vals)))


def _jump_fit(d, s, q, with_log, sigma):
    cols = [np.ones_like(d), d, d * d, d**3, d * np.log(d), d * d * np.log(d)]
    if with_log:
        cols.append(np.log(d))
    cols += [d ** (-j) for j in range(1, q + 1)]
    A = np.column_stack(cols) / sigma[:, None]
    norms = np.max(np.abs(A), axis=0)
    coef, *_ = np.linalg.lstsq(A / norms, s / sigma, rcond=None)
    return coef[0] / norms[0]


def _extract_jump(d, s, location=0.0):
    """Constant term of the symmetric difference ``s(d)`` as ``d -> 0``, with an uncertainty.

    Angles reach the evaluators in absolute form, so samples at distance
    ``d`` from a point at ``theta_i`` carry relative noise of order
    ``eps * |theta_i| / d``; the fit is weighted accordingly.
    """
    eps = np.finfo(float).eps
    sigma = eps * (1.0 + abs(location) / d) * np.abs(s) + eps * float(np.max(np.abs(s))) + 1e-300
    tail = np.abs(s[-6:])
    slope = np.polyfit(np.log(d[-6:]), np.log(np.maximum(tail, 1e-300)), 1)[0]
    q = max(0, int(round(-slope))) if slope < -0.5 else 0
    best = None
    half = len(d) * 2 // 3
    for with_log in (False, True):
        j_all = _jump_fit(d, s, q, with_log, sigma)
        j_a = _jump_fit(d[:half], s[:half], q, with_log, sigma[:half])
        j_b = _jump_fit(d[-half:], s[-half:], q, with_log, sigma[-half:])
        unc = abs(j_a - j_b) + 1e-15 * float(np.max(np.abs(s)))
        if best is None or unc < best[1]:
            best = (j_all, unc)
    return best


def detect_deltas(pp: PiecewisePrimitive, level=None, *, threshold: float = JUMP_THRESHOLD,
                  diagnostics: list | None = None) -> list:
    """Order-0 delta components created by differentiating level ``level`` of ``pp``.

    The jump at each point is the ``d -> 0`` limit of
    ``F(theta_i + d) - F(theta_i - d)``, extrapolated with a fit that also
    absorbs symmetric divergences, so logarithmic or odd power blow-ups on
    top of a jump do not hide it.  Jumps at or below
    ``threshold * (1 + section scale)`` are treated as quadrature noise.
    """
    level = pp._check_level(level)
    out = []
    if pp.base.N == 0:
        return out
    for i, loc in enumerate(pp.base.singular_points):
        n = pp.base.N
        room = min(pp.halves[i % n][0].H, pp.halves[(i - 1) % n][1].H)
        d0 = min(0.01, 0.45 * room)
        d = d0 * 0.5 ** np.arange(17)
        s = pp.lateral(i, +1, d, level) - pp.lateral(i, -1, d, level)
        J, unc = _extract_jump(d, s, loc)
        scale = _section_scale(pp, i, level)
        limit = threshold * (1.0 + scale)
        accepted = abs(J) > limit and unc < 0.1 * abs(J)
        if diagnostics is not None:
            diagnostics.append({"location": loc, "level": level, "jump": J, "uncertainty": unc,
                                "threshold": limit, "accepted": accepted})
        if accepted:
            out.append(DeltaComponent(loc, 0, float(J), float(unc)))
    return out


# -- pipeline -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ReconstructionResult:
    n_used: int
    tc_full: TaylorCoefficients
    alpha0: float
    tc_reduced: TaylorCoefficients
    deltas_removed: tuple
    diagnostics: dict = field(default_factory=dict)
    derivatives: int = 0

    @property
    def K(self) -> int:
        return self.tc_full.K


def choose_regular_point(points) -> float:
    """Angle farthest from every singular point (midpoint of the widest gap)."""
    pts = sorted(normalize_angle(p) for p in points)
    if not pts:
        return 0.0
    ext = pts + [pts[0] + 2 * math.pi]
    gaps = np.diff(ext)
    j = int(np.argmax(gaps))
    return normalize_angle(ext[j] + gaps[j] / 2)


def _fallback_points(points, count=16):
    cands = -math.pi + 2 * math.pi * (np.arange(count) + 0.5) / count
    if not points:
        return list(cands)
    pts = np.asarray(points)
    dist = np.array([np.min(np.abs(np.angle(np.exp(1j * (pts - c))))) for c in cands])
    return [float(cands[j]) for j in np.argsort(-dist, kind="stable")]


def _numeric_derivative(sf: SectionedFunction, theta0: float, order: int) -> float:
    pts = np.asarray(sf.singular_points)
    room = math.pi if pts.size == 0 else float(np.min(np.abs(np.angle(np.exp(1j * (pts - theta0))))))
    h = min(0.25, 0.5 * room)
    coef = C.chebinterpolate(lambda t: sf(theta0 + h * t), 24)
    return float(C.chebval(0.0, C.chebder(coef, order))) / h**order


def _target_value(sf, theta0, derivatives):
    if derivatives == 0:
        return float(sf(theta0))
    return _numeric_derivative(sf, theta0, derivatives)


def reconstruct(sf: SectionedFunction, K: int, qc: QuadratureConfig | None = None, reduce: bool = False, *,
                nmax: int = 4, n: int | None = None, added=None, derivatives: int = 0,
                ladder: RhoLadder | None = None, cfg: ApproachConfig | None = None) -> ReconstructionResult:
    """Taylor coefficients of the inner analytic function representing ``sf``.

    ``n`` overrides the classified maximum hardness; ``added`` injects
    per-section polynomials into the top primitive; ``derivatives = 1``
    represents the angular derivative of ``sf`` instead (its jumps then
    become deltas).
    """
    if K < 1:
        raise ValidationError("K must be at least 1")
    if derivatives not in (0, 1):
        raise ValidationError("derivatives must be 0 or 1")
    qc = qc or QuadratureConfig()
    ladder = ladder or RhoLadder.for_order(K)
    diag = {"K": K, "derivatives": derivatives, "timings": {}}
    t = time.perf_counter()
    if n is None:
        try:
            n = max_hardness(sf, nmax, qc=qc, cfg=cfg)
        except ClassificationError as exc:
            raise PipelineError("classify", str(exc)) from exc
    diag["timings"]["classify"] = time.perf_counter() - t

    t = time.perf_counter()
    try:
        pp = PiecewisePrimitive(sf, n, qc, added)
    except QuadratureError as exc:
        raise PipelineError("integrate", str(exc)) from exc
    diag["timings"]["integrate"] = time.perf_counter() - t

    t = time.perf_counter()
    try:
        fc_top, acc = fourier_numeric(pp, K, qc, level=n, return_accuracy=True)
    except (NotIntegrableError, QuadratureError) as exc:
        raise PipelineError("fourier", str(exc)) from exc
    diag["timings"]["fourier"] = time.perf_counter() - t
    diag["fourier_accuracy"] = acc
    diag["fc_top"] = fc_top

    total = n + derivatives
    tc_top = fourier_to_taylor(fc_top)
    tc_p = angular_derivative_coeffs(tc_top, total) if total else tc_top.proper_part()

    deltas = []
    if reduce:
        t = time.perf_counter()
        jump_diag = []
        lowest = 1 - derivatives
        for s in range(n, lowest - 1, -1):
            for dc in detect_deltas(pp, s, diagnostics=jump_diag):
                deltas.append(DeltaComponent(dc.location, s - 1 + derivatives, dc.amplitude, dc.uncertainty))
        diag["jumps"] = jump_diag
        diag["timings"]["deltas"] = time.perf_counter() - t

    t = time.perf_counter()
    theta0 = choose_regular_point(sf.singular_points)
    tried = []
    for cand in [theta0] + _fallback_points(sf.singular_points):
        lim = limit_to_circle(tc_p, cand, ladder)
        tried.append(cand)
        if not lim.divergent:
            theta0 = cand
            break
    else:
        raise PipelineError("alpha0", "boundary limit diverges at every candidate regular point")
    g0 = _target_value(sf, theta0, derivatives)
    alpha0 = 2.0 * (g0 - lim.value)
    diag.update(theta0=theta0, target_theta0=g0, boundary_theta0=lim.value,
                boundary_error_theta0=lim.error, theta0_candidates_tried=len(tried))
    diag["timings"]["alpha0"] = time.perf_counter() - t

    tc_full = tc_p.with_c0(alpha0 / 2)
    tc_reduced = tc_full
    for dc in deltas:
        tc_reduced = tc_reduced - delta_taylor(dc, K)
    if deltas:
        lim_r = limit_to_circle(tc_reduced.proper_part(), theta0, ladder)
        diag["reduced_alpha0_refit"] = 2.0 * (g0 - lim_r.value)
    return ReconstructionResult(n, tc_full, alpha0, tc_reduced, tuple(deltas), diag, derivatives)


# -- extended coefficients ----------------------------------------------

def extended_fourier(fc_minus_n: FourierCoefficients, n: int) -> FourierCoefficients:
    """Fourier coefficients of the ``n``-th derivative from those of the ``n``-th primitive.

    Even ``n = 2j``: ``alpha_k = (-1)^j k^n alpha_k'`` and likewise for beta.
    Odd ``n = 2j+1``: ``alpha_k = (-1)^j k^n beta_k'`` and
    ``beta_k = (-1)^(j+1) k^n alpha_k'``.  The constant term cannot be
    recovered and is returned as an indeterminate zero.
    """
    n = int(n)
    if n < 0:
        raise ValidationError("n must be non-negative")
    if n == 0:
        return fc_minus_n
    kp = _kpow(fc_minus_n.K, n)[1:]
    j, odd = divmod(n, 2)
    sign = -1.0 if j % 2 else 1.0
    a, b = fc_minus_n.alpha, fc_minus_n.beta
    if odd:
        alpha = sign * (kp * b)
        beta = -sign * (kp * a)
    else:
        alpha = sign * (kp * a)
        beta = sign * (kp * b)
    return FourierCoefficients(0.0, alpha, beta, alpha0_determinate=False)


# -- verification -------------------------------------------------------

@dataclass(frozen=True)
class RoundtripReport:
    max_residual: float
    mean_residual: float
    residuals: np.ndarray = field(repr=False)
    reduced_max_residual: float = float("nan")
    full_vs_reduced: float = float("nan")
    divergent_probes: int = 0


def verify_roundtrip(res: ReconstructionResult, sf: SectionedFunction, probes, ladder: RhoLadder | None = None,
                     relative: bool = False) -> RoundtripReport:
    """Compare boundary values of the reconstruction with ``sf`` (or its derivative) at ``probes``.

    With ``relative=True`` residuals are divided by ``max(1, |target|)``.
    """
    probes = np.atleast_1d(np.asarray(probes, dtype=float))
    ladder = ladder or RhoLadder.for_order(res.K)
    if res.derivatives:
        target = np.array([_numeric_derivative(sf, p, res.derivatives) for p in probes])
    else:
        target = np.asarray(sf(probes), dtype=float)
    full, _, div = boundary_values(res.tc_full, probes, ladder)
    red, _, div_r = boundary_values(res.tc_reduced, probes, ladder)
    norm = np.maximum(1.0, np.abs(target)) if relative else 1.0
    r = np.abs(full - target) / norm
    rr = np.abs(red - target) / norm
    return RoundtripReport(
        max_residual=float(np.max(r)),
        mean_residual=float(np.mean(r)),
        residuals=r,
        reduced_max_residual=float(np.max(rr)),
        full_vs_reduced=float(np.max(np.abs(full - red))),
        divergent_probes=int(np.count_nonzero(div | div_r)),
    )
