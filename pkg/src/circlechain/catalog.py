"""Named corpus of sectioned functions with closed-form oracle data.

Every entry records its expected classification per point and, where one
exists, closed-form Taylor coefficients and boundary values.  Oracle data
is tagged with its provenance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .sections import PiecewisePolynomial, SectionedFunction

__all__ = ["CatalogEntry", "CATALOG", "get", "names"]


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    build: Callable[[], SectionedFunction]
    description: str
    expected: tuple  # per point: (kind, degree)
    exact: Optional[Callable] = None  # closed-form boundary values, theta -> f
    taylor: Optional[Callable] = None  # K -> complex array c_0..c_K
    provenance: str = "closed-form"
    hardness: int = 0
    extra: dict = field(default_factory=dict)

    def sectioned(self) -> SectionedFunction:
        sf = self.build()
        return SectionedFunction(sf.singular_points, sf.evaluators, self.name, self.expected)


def _half_cot(t):
    return 0.5 / np.tan(t / 2)


def _quarter_csc2(t):
    return 0.25 / np.sin(t / 2) ** 2


def _taylor(K, c0, ck):
    k = np.arange(K + 1)
    c = np.asarray(ck(k), dtype=complex)
    c[0] = c0
    return c


PP_DEMO_POINTS = (-2.0, 0.5, 2.0)


def _pp_demo() -> PiecewisePolynomial:
    L = 2 * math.pi - 4
    return PiecewisePolynomial(
        PP_DEMO_POINTS,
        ((1.0, 1.0, -0.4), (1.0, 0.0, 0.5), (1 - L + 0.3 * L * L, 1 - 0.6 * L, 0.3)),
    )


def _entries():
    pi = math.pi
    yield CatalogEntry(
        "const5",
        lambda: SectionedFunction.uniform(lambda t: np.full(np.shape(t), 5.0), [0.0]),
        "constant 5 with a marker point at 0",
        (("none", 0),),
        exact=lambda t: np.full(np.shape(t), 5.0),
        taylor=lambda K: _taylor(K, 5.0, lambda k: np.zeros(k.shape)),
    )
    yield CatalogEntry(
        "abs_theta",
        lambda: SectionedFunction.uniform(np.abs, [0.0, pi]),
        "|theta| on (-pi, pi]",
        (("soft", 1), ("soft", 1)),
        exact=np.abs,
        taylor=lambda K: _taylor(K, pi / 2, lambda k: np.where(k % 2 == 1, -4 / (pi * np.maximum(k, 1) ** 2), 0.0)),
    )
    yield CatalogEntry(
        "log_2sin",
        lambda: SectionedFunction.uniform(lambda t: np.log(np.abs(2 * np.sin(t / 2))), [0.0]),
        "ln|2 sin(theta/2)|",
        (("borderline_hard", 0),),
        exact=lambda t: np.log(np.abs(2 * np.sin(np.asarray(t) / 2))),
        taylor=lambda K: _taylor(K, 0.0, lambda k: -1.0 / np.maximum(k, 1)),
    )
    yield CatalogEntry(
        "cot_half",
        lambda: SectionedFunction.uniform(_half_cot, [0.0]),
        "(1/2) cot(theta/2)",
        (("hard", 1),),
        exact=_half_cot,
        taylor=lambda K: _taylor(K, 0.0, lambda k: np.full(k.shape, -1j)),
        hardness=1,
    )
    yield CatalogEntry(
        "csc2_quarter",
        lambda: SectionedFunction.uniform(_quarter_csc2, [0.0]),
        "(1/4) csc^2(theta/2)",
        (("hard", 2),),
        exact=_quarter_csc2,
        taylor=lambda K: _taylor(K, 0.0, lambda k: -k.astype(float)),
        hardness=2,
    )
    yield CatalogEntry(
        "square_wave",
        lambda: SectionedFunction((0.0, pi), (lambda t: np.ones(np.shape(t)), lambda t: -np.ones(np.shape(t)))),
        "+1 on (0, pi), -1 on (-pi, 0)",
        (("borderline_hard", 0), ("borderline_hard", 0)),
        exact=lambda t: np.sign(np.sin(t)),
        taylor=lambda K: _taylor(K, 0.0, lambda k: np.where(k % 2 == 1, -4j / (pi * np.maximum(k, 1)), 0.0)),
        extra={"jumps": ((0.0, 2.0), (pi, -2.0))},
    )
    yield CatalogEntry(
        "sawtooth",
        lambda: SectionedFunction.uniform(lambda t: np.asarray(t, dtype=float), [pi]),
        "theta on (-pi, pi)",
        (("borderline_hard", 0),),
        exact=lambda t: np.asarray(t, dtype=float),
        taylor=lambda K: _taylor(K, 0.0, lambda k: -2j * (-1.0) ** (k + 1) / np.maximum(k, 1)),
        extra={"jumps": ((pi, -2 * pi),)},
    )
    yield CatalogEntry(
        "pp_demo",
        lambda: _pp_demo().to_sectioned(),
        "order-2 piecewise polynomial on three arcs",
        (("soft", 2), ("soft", 1), ("borderline_hard", 0)),
        exact=lambda t: _pp_demo()(t),
        provenance="exact polynomial",
    )
    yield CatalogEntry(
        "shifted_cot",
        lambda: SectionedFunction.uniform(lambda t: _half_cot(t - 1.0), [1.0]),
        "(1/2) cot((theta - 1)/2)",
        (("hard", 1),),
        exact=lambda t: _half_cot(np.asarray(t) - 1.0),
        taylor=lambda K: _taylor(K, 0.0, lambda k: -1j * np.exp(-1j * k * 1.0)),
        hardness=1,
    )
    yield CatalogEntry(
        "mix_hard",
        lambda: SectionedFunction.uniform(lambda t: _half_cot(t) + _quarter_csc2(t - pi / 2), [0.0, pi / 2]),
        "(1/2) cot(theta/2) + (1/4) csc^2((theta - pi/2)/2)",
        (("hard", 1), ("hard", 2)),
        exact=lambda t: _half_cot(t) + _quarter_csc2(np.asarray(t) - pi / 2),
        taylor=lambda K: _taylor(K, 0.0, lambda k: -1j - k * np.exp(-1j * k * pi / 2)),
        hardness=2,
    )


CATALOG = {e.name: e for e in _entries()}


def names():
    return list(CATALOG)


def get(name: str) -> CatalogEntry:
    try:
        return CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown function {name!r}; known: {', '.join(CATALOG)}") from None
