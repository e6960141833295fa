import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from circlechain.coeffs import (
    FourierCoefficients,
    TaylorCoefficients,
    angular_derivative_coeffs,
    angular_primitive_coeffs,
    fourier_to_taylor,
    growth_order,
    taylor_to_fourier,
)
from circlechain.errors import ValidationError

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


@st.composite
def taylor(draw, min_K=1, max_K=40, proper=False, real_c0=True):
    K = draw(st.integers(min_K, max_K))
    re = draw(arrays(float, K + 1, elements=finite))
    im = draw(arrays(float, K + 1, elements=finite))
    c = re + 1j * im
    if real_c0:
        c[0] = c[0].real
    if proper:
        c[0] = 0
    return TaylorCoefficients(c)


# -- validation ---------------------------------------------------------------

def test_rejects_nonfinite_and_short():
    with pytest.raises(ValidationError):
        TaylorCoefficients(np.array([1.0, np.nan]))
    with pytest.raises(ValidationError):
        TaylorCoefficients(np.array([1.0]))
    with pytest.raises(ValidationError):
        FourierCoefficients(0.0, [np.inf], [0.0])
    with pytest.raises(ValidationError):
        FourierCoefficients(0.0, [1.0, 2.0], [0.0])


def test_coefficients_are_immutable():
    tc = TaylorCoefficients(np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        tc.c[0] = 3


def test_mixed_truncation_is_an_error():
    a = TaylorCoefficients.zeros(3)
    b = TaylorCoefficients.zeros(4)
    with pytest.raises(ValidationError):
        a + b
    with pytest.raises(ValidationError):
        a - b


def test_proper_predicate():
    assert TaylorCoefficients(np.array([0.0, 1.0])).proper
    assert not TaylorCoefficients(np.array([1e-300, 1.0])).proper


# -- maps -------------------------------------------------------------------

def test_fourier_to_taylor_examples():
    tc = fourier_to_taylor(FourierCoefficients(2.0, [0.0, 0.0], [0.0, 0.0]))
    assert tc.c[0] == 1 and np.all(tc.c[1:] == 0)
    tc = fourier_to_taylor(FourierCoefficients(0.0, [0.0], [1.0]))
    assert tc.c[1] == -1j
    tc = fourier_to_taylor(FourierCoefficients(0.0, [0.0] * 3, [0.0] * 3))
    assert np.all(tc.c == 0)


def test_taylor_to_fourier_examples():
    fc = taylor_to_fourier(TaylorCoefficients(np.array([0, -1j])))
    assert fc.beta[0] == 1 and fc.alpha[0] == 0
    assert taylor_to_fourier(TaylorCoefficients(np.array([1.0, 0.0]))).alpha0 == 2


def test_imaginary_c0_rejected():
    with pytest.raises(ValidationError):
        taylor_to_fourier(TaylorCoefficients(np.array([1 + 1e-6j, 0.0])))


@given(taylor())
def test_taylor_fourier_roundtrip_exact(tc):
    back = fourier_to_taylor(taylor_to_fourier(tc))
    assert np.array_equal(back.c, tc.c)


def test_roundtrip_100_random_sets():
    rng = np.random.default_rng(7)
    for _ in range(100):
        K = int(rng.integers(1, 200))
        fc = FourierCoefficients(rng.normal(), rng.normal(size=K), rng.normal(size=K))
        assert taylor_to_fourier(fourier_to_taylor(fc)) == fc


# -- angular operators ------------------------------------------------------

def test_derivative_examples():
    tc = TaylorCoefficients(np.array([3.0, 1.0, 2.0]))
    assert angular_derivative_coeffs(tc, 0) is tc
    d1 = angular_derivative_coeffs(TaylorCoefficients(np.array([0.0, 1.0])), 1)
    assert d1.c[1] == 1j and d1.c[0] == 0
    d2 = angular_derivative_coeffs(TaylorCoefficients(np.r_[0.0, np.ones(10)]), 2)
    assert np.array_equal(d2.c[1:], -np.arange(1, 11) ** 2)


def test_primitive_examples():
    const = TaylorCoefficients(np.array([4.0, 0.0, 0.0]))
    assert np.all(angular_primitive_coeffs(const, 1).c == 0)
    p = angular_primitive_coeffs(TaylorCoefficients(np.array([0.0, 1j])), 1)
    assert p.c[1] == 1


@given(taylor(proper=True), st.integers(1, 6))
def test_derivative_of_primitive_is_identity(tc, n):
    back = angular_derivative_coeffs(angular_primitive_coeffs(tc, n), n)
    scale = np.maximum(1.0, np.abs(tc.c))
    assert np.all(np.abs(back.c - tc.c) <= 1e-12 * scale)


@given(taylor(real_c0=False), st.integers(0, 4), st.integers(0, 4))
def test_derivative_composition(tc, m, n):
    a = angular_derivative_coeffs(angular_derivative_coeffs(tc, m), n)
    b = angular_derivative_coeffs(tc, m + n)
    if m + n == 0:
        assert a == tc
        return
    assert np.all(np.abs(a.c - b.c) <= 1e-12 * np.maximum(np.abs(b.c), 1e-300))


@given(taylor(real_c0=False))
def test_operators_produce_proper_sequences(tc):
    assert angular_derivative_coeffs(tc, 1).proper
    assert angular_primitive_coeffs(tc, 1).proper


@given(taylor(min_K=2, proper=True), taylor(min_K=2, proper=True))
def test_chains_never_intersect(a, b):
    if a.K != b.K or a == b:
        return
    for n in range(1, 9):
        assert not np.array_equal(angular_derivative_coeffs(a, n).c, angular_derivative_coeffs(b, n).c)


def test_negative_order_rejected():
    tc = TaylorCoefficients.zeros(2)
    with pytest.raises(ValidationError):
        angular_derivative_coeffs(tc, -1)
    with pytest.raises(ValidationError):
        angular_primitive_coeffs(tc, -1)


# -- growth -------------------------------------------------------------------

def test_growth_of_power_law():
    k = np.arange(257, dtype=float)
    rep = growth_order(TaylorCoefficients(k**2))
    assert abs(rep.n_hat - 2) <= 0.1 and rep.exp_bounded == "yes"


def test_growth_of_geometric_sequence():
    k = np.arange(257, dtype=float)
    assert growth_order(TaylorCoefficients(1.05**k)).exp_bounded == "no"


def test_growth_zero_tail():
    rep = growth_order(TaylorCoefficients.zeros(64).with_c0(1.0))
    assert rep.exp_bounded == "yes" and rep.zero_tail and rep.n_hat == 0


def test_growth_needs_enough_terms():
    with pytest.raises(ValidationError):
        growth_order(TaylorCoefficients.zeros(31))


@pytest.mark.parametrize("n", range(0, 7))
def test_growth_law_of_derivatives(n):
    rng = np.random.default_rng(n)
    K = 512
    base = rng.uniform(0.5, 1.5, K + 1) * np.exp(2j * np.pi * rng.uniform(size=K + 1))
    rep = growth_order(angular_derivative_coeffs(TaylorCoefficients(base), n))
    assert abs(rep.n_hat - n) <= 0.2
    assert rep.exp_bounded == "yes"
