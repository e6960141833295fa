import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from circlechain import catalog
from circlechain.coeffs import FourierCoefficients, TaylorCoefficients, angular_derivative_coeffs, fourier_to_taylor, taylor_to_fourier
from circlechain.errors import PipelineError, ValidationError
from circlechain.evalcore import DiskPoint, eval_inner
from circlechain.reconstruct import (
    DeltaComponent,
    choose_regular_point,
    delta_taylor,
    detect_deltas,
    extended_fourier,
    reconstruct,
    verify_roundtrip,
)
from circlechain.sections import SectionedFunction, sectional_integrate

from conftest import probes_away

ORACLE_CASES = [
    # name, compare reduced?, tolerance on c_1..c_64
    ("const5", False, 1e-12),
    ("abs_theta", False, 1e-10),
    ("log_2sin", False, 1e-9),
    ("cot_half", False, 1e-9),
    ("csc2_quarter", False, 1e-7),
    ("shifted_cot", False, 1e-9),
    ("square_wave", False, 1e-9),
    ("sawtooth", False, 1e-9),
    ("mix_hard", True, 1e-7),
]


@pytest.mark.parametrize("name,reduced,tol", ORACLE_CASES)
def test_coefficients_match_closed_forms(recon_cache, name, reduced, tol):
    e = catalog.get(name)
    res = recon_cache(name, reduce=reduced)
    tc = res.tc_reduced if reduced else res.tc_full
    oracle = e.taylor(res.K)
    err = np.abs(tc.c[1:65] - oracle[1:65]) / np.maximum(1, np.abs(oracle[1:65]))
    assert np.max(err) < tol
    assert tc.c[0].real == pytest.approx(oracle[0].real, abs=1e-6)


@pytest.mark.parametrize("name", ["cot_half", "abs_theta", "shifted_cot", "pp_demo"])
def test_boundary_roundtrip(recon_cache, name):
    sf = catalog.get(name).sectioned()
    res = recon_cache(name)
    rep = verify_roundtrip(res, sf, probes_away(sf.singular_points, 32, 0.3), relative=True)
    assert rep.max_residual < 1e-3


def test_hardness_drives_integration_count(recon_cache):
    assert recon_cache("cot_half").n_used == 1
    assert recon_cache("csc2_quarter").n_used == 2
    assert recon_cache("abs_theta").n_used == 0


def test_constant_shift_only_moves_c0_of_reduced():
    # the shift turns into a sawtooth in the primitive, hence a delta in tc_full
    sf = catalog.get("cot_half").sectioned()
    a = reconstruct(sf, 64, reduce=True)
    b = reconstruct(sf.shifted(2.5), 64, reduce=True)
    assert [d.amplitude for d in b.deltas_removed] == pytest.approx([-5 * math.pi], abs=1e-8)
    assert (b.tc_reduced.c[0] - a.tc_reduced.c[0]).real == pytest.approx(2.5, abs=1e-8)
    assert np.max(np.abs(a.tc_reduced.c[1:] - b.tc_reduced.c[1:])) < 1e-8


def test_regular_point_is_widest_gap_midpoint():
    assert choose_regular_point([0.0]) == pytest.approx(math.pi)
    assert choose_regular_point([0.0, math.pi / 2]) == pytest.approx(-3 * math.pi / 4)
    assert choose_regular_point([]) == 0.0


def test_delta_taylor_is_poisson_kernel():
    A, loc = 1.7, 0.4
    tc = delta_taylor(DeltaComponent(loc, 0, A), 2000)
    for rho, th in [(0.5, 0.1), (0.9, 2.0), (0.3, -1.0)]:
        P = (1 - rho**2) / (2 * math.pi * (1 - 2 * rho * math.cos(th - loc) + rho**2))
        assert eval_inner(tc, DiskPoint(rho, th)).real == pytest.approx(A * P, rel=1e-12)


def test_delta_derivative_orders():
    d0 = delta_taylor(DeltaComponent(1.0, 0, 2.0), 16)
    d2 = delta_taylor(DeltaComponent(1.0, 2, 2.0), 16)
    assert d2 == angular_derivative_coeffs(d0, 2)
    with pytest.raises(ValidationError):
        DeltaComponent(0.0, -1, 1.0)


def test_detect_deltas_on_square_wave_primitive_levels():
    pp = sectional_integrate(catalog.get("square_wave").sectioned(), 1)
    assert detect_deltas(pp, 1) == []
    jumps = detect_deltas(pp, 0)
    assert [(d.location, round(d.amplitude, 9)) for d in jumps] == [(0.0, 2.0), (math.pi, -2.0)]


def test_detect_deltas_sees_jump_on_log_divergence():
    sf = SectionedFunction.uniform(lambda t: np.log(np.abs(2 * np.sin(t / 2))) + np.where(t > 0, 0.5, 0.0), [0.0, math.pi])
    pp = sectional_integrate(sf, 1)
    found = {round(d.location, 12): d.amplitude for d in detect_deltas(pp, 0)}
    assert found[0.0] == pytest.approx(0.5, abs=1e-6)
    assert found[round(math.pi, 12)] == pytest.approx(-0.5, abs=1e-6)


def test_square_wave_derivative_reduces_to_zero(recon_cache):
    res = recon_cache("square_wave", reduce=True, derivatives=1)
    amps = sorted(d.amplitude for d in res.deltas_removed)
    assert amps == pytest.approx([-2.0, 2.0], abs=1e-6)
    sf = catalog.get("square_wave").sectioned()
    rep = verify_roundtrip(res, sf, probes_away(sf.singular_points, 32, 0.3))
    assert rep.reduced_max_residual < 1e-6


@given(st.integers(1, 6), st.integers(0, 2**31))
def test_extended_fourier_equals_derivative_route(n, seed):
    rng = np.random.default_rng(seed)
    K = 40
    fc = FourierCoefficients(rng.normal(), rng.normal(size=K), rng.normal(size=K))
    via = taylor_to_fourier(angular_derivative_coeffs(fourier_to_taylor(fc), n))
    ext = extended_fourier(fc, n)
    assert np.array_equal(ext.alpha, via.alpha) and np.array_equal(ext.beta, via.beta)
    assert not ext.alpha0_determinate


def test_pipeline_errors_name_their_stage():
    sf = SectionedFunction.uniform(lambda t: np.abs(t) ** -1.5, [0.0])
    with pytest.raises(PipelineError) as info:
        reconstruct(sf, 32, n=0)
    assert info.value.stage == "fourier"
    osc = SectionedFunction.uniform(lambda t: np.sin(1 / np.abs(t)) / np.abs(t), [0.0])
    with pytest.raises(PipelineError) as info:
        reconstruct(osc, 32, nmax=2)
    assert info.value.stage == "classify"


def test_invalid_arguments():
    sf = catalog.get("abs_theta").sectioned()
    with pytest.raises(ValidationError):
        reconstruct(sf, 0)
    with pytest.raises(ValidationError):
        reconstruct(sf, 16, derivatives=2)


def test_injected_constant_is_invisible():
    # with one section a constant closes up without a jump
    sf = catalog.get("cot_half").sectioned()
    base = reconstruct(sf, 64, reduce=True)
    inj = reconstruct(sf, 64, reduce=True, added=[np.array([0.7])])
    assert inj.deltas_removed == ()
    assert np.max(np.abs(inj.tc_full.c - base.tc_full.c)) < 1e-9


def test_injected_linear_term_is_removed_as_deltas():
    sf = catalog.get("csc2_quarter").sectioned()
    base = reconstruct(sf, 64, reduce=True)
    inj = reconstruct(sf, 64, reduce=True, added=[np.array([0.7, -0.3])])
    assert inj.deltas_removed
    assert np.max(np.abs(inj.tc_reduced.c[1:] - base.tc_reduced.c[1:])) < 1e-6
    assert inj.diagnostics["reduced_alpha0_refit"] == pytest.approx(base.alpha0, abs=1e-6)
