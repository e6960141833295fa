import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from circlechain.coeffs import TaylorCoefficients
from circlechain.fileio import CoefficientFile, FileFormatError, format_float

fl = st.floats(allow_nan=False, allow_infinity=False, width=64)


@given(arrays(float, st.integers(2, 30), elements=fl), st.integers(0, 2**31))
def test_write_read_is_exact(re, seed):
    im = np.random.default_rng(seed).normal(size=re.size)
    cf = CoefficientFile(TaylorCoefficients(re + 1j * im), {"function": "x", "K": re.size - 1})
    back = CoefficientFile.from_text(cf.to_text())
    assert np.array_equal(back.coefficients.c, cf.coefficients.c)
    assert back.provenance == cf.provenance
    assert back.to_text() == cf.to_text()


def test_negative_zero_written_as_zero():
    assert format_float(-0.0) == "0"
    with pytest.raises(ValueError):
        format_float(float("inf"))


def test_file_roundtrip(tmp_path):
    tc = TaylorCoefficients(np.array([0.5, 1 - 1j, 1e-300j]))
    path = tmp_path / "c.json"
    CoefficientFile(tc).write(path)
    assert CoefficientFile.read(path).coefficients == tc


@pytest.mark.parametrize(
    "text",
    [
        "not json",
        "[]",
        '{"version": 2, "K": 1, "coefficients": [[0, 0], [1, 0]]}',
        '{"version": 1, "K": 2, "coefficients": [[0, 0], [1, 0]]}',
        '{"version": 1, "K": 1, "coefficients": [[0, 0], ["a", 0]]}',
        '{"version": 1, "K": 1, "coefficients": [[0, 0], [1, 0]], "provenance": 3}',
        '{"version": 1, "K": true, "coefficients": [[0, 0], [1, 0]]}',
    ],
)
def test_malformed_files_rejected(text):
    with pytest.raises(FileFormatError):
        CoefficientFile.from_text(text)


def test_missing_file(tmp_path):
    with pytest.raises(FileFormatError):
        CoefficientFile.read(tmp_path / "nope.json")
