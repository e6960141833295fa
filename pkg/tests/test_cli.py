import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from circlechain import catalog
from circlechain.cli import main, probe_grid
from circlechain.coeffs import TaylorCoefficients
from circlechain.fileio import CoefficientFile
from circlechain.reconstruct import DeltaComponent, delta_taylor


def run(*argv):
    buf = io.StringIO()
    code = main(list(argv), out=buf)
    return code, buf.getvalue()


def write_coeffs(path, c):
    CoefficientFile(TaylorCoefficients(np.asarray(c, dtype=complex))).write(path)
    return str(path)


def test_list_shows_every_entry():
    code, text = run("list")
    assert code == 0
    for name in catalog.names():
        assert name in text


def test_analyze_json():
    code, text = run("analyze", "mix_hard", "--json")
    assert code == 0
    rows = json.loads(text)["points"]
    assert [(r["kind"], r["degree"]) for r in rows] == [("hard", 1), ("hard", 2)]


def test_analyze_exceeding_nmax_exits_2():
    code, _ = run("analyze", "csc2_quarter", "--nmax", "1")
    assert code == 2


def test_unknown_name_and_bad_args_exit_1():
    assert run("analyze", "nope")[0] == 1
    assert run("reconstruct")[0] == 1
    assert run("frobnicate")[0] == 1


def test_reconstruct_writes_deterministic_files(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    code, text = run("reconstruct", "cot_half", "--order", "64", "-o", str(a))
    assert code == 0 and "n_used: 1" in text
    run("reconstruct", "cot_half", "--order", "64", "-o", str(b))
    assert a.read_bytes() == b.read_bytes()
    cf = CoefficientFile.read(a)
    assert cf.K == 64 and cf.provenance["source"] == "cot_half"
    assert np.max(np.abs(cf.coefficients.c[1:] + 1j)) < 1e-9


def test_reconstruct_default_paths(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code, text = run("reconstruct", "square_wave", "-K", "32", "--reduce", "--derivatives", "1")
    assert code == 0
    assert (tmp_path / "square_wave.coeffs.json").exists()
    assert (tmp_path / "square_wave.coeffs.reduced.json").exists()
    assert text.count("delta removed") == 2


def test_eval_csv(tmp_path):
    path = write_coeffs(tmp_path / "c.json", [0, -1j, 0])  # w = -i z, Re on the circle is sin
    code, text = run("eval", path, "--rho", "0.5", "--theta", str(math.pi / 2))
    assert code == 0
    lines = text.strip().splitlines()
    assert lines[0] == "rho,theta,re,im,boundary"
    rho, theta, re, im, bnd = lines[1].split(",")
    assert float(re) == pytest.approx(0.5) and float(bnd) == pytest.approx(1.0)


def test_eval_grid_shape(tmp_path):
    path = write_coeffs(tmp_path / "c.json", [1, 1])
    code, text = run("eval", path, "--theta-count", "8")
    rows = text.strip().splitlines()[1:]
    assert len(rows) == 3 * 8
    thetas = sorted({float(r.split(",")[1]) for r in rows})
    assert thetas[-1] == pytest.approx(math.pi) and 0.0 in thetas


def test_eval_marks_delta_location_divergent(tmp_path):
    tc = delta_taylor(DeltaComponent(0.0, 0, 1.0), 256)
    path = tmp_path / "d.json"
    CoefficientFile(tc).write(path)
    code, text = run("eval", str(path), "--rho", "0.5", "--theta", "0", "1")
    rows = [r.split(",") for r in text.strip().splitlines()[1:]]
    assert rows[0][4] == "divergent"
    assert float(rows[1][4]) == pytest.approx(0.0, abs=1e-6)


def test_eval_rejects_bad_rho(tmp_path):
    path = write_coeffs(tmp_path / "c.json", [1, 1])
    assert run("eval", path, "--rho", "1.0")[0] == 1


def test_eval_independent_of_thread_count(tmp_path, monkeypatch):
    path = write_coeffs(tmp_path / "c.json", np.r_[0, np.full(64, -1j)])
    monkeypatch.setenv("CIRCLECHAIN_THREADS", "1")
    one = run("eval", path, "--theta-count", "40")[1]
    monkeypatch.setenv("CIRCLECHAIN_THREADS", "4")
    four = run("eval", path, "--theta-count", "40")[1]
    assert one == four


def test_chain_walk(tmp_path):
    src = write_coeffs(tmp_path / "cot.json", np.r_[0, np.full(32, -1j)])
    out = tmp_path / "log.json"
    assert run("chain", src, "--steps", "-1", "-o", str(out))[0] == 0
    cf = CoefficientFile.read(out)
    k = np.arange(1, 33)
    assert np.allclose(cf.coefficients.c[1:], -1.0 / k, atol=1e-15)
    assert cf.provenance["walk"] == [-1]
    back = tmp_path / "back.json"
    run("chain", str(out), "--steps", "1", "-o", str(back))
    assert np.allclose(CoefficientFile.read(back).coefficients.c[1:], -1j)
    assert run("chain", src, "--steps", "0")[0] == 1


def test_bad_file_version_exits_1(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"version": 9, "K": 1, "coefficients": [[0, 0], [1, 0]]}')
    assert run("eval", str(p))[0] == 1


def test_compare_against_oracle(tmp_path):
    K = 64
    path = write_coeffs(tmp_path / "o.json", catalog.get("cot_half").taylor(K))
    code, text = run("compare", "cot_half", path)
    assert code == 0
    fields = dict(line.split(": ", 1) for line in text.strip().splitlines())
    assert float(fields["coefficient_max_rel_error_k_le_64"]) == 0.0


def test_probe_grid_keeps_clearance():
    pr = probe_grid([0.0, 1.0])
    assert len(pr) == 64
    dist = np.min(np.abs(np.angle(np.exp(1j * (pr[:, None] - np.array([0.0, 1.0]))))), axis=1)
    assert np.all(dist >= 0.3)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "circlechain", "list"], capture_output=True, text=True)
    assert proc.returncode == 0 and "cot_half" in proc.stdout
