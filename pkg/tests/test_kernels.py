import os
import subprocess
import sys

import numpy as np
import pytest

from quadstab import _kernels_py, kernels
from quadstab.core import eom_matrix
from quadstab.optomech2 import TwoModeParams, build_two_mode
from quadstab.optomech3 import ThreeModeParams, build_three_mode

try:
    from quadstab import _kernels as compiled
except ImportError:  # extension not built
    compiled = None

needs_compiled = pytest.mark.skipif(compiled is None, reason="compiled extension not built")


def spectral_max_re(V):
    return np.linalg.eigvals(eom_matrix(V).A).real.max()


def test_python_two_mode_matches_eigensolver():
    deltas = np.linspace(-3, 3, 13)
    kappas = np.linspace(0, 1.2, 7)
    out = _kernels_py.two_mode_max_re(deltas, 1.0, kappas)
    assert out.shape == (13, 7)
    for i, d in enumerate(deltas):
        for j, k in enumerate(kappas):
            ref = spectral_max_re(build_two_mode(TwoModeParams(d, 1.0, k)))
            assert out[i, j] == pytest.approx(ref, abs=1e-6)


def test_python_three_mode_matches_eigensolver():
    g = np.linspace(0, 1, 9)
    out = _kernels_py.three_mode_max_re(-1.5, 0.5, 1.0, g, g)
    assert out.shape == (9, 9)
    for i, a in enumerate(g):
        for j, b in enumerate(g):
            ref = spectral_max_re(build_three_mode(ThreeModeParams(-1.5, 0.5, 1.0, a, b)))
            assert out[i, j] == pytest.approx(ref, abs=1e-6)


@needs_compiled
@pytest.mark.parametrize("D1,D2", [(1.5, 0.5), (-1.5, -0.5), (-1.5, 0.5), (0.7, 0.7)])
def test_backends_agree_three_mode(D1, D2):
    g = np.linspace(0, 1, 41)
    a = compiled.three_mode_max_re(D1, D2, 1.0, g, g)
    b = _kernels_py.three_mode_max_re(D1, D2, 1.0, g, g)
    # square roots amplify differences near double roots of the cubic
    np.testing.assert_allclose(a, b, atol=1e-5)


@needs_compiled
def test_backends_agree_two_mode():
    deltas = np.linspace(-3, 3, 61)
    kappas = np.linspace(0, 1, 41)
    np.testing.assert_allclose(compiled.two_mode_max_re(deltas, 1.0, kappas),
                               _kernels_py.two_mode_max_re(deltas, 1.0, kappas), atol=1e-7)


def test_wrappers_accept_lists_and_scalars():
    out = kernels.two_mode_max_re([1.5], 1.0, 0.9)
    assert out.shape == (1, 1) and out[0, 0] > 0.8
    assert kernels.three_mode_max_re(1.5, 1.5, 1.0, [1.0], [0.6])[0, 0] == pytest.approx(1.13980049755854, abs=1e-8)


def _backend_in_subprocess(value):
    env = dict(os.environ)
    env.pop("QUADSTAB_PURE_PYTHON", None)
    if value is not None:
        env["QUADSTAB_PURE_PYTHON"] = value
    out = subprocess.run([sys.executable, "-c", "from quadstab.kernels import BACKEND; print(BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    return out.stdout.strip()


def test_environment_selects_python_backend():
    assert _backend_in_subprocess("1") == "python"
    expected = "compiled" if compiled is not None else "python"
    assert _backend_in_subprocess(None) == expected


def test_benchmark_script_runs():
    root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    script = os.path.join(root, "benchmarks", "bench_kernels.py")
    out = subprocess.run([sys.executable, script, "--n", "21", "--repeat", "1"],
                         capture_output=True, text=True, check=True)
    assert "speedup" in out.stdout and "three_mode_max_re" in out.stdout
