import os
import subprocess
import sys

import numpy as np
import pytest

from pass_ma import _kernels
from pass_ma.channel import PhysicalConfig
from pass_ma.power import RateRequirements, power_coefficients

needs_numba = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not installed")
CFG = PhysicalConfig()
ARGS = (CFG.k0, CFG.kg, CFG.eta)


@needs_numba
def test_gain_batch_backends_agree():
    rng = np.random.default_rng(3)
    xp = np.sort(rng.uniform(0, 15, (200, 6)), axis=1)
    a = _kernels.numpy_impl.gain_batch(xp, 7.0, 3.5, *ARGS)
    b = _kernels.numba_impl.gain_batch(xp, 7.0, 3.5, *ARGS)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=0)


@needs_numba
def test_pair_search_backends_agree():
    rng = np.random.default_rng(4)
    xa = np.sort(rng.uniform(0, 15, 60))
    xb = np.sort(rng.uniform(0, 15, 60))
    coef = power_coefficients("noma", RateRequirements(), 2)
    xu, D = np.array([4.0, 11.0]), np.array([3.2, 5.0])
    ra = _kernels.numpy_impl.pair_min_power(xa, xb, 0.005, xu, D, *ARGS, coef)
    rb = _kernels.numba_impl.pair_min_power(xa, xb, 0.005, xu, D, *ARGS, coef)
    assert ra[1:] == rb[1:]
    assert ra[0] == pytest.approx(rb[0], rel=1e-12)


@needs_numba
@pytest.mark.parametrize("n", [1, 2, 3])
def test_combo_search_backends_agree(n):
    grid = 5.0 + np.arange(40) * CFG.wavelength / 16
    ga, ia = _kernels.numpy_impl.combo_max_gain(grid, n, CFG.wavelength / 2, 5.1, 3.0, *ARGS)
    gb, ib = _kernels.numba_impl.combo_max_gain(grid, n, CFG.wavelength / 2, 5.1, 3.0, *ARGS)
    assert list(ia) == list(ib)
    assert ga == pytest.approx(gb, rel=1e-12)


def test_pair_search_respects_spacing():
    xa = np.array([1.0, 2.0])
    coef = power_coefficients("fdma", RateRequirements(), 2)
    best, i, j = _kernels.pair_min_power(xa, xa, 0.5, np.array([1.0, 2.0]), np.array([3.0, 3.0]), *ARGS, coef)
    assert (i, j) == (0, 1)


def test_scheme_power_zero_coefficients():
    coef = np.array([[0.0, 2.0]])
    out = _kernels.scheme_power(coef, np.array([0.0, 1.0]), np.array([1.0, 4.0]))
    np.testing.assert_allclose(out, [2.0, 0.5])


def test_env_flag_forces_numpy():
    env = dict(os.environ, PASS_MA_NO_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", "from pass_ma import _kernels; print(_kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
