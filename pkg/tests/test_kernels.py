import subprocess
import sys

import numpy as np
import pytest

from qvikit import kernels
from qvikit.verify import shifted_square_problem

needs_numba = pytest.mark.skipif(not kernels.NUMBA_AVAILABLE,
                                 reason="numba not installed")


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@needs_numba
def test_box_backends_agree(rng):
    Z = rng.normal(scale=5.0, size=(500, 3))
    lo = -np.ones(3)
    up = np.ones(3)
    a = kernels.box_project_batch_numpy(Z, lo, up)
    b = kernels.box_project_batch_numba(Z, lo, up)
    assert np.array_equal(a, b)


@needs_numba
def test_segment_backends_agree(rng):
    A = rng.normal(size=(500, 2))
    B = rng.normal(size=(500, 2))
    Z = rng.normal(scale=5.0, size=(500, 2))
    a = kernels.segment_project_batch_numpy(A, B, Z)
    b = kernels.segment_project_batch_numba(A, B, Z)
    assert np.allclose(a, b, atol=1e-15)


@needs_numba
def test_polytope_backends_agree(rng):
    C = shifted_square_problem().C
    Z = rng.normal(scale=3.0, size=(500, 2))
    a, ok_a = kernels.polytope_project_batch_numpy(
        Z, C._mats, C._offs, C._G, C._h, 1e-9)
    b, ok_b = kernels.polytope_project_batch_numba(
        Z, C._mats, C._offs, C._G, C._h, 1e-9)
    assert np.array_equal(ok_a, ok_b)
    assert np.allclose(a, b, atol=1e-15)


@needs_numba
def test_dykstra_backends_agree(rng):
    lo = -np.ones(4)
    up = np.ones(4)
    G = np.array([[1.0, 1.0, 1.0, 1.0], [1.0, -1.0, 0.0, 0.0]])
    h = np.array([1.0, -0.5])
    Z = rng.normal(scale=3.0, size=(50, 4))
    a, conv_a = kernels.dykstra_project_batch_numpy(Z, lo, up, True, G, h,
                                                    1e-12, 100_000)
    b, conv_b = kernels.dykstra_project_batch_numba(Z, lo, up, True, G, h,
                                                    1e-12, 100_000)
    assert conv_a.all() and conv_b.all()
    assert np.allclose(a, b, atol=1e-11)


def _backend_under_env(value: str | None) -> str:
    code = "from qvikit import kernels; print(kernels.BACKEND)"
    env = {"PATH": "/usr/bin:/bin", "QVIKIT_DISABLE_NUMBA": value or ""}
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    return out.stdout.strip()


def test_env_flag_selects_numpy_backend():
    assert _backend_under_env("1") == "numpy"


@needs_numba
def test_default_backend_is_numba():
    assert _backend_under_env(None) == "numba"
    assert _backend_under_env("0") == "numba"
