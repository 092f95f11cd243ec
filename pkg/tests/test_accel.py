import os
import subprocess
import sys

import numpy as np
import pytest

from sepdist import _accel

pytestmark = pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not installed")


@pytest.fixture
def both():
    prev = _accel.backend()
    yield
    _accel.set_backend(prev)


def _run(name, fn, *args):
    _accel.set_backend(name)
    return getattr(_accel, fn)(*args)


def _rand_rho(d, rng):
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    r = z @ z.conj().T
    return r / np.trace(r)


def test_evolve_agrees(both, rng):
    z = rng.standard_normal((12, 12)) + 1j * rng.standard_normal((12, 12))
    vals, vecs = np.linalg.eigh(z + z.conj().T)
    rho = _rand_rho(12, rng)
    times = np.linspace(0, 50, 37)
    a = _run("numpy", "evolve_batch", vecs, vals, rho, times)
    b = _run("numba", "evolve_batch", vecs, vals, rho, times)
    assert np.abs(a - b).max() <= 1e-12


def test_negativity_agrees(both, rng):
    mats = np.stack([_rand_rho(12, rng) for _ in range(20)])
    idx = _accel.pt_index((2, 2, 3), (False, True, True))
    na, la = _run("numpy", "negativity_batch", mats, idx)
    nb, lb = _run("numba", "negativity_batch", mats, idx)
    assert np.abs(na - nb).max() <= 1e-12
    assert np.abs(la - lb).max() <= 1e-12


def test_kraus_and_sequence_agree(both, rng):
    kraus = rng.standard_normal((3, 8, 8)) + 1j * rng.standard_normal((3, 8, 8))
    rhos = np.stack([_rand_rho(8, rng) for _ in range(5)])
    a = _run("numpy", "kraus_apply_batch", kraus, rhos)
    b = _run("numba", "kraus_apply_batch", kraus, rhos)
    assert np.abs(a - b).max() <= 1e-12
    q, _ = np.linalg.qr(kraus[0])
    q2, _ = np.linalg.qr(kraus[1])
    pattern = [0, 1, 1, 0, 1]
    a = _run("numpy", "conjugate_sequence", np.stack([q, q2]), rhos[0], pattern)
    b = _run("numba", "conjugate_sequence", np.stack([q, q2]), rhos[0], pattern)
    assert np.abs(a - b).max() <= 1e-12


def test_pt_index_is_partial_transpose(rng):
    z = rng.standard_normal((6, 6))
    idx = _accel.pt_index((2, 3), (False, True))
    got = z.ravel()[idx].reshape(6, 6)
    want = z.reshape(2, 3, 2, 3).transpose(0, 3, 2, 1).reshape(6, 6)
    assert np.array_equal(got, want)


def test_unknown_backend():
    with pytest.raises(ValueError):
        _accel.set_backend("fortran")


def test_env_flag_selects_numpy():
    env = dict(os.environ, SEPDIST_NUMBA="0")
    out = subprocess.run([sys.executable, "-c", "from sepdist import _accel; print(_accel.backend())"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
