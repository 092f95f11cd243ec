"""Batched hot kernels with a numba path and a pure-numpy path.

The sweeps and audits spend nearly all their time in three loops: conjugating
a state by ``exp(-iHt)`` on a time grid, partially transposing and
diagonalizing a stack of matrices, and applying a Kraus family to a stack of
states.  Each loop lives here twice, once as ``@njit`` code and once as
vectorized numpy, with identical signatures.

Backend selection:

* ``SEPDIST_NUMBA=0`` in the environment forces the numpy path.
* Otherwise numba is used when it imports cleanly.
* ``set_backend("numpy" | "numba")`` switches at runtime (used by the
  benchmark and by the equivalence tests).
"""

from __future__ import annotations

import os
import types
from functools import lru_cache

import numpy as np

NEG_CUTOFF = 1e-10

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    HAVE_NUMBA = False


@lru_cache(maxsize=None)
def pt_index(dims: tuple[int, ...], mask: tuple[bool, ...]) -> np.ndarray:
    """Flat gather index realizing the partial transpose on ``mask`` subsystems.

    ``mat.ravel()[pt_index(dims, mask)].reshape(mat.shape)`` transposes every
    subsystem ``k`` with ``mask[k]`` true and leaves the others alone.
    """
    n = len(dims)
    d = int(np.prod(dims))
    axes = list(range(2 * n))
    for k in range(n):
        if mask[k]:
            axes[k], axes[k + n] = axes[k + n], axes[k]
    idx = np.arange(d * d).reshape(dims + dims).transpose(axes).reshape(d * d)
    idx = np.ascontiguousarray(idx, dtype=np.int64)
    idx.setflags(write=False)
    return idx


# -- numpy path ---------------------------------------------------------------


def _evolve_batch_np(vecs, vals, rho, times):
    rho_eig = vecs.conj().T @ rho @ vecs
    gaps = vals[:, None] - vals[None, :]
    phases = np.exp(-1j * gaps[None, :, :] * times[:, None, None])
    return vecs[None] @ (rho_eig[None] * phases) @ vecs.conj().T[None]


def _negativity_batch_np(mats, index, cutoff):
    m, d, _ = mats.shape
    pts = mats.reshape(m, d * d)[:, index].reshape(m, d, d)
    ev = np.linalg.eigvalsh(pts)
    neg = np.abs(np.where(ev < -cutoff, ev, 0.0)).sum(axis=1)
    return neg, ev[:, 0]


def _kraus_apply_batch_np(kraus, rhos):
    # sum_j K_j rho K_j^dagger for every rho in the stack
    return np.einsum("jab,mbc,jdc->mad", kraus, rhos, kraus.conj(), optimize=True)


def _conjugate_sequence_np(unitaries, rho, pattern):
    out = np.empty((len(pattern),) + rho.shape, dtype=np.complex128)
    cur = rho
    for k, which in enumerate(pattern):
        u = unitaries[which]
        cur = u @ cur @ u.conj().T
        out[k] = cur
    return out


NUMPY = types.SimpleNamespace(
    name="numpy",
    evolve_batch=_evolve_batch_np,
    negativity_batch=_negativity_batch_np,
    kraus_apply_batch=_kraus_apply_batch_np,
    conjugate_sequence=_conjugate_sequence_np,
)


# -- numba path ---------------------------------------------------------------

if HAVE_NUMBA:

    @numba.njit(cache=True, nogil=True)
    def _evolve_batch_nb(vecs, vals, rho, times):
        d = rho.shape[0]
        vh = np.ascontiguousarray(vecs.conj().T)
        rho_eig = vh @ rho @ vecs
        out = np.empty((times.shape[0], d, d), dtype=np.complex128)
        tmp = np.empty((d, d), dtype=np.complex128)
        for k in range(times.shape[0]):
            t = times[k]
            for i in range(d):
                for j in range(d):
                    tmp[i, j] = rho_eig[i, j] * np.exp(-1j * (vals[i] - vals[j]) * t)
            out[k] = vecs @ tmp @ vh
        return out

    @numba.njit(cache=True, nogil=True)
    def _negativity_batch_nb(mats, index, cutoff):
        m, d, _ = mats.shape
        neg = np.zeros(m)
        lowest = np.empty(m)
        for k in range(m):
            pt = np.ascontiguousarray(mats[k]).ravel()[index].reshape((d, d))
            ev = np.linalg.eigvalsh(pt)
            lowest[k] = ev[0]
            s = 0.0
            for x in ev:
                if x < -cutoff:
                    s -= x
            neg[k] = s
        return neg, lowest

    @numba.njit(cache=True, nogil=True)
    def _kraus_apply_batch_nb(kraus, rhos):
        # superoperator S[(a,e),(b,c)] = sum_j K_j[a,b] conj(K_j[e,c]), then one matmul
        m, d, _ = rhos.shape
        s = np.zeros((d * d, d * d), dtype=np.complex128)
        for j in range(kraus.shape[0]):
            kj = kraus[j]
            for a in range(d):
                for b in range(d):
                    x = kj[a, b]
                    if x == 0:
                        continue
                    for e in range(d):
                        for c in range(d):
                            s[a * d + e, b * d + c] += x * np.conj(kj[e, c])
        flat = np.ascontiguousarray(rhos).reshape((m, d * d))
        return (flat @ np.ascontiguousarray(s.T)).reshape((m, d, d))

    @numba.njit(cache=True, nogil=True)
    def _conjugate_sequence_nb(unitaries, rho, pattern):
        d = rho.shape[0]
        out = np.empty((pattern.shape[0], d, d), dtype=np.complex128)
        udag = np.empty_like(unitaries)
        for j in range(unitaries.shape[0]):
            udag[j] = np.ascontiguousarray(unitaries[j].conj().T)
        cur = rho.copy()
        for k in range(pattern.shape[0]):
            w = pattern[k]
            cur = unitaries[w] @ cur @ udag[w]
            out[k] = cur
        return out

    NUMBA = types.SimpleNamespace(
        name="numba",
        evolve_batch=_evolve_batch_nb,
        negativity_batch=_negativity_batch_nb,
        kraus_apply_batch=_kraus_apply_batch_nb,
        conjugate_sequence=_conjugate_sequence_nb,
    )
else:  # pragma: no cover
    NUMBA = None

BACKENDS = {"numpy": NUMPY}
if NUMBA is not None:
    BACKENDS["numba"] = NUMBA


def _default_backend() -> str:
    if os.environ.get("SEPDIST_NUMBA", "1").strip().lower() in {"0", "false", "no", "off"}:
        return "numpy"
    return "numba" if HAVE_NUMBA else "numpy"


_active = BACKENDS[_default_backend()]


def set_backend(name: str) -> None:
    global _active
    if name not in BACKENDS:
        raise ValueError(f"unknown or unavailable backend {name!r}; have {sorted(BACKENDS)}")
    _active = BACKENDS[name]


def backend() -> str:
    return _active.name


def _c(a):
    return np.ascontiguousarray(a, dtype=np.complex128)


def evolve_batch(vecs, vals, rho, times) -> np.ndarray:
    """Stack of ``U(t) rho U(t)^dagger`` for ``U(t) = V exp(-i diag(vals) t) V^dagger``."""
    return _active.evolve_batch(
        _c(vecs), np.ascontiguousarray(vals, dtype=np.float64), _c(rho),
        np.ascontiguousarray(times, dtype=np.float64),
    )


def negativity_batch(mats, index, cutoff: float = NEG_CUTOFF) -> tuple[np.ndarray, np.ndarray]:
    """Negativity and lowest partial-transpose eigenvalue for each matrix in a stack."""
    mats = _c(mats)
    if mats.shape[0] == 0:
        return np.zeros(0), np.zeros(0)
    return _active.negativity_batch(mats, np.asarray(index, dtype=np.int64), float(cutoff))


def kraus_apply_batch(kraus, rhos) -> np.ndarray:
    return _active.kraus_apply_batch(_c(kraus), _c(rhos))


def conjugate_sequence(unitaries, rho, pattern) -> np.ndarray:
    """Apply ``unitaries[pattern[0]]``, ``unitaries[pattern[1]]``, ... in turn,
    returning the state after every application."""
    return _active.conjugate_sequence(
        _c(unitaries), _c(rho), np.ascontiguousarray(pattern, dtype=np.int64)
    )
