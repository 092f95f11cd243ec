"""Small dense complex linear algebra.

Everything here works on plain ``numpy`` arrays of shape ``(d, d)`` with
``d`` at most a few dozen.  Exponentials of Hermitian matrices go through an
exact eigendecomposition so that the result is unitary to machine precision.
"""

from __future__ import annotations

import enum

import numpy as np

from .errors import NotHermitian

HERMITIAN_TOL = 1e-10


class NormKind(str, enum.Enum):
    SPECTRAL = "spectral"
    FROBENIUS = "frobenius"
    TRACE = "trace"


def as_cmat(a) -> np.ndarray:
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def dag(a: np.ndarray) -> np.ndarray:
    return np.conj(a).T


def kron(a, b) -> np.ndarray:
    """Kronecker product; entry ``(i1*db + i2, j1*db + j2)`` is ``a[i1,j1]*b[i2,j2]``."""
    return np.kron(as_cmat(a), as_cmat(b))


def kron_all(*mats) -> np.ndarray:
    out = np.ones((1, 1), dtype=np.complex128)
    for m in mats:
        out = np.kron(out, m)
    return out


def hermiticity_error(h: np.ndarray) -> float:
    return float(np.linalg.norm(h - dag(h), 2))


def check_hermitian(h, tol: float = HERMITIAN_TOL) -> np.ndarray:
    h = as_cmat(h)
    err = hermiticity_error(h)
    if err > tol:
        raise NotHermitian(f"||h - h^dagger||_2 = {err:.3e} exceeds {tol:.0e}")
    return h


def hermitian_eig(h) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(evals, evecs)`` with eigenvalues ascending and ``evecs`` unitary,
    so that ``h == evecs @ diag(evals) @ evecs^dagger``.

    Raises:
        NotHermitian: if ``h`` deviates from Hermitian by more than 1e-10 in
            spectral norm.
    """
    h = check_hermitian(h)
    # symmetrize away round-off before handing to LAPACK
    evals, evecs = np.linalg.eigh(0.5 * (h + dag(h)))
    return evals, evecs


def expm_i(h, t: float) -> np.ndarray:
    """Return ``exp(-i h t)`` for Hermitian ``h``."""
    evals, evecs = hermitian_eig(h)
    return (evecs * np.exp(-1j * evals * t)) @ dag(evecs)


def norm(a, kind: NormKind | str = NormKind.SPECTRAL) -> float:
    a = as_cmat(a)
    kind = NormKind(kind)
    if kind is NormKind.FROBENIUS:
        return float(np.linalg.norm(a, "fro"))
    sv = np.linalg.svd(a, compute_uv=False)
    if kind is NormKind.SPECTRAL:
        return float(sv[0])
    return float(sv.sum())


def vandermonde_det(d) -> float:
    """Determinant of the 3x3 Vandermonde matrix, ``(d2-d1)(d3-d1)(d3-d2)``."""
    d1, d2, d3 = (float(x) for x in d)
    return (d2 - d1) * (d3 - d1) * (d3 - d2)


def is_unitary(u: np.ndarray, tol: float = 1e-10) -> bool:
    return bool(np.linalg.norm(dag(u) @ u - np.eye(u.shape[0]), 2) <= tol)
