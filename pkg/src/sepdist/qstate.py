"""Multipartite density matrices and entanglement diagnostics.

Subsystems are indexed in a fixed global order.  For the three-party systems
used throughout the package that order is ``(a, b, c)`` -> ``(0, 1, 2)``, with
the ancilla last.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field

import numpy as np

from . import _accel
from .errors import BadDims, BadIndex, BadPartition, InvalidState
from .matcore import as_cmat, dag

STATE_TOL = 1e-10
NEG_CUTOFF = _accel.NEG_CUTOFF

LABELS = "abcdefgh"


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A unit-trace positive semidefinite matrix with its tensor-factor dims."""

    mat: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        mat = as_cmat(self.mat)
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise BadDims(f"invalid subsystem dims {dims}")
        if int(np.prod(dims)) != mat.shape[0]:
            raise BadDims(f"dims {dims} do not multiply to matrix size {mat.shape[0]}")
        tr = np.trace(mat)
        if abs(tr - 1) > STATE_TOL:
            raise InvalidState(f"trace is {tr:.12g}, expected 1")
        herm = np.abs(mat - dag(mat)).max()
        if herm > STATE_TOL:
            raise InvalidState(f"not Hermitian (max deviation {herm:.3e})")
        lowest = np.linalg.eigvalsh(0.5 * (mat + dag(mat)))[0]
        if lowest < -STATE_TOL:
            raise InvalidState(f"negative eigenvalue {lowest:.3e}")
        mat = mat.copy()
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)
        object.__setattr__(self, "dims", dims)

    @classmethod
    def from_ket(cls, psi, dims) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=np.complex128).ravel()
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()), dims)

    @classmethod
    def maximally_mixed(cls, dims) -> "DensityMatrix":
        d = int(np.prod(dims))
        return cls(np.eye(d) / d, dims)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @property
    def n(self) -> int:
        return len(self.dims)

    def eigvals(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.mat)

    def allclose(self, other, atol: float = 1e-12) -> bool:
        other_mat = other.mat if isinstance(other, DensityMatrix) else np.asarray(other)
        return bool(np.abs(self.mat - other_mat).max() <= atol)


@dataclass(frozen=True)
class Bipartition:
    """Split of subsystem indices into two nonempty disjoint groups.

    The partial transpose acts on ``right``.
    """

    left: frozenset[int]
    right: frozenset[int]

    def __post_init__(self):
        left, right = frozenset(self.left), frozenset(self.right)
        if not left or not right:
            raise BadPartition("both sides of a bipartition must be nonempty")
        if left & right:
            raise BadPartition(f"sides overlap on {sorted(left & right)}")
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)

    @classmethod
    def parse(cls, spec: str) -> "Bipartition":
        """Build from a label such as ``"c|ab"`` or ``"c|(ab)"``; letters map a->0, b->1, ..."""
        try:
            lhs, rhs = spec.replace("(", "").replace(")", "").split("|")
            return cls(frozenset(LABELS.index(x) for x in lhs.strip()),
                       frozenset(LABELS.index(x) for x in rhs.strip()))
        except ValueError as exc:
            raise BadPartition(f"cannot parse bipartition {spec!r}") from exc

    @classmethod
    def single(cls, k: int, n: int) -> "Bipartition":
        """Subsystem ``k`` against all the others."""
        return cls(frozenset({k}), frozenset(range(n)) - {k})

    def swapped(self) -> "Bipartition":
        return Bipartition(self.right, self.left)

    def check(self, n: int) -> None:
        if self.left | self.right != frozenset(range(n)):
            raise BadPartition(f"{self} does not cover subsystems 0..{n - 1}")

    def __str__(self):
        def lab(s):
            txt = "".join(LABELS[i] if i < len(LABELS) else f"[{i}]" for i in sorted(s))
            return txt if len(s) == 1 else f"({txt})"

        return f"{lab(self.left)}|{lab(self.right)}"


# the three cuts of a tripartite (a, b, c) system
CUT_C_AB = Bipartition.parse("c|ab")
CUT_A_BC = Bipartition.parse("a|bc")
CUT_B_AC = Bipartition.parse("b|ac")


@dataclass(frozen=True)
class SeparabilityVerdict:
    negativity: float
    ppt: bool
    ball_certified: bool
    label: str = field(default="")


def _check_keep(keep, n) -> list[int]:
    keep = sorted(set(int(k) for k in keep))
    if not keep or keep[0] < 0 or keep[-1] >= n:
        raise BadIndex(f"keep={keep} invalid for {n} subsystems")
    return keep


def partial_trace_matrix(mat: np.ndarray, dims, keep) -> np.ndarray:
    """Partial trace on a raw matrix (or a stack of them, leading axis)."""
    dims = tuple(dims)
    n = len(dims)
    keep = _check_keep(keep, n)
    letters = string.ascii_letters
    row = list(letters[:n])
    col = [letters[n + k] if k in keep else row[k] for k in range(n)]
    out = "".join(row[k] for k in keep) + "".join(col[k] for k in keep)
    dk = int(np.prod([dims[k] for k in keep]))
    if mat.ndim == 3:
        m = mat.shape[0]
        res = np.einsum("Z" + "".join(row) + "".join(col) + "->Z" + out,
                        mat.reshape((m,) + dims + dims))
        return res.reshape(m, dk, dk)
    res = np.einsum("".join(row) + "".join(col) + "->" + out, mat.reshape(dims + dims))
    return res.reshape(dk, dk)


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Reduced state on the subsystems in ``keep`` (listed in global order)."""
    keep = _check_keep(keep, rho.n)
    return DensityMatrix(partial_trace_matrix(rho.mat, rho.dims, keep),
                         tuple(rho.dims[k] for k in keep))


def _mask(part: Bipartition, n: int) -> tuple[bool, ...]:
    part.check(n)
    return tuple(k in part.right for k in range(n))


def partial_transpose_matrix(mat: np.ndarray, dims, part: Bipartition) -> np.ndarray:
    dims = tuple(int(d) for d in dims)
    idx = _accel.pt_index(dims, _mask(part, len(dims)))
    d = mat.shape[-1]
    return mat.reshape(mat.shape[:-2] + (d * d,))[..., idx].reshape(mat.shape)


def partial_transpose(rho: DensityMatrix, part: Bipartition) -> np.ndarray:
    return partial_transpose_matrix(rho.mat, rho.dims, part)


def negativity_matrix(mat: np.ndarray, dims, part: Bipartition) -> float:
    ev = np.linalg.eigvalsh(partial_transpose_matrix(mat, dims, part))
    return float(np.abs(ev[ev < -NEG_CUTOFF]).sum())


def negativity(rho: DensityMatrix, part: Bipartition) -> float:
    """Sum of the magnitudes of the negative partial-transpose eigenvalues.

    Eigenvalues in ``(-1e-10, 0)`` are treated as zero.
    """
    return negativity_matrix(rho.mat, rho.dims, part)


def negativities(mats: np.ndarray, dims, part: Bipartition) -> tuple[np.ndarray, np.ndarray]:
    """Batched negativity over a stack of matrices.

    Returns ``(negativity, lowest_pt_eigenvalue)`` arrays.
    """
    dims = tuple(int(d) for d in dims)
    idx = _accel.pt_index(dims, _mask(part, len(dims)))
    return _accel.negativity_batch(mats, idx)


def ball_radius(d: int) -> float:
    return 1.0 / np.sqrt(d * (d - 1))


def ball_certified_separable(rho: DensityMatrix, part: Bipartition | None = None) -> bool:
    """Sufficient test: ``||rho - I/d||_F <= 1/sqrt(d(d-1))``.

    A state this close to the maximally mixed one is separable across every
    bipartite cut, so ``part`` only gets validated.  ``False`` is inconclusive.
    """
    if part is not None:
        part.check(rho.n)
    d = rho.dim
    dist = np.linalg.norm(rho.mat - np.eye(d) / d, "fro")
    return bool(dist <= ball_radius(d))


def ppt_is_sufficient(dims, part: Bipartition) -> bool:
    """Peres-Horodecki regime: 2x2 and 2x3 cuts."""
    dl = int(np.prod([dims[k] for k in part.left]))
    dr = int(np.prod([dims[k] for k in part.right]))
    return sorted((dl, dr)) in ([2, 2], [2, 3])


def verdict(rho: DensityMatrix, part: Bipartition, tol: float = NEG_CUTOFF) -> SeparabilityVerdict:
    neg = negativity(rho, part)
    ppt = neg <= tol
    ball = ball_certified_separable(rho, part)
    if not ppt:
        label = "entangled (NPT)"
    elif ball:
        label = "separable (ball certificate)"
    elif ppt_is_sufficient(rho.dims, part):
        label = "separable (PPT, Peres-Horodecki regime)"
    else:
        label = "PPT, not certified separable"
    return SeparabilityVerdict(neg, ppt, ball, label)


def permute_subsystems(mat: np.ndarray, dims, order) -> np.ndarray:
    """Reorder tensor factors: new factor ``k`` is old factor ``order[k]``."""
    dims = tuple(dims)
    n = len(dims)
    order = list(order)
    d = mat.shape[0]
    t = mat.reshape(dims + dims).transpose(order + [n + k for k in order])
    return t.reshape(d, d)


def embed_operator(op, dims, targets) -> np.ndarray:
    """Lift an operator on ``targets`` (in the given order) to the full space."""
    dims = tuple(int(d) for d in dims)
    targets = [int(t) for t in targets]
    n = len(dims)
    if len(set(targets)) != len(targets) or any(t < 0 or t >= n for t in targets):
        raise BadIndex(f"bad targets {targets} for {n} subsystems")
    op = as_cmat(op)
    dt = int(np.prod([dims[t] for t in targets]))
    if op.shape[0] != dt:
        raise BadDims(f"operator of size {op.shape[0]} does not match targets of dim {dt}")
    rest = [k for k in range(n) if k not in targets]
    drest = int(np.prod([dims[k] for k in rest])) if rest else 1
    full = np.kron(op, np.eye(drest))
    # full currently acts on factor order targets + rest; move back to global order
    current = targets + rest
    inverse = [current.index(k) for k in range(n)]
    return permute_subsystems(full, [dims[k] for k in current], inverse)


def haar_ket(d: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return z / np.linalg.norm(z)


def random_product_kets(dims, part: Bipartition, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` Haar-random pure kets, each a product across ``part``."""
    dims = tuple(int(d) for d in dims)
    part.check(len(dims))
    left, right = sorted(part.left), sorted(part.right)
    dl = int(np.prod([dims[k] for k in left]))
    dr = int(np.prod([dims[k] for k in right]))
    current = left + right
    inverse = [current.index(k) for k in range(len(dims))]
    shape = tuple(dims[k] for k in current)
    kets = np.empty((count, int(np.prod(dims))), dtype=np.complex128)
    for i in range(count):
        psi = np.kron(haar_ket(dl, rng), haar_ket(dr, rng))
        kets[i] = psi.reshape(shape).transpose(inverse).ravel()
    return kets


def random_separable_matrix(dims, part: Bipartition, terms: int, rng: np.random.Generator) -> np.ndarray:
    if terms < 1:
        raise ValueError("terms must be >= 1")
    kets = random_product_kets(dims, part, terms, rng)
    weights = rng.dirichlet(np.ones(terms)) if terms > 1 else np.ones(1)
    return np.einsum("k,ki,kj->ij", weights, kets, kets.conj())


def random_separable_state(dims, part: Bipartition, terms: int = 1, seed=None) -> DensityMatrix:
    """Convex mixture of ``terms`` Haar-random pure product states across ``part``.

    ``seed`` may be anything accepted by ``numpy.random.default_rng`` (an int,
    a ``SeedSequence`` or a ``Generator``).
    """
    rng = np.random.default_rng(seed)
    return DensityMatrix(random_separable_matrix(dims, part, terms, rng), dims)
