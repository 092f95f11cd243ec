"""Completely positive maps given by Kraus operators.

Two maps are considered equal when their Choi matrices agree; composition,
trace preservation and non-entangling audits are all phrased in those terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _accel
from .errors import DimMismatch
from .matcore import as_cmat, dag
from .qstate import (
    Bipartition,
    DensityMatrix,
    embed_operator,
    negativities,
    negativity,
    random_separable_matrix,
)

TP_TOL = 1e-12
WITNESS_TOL = 1e-8
DIMS3 = (2, 2, 2)


@dataclass(frozen=True, eq=False)
class KrausMap:
    kraus: tuple[np.ndarray, ...]
    dims: tuple[int, ...]

    def __post_init__(self):
        ks = tuple(as_cmat(k) for k in self.kraus)
        dims = tuple(int(d) for d in self.dims)
        d = int(np.prod(dims))
        if not ks:
            raise DimMismatch("a Kraus map needs at least one operator")
        for k in ks:
            if k.shape != (d, d):
                raise DimMismatch(f"Kraus operator of shape {k.shape} does not match dims {dims}")
        object.__setattr__(self, "kraus", ks)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    def stack(self) -> np.ndarray:
        return np.stack(self.kraus)

    def tp_error(self) -> float:
        s = sum(dag(k) @ k for k in self.kraus)
        return float(np.linalg.norm(s - np.eye(self.dim), 2))

    def is_trace_preserving(self, tol: float = TP_TOL) -> bool:
        return self.tp_error() <= tol

    def pruned(self, tol: float = 0.0) -> "KrausMap":
        """Drop operators whose entries are all at most ``tol`` in magnitude."""
        keep = tuple(k for k in self.kraus if np.abs(k).max() > tol)
        return KrausMap(keep or self.kraus[:1], self.dims)


def identity_map(dims) -> KrausMap:
    d = int(np.prod(dims))
    return KrausMap((np.eye(d),), dims)


def depolarizing_map(dims) -> KrausMap:
    """Completely depolarizing channel, ``rho -> I/d`` for every input."""
    d = int(np.prod(dims))
    ops = []
    for i in range(d):
        for j in range(d):
            k = np.zeros((d, d), dtype=np.complex128)
            k[i, j] = 1 / math.sqrt(d)
            ops.append(k)
    return KrausMap(tuple(ops), dims)


def _check_dims(m: KrausMap, dims):
    if tuple(m.dims) != tuple(dims):
        raise DimMismatch(f"map dims {m.dims} do not match {tuple(dims)}")


def apply(m: KrausMap, rho: DensityMatrix) -> DensityMatrix:
    _check_dims(m, rho.dims)
    out = sum(k @ rho.mat @ dag(k) for k in m.kraus)
    out = 0.5 * (out + dag(out))
    tr = np.trace(out).real
    # non-trace-preserving maps yield a subnormalized state; renormalize it
    if abs(tr - 1) > 1e-10 and tr > 0:
        out = out / tr
    return DensityMatrix(out, rho.dims)


def apply_matrices(m: KrausMap, rhos: np.ndarray) -> np.ndarray:
    """Batched, unnormalized Kraus action on a stack of matrices."""
    return _accel.kraus_apply_batch(m.stack(), rhos)


def compose(second: KrausMap, first: KrausMap) -> KrausMap:
    """``second o first``: Kraus operators ``second_j @ first_i`` (zero products dropped)."""
    _check_dims(second, first.dims)
    ops = tuple(b @ a for b in second.kraus for a in first.kraus)
    return KrausMap(ops, first.dims).pruned()


def embed(m: KrausMap, full_dims, targets) -> KrausMap:
    """Extend a map on ``targets`` by the identity on every other subsystem."""
    return KrausMap(tuple(embed_operator(k, full_dims, targets) for k in m.kraus), full_dims)


def choi(m: KrausMap) -> DensityMatrix:
    """``(M (x) id)(|Omega><Omega|)`` with ``|Omega> = sum_i |ii>/sqrt(d)``, output factor first.

    Returned dims are ``m.dims + m.dims`` (output subsystems, then reference).
    Normalized to unit trace, so trace-preserving maps need no rescaling.
    """
    d = m.dim
    # (K (x) I)|Omega> reshaped as a d x d matrix is K / sqrt(d)
    vecs = np.stack([k.reshape(d * d) for k in m.kraus]) / math.sqrt(d)
    mat = vecs.T @ vecs.conj()
    tr = np.trace(mat).real
    return DensityMatrix(mat / tr, tuple(m.dims) + tuple(m.dims))


def choi_distance(m1: KrausMap, m2: KrausMap) -> float:
    """Largest entrywise difference of the two Choi matrices."""
    _check_dims(m1, m2.dims)
    return float(np.abs(choi(m1).mat - choi(m2).mat).max())


# -- the maps from the composition example --------------------------------------


def _kb(out_bits: str, in_bits: str) -> np.ndarray:
    m = np.zeros((8, 8), dtype=np.complex128)
    m[int(out_bits, 2), int(in_bits, 2)] = 1
    return m


def e1_map() -> KrausMap:
    """``A1 = |000><000| + |111><111|``, ``A2..A5`` diagonal projectors on
    ``001, 010, 101, 110``, ``A6 = |000><011|``, ``A7 = |111><100|``."""
    return KrausMap((
        _kb("000", "000") + _kb("111", "111"),
        _kb("001", "001"),
        _kb("010", "010"),
        _kb("101", "101"),
        _kb("110", "110"),
        _kb("000", "011"),
        _kb("111", "100"),
    ), DIMS3)


def swap_ab_unitary() -> np.ndarray:
    """Permutation unitary ``|x_a x_b x_c> -> |x_b x_a x_c>``."""
    return np.eye(8, dtype=np.complex128).reshape(DIMS3 + (8,)).transpose(1, 0, 2, 3).reshape(8, 8)


def e2_map() -> KrausMap:
    """:func:`e1_map` with qubits ``a`` and ``b`` exchanged."""
    s = swap_ab_unitary()
    return KrausMap(tuple(s @ k @ dag(s) for k in e1_map().kraus), DIMS3)


def literal_composite_map() -> KrausMap:
    """The seven operators listed for ``E2 o E1`` as a fixed literal."""
    a = e1_map().kraus
    return KrausMap((a[0], a[1], _kb("000", "010"), a[5], a[6], _kb("111", "101"), a[4]), DIMS3)


def composed_map() -> KrausMap:
    return compose(e2_map(), e1_map())


# -- audits -----------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class AuditReport:
    partition: Bipartition
    samples: int
    max_output_negativity: float
    verdict: str
    witness_state: DensityMatrix | None = None
    witness_output_negativity: float = 0.0

    @property
    def violation(self) -> bool:
        return self.verdict == "entangling-witness-found"


def audit_nonentangling(m: KrausMap, part: Bipartition, samples: int = 1000, seed=0,
                        max_terms: int = 8) -> AuditReport:
    """Try to falsify "``m`` cannot create entanglement across ``part``".

    Inputs are mixtures of 1..``max_terms`` Haar-random pure product states
    across ``part``; each sample draws from its own child of
    ``SeedSequence(seed)``, so reports are reproducible and order-independent.
    A single output with negativity above 1e-8 is reported as a witness.
    A clean report only means no counterexample was sampled.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    part.check(len(m.dims))
    children = np.random.SeedSequence(seed).spawn(samples)
    inputs = np.empty((samples, m.dim, m.dim), dtype=np.complex128)
    for i, child in enumerate(children):
        rng = np.random.default_rng(child)
        terms = int(rng.integers(1, max_terms + 1))
        inputs[i] = random_separable_matrix(m.dims, part, terms, rng)
    outputs = apply_matrices(m, inputs)
    traces = np.einsum("mii->m", outputs).real
    outputs = outputs / traces[:, None, None]
    negs, _ = negativities(outputs, m.dims, part)
    worst = int(np.argmax(negs))
    max_neg = float(negs[worst])
    if max_neg > WITNESS_TOL:
        witness = DensityMatrix(inputs[worst], m.dims)
        return AuditReport(part, samples, max_neg, "entangling-witness-found", witness,
                           negativity(apply(m, witness), part))
    return AuditReport(part, samples, max_neg, "no-violation-found")


@dataclass(frozen=True, eq=False)
class PlusDemo:
    rho_ab: DensityMatrix
    negativity: float
    probabilities: tuple[float, float]
    minus_state: DensityMatrix
    minus_negativity: float


def demo_entangle_plus(m: KrausMap | None = None) -> PlusDemo:
    """Feed ``|+++>`` through the composed map, measure ``c`` in the ``+/-`` basis.

    Returns the ``+`` outcome's normalized ``ab`` state and its negativity,
    along with both branch probabilities and the ``-`` branch.
    """
    m = composed_map() if m is None else m
    plus = np.full(8, 1 / math.sqrt(8), dtype=np.complex128)
    out = apply(m, DensityMatrix.from_ket(plus, DIMS3)).mat
    cut = Bipartition.parse("a|b")
    states, probs = [], []
    for sgn in (1, -1):
        ket = np.array([1, sgn], dtype=np.complex128) / math.sqrt(2)
        proj = np.kron(np.eye(4), np.outer(ket, ket.conj()))
        post = proj @ out @ proj
        p = float(np.trace(post).real)
        ab = np.einsum("aibi->ab", post.reshape(4, 2, 4, 2)) / p
        states.append(DensityMatrix(ab, (2, 2)))
        probs.append(p)
    return PlusDemo(states[0], negativity(states[0], cut), (probs[0], probs[1]),
                    states[1], negativity(states[1], cut))
