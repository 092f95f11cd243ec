"""Three-qubit send-the-ancilla protocol.

Alice holds ``a`` and ``c``, Bob holds ``b``.  Starting from a classically
correlated state, Alice applies CNOT(a -> c), ships ``c`` to Bob, and Bob
applies CNOT(b -> c).  Afterwards ``a`` and ``b`` share distillable
entanglement while ``c`` stayed separable from ``(ab)`` at every step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import KrausMap, apply, embed
from .errors import BadIndex, ConsistencyError
from .matcore import dag, kron_all
from .qstate import (
    CUT_A_BC,
    CUT_B_AC,
    CUT_C_AB,
    Bipartition,
    DensityMatrix,
    negativity,
    partial_trace,
)

DIMS = (2, 2, 2)
CUTS = (CUT_A_BC, CUT_B_AC, CUT_C_AB)
CUT_AB = Bipartition.parse("a|b")
EXACT_TOL = 1e-12

KET0 = np.array([1, 0], dtype=np.complex128)
KET1 = np.array([0, 1], dtype=np.complex128)
PHI_PLUS = np.array([1, 0, 0, 1], dtype=np.complex128) / math.sqrt(2)


def basis_ket(bits: str) -> np.ndarray:
    v = np.zeros(2 ** len(bits), dtype=np.complex128)
    v[int(bits, 2)] = 1
    return v


def psi_k(k: int) -> np.ndarray:
    """``(|0> + i^k |1>)/sqrt(2)``."""
    return np.array([1, np.exp(1j * k * np.pi / 2)], dtype=np.complex128) / math.sqrt(2)


def initial_state_discrete() -> DensityMatrix:
    rho = np.zeros((8, 8), dtype=np.complex128)
    for k in range(4):
        v = kron_all(psi_k(k), psi_k(-k), KET0)
        rho += np.outer(v, v.conj()) / 6
    for i in (KET0, KET1):
        v = kron_all(i, i, KET1)
        rho += np.outer(v, v.conj()) / 6
    return DensityMatrix(rho, DIMS)


def cnot(control: int, target: int, n_qubits: int) -> np.ndarray:
    """Permutation matrix flipping ``target`` when ``control`` is 1 (qubit 0 most significant)."""
    if control == target or not (0 <= control < n_qubits and 0 <= target < n_qubits):
        raise BadIndex(f"bad CNOT indices control={control} target={target} n={n_qubits}")
    dim = 2 ** n_qubits
    u = np.zeros((dim, dim), dtype=np.complex128)
    cbit, tbit = n_qubits - 1 - control, n_qubits - 1 - target
    for x in range(dim):
        y = x ^ (1 << tbit) if (x >> cbit) & 1 else x
        u[y, x] = 1
    return u


def sigma_literal() -> np.ndarray:
    """State after Alice's CNOT, written out directly: GHZ weight 1/3 plus
    ``|001>, |010>, |101>, |110>`` each with weight 1/6."""
    ghz = (basis_ket("000") + basis_ket("111")) / math.sqrt(2)
    out = np.outer(ghz, ghz.conj()) / 3
    for bits in ("001", "010", "101", "110"):
        out += np.outer(basis_ket(bits), basis_ket(bits)) / 6
    return out


def tau_literal() -> np.ndarray:
    """``(1/3)|phi+><phi+| (x) |0><0| + (2/3)(I_4/4) (x) |1><1|``."""
    return (np.kron(np.outer(PHI_PLUS, PHI_PLUS.conj()) / 3, np.diag([1, 0]))
            + np.kron(np.eye(4) / 6, np.diag([0, 1])))


def swap_bc() -> np.ndarray:
    u = np.zeros((8, 8), dtype=np.complex128)
    for x in range(8):
        a, b, c = (x >> 2) & 1, (x >> 1) & 1, x & 1
        u[(a << 2) | (c << 1) | b, x] = 1
    return u


@dataclass(frozen=True, eq=False)
class Branch:
    outcome: int
    probability: float
    state: DensityMatrix | None
    skipped: bool = False


@dataclass(frozen=True, eq=False)
class ProtocolTrace:
    rho_initial: DensityMatrix
    sigma: DensityMatrix
    tau: DensityMatrix
    rho_ab: DensityMatrix
    negativities: dict[str, dict[str, float]]
    branches: list[Branch]

    @property
    def final_negativity(self) -> float:
        return negativity(self.rho_ab, CUT_AB)


def _conj(u, rho: DensityMatrix) -> DensityMatrix:
    out = u @ rho.mat @ dag(u)
    return DensityMatrix(0.5 * (out + dag(out)), rho.dims)


def _cut_negativities(rho: DensityMatrix) -> dict[str, float]:
    return {str(cut): negativity(rho, cut) for cut in CUTS}


def measure_ancilla(tau: DensityMatrix, zero_tol: float = 1e-14) -> list[Branch]:
    """Computational-basis measurement of ``c``; returns renormalized ``ab`` states."""
    if tuple(tau.dims) != DIMS:
        raise BadIndex(f"expected dims {DIMS}, got {tau.dims}")
    branches = []
    for outcome, ket in enumerate((KET0, KET1)):
        proj = np.kron(np.eye(4), np.outer(ket, ket))
        post = proj @ tau.mat @ proj
        p = float(np.trace(post).real)
        if p <= zero_tol:
            branches.append(Branch(outcome, p, None, skipped=True))
            continue
        ab = np.einsum("aibi->ab", post.reshape(4, 2, 4, 2)) / p
        branches.append(Branch(outcome, p, DensityMatrix(ab, (2, 2))))
    return branches


def extraction_channel() -> KrausMap:
    """Bob's deterministic map on ``(b, c)``: keep ``b`` if ``c = 0``, else reset ``b`` to ``|0>``."""
    p0, p1 = np.diag([1, 0]), np.diag([0, 1])
    lower = np.array([[0, 1], [0, 0]])
    return KrausMap((np.kron(np.eye(2), p0), np.kron(p0, p1), np.kron(lower, p1)), (2, 2))


def extract(tau: DensityMatrix) -> DensityMatrix:
    """Apply :func:`extraction_channel` on ``(b, c)`` and discard ``c``."""
    full = embed(extraction_channel(), DIMS, (1, 2))
    return partial_trace(apply(full, tau), (0, 1))


def rho_ab_literal() -> np.ndarray:
    """``(1/3)|phi+><phi+| + (1/3)|00><00| + (1/3)|10><10|``."""
    return (np.outer(PHI_PLUS, PHI_PLUS.conj()) + np.diag([1, 0, 0, 0]) + np.diag([0, 0, 1, 0])) / 3


def run_protocol() -> ProtocolTrace:
    """Run all three steps and check each against its written-out form.

    Raises:
        ConsistencyError: if sigma, tau or the extracted ab state differ from
            their literals by more than 1e-12 entrywise.
    """
    rho = initial_state_discrete()
    sigma = _conj(cnot(0, 2, 3), rho)
    tau = _conj(cnot(1, 2, 3), sigma)
    for name, got, want in (("sigma", sigma.mat, sigma_literal()), ("tau", tau.mat, tau_literal())):
        err = np.abs(got - want).max()
        if err > EXACT_TOL:
            raise ConsistencyError(f"{name} differs from its literal by {err:.3e}")
    rho_ab = extract(tau)
    err = np.abs(rho_ab.mat - rho_ab_literal()).max()
    if err > EXACT_TOL:
        raise ConsistencyError(f"extracted ab state differs from its literal by {err:.3e}")
    negs = {
        "initial": _cut_negativities(rho),
        "sigma": _cut_negativities(sigma),
        "tau": _cut_negativities(tau),
    }
    return ProtocolTrace(rho, sigma, tau, rho_ab, negs, measure_ancilla(tau))
