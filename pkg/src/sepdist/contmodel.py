"""Two qubits coupled through a driven three-level ancilla.

Tensor order is ``(a, b, c)`` with the qutrit ancilla last, so the coupling
Hamiltonian reads::

    H = I_4 (x) H0 + (eps/2) (sx (x) I + I (x) sx) (x) (c + c^dagger)

with the truncated ladder ``c = |0><1| + sqrt(2)|1><2|`` and ``H0 = c^dagger c``.
In the ``|+/->`` basis of the qubits ``H`` splits into three 3x3 blocks:
``H0 + eps(c + c^dagger)`` on ``|++>``, ``H0 - eps(c + c^dagger)`` on ``|-->``,
and the bare ``H0`` on ``|+->`` and ``|-+>``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _accel
from .errors import BadAlpha, BadDims, BadEpsilon, BadGrid, BadMode, NotOrthogonal
from .matcore import dag, expm_i, hermitian_eig, kron_all, norm, vandermonde_det
from .qstate import (
    CUT_A_BC,
    CUT_B_AC,
    CUT_C_AB,
    Bipartition,
    DensityMatrix,
    ball_radius,
    embed_operator,
    negativities,
    partial_trace_matrix,
)

DIMS = (2, 2, 3)
CUT_AB = Bipartition.parse("a|b")

# flags used by the feasibility sweep
ANCILLA_SEPARABLE_TOL = 1e-10
AB_ENTANGLED_TOL = 1e-6

SX = np.array([[0, 1], [1, 0]], dtype=np.complex128)
I2 = np.eye(2, dtype=np.complex128)
I3 = np.eye(3, dtype=np.complex128)

LOWER = np.array([[0, 1, 0], [0, 0, math.sqrt(2)], [0, 0, 0]], dtype=np.complex128)
H0 = dag(LOWER) @ LOWER
QUADRATURE = LOWER + dag(LOWER)

KET_PLUS = np.array([1, 1], dtype=np.complex128) / math.sqrt(2)
KET_MINUS = np.array([1, -1], dtype=np.complex128) / math.sqrt(2)


def _check_epsilon(epsilon, allow_zero=False) -> float:
    eps = float(epsilon)
    lo_ok = eps >= 0 if allow_zero else eps > 0
    if not (lo_ok and eps < 1) or not math.isfinite(eps):
        raise BadEpsilon(f"epsilon must lie in {'[0' if allow_zero else '(0'}, 1), got {epsilon!r}")
    return eps


def build_hamiltonian(epsilon) -> np.ndarray:
    """Full 12x12 Hamiltonian in ``(a, b, c)`` order.

    ``epsilon = 0`` is accepted as the uncoupled limit.
    """
    eps = _check_epsilon(epsilon, allow_zero=True)
    sx_sum = np.kron(SX, I2) + np.kron(I2, SX)
    return np.kron(np.eye(4), H0) + 0.5 * eps * np.kron(sx_sum, QUADRATURE)


@dataclass(frozen=True, eq=False)
class SubspaceBlocks:
    h_plus: np.ndarray
    h_minus: np.ndarray
    h_zero: np.ndarray
    proj_pp: np.ndarray
    proj_mm: np.ndarray
    proj_pm: np.ndarray
    proj_mp: np.ndarray

    def reassemble(self) -> np.ndarray:
        return (np.kron(self.proj_pp, self.h_plus) + np.kron(self.proj_mm, self.h_minus)
                + np.kron(self.proj_pm + self.proj_mp, self.h_zero))


def _proj(u, v):
    k = np.kron(u, v)
    return np.outer(k, k.conj())


def block_hamiltonian(epsilon, sign: int) -> np.ndarray:
    """``H0 + sign * eps * (c + c^dagger)``."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return H0 + sign * float(epsilon) * QUADRATURE


def subspace_decomposition(epsilon) -> SubspaceBlocks:
    eps = _check_epsilon(epsilon, allow_zero=True)
    return SubspaceBlocks(
        h_plus=block_hamiltonian(eps, +1),
        h_minus=block_hamiltonian(eps, -1),
        h_zero=H0.copy(),
        proj_pp=_proj(KET_PLUS, KET_PLUS),
        proj_mm=_proj(KET_MINUS, KET_MINUS),
        proj_pm=_proj(KET_PLUS, KET_MINUS),
        proj_mp=_proj(KET_MINUS, KET_PLUS),
    )


# -- perturbation theory -------------------------------------------------------


def rayleigh_schrodinger(e0, v, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Non-degenerate Rayleigh-Schroedinger series for ``diag(e0) + v``.

    Uses intermediate normalization (``<n0|n^(k)> = 0`` for ``k >= 1``)::

        E^(k)   = <n0| v |n^(k-1)>
        |n^(k)> = R_n ( v|n^(k-1)> - sum_{j=1..k} E^(j) |n^(k-j)> )
        R_n     = sum_{m != n} |m><m| / (e0_n - e0_m)

    Returns:
        ``(energies, vectors)`` where ``energies[k, n]`` is the order-``k``
        energy correction of level ``n`` and ``vectors[k, :, n]`` the order-``k``
        correction to its eigenvector, for ``k = 0..order``.
    """
    e0 = np.asarray(e0, dtype=float)
    v = np.asarray(v, dtype=np.complex128)
    dim = e0.size
    gaps = e0[:, None] - e0[None, :]
    if np.any(np.abs(gaps[~np.eye(dim, dtype=bool)]) < 1e-12):
        raise ValueError("unperturbed spectrum is degenerate")
    energies = np.zeros((order + 1, dim))
    vectors = np.zeros((order + 1, dim, dim), dtype=np.complex128)
    energies[0] = e0
    vectors[0] = np.eye(dim)
    for n in range(dim):
        resolvent = np.zeros(dim)
        mask = np.arange(dim) != n
        resolvent[mask] = 1.0 / (e0[n] - e0[mask])
        for k in range(1, order + 1):
            energies[k, n] = (v @ vectors[k - 1, :, n])[n].real
            rhs = v @ vectors[k - 1, :, n]
            for j in range(1, k + 1):
                rhs = rhs - energies[j, n] * vectors[k - j, :, n]
            vectors[k, :, n] = resolvent * rhs
    return energies, vectors


@dataclass(frozen=True, eq=False)
class PerturbationData:
    epsilon: float
    sign: int
    d: np.ndarray
    X: np.ndarray
    delta: float
    series_energies: np.ndarray = field(repr=False)

    @property
    def D(self) -> np.ndarray:
        return np.diag(self.d).astype(np.complex128)


def leading_eigenvalues(epsilon) -> np.ndarray:
    """Block eigenvalues through third order: ``(-eps^2, 1 - eps^2, 2 + 2 eps^2)``."""
    e2 = float(epsilon) ** 2
    return np.array([-e2, 1.0 - e2, 2.0 + 2.0 * e2])


def perturbative_eigensystem(epsilon, sign: int = 1, order: int = 3) -> PerturbationData:
    """Approximate eigensystem of ``H0 +/- eps (c + c^dagger)``.

    ``X`` is the Rayleigh-Schroedinger eigenvector matrix summed through
    ``order`` with each column renormalized; ``d`` uses the closed form of
    :func:`leading_eigenvalues`, which the series energies reproduce exactly
    (odd orders vanish because the ladder couples only neighbouring levels).
    """
    eps = _check_epsilon(epsilon, allow_zero=True)
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    energies, vectors = rayleigh_schrodinger(np.diag(H0).real, sign * eps * QUADRATURE, order)
    x = vectors.sum(axis=0)
    x = x / np.linalg.norm(x, axis=0, keepdims=True)
    d = leading_eigenvalues(eps)
    return PerturbationData(eps, sign, d, x, vandermonde_det(d), energies.sum(axis=0))


def bound_n1(epsilon, t, sign: int = 1) -> float:
    """Eigenvalue-perturbation bound on ``||exp(-iH t) - X exp(-iDt) X^-1||``.

    ``||X^-1||^2 ||X|| ||H X - X D|| t`` in spectral norm.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    p = perturbative_eigensystem(epsilon, sign)
    h = block_hamiltonian(p.epsilon, sign)
    xinv = np.linalg.inv(p.X)
    return norm(xinv) ** 2 * norm(p.X) * norm(h @ p.X - p.X @ p.D) * float(t)


def bound_n2(epsilon, sign: int = 1) -> float:
    """Eigenvector-perturbation bound on ``||X exp(-iDt) X^-1 - exp(-iDt)||``, uniform in t."""
    p = perturbative_eigensystem(epsilon, sign)
    d1, _, d3 = p.d
    xinv = np.linalg.inv(p.X)
    D = p.D
    c1 = (d3 ** 2 - d1 ** 2) * norm(p.X @ D - D @ p.X)
    c2 = (d3 - d1) * norm(p.X @ D @ D - D @ D @ p.X)
    return norm(xinv) * 2.0 / abs(p.delta) * (c1 + c2)


def deviation_bound(epsilon, t) -> float:
    """Upper bound on ``||U(t) - U_eff(t)||``: the worse of the two sign blocks."""
    return max(bound_n1(epsilon, t, s) + bound_n2(epsilon, s) for s in (1, -1))


# -- effective dynamics ---------------------------------------------------------


def effective_hamiltonian(epsilon) -> np.ndarray:
    """Generator of the leading-order evolution: ``D`` on the ``|++>``, ``|-->``
    sectors and ``H0`` on the mixed-sign sectors."""
    blocks = subspace_decomposition(epsilon)
    D = np.diag(leading_eigenvalues(epsilon)).astype(np.complex128)
    return (np.kron(blocks.proj_pp + blocks.proj_mm, D)
            + np.kron(blocks.proj_pm + blocks.proj_mp, H0))


def u_eff(epsilon, t) -> np.ndarray:
    if t < 0:
        raise ValueError("t must be >= 0")
    return expm_i(effective_hamiltonian(epsilon), t)


def initial_state(alpha) -> DensityMatrix:
    """Uncorrelated mixed start: ``(|0><0| + alpha I/2)^{(x)2} (x) I/3``, normalized."""
    alpha = float(alpha)
    if not (alpha >= 0) or not math.isfinite(alpha):
        raise BadAlpha(f"alpha must be a finite number >= 0, got {alpha!r}")
    q = (np.diag([1.0, 0.0]) + 0.5 * alpha * np.eye(2)) / (1.0 + alpha)
    return DensityMatrix(kron_all(q, q, I3 / 3), DIMS)


def trotter_halves(epsilon) -> tuple[np.ndarray, np.ndarray]:
    """``H = H_A + H_B`` with ``H0`` shared evenly and each qubit's coupling on its own side."""
    eps = _check_epsilon(epsilon, allow_zero=True)
    h0 = np.kron(np.eye(4), H0)
    h_a = 0.5 * h0 + 0.5 * eps * kron_all(SX, I2, QUADRATURE)
    h_b = 0.5 * h0 + 0.5 * eps * kron_all(I2, SX, QUADRATURE)
    return h_a, h_b


def trotter_unitary(epsilon, t, n: int) -> np.ndarray:
    """``(exp(-i H_B t/n) exp(-i H_A t/n))^n``: the ancilla meets a, then b, n times."""
    if n < 1:
        raise BadMode("trotter step count must be >= 1")
    h_a, h_b = trotter_halves(epsilon)
    step = expm_i(h_b, t / n) @ expm_i(h_a, t / n)
    return np.linalg.matrix_power(step, int(n))


def _parse_mode(mode, n):
    if isinstance(mode, tuple):
        mode, n = mode
    if not isinstance(mode, str):
        raise BadMode(f"unknown mode {mode!r}")
    mode = mode.strip().lower()
    if mode.startswith("trotter(") and mode.endswith(")"):
        try:
            mode, n = "trotter", int(mode[len("trotter("):-1])
        except ValueError as exc:
            raise BadMode(f"bad trotter step count in {mode!r}") from exc
    if mode not in ("exact", "effective", "trotter"):
        raise BadMode(f"unknown mode {mode!r}; expected exact, effective or trotter(n)")
    if mode == "trotter" and (n is None or int(n) < 1):
        raise BadMode("trotter mode needs a step count n >= 1")
    return mode, (int(n) if mode == "trotter" else None)


def propagator(epsilon, t, mode="exact", n=None) -> np.ndarray:
    mode, n = _parse_mode(mode, n)
    if mode == "exact":
        return expm_i(build_hamiltonian(epsilon), t)
    if mode == "effective":
        return u_eff(epsilon, t)
    return trotter_unitary(epsilon, t, n)


def evolve(rho: DensityMatrix, epsilon, t, mode="exact", n=None) -> DensityMatrix:
    """Evolve a ``(2, 2, 3)`` state for time ``t``.

    ``mode`` is ``"exact"``, ``"effective"``, ``"trotter"`` (with ``n``), or the
    compact forms ``"trotter(64)"`` / ``("trotter", 64)``.
    """
    if tuple(rho.dims) != DIMS:
        raise BadDims(f"continuous model needs dims {DIMS}, got {rho.dims}")
    u = propagator(epsilon, t, mode, n)
    out = u @ rho.mat @ dag(u)
    return DensityMatrix(0.5 * (out + dag(out)), DIMS)


def pure_firstorder_amplitude(h_ac, h_bc, a, b, c, a_perp, b_perp) -> complex:
    """Component of ``(H_AC (x) 1_B + 1_A (x) H_BC)|a, b, c>`` along ``|a_perp, b_perp>``.

    Returns the largest-magnitude coefficient over the ancilla basis.  For any
    product input and orthogonal ``a_perp``, ``b_perp`` this vanishes: each
    term leaves one of the two qubits untouched.
    """
    vecs = [np.asarray(x, dtype=np.complex128).ravel() for x in (a, b, c, a_perp, b_perp)]
    a, b, c, a_perp, b_perp = vecs
    for name, (u, w) in {"a": (a, a_perp), "b": (b, b_perp)}.items():
        if abs(np.vdot(w, u)) > 1e-10 * np.linalg.norm(u) * np.linalg.norm(w):
            raise NotOrthogonal(f"{name}_perp is not orthogonal to {name}")
    dims = (a.size, b.size, c.size)
    h = embed_operator(h_ac, dims, (0, 2)) + embed_operator(h_bc, dims, (1, 2))
    out = (h @ kron_all(a, b, c).reshape(-1, 1)).reshape(dims)
    amps = np.einsum("i,j,ijk->k", a_perp.conj(), b_perp.conj(), out)
    return complex(amps[np.argmax(np.abs(amps))])


# -- traces and sweeps ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class EvolutionTrace:
    times: np.ndarray
    neg_c_ab: np.ndarray
    neg_a_bc: np.ndarray
    neg_b_ac: np.ndarray
    neg_ab_reduced: np.ndarray
    mode: str
    min_pt_eig_c_ab: np.ndarray = field(repr=False, default=None)

    def rows(self):
        return zip(self.times, self.neg_c_ab, self.neg_a_bc, self.neg_b_ac, self.neg_ab_reduced)


def _states_on_grid(epsilon, rho0: np.ndarray, times, mode, n):
    mode, n = _parse_mode(mode, n)
    if mode == "exact":
        vals, vecs = hermitian_eig(build_hamiltonian(epsilon))
        return _accel.evolve_batch(vecs, vals, rho0, times), mode
    if mode == "effective":
        vals, vecs = hermitian_eig(effective_hamiltonian(epsilon))
        return _accel.evolve_batch(vecs, vals, rho0, times), mode
    us = np.stack([trotter_unitary(epsilon, t, n) for t in times])
    return us @ rho0[None] @ np.conj(np.swapaxes(us, 1, 2)), f"trotter({n})"


def trace_from_states(states: np.ndarray, times, mode: str) -> EvolutionTrace:
    neg_c, low_c = negativities(states, DIMS, CUT_C_AB)
    neg_a, _ = negativities(states, DIMS, CUT_A_BC)
    neg_b, _ = negativities(states, DIMS, CUT_B_AC)
    reduced = partial_trace_matrix(states, DIMS, (0, 1))
    neg_ab, _ = negativities(reduced, (2, 2), CUT_AB)
    return EvolutionTrace(np.asarray(times, dtype=float), neg_c, neg_a, neg_b, neg_ab, mode, low_c)


def time_grid(t_max, steps: int) -> np.ndarray:
    if steps < 2:
        raise BadGrid("steps must be >= 2")
    return np.linspace(0.0, float(t_max), int(steps))


def run_trace(epsilon, alpha, t_max, steps: int = 500, mode="exact", n=None) -> EvolutionTrace:
    """Evolve :func:`initial_state` over a uniform grid of ``steps`` times in
    ``[0, t_max]`` and record the negativity across every cut plus that of the
    reduced ``ab`` state."""
    _check_epsilon(epsilon)
    times = time_grid(t_max, steps)
    states, label = _states_on_grid(epsilon, initial_state(alpha).mat, times, mode, n)
    return trace_from_states(states, times, label)


@dataclass(frozen=True, eq=False)
class BounceTrace:
    """Ancilla shuttled between a and b: state recorded after every single hop."""

    epsilon: float
    alpha: float
    t: float
    n: int
    hop_times: np.ndarray
    neg_c_ab: np.ndarray
    neg_ab_reduced: np.ndarray
    min_pt_eig_c_ab: np.ndarray = field(repr=False)


def bounce_simulation(epsilon, alpha, t, n: int) -> BounceTrace:
    """Discretized version of the continuous run.

    The ancilla alternately interacts with ``a`` for ``t/n`` (``exp(-i H_A t/n)``)
    and with ``b`` for ``t/n``, ``n`` round trips in total; the state is
    inspected after each of the ``2n`` hops.
    """
    eps = _check_epsilon(epsilon)
    if n < 1:
        raise BadMode("n must be >= 1")
    h_a, h_b = trotter_halves(eps)
    dt = float(t) / n
    hops = np.stack([expm_i(h_a, dt), expm_i(h_b, dt)])
    pattern = np.tile([0, 1], int(n))
    states = _accel.conjugate_sequence(hops, initial_state(alpha).mat, pattern)
    neg_c, low_c = negativities(states, DIMS, CUT_C_AB)
    neg_ab, _ = negativities(partial_trace_matrix(states, DIMS, (0, 1)), (2, 2), CUT_AB)
    hop_times = dt * 0.5 * np.arange(1, 2 * n + 1)
    return BounceTrace(eps, float(alpha), float(t), int(n), hop_times, neg_c, neg_ab, low_c)


@dataclass(frozen=True)
class SweepRow:
    epsilon: float
    alpha: float
    max_neg_c_ab: float
    max_neg_b_ac: float
    max_neg_ab: float
    ancilla_separable_all_t: bool
    ab_entangled: bool
    feasible: bool
    analytic_ancilla_ok: bool
    analytic_ab_ok: bool
    analytic_feasible: bool


@dataclass(frozen=True, eq=False)
class SweepTable:
    rows: list[SweepRow]
    t_max_factor: float
    steps: int
    simulated: bool

    def feasible_alphas(self, epsilon, analytic: bool = False) -> list[float]:
        key = "analytic_feasible" if analytic else "feasible"
        return [r.alpha for r in self.rows
                if math.isclose(r.epsilon, epsilon, rel_tol=1e-12) and getattr(r, key)]

    def epsilons(self) -> list[float]:
        return sorted({r.epsilon for r in self.rows})

    def feasible_epsilons(self, analytic: bool = False) -> list[float]:
        return [e for e in self.epsilons() if self.feasible_alphas(e, analytic)]

    def analytic_threshold(self) -> float | None:
        """Largest grid epsilon below which (inclusive) every grid epsilon is analytically feasible."""
        best = None
        for e in self.epsilons():
            if not self.feasible_alphas(e, analytic=True):
                break
            best = e
        return best

    def analytic_is_monotone(self) -> bool:
        flags = [bool(self.feasible_alphas(e, analytic=True)) for e in self.epsilons()]
        # once infeasible, stays infeasible as epsilon grows
        return all(not (later and not earlier) for earlier, later in zip(flags, flags[1:]))


def _mixing_split(alpha) -> tuple[float, float, np.ndarray]:
    """Write ``rho(alpha) = w I/12 + (1 - w) sigma``; return ``(w, ||sigma||_F, sigma)``.

    ``w = (alpha/(1+alpha))^2`` is the weight of the fully mixed component of
    the two-qubit factor, which no unitary can change.
    """
    rho = initial_state(alpha).mat
    w = (float(alpha) / (1.0 + float(alpha))) ** 2
    if w >= 1.0:
        return 1.0, 0.0, np.eye(12) / 12
    sigma = (rho - w * np.eye(12) / 12) / (1.0 - w)
    return w, float(np.linalg.norm(sigma, "fro")), sigma


def analytic_feasibility(epsilon, alpha, t_max, effective_max_neg_ab: float,
                         bound: float | None = None) -> tuple[bool, bool]:
    """Certified (no simulation of the true dynamics) verdict for one grid point.

    With ``B`` bounding ``||U(t) - U_eff(t)||`` on ``[0, t_max]``:

    * ancilla: ``rho(t) = (1-w) sigma_eff(t) + w (I/12 + (1-w)/w * Delta)`` where the
      first term is block-diagonal in the ancilla levels (hence separable from
      ``ab``) and ``||Delta||_F <= 2 B ||sigma||_F``.  The second term is
      separable once it sits in the ball of radius ``1/sqrt(132)``.
    * ab: negativity of the reduced state moves by at most ``2 B`` (trace-norm
      change ``<= 2B``, partial transpose on a qubit at most doubles it, halved
      in the negativity), so ``max_t N_eff > 2 B`` keeps ``ab`` entangled.
    """
    B = deviation_bound(epsilon, t_max) if bound is None else float(bound)
    w, sigma_fro, _ = _mixing_split(alpha)
    if w <= 0.0:
        ancilla_ok = False
    else:
        ancilla_ok = (1.0 - w) / w * 2.0 * B * sigma_fro <= ball_radius(12)
    ab_ok = effective_max_neg_ab > 2.0 * B
    return bool(ancilla_ok), bool(ab_ok)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("SEPDIST_THREADS", "1")))
    except ValueError:
        return 1


def _sweep_one_epsilon(epsilon, alpha_grid, t_max_factor, steps, simulate):
    t_max = t_max_factor / epsilon ** 2
    times = time_grid(t_max, steps)
    vals_x, vecs_x = hermitian_eig(build_hamiltonian(epsilon))
    vals_e, vecs_e = hermitian_eig(effective_hamiltonian(epsilon))
    bound = deviation_bound(epsilon, t_max)
    out = []
    for alpha in alpha_grid:
        rho0 = initial_state(alpha).mat
        eff = _accel.evolve_batch(vecs_e, vals_e, rho0, times)
        eff_ab, _ = negativities(partial_trace_matrix(eff, DIMS, (0, 1)), (2, 2), CUT_AB)
        anc_ok, ab_ok = analytic_feasibility(epsilon, alpha, t_max, float(eff_ab.max()), bound)
        if simulate:
            tr = trace_from_states(_accel.evolve_batch(vecs_x, vals_x, rho0, times), times, "exact")
            mc, mb, mab = float(tr.neg_c_ab.max()), float(tr.neg_b_ac.max()), float(tr.neg_ab_reduced.max())
        else:
            mc = mb = mab = float("nan")
        sep = bool(mc <= ANCILLA_SEPARABLE_TOL)
        ent = bool(mab >= AB_ENTANGLED_TOL)
        out.append(SweepRow(float(epsilon), float(alpha), mc, mb, mab, sep, ent, sep and ent,
                            anc_ok, ab_ok, anc_ok and ab_ok))
    return out


def sweep(epsilon_grid, alpha_grid, t_max_factor: float = 2 * math.pi, steps: int = 500,
          simulate: bool = True) -> SweepTable:
    """Feasibility table over an ``(epsilon, alpha)`` grid.

    Simulation flags (exact dynamics on ``steps`` points of ``[0, t_max_factor/eps^2]``):
    ``ancilla_separable_all_t`` (ancilla-cut negativity <= 1e-10 throughout) and
    ``ab_entangled`` (peak reduced-ab negativity >= 1e-6).  Analytic flags come
    from :func:`analytic_feasibility`.  Grid points are independent; up to
    ``SEPDIST_THREADS`` epsilons run concurrently, results in grid order.
    """
    eps_grid = [_check_epsilon(e) for e in epsilon_grid]
    alpha_grid = [float(a) for a in alpha_grid]
    if not eps_grid or not alpha_grid:
        raise BadGrid("grids must be nonempty")
    for a in alpha_grid:
        initial_state(a)
    args = [(e, alpha_grid, float(t_max_factor), int(steps), simulate) for e in eps_grid]
    workers = min(_threads(), len(eps_grid))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(lambda a: _sweep_one_epsilon(*a), args))
    else:
        chunks = [_sweep_one_epsilon(*a) for a in args]
    rows = [r for chunk in chunks for r in chunk]
    return SweepTable(rows, float(t_max_factor), int(steps), simulate)
