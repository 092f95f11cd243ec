import math

import numpy as np
import pytest

from sepdist import protocol as pr
from sepdist.channels import apply, embed
from sepdist.errors import BadIndex, ConsistencyError
from sepdist.qstate import CUT_A_BC, CUT_C_AB, DensityMatrix, negativity, partial_trace, partial_transpose

PHI = np.array([1, 0, 0, 1]) / math.sqrt(2)


@pytest.fixture(scope="module")
def trace():
    return pr.run_protocol()


def test_initial_state():
    rho = pr.initial_state_discrete()
    assert np.trace(rho.mat).real == pytest.approx(1, abs=1e-15)
    assert partial_trace(rho, {2}).allclose(np.diag([2 / 3, 1 / 3]))
    for cut in pr.CUTS:
        assert negativity(rho, cut) == 0.0


def test_cnot_basics():
    assert np.array_equal(pr.cnot(0, 1, 2) @ pr.basis_ket("10"), pr.basis_ket("11"))
    for c, t in ((0, 2), (2, 1), (1, 0)):
        u = pr.cnot(c, t, 3)
        assert np.array_equal(u @ u, np.eye(8))
    for bad in ((1, 1, 3), (0, 3, 3), (-1, 0, 2)):
        with pytest.raises(BadIndex):
            pr.cnot(*bad)


def test_cnot_on_plus_input():
    for x in "01":
        ket = np.kron(np.kron(pr.psi_k(0), pr.basis_ket(x)), pr.basis_ket("0"))
        want = (pr.basis_ket(f"0{x}0") + pr.basis_ket(f"1{x}1")) / math.sqrt(2)
        assert np.allclose(pr.cnot(0, 2, 3) @ ket, want)


def test_steps_match_literals(trace):
    assert np.abs(trace.sigma.mat - pr.sigma_literal()).max() <= 1e-12
    assert np.abs(trace.tau.mat - pr.tau_literal()).max() <= 1e-12
    assert np.abs(trace.rho_ab.mat - pr.rho_ab_literal()).max() <= 1e-12


def test_sigma_literal_weights():
    s = pr.sigma_literal()
    assert s[0, 7] == pytest.approx(1 / 6)
    assert np.diag(s).real == pytest.approx([1 / 6, 1 / 6, 1 / 6, 0, 0, 1 / 6, 1 / 6, 1 / 6])


def test_sigma_swap_invariance(trace):
    u = pr.swap_bc()
    assert np.abs(u @ trace.sigma.mat @ u.T - trace.sigma.mat).max() <= 1e-12


def test_step_negativities(trace):
    for step, negs in trace.negativities.items():
        assert negs[str(CUT_C_AB)] <= 1e-12, step
    assert trace.negativities["sigma"][str(CUT_A_BC)] > 0
    assert trace.negativities["sigma"][str(CUT_A_BC)] == pytest.approx(
        negativity(trace.sigma, CUT_A_BC))


def test_unitary_steps_preserve_spectrum(trace):
    assert np.allclose(trace.sigma.eigvals(), trace.rho_initial.eigvals(), atol=1e-12)
    assert np.allclose(trace.tau.eigvals(), trace.rho_initial.eigvals(), atol=1e-12)


def test_measurement(trace):
    b0, b1 = trace.branches
    assert b0.probability == pytest.approx(1 / 3, abs=1e-12)
    assert b1.probability == pytest.approx(2 / 3, abs=1e-12)
    assert b0.state.allclose(np.outer(PHI, PHI))
    assert b1.state.allclose(np.eye(4) / 4)
    mix = b0.probability * b0.state.mat + b1.probability * b1.state.mat
    assert np.abs(mix - partial_trace(trace.tau, {0, 1}).mat).max() <= 1e-12


def test_zero_probability_branch_is_flagged():
    rho = DensityMatrix(np.kron(np.eye(4) / 4, np.diag([1, 0])), (2, 2, 2))
    b0, b1 = pr.measure_ancilla(rho)
    assert not b0.skipped and b1.skipped and b1.state is None


def test_extraction(trace):
    ch = pr.extraction_channel()
    assert ch.tp_error() <= 1e-12
    rho_ab = pr.extract(trace.tau)
    assert np.trace(rho_ab.mat).real == pytest.approx(1)
    assert negativity(rho_ab, pr.CUT_AB) == pytest.approx((math.sqrt(2) - 1) / 6, abs=1e-12)
    assert np.linalg.eigvalsh(partial_transpose(rho_ab, pr.CUT_AB))[0] < 0


def test_extraction_via_generic_channel(trace):
    full = embed(pr.extraction_channel(), pr.DIMS, (1, 2))
    out = partial_trace(apply(full, trace.tau), {0, 1})
    assert out.allclose(trace.rho_ab)


def test_consistency_error_is_raised(monkeypatch):
    monkeypatch.setattr(pr, "sigma_literal", lambda: np.eye(8) / 8)
    with pytest.raises(ConsistencyError):
        pr.run_protocol()
