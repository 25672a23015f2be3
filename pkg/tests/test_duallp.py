import numpy as np
import pytest
from numpy.testing import assert_allclose

from helpers import random_model
from qcrb.duallp import (
    EPS_FEAS,
    DualCertificate,
    dual_bound,
    oracle,
    qubit_certificate,
    recover_measurement,
)
from qcrb.errors import InvalidInputError
from qcrb.model import classical_model, fisher, qubit_full, submodel
from qcrb.randbound import build_plan, optimal_W, random_bound
from qcrb.sim import deviation


def normalized_weight(J, W):
    return W.T @ J @ W


@pytest.fixture(scope="module")
def qubit():
    m = qubit_full(0.5)
    fd = fisher(m)
    g = normalized_weight(fd.J, np.diag([0.5, 0.3, 0.2]))
    return m, fd, g, dual_bound(m, fd, g)


@pytest.fixture(scope="module")
def classical():
    m = classical_model(np.ones(3) / 3, [np.diag([1, -1, 0]) / 2, np.diag([1, 1, -2]) / 6])
    fd = fisher(m)
    return m, fd, dual_bound(m, fd, np.eye(2))


@pytest.fixture(scope="module")
def scalar():
    m = submodel(qubit_full(0.3), np.array([[0.2], [0.1], [1.0]]))
    fd = fisher(m)
    g = np.array([[2.5]])
    return m, fd, g, dual_bound(m, fd, g)


def test_oracle_on_zero_multipliers():
    m = qubit_full(0.5)
    fd = fisher(m)
    val, _ = oracle(np.zeros((3, 3)), np.zeros((2, 2)), m, fd, np.eye(3), starts=16)
    assert val >= -1e-12
    val, cut = oracle(np.zeros((3, 3)), 0.01 * np.eye(2), m, fd, np.eye(3), starts=16)
    assert val <= -0.01 + 1e-12
    assert np.linalg.norm(cut.x) <= 1e-8
    assert np.linalg.norm(cut.psi) == pytest.approx(1.0, abs=1e-12)


def test_oracle_accepts_closed_form_multipliers():
    m = qubit_full(0.5)
    fd = fisher(m)
    W = np.diag([0.5, 0.3, 0.2])
    g = normalized_weight(fd.J, W)
    val, _ = oracle(2 * W, -(np.eye(2) - m.rho), m, fd, g, starts=64)
    assert val >= -1e-9


def test_oracle_cut_value_is_constraint_value():
    rng = np.random.default_rng(3)
    m = random_model(rng, 3, 2)
    fd = fisher(m)
    a = rng.standard_normal((2, 2))
    S = -0.1 * np.eye(3)
    val, cut = oracle(a, S, m, fd, np.eye(2), starts=24, rng_seed=1)
    R = cut.q * m.rho - S - m.operator(a @ cut.x)
    assert np.real(cut.psi.conj() @ R @ cut.psi) == pytest.approx(val, abs=1e-10)
    assert cut.q * cut.r - np.real(cut.psi.conj() @ S @ cut.psi) - cut.d @ a @ cut.x == pytest.approx(val, abs=1e-10)


def test_qubit_normalized_spur_is_one(qubit):
    m, fd, g, cert = qubit
    assert cert.converged
    assert cert.spur == pytest.approx(1.0, abs=1e-3)
    assert random_bound(fd.J, g) == pytest.approx(1.0, abs=1e-12)


def test_certificate_invariants(qubit, classical):
    for cert in (qubit[3], classical[2]):
        assert cert.spur == pytest.approx(np.trace(cert.a) + np.trace(cert.S).real, abs=1e-12)
        assert cert.feasibility_margin >= -EPS_FEAS
        assert np.linalg.eigvalsh(cert.S)[-1] <= EPS_FEAS
        h = np.array(cert.history)
        assert np.all(np.diff(h) <= 1e-9 * np.maximum(1.0, np.abs(h[1:])))


def test_independent_verification(qubit):
    m, fd, g, cert = qubit
    val, _ = oracle(cert.a, cert.S, m, fd, g, starts=200, rng_seed=99)
    assert val >= -EPS_FEAS


def test_scalar_model(scalar):
    m, fd, g, cert = scalar
    assert cert.spur == pytest.approx(g[0, 0] / fd.J[0, 0], abs=1e-6)


def test_classical_model_reaches_sld_bound(classical):
    m, fd, cert = classical
    assert cert.spur == pytest.approx(np.trace(np.linalg.inv(fd.J)), abs=1e-3)


def test_dual_below_random(qubit, classical):
    m, fd, g, cert = qubit
    assert cert.spur <= random_bound(fd.J, g) + 1e-6
    m, fd, cert = classical
    assert cert.spur <= random_bound(fd.J, np.eye(2)) + 1e-6


def test_deterministic(scalar):
    m, fd, g, cert = scalar
    again = dual_bound(m, fd, g)
    assert again.spur == cert.spur
    assert np.array_equal(again.a, cert.a) and np.array_equal(again.S, cert.S)


def test_submodel_monotone():
    m = qubit_full(0.3)
    fd = fisher(m)
    C = np.eye(3)[:, :2]
    sub = submodel(m, C)
    fs = fisher(sub)
    g1 = np.diag([1.0, 2.0])
    Pi = np.linalg.solve(C.T @ fd.J @ C, C.T @ fd.J)
    full = dual_bound(m, fd, Pi.T @ g1 @ Pi)
    part = dual_bound(sub, fs, g1)
    assert part.spur <= full.spur + 1e-3


def test_non_convergence_still_certified():
    m = qubit_full(0.5)
    fd = fisher(m)
    cert = dual_bound(m, fd, np.eye(3), max_rounds=3)
    assert not cert.converged and cert.status == "max_rounds"
    assert cert.feasibility_margin >= -EPS_FEAS
    assert cert.spur <= random_bound(fd.J, np.eye(3)) + 1e-6
    plan = build_plan(m, fd, np.eye(3))
    assert cert.spur <= deviation(plan, np.eye(3)) + 1e-9


def test_qubit_certificate_examples():
    m = qubit_full(0.5)
    fd = fisher(m)
    g = normalized_weight(fd.J, np.diag([0.6, 0.25, 0.15]))
    cert = qubit_certificate(m, fd, g)
    assert cert.spur == pytest.approx(1.0, abs=1e-12)
    assert cert.feasibility_margin >= -1e-9
    W = optimal_W(fd.J, g)
    assert_allclose(cert.a, 2 * W, atol=1e-12)
    assert_allclose(cert.S, -(np.eye(2) - m.rho), atol=1e-12)

    m0 = qubit_full(0.0)
    c0 = qubit_certificate(m0, fisher(m0), np.eye(3) / 9)
    assert c0.spur == pytest.approx(1.0, abs=1e-12)

    c = qubit_certificate(m, fd, np.eye(3))
    assert c.spur == pytest.approx((2 + np.sqrt(0.75)) ** 2, abs=1e-12)
    assert c.feasibility_margin >= -1e-9

    with pytest.raises(InvalidInputError):
        qubit_certificate(submodel(m, np.eye(3)[:, :2]), fisher(submodel(m, np.eye(3)[:, :2])), np.eye(2))


def test_recovery_scalar(scalar):
    m, fd, g, cert = scalar
    rec = recover_measurement(cert, model=m, g=g)
    assert rec.deviation / cert.spur <= 1 + 1e-4
    assert rec.deviation >= cert.spur - 1e-9
    assert deviation(rec, g) == pytest.approx(rec.deviation, rel=1e-12)


def test_recovery_qubit(qubit):
    m, fd, g, cert = qubit
    rec = recover_measurement(cert, model=m, g=g)
    assert rec.deviation == pytest.approx(1.0, abs=1e-2)
    assert rec.deviation >= cert.spur - 1e-9
    assert rec.povm_residual <= 1e-6 and rec.unbiasedness_residual <= 1e-6
    assert_allclose(sum(rec.elements()), np.eye(2), atol=1e-6)


def test_recovery_empty_pool():
    m = qubit_full(0.5)
    cert = DualCertificate(a=np.zeros((3, 3)), S=np.zeros((2, 2)), spur=0.0, feasibility_margin=0.0)
    rec = recover_measurement(cert, cut_pool=[], lp_duals=np.zeros(0), model=m)
    assert rec.weights.size == 0
    assert rec.povm_residual == pytest.approx(np.sqrt(2))


def test_to_dict(qubit):
    d = qubit[3].to_dict()
    assert set(d) >= {"a", "S", "spur", "margin", "rounds"}
    assert np.array(d["S"]).shape == (2, 2, 2)
