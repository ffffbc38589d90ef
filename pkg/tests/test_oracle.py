import numpy as np
import pytest

from repeaterlab import oracle
from repeaterlab.bell import MIXED, PUMP_TABLE, SINGLET, BellVector, ErrorModel, connect_chain, connect_pair, purify_step
from repeaterlab.errors import DomainError

from conftest import random_bell

N_CASES = 100


def random_err(rng):
    return ErrorModel(float(rng.uniform(0.9, 1.0)), float(rng.uniform(0.9, 1.0)))


def random_rho(rng, n=2):
    dim = 2**n
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def test_from_bell_vector_examples():
    s = oracle.from_bell_vector(SINGLET)
    psi_minus = np.array([0, 1, -1, 0]) / np.sqrt(2)
    assert np.allclose(s, np.outer(psi_minus, psi_minus))
    assert np.allclose(oracle.from_bell_vector(MIXED), np.eye(4) / 4)


def test_round_trip(rng):
    for _ in range(20):
        v = random_bell(rng)
        assert oracle.diag_in_bell_basis(oracle.from_bell_vector(v)).max_abs_diff(v) < 1e-14


def test_projection_keeps_fidelity(rng):
    rho = random_rho(rng)
    psi_minus = oracle.BELL_BASIS[:, 0]
    assert oracle.diag_in_bell_basis(rho).a == pytest.approx(np.real(psi_minus.conj() @ rho @ psi_minus), abs=1e-14)


def test_gate_channel(rng):
    rho = random_rho(rng)
    U = oracle.CNOT
    assert np.allclose(oracle.noisy_gate(rho, U, [0, 1], 1.0), U @ rho @ U.conj().T, atol=1e-15)
    assert np.allclose(oracle.noisy_gate(rho, U, [0, 1], 0.0), np.eye(4) / 4, atol=1e-15)
    with pytest.raises(DomainError):
        oracle.noisy_gate(rho, 2 * U, [0, 1], 0.5)


def test_gate_channel_trace_preserving(rng):
    for _ in range(20):
        rho = random_rho(rng, 4)
        out = oracle.noisy_gate(rho, oracle.GATE_I, [0, 2], float(rng.uniform()))
        assert abs(np.trace(out) - 1.0) < 1e-14
        oracle.check_density_matrix(out)


def test_measure(rng):
    ket0 = np.array([1, 0], dtype=complex)
    rho = np.kron(np.outer(ket0, ket0), np.eye(2) / 2)
    _, p0 = oracle.noisy_measure(rho, 0, 0, 0.99)
    assert p0 == pytest.approx(0.99)
    rho = random_rho(rng)
    for eta in (1.0, 0.93):
        p = sum(oracle.noisy_measure(rho, 1, k, eta)[1] for k in (0, 1))
        assert p == pytest.approx(1.0, abs=1e-14)
    post, p = oracle.noisy_measure(rho, 0, 1, 1.0)
    P1 = np.kron(np.diag([0, 1]), np.eye(2))
    assert np.allclose(post, P1 @ rho @ P1)


def test_perfect_circuits():
    s = oracle.from_bell_vector(SINGLET)
    post, p_s = oracle.purify_circuit(s, s, ErrorModel())
    assert oracle.diag_in_bell_basis(post).max_abs_diff(SINGLET) < 1e-14
    assert p_s == pytest.approx(1.0)
    out = oracle.swap_circuit(s, s, ErrorModel())
    assert oracle.diag_in_bell_basis(out).max_abs_diff(SINGLET) < 1e-14


def test_pump_table_derived_from_circuit():
    assert oracle.ideal_purify_table() == PUMP_TABLE


def test_gate_assignment_symmetric():
    # the two gates can sit at either end of the pair
    assert oracle.ideal_purify_table(oracle.GATE_J, oracle.GATE_I) == PUMP_TABLE


def test_purify_matches_oracle(rng):
    worst = 0.0
    for _ in range(N_CASES):
        x, y, err = random_bell(rng), random_bell(rng), random_err(rng)
        post, p_s = oracle.purify_circuit(oracle.from_bell_vector(x), oracle.from_bell_vector(y), err)
        out = purify_step(x, y, err)
        worst = max(worst, out.state.max_abs_diff(oracle.diag_in_bell_basis(post)), abs(out.success_prob - p_s))
        assert oracle.off_diagonal_norm(post) < 1e-12
        assert np.linalg.eigvalsh(post).min() > -1e-12
    assert worst < 1e-12


def test_swap_matches_oracle(rng):
    worst = 0.0
    for _ in range(N_CASES):
        x, y, err = random_bell(rng), random_bell(rng), random_err(rng)
        out = oracle.swap_circuit(oracle.from_bell_vector(x), oracle.from_bell_vector(y), err)
        assert abs(np.trace(out) - 1.0) < 1e-13
        assert oracle.off_diagonal_norm(out) < 1e-12
        assert np.linalg.eigvalsh(out).min() > -1e-12
        worst = max(worst, connect_pair(x, y, err).max_abs_diff(oracle.diag_in_bell_basis(out)))
    assert worst < 1e-12


def test_spec_cases():
    err = ErrorModel(0.99, 0.99)
    x = BellVector(0.95, 0.0, 0.0, 0.05)
    ref = oracle.diag_in_bell_basis(oracle.swap_circuit(oracle.from_bell_vector(x), oracle.from_bell_vector(x), err))
    assert connect_pair(x, x, err).max_abs_diff(ref) < 1e-12

    stored, aux = BellVector(0.97, 0.005, 0.005, 0.02), BellVector(0.96, 0.0, 0.0, 0.04)
    post, p_s = oracle.purify_circuit(oracle.from_bell_vector(stored), oracle.from_bell_vector(aux), err)
    out = purify_step(stored, aux, err)
    assert out.state.max_abs_diff(oracle.diag_in_bell_basis(post)) < 1e-12
    assert out.success_prob == pytest.approx(p_s, abs=1e-12)


def test_chain_matches_pairwise_oracle():
    err = ErrorModel(0.995, 0.995)
    x = BellVector(0.99, 0.0, 0.0, 0.01)
    rho = oracle.from_bell_vector(x)
    for _ in range(4):
        rho = oracle.swap_circuit(rho, oracle.from_bell_vector(x), err)
    assert connect_chain([x] * 5, err).max_abs_diff(oracle.diag_in_bell_basis(rho)) < 1e-12


def test_non_diagonal_inputs_stay_physical(rng):
    err = random_err(rng)
    post, p_s = oracle.purify_circuit(random_rho(rng), random_rho(rng), err)
    oracle.check_density_matrix(post, tol=1e-10)
    assert 0 < p_s <= 1
