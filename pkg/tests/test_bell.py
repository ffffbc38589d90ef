import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from repeaterlab.bell import (
    MIXED,
    PERFECT,
    PUMP_TABLE,
    SINGLET,
    BellVector,
    ErrorModel,
    compose,
    connect_chain,
    connect_pair,
    purify_step,
    shape_state,
)
from repeaterlab.errors import DomainError

from conftest import bell_vectors, error_models


def close(x, y, tol=1e-12):
    return x.max_abs_diff(y) <= tol


def test_klein_group():
    for k in range(4):
        assert compose(0, k) == k
        assert compose(k, k) == 0
        for j in range(4):
            assert compose(k, j) == compose(j, k)


def test_bellvector_validation():
    with pytest.raises(DomainError):
        BellVector(0.5, 0.5, 0.5, 0.0)
    with pytest.raises(DomainError):
        BellVector(1.1, -0.1, 0.0, 0.0)
    with pytest.raises(DomainError):
        BellVector(float("nan"), 0, 0, 1)
    assert BellVector(1.0, 0.0, 0.0, 0.0).fidelity == 1.0


def test_error_model_bounds():
    with pytest.raises(DomainError):
        ErrorModel(0.0, 1.0)
    with pytest.raises(DomainError):
        ErrorModel(1.0, 1.2)


def test_shape_state():
    assert shape_state(0.9, 0.0).as_tuple() == pytest.approx((0.9, 0, 0, 0.1))
    w = shape_state(0.7, 1 / 3)
    assert w.b == pytest.approx(0.1) and w.c == pytest.approx(0.1) and w.d == pytest.approx(0.1)
    with pytest.raises(DomainError):
        shape_state(0.9, 0.4)


def test_swap_perfect_singlets():
    assert connect_pair(SINGLET, SINGLET) == SINGLET


def test_swap_singlet_is_identity_for_werner():
    f = 0.83
    w = BellVector(f, (1 - f) / 3, (1 - f) / 3, (1 - f) / 3)
    assert close(connect_pair(SINGLET, w), w)


def test_chain_single_and_perfect():
    assert connect_chain([SINGLET]) == SINGLET
    assert connect_chain([SINGLET] * 3) == SINGLET
    x = BellVector(0.9, 0.02, 0.03, 0.05)
    assert connect_chain([x], ErrorModel(0.9, 0.9)) is x
    with pytest.raises(DomainError):
        connect_chain([])


def test_swap_matches_werner_formula():
    # Werner inputs stay Werner with the textbook fidelity
    err = ErrorModel(0.97, 0.98)
    f1, f2 = 0.9, 0.85
    w1 = shape_state(f1, 1 / 3)
    w2 = shape_state(f2, 1 / 3)
    out = connect_pair(w1, w2, err)
    eta, p = err.eta, err.p
    expected = 0.25 + 0.25 * p * (4 * eta**2 - 1) / 3 * (4 * f1 - 1) * (4 * f2 - 1) / 3
    assert out.a == pytest.approx(expected, abs=1e-14)


def test_pump_table_covers_group():
    assert len(PUMP_TABLE) == 16
    successes = [k for k, (_, ok) in PUMP_TABLE.items() if ok]
    assert len(successes) == 8


def test_purify_perfect():
    out = purify_step(SINGLET, SINGLET)
    assert out.state == SINGLET
    assert out.success_prob == 1.0


def test_purify_phase_errors_improve():
    x = BellVector(0.9, 0.0, 0.0, 0.1)
    out = purify_step(x, x)
    assert out.state.a > 0.9
    # DEJMPS on phase errors: F^2 / (F^2 + (1-F)^2)
    assert out.state.a == pytest.approx(0.81 / 0.82, abs=1e-14)
    assert out.success_prob == pytest.approx(0.82, abs=1e-14)


def test_purify_floor_at_p_small():
    out = purify_step(SINGLET, SINGLET, ErrorModel(1e-9, 1.0))
    assert close(out.state, MIXED, 1e-8)


@given(bell_vectors(), bell_vectors(), error_models)
def test_normalization(x, y, err):
    for v in (connect_pair(x, y, err), connect_chain([x, y, x], err), purify_step(x, y, err).state):
        assert abs(math.fsum(v) - 1.0) <= 1e-12
        assert min(v) >= -1e-15


@given(bell_vectors())
def test_singlet_identity(x):
    assert close(connect_pair(x, SINGLET, PERFECT), x)
    assert close(connect_pair(SINGLET, x, PERFECT), x)


@given(bell_vectors(), bell_vectors(), error_models)
def test_swap_symmetric(x, y, err):
    assert close(connect_pair(x, y, err), connect_pair(y, x, err), 1e-15)


@given(bell_vectors(), bell_vectors(), st.floats(min_value=1e-12, max_value=1e-6))
def test_depolarisation_floor(x, y, p):
    assert close(connect_pair(x, y, ErrorModel(p, 0.95)), MIXED, 1e-6)


@given(st.floats(min_value=0.5001, max_value=0.9999))
def test_purification_gain_phase_only(f):
    x = BellVector(f, 0.0, 0.0, 1.0 - f)
    assert purify_step(x, x).state.a > f


@settings(max_examples=50)
@given(bell_vectors(), bell_vectors(), bell_vectors(), error_models)
def test_chain_fold_order_free(x, y, z, err):
    left = connect_pair(connect_pair(x, y, err), z, err)
    right = connect_pair(x, connect_pair(y, z, err), err)
    assert close(left, right, 1e-14)
