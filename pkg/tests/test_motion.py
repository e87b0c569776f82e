import numpy as np
import pytest

from wakelab.motion import (
    RigidMotionSpec,
    average_velocity,
    integrate_rotation,
    rigid_field,
    skew,
    validate_hypothesis_H,
)
from wakelab.timeseries import TrigSeries


def make_motion(T=2.0, xi=None, omega=None):
    return RigidMotionSpec.from_modes(T, xi, omega)


# ---------------------------------------------------------------- trig series

def test_trig_series_round_trip():
    T = 3.0
    rng = np.random.default_rng(0)
    coeffs = {0: rng.normal(size=3), 1: rng.normal(size=3) + 1j * rng.normal(size=3)}
    s = TrigSeries(T, coeffs)
    resampled = TrigSeries.from_samples(T, s.sample(16))
    t = np.linspace(0, T, 37)
    assert np.allclose(s(t), resampled(t), atol=1e-12)


def test_trig_series_parseval_cosine():
    # xi(t) = cos(2 pi t / T) e1: integral of xi^2 over a period is T/2,
    # and each time derivative multiplies the mode by 2 pi / T.
    T = 2.0
    w = 2 * np.pi / T
    s = TrigSeries(T, {1: np.array([0.5, 0, 0])})  # cos = (e^i + e^-i)/2
    assert np.isclose(s.l2_norm_sq(), T / 2, rtol=1e-14)
    expected_w22 = np.sqrt(T / 2 * (1 + w**2 + w**4))
    assert np.isclose(s.sobolev_norm(2), expected_w22, rtol=1e-13)
    # quadrature cross-check of the same norms
    n = 256
    vals = s.sample(n)
    dvals = s.derivative().sample(n)
    ddvals = s.derivative(2).sample(n)
    quad = np.sqrt((T / n) * np.sum(vals**2 + dvals**2 + ddvals**2))
    assert abs(quad - s.sobolev_norm(2)) < 1e-8


def test_trig_series_exact_antiderivative():
    T = 2.0
    s = TrigSeries(T, {0: np.array([0.3, 0, 0]), 1: np.array([0, 0.5, 0])})
    t = np.linspace(0, 2 * T, 101)
    w = 2 * np.pi / T
    expected = np.zeros((t.size, 3))
    expected[:, 0] = 0.3 * t
    expected[:, 1] = np.sin(w * t) / w
    assert np.allclose(s.antiderivative_from_zero(t), expected, atol=1e-12)


# ------------------------------------------------------------- hypothesis (H)

def test_hypothesis_holds_parallel():
    m = make_motion(
        xi={0: np.array([1.0, 0, 0]), 1: np.array([0.5, 0, 0])},
        omega={1: np.array([-0.5j, 0, 0])},  # sin mode along e1
    )
    assert validate_hypothesis_H(m).holds


def test_hypothesis_holds_zero_xi_any_omega():
    T = 2 * np.pi
    m = make_motion(
        T=T,
        xi=None,
        omega={0: np.array([0, 0, 1.0]), 1: np.array([0.5, -0.5j, 0])},  # (cos t, sin t, 1)
    )
    assert validate_hypothesis_H(m).holds


def test_hypothesis_violated_nonparallel():
    m = make_motion(xi={0: np.array([1.0, 0, 0])}, omega={0: np.array([0, 1.0, 0])})
    assert not validate_hypothesis_H(m).holds


# ---------------------------------------------------------------- average, V0

def test_average_velocity_mean_plus_cosine():
    m = make_motion(xi={0: np.array([2.0, 0, 0]), 1: np.array([0.5, 0, 0])})
    lam, e1 = average_velocity(m)
    assert np.isclose(lam, 2.0)
    assert np.allclose(e1, [1, 0, 0])


def test_average_velocity_zero_mean():
    m = make_motion(xi={1: np.array([0.5, 0, 0])})
    lam, _ = average_velocity(m)
    assert lam == 0.0


def test_average_velocity_from_stored_zero_mode():
    m = make_motion(xi={0: np.array([0.5, 0, 0])})
    lam, _ = average_velocity(m)
    assert np.isclose(lam, 0.5)


def test_ingestion_rotates_mean_to_axis():
    m = make_motion(xi={0: np.array([0, 0.7, 0]), 1: np.array([0, 0.2, 0])})
    lam, e1 = average_velocity(m)
    assert np.isclose(lam, 0.7)
    assert np.allclose(e1, [1, 0, 0], atol=1e-14)
    # the oscillating part rotates along with the mean (mode +-1 pair doubles)
    assert np.allclose(m.xi(0.0), [1.1, 0, 0], atol=1e-13)


# ------------------------------------------------------------------- rotation

def test_skew_matrix_identity():
    rng = np.random.default_rng(1)
    w = rng.normal(size=3)
    a = rng.normal(size=3)
    A = skew(w)
    assert np.allclose(A + A.T, 0.0)
    assert np.allclose(A @ a, np.cross(w, a))


def test_rotation_constant_axis_closed_form():
    # constant omega about e1: rotation by omega0*t, and e1 is a fixed point
    T = 2.0
    w0 = 1.3
    m = make_motion(T=T, omega={0: np.array([w0, 0, 0])})
    path = integrate_rotation(m, 16)
    for t, Q in zip(path.times, path.Q):
        c, s = np.cos(w0 * t), np.sin(w0 * t)
        expected = np.array([[1, 0, 0], [0, c, -s], [0, s, c]])
        assert np.max(np.abs(Q - expected)) < 1e-9
        assert np.allclose(Q @ np.array([1.0, 0, 0]), [1, 0, 0], atol=1e-12)


def test_rotation_time_varying_fixed_axis_closed_form():
    # omega = (0, 0, cos(2 pi t/T)): angle theta(t) = (T/2pi) sin(2 pi t/T)
    T = 2.0
    m = make_motion(T=T, omega={1: np.array([0, 0, 0.5])})
    path = integrate_rotation(m, 32)
    w = 2 * np.pi / T
    for t, Q in zip(path.times, path.Q):
        th = np.sin(w * t) / w
        c, s = np.cos(th), np.sin(th)
        expected = np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])
        assert np.max(np.abs(Q - expected)) < 1e-8


def test_rotation_drift_ten_periods():
    m = make_motion(
        T=1.5,
        omega={0: np.array([0.4, 0, 0.8]), 1: np.array([0.3, 0.1j, 0])},
    )
    path = integrate_rotation(m, 16, periods=10)
    assert path.orthogonality_drift() < 1e-10


def test_rotation_generator_identity():
    # Q^T dQ/dt a = omega x a, with dQ/dt by centered differences
    m = make_motion(T=2.0, omega={0: np.array([0.2, 0.5, 0.1]), 1: np.array([0.3, 0, 0])})
    path = integrate_rotation(m, 16)
    rng = np.random.default_rng(3)
    a = rng.normal(size=3)
    d = 1e-6
    for t in [0.3, 0.9, 1.7]:
        Qp, _ = path.at(t + d)
        Qm, _ = path.at(t - d)
        Q, _ = path.at(t)
        Qdot = (Qp - Qm) / (2 * d)
        om = m.omega(t)
        err = np.linalg.norm(Q.T @ Qdot @ a - np.cross(om, a))
        assert err <= 1e-6 * max(np.linalg.norm(om) * np.linalg.norm(a), 1.0)


def test_drift_zero_for_constant_xi():
    m = make_motion(xi={0: np.array([0.7, 0, 0])})
    path = integrate_rotation(m, 16)
    assert np.max(np.abs(path.x0)) < 1e-14


def test_drift_periodic_and_bounded():
    m = make_motion(
        xi={0: np.array([0.5, 0, 0]), 1: np.array([0.3, 0, 0]), 2: np.array([0, 0.1j, 0])}
    )
    path = integrate_rotation(m, 16, periods=2)
    # x0 at t=0 and t=T agree (the integrand has zero mean by construction)
    n = 16
    assert np.linalg.norm(path.x0[0] - path.x0[n]) < 1e-10
    assert path.M >= np.max(np.linalg.norm(path.x0, axis=1)) - 1e-12


# ---------------------------------------------------------------- rigid field

def test_rigid_field_translation():
    m = make_motion(xi={0: np.array([1.0, 0, 0])})
    V = rigid_field(m, 0.37, np.array([[0.2, -5.0, 3.3]]))
    assert np.allclose(V, [[1, 0, 0]])


def test_rigid_field_rotation():
    m = make_motion(omega={0: np.array([0, 0, 1.0])})
    V = rigid_field(m, 0.0, np.array([1.0, 0, 0]))
    assert np.allclose(V, [0, 1, 0])


def test_rigid_field_combined():
    m = make_motion(xi={0: np.array([1.0, 0, 0])}, omega={0: np.array([1.0, 0, 0])})
    V = rigid_field(m, 0.0, np.array([0, 1.0, 0]))
    assert np.allclose(V, [1, 0, 1])


def test_two_samples_per_period_rejected():
    m = make_motion(omega={0: np.array([1.0, 0, 0])})
    with pytest.raises(ValueError):
        integrate_rotation(m, 4)
