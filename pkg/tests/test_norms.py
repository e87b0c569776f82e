"""Bochner / Sobolev-in-time / wake-weighted norm evaluators."""

import numpy as np
import pytest

from wakelab.fields import PeriodicField
from wakelab.grid import build_annulus_domain
from wakelab.norms import (
    WakeWeight,
    compute_norms,
    parseval_deviation,
    wake_norm,
    wake_norm_samples,
)
from wakelab.projector import LerayProjector
from wakelab.timeseries import TrigSeries


@pytest.fixture(scope="module")
def domain():
    return build_annulus_domain(1.0, 2.5, 0.25)


def _random_trajectory(domain, n_t=8, seed=7):
    rng = np.random.default_rng(seed)
    proj = LerayProjector(domain)
    vel = [
        proj.project([rng.standard_normal(domain.active[ax].shape) for ax in range(3)])
        for _ in range(n_t)
    ]
    return PeriodicField(domain=domain, period=2.0, velocity=vel)


def test_constant_in_time_l2_factor(domain):
    rng = np.random.default_rng(3)
    u = domain.zero_nonactive(
        [rng.standard_normal(domain.active[ax].shape) for ax in range(3)]
    )
    traj = PeriodicField(domain=domain, period=2.0, velocity=[u] * 6)
    b = compute_norms(traj)
    assert b["L2_L2"] == pytest.approx(np.sqrt(2.0) * domain.face_norm(u), rel=1e-12)
    assert b["Linf_L2"] == pytest.approx(domain.face_norm(u), rel=1e-12)


def test_cosine_path_closed_form():
    T = 2.0
    w = 2.0 * np.pi / T
    path = TrigSeries(T, {1: np.array([0.5, 0.0, 0.0])})  # cos(w t) e1
    b = compute_norms(path)
    assert b["W02"] ** 2 == pytest.approx(T / 2.0, rel=1e-12)
    assert b["W12"] ** 2 == pytest.approx((T / 2.0) * (1 + w**2), rel=1e-12)
    assert b["W22"] ** 2 == pytest.approx((T / 2.0) * (1 + w**2 + w**4), rel=1e-12)
    assert b["Linf"] == pytest.approx(1.0, rel=1e-10)


def test_parseval_scalar_path():
    rng = np.random.default_rng(11)
    path = TrigSeries(
        3.0, {m: rng.standard_normal(3) + 1j * rng.standard_normal(3) for m in range(4)}
    )
    assert parseval_deviation(path) < 1e-8


def test_parseval_trajectory(domain):
    traj = _random_trajectory(domain)
    assert parseval_deviation(traj) < 1e-8


def test_l2_bounded_by_sup(domain):
    traj = _random_trajectory(domain, seed=13)
    b = compute_norms(traj)
    for key in ("L2", "L3", "L6", "D12", "D22"):
        assert b[f"L2_{key}"] <= np.sqrt(traj.period) * b[f"Linf_{key}"] * (1 + 1e-12)


def test_wake_weight_geometry():
    ww = WakeWeight(0.5)
    pts = np.array([[-3.0, 0.0, 0.0], [3.0, 0.0, 0.0], [0.0, 4.0, 0.0]])
    s = ww.s(pts)
    assert s[0] == pytest.approx(0.0, abs=1e-14)  # downstream ray
    assert s[1] == pytest.approx(6.0)
    assert np.all(s >= 0)
    # weight reduces to (1+|x|)^m on the wake ray
    assert ww.factor(pts, 1)[0] == pytest.approx(4.0)
    assert ww.factor(pts, 2)[0] == pytest.approx(16.0)


def test_wake_norm_of_inverse_weight():
    # f = 1/weight has weighted magnitude exactly 1 at every sample point
    rng = np.random.default_rng(23)
    pts = rng.uniform(-10, 10, size=(500, 3))
    mag = 1.0 / WakeWeight(0.5).factor(pts, 1)
    assert wake_norm_samples(mag, pts, 0.5, 1) == pytest.approx(1.0, rel=1e-12)


def test_wake_norm_zero_field(domain):
    traj = PeriodicField(domain=domain, period=1.0, velocity=[domain.zero_faces()] * 4)
    assert wake_norm(traj, 0.5, 1) == 0.0


def test_wake_norm_brute_force_scan(domain):
    # oracle: python-loop max over every fluid cell and sample
    traj = _random_trajectory(domain, n_t=3, seed=29)
    lam, m = 0.7, 2
    got = wake_norm(traj, lam, m)
    xs, ys, zs = domain.cell_center_mesh()
    best = 0.0
    for u in traj.velocity:
        uc = domain.face_to_center(u)
        for idx in np.argwhere(domain.fluid):
            i, j, k = idx
            x = np.array([xs[i, 0, 0], ys[0, j, 0], zs[0, 0, k]])
            r = np.linalg.norm(x)
            wgt = ((1 + r) * (1 + 2 * lam * (r + x[0]))) ** m
            mag = np.sqrt(sum(uc[ax][i, j, k] ** 2 for ax in range(3)))
            best = max(best, wgt * mag)
    assert got == pytest.approx(best, rel=1e-12)


def test_periodicity_residual_requires_closure(domain):
    traj = _random_trajectory(domain, n_t=2, seed=31)
    with pytest.raises(ValueError, match="closure"):
        traj.periodicity_residual()
    closed = PeriodicField(
        domain=domain, period=1.0, velocity=traj.velocity, closure=traj.velocity[0]
    )
    assert closed.periodicity_residual() == 0.0


def test_divergence_residual_of_projected_trajectory(domain):
    traj = _random_trajectory(domain, n_t=3, seed=37)
    assert traj.divergence_residual() < 1e-9
