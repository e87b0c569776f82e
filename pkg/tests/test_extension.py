"""Solenoidal boundary-data extension built from an edge-based vector potential."""

import numpy as np
import pytest

from wakelab.extension import ExtensionSmallnessError, build_extension
from wakelab.grid import BodySpec, build_truncated_domain
from wakelab.motion import RigidMotionSpec


def _translation_motion(amp=0.1):
    return RigidMotionSpec.from_modes(1.0, {0: np.array([amp, 0.0, 0.0])}, None)


def _spinning_motion():
    return RigidMotionSpec.from_modes(1.0, None, {0: np.array([0.08, 0.0, 0.0])})


@pytest.fixture(scope="module")
def domain():
    return build_truncated_domain(BodySpec(0.5), R=3.0, h=0.125)


@pytest.fixture(scope="module")
def translating(domain):
    return build_extension(_translation_motion(), domain, rho=1.4, eps_target=0.25)


def test_zero_motion_yields_zero_field(domain):
    motion = RigidMotionSpec.from_modes(1.0, None, None)
    ext = build_extension(motion, domain, rho=1.4, eps_target=0.25)
    assert ext.is_zero
    assert ext.epsilon == 0.0
    u = ext.at_time(0.3)
    assert all(np.all(u[ax] == 0.0) for ax in range(3))


def test_divergence_free_at_samples(domain, translating):
    for t in (0.0, 0.17, 0.5, 0.99):
        u = translating.at_time(t)
        dv = domain.div(u)
        assert np.abs(dv).max() < 1e-10


def test_smallness_certificate(translating):
    assert 0.0 < translating.epsilon <= 0.25


def test_vanishes_beyond_support(domain, translating):
    u = translating.at_time(0.4)
    for ax in range(3):
        x, y, z = domain.face_coords(ax)
        r = np.broadcast_to(np.sqrt(x**2 + y**2 + z**2), u[ax].shape)
        assert np.all(u[ax][r >= translating.rho] == 0.0)


def test_matches_rigid_field_in_plateau(domain, translating):
    # faces whose curl stencils sit inside the plateau carry the rigid field
    u = translating.at_time(0.0)
    xi = translating.motion.xi(0.0)
    r_p = 0.5 + translating.layer_width
    worst = 0.0
    checked = 0
    for ax in range(3):
        x, y, z = domain.face_coords(ax)
        r = np.broadcast_to(np.sqrt(x**2 + y**2 + z**2), u[ax].shape)
        sel = domain.active[ax] & (r < r_p - 0.75 * domain.h)
        if sel.any():
            checked += int(sel.sum())
            worst = max(worst, np.abs(u[ax][sel] - xi[ax]).max())
    assert checked > 0
    assert worst < 1e-12


def test_rotation_field_in_plateau(domain):
    ext = build_extension(_spinning_motion(), domain, rho=1.4, eps_target=0.25)
    om = ext.motion.omega(0.0)
    u = ext.at_time(0.0)
    r_p = 0.5 + ext.layer_width
    worst = 0.0
    checked = 0
    for ax in range(3):
        x, y, z = domain.face_coords(ax)
        coords = (x, y, z)
        r = np.broadcast_to(np.sqrt(x**2 + y**2 + z**2), u[ax].shape)
        sel = domain.active[ax] & (r < r_p - 0.75 * domain.h)
        if sel.any():
            checked += int(sel.sum())
            g, d = (ax + 1) % 3, (ax + 2) % 3
            rigid = np.broadcast_to(om[g] * coords[d] - om[d] * coords[g], u[ax].shape)
            worst = max(worst, np.abs(u[ax][sel] - rigid[sel]).max())
    assert checked > 0
    assert worst < 1e-12


def test_boundary_trace_first_order(domain):
    # data imposed on the staircase deviates from the true-sphere data at
    # first order in h for rotational motion
    coarse = build_extension(
        _spinning_motion(), domain, rho=1.4, eps_target=0.25
    ).boundary_trace_error(0.0)
    fine_dom = build_truncated_domain(BodySpec(0.5), R=3.0, h=0.0625)
    fine = build_extension(
        _spinning_motion(), fine_dom, rho=1.4, eps_target=0.25
    ).boundary_trace_error(0.0)
    assert coarse > 0
    ratio = coarse / fine
    assert 1.2 < ratio < 3.5


def test_periodicity(translating):
    u0 = translating.at_time(0.0)
    u1 = translating.at_time(1.0)
    for ax in range(3):
        assert np.abs(u0[ax] - u1[ax]).max() < 1e-12


def test_time_derivative_matches_finite_difference(domain):
    motion = RigidMotionSpec.from_modes(
        1.0, {0: np.array([0.05, 0.0, 0.0]), 1: np.array([0.015, 0.0, 0.0])}, None
    )
    ext = build_extension(motion, domain, rho=1.4, eps_target=0.25)
    t, dt = 0.21, 1e-5
    exact = ext.time_derivative(t, order=1)
    up = ext.at_time(t + dt)
    dn = ext.at_time(t - dt)
    for ax in range(3):
        fd = (up[ax] - dn[ax]) / (2 * dt)
        assert np.abs(fd - exact[ax]).max() < 1e-6


def test_unreachable_target_raises(domain):
    with pytest.raises(ExtensionSmallnessError) as err:
        build_extension(_translation_motion(amp=2.0), domain, rho=1.4, eps_target=1e-6)
    assert err.value.achieved > 1e-6
