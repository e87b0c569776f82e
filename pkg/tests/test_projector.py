"""Leray projection and the drift-rotation membership check."""

import numpy as np
import pytest

from wakelab.grid import BodySpec, build_truncated_domain
from wakelab.projector import (
    LerayProjector,
    drift_rotation_field,
    membership_check_H,
)


@pytest.fixture(scope="module")
def setup():
    dom = build_truncated_domain(BodySpec(1.0), 4.0, 0.5)
    return dom, LerayProjector(dom)


def _random_field(dom, seed):
    rng = np.random.default_rng(seed)
    return [rng.normal(size=dom.active[ax].shape) for ax in range(3)]


def test_projection_kills_divergence(setup):
    dom, proj = setup
    u = _random_field(dom, 0)
    pu = proj.project(u)
    scale = dom.face_norm(pu)
    assert proj.divergence_norm(pu) < 1e-10 * scale


def test_projection_idempotent(setup):
    dom, proj = setup
    u = _random_field(dom, 1)
    pu = proj.project(u)
    ppu = proj.project(pu)
    diff = [ppu[ax] - pu[ax] for ax in range(3)]
    assert dom.face_norm(diff) < 1e-10 * dom.face_norm(pu)


def test_projection_fixes_solenoidal_fields(setup):
    dom, proj = setup
    pu = proj.project(_random_field(dom, 2))
    again = proj.project(pu)
    assert dom.face_norm([again[ax] - pu[ax] for ax in range(3)]) < 1e-10 * dom.face_norm(pu)


def test_projection_is_orthogonal(setup):
    # (I-P)u is face-orthogonal to P v for independent fields
    dom, proj = setup
    u = _random_field(dom, 3)
    v = _random_field(dom, 4)
    pu = proj.project(u)
    um = dom.zero_nonactive(u)
    gu = [um[ax] - pu[ax] for ax in range(3)]
    pv = proj.project(v)
    ip = dom.face_dot(gu, pv)
    assert abs(ip) < 1e-10 * dom.face_norm(gu) * dom.face_norm(pv)


def test_drift_rotation_field_is_divergence_free(setup):
    # the discrete transport field must have identically vanishing divergence
    # at every cell of the full grid, not just in the fluid
    dom, proj = setup
    u = proj.project(_random_field(dom, 5))
    for a, b in [(np.array([0.0, 0.0, 1.0]), np.zeros(3)),
                 (np.zeros(3), np.array([1.0, 0.0, 0.0])),
                 (np.array([0.3, -0.2, 0.9]), np.array([0.5, 0.1, -0.4]))]:
        F = drift_rotation_field(dom, u, a, b)
        d = dom.div(F)
        assert np.max(np.abs(d)) < 1e-11 * max(1.0, dom.face_norm(u))


@pytest.mark.parametrize(
    "a,b",
    [
        (np.array([1.0, 0.0, 0.0]), np.zeros(3)),       # pure rotation
        (np.zeros(3), np.array([1.0, 0.0, 0.0])),       # pure translation
        (np.array([1.0, 0.0, 0.0]), np.array([0.7, 0.0, 0.0])),  # screw motion
    ],
)
def test_membership_residual_small(setup, a, b):
    dom, proj = setup
    u = proj.project(_random_field(dom, 6))
    report = membership_check_H(proj, u, a, b)
    assert report.residual < 1e-6
    assert report.sobolev_norm > 0


def test_membership_detects_gradient_contamination(setup):
    # sanity: a raw gradient field is fully rejected by the projector, so the
    # same pipeline applied to it reports an order-one normalized residual
    dom, proj = setup
    rng = np.random.default_rng(9)
    phi = dom.zero_cells()
    phi[dom.fluid] = rng.normal(size=int(dom.fluid.sum()))
    g = dom.grad(phi)
    gp = proj.gradient_part(g)
    assert dom.face_norm([g[ax] - gp[ax] for ax in range(3)]) < 1e-9 * dom.face_norm(g)
