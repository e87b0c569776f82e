"""Tests for the periodic Galerkin assembly and solve."""

import numpy as np
import pytest

from wakelab.extension import ExtensionField, build_extension
from wakelab.fields import PeriodicField
from wakelab.galerkin import (
    GalerkinSystem,
    _advect_by_faces,
    _cross_unit_faces,
    _pack_matrix,
    _phi_field,
    _phi_rotation,
    _skew,
    assemble_galerkin,
    energy_identity_defect,
    fourier_diff_matrix,
    monodromy_radius,
    reconstruct_velocity,
    recover_pressure,
    replay_estimates,
    solve_periodic,
)
from wakelab.grid import BodySpec, build_truncated_domain
from wakelab.motion import RigidMotionSpec
from wakelab.stokes import StokesBasis, assemble_projector, solve_stokes_eigs

K = 6


@pytest.fixture(scope="module")
def domain():
    return build_truncated_domain(BodySpec(0.5), R=2.5, h=0.25)


@pytest.fixture(scope="module")
def basis(domain):
    # the tight residual target is a property of the larger reference grids;
    # this small fixture only needs eigenpairs good to the energy-check level
    return solve_stokes_eigs(
        assemble_projector(domain), K, seed=42, target_residual=1e-5
    )


def _zero_motion(period=1.0):
    return RigidMotionSpec.from_modes(period, None, None)


def _spin_motion(period=1.0):
    return RigidMotionSpec.from_modes(
        period, None, {0: np.array([0.08, 0.0, 0.0]), 1: np.array([0.03, 0.0, 0.0])}
    )


def _blob_forcing(domain, basis, n_t, period=1.0):
    """Smooth solenoidal forcing: projected Gaussian blob, cosine in time."""
    from wakelab.projector import LerayProjector

    proj = LerayProjector(domain)
    raw = []
    for ax in range(3):
        x, y, z = domain.face_coords(ax)
        r2 = (x - 0.3) ** 2 + y**2 + (z + 0.2) ** 2
        raw.append(np.where(domain.active[ax], np.exp(-2.0 * r2), 0.0) * (ax == 0))
    blob = proj.project(raw)
    times = np.arange(n_t) * (period / n_t)
    return [
        [np.cos(2 * np.pi * t / period) * blob[ax] for ax in range(3)] for t in times
    ]


def _manual_system(lam, load, n_t, period=1.0):
    return GalerkinSystem(
        basis=None,
        motion=_zero_motion(period),
        extension=None,
        n_t=n_t,
        lam=np.asarray(lam, dtype=float),
        b_xi=[None] * 3,
        b_om=[None] * 3,
        load=load,
        ftilde=[],
    )


# ------------------------------------------------------------- time operator
def test_fourier_diff_matrix_exact_on_low_modes():
    n, T = 16, 2.0
    D = fourier_diff_matrix(n, T)
    assert np.max(np.abs(D + D.T)) < 1e-14
    t = np.arange(n) * T / n
    for m in (1, 3, 5):
        s = np.sin(2 * np.pi * m * t / T)
        ds = (2 * np.pi * m / T) * np.cos(2 * np.pi * m * t / T)
        assert np.max(np.abs(D @ s - ds)) < 1e-11


# ------------------------------------------------------------------ assembly
def test_motionless_system_is_diagonal(domain, basis):
    sys0 = assemble_galerkin(basis, _zero_motion(), n_t=8)
    assert all(m is None for m in sys0.b_xi + sys0.b_om)
    assert np.max(np.abs(sys0.coupling_at(0.37))) == 0.0
    assert np.max(np.abs(sys0.load)) == 0.0


def test_constant_rotation_gives_constant_coupling(domain, basis):
    motion = RigidMotionSpec.from_modes(1.0, None, {0: np.array([0.3, 0.0, 0.0])})
    sys0 = assemble_galerkin(basis, motion, n_t=8)
    B0 = sys0.coupling_at(0.0)
    assert np.max(np.abs(B0)) > 0.0
    for t in (0.21, 0.5, 0.84):
        assert np.allclose(sys0.coupling_at(t), B0, rtol=0, atol=1e-13)


def test_rotation_coupling_antisymmetric(domain, basis):
    sys0 = assemble_galerkin(basis, _spin_motion(), n_t=8)
    # raw defect of the unsymmetrized (V.grad - omega x) block: the centered
    # difference is exactly summation-by-parts and the rigid coefficient has
    # no diagonal dependence, so this is a roundoff-level identity
    assert sys0.skew_defects["rotation_0"] < 1e-8
    B = sys0.coupling_at(0.3)
    assert np.max(np.abs(B + B.T)) <= 1e-12 * max(np.max(np.abs(B)), 1e-30)


def test_translation_coupling_antisymmetric(domain, basis):
    motion = RigidMotionSpec.from_modes(1.0, {0: np.array([0.1, 0.0, 0.0])}, None)
    sys0 = assemble_galerkin(basis, motion, n_t=8)
    assert sys0.skew_defects["translation_0"] < 1e-8


def test_rigid_field_coupling_consistency(domain, basis):
    """Advection by the rigid field given as data matches the analytic rigid
    coupling, and the collocated gradient coupling matches the cross-product
    matrix (both are quadratures of the same integrals)."""
    h3 = domain.h**3
    W = basis.packed
    fields = basis.fields()

    def mat(advs):
        return (W.T @ _pack_matrix(domain, advs)) * h3

    # rigid rotation field e1 x x = (0, -z, y) sampled on each face grid
    F = []
    for ax, sign, pick in ((0, 0.0, 0), (1, -1.0, 2), (2, 1.0, 1)):
        coords = domain.face_coords(ax)
        F.append(sign * coords[pick])
    X1 = mat([_advect_by_faces(domain, _phi_rotation(domain, 0), u) for u in fields])
    A_F = mat([_advect_by_faces(domain, _phi_field(domain, F), u) for u in fields])
    scale = np.max(np.abs(X1))
    assert np.max(np.abs(A_F - X1)) < 5e-2 * scale

    C1 = mat([_cross_unit_faces(domain, 0, u) for u in fields])
    # oracle: grad(e1 x x) applied to w_i is e1 x w_i exactly; collocate at
    # cell centers over the fluid region
    fl = domain.fluid
    centers = [domain.face_to_center(u) for u in fields]
    G_oracle = np.zeros((K, K))
    for i in range(K):
        cross = np.stack(
            [np.zeros_like(centers[i][0]), -centers[i][2], centers[i][1]]
        )
        for j in range(K):
            G_oracle[j, i] = np.sum(centers[j][:, fl] * cross[:, fl]) * h3
    cscale = np.max(np.abs(C1))
    assert np.max(np.abs(G_oracle - C1)) < 8e-2 * cscale

    # the assembled extension coupling (recovered by differencing two
    # assemblies) equals -skew(A_F) - G with G built from centered gradients
    motion = RigidMotionSpec.from_modes(1.0, {0: np.array([1.0, 0.0, 0.0])}, None)
    fake = ExtensionField(
        domain=domain,
        motion=motion,
        rho=2.0,
        layer_width=0.5,
        epsilon=0.0,
        unit_xi=[F, domain.zero_faces(), domain.zero_faces()],
        unit_omega=[domain.zero_faces() for _ in range(3)],
    )
    plain = assemble_galerkin(basis, motion, n_t=4)
    withf = assemble_galerkin(basis, motion, extension=fake, n_t=4)
    G_asm = -(withf.b_xi[0] - plain.b_xi[0]) - _skew(A_F)
    assert np.max(np.abs(G_asm - G_oracle)) < 8e-2 * cscale


def test_mismatched_domains_rejected(domain, basis):
    other = build_truncated_domain(BodySpec(0.5), R=3.0, h=0.25)
    motion = _spin_motion()
    fake = ExtensionField(
        domain=other, motion=motion, rho=1.0, layer_width=0.2, epsilon=0.0,
        unit_xi=[other.zero_faces()] * 3, unit_omega=[other.zero_faces()] * 3,
    )
    with pytest.raises(ValueError, match="domain"):
        assemble_galerkin(basis, motion, extension=fake, n_t=4)


# --------------------------------------------------------------------- solve
def test_diagonal_closed_form():
    lam, T, n_t = 0.7, 1.0, 32
    w = 2 * np.pi / T
    t = np.arange(n_t) * T / n_t
    load = np.cos(w * t)[:, None]
    sys0 = _manual_system([lam], load, n_t, T)
    c = solve_periodic(sys0)
    exact = np.real(np.exp(1j * w * t) / (lam + 1j * w))
    assert np.max(np.abs(c[:, 0] - exact)) < 1e-8


def test_zero_load_gives_zero_orbit(domain, basis):
    sys0 = assemble_galerkin(basis, _spin_motion(), n_t=8)
    c = solve_periodic(sys0)
    assert np.max(np.abs(c)) == 0.0


def test_time_refinement_fourth_order(domain, basis):
    f8 = _blob_forcing(domain, basis, 8)
    f16 = _blob_forcing(domain, basis, 16)
    f32 = _blob_forcing(domain, basis, 32)
    c8 = solve_periodic(assemble_galerkin(basis, _spin_motion(), f_samples=f8, n_t=8))
    c16 = solve_periodic(assemble_galerkin(basis, _spin_motion(), f_samples=f16, n_t=16))
    c32 = solve_periodic(assemble_galerkin(basis, _spin_motion(), f_samples=f32, n_t=32))
    e8 = np.max(np.abs(c8 - c16[::2]))
    e16 = np.max(np.abs(c16 - c32[::2]))
    # spectral collocation clears a fourth-order bar between doublings unless
    # the coarse error already sits at roundoff
    assert e16 <= max(e8 / 16.0, 1e-12)


def test_solve_reconstruct_full_chain(domain, basis):
    n_t = 32
    f = _blob_forcing(domain, basis, n_t)
    sys0 = assemble_galerkin(basis, _spin_motion(), f_samples=f, n_t=n_t)
    c = solve_periodic(sys0)
    traj = reconstruct_velocity(sys0, c)
    assert traj.periodicity_residual() < 1e-9
    assert traj.divergence_residual() < 1e-10
    assert energy_identity_defect(sys0, c) < 1e-6
    # field-level energy balance: dissipation against forcing power (the
    # rotation coupling is energy-neutral); limited by the eigen-residuals
    dt = sys0.period / n_t
    lhs = rhs = 0.0
    for n in range(n_t):
        v = domain.unpack_faces(basis.packed @ c[n])
        lhs += domain.dirichlet_grad_sq(v) * dt
        rhs += domain.face_dot(sys0.ftilde[n], v) * dt
    assert abs(lhs - rhs) <= 1e-4 * max(abs(lhs), abs(rhs))
    assert monodromy_radius(sys0, n_steps=512) < 1.0


def test_reconstruct_single_mode_identity(domain, basis):
    sub = StokesBasis(
        domain=domain,
        eigenvalues=basis.eigenvalues[:1],
        packed=basis.packed[:, :1],
        residuals=basis.residuals[:1],
    )
    lam = float(sub.eigenvalues[0])
    n_t = 8
    load = np.full((n_t, 1), lam)  # makes c = 1 a steady orbit
    sys0 = GalerkinSystem(
        basis=sub,
        motion=_zero_motion(),
        extension=None,
        n_t=n_t,
        lam=np.array([lam]),
        b_xi=[None] * 3,
        b_om=[None] * 3,
        load=load,
        ftilde=[],
    )
    traj = reconstruct_velocity(sys0, np.ones((n_t, 1)))
    w0 = sub.field(0)
    for n in range(n_t):
        for ax in range(3):
            assert np.array_equal(traj.velocity[n][ax], w0[ax])
    assert traj.periodicity_residual() < 1e-12


# ------------------------------------------------------------------ pressure
def test_pressure_recovers_gradient_forcing(domain):
    x, y, z = domain.cell_center_mesh()
    phi = np.exp(-1.5 * (x**2 + (y - 0.2) ** 2 + z**2))
    f = domain.grad(phi)
    n_t = 4
    zeros = domain.zero_faces()
    traj = PeriodicField(
        domain=domain,
        period=1.0,
        velocity=[[a.copy() for a in zeros] for _ in range(n_t)],
        closure=[a.copy() for a in zeros],
    )
    pressures, report = recover_pressure(
        domain, traj, _zero_motion(), f_samples=[f] * n_t
    )
    shift = phi - phi[domain.fluid].mean()
    err = np.abs(pressures[0] - shift)[domain.fluid].max()
    assert err < 1e-8 * np.abs(shift).max()
    assert report["drop_factor"] > 1e4


def test_pressure_zero_mean(domain, basis):
    n_t = 8
    f = _blob_forcing(domain, basis, n_t)
    sys0 = assemble_galerkin(basis, _spin_motion(), f_samples=f, n_t=n_t)
    c = solve_periodic(sys0)
    traj = reconstruct_velocity(sys0, c)
    pressures, report = recover_pressure(
        domain, traj, sys0.motion, f_samples=f
    )
    for p in pressures:
        assert abs(p[domain.fluid].mean()) < 1e-12 * max(np.abs(p).max(), 1e-30)
    assert np.isfinite(report["residual_after"])


# ----------------------------------------------------------------- estimates
def test_replay_zero_data(domain, basis):
    n_t = 8
    sys0 = assemble_galerkin(basis, _zero_motion(), n_t=n_t)
    c = np.zeros((n_t, K))
    entries = replay_estimates(sys0, c, None, {}, {"R": 2.5})
    assert {e.name for e in entries} >= {
        "energy_bound",
        "time_regularity",
        "sup_bound",
        "material_derivative",
        "sup_ut_l2",
        "sup_ut_l6",
    }
    for e in entries:
        assert e.lhs == 0.0
        assert e.constant == 0.0


def test_replay_entries_finite(domain, basis):
    n_t = 16
    f = _blob_forcing(domain, basis, n_t)
    sys0 = assemble_galerkin(basis, _spin_motion(), f_samples=f, n_t=n_t)
    c = solve_periodic(sys0)
    traj = reconstruct_velocity(sys0, c)
    pressures, _ = recover_pressure(domain, traj, sys0.motion, f_samples=f)
    data = {
        "f_L2L2": 1.0,
        "F_L2L2": 0.1,
        "f_W12L2": 2.0,
        "xi_W12": 0.0,
        "om_W12": 0.2,
        "om_W22": 0.4,
    }
    entries = replay_estimates(sys0, c, pressures, data, {"R": 2.5, "k": K})
    by_name = {e.name: e for e in entries}
    for e in entries:
        assert np.isfinite(e.lhs) and np.isfinite(e.rhs)
        assert e.context["R"] == 2.5
    assert by_name["energy_bound"].lhs > 0.0
    assert by_name["sup_ut_l6"].lhs > 0.0
    assert by_name["sup_ut_l2"].constant > 0.0


# --------------------------------------------------- end-to-end with boundary
def test_moving_body_end_to_end():
    domain = build_truncated_domain(BodySpec(1.0), R=9.5, h=0.5)
    motion = RigidMotionSpec.from_modes(
        1.0,
        {0: np.array([0.05, 0.0, 0.0])},
        {0: np.array([0.04, 0.0, 0.0]), 1: np.array([0.015, 0.0, 0.0])},
    )
    ext = build_extension(motion, domain, rho=4.6, eps_target=0.25)
    basis = solve_stokes_eigs(
        assemble_projector(domain), 4, seed=42, target_residual=1e-5
    )
    sys0 = assemble_galerkin(basis, motion, extension=ext, n_t=32)
    c = solve_periodic(sys0)
    assert np.max(np.abs(c)) > 0.0  # the boundary data drives a nonzero flow
    traj = reconstruct_velocity(sys0, c)
    assert traj.periodicity_residual() < 1e-9
    assert traj.divergence_residual() < 1e-10
    assert energy_identity_defect(sys0, c) < 1e-6
    assert monodromy_radius(sys0, n_steps=512) < 1.0

    # the reconstructed trajectory carries the rigid data on the body faces
    # (geometric staircase error only)
    t0 = 0.0
    u0 = traj.velocity[0]
    xi, om = motion.xi(t0), motion.omega(t0)
    r_body = domain.meta["radius"]
    worst = 0.0
    speed = float(np.linalg.norm(xi) + np.linalg.norm(om) * r_body)
    for ax in range(3):
        pts = np.stack(np.broadcast_arrays(*domain.face_coords(ax)), axis=-1)
        r = np.linalg.norm(pts, axis=-1)
        mask = (~domain.active[ax]) & (r < r_body + domain.h)
        if not mask.any():
            continue
        g, d = (ax + 1) % 3, (ax + 2) % 3
        data = xi[ax] + om[g] * pts[..., d][mask] - om[d] * pts[..., g][mask]
        worst = max(worst, float(np.max(np.abs(u0[ax][mask] - data))))
    assert worst <= 4.0 * domain.h * max(speed, 1e-30)
