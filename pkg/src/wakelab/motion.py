"""Rigid-body motion: prescribed translational/angular velocities and the
rotating-frame kinematics built from them.

The body moves with velocity V(x,t) = xi(t) + omega(t) x x.  Both xi and omega
are trigonometric polynomials (exactly T-periodic).  The attitude Q(t) solves
dQ/dt = Q A(t) with A the skew matrix of omega, Q(0) = I; the drift x0(t) is
the exact integral of xi - lambda*e1, where lambda*e1 is the period average of
xi.  Q itself need not be T-periodic (Q(t+T) = Q(T) Q(t)); nothing downstream
assumes it is.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .timeseries import TrigSeries

__all__ = [
    "RigidMotionSpec",
    "RotationPath",
    "skew",
    "validate_hypothesis_H",
    "average_velocity",
    "integrate_rotation",
    "rigid_field",
]

E1 = np.array([1.0, 0.0, 0.0])


def skew(w: np.ndarray) -> np.ndarray:
    """The skew matrix A with A @ a = w x a."""
    w = np.asarray(w, dtype=float)
    return np.array(
        [
            [0.0, -w[2], w[1]],
            [w[2], 0.0, -w[0]],
            [-w[1], w[0], 0.0],
        ]
    )


def _rotation_taking(src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """Orthogonal matrix R with R @ src_hat = dst_hat (Rodrigues)."""
    a = src / np.linalg.norm(src)
    b = dst / np.linalg.norm(dst)
    c = float(np.dot(a, b))
    if c > 1.0 - 1e-14:
        return np.eye(3)
    if c < -1.0 + 1e-14:
        # pick any axis orthogonal to a for the half-turn
        helper = np.array([1.0, 0.0, 0.0])
        if abs(a[0]) > 0.9:
            helper = np.array([0.0, 1.0, 0.0])
        axis = np.cross(a, helper)
        axis /= np.linalg.norm(axis)
        K = skew(axis)
        return np.eye(3) + 2.0 * K @ K
    axis = np.cross(a, b)
    K = skew(axis)
    return np.eye(3) + K + K @ K / (1.0 + c)


@dataclass
class RigidMotionSpec:
    """Prescribed rigid motion, stored in the working frame.

    At ingestion the coordinate frame is rotated once so that the period
    average of xi is along the stored axis e1 = (1,0,0) whenever that average
    is nonzero; ``ingest_rotation`` records the applied frame rotation.
    """

    period: float
    xi: TrigSeries
    omega: TrigSeries
    ingest_rotation: np.ndarray = field(default_factory=lambda: np.eye(3))

    @classmethod
    def from_modes(
        cls,
        period: float,
        xi_modes: dict[int, np.ndarray] | None,
        omega_modes: dict[int, np.ndarray] | None,
    ) -> "RigidMotionSpec":
        xi = TrigSeries(period, xi_modes or {0: np.zeros(3)})
        om = TrigSeries(period, omega_modes or {0: np.zeros(3)})
        if xi.values_shape != (3,) or om.values_shape != (3,):
            raise ValueError("xi and omega modes must be 3-vectors")
        rot = np.eye(3)
        mean = xi.mean()
        lam = float(np.linalg.norm(mean))
        if lam > 0.0:
            rot = _rotation_taking(mean, E1)
            xi = TrigSeries(period, {m: rot @ c for m, c in xi.coeffs.items()})
            om = TrigSeries(period, {m: rot @ c for m, c in om.coeffs.items()})
        return cls(period, xi, om, rot)

    @property
    def axis(self) -> np.ndarray:
        return E1.copy()

    @property
    def V0(self) -> float:
        """The data magnitude ||xi||_{W^{2,2}} + ||omega||_{W^{2,2}}."""
        return self.xi.sobolev_norm(2) + self.omega.sobolev_norm(2)

    def is_zero(self, tol: float = 0.0) -> bool:
        return self.xi.sup_norm() <= tol and self.omega.sup_norm() <= tol


@dataclass
class HypothesisVerdict:
    holds: bool
    reason: str

    def __bool__(self) -> bool:
        return self.holds


def validate_hypothesis_H(spec: RigidMotionSpec, tol: float = 1e-12) -> HypothesisVerdict:
    """Check the parallelism hypothesis: if xi is not identically zero, both
    xi(t) and omega(t) must be scalar multiples of e1 at every sample time.
    No restriction is imposed on omega when xi vanishes identically.
    """
    n = max(64, 8 * (spec.xi.max_mode() + spec.omega.max_mode() + 1))
    xi = spec.xi.sample(n)
    om = spec.omega.sample(n)
    scale = max(spec.V0, 1.0)
    if np.max(np.abs(xi)) <= tol * scale:
        return HypothesisVerdict(True, "xi vanishes identically; omega unrestricted")
    xi_trans = np.max(np.abs(xi[:, 1:]))
    om_trans = np.max(np.abs(om[:, 1:]))
    if xi_trans > tol * scale:
        return HypothesisVerdict(
            False, f"xi has transverse component {xi_trans:.3e} relative to axis"
        )
    if om_trans > tol * scale:
        return HypothesisVerdict(
            False, f"omega has transverse component {om_trans:.3e} with xi nonzero"
        )
    return HypothesisVerdict(True, "xi and omega parallel to the stored axis")


def average_velocity(spec: RigidMotionSpec) -> tuple[float, np.ndarray]:
    """Period average of xi as (lambda, direction); lambda >= 0."""
    mean = spec.xi.mean()
    lam = float(np.linalg.norm(mean))
    if lam == 0.0:
        return 0.0, spec.axis
    return lam, mean / lam


def rigid_field(spec: RigidMotionSpec, t: float, points: np.ndarray) -> np.ndarray:
    """V(x,t) = xi(t) + omega(t) x x at the given points (shape (..., 3))."""
    points = np.asarray(points, dtype=float)
    xi = spec.xi(t)
    om = spec.omega(t)
    return xi + np.cross(np.broadcast_to(om, points.shape), points)


def _polar(Q: np.ndarray) -> np.ndarray:
    u, _, vt = np.linalg.svd(Q)
    return u @ vt


@dataclass
class RotationPath:
    """Q(t), x0(t) sampled on a fine uniform grid over [0, periods*T]."""

    spec: RigidMotionSpec
    times: np.ndarray
    Q: np.ndarray  # (n, 3, 3)
    x0: np.ndarray  # (n, 3)
    M: float  # sup over the horizon of |x0|
    lam: float

    def orthogonality_drift(self) -> float:
        eye = np.eye(3)
        return float(max(np.linalg.norm(q.T @ q - eye) for q in self.Q))

    def at(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        """(Q(t), x0(t)) at arbitrary t in [0, horizon], one partial RK4 step
        from the nearest stored grid point below t."""
        tmax = self.times[-1]
        if t < -1e-12 or t > tmax + 1e-12:
            raise ValueError(f"t={t} outside integrated horizon [0, {tmax}]")
        h = self.times[1] - self.times[0]
        idx = min(int(np.floor(t / h)), len(self.times) - 1)
        dt = t - self.times[idx]
        Q = self.Q[idx]
        if abs(dt) > 1e-14:
            # substep at the integrator's own resolution, not the storage grid
            nsub = max(1, int(np.ceil(abs(dt) / (self.spec.period / 2048.0))))
            hs = dt / nsub
            s = self.times[idx]
            for _ in range(nsub):
                Q = _polar(_rk4_step(self.spec.omega, s, Q, hs))
                s += hs
        lam_vec = self.lam * E1
        x0 = (self.spec.xi.antiderivative_from_zero(t) - lam_vec * t)
        return Q, x0


def _rk4_step(omega: TrigSeries, t: float, Q: np.ndarray, h: float) -> np.ndarray:
    def f(s, q):
        return q @ skew(omega(s))

    k1 = f(t, Q)
    k2 = f(t + 0.5 * h, Q + 0.5 * h * k1)
    k3 = f(t + 0.5 * h, Q + 0.5 * h * k2)
    k4 = f(t + h, Q + h * k3)
    return Q + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def integrate_rotation(
    spec: RigidMotionSpec,
    n_samples: int,
    periods: int = 1,
    steps_per_period: int = 2048,
) -> RotationPath:
    """Integrate dQ/dt = Q A(t) with 4th-order steps and per-step polar
    re-projection onto the orthogonal group; x0 by exact mode integration.

    ``n_samples`` is the number of stored samples per period (>= 8); the
    integrator substeps between stored samples so accuracy is set by
    ``steps_per_period``, not by the output grid.
    """
    if n_samples < 8:
        raise ValueError("need at least 8 samples per period")
    T = spec.period
    # substeps chosen so stored samples land exactly on integrator steps
    sub = max(1, int(np.ceil(steps_per_period / n_samples)))
    h = T / (n_samples * sub)
    ntot = n_samples * periods
    times = np.arange(ntot + 1) * (T / n_samples)
    Qs = np.empty((ntot + 1, 3, 3))
    Qs[0] = np.eye(3)
    Q = np.eye(3)
    t = 0.0
    for i in range(ntot):
        for _ in range(sub):
            Q = _polar(_rk4_step(spec.omega, t, Q, h))
            t += h
        Qs[i + 1] = Q
        drift = np.linalg.norm(Q.T @ Q - np.eye(3))
        if drift > 1e-8:
            raise RuntimeError(
                f"orthogonality drift {drift:.2e} after re-projection at t={t:.3g}"
            )
    lam, _ = average_velocity(spec)
    x0 = spec.xi.antiderivative_from_zero(times) - np.outer(times, lam * E1)
    # sup |x0| probed on a finer grid than the stored one
    tfine = np.linspace(0.0, times[-1], 16 * ntot + 1)
    x0fine = spec.xi.antiderivative_from_zero(tfine) - np.outer(tfine, lam * E1)
    M = float(np.max(np.linalg.norm(x0fine, axis=1)))
    return RotationPath(spec, times, Qs, x0, M, lam)
