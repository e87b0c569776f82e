"""Bochner, Sobolev-in-time, and wake-weighted norm evaluators.

Quadrature conventions (shared with the rest of the package): plain L2
inner products are face-based (h^3 sums over active faces); L^r for r != 2
and all weighted sup norms collocate the velocity magnitude at cell
centers; gradient and second-derivative seminorms reuse the domain's
mimetic quadratic forms.  Time integrals over one period use uniform
weights T/N_t — the trapezoid rule and the rectangle rule coincide for
periodic samples — and time sups are sample maxima.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import PeriodicField
from .timeseries import TrigSeries

__all__ = [
    "NormBundle",
    "WakeWeight",
    "compute_norms",
    "parseval_deviation",
    "cell_lr_norm",
    "wake_norm",
    "wake_norm_samples",
]


@dataclass(frozen=True)
class NormBundle:
    """Named norm values for one field or scalar path."""

    entries: dict

    def __getitem__(self, key: str) -> float:
        return self.entries[key]

    def __contains__(self, key: str) -> bool:
        return key in self.entries


@dataclass(frozen=True)
class WakeWeight:
    """Anisotropic wake weight (1+|x|)^m (1 + 2 lam s(x))^m, s(x) = |x| + x1.

    s vanishes exactly on the downstream ray x = -|x| e1, so for lam > 0 the
    weight is O(|x|^m) in the wake and O(|x|^{2m}) elsewhere."""

    lam: float

    def s(self, points: np.ndarray) -> np.ndarray:
        return np.linalg.norm(points, axis=-1) + points[..., 0]

    def factor(self, points: np.ndarray, m: int = 1) -> np.ndarray:
        r = np.linalg.norm(points, axis=-1)
        return ((1.0 + r) * (1.0 + 2.0 * self.lam * (r + points[..., 0]))) ** m


def wake_norm_samples(magnitude: np.ndarray, points: np.ndarray, lam: float, m: int) -> float:
    """Discrete weighted sup over arbitrary sample points (shape (...,3))."""
    w = WakeWeight(lam).factor(points, m)
    return float(np.max(w * magnitude)) if magnitude.size else 0.0


def _center_magnitude(domain, u) -> np.ndarray:
    uc = domain.face_to_center(u)
    mag = np.sqrt(uc[0] ** 2 + uc[1] ** 2 + uc[2] ** 2)
    return np.where(domain.fluid, mag, 0.0)


def wake_norm(traj: PeriodicField, lam: float, m: int) -> float:
    """[.]_{inf,m,lam}: sup over time samples and fluid cells of the
    weighted velocity magnitude."""
    dom = traj.domain
    pts = np.stack(dom.cell_center_mesh(), axis=-1)
    worst = 0.0
    for u in traj.velocity:
        mag = _center_magnitude(dom, u)
        worst = max(worst, wake_norm_samples(mag[dom.fluid], pts[dom.fluid], lam, m))
    return worst


def cell_lr_norm(domain, p: np.ndarray, r: float) -> float:
    """L^r norm of a cell field over the fluid region (collocation)."""
    vals = np.abs(p[domain.fluid])
    if r == np.inf:
        return float(vals.max()) if vals.size else 0.0
    return float((np.sum(vals**r) * domain.h**3) ** (1.0 / r))


def _spatial_norms(domain, u) -> dict:
    mag = _center_magnitude(domain, u)
    vals = mag[domain.fluid]
    h3 = domain.h**3
    return {
        "L2": domain.face_norm(u),
        "L3": float((np.sum(vals**3) * h3) ** (1.0 / 3.0)),
        "L6": float((np.sum(vals**6) * h3) ** (1.0 / 6.0)),
        "D12": float(np.sqrt(domain.dirichlet_grad_sq(u))),
        "D22": float(np.sqrt(domain.d2_norm_sq(u))),
    }


def _trajectory_norms(traj: PeriodicField, lam: float | None) -> dict:
    dom = traj.domain
    per_time = [_spatial_norms(dom, u) for u in traj.velocity]
    dt = traj.period / traj.n_times
    out = {}
    for key in ("L2", "L3", "L6", "D12", "D22"):
        series = np.array([p[key] for p in per_time])
        out[f"L2_{key}"] = float(np.sqrt(np.sum(series**2) * dt))
        out[f"Linf_{key}"] = float(series.max())
    if lam is not None:
        for m in (1, 2):
            out[f"wake_inf_{m}"] = wake_norm(traj, lam, m)
    return out


def _path_norms(path: TrigSeries) -> dict:
    return {
        "W02": float(np.sqrt(path.l2_norm_sq())),
        "W12": path.sobolev_norm(1),
        "W22": path.sobolev_norm(2),
        "Linf": path.sup_norm(),
    }


def compute_norms(field, lam: float | None = None) -> NormBundle:
    """Norm bundle for a PeriodicField trajectory or a TrigSeries path."""
    if isinstance(field, PeriodicField):
        return NormBundle(_trajectory_norms(field, lam))
    if isinstance(field, TrigSeries):
        return NormBundle(_path_norms(field))
    raise TypeError(f"cannot compute norms of {type(field).__name__}")


def parseval_deviation(field) -> float:
    """Relative gap between the quadrature and mode-sum evaluations of the
    squared L2-in-time norm.

    For a TrigSeries the quadrature uses enough uniform samples to integrate
    the trigonometric square exactly; for a PeriodicField the time samples
    are transformed by FFT and compared against their own rectangle sum."""
    if isinstance(field, TrigSeries):
        n = 4 * (field.max_mode() + 1) + 3
        vals = field.sample(n)
        flat = vals.reshape(n, -1)
        quad = float(np.sum(np.abs(flat) ** 2) * field.period / n)
        exact = field.l2_norm_sq()
        scale = max(exact, 1e-300)
        return abs(quad - exact) / scale
    if isinstance(field, PeriodicField):
        dom = field.domain
        series = np.array([dom.face_norm(u) ** 2 for u in field.velocity])
        quad = float(series.sum()) / field.n_times
        packed = np.stack(
            [np.concatenate([u[ax][dom.active[ax]] for ax in range(3)]) for u in field.velocity]
        )
        spec = np.fft.fft(packed, axis=0) / field.n_times
        mode_sum = float(np.sum(np.abs(spec) ** 2)) * dom.h**3
        scale = max(quad, 1e-300)
        return abs(quad - mode_sum) / scale
    raise TypeError(f"cannot compute Parseval deviation of {type(field).__name__}")
