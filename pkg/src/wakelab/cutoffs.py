"""Smooth cutoff profiles used for gluing, truncation, and uniqueness probes.

Two families:

* ``radial-chi`` — the gluing cutoff chi(|x|/R): identically 1 inside the
  half-ball, identically 0 outside radius R, quintic-smoothstep ramp in
  between.  All derivatives scale like R^{-|alpha|} with R-independent
  constants, which the tests verify by finite differences.

* ``uniqueness-psi`` — a plateau function for far-field uniqueness probes.
  It equals 1 on the ball of radius 2R and its gradient is supported in the
  annulus {2R < |x| < (2R)^2}.  The profile is a *product* of two
  log-variable ramps, one in the cylindrical radius rho = sqrt(x2^2+x3^2)
  and one in |x1|:

      psi(x) = zeta(rho) * eta(|x1|),
      zeta: 1 -> 0 over rho in [2R, (2R)^1.25],
      eta:  1 -> 0 over |x1| in [(2R)^1.5, (2R)^2/sqrt(2)].

  A profile depending on |x| alone cannot work here: for psi = p(|x|) the
  quantity integral |d_1 psi|/|x|^2 dx equals 2*pi times the total variation
  of p, which is the same for every R, so it can never decrease with R.  The
  axisymmetric product keeps the axial gradient far out (|x1| >= (2R)^1.5)
  where the 1/|x|^2 weight is small, giving an integral that decays roughly
  like R^{-1/2}/log R.  Because psi is constant on circles around the e1
  axis, the azimuthal derivative about e1 vanishes identically — the motions
  this probe is used with have their angular velocity parallel to e1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "CutoffFunction",
    "TransitionCutoff",
    "make_cutoff",
    "annulus_mean_zero_check",
    "psi_decay_integral",
]


def _smoothstep(t: np.ndarray) -> np.ndarray:
    """Quintic smoothstep: 0 -> 1 over [0, 1] with two vanishing derivatives."""
    t = np.clip(t, 0.0, 1.0)
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t))


def _smoothstep_d(t: np.ndarray) -> np.ndarray:
    t = np.clip(t, 0.0, 1.0)
    return 30.0 * t * t * (1.0 - t) ** 2


def _smoothstep_dd(t: np.ndarray) -> np.ndarray:
    t = np.clip(t, 0.0, 1.0)
    return 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t)


@dataclass(frozen=True)
class TransitionCutoff:
    """Radial profile that is 1 for r <= a, 0 for r >= b, quintic in between.

    Unlike ``radial-chi`` the ramp interval [a, b] is free, so callers can
    keep the transition strictly inside a voxelized annulus (the divergence
    defect of a cut-off field then lands entirely on the corrector's cells).
    ``laplacian`` is the 3-d radial Laplacian chi'' + 2 chi'/r.
    """

    a: float
    b: float

    def __post_init__(self):
        if not 0.0 < self.a < self.b:
            raise ValueError(f"need 0 < a < b, got a={self.a}, b={self.b}")

    def _tau(self, r: np.ndarray) -> np.ndarray:
        return (np.asarray(r, dtype=float) - self.a) / (self.b - self.a)

    def value(self, r: np.ndarray) -> np.ndarray:
        return 1.0 - _smoothstep(self._tau(r))

    def derivative(self, r: np.ndarray) -> np.ndarray:
        return -_smoothstep_d(self._tau(r)) / (self.b - self.a)

    def second_derivative(self, r: np.ndarray) -> np.ndarray:
        return -_smoothstep_dd(self._tau(r)) / (self.b - self.a) ** 2

    def laplacian(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        safe = np.where(r > 0, r, 1.0)
        return self.second_derivative(r) + 2.0 * self.derivative(r) / safe


@dataclass(frozen=True)
class CutoffFunction:
    """Analytic cutoff profile, optionally pre-sampled on a grid.

    ``kind`` is "radial-chi" or "uniqueness-psi"; ``scale`` is the R of the
    construction.  ``values`` / ``gradient`` evaluate at arbitrary points
    (shape (..., 3)); ``samples`` holds cell-center values when a domain was
    supplied at construction.
    """

    kind: str
    scale: float
    samples: np.ndarray | None = field(default=None, compare=False)

    # -- evaluation ------------------------------------------------------
    def values(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        if self.kind == "radial-chi":
            r = np.linalg.norm(pts, axis=-1)
            return 1.0 - _smoothstep(2.0 * r / self.scale - 1.0)
        zeta, _ = self._zeta(np.hypot(pts[..., 1], pts[..., 2]))
        eta, _ = self._eta(np.abs(pts[..., 0]))
        return zeta * eta

    def gradient(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        out = np.zeros_like(pts)
        if self.kind == "radial-chi":
            r = np.linalg.norm(pts, axis=-1)
            dq = -_smoothstep_d(2.0 * r / self.scale - 1.0) * (2.0 / self.scale)
            safe = np.where(r > 0, r, 1.0)
            out = pts * (np.where(r > 0, dq / safe, 0.0))[..., None]
            return out
        rho = np.hypot(pts[..., 1], pts[..., 2])
        s = np.abs(pts[..., 0])
        zeta, dzeta = self._zeta(rho)
        eta, deta = self._eta(s)
        out[..., 0] = zeta * deta * np.sign(pts[..., 0])
        safe = np.where(rho > 0, rho, 1.0)
        radial = np.where(rho > 0, dzeta / safe, 0.0) * eta
        out[..., 1] = radial * pts[..., 1]
        out[..., 2] = radial * pts[..., 2]
        return out

    # -- uniqueness-psi internals ---------------------------------------
    def _ramps(self) -> tuple[float, float, float, float]:
        d = 2.0 * self.scale
        return d, d**1.25, d**1.5, d**2 / np.sqrt(2.0)

    def _zeta(self, rho: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        lo, hi, _, _ = self._ramps()
        span = np.log(hi / lo)
        with np.errstate(divide="ignore"):
            tau = np.where(rho > 0, np.log(np.maximum(rho, 1e-300) / lo), -1.0) / span
        val = 1.0 - _smoothstep(tau)
        dv = np.where(
            (tau > 0) & (tau < 1),
            -_smoothstep_d(tau) / (span * np.where(rho > 0, rho, 1.0)),
            0.0,
        )
        return val, dv

    def _eta(self, s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        _, _, lo, hi = self._ramps()
        span = np.log(hi / lo)
        tau = np.log(np.maximum(s, 1e-300) / lo) / span
        val = 1.0 - _smoothstep(tau)
        dv = np.where(
            (tau > 0) & (tau < 1),
            -_smoothstep_d(tau) / (span * np.maximum(s, 1e-300)),
            0.0,
        )
        return val, dv

    def support_radius(self) -> float:
        if self.kind == "radial-chi":
            return self.scale
        d, hi_rho, _, hi_s = self._ramps()
        return float(np.hypot(hi_rho, hi_s))


def make_cutoff(kind: str, scale: float, domain=None) -> CutoffFunction:
    """Build a cutoff profile, sampling it on ``domain`` cell centers if given.

    Raises ValueError for unknown kinds, non-positive or under-sized scales,
    and for domains too small to cover the profile's gradient support.
    """
    if kind not in ("radial-chi", "uniqueness-psi"):
        raise ValueError(f"unknown cutoff kind: {kind!r}")
    if scale <= 0:
        raise ValueError("cutoff scale must be positive")
    if kind == "uniqueness-psi" and 2.0 * scale <= 2.0 ** (2.0 / 3.0):
        # the |x1| ramp interval [(2R)^1.5, (2R)^2/sqrt2] must be nonempty
        raise ValueError("uniqueness-psi scale too small: ramp interval empty")
    fn = CutoffFunction(kind=kind, scale=float(scale))
    if domain is None:
        return fn
    need = fn.support_radius() if kind == "radial-chi" else (2.0 * scale) ** 2
    if domain.box_half < need - 1e-12:
        raise ValueError(
            f"grid half-width {domain.box_half} does not cover cutoff support {need}"
        )
    xc, yc, zc = domain.cell_center_mesh()
    pts = np.stack([xc, yc, zc], axis=-1)
    vals = fn.values(pts)
    return CutoffFunction(kind=kind, scale=float(scale), samples=vals)


def annulus_mean_zero_check(domain, f: np.ndarray) -> float:
    """Relative mean of a cell field over the fluid region.

    Returns |integral of f| / (||f||_2 * vol^{1/2}), a dimensionless ratio
    that is ~0 for mean-free data and ~1 for constants.  Callers gate
    compatibility of divergence-correction data on this being tiny.
    """
    mask = domain.fluid
    if not mask.any():
        raise ValueError("empty fluid region")
    vals = np.asarray(f)[mask]
    vol = mask.sum() * domain.h**3
    total = abs(vals.sum() * domain.h**3)
    norm = np.sqrt((vals**2).sum() * domain.h**3)
    if norm == 0.0:
        return 0.0
    return float(total / (norm * np.sqrt(vol)))


def psi_decay_integral(
    scale: float, n_axial: int = 800, n_radial: int = 800
) -> float:
    """integral over R^3 of |d_1 psi_R| / |x|^2, by cylindrical quadrature.

    The integrand factorizes: |d_1 psi| = zeta(rho) * |eta'(x1)|, so

        I = 2 * int_a^b |eta'(s)| * [ 2*pi * int_0^rho_max zeta(rho) *
            rho / (rho^2 + s^2) d rho ] ds

    with (a, b) the |x1| ramp.  Both factors are smooth; fixed-node Simpson
    quadrature keeps the value deterministic.
    """
    fn = CutoffFunction(kind="uniqueness-psi", scale=float(scale))
    _, rho_max, s_lo, s_hi = fn._ramps()

    def _simpson(y: np.ndarray, x: np.ndarray) -> float:
        from scipy.integrate import simpson

        return float(simpson(y, x=x))

    rho = np.linspace(0.0, rho_max, 2 * n_radial + 1)
    zeta, _ = fn._zeta(rho)
    s_nodes = np.linspace(s_lo, s_hi, 2 * n_axial + 1)
    _, deta = fn._eta(s_nodes)
    inner = np.empty_like(s_nodes)
    for i, s in enumerate(s_nodes):
        inner[i] = 2.0 * np.pi * _simpson(zeta * rho / (rho**2 + s * s), rho)
    outer = _simpson(np.abs(deta) * inner, s_nodes)
    return 2.0 * outer
