"""Time-collocated periodic field trajectories."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["PeriodicField"]


@dataclass
class PeriodicField:
    """One period of a velocity (and optionally pressure) trajectory.

    Velocity samples are face fields at the uniform times t_n = n T / N_t,
    n = 0..N_t-1.  ``closure`` optionally stores the velocity at t_0 + T as
    reconstructed by the producing solver, so that the periodic closure can
    be measured rather than assumed.
    """

    domain: object
    period: float
    velocity: list = field(repr=False)  # N_t face-field samples
    pressure: list | None = field(repr=False, default=None)
    closure: list | None = field(repr=False, default=None)

    @property
    def n_times(self) -> int:
        return len(self.velocity)

    @property
    def times(self) -> np.ndarray:
        n = self.n_times
        return np.arange(n) * (self.period / n)

    def sample(self, n: int):
        return self.velocity[n % self.n_times]

    def periodicity_residual(self) -> float:
        """Relative closure defect ||u(t_0+T) - u(t_0)||_2 / max_n ||u(t_n)||_2."""
        if self.closure is None:
            raise ValueError("trajectory carries no closure sample")
        dom = self.domain
        diff = [self.closure[ax] - self.velocity[0][ax] for ax in range(3)]
        scale = max(dom.face_norm(u) for u in self.velocity)
        if scale == 0.0:
            return dom.face_norm(diff)
        return dom.face_norm(diff) / scale

    def divergence_residual(self) -> float:
        """Max over samples of the cell-wise divergence norm."""
        dom = self.domain
        return max(dom.cell_norm(np.where(dom.fluid, dom.div(u), 0.0)) for u in self.velocity)

    def map(self, fn) -> "PeriodicField":
        """New trajectory with fn applied to every velocity sample."""
        return PeriodicField(
            domain=self.domain,
            period=self.period,
            velocity=[fn(u) for u in self.velocity],
            pressure=self.pressure,
            closure=None if self.closure is None else fn(self.closure),
        )
