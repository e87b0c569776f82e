"""Real trigonometric series on a period [0, T).

Time-periodic data everywhere in this package is stored as a truncated Fourier
series, so T-periodicity is exact by construction and Sobolev norms in time are
exact mode sums (Parseval) rather than quadrature approximations.
"""

from __future__ import annotations

import numpy as np

__all__ = ["TrigSeries"]


class TrigSeries:
    """A vector-valued trigonometric polynomial sum_m c_m exp(2*pi*i*m*t/T).

    Coefficients are stored for m = -M..M with the reality constraint
    c_{-m} = conj(c_m) enforced at construction.  ``values_shape`` is the shape
    of the value at a single time (e.g. ``(3,)`` for a velocity, ``()`` for a
    scalar path).
    """

    def __init__(self, period: float, coeffs: dict[int, np.ndarray]):
        if period <= 0:
            raise ValueError("period must be positive")
        self.period = float(period)
        cleaned: dict[int, np.ndarray] = {}
        for m, c in coeffs.items():
            c = np.asarray(c, dtype=complex)
            cleaned[int(m)] = c
        # enforce the reality constraint by symmetrizing
        modes = sorted(set(abs(m) for m in cleaned))
        sym: dict[int, np.ndarray] = {}
        for m in modes:
            cp = cleaned.get(m)
            cn = cleaned.get(-m)
            if m == 0:
                c0 = cp if cp is not None else cn
                sym[0] = c0.real.astype(complex)
                continue
            if cp is None:
                cp = np.conj(cn)
            if cn is None:
                cn = np.conj(cp)
            avg = 0.5 * (cp + np.conj(cn))
            sym[m] = avg
            sym[-m] = np.conj(avg)
        if not sym:
            sym = {0: np.zeros(())}
        self.coeffs = sym
        self.values_shape = next(iter(sym.values())).shape

    # ------------------------------------------------------------------ build
    @classmethod
    def zero(cls, period: float, values_shape: tuple[int, ...] = ()) -> "TrigSeries":
        return cls(period, {0: np.zeros(values_shape)})

    @classmethod
    def constant(cls, period: float, value) -> "TrigSeries":
        return cls(period, {0: np.asarray(value, dtype=float)})

    @classmethod
    def from_samples(cls, period: float, samples: np.ndarray, max_mode: int | None = None) -> "TrigSeries":
        """Interpolating series from N uniform samples at t_n = n*T/N."""
        samples = np.asarray(samples, dtype=float)
        n = samples.shape[0]
        spec = np.fft.fft(samples, axis=0) / n
        mmax = n // 2 if max_mode is None else min(max_mode, n // 2)
        coeffs = {}
        for m in range(-mmax, mmax + 1):
            coeffs[m] = spec[m % n]
        return cls(period, coeffs)

    # ------------------------------------------------------------- evaluation
    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape + self.values_shape, dtype=complex)
        w = 2.0 * np.pi / self.period
        for m, c in self.coeffs.items():
            phase = np.exp(1j * m * w * t)
            out += np.multiply.outer(phase, c)
        return out.real

    def sample(self, n: int) -> np.ndarray:
        """Values at the n uniform collocation points t_j = j*T/n."""
        t = np.arange(n) * (self.period / n)
        return self(t)

    # ------------------------------------------------------------- operations
    def derivative(self, order: int = 1) -> "TrigSeries":
        w = 2.0 * np.pi / self.period
        return TrigSeries(
            self.period,
            {m: (1j * m * w) ** order * c for m, c in self.coeffs.items()},
        )

    def antiderivative_from_zero(self, t) -> np.ndarray:
        """Exact integral of the series from 0 to t (t may be an array)."""
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape + self.values_shape, dtype=complex)
        w = 2.0 * np.pi / self.period
        for m, c in self.coeffs.items():
            if m == 0:
                out += np.multiply.outer(t, c)
            else:
                out += np.multiply.outer((np.exp(1j * m * w * t) - 1.0) / (1j * m * w), c)
        return out.real

    def mean(self) -> np.ndarray:
        return self.coeffs.get(0, np.zeros(self.values_shape)).real

    def max_mode(self) -> int:
        return max(abs(m) for m in self.coeffs)

    def __add__(self, other: "TrigSeries") -> "TrigSeries":
        if abs(other.period - self.period) > 1e-14 * self.period:
            raise ValueError("period mismatch")
        out = {m: c.copy() for m, c in self.coeffs.items()}
        for m, c in other.coeffs.items():
            out[m] = out.get(m, np.zeros_like(c)) + c
        return TrigSeries(self.period, out)

    def scaled(self, a: float) -> "TrigSeries":
        return TrigSeries(self.period, {m: a * c for m, c in self.coeffs.items()})

    # ------------------------------------------------------------------ norms
    def l2_norm_sq(self) -> float:
        """integral over one period of |f(t)|^2 (exact, Parseval)."""
        total = 0.0
        for c in self.coeffs.values():
            total += float(np.sum(np.abs(c) ** 2))
        return self.period * total

    def sobolev_norm(self, order: int) -> float:
        """W^{order,2}(0,T) norm: (sum_{j<=order} ||d^j f/dt^j||_{L^2}^2)^{1/2}, exact."""
        w = 2.0 * np.pi / self.period
        total = 0.0
        for m, c in self.coeffs.items():
            amp = float(np.sum(np.abs(c) ** 2))
            factor = sum((m * w) ** (2 * j) for j in range(order + 1))
            total += amp * factor
        return float(np.sqrt(self.period * total))

    def sup_norm(self, samples: int = 512) -> float:
        vals = self.sample(max(samples, 8 * (self.max_mode() + 1)))
        if vals.ndim == 1:
            return float(np.max(np.abs(vals)))
        return float(np.max(np.linalg.norm(vals.reshape(vals.shape[0], -1), axis=1)))
