"""wakelab: a desk-scale laboratory for time-periodic viscous flow past a
rigid body in time-periodic rigid motion.

The package replays, numerically and at small scale, the constructive chain
for such flows: truncated-domain Galerkin solves on a divergence-free Stokes
eigenbasis, invading-domain sweeps, a rotating-frame reduction to a
constant-coefficient drift-diffusion (Oseen) Cauchy problem with wake-decay
diagnostics, and a contraction-mapping solve of the full nonlinear problem.
Every inequality the construction leans on is re-measured and recorded in an
estimate ledger instead of being assumed.
"""

__version__ = "0.1.0"
