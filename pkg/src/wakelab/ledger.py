"""Estimate ledger: named inequality replays with inferred constants.

Each entry records one measured inequality instance lhs <= C * rhs together
with the discretization context it was produced in.  Uniformity checks
group entries of the same name across contexts (typically an R-sweep) and
test that the inferred constants stay within a declared factor — the
checkable shadow of "the constant is independent of R".

Ledger files are JSON lines with sorted keys and no timestamps, so a rerun
with the same manifest and seed is byte-identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "EstimateEntry",
    "constant_of",
    "uniformity_check",
    "write_ledger",
    "read_ledger",
]


@dataclass(frozen=True)
class EstimateEntry:
    """One measured inequality: lhs <= constant * rhs."""

    name: str
    lhs: float
    rhs: float
    context: dict = field(default_factory=dict)

    @property
    def constant(self) -> float:
        return constant_of(self.lhs, self.rhs)

    def as_record(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "constant": self.constant,
            "context": self.context,
        }


def constant_of(lhs: float, rhs: float) -> float:
    """Inferred constant lhs/rhs; zero data is a trivially passing pair."""
    if rhs > 0.0:
        return lhs / rhs
    return 0.0 if lhs == 0.0 else float("inf")


def uniformity_check(entries, name: str, factor: float = 2.0):
    """Spread of inferred constants for one inequality across contexts.

    Returns (ratio, ok): ratio = max/min of the nonzero constants (1.0 when
    fewer than two informative entries exist); ok iff ratio <= factor and no
    constant is infinite."""
    consts = [e.constant for e in entries if e.name == name]
    if any(np.isinf(c) for c in consts):
        return float("inf"), False
    consts = [c for c in consts if c > 0.0]
    if len(consts) < 2:
        return 1.0, True
    ratio = max(consts) / min(consts)
    return ratio, ratio <= factor


def write_ledger(path, entries) -> None:
    """Write entries as deterministic JSON lines (sorted keys, no times)."""
    with open(path, "w") as fh:
        for e in entries:
            fh.write(json.dumps(e.as_record(), sort_keys=True) + "\n")


def read_ledger(path) -> list:
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            out.append(
                EstimateEntry(
                    name=rec["name"],
                    lhs=rec["lhs"],
                    rhs=rec["rhs"],
                    context=rec.get("context", {}),
                )
            )
    return out
