"""Extremal sequences of ``a_m <= (1 - 2/m**alpha) a_{m-1} + A/m**(2 alpha)``
and the power bound ``a_m <= A/m**alpha``."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InvalidInput

__all__ = ["extremal_sequence", "check_power_bound", "PowerBound", "SweepRow",
           "alpha_sweep", "sweep_to_csv", "VIOLATION_RTOL"]

VIOLATION_RTOL = 1e-12


def extremal_sequence(A: float, alpha: float, m_max: int, a1: float | None = None) -> np.ndarray:
    """Largest admissible sequence: equality in the recursion, clamped at 0.

    Entry ``m - 1`` holds ``a_m``; ``a_1`` defaults to ``A``.  While
    ``2/m**alpha > 1`` the factor is negative and the clamp can engage;
    from there on every entry is positive.
    """
    if not A > 0:
        raise InvalidInput("A must be positive")
    if not alpha >= 0:
        raise InvalidInput("alpha must be >= 0")
    if int(m_max) != m_max or m_max < 1:
        raise InvalidInput("m_max must be an integer >= 1")
    a1 = float(A) if a1 is None else float(a1)
    return kernels.extremal_sequence(float(A), float(alpha), int(m_max), a1)


@dataclass
class PowerBound:
    holds: bool
    first_violation: int | None
    max_ratio: float

    def __iter__(self):
        return iter((self.holds, self.first_violation, self.max_ratio))


def check_power_bound(seq, A: float, alpha: float, rtol: float = VIOLATION_RTOL) -> PowerBound:
    """``a_m <= A/m**alpha`` for m = 1..len(seq); a violation needs a relative
    excess above ``rtol``.  ``max_ratio`` is ``max a_m m**alpha / A``."""
    seq = np.asarray(seq, dtype=float)
    if seq.size == 0:
        raise InvalidInput("empty sequence")
    if np.any(seq < 0) or not np.all(np.isfinite(seq)):
        raise InvalidInput("sequence must be finite and non-negative")
    first, mx = kernels.power_bound_scan(seq, float(A), float(alpha), float(rtol))
    return PowerBound(first == 0, first or None, float(mx))


@dataclass
class SweepRow:
    alpha: float
    holds: bool
    first_violation: int | None
    max_ratio: float
    m_max: int
    insufficient: bool = False


def alpha_sweep(A: float, alphas, m_max: int = 10 ** 6) -> list:
    """One row per alpha.  A row with alpha > 1 that never fails within
    ``m_max`` is flagged ``insufficient``."""
    alphas = [float(a) for a in alphas]
    if not alphas:
        raise InvalidInput("alphas must be non-empty")
    rows = []
    for a in alphas:
        pb = check_power_bound(extremal_sequence(A, a, m_max), A, a)
        rows.append(SweepRow(a, pb.holds, pb.first_violation, pb.max_ratio, int(m_max),
                             insufficient=a > 1 and pb.holds))
    return rows


def sweep_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["alpha", "holds", "first_violation", "max_ratio", "m_max"])
    for r in rows:
        w.writerow([f"{r.alpha:.12g}", str(r.holds).lower(),
                    "" if r.first_violation is None else r.first_violation,
                    f"{r.max_ratio:.12g}", r.m_max])
    return buf.getvalue()
