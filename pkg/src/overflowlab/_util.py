"""Small numeric helpers: compensated summation and guarded integer splits."""

from __future__ import annotations

import math

import numpy as np

# Relative guard for sequence-granularity splits.  Mass ratios that land within
# this distance of an exact integer (a common artifact of decimal probability
# grids evaluated in binary floating point) are resolved toward the
# exact-arithmetic answer instead of being pushed to the next integer.
SPLIT_GUARD = 1e-9


def guarded_ceil(x: float) -> int:
    """Ceiling that forgives float noise just above an integer."""
    return math.ceil(x - SPLIT_GUARD)


def guarded_floor(x: float) -> int:
    """Floor that forgives float noise just below an integer."""
    return math.floor(x + SPLIT_GUARD)


_LN2 = math.log(2.0)


def split_count(ln_target: float, lp: float, limit: int, mode: str) -> int:
    """Sequences needed to cover, or affordable within, a probability target.

    All sequences share the natural log probability ``lp``; the target mass
    arrives as its natural log so the ratio survives blocklengths where
    exp(lp) itself underflows.  Mode "cover" returns the least k with
    k * exp(lp) >= target, mode "fit" the greatest k with k * exp(lp) <=
    target, both softened by the usual split guard and clamped to
    [0, limit].
    """
    if limit <= 0:
        return 0
    z = ln_target - lp
    if z <= 700.0:
        x = math.exp(z)
        k = guarded_ceil(x) if mode == "cover" else guarded_floor(x)
        return min(max(k, 0), limit)
    # Huge ratios: exp(z) overflows a double, so build the integer from a
    # 53-bit mantissa and a power of two.  Exactness is moot out here; the
    # per-sequence quantum is billions of orders below double resolution.
    if z >= math.log(limit):
        return limit
    shift = int(z / _LN2) - 52
    mantissa = math.exp(z - shift * _LN2)
    k = (int(mantissa) + 1) << shift if mode == "cover" else int(mantissa) << shift
    return min(k, limit)


def count_mass(k: int, lp: float) -> float:
    """Total probability of ``k`` sequences of natural log probability ``lp``.

    Computed as exp(log k + lp): accurate even when exp(lp) underflows to
    zero while the aggregate is of order one.
    """
    if k <= 0:
        return 0.0
    return math.exp(math.log(k) + lp)


def neumaier_cumsum(values: np.ndarray) -> np.ndarray:
    """Running sums of ``values`` with Neumaier compensation.

    Returns an array ``out`` with ``out[i] = sum(values[:i+1])`` accumulated
    with a carried correction term, so long spectra do not drift at the
    1e-12 scale the tests care about.
    """
    out = np.empty(len(values), dtype=float)
    total = 0.0
    comp = 0.0
    for i, v in enumerate(values):
        t = total + v
        if abs(total) >= abs(v):
            comp += (total - t) + v
        else:
            comp += (v - t) + total
        total = t
        out[i] = total + comp
    return out


def suffix_sums(values: np.ndarray) -> np.ndarray:
    """Compensated suffix sums; ``out[i] = sum(values[i:])``, ``out[-1] = 0``.

    The returned array has one extra slot so ``out[len(values)]`` is a valid
    (empty-suffix) query.
    """
    rev = neumaier_cumsum(values[::-1])
    out = np.zeros(len(values) + 1, dtype=float)
    out[:-1] = rev[::-1]
    return out
