"""Finite-blocklength upper and lower bounds on the overflow probability.

Both bounds carry a slack parameter a_n in (0, 1].  The upper bound holds
for the canonical code built by ``construct_code``; the lower bound holds
for every code whose decode set has at least the given mass, so in
particular for the exact optimum.  Evaluation is at sequence granularity
with all probability comparisons done in the log domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from ._util import count_mass
from .codes import _decode_selection, code_overflow, construct_code, optimal_tradeoff
from .errors import TheoremViolation, ValidationError
from .sources import Spectrum
from .tails import PrefixSelection, selection_log_mass, top_probability_prefix

__all__ = [
    "BoundReport", "achievability_bound", "converse_bound",
    "first_order_slack", "second_order_slack", "sandwich_sweep",
]


def _check_a_n(a_n: float) -> None:
    if not (0.0 < a_n <= 1.0) or not math.isfinite(a_n):
        raise ValidationError(f"a_n: slack must lie in (0, 1], got {a_n}")


def _selection_mass_below(s: Spectrum, sel: PrefixSelection, ln_thresh: float) -> float:
    """Mass of the selected sequences whose per-sequence log prob is <= ln_thresh.

    The selection is a top-probability prefix, so the qualifying sequences
    form the light end of the selection; summing runs over whole atoms plus
    the boundary slice.
    """
    parts = []
    for i in range(min(sel.full_atoms + 1, len(s.atoms))):
        lp = s.atoms[i].log_prob_per_seq
        if lp > ln_thresh:
            continue
        count = s.atoms[i].count if i < sel.full_atoms else sel.boundary_taken
        if count:
            parts.append(count_mass(count, lp))
    return math.fsum(parts)


def achievability_bound(s: Spectrum, eps: float, a_n: float, eta: float) -> float:
    """Upper bound on the overflow of the canonical eps-error code at eta.

    Value: P[a_n * P(X) / P(A) <= K^(-eta), X in A] + a_n * K, with A the
    smallest top-probability set of mass >= 1 - eps.  May exceed 1; callers
    clamp for display only.
    """
    if not (0.0 <= eps < 1.0):
        raise ValidationError(f"eps: must lie in [0, 1), got {eps}")
    _check_a_n(a_n)
    if eta < 1:
        raise ValidationError(f"eta: length threshold must be >= 1, got {eta}")
    sel = _decode_selection(s, eps)
    ln_thresh = selection_log_mass(s, sel) - eta * math.log(s.base) - math.log(a_n)
    return _selection_mass_below(s, sel, ln_thresh) + a_n * s.base


def converse_bound(s: Spectrum, decode_mass_target: float, a_n: float,
                   eta: float) -> float:
    """Lower bound on the overflow at eta of any code whose decode set D
    has mass >= decode_mass_target.

    Value: P[P(X) / P(D) <= a_n * K^(-eta), X in D] - a_n * K * P(D), taking
    D as the smallest top-probability set reaching the target mass (the
    least favorable choice).  A nonpositive target leaves D empty and the
    bound trivial at 0.  May be negative; callers clamp for display only.
    """
    _check_a_n(a_n)
    if eta < 1:
        raise ValidationError(f"eta: length threshold must be >= 1, got {eta}")
    if decode_mass_target > 1.0 + 1e-12:
        raise ValidationError(
            f"decode_mass_target: mass cannot exceed 1, got {decode_mass_target}")
    if decode_mass_target <= 0.0:
        return 0.0
    sel = top_probability_prefix(s, min(decode_mass_target, 1.0))
    if sel.num_sequences == 0:
        return 0.0
    ln_thresh = selection_log_mass(s, sel) - eta * math.log(s.base) + math.log(a_n)
    return _selection_mass_below(s, sel, ln_thresh) - a_n * s.base * sel.mass


def first_order_slack(gamma: float, base: int) -> Callable[[int], float]:
    """Slack schedule a_n = K^(-n*gamma): exponentially small, for rate-scale sweeps."""
    if gamma <= 0:
        raise ValidationError(f"gamma: slack exponent must be positive, got {gamma}")
    return lambda n: base ** (-n * gamma)


def second_order_slack(gamma: float, base: int) -> Callable[[int], float]:
    """Slack schedule a_n = K^(-sqrt(n)*gamma), for dispersion-scale sweeps."""
    if gamma <= 0:
        raise ValidationError(f"gamma: slack exponent must be positive, got {gamma}")
    return lambda n: base ** (-math.sqrt(n) * gamma)


@dataclass(frozen=True)
class BoundReport:
    """Bounds and exact values for one (eta, eps) pair.

    ``upper`` and ``lower`` are raw bound values (the upper may exceed 1 and
    the lower may go negative when the slack term dominates); the clamped
    properties fold them back into [0, 1] for display.
    """

    n: int
    eta: float
    eps: float
    a_n: float
    upper: float
    lower: float
    exact_code_overflow: float
    exact_optimal: float

    @property
    def upper_clamped(self) -> float:
        return min(1.0, max(0.0, self.upper))

    @property
    def lower_clamped(self) -> float:
        return min(1.0, max(0.0, self.lower))

    @property
    def sandwich_ok(self) -> bool:
        """Raw inequality lower <= code overflow <= upper, no tolerance."""
        return self.lower <= self.exact_code_overflow <= self.upper


def sandwich_sweep(s: Spectrum, eps: float, eta_grid: Sequence[float],
                   a_n_rule: Callable[[int], float],
                   check: bool = True) -> list[BoundReport]:
    """Evaluate both bounds and both exact quantities across ``eta_grid``.

    The canonical code is built once; the converse decode-set target is tied
    to that code's decode mass so both bounds bracket the same object.  With
    ``check`` set, a broken sandwich raises TheoremViolation; with it clear,
    the reports are returned for the caller to inspect.
    """
    code = construct_code(s, eps)
    a_n = a_n_rule(s.n)
    _check_a_n(a_n)
    reports = []
    for eta in eta_grid:
        upper = achievability_bound(s, eps, a_n, eta)
        lower = converse_bound(s, code.decode_set_mass, a_n, eta)
        exact_code = code_overflow(code, eta)
        exact_opt = optimal_tradeoff(s, eta, eps).delta_star
        report = BoundReport(n=s.n, eta=float(eta), eps=eps, a_n=a_n,
                             upper=upper, lower=lower,
                             exact_code_overflow=exact_code,
                             exact_optimal=exact_opt)
        if check and not report.sandwich_ok:
            raise TheoremViolation(
                f"bound sandwich broken at eta={eta}: "
                f"lower={lower!r} exact={exact_code!r} upper={upper!r}")
        reports.append(report)
    return reports
