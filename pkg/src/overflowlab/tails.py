"""Functionals of a block spectrum: tails, smooth max entropy, quantile rates.

Everything here works at sequence granularity: a type class may be split,
in which case an integral number of its (interchangeable) sequences is taken.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ._util import count_mass, split_count
from .errors import ValidationError
from .sources import Spectrum


class Comparator(enum.Enum):
    """Which side of a rate threshold counts as the tail."""

    STRICT = ">"
    NON_STRICT = ">="

    def admits(self, value: float, threshold: float) -> bool:
        if self is Comparator.STRICT:
            return value > threshold
        return value >= threshold


def _tail_start(s: Spectrum, rate: float, cmp: Comparator) -> int:
    """Index of the first atom whose rate is admitted by ``cmp`` against ``rate``.

    Rates are strictly ascending, so the admitted region is a suffix.
    """
    side = "right" if cmp is Comparator.STRICT else "left"
    return int(np.searchsorted(s.rates, rate, side=side))


def tail_mass(s: Spectrum, rate: float, cmp: Comparator = Comparator.STRICT) -> float:
    """Probability that the per-symbol rate of a block compares past ``rate``.

    ``rate`` is in base-K units per symbol.  The default comparator is
    strict, matching the upper-tail convention of the first-order threshold.
    """
    start = _tail_start(s, rate, cmp)
    return float(s.suffix_mass[start])


@dataclass(frozen=True)
class PrefixSelection:
    """A top-probability set of sequences, possibly splitting one type class.

    Atoms ``[0, full_atoms)`` are taken whole; ``boundary_taken`` sequences
    (possibly zero) are taken from atom ``full_atoms`` when it exists.
    """

    full_atoms: int
    boundary_taken: int
    mass: float
    num_sequences: int

    def taken(self, index: int) -> int:
        if index < self.full_atoms:
            return -1  # sentinel: caller should use the atom's own count
        if index == self.full_atoms:
            return self.boundary_taken
        return 0


def _greedy_prefix(s: Spectrum, start: int, target: float) -> PrefixSelection:
    """Smallest descending-probability prefix of atoms [start..) with mass >= target.

    Sequence-granular: the last type class is split with a guarded ceiling so
    decimal knife edges resolve to the exact-arithmetic count.  If the suffix
    cannot reach ``target`` everything from ``start`` on is taken.
    """
    if target <= 0.0:
        return PrefixSelection(full_atoms=start, boundary_taken=0, mass=0.0, num_sequences=0)
    cum = 0.0
    seqs = 0
    for i in range(start, len(s.atoms)):
        atom = s.atoms[i]
        if cum + atom.mass < target - 1e-12:
            cum += atom.mass
            seqs += atom.count
            continue
        remaining = target - cum
        if remaining <= 0.0:
            k = 0
        else:
            # Log-domain split: at large n a single sequence's probability
            # underflows a double even while the atom's mass is of order one.
            k = split_count(math.log(remaining), atom.log_prob_per_seq,
                            atom.count, "cover")
        if k == atom.count:
            return PrefixSelection(i + 1, 0, cum + atom.mass, seqs + atom.count)
        return PrefixSelection(i, k, cum + count_mass(k, atom.log_prob_per_seq), seqs + k)
    return PrefixSelection(len(s.atoms), 0, cum, seqs)


def top_probability_prefix(s: Spectrum, target: float) -> PrefixSelection:
    """Smallest set of highest-probability sequences with total mass >= target."""
    return _greedy_prefix(s, 0, target)


def selection_log_mass(s: Spectrum, sel: PrefixSelection) -> float:
    """Natural log of a selection's mass, alive even where the float mass
    underflowed to zero (a one-sequence selection at very large n)."""
    if sel.mass > 0.0:
        return math.log(sel.mass)
    if sel.boundary_taken > 0:
        return (math.log(sel.boundary_taken)
                + s.atoms[sel.full_atoms].log_prob_per_seq)
    raise ValidationError("selection is empty; it has no log mass")


def smooth_max_entropy(s: Spectrum, gamma: float) -> float:
    """log_K of the least number of sequences capturing mass 1 - gamma.

    The boundary type class is split at sequence granularity.  At gamma = 0
    this is log_K of the number of positive-probability sequences.
    """
    if not (0.0 <= gamma < 1.0):
        raise ValidationError(f"gamma: must lie in [0, 1), got {gamma}")
    sel = top_probability_prefix(s, 1.0 - gamma)
    return math.log(max(sel.num_sequences, 1)) / math.log(s.base)


@dataclass(frozen=True)
class RestrictedTailResult:
    """Outcome of the constrained tail minimization.

    value          : smallest achievable tail mass inside an admissible set
    set_mass       : probability of the constructed set (>= 1 - eps)
    boundary_split : (atom index, sequences taken) when a type class was split
    """

    value: float
    set_mass: float
    boundary_split: tuple[int, int] | None


def restricted_tail_inf(s: Spectrum, eps: float, rate: float,
                        cmp: Comparator = Comparator.NON_STRICT) -> RestrictedTailResult:
    """Minimize the mass beyond ``rate`` over sets keeping total mass >= 1 - eps.

    Construction: every sequence on the near side of the threshold is free,
    so all of them are included.  If that already reaches 1 - eps the value
    is 0.  Otherwise the deficit is covered by the most probable tail
    sequences (any lighter choice would have to include strictly more tail
    mass), splitting the boundary type class at sequence granularity; the
    value is exactly the tail mass added.

    The default comparator is non-strict, matching the tail convention of
    the constrained-minimum definitions.
    """
    if not (0.0 <= eps < 1.0):
        raise ValidationError(f"eps: must lie in [0, 1), got {eps}")
    start = _tail_start(s, rate, cmp)
    tail = float(s.suffix_mass[start])
    free = 1.0 - tail
    if tail <= eps:
        return RestrictedTailResult(value=0.0, set_mass=free, boundary_split=None)
    sel = _greedy_prefix(s, start, tail - eps)
    split = None
    if sel.boundary_taken:
        split = (sel.full_atoms, sel.boundary_taken)
    return RestrictedTailResult(value=sel.mass, set_mass=free + sel.mass, boundary_split=split)


def finite_n_first_order(s: Spectrum, eps: float, delta: float) -> float:
    """Smallest atom rate R with P{rate > R} <= eps + delta.

    This is the finite-n analogue of the first-order threshold: the
    (eps + delta)-upper-quantile of the spectrum, reported on the atom-rate
    grid in base-K units per symbol.  It depends on (eps, delta) only
    through their sum, exactly.
    """
    if eps < 0.0 or delta < 0.0:
        raise ValidationError("eps/delta: budgets must be nonnegative")
    budget = eps + delta
    if budget >= 1.0:
        raise ValidationError(f"eps+delta: combined budget must be < 1, got {budget}")
    beyond = s.suffix_mass[1:]  # beyond[j] = mass of atoms strictly after j
    j = int(np.argmax(beyond <= budget))  # first index satisfying the budget
    return float(s.rates[j])


def finite_n_second_order(s: Spectrum, eps: float, delta: float, rate: float) -> float:
    """sqrt(n) * (finite-n first-order threshold - rate), base-K units."""
    return math.sqrt(s.n) * (finite_n_first_order(s, eps, delta) - rate)
