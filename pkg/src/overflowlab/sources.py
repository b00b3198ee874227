"""Finite-alphabet source models and their exact block self-information spectra.

A spectrum here is the distribution of the normalized self-information
(1/n) * log(1/P(X^n)) of an n-symbol block, represented exactly at type-class
granularity: one atom per distinct per-sequence probability, an arbitrary
precision integer count of sequences, and the atom's total probability mass.
All logarithms are kept in nats internally; rates are converted to base-K
units (K = the code alphabet size carried by the source) at the API surface.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterator, Sequence

import numpy as np

from ._util import neumaier_cumsum, suffix_sums
from .errors import CeilingExceeded, NumericError, ValidationError

# Number of type classes (after collapsing equal-probability symbols) a single
# spectrum construction may enumerate.
DEFAULT_TYPE_CEILING = 5_000_000

# Total mass must match 1 to this tolerance; the looser value applies to long
# blocks over alphabets with more than two symbols, where the sheer number of
# atoms makes 1e-9 unreachable in double precision.
MASS_TOL = 1e-9
MASS_TOL_LARGE = 1e-6

# Adjacent candidate atoms whose per-sequence log probabilities agree to this
# relative tolerance are merged into one atom.
_MERGE_RTOL = 1e-12


@dataclass(frozen=True)
class Distribution:
    """A probability vector over a finite alphabet plus the code base K."""

    probs: np.ndarray
    base: int

    def __post_init__(self) -> None:
        if self.base < 2:
            raise ValidationError(f"base: code alphabet size must be >= 2, got {self.base}")
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1 or len(p) == 0:
            raise ValidationError("probs: need a non-empty 1-d probability vector")
        if np.any(p < 0):
            raise ValidationError("probs: negative entry")
        if abs(float(p.sum()) - 1.0) > 1e-12:
            raise ValidationError(f"probs: sum {p.sum()!r} is not 1 (normalize first)")
        p = p.copy()
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)

    @property
    def alphabet_size(self) -> int:
        return len(self.probs)

    @property
    def support_size(self) -> int:
        return int(np.count_nonzero(self.probs))


def make_distribution(probs: Sequence[float], base: int = 2) -> Distribution:
    """Validate and normalize a probability vector into a Distribution.

    Entries may be off from a unit sum by at most 1e-9 (they are renormalized
    exactly); tiny negative dust below 1e-12 is clamped to zero.
    """
    p = np.asarray(list(probs), dtype=float)
    if p.ndim != 1 or len(p) == 0:
        raise ValidationError("probs: need a non-empty 1-d probability vector")
    if np.any(p < -1e-12):
        raise ValidationError(f"probs: negative entry {p.min()!r}")
    p = np.clip(p, 0.0, None)
    total = float(p.sum())
    if abs(total - 1.0) > 1e-9:
        raise ValidationError(f"probs: entries sum to {total!r}, off by more than 1e-9")
    if total == 0.0:
        raise ValidationError("probs: all entries are zero")
    p = p / total
    # Renormalization can leave the sum one ulp away from 1; nudge the largest
    # entry so the dataclass invariant (sum within 1e-12) holds exactly.
    drift = 1.0 - float(p.sum())
    if drift != 0.0:
        p[int(np.argmax(p))] += drift
    return Distribution(probs=p, base=int(base))


@dataclass(frozen=True)
class SpectrumAtom:
    """One distinct per-sequence probability level of a block distribution."""

    log_prob_per_seq: float  # ln P(x^n) shared by every sequence in the atom
    count: int               # exact number of sequences at this level
    mass: float              # count * exp(log_prob_per_seq)


@dataclass(frozen=True)
class Spectrum:
    """Exact block self-information spectrum at type-class granularity.

    Atoms are sorted by strictly decreasing per-sequence log probability
    (equivalently strictly increasing rate).  Instances are immutable after
    construction and safe to share.
    """

    n: int
    base: int
    atoms: tuple[SpectrumAtom, ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValidationError(f"n: block length must be >= 1, got {self.n}")
        if not self.atoms:
            raise NumericError("spectrum has no atoms")
        prev = math.inf
        for a in self.atoms:
            if not math.isfinite(a.log_prob_per_seq):
                raise NumericError("non-finite log probability in spectrum")
            if a.log_prob_per_seq >= prev:
                raise NumericError("atoms are not strictly decreasing in log probability")
            if a.count < 1:
                raise NumericError("atom with empty sequence count")
            if not (0.0 <= a.mass <= 1.0 + 1e-9):
                raise NumericError(f"atom mass {a.mass!r} outside [0, 1]")
            prev = a.log_prob_per_seq

    def __len__(self) -> int:
        return len(self.atoms)

    @cached_property
    def log_probs(self) -> np.ndarray:
        a = np.array([atom.log_prob_per_seq for atom in self.atoms])
        a.flags.writeable = False
        return a

    @cached_property
    def rates(self) -> np.ndarray:
        """Per-symbol rates -ln P / (n ln K), in base-K units, ascending."""
        r = -self.log_probs / (self.n * math.log(self.base))
        r.flags.writeable = False
        return r

    @cached_property
    def masses(self) -> np.ndarray:
        m = np.array([atom.mass for atom in self.atoms])
        m.flags.writeable = False
        return m

    @cached_property
    def counts(self) -> tuple[int, ...]:
        return tuple(atom.count for atom in self.atoms)

    @cached_property
    def prefix_mass(self) -> np.ndarray:
        """Compensated cumulative mass; prefix_mass[i] = mass of atoms [0..i]."""
        p = neumaier_cumsum(self.masses)
        p.flags.writeable = False
        return p

    @cached_property
    def suffix_mass(self) -> np.ndarray:
        """Compensated suffix mass; suffix_mass[i] = mass of atoms [i..); one extra 0 slot."""
        s = suffix_sums(self.masses)
        s.flags.writeable = False
        return s

    @cached_property
    def cumulative_counts(self) -> tuple[int, ...]:
        out = []
        total = 0
        for atom in self.atoms:
            total += atom.count
            out.append(total)
        return tuple(out)

    @property
    def total_count(self) -> int:
        return self.cumulative_counts[-1]

    def per_seq_mass(self, index: int) -> float:
        """Probability of a single sequence in atom ``index``.

        Underflows to 0.0 at large blocklengths even when the atom's total
        mass is of order one; internal arithmetic therefore sticks to
        ``log_prob_per_seq`` and only callers that want a displayable number
        should use this.
        """
        return math.exp(self.atoms[index].log_prob_per_seq)


def _collapse(probs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Group equal-probability symbols; returns (distinct values, multiplicities).

    Zero-probability symbols are dropped entirely: no sequence over the
    support ever touches them, so they contribute no types.
    """
    positive = probs[probs > 0.0]
    if len(positive) == 0:
        raise ValidationError("probs: no positive entries")
    values, mults = np.unique(positive, return_counts=True)
    return values, mults


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """All vectors of ``parts`` nonnegative ints summing to ``total``, lexicographic."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _multinomial(n: int, ks: Sequence[int]) -> int:
    out = 1
    rem = n
    for k in ks:
        out *= math.comb(rem, k)
        rem -= k
    return out


def _check_ceiling(n: int, groups: int, ceiling: int) -> None:
    n_types = math.comb(n + groups - 1, groups - 1)
    if n_types > ceiling:
        raise CeilingExceeded(
            f"{n_types} type classes over {groups} probability levels exceeds ceiling {ceiling}"
        )


def _finish_spectrum(n: int, base: int, raw: list[tuple[float, int]],
                     mass_tol: float) -> Spectrum:
    """Sort candidates by log probability, merge near-equal levels, validate mass."""
    raw.sort(key=lambda t: t[0], reverse=True)
    merged: list[tuple[float, int]] = []
    for lp, count in raw:
        if merged and abs(merged[-1][0] - lp) <= _MERGE_RTOL * max(1.0, abs(lp)):
            merged[-1] = (merged[-1][0], merged[-1][1] + count)
        else:
            merged.append((lp, count))
    atoms = tuple(
        SpectrumAtom(log_prob_per_seq=lp, count=c, mass=math.exp(math.log(c) + lp))
        for lp, c in merged
    )
    total = math.fsum(a.mass for a in atoms)
    if abs(total - 1.0) > mass_tol:
        raise NumericError(f"spectrum mass {total!r} deviates from 1 beyond {mass_tol}")
    return Spectrum(n=n, base=base, atoms=atoms)


def _mass_tol(n: int, alphabet_size: int) -> float:
    return MASS_TOL_LARGE if (n > 1000 and alphabet_size > 2) else MASS_TOL


def iid_spectrum(d: Distribution, n: int, *,
                 type_ceiling: int = DEFAULT_TYPE_CEILING) -> Spectrum:
    """Exact spectrum of n i.i.d. draws from ``d``.

    Enumerates compositions of n over the distinct positive probability
    levels of ``d`` (symbols sharing a level are aggregated, which keeps
    permutation-equal types exactly merged), computes each type's sequence
    count as an exact integer, and its mass as exp(log(count) + log P).
    """
    if n < 1:
        raise ValidationError(f"n: block length must be >= 1, got {n}")
    values, mults = _collapse(d.probs)
    g = len(values)
    _check_ceiling(n, g, type_ceiling)
    logq = np.log(values)
    raw: list[tuple[float, int]] = []
    if g == 1:
        raw.append((n * float(logq[0]), int(mults[0]) ** n))
    elif g == 2:
        m0, m1 = int(mults[0]), int(mults[1])
        comb = 1                 # C(n, k) for k sequences of level 1
        pow0 = m0 ** n           # m0^(n-k)
        pow1 = 1                 # m1^k
        l0, l1 = float(logq[0]), float(logq[1])
        for k in range(n + 1):
            lp = (n - k) * l0 + k * l1
            raw.append((lp, comb * pow0 * pow1))
            if k < n:
                comb = comb * (n - k) // (k + 1)
                pow0 //= m0
                pow1 *= m1
    else:
        for ks in _compositions(n, g):
            lp = float(np.dot(ks, logq))
            count = _multinomial(n, ks)
            for kj, mj in zip(ks, mults):
                if mj > 1 and kj:
                    count *= int(mj) ** kj
            raw.append((lp, count))
    for lp, _ in raw:
        if not math.isfinite(lp):
            raise NumericError("log probability overflowed")
    built = _finish_spectrum(n, d.base, raw, _mass_tol(n, d.alphabet_size))
    if built.total_count != d.support_size ** n:
        raise NumericError("type counts do not add up to |support|^n")
    return built


def mixed_spectrum(d1: Distribution, d2: Distribution, w1: float, n: int, *,
                   type_ceiling: int = DEFAULT_TYPE_CEILING) -> Spectrum:
    """Exact spectrum of a two-component mixture source.

    The block probability of a sequence is w1*P1(x^n) + (1-w1)*P2(x^n), which
    depends on the sequence only through its type, so one atom per distinct
    pair of component log probabilities suffices.

    Arguments
    ---------
    d1, d2 : component distributions on the same alphabet with the same base
    w1     : weight of the first component, strictly inside (0, 1)
    n      : block length
    """
    if not (0.0 < w1 < 1.0):
        raise ValidationError(f"w1: mixture weight must lie in (0, 1), got {w1}")
    if d1.alphabet_size != d2.alphabet_size:
        raise ValidationError("probs2: component alphabets differ in size")
    if d1.base != d2.base:
        raise ValidationError("base: components carry different code bases")
    if n < 1:
        raise ValidationError(f"n: block length must be >= 1, got {n}")
    p1 = np.asarray(d1.probs)
    p2 = np.asarray(d2.probs)
    keep = (p1 > 0.0) | (p2 > 0.0)
    pairs: dict[tuple[float, float], int] = {}
    for a, b in zip(p1[keep], p2[keep]):
        pairs[(float(a), float(b))] = pairs.get((float(a), float(b)), 0) + 1
    vals = list(pairs.items())
    g = len(vals)
    _check_ceiling(n, g, type_ceiling)
    with np.errstate(divide="ignore"):
        l1 = np.log(np.array([v[0][0] for v in vals]))
        l2 = np.log(np.array([v[0][1] for v in vals]))
    mults = [v[1] for v in vals]
    lw1 = math.log(w1)
    lw2 = math.log1p(-w1)
    raw: list[tuple[float, int]] = []
    for ks in _compositions(n, g):
        # Component log probs; a zero-probability symbol with k > 0 kills the component.
        t1 = 0.0
        t2 = 0.0
        for kj, a, b in zip(ks, l1, l2):
            if kj:
                t1 += kj * a
                t2 += kj * b
        lp = float(np.logaddexp(lw1 + t1, lw2 + t2))
        if lp == -math.inf:
            continue  # unreachable under both components
        if not math.isfinite(lp):
            raise NumericError("log probability overflowed")
        count = _multinomial(n, ks)
        for kj, mj in zip(ks, mults):
            if mj > 1 and kj:
                count *= mj ** kj
        raw.append((lp, count))
    return _finish_spectrum(n, d1.base, raw, _mass_tol(n, d1.alphabet_size))


def ceil_log2_parity(n: int) -> int:
    """Default switching rule: 0 (first component) when ceil(log2 n) is even, else 1."""
    if n < 1:
        raise ValidationError(f"n: block length must be >= 1, got {n}")
    return 0 if ((n - 1).bit_length() % 2 == 0) else 1


@dataclass(frozen=True)
class SwitchingSchedule:
    """A source that uses one of two i.i.d. components for the whole block.

    Which component is active depends only on the block length, through
    ``rule`` (data on the instance, not baked into the spectrum builder).
    The default rule alternates with the parity of ceil(log2 n): even picks
    the first component, odd the second, so a doubling n-grid alternates
    components at every point.
    """

    components: tuple[Distribution, Distribution]
    rule: Callable[[int], int] = field(default=ceil_log2_parity)

    def __post_init__(self) -> None:
        a, b = self.components
        if a.alphabet_size != b.alphabet_size:
            raise ValidationError("probs2: component alphabets differ in size")
        if a.base != b.base:
            raise ValidationError("base: components carry different code bases")

    def active_component(self, n: int) -> int:
        idx = self.rule(n)
        if idx not in (0, 1):
            raise ValidationError(f"rule: component index must be 0 or 1, got {idx!r}")
        return idx


def switching_spectrum(schedule: SwitchingSchedule, n: int, *,
                       type_ceiling: int = DEFAULT_TYPE_CEILING) -> Spectrum:
    """Spectrum of the component the schedule activates at block length n."""
    d = schedule.components[schedule.active_component(n)]
    return iid_spectrum(d, n, type_ceiling=type_ceiling)


def sample_sequences(d: Distribution, n: int, count: int, seed: int) -> np.ndarray:
    """Draw ``count`` i.i.d. length-n symbol sequences; shape (count, n), dtype int."""
    if n < 1:
        raise ValidationError(f"n: block length must be >= 1, got {n}")
    if count < 1:
        raise ValidationError(f"count: need at least one sample, got {count}")
    rng = np.random.default_rng(seed)
    return rng.choice(d.alphabet_size, size=(count, n), p=np.asarray(d.probs))
