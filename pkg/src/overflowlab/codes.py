"""Variable-length block codes with an error budget, described at type granularity.

Codes here are non-prefix: the only structural constraint is the counting
condition that at most sum_{i=1..t} K^i sequences may be decoded from strings
of length <= t.  Sequences outside the decode set all share a single
length-1 junk string; they count as errors, and a junk collision with a
decoded string resolves to the decoded sequence (the colliding sequence was
an error regardless of what the decoder outputs).
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

import numpy as np

from ._util import count_mass, guarded_ceil, split_count
from .errors import ValidationError
from .sources import Distribution, Spectrum
from .tails import PrefixSelection, selection_log_mass, top_probability_prefix

__all__ = [
    "Assignment", "CodeSpec", "TradeoffPoint", "CountingReport",
    "construct_code", "code_overflow", "validate_counting_condition",
    "optimal_tradeoff", "optimal_threshold", "simulate_roundtrip",
]


@dataclass(frozen=True)
class Assignment:
    """``count`` sequences of spectrum atom ``atom`` get codewords of ``length``."""

    atom: int
    count: int
    length: int


@dataclass(frozen=True)
class CodeSpec:
    """A deterministic code at type granularity.

    Within a split atom the decoded part is, by convention, the
    lexicographically smallest sequences of the atom (signature-major order);
    the convention only matters to the simulator, never to any probability.
    """

    n: int
    base: int
    decode_set_mass: float
    error_mass: float
    assignments: tuple[Assignment, ...]
    junk_length: int = 1
    spectrum: Spectrum | None = None


def string_budget(base: int, floor_eta: int) -> int:
    """Exact number of nonempty base-K strings of length <= floor_eta."""
    if floor_eta < 1:
        return 0
    return (base ** (floor_eta + 1) - base) // (base - 1)


def _decode_selection(s: Spectrum, eps: float) -> PrefixSelection:
    """Top-probability decode set of mass >= 1 - eps, never empty.

    For eps within the split guard of 1 the greedy prefix may come back
    empty; the canonical code still decodes the single most likely sequence.
    """
    sel = top_probability_prefix(s, 1.0 - eps)
    if sel.num_sequences > 0:
        return sel
    return PrefixSelection(full_atoms=0, boundary_taken=1,
                           mass=count_mass(1, s.atoms[0].log_prob_per_seq),
                           num_sequences=1)


def construct_code(s: Spectrum, eps: float) -> CodeSpec:
    """Build the canonical eps-error code for spectrum ``s``.

    The decode set A is the smallest top-probability set with mass >= 1 - eps
    (sequence granular).  Each decoded sequence x gets a codeword of length
    ceil(-log_K(P(x) / P(A))), floored at 1 since the empty string is not a
    codeword; everything else maps to the junk string and is an error.
    """
    if not (0.0 <= eps < 1.0):
        raise ValidationError(f"eps: must lie in [0, 1), got {eps}")
    sel = _decode_selection(s, eps)
    ln_pa = selection_log_mass(s, sel)
    ln_base = math.log(s.base)
    assignments = []
    for i in range(sel.full_atoms + 1):
        if i >= len(s.atoms):
            break
        count = s.atoms[i].count if i < sel.full_atoms else sel.boundary_taken
        if count == 0:
            continue
        length = max(1, guarded_ceil((ln_pa - s.atoms[i].log_prob_per_seq) / ln_base))
        assignments.append(Assignment(atom=i, count=count, length=length))
    err = _leftover_mass(s, {a.atom: a.count for a in assignments})
    return CodeSpec(n=s.n, base=s.base, decode_set_mass=sel.mass, error_mass=err,
                    assignments=tuple(assignments), junk_length=1, spectrum=s)


def _leftover_mass(s: Spectrum, taken: dict[int, int]) -> float:
    parts = []
    for i, atom in enumerate(s.atoms):
        left = atom.count - taken.get(i, 0)
        if left == atom.count:
            parts.append(atom.mass)
        elif left > 0:
            parts.append(count_mass(left, atom.log_prob_per_seq))
    return math.fsum(parts)


def code_overflow(c: CodeSpec, eta: float) -> float:
    """Probability that the emitted codeword is longer than ``eta``.

    Junked sequences emit the length-1 junk string, which never overflows
    for eta >= 1.
    """
    if eta < 1:
        raise ValidationError(f"eta: length threshold must be >= 1, got {eta}")
    if c.spectrum is None:
        raise ValidationError("code has no spectrum attached; overflow needs masses")
    s = c.spectrum
    over = [count_mass(a.count, s.atoms[a.atom].log_prob_per_seq)
            for a in c.assignments if a.length > eta]
    if c.junk_length > eta:
        over.append(c.error_mass)
    return math.fsum(over)


@dataclass(frozen=True)
class CountingReport:
    """Result of checking the counting condition at every length threshold."""

    ok: bool
    first_violation: tuple[int, int, int] | None  # (threshold, decoded count, budget)


def validate_counting_condition(c: CodeSpec) -> CountingReport:
    """Check that decoded sequences fit the nonempty-string budget at every length.

    For each distinct codeword length t the number of sequences decoded from
    strings of length <= t must not exceed sum_{i=1..t} K^i (exact integers).
    The junk string carries no decoding, so it consumes no budget.
    """
    by_length: dict[int, int] = {}
    for a in c.assignments:
        if a.length < 1:
            return CountingReport(ok=False, first_violation=(a.length, a.count, 0))
        by_length[a.length] = by_length.get(a.length, 0) + a.count
    cum = 0
    for t in sorted(by_length):
        cum += by_length[t]
        budget = string_budget(c.base, t)
        if cum > budget:
            return CountingReport(ok=False, first_violation=(t, cum, budget))
    return CountingReport(ok=True, first_violation=None)


@dataclass(frozen=True)
class TradeoffPoint:
    """One point of the exact overflow/error tradeoff."""

    n: int
    eta: float
    eps: float
    delta_star: float
    budget: int  # number of decodable strings, sum_{i<=floor(eta)} K^i


def optimal_tradeoff(s: Spectrum, eta: float, eps: float) -> TradeoffPoint:
    """Least overflow probability at length threshold ``eta`` and error budget ``eps``.

    Construction: the M = sum_{i<=floor(eta)} K^i decodable strings go to the
    M most probable sequences (splitting a type class if needed); the error
    budget is then spent junking the heaviest remaining sequences that still
    fit (heaviest first, skipping what no longer fits, splitting at sequence
    granularity).  Junked sequences share the length-1 junk string, so they
    never overflow; delta_star is the mass left over.

    delta_star is a step function of floor(eta): only the integer part of the
    threshold buys strings.
    """
    if eta < 1:
        raise ValidationError(f"eta: length threshold must be >= 1, got {eta}")
    if not (0.0 <= eps < 1.0):
        raise ValidationError(f"eps: must lie in [0, 1), got {eps}")
    m_budget = string_budget(s.base, math.floor(eta))
    cum_counts = s.cumulative_counts
    taken: dict[int, int] = {}
    if m_budget >= s.total_count:
        delta = 0.0
        return TradeoffPoint(n=s.n, eta=eta, eps=eps, delta_star=delta, budget=m_budget)
    # Top-M split: first atom where the running count reaches the budget.
    b = bisect.bisect_left(cum_counts, m_budget)
    for i in range(b):
        taken[i] = s.atoms[i].count
    before = cum_counts[b - 1] if b else 0
    taken[b] = m_budget - before
    # Error budget: junk the heaviest sequences that still fit, heaviest first.
    left = eps
    for i in range(b, len(s.atoms)):
        if left <= 0.0:
            break
        avail = s.atoms[i].count - taken.get(i, 0)
        if avail <= 0:
            continue
        lp = s.atoms[i].log_prob_per_seq
        avail_mass = count_mass(avail, lp)
        if avail_mass <= left * (1.0 + 1e-9):
            # The whole remainder of the atom fits (up to rounding dust from
            # earlier subtractions), so take it in one piece; this keeps the
            # budget decrement from leaving stray mass when the tail is
            # exactly exhaustible.
            taken[i] = taken.get(i, 0) + avail
            left = max(left - avail_mass, 0.0)
            continue
        k = split_count(math.log(left), lp, avail, "fit")
        if k > 0:
            taken[i] = taken.get(i, 0) + k
            left = max(left - count_mass(k, lp), 0.0)
    delta = _leftover_mass(s, taken)
    return TradeoffPoint(n=s.n, eta=eta, eps=eps, delta_star=max(delta, 0.0), budget=m_budget)


def optimal_threshold(s: Spectrum, eps: float, delta: float) -> int:
    """Least integer eta >= 1 with optimal_tradeoff(s, eta, eps).delta_star <= delta."""
    if not (0.0 <= eps < 1.0) or delta < 0.0:
        raise ValidationError("eps/delta: budgets must be nonnegative with eps < 1")
    if eps + delta >= 1.0:
        raise ValidationError(f"eps+delta: combined budget must be < 1, got {eps + delta}")

    def ok(eta: int) -> bool:
        return optimal_tradeoff(s, eta, eps).delta_star <= delta

    hi = 1
    while string_budget(s.base, hi) < s.total_count and not ok(hi):
        hi *= 2
    lo = max(1, hi // 2)
    if lo == hi:
        return hi
    # ok() is monotone along the doubling path; bisect the last octave.
    while lo < hi:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid + 1
    return hi


# ---------------------------------------------------------------------------
# Round-trip simulation


def _multiset_count(counts: list[int], span: int) -> int:
    """Arrangements of a multiset with ``span`` remaining positions."""
    out = math.factorial(span)
    for c in counts:
        if c > 1:
            out //= math.factorial(c)
    return out


def _rank_within_type(seq: np.ndarray, counts: list[int]) -> int:
    """Lexicographic rank of ``seq`` among arrangements of its own multiset."""
    remaining = list(counts)
    total = len(seq)
    rank = 0
    for pos, sym in enumerate(seq):
        span = total - pos - 1
        for smaller in range(sym):
            if remaining[smaller] > 0:
                remaining[smaller] -= 1
                rank += _multiset_count(remaining, span)
                remaining[smaller] += 1
        remaining[sym] -= 1
    return rank


def _atom_type_groups(s: Spectrum, d: Distribution,
                      atom: int) -> list[tuple[tuple[int, ...], int]]:
    """Type signatures whose sequences land in ``atom``, lexicographically sorted.

    An atom can gather several type classes (symbols with equal probability,
    or distinct types whose products coincide), so the within-atom order has
    to span all of them.  Returned counts are exact.
    """
    from .sources import _compositions, _multinomial

    probs = np.asarray(d.probs)
    support = [i for i in range(d.alphabet_size) if probs[i] > 0.0]
    lnp = {i: math.log(probs[i]) for i in support}
    lps = s.log_probs
    groups = []
    for comp in _compositions(s.n, len(support)):
        lp = math.fsum(k * lnp[sym] for k, sym in zip(comp, support) if k)
        j = int(np.argmin(np.abs(lps - lp)))
        if j != atom:
            continue
        if abs(lps[j] - lp) > 1e-9 * max(1.0, abs(lp)):
            continue
        sig = [0] * d.alphabet_size
        for k, sym in zip(comp, support):
            sig[sym] = k
        groups.append((tuple(sig), _multinomial(s.n, comp)))
    groups.sort(key=lambda g: g[0])
    return groups


def _rank_within_atom(row: np.ndarray, groups: list[tuple[tuple[int, ...], int]]) -> int:
    """Rank of a sequence inside its atom: signature-major, then arrangement order."""
    sig = tuple(int(v) for v in np.bincount(row, minlength=len(groups[0][0])))
    base = 0
    for g_sig, g_count in groups:
        if g_sig == sig:
            return base + _rank_within_type(row, list(sig))
        base += g_count
    raise ValidationError("sample signature not found in its matched atom")


def simulate_roundtrip(c: CodeSpec, d: Distribution, samples: np.ndarray,
                       eta: float) -> tuple[float, float]:
    """Empirical (error rate, overflow rate at eta) of the code on drawn samples.

    The decoded part of a partially covered atom is pinned to the first
    sequences of the atom in signature-major order (type signature ascending,
    then lexicographic arrangement), so two runs on the same samples always
    agree.  Sequences are matched to atoms by their log probability.
    """
    if c.spectrum is None:
        raise ValidationError("code has no spectrum attached")
    samples = np.asarray(samples)
    if samples.ndim != 2 or samples.shape[1] != c.n:
        raise ValidationError(f"samples: expected shape (count, {c.n})")
    if len(samples) == 0:
        raise ValidationError("samples: need at least one row")
    s = c.spectrum
    with np.errstate(divide="ignore"):
        lnp = np.log(np.asarray(d.probs))
    lp = lnp[samples].sum(axis=1)
    # Atoms are sorted by descending log prob; match each sample to the nearest.
    descending = s.log_probs
    idx = np.searchsorted(-descending, -lp, side="left")
    idx = np.clip(idx, 0, len(descending) - 1)
    alt = np.clip(idx - 1, 0, len(descending) - 1)
    take_alt = np.abs(descending[alt] - lp) < np.abs(descending[idx] - lp)
    idx = np.where(take_alt, alt, idx)
    if np.any(np.abs(descending[idx] - lp) > 1e-9 * np.maximum(1.0, np.abs(lp))):
        raise ValidationError("samples: a sequence does not match any spectrum atom")

    n_atoms = len(s.atoms)
    assigned = {a.atom: a.count for a in c.assignments}
    full = np.zeros(n_atoms, dtype=bool)
    none = np.zeros(n_atoms, dtype=bool)
    length_over = np.zeros(n_atoms, dtype=bool)
    for i, atom in enumerate(s.atoms):
        a_count = assigned.get(i, 0)
        full[i] = a_count >= atom.count
        none[i] = a_count == 0
    for a in c.assignments:
        length_over[a.atom] = a.length > eta

    is_full = full[idx]
    is_none = none[idx]
    errors = int(np.count_nonzero(is_none))
    overflows = int(np.count_nonzero(is_full & length_over[idx]))

    split_rows = np.nonzero(~(is_full | is_none))[0]
    group_cache: dict[int, list[tuple[tuple[int, ...], int]]] = {}
    for r in split_rows:
        atom = int(idx[r])
        groups = group_cache.get(atom)
        if groups is None:
            groups = _atom_type_groups(s, d, atom)
            group_cache[atom] = groups
        if _rank_within_atom(samples[r], groups) < assigned[atom]:
            if length_over[atom]:
                overflows += 1
        else:
            errors += 1
    if c.junk_length > eta:
        overflows += errors
    n_samples = len(samples)
    return errors / n_samples, overflows / n_samples
