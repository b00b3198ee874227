"""Source models and spectra against explicit sequence enumeration."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import _oracle as orc
from overflowlab import (
    CeilingExceeded,
    Distribution,
    NumericError,
    Spectrum,
    SpectrumAtom,
    SwitchingSchedule,
    ValidationError,
    ceil_log2_parity,
    iid_spectrum,
    make_distribution,
    mixed_spectrum,
    sample_sequences,
    switching_spectrum,
)


GRID = orc.grid_distributions()


def test_grid_has_45_distributions():
    assert len(GRID) == 45


# ---------------------------------------------------------------------------
# Distribution construction


def test_make_distribution_basic():
    d = make_distribution([0.3, 0.7])
    assert d.base == 2
    assert d.alphabet_size == 2
    assert d.support_size == 2
    np.testing.assert_allclose(d.probs, [0.3, 0.7])


def test_make_distribution_normalizes_small_drift():
    d = make_distribution([0.3, 0.7 + 4e-10])
    assert abs(float(np.sum(d.probs)) - 1.0) <= 1e-12


def test_make_distribution_clamps_dust():
    d = make_distribution([1.0, -1e-13])
    assert d.probs[1] == 0.0
    assert d.support_size == 1


@pytest.mark.parametrize("bad", [[], [0.5, 0.6], [0.5, -0.1, 0.6], [0.0, 0.0]])
def test_make_distribution_rejects(bad):
    with pytest.raises(ValidationError):
        make_distribution(bad)


def test_make_distribution_rejects_bad_base():
    with pytest.raises(ValidationError):
        make_distribution([0.5, 0.5], base=1)


def test_distribution_probs_are_frozen():
    d = make_distribution([0.5, 0.5])
    with pytest.raises(ValueError):
        d.probs[0] = 0.9


# ---------------------------------------------------------------------------
# iid spectra vs brute force


@pytest.mark.parametrize("probs", GRID, ids=lambda p: "-".join(f"{x:.1f}" for x in p))
def test_iid_spectrum_matches_enumeration(probs):
    d = make_distribution(probs)
    for n in (1, 2, 4, 6):
        s = iid_spectrum(d, n)
        lev = orc.seq_levels(probs, n)
        assert len(s.atoms) == len(lev)
        for atom, (lp, count) in zip(s.atoms, lev):
            assert atom.count == count
            assert abs(atom.log_prob_per_seq - lp) <= 1e-12 * max(1.0, abs(lp))
            assert abs(atom.mass - orc.level_mass(lp, count)) <= 1e-12
        assert s.total_count == d.support_size ** n


def test_spectrum_mass_sums_to_one():
    for probs in GRID:
        s = iid_spectrum(make_distribution(probs), 8)
        assert abs(math.fsum(a.mass for a in s.atoms) - 1.0) <= 1e-9


def test_spectrum_atoms_strictly_ordered():
    s = iid_spectrum(make_distribution([0.2, 0.3, 0.5]), 7)
    lps = [a.log_prob_per_seq for a in s.atoms]
    assert all(x > y for x, y in zip(lps, lps[1:]))
    assert np.all(np.diff(s.rates) > 0)


def test_zero_probability_symbols_drop_out():
    s3 = iid_spectrum(make_distribution([0.3, 0.7, 0.0]), 5)
    s2 = iid_spectrum(make_distribution([0.3, 0.7]), 5)
    assert len(s3.atoms) == len(s2.atoms)
    assert s3.total_count == 2 ** 5
    for a, b in zip(s3.atoms, s2.atoms):
        assert a.count == b.count
        assert a.log_prob_per_seq == b.log_prob_per_seq


def test_equal_probability_symbols_share_levels():
    # Three symbols at 0.2 collapse to one level per count, so the whole
    # spectrum has as many atoms as compositions of n over {0.2-level, 0.4}.
    s = iid_spectrum(make_distribution([0.2, 0.2, 0.2, 0.4]), 3)
    assert len(s.atoms) == 4
    assert s.total_count == 4 ** 3
    lev = orc.seq_levels([0.2, 0.2, 0.2, 0.4], 3)
    assert [a.count for a in s.atoms] == [c for _, c in lev]


def test_uniform_spectrum_is_one_atom():
    for n in (1, 4, 8):
        s = iid_spectrum(make_distribution([0.5, 0.5]), n)
        assert len(s.atoms) == 1
        assert s.atoms[0].count == 2 ** n
        assert abs(s.atoms[0].mass - 1.0) <= 1e-12
        assert abs(float(s.rates[0]) - 1.0) <= 1e-12


def test_large_n_binary_spectrum_is_exact():
    d = make_distribution([0.3, 0.7])
    n = 2000
    s = iid_spectrum(d, n)
    assert len(s.atoms) == n + 1
    assert s.total_count == 2 ** n
    assert s.atoms[0].count == 1
    assert abs(math.fsum(a.mass for a in s.atoms) - 1.0) <= 1e-9
    # Per-sequence probabilities underflow doubles here, masses must not.
    assert s.per_seq_mass(n // 2) == 0.0
    assert s.masses[np.argmax(s.masses)] > 0.01


def test_type_ceiling_raises():
    d = make_distribution([0.2, 0.3, 0.5])
    with pytest.raises(CeilingExceeded):
        iid_spectrum(d, 100, type_ceiling=1000)


def test_spectrum_validation_rejects_disorder():
    good = iid_spectrum(make_distribution([0.3, 0.7]), 2)
    with pytest.raises(NumericError):
        Spectrum(n=2, base=2, atoms=tuple(reversed(good.atoms)))
    with pytest.raises(NumericError):
        Spectrum(n=2, base=2, atoms=(SpectrumAtom(-1.0, 0, 0.5),))
    with pytest.raises(NumericError):
        Spectrum(n=2, base=2, atoms=())


def test_prefix_and_suffix_masses_are_complementary():
    s = iid_spectrum(make_distribution([0.1, 0.4, 0.5]), 6)
    for i in range(len(s.atoms)):
        assert abs(float(s.prefix_mass[i]) + float(s.suffix_mass[i + 1]) - 1.0) <= 1e-12


@given(st.sampled_from(GRID), st.integers(min_value=1, max_value=6))
def test_counts_always_exact(probs, n):
    s = iid_spectrum(make_distribution(probs), n)
    assert s.total_count == len(probs) ** n
    assert all(a.count >= 1 for a in s.atoms)


# ---------------------------------------------------------------------------
# Mixtures


def test_mixture_matches_enumeration():
    p1, p2, w1 = [0.3, 0.7], [0.8, 0.2], 0.25
    d1, d2 = make_distribution(p1), make_distribution(p2)
    for n in (1, 3, 5):
        s = mixed_spectrum(d1, d2, w1, n)
        lev = orc.mixture_levels(p1, p2, w1, n)
        assert len(s.atoms) == len(lev)
        for atom, (lp, count) in zip(s.atoms, lev):
            assert atom.count == count
            assert abs(atom.log_prob_per_seq - lp) <= 1e-12 * max(1.0, abs(lp))


def test_mixture_merges_symmetric_types():
    # Mixing a distribution with its own permutation makes types k and n-k
    # carry identical block probabilities; they must fuse into one atom.
    d1 = make_distribution([0.3, 0.7])
    d2 = make_distribution([0.7, 0.3])
    for n in (2, 3, 6):
        s = mixed_spectrum(d1, d2, 0.5, n)
        assert len(s.atoms) == n // 2 + 1
        assert s.total_count == 2 ** n


def test_mixture_handles_disjoint_supports():
    d1 = make_distribution([1.0, 0.0])
    d2 = make_distribution([0.0, 1.0])
    s = mixed_spectrum(d1, d2, 0.5, 4)
    # Only the two constant sequences are reachable, each with mass 1/2.
    assert len(s.atoms) == 1
    assert s.atoms[0].count == 2
    assert abs(s.atoms[0].mass - 1.0) <= 1e-12


@pytest.mark.parametrize("w1", [0.0, 1.0, -0.2, 1.7])
def test_mixture_rejects_degenerate_weight(w1):
    d = make_distribution([0.5, 0.5])
    with pytest.raises(ValidationError):
        mixed_spectrum(d, d, w1, 3)


def test_mixture_rejects_mismatched_components():
    with pytest.raises(ValidationError):
        mixed_spectrum(make_distribution([0.5, 0.5]),
                       make_distribution([0.2, 0.3, 0.5]), 0.5, 3)
    with pytest.raises(ValidationError):
        mixed_spectrum(make_distribution([0.5, 0.5], base=2),
                       make_distribution([0.5, 0.5], base=3), 0.5, 3)


# ---------------------------------------------------------------------------
# Switching schedules


def test_parity_rule_matches_direct_computation():
    for n in range(1, 4100):
        t = 0
        while 2 ** t < n:
            t += 1
        assert ceil_log2_parity(n) == (0 if t % 2 == 0 else 1)


def test_parity_rule_alternates_on_doubling_grid():
    picks = [ceil_log2_parity(2 ** j) for j in range(13)]
    assert picks == [0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0]


def test_switching_spectrum_uses_active_component():
    sched = SwitchingSchedule((make_distribution([0.2, 0.8]),
                               make_distribution([0.4, 0.6])))
    for n in (7, 8, 15, 16, 64):
        s = switching_spectrum(sched, n)
        expected = iid_spectrum(sched.components[sched.active_component(n)], n)
        assert [a.count for a in s.atoms] == [a.count for a in expected.atoms]


def test_switching_rejects_bad_rule_output():
    sched = SwitchingSchedule((make_distribution([0.5, 0.5]),
                               make_distribution([0.4, 0.6])),
                              rule=lambda n: 2)
    with pytest.raises(ValidationError):
        sched.active_component(4)


# ---------------------------------------------------------------------------
# Sampling


def test_sample_sequences_shape_and_range():
    d = make_distribution([0.3, 0.7, 0.0])
    draws = sample_sequences(d, 11, 500, seed=3)
    assert draws.shape == (500, 11)
    assert draws.min() >= 0
    assert draws.max() <= 1  # the zero-probability symbol never appears


def test_sample_sequences_deterministic_per_seed():
    d = make_distribution([0.25, 0.75])
    a = sample_sequences(d, 6, 100, seed=9)
    b = sample_sequences(d, 6, 100, seed=9)
    c = sample_sequences(d, 6, 100, seed=10)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_sample_sequences_frequency_sane():
    d = make_distribution([0.3, 0.7])
    draws = sample_sequences(d, 4, 50000, seed=0)
    freq = float(np.mean(draws == 0))
    assert abs(freq - 0.3) < 0.01
