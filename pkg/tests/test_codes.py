"""Code construction, the counting condition, exact overflow tradeoffs, and
the round-trip simulator."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import _oracle as orc
from overflowlab import (
    Assignment,
    CodeSpec,
    ValidationError,
    code_overflow,
    construct_code,
    iid_spectrum,
    make_distribution,
    optimal_threshold,
    optimal_tradeoff,
    simulate_roundtrip,
    string_budget,
    validate_counting_condition,
)

GRID = orc.grid_distributions()
BINARY = [g for g in GRID if len(g) == 2]


def spectrum_of(probs, n):
    return iid_spectrum(make_distribution(list(probs)), n)


# ---------------------------------------------------------------------------
# string_budget
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("base,t,want", [
    (2, 0, 0), (2, 1, 2), (2, 2, 6), (2, 3, 14),
    (3, 1, 3), (3, 2, 12), (3, 3, 39), (5, 1, 5),
])
def test_string_budget_closed_form(base, t, want):
    assert string_budget(base, t) == want


def test_string_budget_matches_direct_sum():
    for base in (2, 3, 4):
        for t in range(1, 12):
            assert string_budget(base, t) == sum(base ** i for i in range(1, t + 1))


# ---------------------------------------------------------------------------
# construct_code
# ---------------------------------------------------------------------------


def test_construct_code_uniform_split():
    c = construct_code(spectrum_of((0.5, 0.5), 2), 0.25)
    assert c.assignments == (Assignment(atom=0, count=3, length=2),)
    assert c.decode_set_mass == pytest.approx(0.75, abs=1e-12)
    assert c.error_mass == pytest.approx(0.25, abs=1e-12)
    assert c.junk_length == 1


def test_construct_code_zero_error_uniform():
    c = construct_code(spectrum_of((0.5, 0.5), 2), 0.0)
    assert c.assignments == (Assignment(atom=0, count=4, length=2),)
    assert c.error_mass == 0.0


def test_construct_code_length_profile():
    # With everything decoded, lengths are ceil(-log2 P(x)) per atom.
    c = construct_code(spectrum_of((0.3, 0.7), 2), 0.0)
    assert c.assignments == (
        Assignment(atom=0, count=1, length=2),
        Assignment(atom=1, count=2, length=3),
        Assignment(atom=2, count=1, length=4),
    )


def test_construct_code_lengths_shrink_with_conditioning():
    # Shrinking the decode set scales lengths by -log2 of its mass.
    s = spectrum_of((0.3, 0.7), 4)
    full = {a.atom: a.length for a in construct_code(s, 0.0).assignments}
    trimmed = construct_code(s, 0.2)
    for a in trimmed.assignments:
        assert a.length <= full[a.atom]


def test_construct_code_never_empty_at_extreme_eps():
    # Even with eps within rounding of 1 the code decodes one sequence.
    c = construct_code(spectrum_of((0.3, 0.7), 2), 1.0 - 1e-15)
    assert sum(a.count for a in c.assignments) == 1
    assert c.assignments[0].atom == 0


def test_construct_code_counting_always_holds():
    for probs in ((0.5, 0.5), (0.3, 0.7), (0.2, 0.3, 0.5)):
        for n in (1, 3, 5, 7):
            for eps in (0.0, 0.1, 1 / 3):
                c = construct_code(spectrum_of(probs, n), eps)
                assert validate_counting_condition(c).ok


@pytest.mark.parametrize("eps", [-0.1, 1.0, 1.5])
def test_construct_code_rejects_bad_eps(eps):
    with pytest.raises(ValidationError):
        construct_code(spectrum_of((0.3, 0.7), 2), eps)


# ---------------------------------------------------------------------------
# validate_counting_condition
# ---------------------------------------------------------------------------


def _bare_spec(assignments, base=2):
    return CodeSpec(n=2, base=base, decode_set_mass=0.0, error_mass=0.0,
                    assignments=assignments)


def test_counting_rejects_overfull_length_one():
    r = validate_counting_condition(_bare_spec((Assignment(0, 3, 1),)))
    assert not r.ok
    assert r.first_violation == (1, 3, 2)


def test_counting_accepts_exactly_full_level():
    r = validate_counting_condition(_bare_spec((Assignment(0, 2, 1), Assignment(1, 4, 2))))
    assert r.ok
    assert r.first_violation is None


def test_counting_is_cumulative_across_lengths():
    # 2 strings of length 1 plus 5 of length <= 2 exceeds the 6-string budget.
    r = validate_counting_condition(_bare_spec((Assignment(0, 2, 1), Assignment(1, 5, 2))))
    assert not r.ok
    assert r.first_violation == (2, 7, 6)


def test_counting_rejects_nonpositive_length():
    r = validate_counting_condition(_bare_spec((Assignment(0, 1, 0),)))
    assert not r.ok
    assert r.first_violation == (0, 1, 0)


def test_counting_respects_base():
    r = validate_counting_condition(_bare_spec((Assignment(0, 3, 1),), base=3))
    assert r.ok


# ---------------------------------------------------------------------------
# code_overflow
# ---------------------------------------------------------------------------


def test_code_overflow_steps_through_lengths():
    c = construct_code(spectrum_of((0.3, 0.7), 2), 0.0)
    assert code_overflow(c, 2) == pytest.approx(0.51, abs=1e-12)
    assert code_overflow(c, 3) == pytest.approx(0.09, abs=1e-12)
    assert code_overflow(c, 3.5) == pytest.approx(0.09, abs=1e-12)
    assert code_overflow(c, 4) == 0.0


def test_code_overflow_counts_long_junk():
    c = CodeSpec(n=1, base=2, decode_set_mass=0.7, error_mass=0.3,
                 assignments=(Assignment(0, 1, 1),), junk_length=2,
                 spectrum=spectrum_of((0.3, 0.7), 1))
    assert code_overflow(c, 1) == pytest.approx(0.3, abs=1e-12)
    assert code_overflow(c, 2) == 0.0


def test_code_overflow_validation():
    c = construct_code(spectrum_of((0.3, 0.7), 2), 0.0)
    with pytest.raises(ValidationError):
        code_overflow(c, 0.5)
    bare = _bare_spec(c.assignments)
    with pytest.raises(ValidationError):
        code_overflow(bare, 2)


@pytest.mark.parametrize("probs", [(0.3, 0.7), (0.2, 0.3, 0.5)])
@pytest.mark.parametrize("n", [1, 3, 5])
@pytest.mark.parametrize("eps", [0.0, 1 / 7, 0.3])
def test_code_overflow_matches_enumeration(probs, n, eps):
    c = construct_code(spectrum_of(probs, n), eps)
    levels = orc.seq_levels(probs, n)
    for eta in (1, 2, 4, 8):
        assert code_overflow(c, eta) == pytest.approx(
            orc.code_overflow(levels, 2, eps, eta), abs=1e-12)


# ---------------------------------------------------------------------------
# optimal_tradeoff
# ---------------------------------------------------------------------------


def test_tradeoff_pinned_values():
    su = spectrum_of((0.5, 0.5), 2)
    s2 = spectrum_of((0.3, 0.7), 2)
    s3 = spectrum_of((0.3, 0.7), 3)
    assert optimal_tradeoff(su, 1, 0.0).delta_star == pytest.approx(0.5, abs=1e-12)
    assert optimal_tradeoff(su, 1, 0.25).delta_star == pytest.approx(0.25, abs=1e-12)
    assert optimal_tradeoff(s2, 1, 0.0).delta_star == pytest.approx(0.3, abs=1e-12)
    assert optimal_tradeoff(s2, 1, 0.1).delta_star == pytest.approx(0.21, abs=1e-12)
    assert optimal_tradeoff(s3, 1, 0.1).delta_star == pytest.approx(0.42, abs=1e-12)
    assert optimal_tradeoff(s3, 2, 0.0).delta_star == pytest.approx(0.09, abs=1e-12)


def test_tradeoff_reports_string_budget():
    s = spectrum_of((0.3, 0.7), 4)
    for eta in (1, 2.0, 3.7, 6):
        assert optimal_tradeoff(s, eta, 0.1).budget == string_budget(2, math.floor(eta))


def test_tradeoff_is_step_function_of_floor_eta():
    s = spectrum_of((0.3, 0.7), 5)
    a = optimal_tradeoff(s, 2.0, 0.1)
    b = optimal_tradeoff(s, 2.999, 0.1)
    assert a.delta_star == b.delta_star
    assert a.budget == b.budget


def test_tradeoff_zero_beyond_total_count():
    s = spectrum_of((0.3, 0.7), 2)
    p = optimal_tradeoff(s, 2, 0.0)  # 6 strings for 4 sequences
    assert p.delta_star == 0.0


def test_tradeoff_exact_zero_when_tail_junkable():
    # The whole overflow tail fits in the error budget, so the optimum is an
    # exact float zero, not a rounding residue.
    s = spectrum_of((0.3, 0.7), 3)
    p = optimal_tradeoff(s, 2, 0.3)  # tail beyond top-6 is 2 * 0.063 + 0.027
    assert p.delta_star == 0.0


@pytest.mark.parametrize("probs", [(0.3, 0.7), (0.5, 0.5), (0.1, 0.9), (0.2, 0.3, 0.5)])
@pytest.mark.parametrize("n", [1, 3, 5])
@pytest.mark.parametrize("eta,eps", [(1, 0.0), (1, 2 / 7), (2, 1 / 7), (3, 0.3)])
def test_tradeoff_matches_enumeration(probs, n, eta, eps):
    p = optimal_tradeoff(spectrum_of(probs, n), eta, eps)
    delta, budget = orc.tradeoff(orc.seq_levels(probs, n), 2, eta, eps)
    assert p.delta_star == pytest.approx(delta, abs=1e-12)
    assert p.budget == budget


@given(st.sampled_from(GRID), st.integers(1, 5),
       st.integers(1, 4), st.sampled_from([0.0, 1 / 7, 2 / 7, 0.4]))
def test_tradeoff_monotone_in_both_arguments(probs, n, eta, eps):
    s = spectrum_of(probs, n)
    p = optimal_tradeoff(s, eta, eps)
    assert 0.0 <= p.delta_star <= 1.0
    assert optimal_tradeoff(s, eta + 1, eps).delta_star <= p.delta_star + 1e-12
    assert optimal_tradeoff(s, eta, min(eps + 1 / 7, 0.99)).delta_star <= p.delta_star + 1e-12


def test_tradeoff_sandwiches_subset_optimum():
    """Sequence-greedy junking is within one boundary sequence of the best
    junk subset, and never below it (both searched exhaustively here)."""
    for probs in BINARY:
        for n in (1, 2, 3, 4):
            levels = orc.seq_levels(probs, n)
            for eta in (1, 2, 3):
                budget = orc.string_budget(2, eta)
                cum = 0
                quantum = 0.0
                for lp, count in levels:
                    if cum + count > budget:
                        quantum = math.exp(lp)
                        break
                    cum += count
                for eps in (0.0, 0.1, 0.2, 0.45):
                    greedy = optimal_tradeoff(spectrum_of(probs, n), eta, eps).delta_star
                    best = orc.exhaustive_tradeoff(levels, 2, eta, eps)
                    assert best <= greedy + 1e-12
                    assert greedy <= best + quantum + 1e-12


def test_tradeoff_gap_to_subset_optimum_can_be_strict():
    # At a coarse threshold the greedy walk can strand part of the budget on
    # a heavy boundary atom where a lighter subset choice spends it fully.
    greedy = optimal_tradeoff(spectrum_of((0.4, 0.6), 3), 1, 0.2).delta_star
    best = orc.exhaustive_tradeoff(orc.seq_levels((0.4, 0.6), 3), 2, 1, 0.2)
    assert greedy == pytest.approx(0.496, abs=1e-12)
    assert best == pytest.approx(0.448, abs=1e-12)
    assert greedy > best + 1e-3


def test_tradeoff_validation():
    s = spectrum_of((0.3, 0.7), 2)
    with pytest.raises(ValidationError):
        optimal_tradeoff(s, 0.5, 0.1)
    with pytest.raises(ValidationError):
        optimal_tradeoff(s, 1, 1.0)
    with pytest.raises(ValidationError):
        optimal_tradeoff(s, 1, -0.1)


# ---------------------------------------------------------------------------
# optimal_threshold
# ---------------------------------------------------------------------------


def test_threshold_pinned_values():
    d = make_distribution([0.3, 0.7])
    assert optimal_threshold(iid_spectrum(d, 10), 0.1, 0.1) == 8
    assert optimal_threshold(iid_spectrum(d, 6), 0.1, 0.1) == 4
    assert optimal_threshold(iid_spectrum(d, 10), 0.0, 0.3) == 7
    assert optimal_threshold(iid_spectrum(d, 4), 0.2, 0.0) == 3


def test_threshold_matches_linear_scan():
    for probs in ((0.3, 0.7), (0.2, 0.3, 0.5)):
        levels_cache = {}
        for n in (2, 4, 6):
            levels = levels_cache.setdefault(n, orc.seq_levels(probs, n))
            s = spectrum_of(probs, n)
            for eps, delta in ((0.0, 1 / 7), (1 / 7, 1 / 7), (2 / 7, 0.0)):
                assert optimal_threshold(s, eps, delta) == orc.threshold(levels, 2, eps, delta)


def test_threshold_is_minimal():
    s = spectrum_of((0.3, 0.7), 8)
    for eps, delta in ((0.1, 0.1), (0.0, 0.25), (1 / 3, 1 / 7)):
        eta = optimal_threshold(s, eps, delta)
        assert optimal_tradeoff(s, eta, eps).delta_star <= delta
        if eta > 1:
            assert optimal_tradeoff(s, eta - 1, eps).delta_star > delta


def test_threshold_split_invariance_is_exact():
    s = spectrum_of((0.3, 0.7), 50)
    a = optimal_threshold(s, 0.1, 0.1)
    b = optimal_threshold(s, 0.2, 0.0)
    c = optimal_threshold(s, 0.0, 0.2)
    assert a == b == c == 44


def test_threshold_validation():
    s = spectrum_of((0.3, 0.7), 2)
    with pytest.raises(ValidationError):
        optimal_threshold(s, 0.6, 0.4)
    with pytest.raises(ValidationError):
        optimal_threshold(s, 0.1, -0.1)
    with pytest.raises(ValidationError):
        optimal_threshold(s, 1.2, 0.0)


# ---------------------------------------------------------------------------
# simulate_roundtrip
# ---------------------------------------------------------------------------


def test_simulate_pins_decoded_part_of_split_atom():
    # eps = 0.1 decodes two of the three weight-2 sequences; signature-major
    # order makes them (0,0,1) and (0,1,0), leaving (1,0,0) as the error.
    d = make_distribution([0.3, 0.7])
    c = construct_code(iid_spectrum(d, 3), 0.1)
    decoded = np.array([[0, 0, 1], [0, 1, 0]])
    err, over = simulate_roundtrip(c, d, decoded, 10)
    assert (err, over) == (0.0, 0.0)
    err, over = simulate_roundtrip(c, d, np.array([[1, 0, 0]]), 10)
    assert err == 1.0


def test_simulate_uniform_split_order():
    # All four sequences tie in probability; the decoded three are pinned by
    # signature order, which places (0,0) last.
    d = make_distribution([0.5, 0.5])
    c = construct_code(iid_spectrum(d, 2), 0.25)
    err, _ = simulate_roundtrip(c, d, np.array([[1, 1], [0, 1], [1, 0]]), 2)
    assert err == 0.0
    err, over = simulate_roundtrip(c, d, np.array([[0, 0], [1, 1]]), 1)
    assert err == 0.5
    assert over == 0.5  # the decoded row wears a length-2 codeword


def test_simulate_overflow_includes_long_junk():
    d = make_distribution([0.5, 0.5])
    c0 = construct_code(iid_spectrum(d, 2), 0.25)
    c = CodeSpec(n=c0.n, base=c0.base, decode_set_mass=c0.decode_set_mass,
                 error_mass=c0.error_mass, assignments=c0.assignments,
                 junk_length=3, spectrum=c0.spectrum)
    err, over = simulate_roundtrip(c, d, np.array([[0, 0]]), 2)
    assert err == 1.0
    assert over == 1.0


def test_simulate_tracks_exact_masses():
    from overflowlab import sample_sequences
    d = make_distribution([0.3, 0.7])
    s = iid_spectrum(d, 4)
    c = construct_code(s, 0.15)
    samples = sample_sequences(d, 4, 20000, seed=7)
    err, over = simulate_roundtrip(c, d, samples, 4)
    exact_err = c.error_mass
    exact_over = code_overflow(c, 4)
    sd_err = math.sqrt(exact_err * (1 - exact_err) / 20000)
    sd_over = math.sqrt(max(exact_over * (1 - exact_over), 1e-12) / 20000)
    assert abs(err - exact_err) < 5 * sd_err
    assert abs(over - exact_over) < 5 * sd_over + 1e-9


def test_simulate_is_deterministic():
    from overflowlab import sample_sequences
    d = make_distribution([0.2, 0.3, 0.5])
    c = construct_code(iid_spectrum(d, 3), 0.2)
    samples = sample_sequences(d, 3, 500, seed=11)
    assert simulate_roundtrip(c, d, samples, 3) == simulate_roundtrip(c, d, samples, 3)


def test_simulate_validation():
    d = make_distribution([0.3, 0.7])
    c = construct_code(iid_spectrum(d, 2), 0.1)
    with pytest.raises(ValidationError):
        simulate_roundtrip(c, d, np.array([0, 1]), 2)  # 1-D
    with pytest.raises(ValidationError):
        simulate_roundtrip(c, d, np.zeros((0, 2), dtype=int), 2)
    with pytest.raises(ValidationError):
        simulate_roundtrip(c, d, np.array([[0, 1, 1]]), 2)  # wrong n
    u = make_distribution([0.5, 0.5])
    with pytest.raises(ValidationError):
        # Samples scored under a different source do not match any atom.
        simulate_roundtrip(c, u, np.array([[0, 0]]), 2)
    bare = _bare_spec(c.assignments)
    with pytest.raises(ValidationError):
        simulate_roundtrip(bare, d, np.array([[0, 1]]), 2)
