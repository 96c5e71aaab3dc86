import math
from fractions import Fraction

import pytest

from holerates.measures import BernoulliMeasure, MarkovChain, hole_measure
from holerates.extremal import (
    Regime,
    brute_force_gamma_max,
    families,
    find_order_switch,
    gamma_max,
    gamma_max_two_symbols,
    markov_scan,
    max_measure_representative,
    max_rate_bounds,
    multi_symbol_analysis,
    ordering_table,
    run_pair_comparison,
    unbordered_lower_estimate,
    unbordered_rate_bounds,
    unbordered_representative,
)
from holerates.roots import compare, escape_rate
from holerates.words import AB, Word, is_unbordered

B = BernoulliMeasure.from_rationals
M = MarkovChain.from_rationals
TOL = Fraction(1, 10**12)


def w(text):
    return Word.parse(text, AB)


class TestFamilies:
    def test_r3_tilted(self):
        fam = families(3, B(["3/5", "2/5"]))
        assert {str(word) for word in fam.max_unbordered} == {"aab", "baa"}
        assert fam.unbordered_measure == Fraction(18, 125)
        assert [str(word) for word in fam.max_measure] == ["aaa"]
        assert fam.top_measure == Fraction(27, 125)

    def test_disjoint_when_p_exceeds_q(self):
        for r in (2, 3, 4, 5):
            fam = families(r, B(["7/10", "3/10"]))
            assert not (set(fam.max_unbordered) & set(fam.max_measure))

    def test_equiprobable_families_intersect(self):
        fam = families(4, B(["1/2", "1/2"]))
        overlap = set(fam.max_unbordered) & set(fam.max_measure)
        assert w("aaab") in overlap

    def test_representatives(self):
        measure = B(["3/5", "2/5"])
        assert str(unbordered_representative(4, measure)) == "aaab"
        assert str(max_measure_representative(4, measure)) == "aaaa"
        assert is_unbordered(unbordered_representative(6, measure))


class TestGammaMax:
    def test_crossing_below(self):
        report = gamma_max(2, B(["3/5", "2/5"]), TOL)
        assert {str(word) for word in report.witnesses} == {"ab", "ba"}
        assert math.isclose(report.gamma.gamma, math.log(5 / 3), rel_tol=1e-12)

    def test_crossing_above(self):
        report = gamma_max(2, B(["3/4", "1/4"]), TOL)
        assert report.regime is Regime.MEASURE_MAX
        assert [str(word) for word in report.witnesses] == ["aa"]

    def test_r4_large_p(self):
        report = gamma_max_two_symbols(4, Fraction(9, 10), TOL)
        assert report.regime is Regime.MEASURE_MAX
        assert [str(word) for word in report.witnesses] == ["aaaa"]

    def test_flat_stretch_value(self):
        report = gamma_max_two_symbols(5, Fraction(4, 5), TOL)
        assert report.regime is Regime.PRIME_FLAT
        assert report.gamma.exact and report.gamma.lower == Fraction(5, 4)

    def test_boundary_is_a_tie(self):
        report = gamma_max_two_symbols(4, Fraction(4, 5), TOL)
        assert report.regime is Regime.TIE
        assert {str(word) for word in report.witnesses} == {"aaab", "baaa", "aaaa"}
        assert report.gamma.exact and report.gamma.lower == Fraction(5, 4)

    def test_equiprobable_r3(self):
        report = gamma_max_two_symbols(3, Fraction(1, 2), TOL)
        best, _ = brute_force_gamma_max(3, B(["1/2", "1/2"]), TOL)
        assert compare(report.gamma, best) == 0

    def test_p_domain(self):
        with pytest.raises(ValueError):
            gamma_max_two_symbols(3, Fraction(1, 4))
        with pytest.raises(ValueError):
            gamma_max_two_symbols(3, Fraction(1))


class TestBruteForce:
    def test_argmax_below_crossing(self):
        _, witnesses = brute_force_gamma_max(2, B(["3/5", "2/5"]), TOL)
        assert {str(word) for word in witnesses} == {"ab", "ba"}

    def test_argmax_above_crossing(self):
        _, witnesses = brute_force_gamma_max(2, B(["3/4", "1/4"]), TOL)
        assert [str(word) for word in witnesses] == ["aa"]

    @pytest.mark.parametrize("r", [2, 3, 4, 5, 6])
    def test_matches_regime_table(self, r):
        for p in (Fraction(1, 2), Fraction(3, 5), Fraction(3, 4), Fraction(9, 10)):
            measure = B([p, 1 - p])
            best, witnesses = brute_force_gamma_max(r, measure, TOL)
            report = gamma_max_two_symbols(r, p, TOL)
            assert compare(best, report.gamma) == 0
            names = {word.letters for word in witnesses}
            assert all(word.letters in names for word in report.witnesses)

    @pytest.mark.parametrize("r", [2, 3, 4])
    def test_three_symbols_matches_representatives(self, r):
        # the maximum over all words is attained by one of the two canonical
        # representatives, whatever the alphabet size
        measure = B(["1/2", "3/10", "1/5"])
        best, witnesses = brute_force_gamma_max(r, measure, TOL)
        report = gamma_max(r, measure, TOL)
        assert compare(best, report.gamma) == 0


class TestBounds:
    def test_upper_bound_at_threshold(self):
        for r in (2, 3, 5, 8):
            threshold = Fraction(1, r) * (1 - Fraction(1, r)) ** (r - 1)
            _, upper = unbordered_rate_bounds(r, threshold)
            assert math.isclose(upper, math.log(r / (r - 1)), rel_tol=1e-12)

    def test_r2_upper(self):
        _, upper = unbordered_rate_bounds(2, Fraction(1, 4))
        assert math.isclose(upper, math.log(2), rel_tol=1e-12)

    def test_rejects_above_threshold(self):
        with pytest.raises(ValueError):
            unbordered_rate_bounds(3, Fraction(5, 27))

    def test_bounds_contain_certified_rate_for_unbordered_holes(self):
        measure = B(["7/10", "3/10"])
        for text in ("ab", "aab", "aabb", "ababb"):
            word = w(text)
            assert is_unbordered(word)
            lower, upper = unbordered_rate_bounds(len(word), hole_measure(word, measure))
            rate = escape_rate(word, measure, TOL)
            assert lower - 1e-12 <= rate.gamma <= upper + 1e-12

    def test_flat_regime_is_exact(self):
        lower, upper = max_rate_bounds(5, Fraction(4, 5))
        assert lower == upper
        assert math.isclose(lower, math.log(5 / 4), rel_tol=1e-15)

    def test_regime_three_formulas(self):
        p, r = Fraction(9, 10), 4
        lower, upper = max_rate_bounds(r, p)
        pf, qf = 0.9, 0.1
        assert math.isclose(
            lower, math.log(1 / pf) + math.log(1 / ((r + 1) * qf)) / r, rel_tol=1e-12
        )
        assert math.isclose(
            upper,
            math.log((-1 + pf + math.sqrt(qf**2 + 4 * pf * qf)) / (2 * pf * qf)),
            rel_tol=1e-12,
        )

    def test_sandwich_across_lengths(self):
        p = Fraction(17, 20)
        for r in range(2, 16):
            lower, upper = max_rate_bounds(r, p)
            gamma = gamma_max_two_symbols(r, p, TOL).gamma.gamma
            assert lower - 1e-12 <= gamma <= upper + 1e-12
            estimate = unbordered_lower_estimate(r, p)
            assert estimate <= gamma + 1e-12


class TestOrderingTable:
    def test_equiprobable_orders_by_min_period(self):
        rows = ordering_table(4, B(["1/2", "1/2"]), TOL)
        periods = [row.min_period for row in rows]
        assert periods == sorted(periods, reverse=True)
        # strictly between the period classes
        boundaries = {(4, 3), (3, 2), (2, 1)}
        for a, b in zip(rows, rows[1:]):
            if (a.min_period, b.min_period) in boundaries:
                assert compare(a.gamma, b.gamma) == 1

    def test_unbordered_words_top_their_measure_class(self):
        rows = ordering_table(5, B(["13/20", "7/20"]), TOL)
        by_measure = {}
        for row in rows:
            by_measure.setdefault(row.measure, []).append(row)
        for group in by_measure.values():
            if any(row.unbordered for row in group):
                best_rank = min(row.rank for row in group)
                top = [row for row in group if row.rank == best_rank]
                assert all(row.unbordered for row in top)

    def test_markov_rows_carry_cycle_weight(self):
        rows = ordering_table(3, M(["3/4", "1/4", "1/3", "2/3"]), TOL)
        assert all(row.cycle_weight is not None for row in rows)
        assert len(rows) == 8

    def test_r1(self):
        rows = ordering_table(1, B(["3/5", "2/5"]), TOL)
        assert [str(row.word) for row in rows] == ["a", "b"]
        assert math.isclose(rows[0].gamma.gamma, -math.log(2 / 5), rel_tol=1e-12)
        assert math.isclose(rows[1].gamma.gamma, -math.log(3 / 5), rel_tol=1e-12)


class TestOrderSwitch:
    def test_period_four_vs_five(self):
        lo, hi = find_order_switch(
            w("aabbaa"), w("baaaab"), Fraction(7, 10), Fraction(18, 25),
            width=Fraction(1, 10**5),
        )
        assert Fraction(7, 10) < lo <= hi < Fraction(18, 25)
        assert hi - lo <= Fraction(1, 10**5)

    def test_rejects_interval_without_sign_change(self):
        with pytest.raises(ValueError):
            find_order_switch(w("aabbaa"), w("baaaab"), Fraction(3, 4), Fraction(4, 5))


class TestMultiSymbol:
    def test_small_second_probability(self):
        report = multi_symbol_analysis(3, B(["7/10", "1/5", "1/10"]), TOL)
        assert report.regime is Regime.MEASURE_MAX
        assert report.reason == "q < p(1-p)"

    def test_large_p(self):
        report = multi_symbol_analysis(3, B(["17/20", "1/10", "1/20"]), TOL)
        assert report.regime is Regime.MEASURE_MAX
        assert report.reason == "p >= 1 - 1/(r+1)"

    def test_near_two_symbol_case_prefers_unbordered(self):
        report = multi_symbol_analysis(4, B(["3/5", "39/100", "1/100"]), TOL)
        assert report.regime in (Regime.PRIME_LOW, Regime.PRIME_FLAT)
        assert compare(report.gamma_unbordered, report.gamma_max_measure) == 1

    def test_requires_three_symbols(self):
        with pytest.raises(ValueError):
            multi_symbol_analysis(3, B(["1/2", "1/2"]), TOL)


class TestMarkovScan:
    def test_negative_eigenvalue_green_region(self):
        scan = markov_scan(3, M(["1/20", "19/20", "19/20", "1/20"]), TOL)
        assert scan.second_eigenvalue < 0
        assert {str(word) for word in scan.argmax} == {"aba", "bab"}
        assert all(check.holds for check in scan.pair_checks)

    def test_positive_eigenvalue_pairs(self):
        scan = markov_scan(3, M(["9/10", "1/10", "1/5", "4/5"]), TOL)
        assert scan.second_eigenvalue > 0
        strict = [c for c in scan.pair_checks if c.predicted == 1]
        assert strict and all(check.holds for check in scan.pair_checks)

    def test_equal_cycle_weight_unbordered_pairs_tie(self):
        scan = markov_scan(3, M(["3/4", "1/4", "1/3", "2/3"]), TOL)
        ties = [c for c in scan.pair_checks if c.predicted == 0]
        assert ties and all(check.observed == 0 for check in ties)

    @pytest.mark.parametrize("r", [3, 4, 5])
    def test_run_pair_criterion_on_a_grid(self, r):
        # bordered two-run word beats the unbordered one exactly when the
        # unbordered root is below 1/(1 + second eigenvalue)
        for num_a in (2, 10, 18):
            for num_b in (2, 10, 18):
                chain = M(
                    [
                        Fraction(num_a, 20),
                        1 - Fraction(num_a, 20),
                        1 - Fraction(num_b, 20),
                        Fraction(num_b, 20),
                    ]
                )
                outcome = run_pair_comparison(r, chain, TOL)
                assert outcome.consistent
