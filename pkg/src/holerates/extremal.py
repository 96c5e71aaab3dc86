"""Extremal holes of a fixed length: which word leaks fastest.

Two families compete for the maximal escape rate at length r: the
unbordered holes of maximal measure (canonical witness a^(r-1) b, with a
the most probable symbol and b the runner-up) and the holes of maximal
measure outright (canonical witness a^r).  Over a two-symbol alphabet the
winner is decided exactly by where p sits relative to 1 - 1/r and
1 - 1/(r+1); this module computes the regime, certifies the rate, and
exposes the rigorous upper/lower bounds, brute-force cross-checks,
ordering tables, and Markov-chain scans built on top of it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cmp_to_key

from .measures import (
    BernoulliMeasure,
    MarkovChain,
    as_fraction,
    hole_measure,
    is_allowed,
    markov_weights,
)
from .polynomials import survival_denominator
from .roots import (
    DEFAULT_TOL,
    RootResult,
    _frac_log,
    compare,
    compare_with_rational,
    critical_values,
    rate_from_denominator,
)
from .roots import escape_rate as _escape_rate
from .words import (
    DEFAULT_ENUMERATION_CAP,
    Word,
    enumerate_words,
    is_unbordered,
    minimal_period,
)


class Regime(Enum):
    """Which family achieves the maximal escape rate, and in which shape."""

    PRIME_LOW = "PRIME_LOW"  # unbordered family wins, rate below log(1/p)
    PRIME_FLAT = "PRIME_FLAT"  # unbordered family wins with rate exactly log(1/p)
    MEASURE_MAX = "MEASURE_MAX"  # maximal-measure hole a^r wins
    TIE = "TIE"  # both families achieve the same rate


@dataclass(frozen=True)
class HoleFamilies:
    """Exhaustive enumeration of the two competing families at length r."""

    max_unbordered: tuple[Word, ...]
    max_measure: tuple[Word, ...]
    unbordered_measure: Fraction
    top_measure: Fraction


@dataclass(frozen=True)
class RegimeReport:
    r: int
    regime: Regime
    gamma: RootResult
    witnesses: tuple[Word, ...]


def unbordered_representative(r: int, measure: BernoulliMeasure) -> Word:
    """a^(r-1) b: unbordered, and of maximal measure among unbordered words."""
    if r < 2:
        raise ValueError("r must be >= 2")
    a, b = measure.top_two()
    return Word((a,) * (r - 1) + (b,), measure.alphabet)


def max_measure_representative(r: int, measure: BernoulliMeasure) -> Word:
    """a^r: the hole of maximal measure (unique when p > q)."""
    a, _ = measure.top_two()
    return Word((a,) * r, measure.alphabet)


def _unbordered_pair(r: int, measure: BernoulliMeasure) -> tuple[Word, ...]:
    a, b = measure.top_two()
    first = Word((a,) * (r - 1) + (b,), measure.alphabet)
    second = Word((b,) + (a,) * (r - 1), measure.alphabet)
    return (first, second) if first != second else (first,)


def families(
    r: int, measure: BernoulliMeasure, cap: int = DEFAULT_ENUMERATION_CAP
) -> HoleFamilies:
    """Scan all words of length r and collect both extremal families."""
    if r < 2:
        raise ValueError("r must be >= 2")
    best_unbordered: Fraction | None = None
    best_any: Fraction | None = None
    unbordered_words: list[Word] = []
    top_words: list[Word] = []
    for w in enumerate_words(measure.alphabet, r, cap):
        mu = hole_measure(w, measure)
        if best_any is None or mu > best_any:
            best_any, top_words = mu, [w]
        elif mu == best_any:
            top_words.append(w)
        if is_unbordered(w):
            if best_unbordered is None or mu > best_unbordered:
                best_unbordered, unbordered_words = mu, [w]
            elif mu == best_unbordered:
                unbordered_words.append(w)
    assert best_unbordered is not None and best_any is not None
    return HoleFamilies(
        max_unbordered=tuple(unbordered_words),
        max_measure=tuple(top_words),
        unbordered_measure=best_unbordered,
        top_measure=best_any,
    )


def _classify_unbordered_win(result: RootResult, p: Fraction) -> Regime:
    # The unbordered-family rate equals log(1/p) exactly on the flat stretch;
    # the exact-root machinery pins that case.
    if result.exact and result.lower == 1 / p:
        return Regime.PRIME_FLAT
    return Regime.PRIME_LOW


def gamma_max(
    r: int, measure: BernoulliMeasure, tol: Fraction = DEFAULT_TOL
) -> RegimeReport:
    """Maximal escape rate over all holes of length r, computed from the two
    canonical family representatives."""
    wp = unbordered_representative(r, measure)
    wm = max_measure_representative(r, measure)
    gp = _escape_rate(wp, measure, tol)
    gm = _escape_rate(wm, measure, tol)
    order = compare(gp, gm)
    p = measure.probs[measure.top_two()[0]]
    if order == 0:
        return RegimeReport(r, Regime.TIE, gp, _unbordered_pair(r, measure) + (wm,))
    if order > 0:
        return RegimeReport(r, _classify_unbordered_win(gp, p), gp, _unbordered_pair(r, measure))
    return RegimeReport(r, Regime.MEASURE_MAX, gm, (wm,))


def gamma_max_two_symbols(
    r: int, p: Fraction | int | str, tol: Fraction = DEFAULT_TOL
) -> RegimeReport:
    """Closed-form regime classification over a two-symbol alphabet.

    With boundaries b1 = 1 - 1/r and b2 = 1 - 1/(r+1):
      p in [1/2, b1)  -> PRIME_LOW, rate log of the trinomial root below 1/p;
      p in [b1, b2)   -> PRIME_FLAT, rate exactly log(1/p);
      p = b2          -> TIE, both families at log(1/p);
      p in (b2, 1)    -> MEASURE_MAX, rate log of the trinomial root above 1/p.
    """
    p = as_fraction(p)
    if not Fraction(1, 2) <= p < 1:
        raise ValueError("p must lie in [1/2, 1)")
    if r < 2:
        raise ValueError("r must be >= 2")
    measure = BernoulliMeasure.from_rationals([p, 1 - p])
    b1 = 1 - Fraction(1, r)
    b2 = 1 - Fraction(1, r + 1)
    if p < b1:
        result = _escape_rate(unbordered_representative(r, measure), measure, tol)
        if result.exact and result.lower == 1 / p:
            raise AssertionError("rate pinned at log(1/p) below the flat stretch")
        return RegimeReport(r, Regime.PRIME_LOW, result, _unbordered_pair(r, measure))
    if p < b2:
        result = _escape_rate(unbordered_representative(r, measure), measure, tol)
        if not (result.exact and result.lower == 1 / p):
            raise AssertionError("flat-stretch rate must be exactly log(1/p)")
        return RegimeReport(r, Regime.PRIME_FLAT, result, _unbordered_pair(r, measure))
    if p == b2:
        result = _escape_rate(unbordered_representative(r, measure), measure, tol)
        if not (result.exact and result.lower == 1 / p):
            raise AssertionError("boundary rate must be exactly log(1/p)")
        witnesses = _unbordered_pair(r, measure) + (max_measure_representative(r, measure),)
        return RegimeReport(r, Regime.TIE, result, witnesses)
    result = _escape_rate(max_measure_representative(r, measure), measure, tol)
    return RegimeReport(r, Regime.MEASURE_MAX, result, (max_measure_representative(r, measure),))


def brute_force_gamma_max(
    r: int,
    measure: BernoulliMeasure,
    tol: Fraction = DEFAULT_TOL,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> tuple[RootResult, tuple[Word, ...]]:
    """Certified maximum of the escape rate over every word of length r,
    with the full argmax set.  Words sharing a survival denominator share
    one root isolation."""
    cache: dict[tuple, RootResult] = {}
    best: RootResult | None = None
    witnesses: list[Word] = []
    for w in enumerate_words(measure.alphabet, r, cap):
        poly = survival_denominator(w, measure)
        res = cache.get(poly.coeffs)
        if res is None:
            res = rate_from_denominator(poly, measure, tol)
            cache[poly.coeffs] = res
        if best is None:
            best, witnesses = res, [w]
            continue
        order = compare(res, best)
        if order > 0:
            best, witnesses = res, [w]
        elif order == 0:
            witnesses.append(w)
    assert best is not None
    return best, tuple(witnesses)


# --------------------------------------------------------------------------
# rigorous bounds
# --------------------------------------------------------------------------


def unbordered_rate_bounds(r: int, m: Fraction | int | str) -> tuple[float, float]:
    """Lower and upper bounds on the escape rate of any unbordered hole of
    length r and measure m, from the osculating parabola at z = 1 and from
    the location of the trinomial's minimum."""
    m = as_fraction(m)
    if r < 2:
        raise ValueError("r must be >= 2")
    crit = critical_values(r, m)
    if m > crit.threshold:
        raise ValueError(f"m = {m} exceeds the existence threshold {crit.threshold}")
    disc = 1 - r * m * (2 + (r - 2) * m)
    if disc < 0:
        raise AssertionError("negative discriminant for m below the threshold")
    mf = m.numerator / m.denominator
    lower_arg = (1 + r * (r - 2) * mf - math.sqrt(disc.numerator / disc.denominator)) / (
        r * (r - 1) * mf
    )
    lower = math.log(lower_arg)
    upper = -_frac_log(r * m) / (r - 1)
    return lower, upper


def unbordered_lower_estimate(r: int, p: Fraction | int | str) -> float:
    """The parabola lower bound evaluated at the unbordered-family measure
    p^(r-1)(1-p).  Valid for every p in (0, 1) and every r >= 2, whichever
    family actually achieves the maximum."""
    p = as_fraction(p)
    return unbordered_rate_bounds(r, p ** (r - 1) * (1 - p))[0]


def max_rate_bounds(r: int, p: Fraction | int | str) -> tuple[float, float]:
    """Regime-wise rigorous bounds on the maximal escape rate at length r
    over a two-symbol alphabet; on the flat stretch the bounds collapse to
    the exact value log(1/p)."""
    p = as_fraction(p)
    if not Fraction(1, 2) <= p < 1:
        raise ValueError("p must lie in [1/2, 1)")
    if r < 2:
        raise ValueError("r must be >= 2")
    q = 1 - p
    if p < 1 - Fraction(1, r):
        return unbordered_rate_bounds(r, p ** (r - 1) * q)
    if p <= 1 - Fraction(1, r + 1):
        exact = -_frac_log(p)
        return exact, exact
    pf, qf = float(p), float(q)
    lower = -_frac_log(p) - math.log((r + 1) * qf) / r
    upper = math.log((-1 + pf + math.sqrt(qf * qf + 4 * pf * qf)) / (2 * pf * qf))
    return lower, upper


# --------------------------------------------------------------------------
# ordering tables
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class OrderingRow:
    word: Word
    measure: Fraction
    cycle_weight: Fraction | None  # set for Markov chains only
    gamma: RootResult
    unbordered: bool
    min_period: int
    rank: int


def _sorted_rows(
    entries: list[tuple[Word, Fraction, Fraction | None, RootResult]]
) -> list[OrderingRow]:
    def order(a, b) -> int:
        by_rate = compare(b[3], a[3])  # descending gamma
        if by_rate:
            return by_rate
        return -1 if a[0].letters < b[0].letters else 1

    entries = sorted(entries, key=cmp_to_key(order))
    rows: list[OrderingRow] = []
    rank = 1
    for i, (w, mu, cw, res) in enumerate(entries):
        if i > 0 and compare(res, entries[i - 1][3]) != 0:
            rank = i + 1
        rows.append(
            OrderingRow(
                word=w,
                measure=mu,
                cycle_weight=cw,
                gamma=res,
                unbordered=is_unbordered(w),
                min_period=minimal_period(w),
                rank=rank,
            )
        )
    return rows


def ordering_table(
    r: int,
    measure: BernoulliMeasure | MarkovChain,
    tol: Fraction = DEFAULT_TOL,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> list[OrderingRow]:
    """Every hole of length r (every allowed hole, for a chain), sorted by
    certified escape rate, largest first.  Interval-equal rates share a rank."""
    markov = isinstance(measure, MarkovChain)
    cache: dict[tuple, RootResult] = {}
    entries = []
    for w in enumerate_words(measure.alphabet, r, cap):
        if markov:
            if not is_allowed(w, measure):
                continue
            weights = markov_weights(w, measure)
            mu, cw = weights.measure, weights.cycle_weight
        else:
            mu, cw = hole_measure(w, measure), None
        poly = survival_denominator(w, measure)
        res = cache.get(poly.coeffs)
        if res is None:
            res = rate_from_denominator(poly, measure, tol)
            cache[poly.coeffs] = res
        entries.append((w, mu, cw, res))
    return _sorted_rows(entries)


def rate_difference_sign(
    w1: Word, w2: Word, p: Fraction, tol: Fraction = DEFAULT_TOL
) -> int:
    """Certified sign of gamma(w1) - gamma(w2) under Bernoulli(p, 1-p)."""
    measure = BernoulliMeasure.from_rationals([p, 1 - p])
    return compare(_escape_rate(w1, measure, tol), _escape_rate(w2, measure, tol))


def find_order_switch(
    w1: Word,
    w2: Word,
    p_low: Fraction | int | str,
    p_high: Fraction | int | str,
    width: Fraction = Fraction(1, 10**6),
) -> tuple[Fraction, Fraction]:
    """Certified enclosure of a crossing point p* where the escape-rate order
    of w1 and w2 flips.  The signs at p_low and p_high must be strict and
    opposite."""
    lo, hi = as_fraction(p_low), as_fraction(p_high)
    s_lo = rate_difference_sign(w1, w2, lo)
    s_hi = rate_difference_sign(w1, w2, hi)
    if s_lo == 0 or s_hi == 0 or s_lo == s_hi:
        raise ValueError(f"no certified sign change on [{lo}, {hi}] (signs {s_lo}, {s_hi})")
    while hi - lo > width:
        mid = (lo + hi) / 2
        s_mid = rate_difference_sign(w1, w2, mid)
        if s_mid == 0:
            # The rates agree beyond refinement depth at this grid point;
            # both sides of it then bracket the crossing.
            return mid, mid
        if s_mid == s_lo:
            lo = mid
        else:
            hi = mid
    return lo, hi


# --------------------------------------------------------------------------
# more than two symbols
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class MultiSymbolReport:
    r: int
    regime: Regime
    reason: str
    gamma_unbordered: RootResult
    gamma_max_measure: RootResult
    gamma: RootResult
    witnesses: tuple[Word, ...]


def multi_symbol_analysis(
    r: int, measure: BernoulliMeasure, tol: Fraction = DEFAULT_TOL
) -> MultiSymbolReport:
    """Classification of the maximal hole for alphabets with at least three
    symbols: the maximal-measure hole wins whenever p >= 1 - 1/(r+1), or for
    every p in [1/2, 1 - 1/(r+1)] once q < p(1-p); otherwise the two
    candidates are compared directly."""
    if measure.alphabet.size <= 2:
        raise ValueError("use gamma_max_two_symbols for two-symbol alphabets")
    a, b = measure.top_two()
    p, q = measure.probs[a], measure.probs[b]
    wp = unbordered_representative(r, measure)
    wm = max_measure_representative(r, measure)
    gp = _escape_rate(wp, measure, tol)
    gm = _escape_rate(wm, measure, tol)
    order = compare(gp, gm)
    if p >= 1 - Fraction(1, r + 1):
        if order > 0:
            raise AssertionError("maximal-measure hole must win for p >= 1 - 1/(r+1)")
        return MultiSymbolReport(
            r, Regime.MEASURE_MAX, "p >= 1 - 1/(r+1)", gp, gm, gm, (wm,)
        )
    if q < p * (1 - p):
        if order > 0:
            raise AssertionError("maximal-measure hole must win for q < p(1-p)")
        return MultiSymbolReport(
            r, Regime.MEASURE_MAX, "q < p(1-p)", gp, gm, gm, (wm,)
        )
    if order == 0:
        return MultiSymbolReport(
            r, Regime.TIE, "direct comparison", gp, gm, gp,
            _unbordered_pair(r, measure) + (wm,),
        )
    if order > 0:
        return MultiSymbolReport(
            r,
            _classify_unbordered_win(gp, p),
            "direct comparison",
            gp,
            gm,
            gp,
            _unbordered_pair(r, measure),
        )
    return MultiSymbolReport(
        r, Regime.MEASURE_MAX, "direct comparison", gp, gm, gm, (wm,)
    )


# --------------------------------------------------------------------------
# Markov scans
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PairCheck:
    """One same-cycle-weight word pair with its predicted and certified
    escape-rate order.

    ``predicted`` is the expected sign of gamma(unbordered) - gamma(other):
    +1 when the chain's second eigenvalue is positive, or when it is
    negative and the other word has distinct endpoints; 0 when the other
    word is unbordered too; None when the theory makes no claim.
    """

    unbordered_word: Word
    other: Word
    cycle_weight: Fraction
    second_eig_sign: int
    other_unbordered: bool
    endpoints_distinct: bool
    predicted: int | None
    observed: int

    @property
    def holds(self) -> bool:
        return self.predicted is None or self.observed == self.predicted


@dataclass(frozen=True)
class MarkovScanReport:
    r: int
    second_eigenvalue: Fraction
    rows: tuple[OrderingRow, ...]
    argmax: tuple[Word, ...]
    pair_checks: tuple[PairCheck, ...]


def _pair_checks(
    rows: tuple[OrderingRow, ...], chain: MarkovChain
) -> tuple[PairCheck, ...]:
    chi = chain.second_eigenvalue
    chi_sign = (chi > 0) - (chi < 0)
    by_weight: dict[Fraction, list[OrderingRow]] = {}
    for row in rows:
        assert row.cycle_weight is not None
        by_weight.setdefault(row.cycle_weight, []).append(row)
    checks: list[PairCheck] = []
    for weight, group in sorted(by_weight.items()):
        for first in group:
            if not first.unbordered:
                continue
            for second in group:
                if second.word == first.word:
                    continue
                distinct_ends = second.word.letters[0] != second.word.letters[-1]
                if second.unbordered:
                    predicted: int | None = 0
                elif chi_sign > 0 or (chi_sign < 0 and distinct_ends):
                    predicted = 1
                else:
                    predicted = None
                checks.append(
                    PairCheck(
                        unbordered_word=first.word,
                        other=second.word,
                        cycle_weight=weight,
                        second_eig_sign=chi_sign,
                        other_unbordered=second.unbordered,
                        endpoints_distinct=distinct_ends,
                        predicted=predicted,
                        observed=compare(first.gamma, second.gamma),
                    )
                )
    return tuple(checks)


def markov_scan(
    r: int,
    chain: MarkovChain,
    tol: Fraction = DEFAULT_TOL,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> MarkovScanReport:
    """Escape rates of every allowed hole of length r under the chain, the
    certified argmax set, and the pairwise order checks for words of equal
    cycle weight."""
    rows = tuple(ordering_table(r, chain, tol, cap))
    argmax = tuple(row.word for row in rows if row.rank == 1)
    return MarkovScanReport(
        r=r,
        second_eigenvalue=chain.second_eigenvalue,
        rows=rows,
        argmax=argmax,
        pair_checks=_pair_checks(rows, chain),
    )


@dataclass(frozen=True)
class RunPairComparison:
    """The two-run words a a b^(r-2) (unbordered) and a b^(r-2) a (bordered,
    same cycle weight): the bordered one leaks faster exactly when the
    unbordered word's root lies below 1/(1 + second eigenvalue)."""

    unbordered_word: Word
    cycled_word: Word
    observed: int  # sign of gamma(unbordered) - gamma(cycled)
    root_vs_threshold: int  # sign of (root of unbordered denominator) - 1/(1+eig)

    @property
    def consistent(self) -> bool:
        return self.observed == self.root_vs_threshold


def run_pair_comparison(
    r: int, chain: MarkovChain, tol: Fraction = DEFAULT_TOL
) -> RunPairComparison:
    if r < 3:
        raise ValueError("r must be >= 3")
    alphabet = chain.alphabet
    w1 = Word((0, 0) + (1,) * (r - 2), alphabet)
    w2 = Word((0,) + (1,) * (r - 2) + (0,), alphabet)
    res1 = _escape_rate(w1, chain, tol)
    res2 = _escape_rate(w2, chain, tol)
    threshold = 1 / (1 + chain.second_eigenvalue)
    return RunPairComparison(
        unbordered_word=w1,
        cycled_word=w2,
        observed=compare(res1, res2),
        root_vs_threshold=compare_with_rational(res1, threshold),
    )
