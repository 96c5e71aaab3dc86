"""Exact escape rates for full shifts and two-symbol Markov shifts with
cylinder holes, with certified root enclosures and independent survival
oracles."""

from .errors import (
    AlphabetMismatchError,
    EnumerationCapError,
    ForbiddenWordError,
    NoPositiveRootError,
)
from .extremal import (
    HoleFamilies,
    MarkovScanReport,
    MultiSymbolReport,
    OrderingRow,
    Regime,
    RegimeReport,
    brute_force_gamma_max,
    families,
    find_order_switch,
    gamma_max,
    gamma_max_two_symbols,
    markov_scan,
    max_rate_bounds,
    multi_symbol_analysis,
    ordering_table,
    run_pair_comparison,
    unbordered_lower_estimate,
    unbordered_rate_bounds,
)
from .measures import (
    BernoulliMeasure,
    HoleWeights,
    MarkovChain,
    hole_measure,
    is_allowed,
    markov_weights,
    stationary_distribution,
)
from .polynomials import (
    RationalPolynomial,
    markov_weighted_autocorrelation,
    max_unbordered_denominator,
    survival_denominator,
    unbordered_denominator,
    weighted_autocorrelation,
)
from .roots import (
    CriticalPair,
    RootResult,
    compare,
    compare_with_rational,
    count_positive_roots,
    count_roots_between,
    critical_values,
    escape_rate,
    refine,
    smallest_positive_root,
)
from .survival import (
    AvoidanceAutomaton,
    EmpiricalRate,
    RationalGenFun,
    SurvivalSeries,
    build_automaton,
    direct_enumeration,
    empirical_rate,
    genfun,
    genfun_from_word_equations,
    survival_series,
)
from .words import (
    Alphabet,
    Word,
    autocorrelation,
    enumerate_words,
    is_unbordered,
    minimal_period,
    occurrence_count,
)

__version__ = "0.1.0"
