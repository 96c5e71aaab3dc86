"""Certified smallest-positive-root isolation and escape rates.

Root counts come from exact Sturm sequences over the integers (denominators
cleared, content stripped), so "smallest" is unconditional.  Two fast paths
keep the common cases cheap without giving up certification:

* a supplied exact rational root candidate that checks out is deflated away
  by synthetic division, so the remaining isolation never fights it;
* a polynomial whose coefficient signs show at most one variation has, by
  Descartes' rule, exactly that many positive roots, so plain sign bisection
  is already certified.

Everything else goes through Sturm counts, including even-multiplicity
roots, which never produce a sign change.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import NoPositiveRootError
from .measures import BernoulliMeasure, MarkovChain, as_fraction
from .polynomials import RationalPolynomial
from .polynomials import survival_denominator as _survival_denominator

DEFAULT_TOL = Fraction(1, 10**14)
EQUALITY_TOL = Fraction(1, 10**30)
BRACKET_CAP = 1 << 20
_REFINE_STEP = 1 << 10


def _frac_log(x: Fraction) -> float:
    # math.log takes arbitrary-size ints, so this never overflows.
    return math.log(x.numerator) - math.log(x.denominator)


# --------------------------------------------------------------------------
# integer polynomial helpers (signs only, no rounding anywhere)
# --------------------------------------------------------------------------


def _int_coeffs(poly: RationalPolynomial) -> list[int]:
    """Scale to integer coefficients with content 1; sign pattern preserved."""
    if poly.is_zero():
        return []
    lcm = 1
    for c in poly.coeffs:
        lcm = lcm // gcd(lcm, c.denominator) * c.denominator
    ints = [int(c * lcm) for c in poly.coeffs]
    g = 0
    for v in ints:
        g = gcd(g, v)
    return [v // g for v in ints]


def _primitive(ints: list[int]) -> list[int]:
    while ints and ints[-1] == 0:
        ints.pop()
    if not ints:
        return []
    g = 0
    for v in ints:
        g = gcd(g, v)
    return [v // g for v in ints]


def _derivative_int(ints: list[int]) -> list[int]:
    return [k * c for k, c in enumerate(ints) if k > 0]


def _sign_at(ints: list[int], num: int, den: int) -> int:
    """Sign of p(num/den) for den > 0, num >= 0."""
    d = len(ints) - 1
    acc = 0
    # Horner in num, padding each step with a power of den:
    # acc_k = sum_{i>=k} a_i num^{i-k} den^{d-i}  evaluated incrementally.
    powers = [1] * (d + 1)
    for i in range(1, d + 1):
        powers[i] = powers[i - 1] * den
    for i in range(d, -1, -1):
        acc = acc * num + ints[i] * powers[d - i]
    return (acc > 0) - (acc < 0)


def _neg_prem_primitive(f: list[int], g: list[int]) -> list[int]:
    """Primitive part of -(f mod g), the next Sturm chain element."""
    dg = len(g) - 1
    lg = g[-1]
    r = list(f)
    rounds = 0
    while len(r) - 1 >= dg and r:
        lead = r[-1]
        if lead != 0:
            dr = len(r) - 1
            r = [lg * c for c in r]
            for i in range(dg + 1):
                r[dr - dg + i] -= lead * g[i]
            rounds += 1
        r.pop()
        while r and r[-1] == 0:
            r.pop()
    # r == lg**rounds * (f mod g); renormalize to a positive multiple.
    if lg < 0 and rounds % 2:
        r = [-c for c in r]
    return _primitive([-c for c in r])


def _sturm_chain(ints: list[int]) -> list[list[int]]:
    chain = [_primitive(list(ints))]
    deriv = _primitive(_derivative_int(chain[0]))
    if deriv:
        chain.append(deriv)
        while len(chain[-1]) > 1:
            nxt = _neg_prem_primitive(chain[-2], chain[-1])
            if not nxt:
                break
            chain.append(nxt)
    return chain


def _variations(signs: list[int]) -> int:
    seq = [s for s in signs if s]
    return sum(1 for a, b in zip(seq, seq[1:]) if a != b)


def _variations_at(chain: list[list[int]], x: Fraction) -> int:
    return _variations([_sign_at(p, x.numerator, x.denominator) for p in chain])


def _variations_at_inf(chain: list[list[int]]) -> int:
    return _variations([1 if p[-1] > 0 else -1 for p in chain])


def descartes_variations(poly: RationalPolynomial) -> int:
    """Number of sign changes in the coefficient sequence: an upper bound on
    the number of positive roots, exact when 0 or 1."""
    signs = [(c > 0) - (c < 0) for c in poly.coeffs if c != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_positive_roots(poly: RationalPolynomial) -> int:
    """Number of distinct roots in (0, +inf), by Sturm counting."""
    p = poly
    while not p.is_zero() and p[0] == 0:
        p = RationalPolynomial(p.coeffs[1:])  # strip roots at 0
    if p.is_zero():
        raise ValueError("zero polynomial")
    if p.degree == 0:
        return 0
    chain = _sturm_chain(_int_coeffs(p))
    return _variations_at(chain, Fraction(0)) - _variations_at_inf(chain)


def count_roots_between(poly: RationalPolynomial, a: Fraction, b: Fraction) -> int:
    """Number of distinct roots in the open interval (a, b); requires that
    neither endpoint is a root."""
    a, b = Fraction(a), Fraction(b)
    if not 0 <= a < b:
        raise ValueError("need 0 <= a < b")
    if poly.eval(a) == 0 or poly.eval(b) == 0:
        raise ValueError("endpoints must not be roots")
    chain = _sturm_chain(_int_coeffs(poly))
    return _variations_at(chain, a) - _variations_at(chain, b)


# --------------------------------------------------------------------------
# results
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RootResult:
    """A certified enclosure [lower, upper] of the smallest positive root of
    ``poly``, with the escape rate gamma = log(root) as a float interval.
    ``lower == upper`` means the root is known exactly as a rational."""

    poly: RationalPolynomial
    lower: Fraction
    upper: Fraction
    candidates: tuple[Fraction, ...] = ()

    def __post_init__(self) -> None:
        if not 0 < self.lower <= self.upper:
            raise ValueError("invalid enclosure")

    @property
    def exact(self) -> bool:
        return self.lower == self.upper

    @property
    def z0(self) -> float:
        mid = (self.lower + self.upper) / 2
        return mid.numerator / mid.denominator

    @property
    def gamma_lower(self) -> float:
        return math.nextafter(_frac_log(self.lower), -math.inf)

    @property
    def gamma_upper(self) -> float:
        return math.nextafter(_frac_log(self.upper), math.inf)

    @property
    def gamma(self) -> float:
        return _frac_log(self.lower) if self.exact else math.log(self.z0)

    def rel_width(self) -> Fraction:
        return (self.upper - self.lower) / self.lower


# --------------------------------------------------------------------------
# isolation
# --------------------------------------------------------------------------


def _exact_result(poly: RationalPolynomial, root: Fraction, candidates) -> RootResult:
    return RootResult(poly, root, root, tuple(candidates))


def _grow_bracket(start: Fraction = Fraction(2)):
    """Yield increasing probes 2, 4, 8, ... until the hard cap."""
    hi = start
    while hi <= BRACKET_CAP:
        yield hi
        hi *= 2


class _Isolator:
    """Bisection state for the smallest positive root of a core polynomial
    that has no rational roots the caller knows about."""

    def __init__(self, core: RationalPolynomial):
        self.core = core
        self.ints = _int_coeffs(core)
        self._chain: list[list[int]] | None = None
        self.exact_root: Fraction | None = None
        self.lo = Fraction(0)
        self.hi: Fraction | None = None
        self._sign_mode = False

    @property
    def chain(self) -> list[list[int]]:
        if self._chain is None:
            self._chain = _sturm_chain(self.ints)
        return self._chain

    def sign(self, x: Fraction) -> int:
        return _sign_at(self.ints, x.numerator, x.denominator)

    def count_upto(self, x: Fraction) -> int:
        """Distinct roots in (0, x]; x must not be a root."""
        return _variations_at(self.chain, Fraction(0)) - _variations_at(self.chain, x)

    def positive_roots(self) -> int:
        var = descartes_variations(self.core)
        if var <= 1:
            return var
        return _variations_at(self.chain, Fraction(0)) - _variations_at_inf(self.chain)

    def _handle_exact_hit(self, x: Fraction) -> bool:
        """x is a root of core.  Mark exact if nothing lies below it."""
        deflated = self.core
        while deflated.eval(x) == 0:
            deflated = deflated.deflate_root(x)
        if deflated.degree <= 0 or count_roots_between(deflated, Fraction(0), x) == 0:
            # careful: count_roots_between uses open interval (0, x)
            self.exact_root = x
            return True
        self.hi = x
        return False

    def find_bracket(self) -> None:
        """Establish lo = 0 < hi with at least one root in (lo, hi]."""
        one_root = descartes_variations(self.core) == 1
        for probe in _grow_bracket():
            s = self.sign(probe)
            if s == 0:
                if self._handle_exact_hit(probe):
                    return
                return  # hi set by _handle_exact_hit
            if one_root:
                if s < 0:
                    self.hi = probe
                    return
            else:
                if self.count_upto(probe) >= 1:
                    self.hi = probe
                    return
        raise NoPositiveRootError(
            f"no root found below the bracket cap {BRACKET_CAP}"
        )

    def step(self) -> None:
        assert self.hi is not None
        mid = (self.lo + self.hi) / 2
        s = self.sign(mid)
        if s == 0:
            self._handle_exact_hit(mid)
            return
        if self._sign_mode or (self.lo > 0 and self.sign(self.lo) * s < 0):
            # a sign change brackets the root; plain bisection from here on
            self._sign_mode = True
            if self.sign(self.lo) * s < 0:
                self.hi = mid
            else:
                self.lo = mid
            return
        if self.count_upto(mid) >= 1:
            self.hi = mid
        else:
            self.lo = mid

    def run(self, tol: Fraction) -> tuple[Fraction, Fraction] | Fraction:
        if self.positive_roots() == 0:
            raise NoPositiveRootError("polynomial has no positive roots")
        self.find_bracket()
        while self.exact_root is None:
            if self.lo > 0 and (self.hi - self.lo) <= tol * self.lo:
                break
            self.step()
        if self.exact_root is not None:
            return self.exact_root
        return self.lo, self.hi


def _isolate_core(core: RationalPolynomial, tol: Fraction):
    """Smallest positive root of ``core`` (no known rational roots): either
    an exact Fraction, an enclosure pair, or None when no positive root."""
    if core.degree <= 0:
        return None
    if core.eval(Fraction(0)) < 0:
        core = -core
    if descartes_variations(core) == 0:
        return None
    iso = _Isolator(core)
    try:
        return iso.run(tol)
    except NoPositiveRootError:
        return None


def smallest_positive_root(
    poly: RationalPolynomial,
    tol: Fraction = DEFAULT_TOL,
    candidates: tuple[Fraction, ...] = (),
) -> RootResult:
    """Certified enclosure of the smallest root of ``poly`` in (0, inf).

    ``candidates`` are rational values to try as exact roots first; any that
    check out are deflated away by exact synthetic division, which is what
    pins regime-boundary roots like 1/p exactly instead of enclosing them.
    Raises NoPositiveRootError when there is no positive root.
    """
    if poly.is_zero():
        raise ValueError("zero polynomial")
    if poly.eval(Fraction(0)) == 0:
        raise ValueError("polynomial must not vanish at 0")
    tol = as_fraction(tol)
    if tol <= 0:
        raise ValueError("tolerance must be positive")

    cand = sorted({as_fraction(c) for c in candidates if as_fraction(c) > 0})
    exact_roots = [c for c in cand if poly.eval(c) == 0]
    core = poly
    for c in exact_roots:
        while core.eval(c) == 0:
            core = core.deflate_root(c)
    cmin = exact_roots[0] if exact_roots else None

    located = _isolate_core(core, tol)
    if located is None:
        if cmin is None:
            raise NoPositiveRootError(f"{poly!r} has no positive root")
        return _exact_result(poly, cmin, candidates)
    if isinstance(located, Fraction):
        root = located if cmin is None else min(located, cmin)
        return _exact_result(poly, root, candidates)

    lo, hi = located
    if cmin is not None:
        # Disambiguate against the candidate: narrow until cmin is outside.
        iso = _Isolator(core)
        iso.lo, iso.hi = lo, hi
        iso._sign_mode = iso.lo > 0 and iso.sign(iso.lo) * iso.sign(iso.hi) < 0
        while iso.exact_root is None and iso.lo < cmin < iso.hi:
            iso.step()
        if iso.exact_root is not None:
            root = min(iso.exact_root, cmin)
            return _exact_result(poly, root, candidates)
        lo, hi = iso.lo, iso.hi
        if cmin <= lo:
            return _exact_result(poly, cmin, candidates)
    return RootResult(poly, lo, hi, tuple(candidates))


def refine(result: RootResult, tol: Fraction) -> RootResult:
    """A (possibly) tighter enclosure of the same root."""
    tol = as_fraction(tol)
    if result.exact or result.rel_width() <= tol:
        return result
    return smallest_positive_root(result.poly, tol, result.candidates)


def compare(a: RootResult, b: RootResult, equality_tol: Fraction = EQUALITY_TOL) -> int:
    """-1, 0, +1 ordering of two certified roots.

    Refines overlapping enclosures until they separate; two roots whose
    enclosures still overlap at relative width ``equality_tol`` are declared
    equal.  Identical polynomials compare equal immediately.
    """
    while True:
        if a.upper < b.lower:
            return -1
        if b.upper < a.lower:
            return 1
        if a.poly == b.poly:
            return 0
        if a.exact and b.exact:
            return 0  # overlapping points are the same point
        width = max(a.rel_width(), b.rel_width())
        if width <= equality_tol:
            return 0
        target = min(a.rel_width(), b.rel_width(), Fraction(1)) / _REFINE_STEP
        target = max(target, equality_tol / 2)
        a = refine(a, target)
        b = refine(b, target)


# --------------------------------------------------------------------------
# escape rates
# --------------------------------------------------------------------------


def _root_candidates(measure: BernoulliMeasure | MarkovChain) -> tuple[Fraction, ...]:
    if isinstance(measure, BernoulliMeasure):
        return tuple(sorted({1 / p for p in measure.probs}))
    vals = {1 / e for row in measure.matrix for e in row if e > 0}
    return tuple(sorted(vals))


def rate_from_denominator(
    poly: RationalPolynomial,
    measure: BernoulliMeasure | MarkovChain,
    tol: Fraction = DEFAULT_TOL,
) -> RootResult:
    """Escape rate from a prebuilt survival denominator; the enclosure is
    refined until it certifies z0 > 1."""
    result = smallest_positive_root(poly, as_fraction(tol), _root_candidates(measure))
    guard = 0
    while result.lower <= 1:
        if result.exact:
            raise AssertionError(f"escape-rate root {result.lower} <= 1")
        guard += 1
        if guard > 64:
            raise AssertionError("cannot separate the root from 1")
        result = refine(result, result.rel_width() / _REFINE_STEP)
    return result


def escape_rate(
    word,
    measure: BernoulliMeasure | MarkovChain,
    tol: Fraction = DEFAULT_TOL,
) -> RootResult:
    """Certified escape rate of the cylinder hole on ``word``: the enclosure
    of the smallest positive root z0 of the survival denominator, with
    gamma = log z0."""
    return rate_from_denominator(_survival_denominator(word, measure), measure, tol)


def compare_with_rational(result: RootResult, value: Fraction | int | str) -> int:
    """Certified sign of (enclosed root - value) for an exact rational value."""
    value = as_fraction(value)
    if value <= 0:
        return 1
    if result.exact:
        return (result.lower > value) - (result.lower < value)
    if result.poly.eval(value) == 0:
        deflated = result.poly
        while deflated.eval(value) == 0:
            deflated = deflated.deflate_root(value)
        if deflated.degree <= 0 or count_roots_between(deflated, Fraction(0), value) == 0:
            return 0  # value is the smallest positive root itself
    while True:
        if result.upper < value:
            return -1
        if result.lower > value:
            return 1
        result = refine(result, result.rel_width() / _REFINE_STEP)


# --------------------------------------------------------------------------
# trinomial critical values
# --------------------------------------------------------------------------


def _int_nth_root(x: int, n: int) -> int:
    """Floor of the n-th root of x >= 0, in pure integer arithmetic."""
    if x < 0:
        raise ValueError("x must be nonnegative")
    if x in (0, 1) or n == 1:
        return x
    guess = 1 << -(-x.bit_length() // n)  # 2^ceil(bits/n) >= x^(1/n)
    while True:
        step = ((n - 1) * guess + x // guess ** (n - 1)) // n
        if step >= guess:
            break
        guess = step
    while guess**n > x:
        guess -= 1
    while (guess + 1) ** n <= x:
        guess += 1
    return guess


def _nth_root_exact(x: Fraction, n: int) -> Fraction | None:
    num = _int_nth_root(x.numerator, n)
    den = _int_nth_root(x.denominator, n)
    if num**n == x.numerator and den**n == x.denominator:
        return Fraction(num, den)
    return None


@dataclass(frozen=True)
class CriticalPair:
    """Critical data of the trinomial m z^r - z + 1.

    threshold: largest m for which a positive root exists,
        (1/r) (1 - 1/r)^(r-1).
    minimizer: location (r m)^(-1/(r-1)) of the trinomial's minimum on
        (0, inf), exact when rational.
    sign_at_minimum: sign of the trinomial at the minimizer; negative below
        the threshold, zero at it, positive above.
    """

    r: int
    m: Fraction
    threshold: Fraction
    minimizer: float
    minimizer_exact: Fraction | None
    sign_at_minimum: int


def critical_values(r: int, m: Fraction | int | str) -> CriticalPair:
    m = as_fraction(m)
    if r < 2:
        raise ValueError("r must be >= 2")
    if m <= 0:
        raise ValueError("m must be positive")
    threshold = Fraction(1, r) * (1 - Fraction(1, r)) ** (r - 1)
    sign = -1 if m < threshold else (0 if m == threshold else 1)
    inv = 1 / (r * m)  # minimizer ** (r-1)
    exact = _nth_root_exact(inv, r - 1)
    approx = math.exp(_frac_log(inv) / (r - 1))
    return CriticalPair(
        r=r,
        m=m,
        threshold=threshold,
        minimizer=float(exact) if exact is not None else approx,
        minimizer_exact=exact,
        sign_at_minimum=sign,
    )
