"""Finite words over a finite alphabet: borders, periods, enumeration.

Symbols are stored as integer indices into an :class:`Alphabet`; textual
symbol names appear only when parsing or printing.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

from .errors import EnumerationCapError

#: Hard default on the number of words a single scan may enumerate.
DEFAULT_ENUMERATION_CAP = 1 << 24


@dataclass(frozen=True)
class Alphabet:
    """An ordered alphabet of at least two distinct symbols."""

    symbols: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.symbols) < 2:
            raise ValueError("alphabet needs at least two symbols")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("alphabet symbols must be pairwise distinct")
        if any(not s for s in self.symbols):
            raise ValueError("alphabet symbols must be non-empty strings")

    @property
    def size(self) -> int:
        return len(self.symbols)

    def index(self, symbol: str) -> int:
        try:
            return self.symbols.index(symbol)
        except ValueError:
            raise ValueError(f"symbol {symbol!r} not in alphabet {self.symbols}") from None

    @classmethod
    def of_size(cls, n: int) -> "Alphabet":
        """The alphabet 'a', 'b', 'c', ... of n single-character symbols."""
        if n > 26:
            raise ValueError("of_size supports at most 26 symbols")
        return cls(tuple("abcdefghijklmnopqrstuvwxyz"[:n]))


#: The two-symbol alphabet used throughout the Markov layer.
AB = Alphabet(("a", "b"))


@dataclass(frozen=True)
class Word:
    """A non-empty finite word, stored as symbol indices into its alphabet."""

    letters: tuple[int, ...]
    alphabet: Alphabet

    def __post_init__(self) -> None:
        if len(self.letters) < 1:
            raise ValueError("words must have length >= 1")
        if any(not (0 <= i < self.alphabet.size) for i in self.letters):
            raise ValueError("letter index out of range for alphabet")

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        names = [self.alphabet.symbols[i] for i in self.letters]
        if all(len(s) == 1 for s in self.alphabet.symbols):
            return "".join(names)
        return ",".join(names)

    @classmethod
    def parse(cls, text: str, alphabet: Alphabet) -> "Word":
        """Parse a word from symbol names.

        Single-character alphabets are written with no separator ('aab');
        alphabets with any multi-character symbol use commas ('s1,s0,s1').
        """
        if "," in text or any(len(s) > 1 for s in alphabet.symbols):
            names = [t for t in text.split(",") if t]
        else:
            names = list(text)
        if not names:
            raise ValueError("cannot parse an empty word")
        return cls(tuple(alphabet.index(n) for n in names), alphabet)


def occurrence_count(word: Word, symbol: int, start: int, stop: int) -> int:
    """Number of positions i in [start, stop) with word[i] == symbol.

    Returns 0 when start == stop.
    """
    if not 0 <= start <= stop <= len(word):
        raise IndexError(f"invalid range [{start}, {stop}) for word of length {len(word)}")
    return sum(1 for i in range(start, stop) if word.letters[i] == symbol)


def autocorrelation(word: Word) -> tuple[int, ...]:
    """The 0/1 border vector: bit i is 1 iff the suffix starting at i equals
    the prefix of the same length.  Bit 0 is always 1."""
    w = word.letters
    n = len(w)
    return tuple(1 if w[i:] == w[: n - i] else 0 for i in range(n))


def is_unbordered(word: Word) -> bool:
    """True iff the word has no border besides itself (autocorrelation 1,0,...,0)."""
    bits = autocorrelation(word)
    return not any(bits[1:])


def minimal_period(word: Word) -> int:
    """Smallest t >= 1 with word[i] == word[i+t] for all valid i.

    Every word has a period <= its length (the length itself counts as a
    period), so this is the index of the first 1 in the autocorrelation
    vector past position 0, or the length if there is none.
    """
    bits = autocorrelation(word)
    for t in range(1, len(word)):
        if bits[t]:
            return t
    return len(word)


def enumerate_words(
    alphabet: Alphabet, length: int, cap: int = DEFAULT_ENUMERATION_CAP
) -> Iterator[Word]:
    """Yield all alphabet.size ** length words of the given length, in
    lexicographic order of letter indices.  Raises EnumerationCapError
    before yielding anything if the count would exceed ``cap``."""
    if length < 1:
        raise ValueError("length must be >= 1")
    total = alphabet.size**length
    if total > cap:
        raise EnumerationCapError(
            f"{alphabet.size}^{length} = {total} words exceeds the cap of {cap}"
        )
    for letters in itertools.product(range(alphabet.size), repeat=length):
        yield Word(letters, alphabet)
