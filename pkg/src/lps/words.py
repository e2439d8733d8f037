"""Reduced words over a symmetric generating set and freeness certification.

Letters are indices into a generating set that carries an involutive
inverse_of pairing.  A word is reduced when no letter is immediately
followed by its inverse partner.  Counting reduced words of length n is
the (q+1)-regular tree sphere count with q = (number of generators) - 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterator, Optional, Protocol, Sequence


class SymmetricGeneratorSet(Protocol):
    """What word enumeration needs from a generating set."""

    @property
    def elements(self) -> Sequence: ...

    @property
    def identity(self): ...

    inverse_of: tuple[int, ...]


class EnumerationBudgetError(RuntimeError):
    """Raised when a requested enumeration would exceed the configured budget."""


@dataclass(frozen=True)
class Word:
    """Reduced word stored as a tuple of generator indices; () is the identity."""

    letters: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.letters)


@dataclass(frozen=True)
class FreenessReport:
    radius_checked: int
    ball_size_expected: int
    ball_size_found: int
    is_free_to_radius: bool
    first_collision: Optional[tuple[Word, Word]]


def word_counts(q: int, n: int) -> tuple[int, int]:
    """Sphere and ball counts of reduced words in the (q+1)-regular tree.

    The sphere of radius n has (q+1) * q**(n-1) points for n >= 1 and the
    ball totals ((q+1) * q**n - 2) // (q - 1); the q = 1 line degenerates
    to 2 and 2n + 1.
    """
    if not isinstance(q, int) or q < 1:
        raise ValueError(f"q must be an integer >= 1, got {q!r}")
    if not isinstance(n, int) or n < 0:
        raise ValueError(f"n must be an integer >= 0, got {n!r}")
    if n == 0:
        return (1, 1)
    if q == 1:
        return (2, 2 * n + 1)
    sphere = (q + 1) * q ** (n - 1)
    ball = ((q + 1) * q ** n - 2) // (q - 1)
    return (sphere, ball)


def is_reduced(letters: Sequence[int], inverse_of: Sequence[int]) -> bool:
    return all(inverse_of[a] != b for a, b in zip(letters, letters[1:]))


def enumerate_sphere(genset: SymmetricGeneratorSet, n: int) -> Iterator[Word]:
    """Yield every reduced word of length exactly n in lexicographic order."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    k = len(genset.elements)
    inverse_of = genset.inverse_of

    def rec(prefix: tuple[int, ...], banned: int) -> Iterator[Word]:
        if len(prefix) == n:
            yield Word(prefix)
            return
        for i in range(k):
            if i != banned:
                yield from rec(prefix + (i,), inverse_of[i])

    yield from rec((), -1)


def evaluate_word(genset: SymmetricGeneratorSet, word: Word):
    """Exact product of the word's generators, left to right.

    Raises ValueError when the word is not reduced for this generating set.
    """
    k = len(genset.elements)
    if any(not (0 <= a < k) for a in word.letters):
        raise ValueError(f"word uses letters outside 0..{k - 1}")
    if not is_reduced(word.letters, genset.inverse_of):
        raise ValueError(f"word {word.letters} is not reduced")
    return reduce(
        lambda acc, a: acc * genset.elements[a], word.letters, genset.identity
    )


def verify_freeness(
    genset: SymmetricGeneratorSet, n: int, budget: int = 10 ** 6
) -> FreenessReport:
    """Certify that reduced words of length <= n evaluate to distinct elements.

    Walks the reduced-word tree depth first with exact incremental products,
    so the first collision reported is the lexicographically earliest one.
    A ball larger than `budget` raises EnumerationBudgetError rather than
    silently truncating.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    q = len(genset.elements) - 1
    if q < 1:
        raise ValueError("generating set must contain at least two elements")
    _, expected = word_counts(q, n)
    if expected > budget:
        raise EnumerationBudgetError(
            f"ball of radius {n} holds {expected} words, over the budget of {budget}"
        )
    inverse_of = genset.inverse_of
    elements = genset.elements
    seen: dict = {genset.identity: Word(())}
    first_collision: Optional[tuple[Word, Word]] = None

    def visit(prefix: tuple[int, ...], value, banned: int) -> None:
        nonlocal first_collision
        if len(prefix) == n:
            return
        for i in range(len(elements)):
            if i == banned:
                continue
            child = value * elements[i]
            word = Word(prefix + (i,))
            if child in seen:
                if first_collision is None:
                    first_collision = (seen[child], word)
            else:
                seen[child] = word
            visit(prefix + (i,), child, inverse_of[i])

    visit((), genset.identity, -1)
    found = len(seen)
    return FreenessReport(
        radius_checked=n,
        ball_size_expected=expected,
        ball_size_found=found,
        is_free_to_radius=(found == expected),
        first_collision=first_collision,
    )
