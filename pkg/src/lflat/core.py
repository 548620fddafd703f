"""Symbols, words, alphabets, orders and the word utilities.

Symbols are plain strings and words are tuples of symbols.  Everything here
is a pure function over immutable values.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence, Union

Symbol = str
Word = tuple  # tuple[Symbol, ...]

LAMBDA = "lambda"
BLANK = "B"


class AlphabetError(ValueError):
    pass


class UnknownAlphabetReference(AlphabetError):
    pass


class DuplicateSymbol(AlphabetError):
    pass


class CyclicAlphabetReference(AlphabetError):
    pass


class OrderMismatch(ValueError):
    pass


class ForeignSymbol(ValueError):
    pass


class NegativePower(ValueError):
    pass


# -- alphabet expressions ---------------------------------------------------

@dataclass(frozen=True)
class AlphaLiteral:
    symbols: tuple


@dataclass(frozen=True)
class AlphaRef:
    name: str


@dataclass(frozen=True)
class AlphaUnion:
    left: "AlphabetExpression"
    right: "AlphabetExpression"


AlphabetExpression = Union[AlphaLiteral, AlphaRef, AlphaUnion]


@dataclass(frozen=True)
class Alphabet:
    name: str
    expression: AlphabetExpression
    symbols: tuple

    @classmethod
    def literal(cls, name: str, symbols: Sequence[Symbol]) -> "Alphabet":
        syms = tuple(symbols)
        return cls(name, AlphaLiteral(syms), evaluate_alphabet(AlphaLiteral(syms), {}))


@dataclass(frozen=True)
class Order:
    name: str
    alphabet: Alphabet
    sequence: tuple

    @classmethod
    def default(cls, alphabet: Alphabet) -> "Order":
        return cls(f"{alphabet.name}.default", alphabet, alphabet.symbols)

    def rank(self) -> dict:
        return {s: i for i, s in enumerate(self.sequence)}


def evaluate_alphabet(expr: AlphabetExpression,
                      registry: Mapping[str, Union[Alphabet, AlphabetExpression]],
                      strict: bool = True) -> tuple:
    """Evaluate an alphabet expression to its ordered, duplicate-free symbol list.

    ``registry`` maps alphabet names to either alphabets or bare expressions.
    References are re-evaluated from their expressions so that cycles are
    reported instead of recursing forever.  With ``strict=False`` repeated
    symbols are dropped instead of raising ``DuplicateSymbol``.
    """
    out: list = []
    seen: set = set()

    def walk(e, visiting: tuple) -> None:
        if isinstance(e, AlphaLiteral):
            for s in e.symbols:
                if s in seen:
                    if not strict:
                        continue
                    raise DuplicateSymbol(f"symbol {s} occurs more than once")
                seen.add(s)
                out.append(s)
        elif isinstance(e, AlphaRef):
            if e.name in visiting:
                chain = " -> ".join(visiting + (e.name,))
                raise CyclicAlphabetReference(f"cyclic alphabet reference {chain}")
            if e.name not in registry:
                raise UnknownAlphabetReference(f"unknown alphabet {e.name}")
            target = registry[e.name]
            if isinstance(target, Alphabet):
                target = target.expression
            walk(target, visiting + (e.name,))
        elif isinstance(e, AlphaUnion):
            walk(e.left, visiting)
            walk(e.right, visiting)
        else:
            raise TypeError(f"not an alphabet expression: {e!r}")

    walk(expr, ())
    if not out and strict:
        raise AlphabetError("alphabet is empty")
    return tuple(out)


def check_order(order: Order, alphabet: Alphabet | None = None) -> None:
    alphabet = alphabet or order.alphabet
    seq = order.sequence
    if len(set(seq)) != len(seq) or set(seq) != set(alphabet.symbols) \
            or len(seq) != len(alphabet.symbols):
        raise OrderMismatch(
            f"order {order.name} is not a permutation of alphabet {alphabet.name}")


# -- word expressions -------------------------------------------------------

@dataclass(frozen=True)
class WordConcat:
    left: "WordExpression"
    right: "WordExpression"


@dataclass(frozen=True)
class WordPower:
    base: "WordExpression"
    exponent: int


WordExpression = Union[tuple, WordConcat, WordPower]


def compute_word(expr: WordExpression) -> Word:
    """Evaluate ``w1 * w2``, ``w ^ n`` (n >= 0) and ``w ^ (-1)`` (reverse)."""
    if isinstance(expr, WordConcat):
        return compute_word(expr.left) + compute_word(expr.right)
    if isinstance(expr, WordPower):
        base = compute_word(expr.base)
        if expr.exponent == -1:
            return base[::-1]
        if expr.exponent < 0:
            raise NegativePower(f"invalid exponent {expr.exponent}")
        return base * expr.exponent
    return tuple(expr)


# -- basic word predicates --------------------------------------------------

def occurs(symbol: Symbol, word: Sequence[Symbol]) -> int:
    return sum(1 for s in word if s == symbol)


def word_over_alphabet(word: Sequence[Symbol], alphabet: Alphabet | Sequence[Symbol]) -> bool:
    symbols = alphabet.symbols if isinstance(alphabet, Alphabet) else alphabet
    allowed = set(symbols)
    return all(s in allowed for s in word)


def format_word(word: Sequence[Symbol], sep: str = ",") -> str:
    return "[" + sep.join(word) + "]"


# -- orders -----------------------------------------------------------------

class Ordering(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


def _ranks(word: Sequence[Symbol], rank: dict) -> list:
    try:
        return [rank[s] for s in word]
    except KeyError as exc:
        raise ForeignSymbol(f"symbol {exc.args[0]} is not in the order") from None


def compare_words(w1, w2, order: Order, mode: str = "shortlex") -> Ordering:
    """Compare two words lexicographically (``lex``) or by length first (``shortlex``)."""
    rank = order.rank()
    r1, r2 = _ranks(w1, rank), _ranks(w2, rank)
    if mode == "shortlex":
        key1, key2 = (len(r1), r1), (len(r2), r2)
    elif mode == "lex":
        key1, key2 = r1, r2
    else:
        raise ValueError(f"unknown comparison mode {mode!r}")
    if key1 < key2:
        return Ordering.LESS
    if key1 > key2:
        return Ordering.GREATER
    return Ordering.EQUAL


def enumerate_words(alphabet: Alphabet, order: Order | None = None) -> Iterator[Word]:
    """Yield every word over ``alphabet`` in shortlex order.  Never ends."""
    order = order or Order.default(alphabet)
    check_order(order, alphabet)
    seq = order.sequence
    return itertools.chain.from_iterable(
        itertools.product(seq, repeat=n) for n in itertools.count())


def next_word(word, order: Order) -> Word:
    """Shortlex successor of ``word``, computed as an odometer increment."""
    rank = order.rank()
    digits = _ranks(word, rank)
    top = len(order.sequence) - 1
    i = len(digits) - 1
    while i >= 0 and digits[i] == top:
        digits[i] = 0
        i -= 1
    if i < 0:
        return (order.sequence[0],) * (len(word) + 1)
    digits[i] += 1
    return tuple(order.sequence[d] for d in digits)


# -- word patterns ----------------------------------------------------------

ANY = None  # wildcard slot


@dataclass(frozen=True)
class WordPattern:
    slots: tuple
    any_tail: bool = False

    def __str__(self) -> str:
        body = ",".join("_" if s is ANY else s for s in self.slots)
        if self.any_tail:
            return f"[{body}|_]" if body else "_"
        return f"[{body}]"


def pattern_matches(pattern: WordPattern, word: Sequence[Symbol]) -> bool:
    n = len(pattern.slots)
    if len(word) < n or (not pattern.any_tail and len(word) != n):
        return False
    return all(p is ANY or p == s for p, s in zip(pattern.slots, word))


def lexically_ordered_patterns(bound, order: Order) -> list:
    """Disjoint patterns whose union is every word lexicographically below ``bound``."""
    bound = tuple(bound)
    rank = order.rank()
    ranks = _ranks(bound, rank)
    patterns = [WordPattern(bound[:k]) for k in range(len(bound))]
    for i in reversed(range(len(bound))):
        for s in reversed(order.sequence[:ranks[i]]):
            patterns.append(WordPattern(bound[:i] + (s,), any_tail=True))
    return patterns


def mixed_ordered_patterns(bound, order: Order) -> list:
    """Disjoint patterns whose union is every word shortlex-below ``bound``."""
    bound = tuple(bound)
    rank = order.rank()
    ranks = _ranks(bound, rank)
    n = len(bound)
    patterns = [WordPattern((ANY,) * k) for k in range(n)]
    for i in reversed(range(n)):
        for s in reversed(order.sequence[:ranks[i]]):
            patterns.append(WordPattern(bound[:i] + (s,) + (ANY,) * (n - i - 1)))
    return patterns


# -- factors ----------------------------------------------------------------

def factors(word, kind: str = "subword") -> Iterator[Word]:
    """Yield prefixes, suffixes or subwords of ``word``.

    Subwords come out as the suffixes (longest first) of each prefix
    (shortest first), so the empty subword repeats once per prefix.
    """
    word = tuple(word)
    n = len(word)
    if kind == "prefix":
        for k in range(n + 1):
            yield word[:k]
    elif kind == "suffix":
        for k in range(n + 1):
            yield word[n - k:]
    elif kind == "subword":
        for end in range(n + 1):
            for start in range(end + 1):
                yield word[start:end]
    else:
        raise ValueError(f"unknown factor kind {kind!r}")
