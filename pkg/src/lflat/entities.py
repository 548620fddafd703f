"""Data types for languages and the six mechanism kinds."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Union

from lflat.core import BLANK, Alphabet, Order

EPSILON = None  # epsilon move / lambda input slot


def is_nonterminal(token: str) -> bool:
    return token[:1].isupper()


def _first_seen(items) -> tuple:
    return tuple(dict.fromkeys(items))


# -- languages --------------------------------------------------------------

@dataclass(frozen=True)
class Language:
    name: str
    alphabet: tuple
    positives: tuple = ()
    negatives: tuple = ()


# -- regular expressions ----------------------------------------------------

@dataclass(frozen=True)
class Sym:
    symbol: str


@dataclass(frozen=True)
class EmptyWord:
    pass


@dataclass(frozen=True)
class Union_:
    left: "Regex"
    right: "Regex"


@dataclass(frozen=True)
class Concat:
    left: "Regex"
    right: "Regex"


@dataclass(frozen=True)
class Star:
    inner: "Regex"


@dataclass(frozen=True)
class Plus:
    inner: "Regex"


RegexNode = Union[Sym, EmptyWord, Union_, Concat, Star, Plus]


def regex_symbols(node) -> tuple:
    """Symbols of a regex in order of first appearance."""
    out: list = []

    def walk(n):
        if isinstance(n, Sym):
            out.append(n.symbol)
        elif isinstance(n, (Union_, Concat)):
            walk(n.left)
            walk(n.right)
        elif isinstance(n, (Star, Plus)):
            walk(n.inner)

    walk(node)
    return _first_seen(out)


@dataclass(frozen=True)
class RegularExpression:
    name: str
    expression: RegexNode

    @property
    def symbols(self) -> tuple:
        return regex_symbols(self.expression)


# -- finite automata --------------------------------------------------------

class FATransition(NamedTuple):
    source: str
    symbol: Optional[str]
    target: str


@dataclass(frozen=True)
class FiniteAutomaton:
    name: str
    initial: str
    transitions: tuple
    finals: tuple

    @property
    def states(self) -> tuple:
        names = [self.initial]
        for t in self.transitions:
            names += [t.source, t.target]
        return _first_seen(names + list(self.finals))

    @property
    def symbols(self) -> tuple:
        return _first_seen(t.symbol for t in self.transitions if t.symbol is not EPSILON)


# -- context-free grammars --------------------------------------------------

class Rule(NamedTuple):
    head: str
    body: tuple


@dataclass(frozen=True)
class ContextFreeGrammar:
    name: str
    start: str
    rules: tuple

    @property
    def nonterminals(self) -> tuple:
        names = [self.start]
        for r in self.rules:
            names.append(r.head)
            names += [s for s in r.body if is_nonterminal(s)]
        return _first_seen(names)

    @property
    def terminals(self) -> tuple:
        return _first_seen(s for r in self.rules for s in r.body if not is_nonterminal(s))

    @property
    def symbols(self) -> tuple:
        return self.terminals


# -- pushdown automata ------------------------------------------------------

class PDATransition(NamedTuple):
    source: str
    pop: str
    symbol: Optional[str]
    target: str
    push: tuple


@dataclass(frozen=True)
class PushdownAutomaton:
    name: str
    initial: str
    stack_start: str
    transitions: tuple
    finals: tuple

    @property
    def states(self) -> tuple:
        names = [self.initial]
        for t in self.transitions:
            names += [t.source, t.target]
        return _first_seen(names + list(self.finals))

    @property
    def symbols(self) -> tuple:
        return _first_seen(t.symbol for t in self.transitions if t.symbol is not EPSILON)


# -- Turing machines --------------------------------------------------------

class TMTransition(NamedTuple):
    source: str
    read: str
    write: str
    move: str
    target: str


@dataclass(frozen=True)
class TuringMachine:
    name: str
    initial: str
    transitions: tuple
    finals: tuple
    blank: str = BLANK

    @property
    def states(self) -> tuple:
        names = [self.initial]
        for t in self.transitions:
            names += [t.source, t.target]
        return _first_seen(names + list(self.finals))

    @property
    def symbols(self) -> tuple:
        """Non-blank symbols read by some transition: the input universe."""
        return _first_seen(t.read for t in self.transitions if t.read != self.blank)

    @property
    def tape_symbols(self) -> tuple:
        syms = []
        for t in self.transitions:
            syms += [t.read, t.write]
        return _first_seen(s for s in syms if s != self.blank)


# -- predicates -------------------------------------------------------------

@dataclass(frozen=True)
class PredicateMechanism:
    name: str
    alphabet: tuple
    acceptor: str
    args: tuple = ()

    @property
    def symbols(self) -> tuple:
        return self.alphabet


Mechanism = Union[PredicateMechanism, RegularExpression, FiniteAutomaton,
                  ContextFreeGrammar, PushdownAutomaton, TuringMachine]
Entity = Union[Mechanism, Language, Alphabet, Order]

KIND_NAMES = {
    Alphabet: "alphabet",
    Order: "order",
    Language: "language",
    RegularExpression: "re",
    FiniteAutomaton: "fa",
    ContextFreeGrammar: "cfg",
    PushdownAutomaton: "pda",
    TuringMachine: "tm",
    PredicateMechanism: "predicate",
}


def kind_of(entity) -> str:
    return KIND_NAMES[type(entity)]


# -- results ----------------------------------------------------------------

class Outcome(enum.Enum):
    ACCEPT = "accepted"
    REJECT = "rejected"
    UNKNOWN = "unknown (budget exhausted)"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class SearchBudget:
    max_configurations: int = 100_000

    def __post_init__(self):
        if self.max_configurations < 1:
            raise ValueError("budget must allow at least one configuration")


DEFAULT_BUDGET = SearchBudget()


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "warning" | "error"
    entity: str
    message: str

    def render(self) -> str:
        return f"{self.severity.capitalize()} in {self.entity}:\n  {self.message}"


@dataclass(frozen=True)
class Trace:
    mechanism: str
    word: tuple
    outcome: Outcome
    steps: tuple
    kind: str = ""


@dataclass
class TestReport:
    passed_positives: list = field(default_factory=list)
    failed_positives: list = field(default_factory=list)
    passed_negatives: list = field(default_factory=list)
    failed_negatives: list = field(default_factory=list)

    __test__ = False  # keep pytest from collecting this class

    @property
    def failures(self) -> int:
        return len(self.failed_positives) + len(self.failed_negatives)

    @property
    def total(self) -> int:
        return (len(self.passed_positives) + len(self.failed_positives)
                + len(self.passed_negatives) + len(self.failed_negatives))

    @property
    def ok(self) -> bool:
        return self.failures == 0
