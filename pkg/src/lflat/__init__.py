"""Formal languages and automata toolkit: alphabets, orders, languages with
unit tests, six mechanism kinds, conversions and a grader mode."""
from lflat.core import (
    Alphabet, Order, WordPattern, compare_words, compute_word, enumerate_words,
    evaluate_alphabet, factors, lexically_ordered_patterns, mixed_ordered_patterns,
    next_word, occurs, pattern_matches, word_over_alphabet,
)
from lflat.entities import (
    ContextFreeGrammar, FiniteAutomaton, Language, Outcome, PredicateMechanism,
    PushdownAutomaton, RegularExpression, SearchBudget, TuringMachine,
)
from lflat.mechanisms import (
    accepts, diagnostics, generate, is_deterministic, register_acceptor, render_trace,
    show, test_mechanism, trace,
)
from lflat.dsl import parse_file, parse_regex, parse_word, render

__version__ = "0.1.0"
