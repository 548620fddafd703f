"""Recognition, generation, tracing, diagnostics and rendering for every
mechanism kind, plus the unit-test harness for languages."""
from __future__ import annotations

import functools
import itertools
import threading
from collections import deque
from typing import Callable, Iterator

from lflat import engine
from lflat.core import (
    Alphabet, AlphabetError, Order, OrderMismatch, check_order, evaluate_alphabet,
    format_word, occurs, word_over_alphabet,
)
from lflat.engine import WordStream
from lflat.entities import (
    DEFAULT_BUDGET, EPSILON, Concat, ContextFreeGrammar, Diagnostic, EmptyWord,
    FiniteAutomaton, Language, Outcome, Plus, PredicateMechanism, PushdownAutomaton,
    RegularExpression, SearchBudget, Star, Sym, TestReport, Trace, TuringMachine,
    Union_, is_nonterminal, kind_of,
)
from lflat.transform import cfg_normalize, is_deterministic  # noqa: F401  (re-export)


class UnresolvedAcceptor(LookupError):
    pass


class DuplicateAcceptorName(ValueError):
    pass


# -- acceptor registry ------------------------------------------------------

_ACCEPTORS: dict = {}
_REGISTRY_LOCK = threading.Lock()


def register_acceptor(name: str, fn: Callable[..., bool]) -> None:
    """Register ``fn(word, *args) -> bool`` under ``name`` for predicate mechanisms."""
    with _REGISTRY_LOCK:
        if name in _ACCEPTORS:
            raise DuplicateAcceptorName(f"acceptor {name} is already registered")
        _ACCEPTORS[name] = fn


def resolve_acceptor(name: str) -> Callable[..., bool]:
    try:
        return _ACCEPTORS[name]
    except KeyError:
        raise UnresolvedAcceptor(f"no acceptor named {name}") from None


def _count_mod(word, symbol, k, r) -> bool:
    return occurs(symbol, word) % int(k) == int(r) % int(k)


def _max_length(word, n) -> bool:
    return len(word) <= int(n)


register_acceptor("count_mod", _count_mod)
register_acceptor("max_length", _max_length)


# -- regex matching by derivatives ------------------------------------------

_EMPTYSET = None  # derivative of a regex that matches nothing


def _nullable(r) -> bool:
    if isinstance(r, (EmptyWord, Star)):
        return True
    if isinstance(r, Sym):
        return False
    if isinstance(r, Union_):
        return _nullable(r.left) or _nullable(r.right)
    if isinstance(r, Concat):
        return _nullable(r.left) and _nullable(r.right)
    if isinstance(r, Plus):
        return _nullable(r.inner)
    raise TypeError(r)


def _cat(a, b):
    if a is _EMPTYSET or b is _EMPTYSET:
        return _EMPTYSET
    if isinstance(a, EmptyWord):
        return b
    if isinstance(b, EmptyWord):
        return a
    return Concat(a, b)


def _alternatives(r) -> list:
    if isinstance(r, Union_):
        return _alternatives(r.left) + _alternatives(r.right)
    return [r]


def _alt(a, b):
    if a is _EMPTYSET:
        return b
    if b is _EMPTYSET or a == b:
        return a
    # flatten and drop repeated alternatives so derivatives stay finite
    parts = list(dict.fromkeys(_alternatives(a) + _alternatives(b)))
    out = parts[0]
    for p in parts[1:]:
        out = Union_(out, p)
    return out


@functools.lru_cache(maxsize=4096)
def _derive(r, a):
    if isinstance(r, Sym):
        return EmptyWord() if r.symbol == a else _EMPTYSET
    if isinstance(r, EmptyWord):
        return _EMPTYSET
    if isinstance(r, Union_):
        return _alt(_derive(r.left, a), _derive(r.right, a))
    if isinstance(r, Concat):
        d = _cat(_derive(r.left, a), r.right)
        return _alt(d, _derive(r.right, a)) if _nullable(r.left) else d
    if isinstance(r, Star):
        return _cat(_derive(r.inner, a), r)
    if isinstance(r, Plus):
        return _cat(_derive(r.inner, a), Star(r.inner))
    raise TypeError(r)


def regex_matches(r, word) -> bool:
    for a in word:
        r = _derive(r, a)
        if r is _EMPTYSET:
            return False
    return _nullable(r)


def _regex_derivatives(r, word) -> list:
    steps = [r]
    for a in word:
        r = _derive(r, a)
        steps.append(r)
        if r is _EMPTYSET:
            break
    return steps


# -- grammar recognition ----------------------------------------------------

@functools.lru_cache(maxsize=256)
def _normalized(g: ContextFreeGrammar) -> ContextFreeGrammar:
    return cfg_normalize(g)


def _cfg_search(g: ContextFreeGrammar, word) -> tuple:
    """Breadth-first leftmost derivations over the normalized grammar.

    Returns ``(accepted, path)`` where ``path`` is the list of sentential
    forms leading to the word (or to the last explored form).
    """
    word = tuple(word)
    n = len(word)
    g = _normalized(g)
    by_head: dict = {}
    for r in g.rules:
        by_head.setdefault(r.head, []).append(r.body)
    start = (g.start,)
    parent = {start: None}
    queue = deque([start])
    last = start

    def path_to(form):
        out = []
        while form is not None:
            out.append(form)
            form = parent[form]
        return out[::-1]

    def weight(form):
        return len(form), sum(1 for s in form if not is_nonterminal(s))

    while queue:
        form = queue.popleft()
        last = form
        i = next((k for k, s in enumerate(form) if is_nonterminal(s)), None)
        if i is None:
            if form == word:
                return True, path_to(form)
            continue
        for body in by_head.get(form[i], ()):
            nxt = form[:i] + body + form[i + 1:]
            if len(nxt) > n:
                continue
            j = next((k for k, s in enumerate(nxt) if is_nonterminal(s)), len(nxt))
            if nxt[:j] != word[:j]:
                continue
            # only the start symbol may vanish; every other step grows the form
            assert not nxt or weight(nxt) > weight(form)
            if nxt not in parent:
                parent[nxt] = form
                queue.append(nxt)
    return False, path_to(last)


# -- recognition ------------------------------------------------------------

def _fa_budget(fa: FiniteAutomaton, word, budget: SearchBudget) -> SearchBudget:
    # FA search is bounded by #states * (len + 1); never let the budget cut it
    bound = len(fa.states) * (len(word) + 1)
    if budget.max_configurations >= bound:
        return budget
    return SearchBudget(bound)


def accepts(m, word, budget: SearchBudget = DEFAULT_BUDGET) -> Outcome:
    """Decide membership of ``word``; only PDA and TM searches may return UNKNOWN."""
    word = tuple(word)
    if isinstance(m, PredicateMechanism):
        fn = resolve_acceptor(m.acceptor)
        if not word_over_alphabet(word, m.alphabet):
            return Outcome.REJECT
        return Outcome.ACCEPT if fn(word, *m.args) else Outcome.REJECT
    if isinstance(m, RegularExpression):
        return Outcome.ACCEPT if regex_matches(m.expression, word) else Outcome.REJECT
    if isinstance(m, ContextFreeGrammar):
        return Outcome.ACCEPT if _cfg_search(m, word)[0] else Outcome.REJECT
    if isinstance(m, FiniteAutomaton):
        return engine.bfs_accept(m, word, _fa_budget(m, word, budget)).outcome
    if isinstance(m, (PushdownAutomaton, TuringMachine)):
        if isinstance(m, TuringMachine) and m.blank in word:
            return Outcome.REJECT
        return engine.bfs_accept(m, word, budget).outcome
    raise TypeError(f"not a mechanism: {m!r}")


# -- generation -------------------------------------------------------------

def _regex_layers(r):
    """``layer(k)`` returns the words of length exactly ``k`` matched by ``r``."""

    @functools.lru_cache(maxsize=None)
    def layer(node, k: int) -> tuple:
        if isinstance(node, Sym):
            return ((node.symbol,),) if k == 1 else ()
        if isinstance(node, EmptyWord):
            return ((),) if k == 0 else ()
        if isinstance(node, Union_):
            return tuple(dict.fromkeys(layer(node.left, k) + layer(node.right, k)))
        if isinstance(node, Concat):
            out: dict = {}
            for j in range(k + 1):
                right = layer(node.right, k - j)
                if not right:
                    continue
                for u in layer(node.left, j):
                    for v in right:
                        out[u + v] = None
            return tuple(out)
        if isinstance(node, Plus):
            return layer(Concat(node.inner, Star(node.inner)), k)
        if isinstance(node, Star):
            if k == 0:
                return ((),)
            out = {}
            for j in range(1, k + 1):
                rest = layer(node, k - j)
                if not rest:
                    continue
                for u in layer(node.inner, j):
                    for v in rest:
                        out[u + v] = None
            return tuple(out)
        raise TypeError(node)

    return lambda k: layer(r, k)


def _cfg_layers(g: ContextFreeGrammar):
    g = _normalized(g)
    by_head: dict = {}
    for r in g.rules:
        by_head.setdefault(r.head, []).append(r.body)

    @functools.lru_cache(maxsize=None)
    def symbol_layer(sym: str, k: int) -> tuple:
        if not is_nonterminal(sym):
            return ((sym,),) if k == 1 else ()
        out: dict = {}
        for body in by_head.get(sym, ()):
            for w in body_layer(body, k):
                out[w] = None
        return tuple(out)

    @functools.lru_cache(maxsize=None)
    def body_layer(body: tuple, k: int) -> tuple:
        if not body:
            return ((),) if k == 0 else ()
        if len(body) == 1:
            return symbol_layer(body[0], k)
        out: dict = {}
        # every symbol of a non-empty normalized body derives at least one terminal
        for j in range(1, k - len(body) + 2):
            rest = body_layer(body[1:], k - j)
            if not rest:
                continue
            for u in symbol_layer(body[0], j):
                for v in rest:
                    out[u + v] = None
        return tuple(out)

    def layer(k: int) -> tuple:
        if k == 0:
            return ((),) if () in by_head.get(g.start, ()) else ()
        return symbol_layer(g.start, k)

    return layer


def generate(m, max_len: int, budget: SearchBudget = DEFAULT_BUDGET) -> WordStream:
    """Words of the language up to ``max_len``, shorter words first, no duplicates."""
    if max_len < 0:
        raise ValueError("max_len must be non-negative")
    if isinstance(m, (FiniteAutomaton, PushdownAutomaton, TuringMachine)):
        return engine.bfs_generate(m, max_len, budget)
    if isinstance(m, RegularExpression):
        layer = _regex_layers(m.expression)
    elif isinstance(m, ContextFreeGrammar):
        layer = _cfg_layers(m)
    elif isinstance(m, PredicateMechanism):
        resolve_acceptor(m.acceptor)

        def layer(k):
            return tuple(w for w in itertools.product(m.alphabet, repeat=k)
                         if accepts(m, w) is Outcome.ACCEPT)
    else:
        raise TypeError(f"not a mechanism: {m!r}")

    def run() -> Iterator:
        for k in range(max_len + 1):
            yield from layer(k)

    return WordStream(run())


# -- tracing ----------------------------------------------------------------

TRACE_TITLES = {
    "predicate": "PREDICATE",
    "re": "REGULAR EXPRESSION",
    "fa": "FINITE AUTOMATON",
    "cfg": "CONTEXT-FREE GRAMMAR",
    "pda": "PUSHDOWN AUTOMATON",
    "tm": "TURING MACHINE",
}


def render_tm_config(config, blank: str = "B") -> str:
    """Tape from cell 0 to one blank past the rightmost written cell, ``>``
    before the scanned cell, then a tab and the state."""
    cells = dict(config.tape)
    last = max(max(cells, default=0) + 1, config.head)
    parts = []
    for i in range(last + 1):
        parts.append((">" if i == config.head else " ") + cells.get(i, blank))
    return f"    {''.join(parts)}\t{config.state}"


def _fmt_list(items) -> str:
    return "[" + ", ".join(items) + "]"


def trace(m, word, budget: SearchBudget = DEFAULT_BUDGET) -> Trace:
    """Recognize ``word`` and keep the rendered configurations of a witness path."""
    word = tuple(word)
    kind = kind_of(m)
    if isinstance(m, (FiniteAutomaton, PushdownAutomaton, TuringMachine)):
        if isinstance(m, TuringMachine) and m.blank in word:
            return Trace(m.name, word, Outcome.REJECT, ("    blank symbol in input",), kind)
        eff = _fa_budget(m, word, budget) if isinstance(m, FiniteAutomaton) else budget
        result = engine.bfs_accept(m, word, eff)
        if isinstance(m, TuringMachine):
            steps = [render_tm_config(c, m.blank) for c in result.path]
        elif isinstance(m, FiniteAutomaton):
            steps = [f"    {c.state}\t{_fmt_list(word[c.pos:])}" for c in result.path]
        else:
            steps = [f"    {c.state}\t{_fmt_list(word[c.pos:])}\t{_fmt_list(c.stack)}"
                     for c in result.path]
        return Trace(m.name, word, result.outcome, tuple(steps), kind)
    if isinstance(m, ContextFreeGrammar):
        ok, path = _cfg_search(m, word)
        steps = [f"    {' '.join(form) if form else 'lambda'}" for form in path]
        return Trace(m.name, word, Outcome.ACCEPT if ok else Outcome.REJECT, tuple(steps), kind)
    if isinstance(m, RegularExpression):
        from lflat.dsl import render_regex
        derivs = _regex_derivatives(m.expression, word)
        steps = []
        for i, d in enumerate(derivs):
            text = "(nothing)" if d is _EMPTYSET else render_regex(d)
            steps.append(f"    {text}\t{_fmt_list(word[i:])}")
        outcome = accepts(m, word)
        return Trace(m.name, word, outcome, tuple(steps), kind)
    if isinstance(m, PredicateMechanism):
        outcome = accepts(m, word)
        args = ",".join(m.args)
        steps = (f"    {m.acceptor}({args}) on {_fmt_list(word)}: "
                 f"{'true' if outcome is Outcome.ACCEPT else 'false'}",)
        return Trace(m.name, word, outcome, steps, kind)
    raise TypeError(f"not a mechanism: {m!r}")


_VERDICTS = {
    Outcome.ACCEPT: ("  At least one execution path stops at an",
                     "  acceptance state.",
                     "  Word accepted."),
    Outcome.REJECT: ("  No execution path stops at an",
                     "  acceptance state.",
                     "  Word rejected."),
    Outcome.UNKNOWN: ("  The search budget was exhausted before any",
                      "  execution path stopped at an acceptance state.",
                      "  Word neither accepted nor rejected."),
}


def render_trace(t: Trace) -> str:
    lines = [f"TRACING {TRACE_TITLES[t.kind]}:",
             f"  Name: {t.mechanism}",
             f"  Traced word: {_fmt_list(t.word)}",
             *_VERDICTS[t.outcome],
             "  Traced steps:",
             *t.steps]
    return "\n".join(lines) + "\n"


# -- diagnostics ------------------------------------------------------------

def _graph_diagnostics(name, states, initial, edges, finals) -> list:
    fwd: dict = {}
    back: dict = {}
    for a, b in edges:
        fwd.setdefault(a, []).append(b)
        back.setdefault(b, []).append(a)

    def closure(seeds, adj):
        seen = set(seeds)
        stack = list(seeds)
        while stack:
            for nxt in adj.get(stack.pop(), ()):
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return seen

    reach = closure([initial], fwd)
    coreach = closure(list(finals), back)
    out = []
    for s in states:
        if s not in reach:
            out.append(Diagnostic("warning", name, f"state {s} is unreachable"))
    for s in states:
        if s not in coreach:
            out.append(Diagnostic("warning", name, f"no final state is reachable from state {s}"))
    return out


def diagnostics(entity, registry=None) -> list:
    """Problems found in an entity, in definition order.  Never raises.

    ``registry`` maps names to alphabets; it is only consulted for alphabet
    expressions that reference other alphabets.
    """
    try:
        return _diagnostics(entity, registry or {})
    except Exception as exc:  # diagnostics must not fail
        return [Diagnostic("error", getattr(entity, "name", "?"), f"internal error: {exc}")]


def _diagnostics(e, registry) -> list:
    out: list = []
    if isinstance(e, TuringMachine):
        defined = {(t.source, t.read) for t in e.transitions}
        for state in e.states:
            for sym in e.tape_symbols:
                if (state, sym) not in defined:
                    out.append(Diagnostic(
                        "warning", e.name, f"undefined transition for state/symbol {state}/{sym}"))
        for t in e.transitions:
            if t.move not in ("L", "R"):
                out.append(Diagnostic("error", e.name, f"invalid move {t.move}"))
    elif isinstance(e, (FiniteAutomaton, PushdownAutomaton)):
        edges = [(t.source, t.target) for t in e.transitions]
        out += _graph_diagnostics(e.name, e.states, e.initial, edges, e.finals)
    elif isinstance(e, ContextFreeGrammar):
        heads = {r.head for r in e.rules}
        if e.start not in heads:
            out.append(Diagnostic("error", e.name, f"start symbol {e.start} has no rules"))
        reach = {e.start}
        frontier = [e.start]
        while frontier:
            a = frontier.pop()
            for r in e.rules:
                if r.head == a:
                    for s in r.body:
                        if is_nonterminal(s) and s not in reach:
                            reach.add(s)
                            frontier.append(s)
        productive: set = set()
        changed = True
        while changed:
            changed = False
            for r in e.rules:
                if r.head not in productive and all(
                        not is_nonterminal(s) or s in productive for s in r.body):
                    productive.add(r.head)
                    changed = True
        for a in e.nonterminals:
            if a not in reach:
                out.append(Diagnostic("warning", e.name, f"nonterminal {a} is unreachable"))
        for a in e.nonterminals:
            if a not in productive:
                out.append(Diagnostic("warning", e.name, f"nonterminal {a} is non-productive"))
    elif isinstance(e, Language):
        pos = set(e.positives)
        for w in list(e.positives) + list(e.negatives):
            if not word_over_alphabet(w, e.alphabet):
                out.append(Diagnostic("error", e.name,
                                      f"test word {format_word(w)} is not over the alphabet"))
        for w in dict.fromkeys(e.negatives):
            if w in pos:
                out.append(Diagnostic("error", e.name,
                                      f"word {format_word(w)} is both positive and negative"))
    elif isinstance(e, Order):
        try:
            check_order(e)
        except OrderMismatch as exc:
            out.append(Diagnostic("error", e.name, str(exc)))
    elif isinstance(e, Alphabet):
        try:
            evaluate_alphabet(e.expression, {**registry, e.name: e})
        except AlphabetError as exc:
            out.append(Diagnostic("error", e.name, str(exc)))
    elif isinstance(e, PredicateMechanism):
        try:
            resolve_acceptor(e.acceptor)
        except UnresolvedAcceptor as exc:
            out.append(Diagnostic("error", e.name, str(exc)))
    return out


# -- rendering --------------------------------------------------------------

def _sym(s) -> str:
    return "lambda" if s is EPSILON else s


def _term_list(items) -> str:
    return "[" + ",".join(items) + "]"


def show(e) -> str:
    """Fixed-layout text block describing an entity."""
    from lflat.dsl import render_regex
    if isinstance(e, FiniteAutomaton):
        term = "/".join
        lines = ["FINITE AUTOMATON:",
                 f"  fa({e.initial}, "
                 f"{_term_list(term((t.source, _sym(t.symbol), t.target)) for t in e.transitions)}, "
                 f"{_term_list(e.finals)})",
                 f"  Initial state: {e.initial}",
                 "  Transitions:",
                 *(f"\t{t.source} - {_sym(t.symbol)} -> {t.target}" for t in e.transitions),
                 f"  Final states: {_term_list(e.finals)}",
                 f"  Deterministic: {'yes' if is_deterministic(e) else 'no'}"]
    elif isinstance(e, PushdownAutomaton):
        lines = ["PUSHDOWN AUTOMATON:",
                 f"  Name: {e.name}",
                 f"  Initial state: {e.initial}",
                 f"  Initial stack symbol: {e.stack_start}",
                 "  Transitions:",
                 *(f"\t{t.source} - {t.pop}/{_sym(t.symbol)} -> {t.target} {_term_list(t.push)}"
                   for t in e.transitions),
                 f"  Final states: {_term_list(e.finals)}"]
    elif isinstance(e, TuringMachine):
        lines = ["TURING MACHINE:",
                 f"  Name: {e.name}",
                 f"  Initial state: {e.initial}",
                 "  Transitions:",
                 *(f"\t{t.source} - {t.read}/{t.write}/{t.move} -> {t.target}"
                   for t in e.transitions),
                 f"  Final states: {_term_list(e.finals)}"]
    elif isinstance(e, ContextFreeGrammar):
        lines = ["CONTEXT-FREE GRAMMAR:",
                 f"  Name: {e.name}",
                 f"  Start symbol: {e.start}",
                 "  Rules:",
                 *(f"\t{r.head} -> {' '.join(r.body) if r.body else 'lambda'}" for r in e.rules)]
    elif isinstance(e, RegularExpression):
        lines = ["REGULAR EXPRESSION:",
                 f"  Name: {e.name}",
                 f"  Expression: {render_regex(e.expression)}"]
    elif isinstance(e, PredicateMechanism):
        lines = ["PREDICATE:",
                 f"  Name: {e.name}",
                 f"  Alphabet: {_term_list(e.alphabet)}",
                 f"  Acceptor: {e.acceptor}({','.join(e.args)})"]
    elif isinstance(e, Language):
        lines = ["LANGUAGE:",
                 f"  Name: {e.name}",
                 f"  Alphabet: {_term_list(e.alphabet)}",
                 "  Positive tests:",
                 *(f"\t{format_word(w)}" for w in e.positives),
                 "  Negative tests:",
                 *(f"\t{format_word(w)}" for w in e.negatives)]
    elif isinstance(e, Alphabet):
        lines = ["ALPHABET:",
                 f"  Name: {e.name}",
                 f"  Symbols: {_term_list(e.symbols)}"]
    elif isinstance(e, Order):
        lines = ["ORDER:",
                 f"  Name: {e.name}",
                 f"  Alphabet: {e.alphabet.name}",
                 f"  Sequence: {_term_list(e.sequence)}"]
    else:
        raise TypeError(f"cannot show {e!r}")
    return "\n".join(lines) + "\n"


# -- unit tests -------------------------------------------------------------

def test_mechanism(language: Language, m, budget: SearchBudget = DEFAULT_BUDGET) -> TestReport:
    report = TestReport()
    for w in language.positives:
        outcome = accepts(m, w, budget)
        (report.passed_positives if outcome is Outcome.ACCEPT
         else report.failed_positives).append((w, outcome))
    for w in language.negatives:
        outcome = accepts(m, w, budget)
        (report.passed_negatives if outcome is Outcome.REJECT
         else report.failed_negatives).append((w, outcome))
    return report


test_mechanism.__test__ = False
