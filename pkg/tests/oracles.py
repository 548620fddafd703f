"""Brute-force reference implementations used only by the tests.

None of these share code with the library paths they check.
"""
import itertools
import random

from lflat.entities import (
    Concat, ContextFreeGrammar, EmptyWord, FATransition, FiniteAutomaton, Plus,
    Rule, Star, Sym, Union_,
)


def all_words(symbols, max_len):
    for n in range(max_len + 1):
        yield from itertools.product(symbols, repeat=n)


# -- finite automata --------------------------------------------------------

def nfa_accepts(fa, word):
    """Set simulation with explicit epsilon closure."""
    def close(states):
        states = set(states)
        while True:
            extra = {t.target for t in fa.transitions
                     if t.symbol is None and t.source in states} - states
            if not extra:
                return states
            states |= extra

    current = close({fa.initial})
    for a in word:
        current = close({t.target for t in fa.transitions
                         if t.source in current and t.symbol == a})
    return bool(current & set(fa.finals))


def dfa_run(fa, state, word):
    table = {(t.source, t.symbol): t.target for t in fa.transitions}
    for a in word:
        state = table.get((state, a))
        if state is None:
            return False
    return state in fa.finals


def random_nfa(rng: random.Random, max_states=5, symbols=("a", "b"), epsilon=True):
    n = rng.randint(1, max_states)
    states = [str(i) for i in range(n)]
    labels = list(symbols) + ([None] if epsilon else [])
    transitions = []
    for _ in range(rng.randint(0, 2 * n + 2)):
        t = FATransition(rng.choice(states), rng.choice(labels), rng.choice(states))
        if t not in transitions:
            transitions.append(t)
    finals = tuple(s for s in states if rng.random() < 0.4)
    return FiniteAutomaton("rand", "0", tuple(transitions), finals)


# -- context-free grammars --------------------------------------------------

def _nonterminals(g):
    return {g.start} | {r.head for r in g.rules} | {
        s for r in g.rules for s in r.body if s[:1].isupper()}


def cfg_nullable(g):
    nullable = set()
    while True:
        new = {r.head for r in g.rules if all(s in nullable for s in r.body)}
        if new <= nullable:
            return nullable
        nullable |= new


def to_cnf(g):
    """Chomsky normal form (without the empty word) as (start, unary, binary).

    ``unary`` maps terminal -> heads, ``binary`` is a list of (head, B, C).
    Nonterminals of the result are tuples so they never clash with input names.
    """
    nts = _nonterminals(g)
    nullable = cfg_nullable(g)

    def nt(x):
        return ("N", x)

    # drop empty bodies by expanding nullable occurrences
    rules = set()
    for r in g.rules:
        choices = [((s,), ()) if s in nullable else ((s,),) for s in r.body]
        for pick in itertools.product(*choices):
            body = tuple(x for part in pick for x in part)
            if body:
                rules.add((nt(r.head), tuple(nt(s) if s in nts else s for s in body)))

    heads = {h for h, _ in rules} | {nt(g.start)}
    # unit closure
    unit = {h: {h} for h in heads}
    changed = True
    while changed:
        changed = False
        for h, body in rules:
            if len(body) == 1 and body[0] in heads:
                for a in heads:
                    if h in unit[a] and body[0] not in unit[a]:
                        unit[a].add(body[0])
                        changed = True
    plain = [(h, b) for h, b in rules if not (len(b) == 1 and b[0] in heads)]
    expanded = set()
    for a in heads:
        for h, b in plain:
            if h in unit[a]:
                expanded.add((a, b))

    unary: dict = {}
    binary = []
    fresh = itertools.count()
    for h, body in sorted(expanded, key=repr):
        if len(body) == 1:
            unary.setdefault(body[0], set()).add(h)
            continue
        syms = []
        for s in body:
            if isinstance(s, tuple):
                syms.append(s)
            else:
                t = ("T", s)
                unary.setdefault(s, set()).add(t)
                syms.append(t)
        left = h
        while len(syms) > 2:
            nxt = ("X", next(fresh))
            binary.append((left, syms[0], nxt))
            left, syms = nxt, syms[1:]
        binary.append((left, syms[0], syms[1]))
    return nt(g.start), unary, binary


def cyk_accepts(g, word):
    word = tuple(word)
    if not word:
        return g.start in cfg_nullable(g)
    start, unary, binary = to_cnf(g)
    n = len(word)
    table = [[set() for _ in range(n + 1)] for _ in range(n)]
    for i, a in enumerate(word):
        table[i][1] = set(unary.get(a, ()))
    for length in range(2, n + 1):
        for i in range(n - length + 1):
            cell = table[i][length]
            for split in range(1, length):
                left, right = table[i][split], table[i + split][length - split]
                if not left or not right:
                    continue
                for h, b, c in binary:
                    if b in left and c in right:
                        cell.add(h)
    return start in table[0][n]


def random_cfg(rng: random.Random):
    nts = ["S", "A", "B"]
    terms = ["a", "b"]
    rules = []
    for head in nts:
        for _ in range(rng.randint(1, 3)):
            body = tuple(rng.choice(nts + terms + terms) for _ in range(rng.randint(0, 3)))
            r = Rule(head, body)
            if r not in rules:
                rules.append(r)
    return ContextFreeGrammar("rand", "S", tuple(rules))


# -- regular expressions ----------------------------------------------------

def random_regex(rng, depth=3):
    if depth == 0 or rng.random() < 0.25:
        return rng.choice([Sym("a"), Sym("b"), EmptyWord()])
    kind = rng.choice(["union", "concat", "star", "plus"])
    if kind == "union":
        return Union_(random_regex(rng, depth - 1), random_regex(rng, depth - 1))
    if kind == "concat":
        return Concat(random_regex(rng, depth - 1), random_regex(rng, depth - 1))
    inner = random_regex(rng, depth - 1)
    return Star(inner) if kind == "star" else Plus(inner)
