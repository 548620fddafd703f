"""Mechanism conversions: regex to automaton, subset construction,
minimization, canonical renaming and context-free grammar normalization."""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass

from lflat.entities import (
    EPSILON, Concat, ContextFreeGrammar, EmptyWord, FATransition, FiniteAutomaton,
    Plus, RegularExpression, Rule, Star, Sym, Union_, is_nonterminal,
)


class NotDeterministic(ValueError):
    pass


def is_deterministic(fa: FiniteAutomaton) -> bool:
    seen = set()
    for t in fa.transitions:
        if t.symbol is EPSILON or (t.source, t.symbol) in seen:
            return False
        seen.add((t.source, t.symbol))
    return True


def _dedupe(items) -> tuple:
    return tuple(dict.fromkeys(items))


# -- Thompson construction --------------------------------------------------

def regex_to_fa(regex, name: str | None = None) -> FiniteAutomaton:
    """Thompson construction: one initial state with no incoming edges and
    one final state with no outgoing edges."""
    if isinstance(regex, RegularExpression):
        name = name or regex.name
        regex = regex.expression
    counter = itertools.count()
    transitions: list = []

    def fresh() -> str:
        return f"t{next(counter)}"

    def build(node) -> tuple:
        start, end = fresh(), fresh()
        if isinstance(node, Sym):
            transitions.append(FATransition(start, node.symbol, end))
        elif isinstance(node, EmptyWord):
            transitions.append(FATransition(start, EPSILON, end))
        elif isinstance(node, Union_):
            for part in (node.left, node.right):
                s, e = build(part)
                transitions.append(FATransition(start, EPSILON, s))
                transitions.append(FATransition(e, EPSILON, end))
        elif isinstance(node, Concat):
            s1, e1 = build(node.left)
            s2, e2 = build(node.right)
            transitions.append(FATransition(start, EPSILON, s1))
            transitions.append(FATransition(e1, EPSILON, s2))
            transitions.append(FATransition(e2, EPSILON, end))
        elif isinstance(node, Star):
            s, e = build(node.inner)
            transitions.append(FATransition(start, EPSILON, s))
            transitions.append(FATransition(start, EPSILON, end))
            transitions.append(FATransition(e, EPSILON, s))
            transitions.append(FATransition(e, EPSILON, end))
        elif isinstance(node, Plus):
            return build(Concat(node.inner, Star(node.inner)))
        else:
            raise TypeError(f"not a regex node: {node!r}")
        return start, end

    start, end = build(regex)
    return FiniteAutomaton(name or "fa", start, _dedupe(transitions), (end,))


# -- subset construction ----------------------------------------------------

def epsilon_closure(fa: FiniteAutomaton, states) -> frozenset:
    eps: dict = {}
    for t in fa.transitions:
        if t.symbol is EPSILON:
            eps.setdefault(t.source, []).append(t.target)
    closure = set(states)
    stack = list(states)
    while stack:
        for nxt in eps.get(stack.pop(), ()):
            if nxt not in closure:
                closure.add(nxt)
                stack.append(nxt)
    return frozenset(closure)


def _subset_name(subset, rank: dict) -> str:
    return "{" + ",".join(sorted(subset, key=rank.__getitem__)) + "}"


def determinize(fa: FiniteAutomaton) -> FiniteAutomaton:
    """Subset construction over epsilon closures; only reachable subsets."""
    rank = {s: i for i, s in enumerate(fa.states)}
    symbols = fa.symbols
    moves: dict = {}
    for t in fa.transitions:
        if t.symbol is not EPSILON:
            moves.setdefault((t.source, t.symbol), []).append(t.target)
    finals = set(fa.finals)

    start = epsilon_closure(fa, {fa.initial})
    seen = {start: _subset_name(start, rank)}
    queue = deque([start])
    transitions = []
    out_finals = []
    while queue:
        subset = queue.popleft()
        if subset & finals:
            out_finals.append(seen[subset])
        for a in symbols:
            step = {q for s in subset for q in moves.get((s, a), ())}
            if not step:
                continue
            target = epsilon_closure(fa, step)
            if target not in seen:
                seen[target] = _subset_name(target, rank)
                queue.append(target)
            transitions.append(FATransition(seen[subset], a, seen[target]))
    return FiniteAutomaton(fa.name, seen[start], tuple(transitions), tuple(out_finals))


# -- minimization -----------------------------------------------------------

@dataclass(frozen=True)
class StatePartition:
    blocks: tuple  # tuple of frozensets

    def block_of(self, state) -> int:
        for i, b in enumerate(self.blocks):
            if state in b:
                return i
        raise KeyError(state)


def _reachable(fa: FiniteAutomaton) -> list:
    adj: dict = {}
    for t in fa.transitions:
        adj.setdefault(t.source, []).append(t.target)
    seen = {fa.initial: None}
    queue = deque([fa.initial])
    while queue:
        for nxt in adj.get(queue.popleft(), ()):
            if nxt not in seen:
                seen[nxt] = None
                queue.append(nxt)
    return list(seen)


def refine(states, symbols, delta, finals) -> StatePartition:
    """Moore refinement: split blocks by the block of each successor until stable."""
    blocks = [b for b in (frozenset(s for s in states if s in finals),
                          frozenset(s for s in states if s not in finals)) if b]
    while True:
        where = {s: i for i, b in enumerate(blocks) for s in b}
        new_blocks = []
        for b in blocks:
            groups: dict = {}
            for s in sorted(b, key=states.index):
                sig = tuple(where[delta[s, a]] for a in symbols)
                groups.setdefault(sig, set()).add(s)
            new_blocks += [frozenset(g) for g in groups.values()]
        if len(new_blocks) == len(blocks):
            return StatePartition(tuple(new_blocks))
        blocks = new_blocks


TRAP = object()


def minimize(dfa: FiniteAutomaton) -> FiniteAutomaton:
    """Minimal partial DFA: drop unreachable states, complete with a trap,
    refine, merge, then delete the trap block."""
    if not is_deterministic(dfa):
        raise NotDeterministic(f"{dfa.name} is not deterministic")
    states = _reachable(dfa)
    live = set(states)
    symbols = dfa.symbols
    delta = {(s, a): TRAP for s in states + [TRAP] for a in symbols}
    for t in dfa.transitions:
        if t.source in live:
            delta[t.source, t.symbol] = t.target
    finals = set(dfa.finals) & live
    partition = refine(states + [TRAP], symbols, delta, finals)
    trap_block = partition.block_of(TRAP)

    rank = {s: i for i, s in enumerate(states)}

    def name(i: int) -> str:
        members = [s for s in partition.blocks[i] if s is not TRAP]
        return members[0] if len(members) == 1 else _subset_name(members, rank)

    init_block = partition.block_of(dfa.initial)
    blocks_in_order = _dedupe(partition.block_of(s) for s in states)
    transitions = []
    for i in blocks_in_order:
        if i == trap_block:
            continue
        rep = min((s for s in partition.blocks[i] if s is not TRAP), key=rank.__getitem__)
        for a in symbols:
            j = partition.block_of(delta[rep, a])
            if j != trap_block:
                transitions.append(FATransition(name(i), a, name(j)))
    out_finals = _dedupe(name(i) for i in blocks_in_order
                         if i != trap_block and partition.blocks[i] & finals)
    return FiniteAutomaton(dfa.name, name(init_block), tuple(transitions), out_finals)


# -- canonical renaming -----------------------------------------------------

def _token_key(sym: str):
    return (0, int(sym), "") if sym.isdigit() else (1, 0, sym)


def rename_canonical(fa: FiniteAutomaton, symbol_order=None) -> FiniteAutomaton:
    """Rename states s1, s2, ... in breadth-first discovery order.

    Symbols are explored in ``symbol_order`` when given, otherwise in token
    order; epsilon edges come first.  States never reached from the initial
    state keep their relative order after the reachable ones.
    """
    symbols = list(symbol_order) if symbol_order else sorted(fa.symbols, key=_token_key)
    for s in sorted(fa.symbols, key=_token_key):
        if s not in symbols:
            symbols.append(s)
    sym_rank = {EPSILON: -1, **{s: i for i, s in enumerate(symbols)}}

    out: dict = {}
    for t in fa.transitions:
        out.setdefault(t.source, []).append(t)
    for edges in out.values():
        edges.sort(key=lambda t: sym_rank[t.symbol])

    names = {fa.initial: "s1"}
    queue = deque([fa.initial])

    def visit(state):
        if state not in names:
            names[state] = f"s{len(names) + 1}"
            queue.append(state)

    while True:
        while queue:
            for t in out.get(queue.popleft(), ()):
                visit(t.target)
        rest = [s for s in fa.states if s not in names]
        if not rest:
            break
        visit(rest[0])

    transitions = sorted(
        _dedupe(FATransition(names[t.source], t.symbol, names[t.target]) for t in fa.transitions),
        key=lambda t: (int(t.source[1:]), sym_rank[t.symbol], int(t.target[1:])))
    finals = tuple(sorted((names[f] for f in _dedupe(fa.finals)), key=lambda n: int(n[1:])))
    return FiniteAutomaton(fa.name, "s1", tuple(transitions), finals)


# -- grammar normalization --------------------------------------------------

def nullable_nonterminals(g: ContextFreeGrammar) -> set:
    nullable: set = set()
    changed = True
    while changed:
        changed = False
        for r in g.rules:
            if r.head not in nullable and all(s in nullable for s in r.body):
                nullable.add(r.head)
                changed = True
    return nullable


def _fresh_nonterminal(g: ContextFreeGrammar, base: str) -> str:
    taken = set(g.nonterminals)
    for i in itertools.count():
        cand = f"{base}_{i}"
        if cand not in taken:
            return cand


def cfg_remove_lambda(g: ContextFreeGrammar) -> ContextFreeGrammar:
    """Quasi-lambda-free form: only a start symbol absent from every
    right-hand side may have an empty body."""
    nullable = nullable_nonterminals(g)
    rules = []
    for r in g.rules:
        spots = [i for i, s in enumerate(r.body) if s in nullable]
        for erase in itertools.product((False, True), repeat=len(spots)):
            dropped = {i for i, e in zip(spots, erase) if e}
            body = tuple(s for i, s in enumerate(r.body) if i not in dropped)
            if body:
                rules.append(Rule(r.head, body))
    start = g.start
    if g.start in nullable:
        on_rhs = any(g.start in r.body for r in g.rules)
        if on_rhs:
            start = _fresh_nonterminal(g, g.start)
            rules = [Rule(start, (g.start,)), Rule(start, ())] + rules
        else:
            rules.append(Rule(start, ()))
    return ContextFreeGrammar(g.name, start, _dedupe(rules))


def _is_unit(r: Rule) -> bool:
    return len(r.body) == 1 and is_nonterminal(r.body[0])


def cfg_remove_chains(g: ContextFreeGrammar) -> ContextFreeGrammar:
    """Replace unit rules A -> B by the non-unit rules of every B in A's chain set."""
    units: dict = {}
    for r in g.rules:
        if _is_unit(r):
            units.setdefault(r.head, []).append(r.body[0])
    own: dict = {}
    for r in g.rules:
        if not _is_unit(r):
            own.setdefault(r.head, []).append(r.body)
    rules = []
    for head in _dedupe(r.head for r in g.rules):
        chain = [head]
        for b in chain:
            for c in units.get(b, ()):
                if c not in chain:
                    chain.append(c)
        for b in chain:
            rules += [Rule(head, body) for body in own.get(b, ())]
    return ContextFreeGrammar(g.name, g.start, _dedupe(rules))


def cfg_normalize(g: ContextFreeGrammar) -> ContextFreeGrammar:
    return cfg_remove_chains(cfg_remove_lambda(g))


def is_normalized(g: ContextFreeGrammar) -> bool:
    for r in g.rules:
        if _is_unit(r):
            return False
        if not r.body:
            if r.head != g.start or any(g.start in q.body for q in g.rules):
                return False
    return True
