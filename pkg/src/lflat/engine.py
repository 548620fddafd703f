"""Breadth-first configuration search shared by FA, PDA and TM mechanisms.

Every search keeps one global visited set, so a configuration reached twice
is expanded once.  The budget counts dequeued configurations; exhausting it
with a non-empty frontier yields ``Outcome.UNKNOWN``.
"""
from __future__ import annotations

import functools
import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple

from lflat.entities import (
    DEFAULT_BUDGET, EPSILON, FiniteAutomaton, Outcome, PushdownAutomaton,
    SearchBudget, TuringMachine,
)


class FAConfig(NamedTuple):
    state: str
    pos: int


class PDAConfig(NamedTuple):
    state: str
    pos: int
    stack: tuple  # top first


class TMConfig(NamedTuple):
    state: str
    head: int
    tape: tuple  # sorted (cell, symbol) pairs, blanks omitted

    def read(self, blank: str) -> str:
        for cell, sym in self.tape:
            if cell == self.head:
                return sym
        return blank


@dataclass
class SearchResult:
    outcome: Outcome
    path: list
    expanded: int
    visited: list = field(default_factory=list, repr=False)


@functools.lru_cache(maxsize=256)
def _index(machine) -> dict:
    table: dict = {}
    for t in machine.transitions:
        key = (t.source, t.pop) if isinstance(machine, PushdownAutomaton) else \
            (t.source, t.read) if isinstance(machine, TuringMachine) else t.source
        table.setdefault(key, []).append(t)
    return table


def initial_configuration(machine, word):
    if isinstance(machine, FiniteAutomaton):
        return FAConfig(machine.initial, 0)
    if isinstance(machine, PushdownAutomaton):
        return PDAConfig(machine.initial, 0, (machine.stack_start,))
    if isinstance(machine, TuringMachine):
        if machine.blank in word:
            raise ValueError("input word must not contain the blank symbol")
        return TMConfig(machine.initial, 0, tuple((i + 1, s) for i, s in enumerate(word)))
    raise TypeError(f"no configuration search for {type(machine).__name__}")


def _write(tape: tuple, cell: int, sym: str, blank: str) -> tuple:
    cells = dict(tape)
    if sym == blank:
        cells.pop(cell, None)
    else:
        cells[cell] = sym
    return tuple(sorted(cells.items()))


def successors(machine, config, word) -> list:
    """Configurations reachable in one step, in transition definition order."""
    out = []
    if isinstance(machine, FiniteAutomaton):
        nxt = word[config.pos] if config.pos < len(word) else None
        for t in _index(machine).get(config.state, ()):
            if t.symbol is EPSILON:
                out.append(FAConfig(t.target, config.pos))
            elif t.symbol == nxt:
                out.append(FAConfig(t.target, config.pos + 1))
    elif isinstance(machine, PushdownAutomaton):
        if not config.stack:
            return out
        nxt = word[config.pos] if config.pos < len(word) else None
        top, rest = config.stack[0], config.stack[1:]
        for t in _index(machine).get((config.state, top), ()):
            if t.symbol is EPSILON:
                out.append(PDAConfig(t.target, config.pos, t.push + rest))
            elif t.symbol == nxt:
                out.append(PDAConfig(t.target, config.pos + 1, t.push + rest))
    elif isinstance(machine, TuringMachine):
        read = config.read(machine.blank)
        for t in _index(machine).get((config.state, read), ()):
            head = config.head + (1 if t.move == "R" else -1)
            if head < 0:
                continue
            tape = _write(config.tape, config.head, t.write, machine.blank)
            out.append(TMConfig(t.target, head, tape))
    else:
        raise TypeError(f"no configuration search for {type(machine).__name__}")
    return out


def accepting(machine, config, word) -> bool:
    if isinstance(machine, TuringMachine):
        return config.state in machine.finals
    return config.state in machine.finals and config.pos == len(word)


def bfs_accept(machine, word, budget: SearchBudget = DEFAULT_BUDGET,
               keep_visited: bool = False) -> SearchResult:
    """Level-order search for an accepting configuration."""
    word = tuple(word)
    start = initial_configuration(machine, word)
    parent = {start: None}
    frontier = deque([start])
    expanded = 0
    last = start
    order = []

    def path_to(c):
        path = []
        while c is not None:
            path.append(c)
            c = parent[c]
        return path[::-1]

    while frontier:
        if expanded >= budget.max_configurations:
            return SearchResult(Outcome.UNKNOWN, path_to(last), expanded, order)
        config = frontier.popleft()
        expanded += 1
        last = config
        if keep_visited:
            order.append(config)
        if accepting(machine, config, word):
            return SearchResult(Outcome.ACCEPT, path_to(config), expanded, order)
        for nxt in successors(machine, config, word):
            if nxt not in parent:
                parent[nxt] = config
                frontier.append(nxt)
    return SearchResult(Outcome.REJECT, path_to(last), expanded, order)


class WordStream:
    """Iterator of generated words that remembers candidates it had to skip."""

    def __init__(self, source: Iterator):
        self._source = source
        self.skipped: list = []
        self.finished = False

    def __iter__(self):
        return self

    def __next__(self):
        try:
            return next(self._source)
        except StopIteration:
            self.finished = True
            raise

    @property
    def complete(self) -> bool:
        return self.finished and not self.skipped


def bfs_generate(machine, max_len: int, budget: SearchBudget = DEFAULT_BUDGET) -> WordStream:
    """Generate-and-filter over shortlex candidates up to ``max_len``."""
    if max_len < 0:
        raise ValueError("max_len must be non-negative")
    symbols = machine.symbols
    stream: WordStream

    def run():
        for n in range(max_len + 1):
            for word in itertools.product(symbols, repeat=n):
                outcome = bfs_accept(machine, word, budget).outcome
                if outcome is Outcome.ACCEPT:
                    yield word
                elif outcome is Outcome.UNKNOWN:
                    stream.skipped.append(word)

    stream = WordStream(run())
    return stream
