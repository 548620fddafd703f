"""Definition files (``.lf``): tokenizer, parser, linker and renderer.

Files hold a sequence of definitions::

    alphabet bits = [0 1]
    order up on bits = [0 1]
    language evenL { alphabet = [a b] positive = [] [a a] negative = [b] }
    re evenRE = (a + b * a^* * b)^*
    fa evenFA { initial = 1 transitions = [1/a/1 1/b/2 2/a/2 2/b/1] finals = [1] }
    cfg evenCFG { start = S rules = [S -> a S | b S b | S S | lambda] }
    pda evenPDA { initial = p stack = z transitions = [p/z/a/p/[z]] finals = [p] }
    tm evenTM { initial = q0 transitions = [q0/B/B/R/q1] finals = [q3] }
    predicate evenP { alphabet = [a b] acceptor = count_mod(b, 2, 0) }

``#`` starts a line comment; list items may be separated by whitespace or
commas; ``lambda`` spells the empty word and epsilon moves.  In grammars,
tokens starting with an uppercase letter are nonterminals.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

from lflat.core import (
    LAMBDA, AlphaLiteral, AlphaRef, AlphaUnion, Alphabet, AlphabetError,
    CyclicAlphabetReference, Order, UnknownAlphabetReference, WordConcat, WordPower,
    evaluate_alphabet,
)
from lflat.entities import (
    EPSILON, Concat, ContextFreeGrammar, EmptyWord, FATransition, FiniteAutomaton,
    Language, PDATransition, Plus, PredicateMechanism, PushdownAutomaton,
    RegularExpression, Rule, Star, Sym, TMTransition, TuringMachine, Union_,
    is_nonterminal, kind_of,
)

KEYWORDS = ("alphabet", "order", "language", "re", "fa", "cfg", "pda", "tm", "predicate")


class ParseError(Exception):
    def __init__(self, message: str, line: int = 1, column: int = 1, snippet: str = ""):
        super().__init__(message)
        self.message = message
        self.line = line
        self.column = column
        self.snippet = snippet

    def __str__(self) -> str:
        return f"line {self.line}, column {self.column}: {self.message}"

    def render(self) -> str:
        text = str(self)
        if self.snippet:
            text += f"\n  {self.snippet}\n  {' ' * (self.column - 1)}^"
        return text


class DefinitionErrors(Exception):
    """Raised by ``parse_file`` with every problem found in the input."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("\n".join(str(e) for e in self.errors))


@dataclass(frozen=True)
class Definition:
    kind: str
    name: str
    body: object
    span: tuple = field(default=((1, 1), (1, 1)), compare=False)


# -- tokens -----------------------------------------------------------------

class Token(NamedTuple):
    kind: str  # "name", "op" or "eof"
    value: str
    line: int
    column: int
    line_start: bool


_TOKEN_RE = re.compile(r"\s+|#[^\n]*|(?P<name>[A-Za-z0-9_]+)|(?P<op>->|[=\{\}\[\]\(\),/+*^|\-])")


class _Source:
    def __init__(self, text: str):
        self.text = text
        self.lines = text.split("\n")

    def snippet(self, line: int) -> str:
        return self.lines[line - 1] if 0 < line <= len(self.lines) else ""

    def error(self, message: str, line: int, column: int) -> ParseError:
        return ParseError(message, line, column, self.snippet(line))


def tokenize(text: str, source: _Source | None = None):
    """Return ``(tokens, errors)``; unknown characters become errors."""
    source = source or _Source(text)
    tokens: list = []
    errors: list = []
    line, line_pos = 1, 0
    pos = 0
    fresh_line = True
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            col = pos - line_pos + 1
            errors.append(source.error(f"unexpected character {text[pos]!r}", line, col))
            end = pos + 1
            chunk = text[pos:end]
        else:
            end = m.end()
            chunk = m.group(0)
            kind = m.lastgroup
            if kind:
                tokens.append(Token(kind, chunk, line, pos - line_pos + 1, fresh_line))
                fresh_line = False
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_pos = pos + chunk.rindex("\n") + 1
            fresh_line = True
        pos = end
    last = source.lines[-1]
    tokens.append(Token("eof", "", len(source.lines), len(last) + 1, True))
    return tokens, errors


# -- parser -----------------------------------------------------------------

class _Fail(Exception):
    pass


class _Parser:
    def __init__(self, text: str):
        self.source = _Source(text)
        self.tokens, self.errors = tokenize(text, self.source)
        self.pos = 0
        self.depth = 0

    # token helpers
    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.peek()
        if tok.kind != "eof":
            self.pos += 1
        if tok.value == "{":
            self.depth += 1
        elif tok.value == "}":
            self.depth -= 1
        return tok

    def at(self, value: str) -> bool:
        tok = self.peek()
        return tok.kind == "op" and tok.value == value

    def skip_commas(self) -> None:
        while self.at(","):
            self.advance()

    def fail(self, message: str, tok: Token | None = None):
        tok = tok or self.peek()
        self.errors.append(self.source.error(message, tok.line, tok.column))
        raise _Fail

    def expect(self, value: str, where: Token | None = None) -> Token:
        if not self.at(value):
            found = self.peek().value or "end of input"
            self.fail(f"expected '{value}' but found '{found}'", where)
        return self.advance()

    def name(self, what: str, after: Token | None = None) -> str:
        tok = self.peek()
        if tok.kind != "name":
            found = tok.value or "end of input"
            if after is not None:
                self.fail(f"expected {what} after '{after.value}' but found '{found}'", after)
            self.fail(f"expected {what} but found '{found}'")
        self.advance()
        return tok.value

    def symbol(self, what: str = "a symbol", after: Token | None = None) -> str:
        tok = self.peek()
        value = self.name(what, after)
        if value == LAMBDA:
            self.fail(f"'{LAMBDA}' is not allowed here", tok)
        return value

    # recovery
    def recover(self, start: int) -> None:
        while self.peek().kind != "eof":
            tok = self.peek()
            if (self.depth <= 0 and self.pos > start and tok.kind == "name"
                    and tok.value in KEYWORDS and tok.line_start):
                break
            self.advance()
            if tok.value == "}" and self.depth <= 0:
                break
        self.depth = 0

    # definitions
    def parse(self) -> list:
        defs = []
        while self.peek().kind != "eof":
            start = self.pos
            tok = self.peek()
            try:
                if tok.kind != "name" or tok.value not in KEYWORDS:
                    self.fail(f"unknown keyword '{tok.value}'")
                self.advance()
                name = self.name(f"a name for the {tok.value}")
                body = getattr(self, f"def_{tok.value}")(name)
                end = self.tokens[self.pos - 1]
                span = ((tok.line, tok.column), (end.line, end.column + len(end.value)))
                defs.append(Definition(tok.value, name, body, span))
            except _Fail:
                self.recover(start)
        return defs

    def def_alphabet(self, name):
        eq = self.expect("=")
        return ("alphabet", self.alpha_expr(eq))

    def alpha_expr(self, after):
        expr = self.alpha_term(after)
        while self.at("+"):
            plus = self.advance()
            expr = AlphaUnion(expr, self.alpha_term(plus))
        return expr

    def alpha_term(self, after):
        if self.at("["):
            return AlphaLiteral(self.symbol_list())
        return AlphaRef(self.name("an alphabet", after))

    def def_order(self, name):
        tok = self.peek()
        if self.name("'on'") != "on":
            self.fail("expected 'on'", tok)
        alphabet = self.name("an alphabet name")
        self.expect("=")
        return ("order", alphabet, self.symbol_list())

    def def_re(self, name):
        eq = self.expect("=")
        if self.peek().kind == "eof":
            self.fail("expected a regular expression after '='", eq)
        return RegularExpression(name, self.regex())

    def symbol_list(self, allow_lambda: bool = False) -> tuple:
        self.expect("[")
        items = []
        self.skip_commas()
        while not self.at("]"):
            if allow_lambda:
                items.append(self.name("a symbol"))
            else:
                items.append(self.symbol())
            self.skip_commas()
        self.advance()
        return tuple(items)

    def block(self, fields: dict, required: Iterable[str], repeatable=()) -> dict:
        """Parse ``{ key = value ... }`` using ``fields[key]()`` for values."""
        self.expect("{")
        values: dict = {}
        while not self.at("}"):
            tok = self.peek()
            key = self.name("a field name")
            if key not in fields:
                self.fail(f"unknown field '{key}'", tok)
            if key in values and key not in repeatable:
                self.fail(f"field '{key}' given twice", tok)
            eq = self.expect("=")
            value = fields[key](eq)
            if key in repeatable:
                values.setdefault(key, []).extend(value)
            else:
                values[key] = value
            self.skip_commas()
        close = self.peek()
        for key in required:
            if key not in values:
                self.fail(f"missing field '{key}'", close)
        self.advance()
        return values

    def alphabet_value(self, eq):
        if self.at("["):
            return self.symbol_list()
        return AlphaRef(self.name("an alphabet", eq))

    def words(self, eq):
        if not self.at("["):
            self.fail(f"expected a word after '{eq.value}'", eq)
        out = []
        while self.at("["):
            out.append(self.symbol_list())
            self.skip_commas()
        return out

    def def_language(self, name):
        values = self.block({"alphabet": self.alphabet_value,
                             "positive": self.words, "negative": self.words},
                            required=("alphabet",), repeatable=("positive", "negative"))
        return ("language", values["alphabet"], tuple(values.get("positive", ())),
                tuple(values.get("negative", ())))

    def state(self, eq):
        return self.name("a state name", eq)

    def transitions(self, parse_one):
        def parse(eq):
            self.expect("[", eq)
            out = []
            self.skip_commas()
            while not self.at("]"):
                out.append(parse_one())
                self.skip_commas()
            self.advance()
            return tuple(out)
        return parse

    def states(self, eq):
        if not self.at("["):
            self.fail(f"expected a state list after '{eq.value}'", eq)
        return self.symbol_list()

    def fa_transition(self):
        src = self.name("a state")
        slash = self.expect("/")
        sym = self.name("a symbol", slash)
        slash = self.expect("/")
        dst = self.name("a state", slash)
        return FATransition(src, EPSILON if sym == LAMBDA else sym, dst)

    def def_fa(self, name):
        values = self.block({"initial": self.state,
                             "transitions": self.transitions(self.fa_transition),
                             "finals": self.states}, required=("initial",))
        return FiniteAutomaton(name, values["initial"], values.get("transitions", ()),
                               values.get("finals", ()))

    def pda_transition(self):
        src = self.name("a state")
        slash = self.expect("/")
        pop = self.symbol("a stack symbol", slash)
        slash = self.expect("/")
        sym = self.name("an input symbol", slash)
        slash = self.expect("/")
        dst = self.name("a state", slash)
        self.expect("/")
        push = self.symbol_list()
        return PDATransition(src, pop, EPSILON if sym == LAMBDA else sym, dst, push)

    def def_pda(self, name):
        values = self.block({"initial": self.state,
                             "stack": lambda eq: self.name("a stack symbol", eq),
                             "transitions": self.transitions(self.pda_transition),
                             "finals": self.states}, required=("initial", "stack"))
        return PushdownAutomaton(name, values["initial"], values["stack"],
                                 values.get("transitions", ()), values.get("finals", ()))

    def tm_transition(self):
        src = self.name("a state")
        slash = self.expect("/")
        read = self.symbol("a tape symbol", slash)
        slash = self.expect("/")
        write = self.symbol("a tape symbol", slash)
        slash = self.expect("/")
        tok = self.peek()
        move = self.name("a move (L or R)", slash)
        if move not in ("L", "R"):
            self.fail(f"move must be L or R, not '{move}'", tok)
        slash = self.expect("/")
        dst = self.name("a state", slash)
        return TMTransition(src, read, write, move, dst)

    def def_tm(self, name):
        values = self.block({"initial": self.state,
                             "transitions": self.transitions(self.tm_transition),
                             "finals": self.states}, required=("initial",))
        return TuringMachine(name, values["initial"], values.get("transitions", ()),
                             values.get("finals", ()))

    def rules(self, eq):
        self.expect("[", eq)
        out = []
        self.skip_commas()
        while not self.at("]"):
            tok = self.peek()
            head = self.name("a nonterminal")
            if not is_nonterminal(head):
                self.fail(f"rule head '{head}' is not a nonterminal", tok)
            arrow = self.expect("->")
            while True:
                body = self.rule_body(arrow)
                out.append(Rule(head, body))
                if not self.at("|"):
                    break
                arrow = self.advance()
            self.skip_commas()
        self.advance()
        return tuple(out)

    def rule_body(self, after) -> tuple:
        body = []
        while True:
            self.skip_commas()
            tok = self.peek()
            if tok.kind != "name" or self.peek(1).value == "->":
                break
            body.append(self.advance().value)
        if not body:
            self.fail(f"expected a rule body after '{after.value}'", after)
        if body == [LAMBDA]:
            return ()
        if LAMBDA in body:
            self.fail(f"'{LAMBDA}' must be the whole body", after)
        return tuple(body)

    def def_cfg(self, name):
        values = self.block({"start": lambda eq: self.name("a start symbol", eq),
                             "rules": self.rules}, required=("start",))
        return ContextFreeGrammar(name, values["start"], values.get("rules", ()))

    def acceptor(self, eq):
        name = self.name("an acceptor name", eq)
        args = []
        if self.at("("):
            self.advance()
            self.skip_commas()
            while not self.at(")"):
                args.append(self.name("an acceptor argument"))
                self.skip_commas()
            self.advance()
        return name, tuple(args)

    def def_predicate(self, name):
        values = self.block({"alphabet": self.alphabet_value, "acceptor": self.acceptor},
                            required=("alphabet", "acceptor"))
        acceptor, args = values["acceptor"]
        return ("predicate", values["alphabet"], acceptor, args)

    # regular expressions: union < concatenation < postfix
    def regex(self):
        node = self.regex_concat()
        while self.at("+"):
            self.advance()
            node = Union_(node, self.regex_concat())
        return node

    def regex_concat(self):
        node = self.regex_postfix()
        while self.at("*"):
            self.advance()
            node = Concat(node, self.regex_postfix())
        return node

    def regex_postfix(self):
        node = self.regex_atom()
        while self.at("^") and self.peek(1).value in ("*", "+"):
            self.advance()
            op = self.advance().value
            node = Star(node) if op == "*" else Plus(node)
        return node

    def regex_atom(self):
        tok = self.peek()
        if self.at("("):
            self.advance()
            node = self.regex()
            self.expect(")")
            return node
        if tok.kind == "name":
            self.advance()
            return EmptyWord() if tok.value == LAMBDA else Sym(tok.value)
        found = tok.value or "end of input"
        self.fail(f"expected a symbol, 'lambda' or '(' but found '{found}'")

    # word expressions: w1 * w2, w ^ n, w ^ (-1)
    def word_expr(self):
        node = self.word_power()
        while self.at("*"):
            self.advance()
            node = WordConcat(node, self.word_power())
        return node

    def word_power(self):
        if self.at("("):
            self.advance()
            node = self.word_expr()
            self.expect(")")
        else:
            node = self.symbol_list()
        while self.at("^"):
            self.advance()
            node = WordPower(node, self.exponent())
        return node

    def exponent(self) -> int:
        paren = self.at("(")
        if paren:
            self.advance()
        negative = self.at("-")
        if negative:
            self.advance()
        tok = self.peek()
        digits = self.name("an exponent")
        if not digits.isdigit():
            self.fail(f"exponent must be an integer, not '{digits}'", tok)
        if paren:
            self.expect(")")
        return -int(digits) if negative else int(digits)

    def finish(self, what: str) -> None:
        if self.peek().kind != "eof":
            self.fail(f"unexpected '{self.peek().value}' after {what}")


# -- linking ----------------------------------------------------------------

def _link(defs: list, known: dict, source: _Source) -> tuple:
    errors: list = []
    registry: dict = {name: d.body for name, d in known.items()}
    raw_alphabets = {d.name: d.body[1] for d in defs if d.kind == "alphabet"}
    raw_alphabets.update({n: b.expression for n, b in registry.items() if isinstance(b, Alphabet)})
    seen: dict = dict(known)
    out = []

    def err(d: Definition, message: str):
        line, col = d.span[0]
        errors.append(source.error(message, line, col))

    def resolve_alpha(d, value) -> tuple | None:
        if isinstance(value, AlphaRef):
            target = registry.get(value.name)
            if not isinstance(target, Alphabet):
                err(d, f"undefined alphabet '{value.name}' in {d.name}")
                return None
            return target.symbols
        return value

    for d in defs:
        if d.name in seen:
            err(d, f"duplicate definition of '{d.name}'")
            continue
        seen[d.name] = d
        body = d.body
        if d.kind == "alphabet":
            expr = body[1]
            try:
                symbols = evaluate_alphabet(expr, raw_alphabets, strict=False)
            except (UnknownAlphabetReference, CyclicAlphabetReference) as exc:
                err(d, str(exc))
                continue
            except AlphabetError:
                symbols = ()
            body = Alphabet(d.name, expr, symbols)
        elif d.kind == "order":
            _, alpha_name, seq = body
            alphabet = registry.get(alpha_name)
            if not isinstance(alphabet, Alphabet):
                err(d, f"undefined alphabet '{alpha_name}' in order {d.name}")
                continue
            body = Order(d.name, alphabet, seq)
        elif d.kind == "language":
            _, alpha, pos, neg = body
            symbols = resolve_alpha(d, alpha)
            if symbols is None:
                continue
            body = Language(d.name, symbols, pos, neg)
        elif d.kind == "predicate":
            _, alpha, acceptor, args = body
            symbols = resolve_alpha(d, alpha)
            if symbols is None:
                continue
            body = PredicateMechanism(d.name, symbols, acceptor, args)
        registry[d.name] = body
        out.append(Definition(d.kind, d.name, body, d.span))
    return out, errors


def parse_file(text: str, known: Iterable[Definition] = ()) -> list:
    """Parse and link a definition file.

    ``known`` holds definitions from previously loaded files; they can be
    referenced but not redefined.  Raises ``DefinitionErrors`` listing every
    problem found.
    """
    parser = _Parser(text)
    defs = parser.parse()
    linked, link_errors = _link(defs, {d.name: d for d in known}, parser.source)
    errors = parser.errors + link_errors
    if errors:
        raise DefinitionErrors(sorted(errors, key=lambda e: (e.line, e.column)))
    return linked


def _parse_single(text: str, rule: str, what: str):
    parser = _Parser(text)
    try:
        if parser.errors:
            raise _Fail
        value = getattr(parser, rule)()
        parser.finish(what)
    except _Fail:
        raise parser.errors[0] from None
    return value


def parse_regex(text: str):
    return _parse_single(text, "regex", "the regular expression")


def parse_word(text: str) -> tuple:
    return _parse_single(text, "symbol_list", "the word")


def parse_word_expression(text: str):
    return _parse_single(text, "word_expr", "the word expression")


# -- rendering --------------------------------------------------------------

_PREC = {Union_: 1, Concat: 2, Star: 3, Plus: 3, Sym: 4, EmptyWord: 4}


def render_regex(node) -> str:
    def go(n, min_prec: int) -> str:
        prec = _PREC[type(n)]
        if isinstance(n, Sym):
            text = n.symbol
        elif isinstance(n, EmptyWord):
            text = LAMBDA
        elif isinstance(n, Union_):
            text = f"{go(n.left, 1)} + {go(n.right, 2)}"
        elif isinstance(n, Concat):
            text = f"{go(n.left, 2)} * {go(n.right, 3)}"
        elif isinstance(n, Star):
            text = f"{go(n.inner, 4)}^*"
        elif isinstance(n, Plus):
            text = f"{go(n.inner, 4)}^+"
        else:
            raise TypeError(n)
        return f"({text})" if prec < min_prec else text

    return go(node, 0)


def _list(items) -> str:
    return "[" + " ".join(items) + "]"


def _alpha_text(expr) -> str:
    if isinstance(expr, AlphaLiteral):
        return _list(expr.symbols)
    if isinstance(expr, AlphaRef):
        return expr.name
    return f"{_alpha_text(expr.left)} + {_alpha_text(expr.right)}"


def _sym(s) -> str:
    return LAMBDA if s is EPSILON else s


def render_entity(e) -> str:
    """Canonical DSL text for one entity."""
    kind = kind_of(e)
    if isinstance(e, Alphabet):
        return f"alphabet {e.name} = {_alpha_text(e.expression)}\n"
    if isinstance(e, Order):
        return f"order {e.name} on {e.alphabet.name} = {_list(e.sequence)}\n"
    if isinstance(e, RegularExpression):
        return f"re {e.name} = {render_regex(e.expression)}\n"
    lines = [f"{kind} {e.name} {{"]
    if isinstance(e, Language):
        lines.append(f"  alphabet = {_list(e.alphabet)}")
        lines += [f"  positive = {_list(w)}" for w in e.positives]
        lines += [f"  negative = {_list(w)}" for w in e.negatives]
    elif isinstance(e, FiniteAutomaton):
        lines.append(f"  initial = {e.initial}")
        lines.append("  transitions = [")
        lines += [f"    {t.source}/{_sym(t.symbol)}/{t.target}" for t in e.transitions]
        lines.append("  ]")
        lines.append(f"  finals = {_list(e.finals)}")
    elif isinstance(e, PushdownAutomaton):
        lines.append(f"  initial = {e.initial}")
        lines.append(f"  stack = {e.stack_start}")
        lines.append("  transitions = [")
        lines += [f"    {t.source}/{t.pop}/{_sym(t.symbol)}/{t.target}/{_list(t.push)}"
                  for t in e.transitions]
        lines.append("  ]")
        lines.append(f"  finals = {_list(e.finals)}")
    elif isinstance(e, TuringMachine):
        lines.append(f"  initial = {e.initial}")
        lines.append("  transitions = [")
        lines += [f"    {t.source}/{t.read}/{t.write}/{t.move}/{t.target}" for t in e.transitions]
        lines.append("  ]")
        lines.append(f"  finals = {_list(e.finals)}")
    elif isinstance(e, ContextFreeGrammar):
        lines.append(f"  start = {e.start}")
        lines.append("  rules = [")
        lines += [f"    {r.head} -> {' '.join(r.body) if r.body else LAMBDA}" for r in e.rules]
        lines.append("  ]")
    elif isinstance(e, PredicateMechanism):
        lines.append(f"  alphabet = {_list(e.alphabet)}")
        args = f"({', '.join(e.args)})" if e.args else ""
        lines.append(f"  acceptor = {e.acceptor}{args}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def render(d) -> str:
    return render_entity(d.body if isinstance(d, Definition) else d)
