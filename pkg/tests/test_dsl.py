import random

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from lflat.core import AlphaRef, AlphaUnion, WordConcat, WordPower, compute_word
from lflat.dsl import (
    DefinitionErrors, ParseError, parse_file, parse_regex, parse_word,
    parse_word_expression, render, render_regex,
)
from lflat.entities import (
    Concat, EmptyWord, FiniteAutomaton, Language, Plus, PushdownAutomaton, Star,
    Sym, Union_,
)
from oracles import random_regex


def errors_of(text, known=()):
    with pytest.raises(DefinitionErrors) as info:
        parse_file(text, known)
    return info.value.errors


# -- parse_file -------------------------------------------------------------

def test_parse_even_fa(examples):
    m = examples["evenFA"]
    assert isinstance(m, FiniteAutomaton)
    assert m.initial == "1" and len(m.transitions) == 4 and m.finals == ("1",)


def test_parse_even_language(examples):
    lang = examples["evenL"]
    assert isinstance(lang, Language)
    assert len(lang.positives) == 5 and len(lang.negatives) == 5
    assert lang.positives[0] == ()


def test_parse_even_pda(examples):
    pda = examples["evenPDA"]
    assert isinstance(pda, PushdownAutomaton)
    assert pda.stack_start == "z" and all(t.push == ("z",) for t in pda.transitions)


def test_parse_order_and_union(examples):
    assert examples["up"].sequence == ("0", "1")
    assert examples["down"].alphabet.name == "bits"
    assert examples["decimal"].symbols == tuple("0123456789")
    assert isinstance(examples["decimal"].expression, AlphaUnion)
    assert examples["decimal"].expression.left == AlphaRef("bits")


def test_definitions_in_order(example_defs):
    assert [d.name for d in example_defs] == [
        "evenL", "evenP", "evenRE", "evenFA", "evenCFG", "evenPDA", "evenTM",
        "bits", "decimal", "up", "down"]
    assert example_defs[0].span[0] == (3, 1)


def test_bad_initial_points_at_equals():
    [e] = errors_of("fa bad { initial = }")
    assert (e.line, e.column) == (1, 18)
    assert e.snippet == "fa bad { initial = }"


def test_errors_are_collected():
    text = "fa one { initial = }\nwibble x\nfa two { initial = 1 transitions = [1/a] finals = [1] }\n"
    errs = errors_of(text)
    assert len(errs) >= 3
    assert [e.line for e in errs] == sorted(e.line for e in errs)
    assert {e.line for e in errs} == {1, 2, 3}


def test_duplicate_name():
    errs = errors_of("re x = a\nre x = b\n")
    assert len(errs) == 1 and "x" in errs[0].message and errs[0].line == 2


def test_unknown_alphabet_reference():
    [e] = errors_of("alphabet d = nope + [a]")
    assert "nope" in e.message


def test_cyclic_alphabets():
    assert errors_of("alphabet x = y\nalphabet y = x\n")


def test_order_unknown_alphabet():
    assert errors_of("order o on nowhere = [a]")


def test_known_definitions_cannot_be_redefined(example_defs):
    assert errors_of("re evenRE = a", example_defs)


def test_comments_and_commas():
    [d] = parse_file("# heading\nfa f { initial = 1, transitions = [1/a/1, 1/lambda/1] # tail\n finals = [1] }\n")
    assert d.body.transitions[1].symbol is None


def test_tm_invalid_move():
    errs = errors_of("tm t { initial = q transitions = [q/a/a/X/q] finals = [q] }")
    assert errs


def test_language_with_alphabet_name(example_defs):
    [d] = parse_file("language b { alphabet = bits positive = [0] negative = [] }", example_defs)
    assert d.body.alphabet == ("0", "1")


def test_cfg_lambda_and_alternatives():
    [d] = parse_file("cfg g { start = S rules = [ S -> a S b | lambda ] }")
    assert [r.body for r in d.body.rules] == [("a", "S", "b"), ()]


# -- parse_regex ------------------------------------------------------------

def test_regex_even_expression():
    assert parse_regex("(a + b * a^* * b)^*") == Star(
        Union_(Sym("a"), Concat(Concat(Sym("b"), Star(Sym("a"))), Sym("b"))))


def test_regex_lambda():
    assert parse_regex("lambda") == EmptyWord()


def test_regex_precedence():
    assert parse_regex("a + b * c") == Union_(Sym("a"), Concat(Sym("b"), Sym("c")))
    assert parse_regex("a * b^+") == Concat(Sym("a"), Plus(Sym("b")))
    assert parse_regex("a + b + c") == Union_(Union_(Sym("a"), Sym("b")), Sym("c"))


@pytest.mark.parametrize("text", ["", "a +", "(a", "a)", "^*", "a * * b"])
def test_regex_errors(text):
    with pytest.raises(ParseError):
        parse_regex(text)


def _corpus():
    rng = random.Random(7)
    exprs = [random_regex(rng, 4) for _ in range(44)]
    exprs += [parse_regex(t) for t in ("(a + b * a^* * b)^*", "a^*^+", "(a + b)^* * a", "lambda + a",
                                        "((a))", "a * (b * c)")]
    return exprs


def test_corpus_size():
    assert len(_corpus()) == 50


@pytest.mark.parametrize("expr", _corpus(), ids=render_regex)
def test_regex_render_inverse(expr):
    text = render_regex(expr)
    again = parse_regex(text)
    assert render_regex(again) == text
    # structure is equal up to associativity of the printed chain
    assert parse_regex(render_regex(again)) == again


def test_render_minimal_parentheses():
    assert render_regex(parse_regex("((a + (b * (a^*))) * b)")) == "(a + b * a^*) * b"


# -- words ------------------------------------------------------------------

def test_parse_word_forms():
    assert parse_word("[a,b,b,a]") == ("a", "b", "b", "a")
    assert parse_word("[a b b a]") == ("a", "b", "b", "a")
    assert parse_word("[]") == ()


@pytest.mark.parametrize("text", ["[a,", "a", "[a]]", "[[a]]"])
def test_parse_word_errors(text):
    with pytest.raises(ParseError):
        parse_word(text)


def test_word_expression():
    e = parse_word_expression("[0,1]^2*[1,1,0]^(-1)")
    assert isinstance(e, WordConcat) and isinstance(e.right, WordPower)
    assert compute_word(e) == tuple("0101011")


# -- render round trip ------------------------------------------------------

def test_round_trip_every_definition(example_defs):
    known = []
    for d in example_defs:
        text = render(d)
        [again] = parse_file(text, known)
        assert again == d, text
        known.append(d)


def test_round_trip_whole_file(example_defs):
    text = "\n".join(render(d) for d in example_defs)
    assert parse_file(text) == example_defs


def test_round_trip_empty_positive_language():
    [d] = parse_file("language e { alphabet = [a] negative = [a] }")
    assert d.body.positives == ()
    assert parse_file(render(d)) == [d]


# -- fuzzing ----------------------------------------------------------------

_pieces = st.sampled_from([
    "fa", "re", "cfg", "pda", "tm", "language", "alphabet", "order", "predicate", "on",
    "{", "}", "[", "]", "(", ")", "=", "->", "/", "+", "*", "^", "|", ",", "-", "#",
    "x", "S", "1", "lambda", "initial", "finals", "transitions", "rules", "start",
    " ", "\n", "\t", "é", "@",
])


def _check_positions(text):
    try:
        parse_file(text)
    except DefinitionErrors as exc:
        assert exc.errors
        lines = text.split("\n")
        for e in exc.errors:
            assert isinstance(e, ParseError)
            assert 1 <= e.line <= len(lines)
            assert 1 <= e.column <= len(lines[e.line - 1]) + 1


@settings(max_examples=300, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.lists(_pieces, max_size=40).map(" ".join))
def test_parser_total_on_token_soup(text):
    _check_positions(text)


@settings(max_examples=200, deadline=None)
@given(st.text(max_size=80))
def test_parser_total_on_text(text):
    _check_positions(text)


@settings(max_examples=100, deadline=None)
@given(st.text(max_size=30))
def test_regex_parser_total(text):
    try:
        parse_regex(text)
    except ParseError as e:
        assert e.line >= 1 and e.column >= 1
