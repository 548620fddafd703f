import io
import subprocess
import sys

import pytest

from lflat import cli

SIGMA_STAR = """
fa allFA {
  initial = 0
  transitions = [0/a/0, 0/b/0]
  finals = [0]
}
"""

LOOP_TM = """
tm loopTM {
  initial = q0
  transitions = [q0/B/B/R/q0]
  finals = [q1]
}
"""


@pytest.fixture
def even(examples_dir):
    return str(examples_dir / "even.lf")


@pytest.fixture
def write(tmp_path):
    def make(name, text):
        path = tmp_path / name
        path.write_text(text)
        return str(path)
    return make


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


# -- check ------------------------------------------------------------------

@pytest.fixture
def tm_only(examples_dir, write):
    text = (examples_dir / "even.lf").read_text()
    return write("tm.lf", text[text.index("tm evenTM"):])


def test_check_tm_block(tm_only):
    code, out, _ = run("check", tm_only)
    lines = out.splitlines()
    assert code == 0
    assert len(lines) == 14
    assert lines[0] == "Starting diagnostics of evenTM ..." and lines[-1] == "... diagnostics finished"


def test_check_clean_fa(write):
    code, out, _ = run("check", write("fa.lf", "fa f { initial = 1 transitions = [1/a/1] finals = [1] }"))
    assert (code, out) == (0, "Starting diagnostics of f ...\n... diagnostics finished\n")


def test_check_parse_error(write):
    code, out, err = run("check", write("bad.lf", "fa bad { initial = }"))
    assert code == 2 and out == ""
    assert "line 1, column 18" in err


def test_check_error_diagnostic(write):
    code, out, _ = run("check", write("l.lf", "language l { alphabet = [a b] positive = [b] negative = [b] }"))
    assert code == 2
    assert "Error in l:\n  word [b] is both positive and negative\n" in out


def test_missing_file():
    code, _, err = run("check", "/nonexistent/file.lf")
    assert code == 2 and "cannot read" in err


# -- test -------------------------------------------------------------------

def test_test_all_pass(even):
    code, out, _ = run("test", "-f", even, "evenL", "evenRE")
    assert (code, out) == (0, "Starting tests of evenRE against evenL ...\n... tests finished\n")


def test_test_sigma_star(even, write):
    code, out, _ = run("test", "-f", even, "-f", write("all.lf", SIGMA_STAR), "evenL", "allFA")
    assert code == 1
    failures = [l for l in out.splitlines() if l.startswith("  negative test")]
    assert len(failures) == 5
    assert failures[0] == "  negative test [b] failed: expected rejected, got accepted"
    assert "  5 of 10 tests failed" in out.splitlines()


def test_test_unknown_name(even):
    code, _, err = run("test", "-f", even, "evenL", "nothing")
    assert code == 2 and "unknown entity nothing" in err


def test_test_wrong_kind(even):
    code, _, _ = run("test", "-f", even, "evenFA", "evenRE")
    assert code == 2


@pytest.mark.parametrize("name", ["evenP", "evenRE", "evenFA", "evenCFG", "evenPDA", "evenTM"])
def test_six_mechanisms_pass(even, name):
    assert run("test", "-f", even, "evenL", name)[0] == 0


def test_verbosity_monotone(even, write):
    extra = write("all.lf", SIGMA_STAR)
    outputs = {}
    for level in cli.VERBOSITIES:
        code, out, _ = run("test", "--verbosity", level, "-f", even, "-f", extra, "evenL", "allFA")
        assert code == 1
        outputs[level] = out.splitlines()
    assert set(outputs["silent"]) <= set(outputs["minimal"]) <= set(outputs["detailed"])
    assert outputs["silent"] == ["Starting tests of allFA against evenL ...", "... tests finished"]
    assert len(outputs["minimal"]) == 3 and len(outputs["detailed"]) == 8


def test_verbosity_env(even, write, monkeypatch):
    monkeypatch.setenv("LFLAT_VERBOSITY", "silent")
    _, out, _ = run("test", "-f", even, "-f", write("all.lf", SIGMA_STAR), "evenL", "allFA")
    assert len(out.splitlines()) == 2


# -- accept / trace ---------------------------------------------------------

@pytest.mark.parametrize("mech, word, text, code", [
    ("evenFA", "[]", "accepted\n", 0),
    ("evenPDA", "[b]", "rejected\n", 1),
    ("evenTM", "[a,b,b,a]", "accepted\n", 0),
    ("evenCFG", "[a a b]", "rejected\n", 1),
])
def test_accept(even, mech, word, text, code):
    assert run("accept", "-f", even, mech, word)[:2] == (code, text)


def test_accept_spaced_word_arguments(even):
    assert run("accept", "-f", even, "evenFA", "[b", "b]")[:2] == (0, "accepted\n")


def test_accept_unknown_outcome(write):
    code, out, _ = run("accept", "--budget", "10", "-f", write("loop.lf", LOOP_TM), "loopTM", "[]")
    assert (code, out) == (3, "unknown (budget exhausted)\n")


def test_budget_env(write, monkeypatch):
    monkeypatch.setenv("LFLAT_BUDGET", "10")
    assert run("accept", "-f", write("loop.lf", LOOP_TM), "loopTM", "[]")[0] == 3


def test_accept_bad_word(even):
    code, _, err = run("accept", "-f", even, "evenFA", "[a,")
    assert code == 2 and "bad word" in err


def test_trace_codes(even, write):
    assert run("trace", "-f", even, "evenFA", "[b]")[0] == 1
    assert run("trace", "--budget", "5", "-f", write("loop.lf", LOOP_TM), "loopTM", "[]")[0] == 3


# -- words ------------------------------------------------------------------

def test_words_even_re(even):
    code, out, _ = run("words", "-f", even, "evenRE", "--max-len", "2")
    assert code == 0
    lines = out.splitlines()
    assert sorted(lines) == sorted(["[]", "[a]", "[a,a]", "[b,b]"])
    assert [len(l) for l in lines] == sorted(len(l) for l in lines)


def test_words_count_zero(even):
    assert run("words", "-f", even, "evenFA", "--count", "0")[:2] == (0, "")


def test_words_count(even):
    _, out, _ = run("words", "-f", even, "evenFA", "--count", "3")
    assert out == "[]\n[a]\n[a,a]\n"


def test_words_even_fa(even):
    _, out, _ = run("words", "-f", even, "evenFA", "--max-len", "3")
    assert set(out.splitlines()) == {"[]", "[a]", "[a,a]", "[b,b]", "[a,a,a]", "[a,b,b]", "[b,a,b]", "[b,b,a]"}


# -- convert / show ---------------------------------------------------------

def test_convert_single_symbol(write):
    code, out, _ = run("convert", "-f", write("x.lf", "re x = a"), "x", "--to", "dfa")
    assert code == 0
    assert "  Deterministic: yes\n" in out
    assert out.count(" -> ") == 1


def test_convert_nfa_minimize_fails(even):
    code, _, err = run("convert", "-f", even, "evenRE", "--to", "nfa", "--minimize")
    assert code == 2 and err.startswith("error:")


def test_convert_nfa(even):
    code, out, _ = run("convert", "-f", even, "evenRE", "--to", "nfa")
    assert code == 0 and "  Deterministic: no\n" in out and "lambda" in out


def test_convert_wrong_kind(even):
    assert run("convert", "-f", even, "evenFA")[0] == 2


def test_show(even):
    code, out, _ = run("show", "-f", even, "evenFA")
    assert code == 0 and out.startswith("FINITE AUTOMATON:\n  fa(1, [1/a/1,1/b/2,2/a/2,2/b/1], [1])\n")


# -- grade ------------------------------------------------------------------

@pytest.fixture
def grading(examples_dir):
    return examples_dir / "grading"


def test_grade_kind_mismatch(grading, write):
    sub = write("sub.lf", "fa evenCFG { initial = 1 transitions = [1/a/1] finals = [1] }")
    code, out, _ = run("grade", "--language", str(grading / "evenL.lf"), "--kind", "cfg",
                       "--name", "evenCFG", "--submission", sub)
    assert code == 1
    assert out == ("Starting diagnostics of evenL ...\n... diagnostics finished\n"
                   "evenCFG is not well defined\nFinished checking\n")


def test_grade_unparseable(grading, write):
    code, out, _ = run("grade", "--language", str(grading / "evenL.lf"), "--kind", "cfg",
                       "--name", "evenCFG", "--submission", write("sub.lf", "cfg evenCFG { start = "))
    assert code == 1 and "evenCFG is not well defined\n" in out


def test_grade_deterministic(grading):
    argv = ("grade", "--language", str(grading / "evenL.lf"), "--kind", "cfg",
            "--name", "evenCFG", "--submission", str(grading / "evenCFG.lf"))
    assert run(*argv) == run(*argv)


def test_grade_missing_file(grading):
    code, _, _ = run("grade", "--language", "/nonexistent", "--kind", "cfg",
                     "--name", "evenCFG", "--submission", str(grading / "evenCFG.lf"))
    assert code == 2


def test_grade_tm_with_warnings_fails(grading, tm_only):
    code, out, _ = run("grade", "--language", str(grading / "evenL.lf"), "--kind", "tm",
                       "--name", "evenTM", "--submission", tm_only)
    assert code == 1
    assert "evenTM is well defined\n" in out
    assert "Warning in evenTM:" in out


def test_grade_is_well_defined_for_submission_with_siblings(grading, examples_dir):
    code, out, _ = run("grade", "--language", str(grading / "evenL.lf"), "--kind", "fa",
                       "--name", "evenFA", "--submission", str(examples_dir / "even.lf"))
    # the submission file redefines evenL, so it does not link against the language file
    assert "evenFA is not well defined\n" in out and code == 1


# -- REPL -------------------------------------------------------------------

def repl_session(even):
    s = cli.Session()
    s.load(even)
    return s


def test_repl_parity(even):
    s = repl_session(even)
    pairs = [
        ("accept evenFA [b,b]", ("accept", "-f", even, "evenFA", "[b,b]")),
        ("trace evenTM [a,b,b,a]", ("trace", "-f", even, "evenTM", "[a,b,b,a]")),
        ("test evenL evenPDA", ("test", "-f", even, "evenL", "evenPDA")),
        ("words evenRE 3", ("words", "-f", even, "evenRE", "--max-len", "3")),
        ("convert evenRE --minimize --rename", ("convert", "-f", even, "evenRE", "--minimize", "--rename")),
        ("show evenCFG", ("show", "-f", even, "evenCFG")),
        ("check", ("check", "-f", even)),
    ]
    for line, argv in pairs:
        out, err, code = cli.run_repl_line(s, line)
        assert err == "" and code is None
        assert out == run(*argv)[1], line


def test_repl_accept(even):
    out, _, _ = cli.run_repl_line(repl_session(even), "accept evenFA [b,b]")
    assert out == "accepted\n"


def test_repl_unknown_command_continues(even):
    s = repl_session(even)
    out, err, code = cli.run_repl_line(s, "frobnicate")
    assert out == "" and "unknown command" in err and code is None
    assert cli.run_repl_line(s, "accept nothing []")[1].startswith("error: unknown entity")


def test_repl_loop(even):
    stdin = io.StringIO("accept evenFA [b]\nbogus\nquit\naccept evenFA []\n")
    out, err = io.StringIO(), io.StringIO()
    assert cli.repl(repl_session(even), stdin, out, err) == 0
    assert out.getvalue() == "rejected\n"
    assert "unknown command" in err.getvalue()


def test_repl_load(even):
    s = cli.Session()
    assert cli.run_repl_line(s, f"load {even}") == ("", "", None)
    assert cli.run_repl_line(s, "accept evenRE [b,b]")[0] == "accepted\n"


def test_repl_via_run(even, monkeypatch):
    monkeypatch.setattr(sys, "stdin", io.StringIO("accept evenFA []\nquit\n"))
    code, out, _ = run("repl", even)
    assert (code, out) == (0, "accepted\n")


def test_console_script(even):
    proc = subprocess.run([sys.executable, "-m", "lflat.cli", "accept", "-f", even, "evenFA", "[a]"],
                          capture_output=True, text=True)
    assert (proc.returncode, proc.stdout) == (0, "accepted\n")


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as info:
        run("accept")
    assert info.value.code == 2
