"""The ``lflat`` command line: subcommands, the REPL and the grader mode.

Exit codes: 0 success/accepted, 1 tests failed/rejected, 2 usage or
definition error, 3 unknown outcome (search budget exhausted).
"""
from __future__ import annotations

import argparse
import os
import shlex
import sys
from dataclasses import dataclass, field
from pathlib import Path

from lflat import dsl, mechanisms, transform
from lflat.core import format_word
from lflat.entities import (
    DEFAULT_BUDGET, Language, Outcome, RegularExpression, SearchBudget, kind_of,
)

VERBOSITIES = ("silent", "minimal", "detailed")
MECHANISM_KINDS = ("predicate", "re", "fa", "cfg", "pda", "tm")
EXIT_CODES = {Outcome.ACCEPT: 0, Outcome.REJECT: 1, Outcome.UNKNOWN: 3}


class CommandError(Exception):
    """A usage or definition problem; reported on stderr with exit code 2."""


@dataclass
class Session:
    definitions: list = field(default_factory=list)
    verbosity: str = "detailed"
    budget: SearchBudget = DEFAULT_BUDGET

    @property
    def registry(self) -> dict:
        return {d.name: d.body for d in self.definitions}

    def load_text(self, text: str, origin: str = "<input>") -> None:
        try:
            self.definitions += dsl.parse_file(text, known=self.definitions)
        except dsl.DefinitionErrors as exc:
            raise CommandError("\n".join(f"{origin}:{e.render()}" for e in exc.errors)) from None

    def load(self, path) -> None:
        try:
            text = Path(path).read_bytes().decode("utf-8", errors="replace")
        except OSError as exc:
            raise CommandError(f"cannot read {path}: {exc.strerror}") from None
        self.load_text(text, str(path))

    def lookup(self, name: str, kinds=None):
        entity = self.registry.get(name)
        if entity is None:
            raise CommandError(f"unknown entity {name}")
        if kinds and kind_of(entity) not in kinds:
            raise CommandError(f"{name} is a {kind_of(entity)}, expected {' or '.join(kinds)}")
        return entity


# -- command bodies: each returns (text, exit code) -------------------------

def diagnostics_block(entity, session: Session) -> tuple:
    diags = mechanisms.diagnostics(entity, session.registry)
    lines = [f"Starting diagnostics of {entity.name} ..."]
    if session.verbosity != "silent":
        lines += [d.render() for d in diags]
    lines.append("... diagnostics finished")
    has_errors = any(d.severity == "error" for d in diags)
    return "\n".join(lines) + "\n", has_errors


def cmd_check(session: Session) -> tuple:
    out = []
    failed = False
    for d in session.definitions:
        text, errors = diagnostics_block(d.body, session)
        out.append(text)
        failed |= errors
    return "".join(out), 2 if failed else 0


def tests_block(language: Language, mechanism, session: Session) -> tuple:
    report = mechanisms.test_mechanism(language, mechanism, session.budget)
    lines = [f"Starting tests of {mechanism.name} against {language.name} ..."]
    if session.verbosity == "detailed":
        for w, outcome in report.failed_positives:
            lines.append(f"  positive test {format_word(w)} failed: expected accepted, got {outcome}")
        for w, outcome in report.failed_negatives:
            lines.append(f"  negative test {format_word(w)} failed: expected rejected, got {outcome}")
    if session.verbosity != "silent" and report.failures:
        lines.append(f"  {report.failures} of {report.total} tests failed")
    lines.append("... tests finished")
    return "\n".join(lines) + "\n", report


def cmd_test(session: Session, language: str, mechanism: str) -> tuple:
    lang = session.lookup(language, ("language",))
    mech = session.lookup(mechanism, MECHANISM_KINDS)
    text, report = tests_block(lang, mech, session)
    return text, 0 if report.ok else 1


def _word(text: str) -> tuple:
    try:
        return dsl.parse_word(text)
    except dsl.ParseError as exc:
        raise CommandError(f"bad word {text!r}: {exc}") from None


def cmd_accept(session: Session, mechanism: str, word: str) -> tuple:
    mech = session.lookup(mechanism, MECHANISM_KINDS)
    try:
        outcome = mechanisms.accepts(mech, _word(word), session.budget)
    except mechanisms.UnresolvedAcceptor as exc:
        raise CommandError(str(exc)) from None
    return f"{outcome}\n", EXIT_CODES[outcome]


def cmd_trace(session: Session, mechanism: str, word: str) -> tuple:
    mech = session.lookup(mechanism, MECHANISM_KINDS)
    try:
        t = mechanisms.trace(mech, _word(word), session.budget)
    except mechanisms.UnresolvedAcceptor as exc:
        raise CommandError(str(exc)) from None
    return mechanisms.render_trace(t), EXIT_CODES[t.outcome]


def cmd_words(session: Session, mechanism: str, max_len: int | None = None,
              count: int | None = None) -> tuple:
    mech = session.lookup(mechanism, MECHANISM_KINDS)
    if max_len is None:
        max_len = 10 if count is not None else 5
    if max_len < 0 or (count is not None and count < 0):
        raise CommandError("lengths and counts must be non-negative")
    lines = []
    try:
        for w in mechanisms.generate(mech, max_len, session.budget):
            if count is not None and len(lines) >= count:
                break
            lines.append(format_word(w))
    except mechanisms.UnresolvedAcceptor as exc:
        raise CommandError(str(exc)) from None
    return "".join(line + "\n" for line in lines), 0


def cmd_convert(session: Session, name: str, to: str = "dfa", minimize: bool = False,
                rename: bool = False) -> tuple:
    regex = session.lookup(name, ("re",))
    fa = transform.regex_to_fa(regex)
    if to == "dfa":
        fa = transform.determinize(fa)
    try:
        if minimize:
            fa = transform.minimize(fa)
    except transform.NotDeterministic as exc:
        raise CommandError(str(exc)) from None
    if rename:
        fa = transform.rename_canonical(fa, regex.symbols)
    return mechanisms.show(fa), 0


def cmd_show(session: Session, name: str) -> tuple:
    return mechanisms.show(session.lookup(name)), 0


# -- grader -----------------------------------------------------------------

def expected_transcript(language: str, name: str) -> str:
    return (f"Starting diagnostics of {language} ...\n"
            "... diagnostics finished\n"
            f"{name} is well defined\n"
            f"Starting diagnostics of {name} ...\n"
            "... diagnostics finished\n"
            f"Starting tests of {name} against {language} ...\n"
            "... tests finished\n"
            "Finished checking\n")


def grade(language_text: str, submission_text: str, kind: str, name: str,
          budget: SearchBudget = DEFAULT_BUDGET) -> tuple:
    """Check a submitted mechanism against a language file.

    The language file is trusted: problems in it raise ``CommandError``.
    Returns the transcript and exit code 0 exactly when the transcript is
    the all-pass one.
    """
    session = Session(verbosity="minimal", budget=budget)
    session.load_text(language_text, "language")
    languages = [d.body for d in session.definitions if isinstance(d.body, Language)]
    if not languages:
        raise CommandError("the language file defines no language")
    language = languages[0]

    out = []
    text, _ = diagnostics_block(language, session)
    out.append(text)

    entity = None
    well_defined = False
    try:
        submitted = dsl.parse_file(submission_text, known=session.definitions)
    except dsl.DefinitionErrors:
        submitted = []
    for d in submitted:
        if d.name == name and d.kind == kind:
            entity = d.body
    if entity is not None:
        session.definitions += submitted
        diags = mechanisms.diagnostics(entity, session.registry)
        well_defined = not any(d.severity == "error" for d in diags)
    out.append(f"{name} is {'well' if well_defined else 'not well'} defined\n")

    if entity is not None:
        text, _ = diagnostics_block(entity, session)
        out.append(text)
        try:
            text, _ = tests_block(language, entity, session)
        except mechanisms.UnresolvedAcceptor as exc:
            text = (f"Starting tests of {name} against {language.name} ...\n"
                    f"  {exc}\n... tests finished\n")
        out.append(text)
    out.append("Finished checking\n")
    transcript = "".join(out)
    return transcript, 0 if transcript == expected_transcript(language.name, name) else 1


def _read(path) -> str:
    try:
        return Path(path).read_bytes().decode("utf-8", errors="replace")
    except OSError as exc:
        raise CommandError(f"cannot read {path}: {exc.strerror}") from None


# -- REPL -------------------------------------------------------------------

REPL_HELP = """commands:
  check                      diagnostics for every loaded entity
  test LANGUAGE MECHANISM    run a language's unit tests
  accept MECHANISM WORD      recognize a word, e.g. accept evenFA [a,b,b]
  trace MECHANISM WORD       trace the recognition of a word
  words MECHANISM N          words of length up to N
  convert RE [--to nfa|dfa] [--minimize] [--rename]
  show ENTITY                print an entity
  load FILE                  load a definition file
  quit
"""


def run_repl_line(session: Session, line: str) -> tuple:
    """Execute one REPL line; returns (stdout text, stderr text, exit code or None)."""
    try:
        args = shlex.split(line, comments=True)
    except ValueError as exc:
        return "", f"error: {exc}\n", None
    if not args:
        return "", "", None
    cmd, rest = args[0], args[1:]
    try:
        if cmd in ("quit", "exit"):
            return "", "", 0
        if cmd == "help":
            return REPL_HELP, "", None
        if cmd == "check" and not rest:
            return cmd_check(session)[0], "", None
        if cmd == "test" and len(rest) == 2:
            return cmd_test(session, *rest)[0], "", None
        if cmd in ("accept", "trace") and len(rest) >= 2:
            fn = cmd_accept if cmd == "accept" else cmd_trace
            return fn(session, rest[0], " ".join(rest[1:]))[0], "", None
        if cmd == "words" and len(rest) == 2 and rest[1].isdigit():
            return cmd_words(session, rest[0], max_len=int(rest[1]))[0], "", None
        if cmd == "convert" and rest:
            p = argparse.ArgumentParser(prog="convert", add_help=False, exit_on_error=False)
            p.add_argument("name")
            p.add_argument("--to", choices=("nfa", "dfa"), default="dfa")
            p.add_argument("--minimize", action="store_true")
            p.add_argument("--rename", action="store_true")
            try:
                ns = p.parse_args(rest)
            except (argparse.ArgumentError, SystemExit):
                return "", "error: usage: convert RE [--to nfa|dfa] [--minimize] [--rename]\n", None
            return cmd_convert(session, ns.name, ns.to, ns.minimize, ns.rename)[0], "", None
        if cmd == "show" and len(rest) == 1:
            return cmd_show(session, rest[0])[0], "", None
        if cmd == "load" and len(rest) == 1:
            session.load(rest[0])
            return "", "", None
    except CommandError as exc:
        return "", f"error: {exc}\n", None
    return "", f"error: unknown command: {line.strip()} (try 'help')\n", None


def repl(session: Session, stdin=None, stdout=None, stderr=None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    interactive = stdin.isatty()
    while True:
        if interactive:
            stdout.write("lflat> ")
            stdout.flush()
        line = stdin.readline()
        if not line:
            return 0
        out, err, code = run_repl_line(session, line)
        stdout.write(out)
        stderr.write(err)
        if code is not None:
            return code


# -- argument parsing -------------------------------------------------------

def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget", type=_positive, default=None,
                        help="configurations explored per recognition (env LFLAT_BUDGET)")
    common.add_argument("--verbosity", choices=VERBOSITIES, default=None,
                        help="message detail (env LFLAT_VERBOSITY)")
    files = argparse.ArgumentParser(add_help=False)
    files.add_argument("-f", "--file", dest="files", action="append", default=[],
                       help="definition file to load (repeatable)")

    parser = argparse.ArgumentParser(prog="lflat", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common, files], help="run diagnostics")
    p.add_argument("paths", nargs="*", metavar="FILE")

    p = sub.add_parser("test", parents=[common, files], help="run a language's unit tests")
    p.add_argument("language")
    p.add_argument("mechanism")

    for name in ("accept", "trace"):
        p = sub.add_parser(name, parents=[common, files], help=f"{name} a word")
        p.add_argument("mechanism")
        p.add_argument("word", nargs="+")

    p = sub.add_parser("words", parents=[common, files], help="generate words")
    p.add_argument("mechanism")
    p.add_argument("--max-len", type=int, default=None)
    p.add_argument("--count", type=int, default=None)

    p = sub.add_parser("convert", parents=[common, files], help="regex to automaton")
    p.add_argument("name")
    p.add_argument("--to", choices=("nfa", "dfa"), default="dfa")
    p.add_argument("--minimize", action="store_true")
    p.add_argument("--rename", action="store_true")

    p = sub.add_parser("show", parents=[common, files], help="print an entity")
    p.add_argument("name")

    p = sub.add_parser("grade", parents=[common], help="grader mode")
    p.add_argument("--language", required=True, metavar="FILE")
    p.add_argument("--kind", required=True, choices=MECHANISM_KINDS)
    p.add_argument("--name", required=True)
    p.add_argument("--submission", required=True, metavar="FILE")

    p = sub.add_parser("repl", parents=[common, files], help="interactive loop")
    p.add_argument("paths", nargs="*", metavar="FILE")
    return parser


def _session(ns) -> Session:
    budget = ns.budget
    if budget is None:
        env = os.environ.get("LFLAT_BUDGET")
        try:
            budget = int(env) if env else DEFAULT_BUDGET.max_configurations
        except ValueError:
            raise CommandError(f"LFLAT_BUDGET is not an integer: {env!r}") from None
    verbosity = ns.verbosity or os.environ.get("LFLAT_VERBOSITY", "detailed")
    if verbosity not in VERBOSITIES:
        raise CommandError(f"unknown verbosity {verbosity!r}")
    try:
        session = Session(verbosity=verbosity, budget=SearchBudget(budget))
    except ValueError as exc:
        raise CommandError(str(exc)) from None
    for path in list(getattr(ns, "files", [])) + list(getattr(ns, "paths", [])):
        session.load(path)
    return session


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    ns = build_parser().parse_args(argv)
    try:
        if ns.command == "grade":
            budget = SearchBudget(ns.budget) if ns.budget else DEFAULT_BUDGET
            text, code = grade(_read(ns.language), _read(ns.submission), ns.kind, ns.name, budget)
        else:
            session = _session(ns)
            if ns.command == "repl":
                return repl(session, stdout=stdout, stderr=stderr)
            if ns.command == "check":
                text, code = cmd_check(session)
            elif ns.command == "test":
                text, code = cmd_test(session, ns.language, ns.mechanism)
            elif ns.command == "accept":
                text, code = cmd_accept(session, ns.mechanism, " ".join(ns.word))
            elif ns.command == "trace":
                text, code = cmd_trace(session, ns.mechanism, " ".join(ns.word))
            elif ns.command == "words":
                text, code = cmd_words(session, ns.mechanism, ns.max_len, ns.count)
            elif ns.command == "convert":
                text, code = cmd_convert(session, ns.name, ns.to, ns.minimize, ns.rename)
            else:
                text, code = cmd_show(session, ns.name)
    except CommandError as exc:
        stderr.write(f"error: {exc}\n")
        return 2
    stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
