"""Command line interface: a conversational REPL, batch KB commands, the
benchmark runner, and the HTTP service."""

from __future__ import annotations

import os
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

import click

from . import bundled_grammar_path
from .grammar import load_grammar_file
from .kb import KnowledgeBase
from .parser import normalize_sentence
from .semantics import question_to_goal, tree_to_term
from .terms import render

_SENTENCE_SPLIT = re.compile(r"[.?!]+")


@dataclass
class Session:
    """One interactive session: a grammar, one KB, and what was said."""

    grammar_path: str
    kb: KnowledgeBase
    answer_form: str = "term"
    history: list = field(default_factory=list)  # append-only (input, response)

    def record(self, text: str, response: str) -> str:
        self.history.append((text, response))
        return response


def _load_grammar(path):
    if path is None:
        path = os.environ.get("LPLM_GRAMMAR") or bundled_grammar_path()
    try:
        return load_grammar_file(path)
    except (OSError, ValueError) as exc:
        raise click.ClickException(f"cannot load grammar {path}: {exc}")


def _open_kb(grammar, kb_path):
    if kb_path and Path(kb_path).exists():
        return KnowledgeBase.load(kb_path, grammar)
    return KnowledgeBase(grammar)


def _answer_text(answer, form: str) -> str:
    if answer.kind == "yesno":
        return "yes" if answer.truth else "no"
    if not answer.bindings:
        return "no matching facts"
    if form == "sentence":
        return ", ".join(src for _, src in answer.bindings)
    return ", ".join(render(t) for t, _ in answer.bindings)


grammar_option = click.option(
    "--grammar", "-g", "grammar_path", default=None,
    help="Grammar file (default: $LPLM_GRAMMAR or the bundled English grammar).",
)
kb_option = click.option("--kb", "-k", "kb_path", default=None, help="KB file.")
form_option = click.option(
    "--answer-form", type=click.Choice(["term", "sentence"]), default="term",
    show_default=True, help="Render answers as terms or as source sentences.",
)


@click.group()
def main():
    """Grounded question answering over a knowledge base of logical terms."""


@main.command()
@grammar_option
@kb_option
@form_option
def repl(grammar_path, kb_path, answer_form):
    """Interactive session: statements are stored, questions are answered."""
    grammar = _load_grammar(grammar_path)
    session = Session(
        grammar_path=str(grammar_path or os.environ.get("LPLM_GRAMMAR")
                         or bundled_grammar_path()),
        kb=_open_kb(grammar, kb_path),
        answer_form=answer_form,
    )
    click.echo(f"{len(session.kb)} facts loaded. "
               "Statements are stored, questions answered.")
    click.echo("Commands: :remove <sentence>  :kb  :history  "
               ":save <path>  :load <path>  :quit")
    while True:
        try:
            line = input("> ").strip()
        except (EOFError, KeyboardInterrupt):
            click.echo("")
            break
        if not line:
            continue
        if line.startswith(":"):
            if _command(line, session, grammar) == "quit":
                break
            continue
        for sentence in _SENTENCE_SPLIT.split(line):
            sentence = sentence.strip()
            if not sentence:
                continue
            click.echo(_process(session, sentence))
    if kb_path:
        session.kb.save(kb_path)


def _process(session: Session, sentence: str) -> str:
    try:
        kind, tree, prob = session.kb.interpret(sentence)
        if kind == "question":
            answer = session.kb.query(sentence)
            response = f"Answer: {_answer_text(answer, session.answer_form)}"
        else:
            stmt = session.kb.add(sentence)
            response = f"Stored {render(stmt.term)}"
    except ValueError as exc:
        response = f"error: {exc}"
    return session.record(sentence, response)


def _command(line, session: Session, grammar):
    kb = session.kb
    cmd, _, arg = line.partition(" ")
    arg = arg.strip()
    try:
        if cmd == ":quit":
            return "quit"
        if cmd == ":kb":
            if not kb.facts:
                click.echo("(empty)")
            for fact in kb.facts:
                click.echo(f"{render(fact.term)}\t{fact.source}")
        elif cmd == ":history":
            for text, response in session.history:
                click.echo(f"{text} => {response}")
        elif cmd == ":remove":
            removed = kb.remove(arg)
            click.echo("removed" if removed else "not in KB")
        elif cmd == ":save":
            kb.save(arg)
            click.echo(f"saved {len(kb)} facts")
        elif cmd == ":load":
            loaded = KnowledgeBase.load(arg, grammar)
            kb.replace_facts(loaded.facts)
            click.echo(f"loaded {len(kb)} facts")
        else:
            click.echo(f"unknown command {cmd}")
    except (OSError, ValueError) as exc:
        click.echo(f"error: {exc}")
    return None


@main.command()
@click.argument("text")
@grammar_option
@kb_option
def add(text, grammar_path, kb_path):
    """Parse TEXT as a statement and store its term."""
    grammar = _load_grammar(grammar_path)
    kb = _open_kb(grammar, kb_path)
    try:
        stmt = kb.add(text)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    if kb_path:
        kb.save(kb_path)
    click.echo(f"Stored {render(stmt.term)}")


@main.command()
@click.argument("text")
@grammar_option
@kb_option
def remove(text, grammar_path, kb_path):
    """Remove the fact matching TEXT."""
    grammar = _load_grammar(grammar_path)
    kb = _open_kb(grammar, kb_path)
    try:
        removed = kb.remove(text)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    if kb_path:
        kb.save(kb_path)
    click.echo("removed" if removed else "not in KB")


@main.command()
@click.argument("text")
@grammar_option
@kb_option
@form_option
def query(text, grammar_path, kb_path, answer_form):
    """Answer a question from the KB."""
    grammar = _load_grammar(grammar_path)
    kb = _open_kb(grammar, kb_path)
    try:
        answer = kb.query(text)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    click.echo(f"Answer: {_answer_text(answer, answer_form)}")


@main.command()
@click.argument("text")
@grammar_option
def parse(text, grammar_path):
    """Print the best parse tree, its probability, and the term."""
    grammar = _load_grammar(grammar_path)
    kb = KnowledgeBase(grammar)
    try:
        kind, tree, prob = kb.interpret(text)
        if kind == "question":
            term = question_to_goal(tree).term
        else:
            term = tree_to_term(tree, source=normalize_sentence(text)).term
    except ValueError as exc:
        raise click.ClickException(str(exc))
    click.echo(f"kind: {kind}")
    click.echo(f"tree: {tree.text()}")
    click.echo(f"prob: {float(prob):.6g}")
    click.echo(f"term: {render(term)}")


@main.command()
@click.option("--kind", type=click.Choice(["left_recursive", "right_recursive",
                                           "unambiguous", "ambiguous", "all"]),
              default="all", show_default=True)
@click.option("--tier", type=click.IntRange(1, 3), default=None,
              help="Size tier 1-3 (default: all three).")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", default="bench.csv", show_default=True,
              help="CSV output path.")
@click.option("--lengths", default="1:50", show_default=True,
              help="Sentence lengths, start:stop[:step].")
@click.option("--repeats", type=int, default=10, show_default=True)
@click.option("--timeout", "timeout_s", type=float, default=30.0, show_default=True)
@click.option("--no-baseline", is_flag=True, help="Skip the CYK baseline.")
@click.option("--gnuplot-dir", default=None, help="Also write gnuplot data files.")
def bench(kind, tier, seed, out_path, lengths, repeats, timeout_s, no_baseline,
          gnuplot_dir):
    """Time the tabled parser against the CYK baseline on generated PCFGs."""
    from .bench import KINDS, BenchSpec, run_bench, write_csv, write_gnuplot

    parts = [int(x) for x in lengths.split(":")]
    start, stop = parts[0], parts[1]
    step = parts[2] if len(parts) > 2 else 1
    length_range = tuple(range(start, stop + 1, step))

    kinds = KINDS if kind == "all" else (kind,)
    tiers = (1, 2, 3) if tier is None else (tier,)
    results = []
    for k in kinds:
        for t in tiers:
            spec = BenchSpec(kind=k, tier=t, seed=seed, lengths=length_range,
                             repeats=repeats, timeout_s=timeout_s,
                             baseline=not no_baseline)
            res = run_bench(spec)
            results.append(res)
            fit = res.fit
            fit_text = (f"slope={fit.slope:.3g}s/token R2={fit.r2:.3f}"
                        if fit else "no fit")
            click.echo(f"{k} tier {t}: {len(res.rows)} lengths, {fit_text}")
    write_csv(results, out_path)
    click.echo(f"wrote {out_path}")
    if gnuplot_dir:
        write_gnuplot(results, gnuplot_dir)
        click.echo(f"wrote gnuplot data to {gnuplot_dir}")


@main.command()
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@grammar_option
@kb_option
@click.option("--autosave", is_flag=True, help="Write the KB file after each mutation.")
@click.option("--ui-dir", default=None,
              help="Directory of built UI assets to serve at / (default: bundled "
                   "frontend/dist next to the repository, when present).")
def serve(port, host, grammar_path, kb_path, autosave, ui_dir):
    """Serve the JSON API (and the web UI, when built)."""
    import uvicorn

    from .service import create_app

    grammar = _load_grammar(grammar_path)
    kb = _open_kb(grammar, kb_path)
    if ui_dir is None:
        candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        ui_dir = str(candidate) if candidate.is_dir() else None
    app = create_app(kb, autosave_path=kb_path if autosave else None, ui_dir=ui_dir)
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    except SystemExit:
        raise
    except OSError as exc:
        click.echo(f"cannot serve on {host}:{port}: {exc}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
