"""Dynamic knowledge base: insertion, retraction, querying, persistence.

Facts are ground terms paired with the sentence that introduced them, in
insertion order, deduplicated by term, and indexed by (functor, arity).
Queries never mutate the KB.  Yes/no questions are answered closed-world:
a goal absent from the KB is `no`.

Single writer, many readers: the store lives in one immutable snapshot
that mutations (serialized on an internal lock) replace wholesale, so a
query always sees a consistent fact list and index without locking.

File format: one fact per line, canonical term text, a tab, the source
sentence.  Lines starting with `#` are comments.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Optional

from .grammar import Grammar
from .parser import normalize_sentence, parse_best, tokenize
from .semantics import (
    QUESTION_ROOT,
    Goal,
    Statement,
    question_to_goal,
    tree_to_term,
)
from .terms import (
    Atom,
    Compound,
    Term,
    apply_subst,
    is_ground,
    parse_term,
    render,
    rename_apart_with_map,
    unify,
)

__all__ = [
    "KnowledgeBase",
    "Answer",
    "NoParseError",
    "NotAStatementError",
    "NotAQuestionError",
    "KBFormatError",
]


class NoParseError(ValueError):
    """The sentence has no derivation under the loaded grammar."""


class NotAStatementError(ValueError):
    pass


class NotAQuestionError(ValueError):
    pass


class KBFormatError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass
class Answer:
    kind: str  # "wh" | "yesno"
    bindings: list = field(default_factory=list)  # [(Term, source sentence)]
    truth: Optional[bool] = None


def _functor_arity(t: Term):
    if isinstance(t, Compound):
        return t.functor, len(t.args)
    if isinstance(t, Atom):
        return t.name, 0
    raise ValueError("facts and goals must not be bare variables")


class _State:
    """One immutable snapshot of the fact store.

    Readers grab `kb._state` once and work on a consistent trio of facts,
    index, and position map; writers build a new snapshot and swap the
    single reference.  That is the whole single-writer / multi-reader
    story: queries never lock, mutations serialize on the writer lock.
    """

    __slots__ = ("facts", "index", "positions")

    def __init__(self, facts):
        self.facts = tuple(facts)
        self.positions = {}  # term -> position
        index: dict = {}
        for pos, fact in enumerate(self.facts):
            self.positions[fact.term] = pos
            index.setdefault(_functor_arity(fact.term), []).append(pos)
        # (functor, arity) -> positions in insertion order
        self.index = {key: tuple(v) for key, v in index.items()}


_EMPTY = _State(())


class KnowledgeBase:
    """Facts plus the grammar used to turn sentences into terms."""

    def __init__(self, grammar: Grammar):
        self.grammar = grammar
        self._state = _EMPTY
        self._write_lock = threading.Lock()

    def __len__(self):
        return len(self._state.facts)

    @property
    def facts(self) -> list:
        return list(self._state.facts)

    @property
    def index(self) -> dict:
        return {k: list(v) for k, v in self._state.index.items()}

    # -- parsing ------------------------------------------------------------

    def interpret(self, text: str):
        """Parse and classify one sentence.

        Returns ("statement" | "question", tree, prob).  The sentence is a
        question iff the best parse's root is the question symbol.
        """
        tokens = tokenize(self.grammar, text)
        if not tokens:
            raise NoParseError("empty input")
        roots = [self.grammar.start]
        if QUESTION_ROOT in self.grammar.nonterminals and QUESTION_ROOT not in roots:
            roots.append(QUESTION_ROOT)
        result = parse_best(self.grammar, tokens, roots=tuple(roots), exact=True)
        if result is None:
            raise NoParseError(f"no parse for: {' '.join(tokens)}")
        tree, prob = result
        kind = "question" if tree.label == QUESTION_ROOT else "statement"
        return kind, tree, prob

    def _statement_for(self, sentence: str) -> Statement:
        kind, tree, prob = self.interpret(sentence)
        if kind != "statement":
            raise NotAStatementError(
                "that is a question; use query to ask the knowledge base"
            )
        return tree_to_term(tree, source=normalize_sentence(sentence))

    # -- mutation -----------------------------------------------------------

    def add(self, sentence: str) -> Statement:
        """Store the sentence's term; a no-op returning the existing fact
        when the term is already present."""
        stmt = self._statement_for(sentence)
        with self._write_lock:
            state = self._state
            pos = state.positions.get(stmt.term)
            if pos is not None:
                return state.facts[pos]
            self._state = _State(state.facts + (stmt,))
        return stmt

    def remove(self, sentence: str) -> bool:
        """Remove the fact whose term equals the sentence's term."""
        stmt = self._statement_for(sentence)
        with self._write_lock:
            state = self._state
            pos = state.positions.get(stmt.term)
            if pos is None:
                return False
            self._state = _State(state.facts[:pos] + state.facts[pos + 1:])
        return True

    def replace_facts(self, facts) -> None:
        """Swap in a whole new fact list (the REPL's :load)."""
        with self._write_lock:
            self._state = _State(tuple(facts))

    # -- querying -----------------------------------------------------------

    def query(self, question: str) -> Answer:
        kind, tree, _ = self.interpret(question)
        if kind != "question":
            raise NotAQuestionError("that is a statement; use add to store it")
        return self.query_goal(question_to_goal(tree))

    def query_goal(self, goal: Goal) -> Answer:
        state = self._state  # one consistent snapshot for the whole query
        if goal.kind == "yesno":
            return Answer(kind="yesno", truth=goal.term in state.positions)
        fresh, mapping = rename_apart_with_map(goal.term)
        selector = mapping[goal.selector]
        bindings = []
        for pos in state.index.get(_functor_arity(fresh), ()):
            fact = state.facts[pos]
            subst = unify(fresh, fact.term)
            if subst is not None:
                bindings.append((apply_subst(subst, selector), fact.source))
        return Answer(kind="wh", bindings=bindings)

    # -- persistence ----------------------------------------------------------

    def save(self, path) -> None:
        state = self._state
        with open(path, "w", encoding="utf-8") as f:
            for fact in state.facts:
                f.write(f"{render(fact.term)}\t{fact.source}\n")

    @classmethod
    def load(cls, path, grammar: Grammar) -> "KnowledgeBase":
        kb = cls(grammar)
        facts = []
        seen = set()
        with open(path, encoding="utf-8") as f:
            for line_no, raw in enumerate(f, start=1):
                line = raw.rstrip("\n")
                if not line.strip() or line.lstrip().startswith("#"):
                    continue
                term_text, _, source = line.partition("\t")
                try:
                    term = parse_term(term_text.strip())
                except ValueError as exc:
                    raise KBFormatError(str(exc), line_no) from exc
                if not is_ground(term):
                    raise KBFormatError("facts must be ground", line_no)
                if term in seen:
                    continue
                seen.add(term)
                facts.append(Statement(term=term, source=source))
        kb.replace_facts(facts)
        return kb
