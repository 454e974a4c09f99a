"""From parse trees to logical terms.

Statements become ground terms: the main verb's root is the functor, the
subject noun phrase is the first argument, a transitive object is the
second, and a trailing adverb is appended last.  Noun phrases drop their
determiner and wrap the noun in its adjectives, innermost adjective
closest: "the black bird" -> black(bird).  Auxiliary verbs and tense are
recognized by the grammar but erased here; only the root survives.

Questions become goals: who/what/how put a fresh variable in the slot the
question word asks about, auxiliary-fronted questions with no question
word are ground yes/no goals.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .parser import ParseTree
from .terms import Atom, Compound, Term, Var, fresh_var, is_ground

__all__ = [
    "Statement",
    "Goal",
    "MalformedTreeError",
    "UnsupportedQuestionError",
    "STATEMENT_ROOT",
    "QUESTION_ROOT",
    "tree_to_term",
    "question_to_goal",
]

STATEMENT_ROOT = "s"
QUESTION_ROOT = "q"

_VERB_LEAVES = {"v", "vb", "vi", "vt"}
_AUX_LEAF = "av"
_QWORDS = {"who", "what", "how"}


class MalformedTreeError(ValueError):
    pass


class UnsupportedQuestionError(ValueError):
    pass


@dataclass
class Statement:
    term: Term
    source: str
    tree: Optional[ParseTree] = None
    prob: object = None


@dataclass
class Goal:
    term: Term
    kind: str  # "wh" | "yesno"
    selector: Optional[Var] = None


def _leaf_root(node: ParseTree) -> str:
    return node.entry.root if node.entry is not None else node.token


def _noun_term(node: ParseTree) -> Term:
    """np/nnx subtree -> term; determiners dropped, adjectives wrap."""
    adjectives = []
    core = None
    for child in node.children:
        if child.label == "dt":
            continue
        if child.label == "jj":
            adjectives.append(_leaf_root(child))
        elif child.token is not None:  # pn / nn leaf
            core = Atom(_leaf_root(child))
        else:  # nested noun group
            core = _noun_term(child)
    if core is None:
        raise MalformedTreeError(f"noun phrase without a noun: {node.text()}")
    for adj in reversed(adjectives):
        core = Compound(adj, (core,))
    return core


class _Clause:
    """Subject / verb root / object / adverb pulled out of a clause."""

    def __init__(self):
        self.subject = None
        self.object = None
        self.adverb = None
        self.verb_root = None

    def scan(self, nodes):
        for node in nodes:
            label = node.label
            if label == "np":
                if self.verb_root is None:
                    self.subject = _noun_term(node)
                else:
                    self.object = _noun_term(node)
            elif label == "rb":
                self.adverb = Atom(_leaf_root(node))
            elif label == _AUX_LEAF:
                continue
            elif label in _VERB_LEAVES and node.token is not None:
                self.verb_root = _leaf_root(node)
            elif node.children:
                self.scan(node.children)  # vp / vc wrappers
        return self

    def term(self, subject: Term) -> Term:
        if self.verb_root is None:
            raise MalformedTreeError("clause has no verb")
        args = [subject]
        if self.object is not None:
            args.append(self.object)
        if self.adverb is not None:
            args.append(self.adverb)
        return Compound(self.verb_root, tuple(args))


def tree_to_term(tree: ParseTree, source: str = "") -> Statement:
    """Translate a statement parse into its ground term."""
    if tree.label != STATEMENT_ROOT:
        raise MalformedTreeError(f"expected a statement tree, got {tree.label!r}")
    clause = _Clause().scan(tree.children)
    if clause.subject is None:
        raise MalformedTreeError("statement has no subject")
    term = clause.term(clause.subject)
    assert is_ground(term)
    return Statement(term=term, source=source, tree=tree, prob=tree.prob)


def question_to_goal(tree: ParseTree) -> Goal:
    """Translate a question parse into a goal term.

    Wh-goals contain exactly one variable (the selector); yes/no goals are
    ground.  The fact's own shape decides whether the variable slot is an
    object or an adverb, so the goal never has to.
    """
    if tree.label != QUESTION_ROOT:
        raise MalformedTreeError(f"expected a question tree, got {tree.label!r}")
    kids = tree.children
    if not kids:
        raise MalformedTreeError("empty question tree")

    if kids[0].label == "qw":
        word = kids[0].token
        if word not in _QWORDS:
            raise UnsupportedQuestionError(f"unsupported question word {word!r}")
        rest = kids[1:]
        clause = _Clause().scan(rest)
        x = fresh_var("X")
        if clause.subject is not None:
            # Fronted auxiliary: "how does NP V" / "what does NP V".
            term = Compound(clause.verb_root or _missing_verb(), (clause.subject, x))
        else:
            # Subject wh: the variable is the subject.
            if word == "how":
                raise UnsupportedQuestionError(
                    "how-questions need a fronted auxiliary (how does ... )"
                )
            if clause.verb_root is None:
                _missing_verb()
            term = clause.term(x)
        return Goal(term=term, kind="wh", selector=x)

    if kids[0].label == _AUX_LEAF:
        clause = _Clause().scan(kids)
        if clause.subject is None or clause.verb_root is None:
            raise MalformedTreeError("yes/no question needs a subject and a verb")
        term = clause.term(clause.subject)
        assert is_ground(term)
        return Goal(term=term, kind="yesno", selector=None)

    raise MalformedTreeError(f"unrecognized question shape: {tree.text()}")


def _missing_verb():
    raise MalformedTreeError("question has no verb")
