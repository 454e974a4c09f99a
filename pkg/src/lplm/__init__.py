"""lplm: grounded question answering over a knowledge base of logical terms.

Statements and questions are parsed with a tabled most-probable-parse
PCFG parser, translated to terms, and answered purely by unification
against stored facts — an answer can only ever come from something that
was explicitly added.
"""

from .terms import (
    Atom,
    Var,
    Compound,
    Term,
    TermSyntaxError,
    unify,
    apply_subst,
    rename_apart,
    render,
    parse_term,
    is_ground,
)
from .grammar import (
    Grammar,
    GrammarError,
    Production,
    LexEntry,
    Lit,
    load_grammar,
    load_grammar_file,
    grammar_text,
    to_cnf,
)
from .parser import (
    ParseTree,
    ParseStats,
    UnknownWordError,
    InputTooLongError,
    tokenize,
    normalize_sentence,
    parse_best,
    parse_all,
    tree_prob,
)
from .semantics import (
    Statement,
    Goal,
    MalformedTreeError,
    UnsupportedQuestionError,
    tree_to_term,
    question_to_goal,
)
from .kb import (
    KnowledgeBase,
    Answer,
    NoParseError,
    NotAStatementError,
    NotAQuestionError,
    KBFormatError,
)

__version__ = "0.1.0"

DEFAULT_GRAMMAR = "english.gr"


def bundled_grammar_path(name: str = DEFAULT_GRAMMAR):
    """Filesystem path of a grammar shipped with the package."""
    from importlib.resources import files

    return files("lplm") / "grammars" / name


def load_default_grammar() -> Grammar:
    return load_grammar_file(bundled_grammar_path())
