"""PCFG + lexicon model, the grammar file format, validation, and CNF conversion.

File format (UTF-8, one declaration per line, `#` starts a comment):

    start s
    prod s -> np vp @ 0.25
    prod a -> 'x' b @ 0.5          # quoted symbols are literal terminals
    lex dt the @ 1.0
    lex vb flies root=fly feat=present,simple,3sg @ 0.2
    lex nn bird                    # omitted prob: uniform share of the rest
    mwe hearing loss -> hearing_loss
    pragma nonnormalized           # opt out of the sum-to-1 check

Probabilities are exact rationals; `0.25` and `1/4` are both accepted.
For every symbol used as a production lhs or lexical category, the
probabilities of all its productions and entries must sum to 1 (within
1e-9) unless the `nonnormalized` pragma is present.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

__all__ = [
    "Lit",
    "Production",
    "LexEntry",
    "Grammar",
    "GrammarError",
    "load_grammar",
    "load_grammar_file",
    "grammar_text",
    "to_cnf",
    "ASPECT_TAGS",
    "TIME_TAGS",
]

ASPECT_TAGS = frozenset({"simple", "perfect", "continuous", "perfect_continuous"})
TIME_TAGS = frozenset({"past", "present", "future"})

_SUM_TOLERANCE = Fraction(1, 10**9)


@dataclass(frozen=True)
class Lit:
    """A literal terminal appearing directly in a production body."""

    word: str

    def __repr__(self):
        return f"'{self.word}'"


Symbol = "str | Lit"


@dataclass(frozen=True)
class Production:
    lhs: str
    rhs: tuple  # of str (nonterminal / lexical category) or Lit
    prob: Fraction
    # CNF bookkeeping: unit-rule chain this production replaces (outermost
    # first, excluding lhs itself).  Empty for ordinary grammars.
    via: tuple = ()

    def __repr__(self):
        body = " ".join(repr(s) if isinstance(s, Lit) else s for s in self.rhs)
        return f"{self.lhs} -> {body} @ {self.prob}"


@dataclass(frozen=True)
class LexEntry:
    category: str
    surface: str
    root: str
    features: frozenset
    prob: Fraction

    def __repr__(self):
        return f"{self.category} {self.surface} @ {self.prob}"


class GrammarError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


@dataclass
class Grammar:
    productions: tuple
    lexicon: tuple
    mwe: dict  # tuple-of-words -> merged token
    start: str
    normalized: bool = True
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    # -- derived views (built once; the grammar is immutable after load) ----

    @property
    def prods_by_lhs(self) -> dict:
        if "prods" not in self._cache:
            by = {}
            for p in self.productions:
                by.setdefault(p.lhs, []).append(p)
            self._cache["prods"] = {k: tuple(v) for k, v in by.items()}
        return self._cache["prods"]

    @property
    def lex_index(self) -> dict:
        """(category, surface) -> entries, insertion order preserved."""
        if "lex" not in self._cache:
            by = {}
            for e in self.lexicon:
                by.setdefault((e.category, e.surface), []).append(e)
            self._cache["lex"] = {k: tuple(v) for k, v in by.items()}
        return self._cache["lex"]

    @property
    def categories(self) -> frozenset:
        if "cats" not in self._cache:
            self._cache["cats"] = frozenset(e.category for e in self.lexicon)
        return self._cache["cats"]

    @property
    def nonterminals(self) -> frozenset:
        if "nts" not in self._cache:
            self._cache["nts"] = frozenset(p.lhs for p in self.productions)
        return self._cache["nts"]

    @property
    def known_words(self) -> frozenset:
        """Every token the grammar can consume: lexicon surfaces + literals."""
        if "words" not in self._cache:
            words = {e.surface for e in self.lexicon}
            for p in self.productions:
                words.update(s.word for s in p.rhs if isinstance(s, Lit))
            self._cache["words"] = frozenset(words)
        return self._cache["words"]

    def lookup(self, word: str) -> list:
        """All lexicon entries whose surface equals `word` (any category)."""
        if "by_word" not in self._cache:
            by = {}
            for e in self.lexicon:
                by.setdefault(e.surface, []).append(e)
            self._cache["by_word"] = by
        return list(self._cache["by_word"].get(word, ()))


# ---------------------------------------------------------------------------
# Loading and validation


def _parse_prob(text: str, line_no: int) -> Fraction:
    try:
        p = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise GrammarError(f"bad probability {text!r}", line_no)
    if not 0 < p <= 1:
        raise GrammarError(f"probability {text} outside (0, 1]", line_no)
    return p


def _split_prob(rest: str, line_no: int):
    """Split a declaration body from its optional `@ prob` suffix."""
    if "@" in rest:
        body, _, prob = rest.rpartition("@")
        return body.strip(), _parse_prob(prob.strip(), line_no)
    return rest.strip(), None


def load_grammar(text: str) -> Grammar:
    productions = []
    lexicon = []  # (entry fields..., explicit prob or None)
    mwe = {}
    start = None
    normalized = True

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        kind, _, rest = line.partition(" ")
        rest = rest.strip()
        if kind == "start":
            if not rest or " " in rest:
                raise GrammarError("start needs exactly one symbol", line_no)
            start = rest
        elif kind == "pragma":
            if rest == "nonnormalized":
                normalized = False
            else:
                raise GrammarError(f"unknown pragma {rest!r}", line_no)
        elif kind == "prod":
            body, prob = _split_prob(rest, line_no)
            if prob is None:
                raise GrammarError("prod lines need `@ prob`", line_no)
            lhs, arrow, rhs_text = body.partition("->")
            lhs = lhs.strip()
            if not arrow or not lhs:
                raise GrammarError("expected `prod lhs -> rhs @ prob`", line_no)
            rhs = []
            for tok in rhs_text.split():
                if tok.startswith("'") and tok.endswith("'") and len(tok) > 2:
                    rhs.append(Lit(tok[1:-1]))
                else:
                    rhs.append(tok)
            if not rhs:
                raise GrammarError("empty production body", line_no)
            productions.append(Production(lhs, tuple(rhs), prob))
        elif kind == "lex":
            body, prob = _split_prob(rest, line_no)
            parts = body.split()
            if len(parts) < 2:
                raise GrammarError("expected `lex category surface ...`", line_no)
            category, surface = parts[0], parts[1]
            root = surface
            features = set()
            for opt in parts[2:]:
                key, eq, value = opt.partition("=")
                if key == "root" and eq:
                    root = value
                elif key == "feat" and eq:
                    features.update(v for v in value.split(",") if v)
                else:
                    raise GrammarError(f"unknown lex option {opt!r}", line_no)
            if not re.fullmatch(r"[a-z][a-z0-9_]*", root):
                raise GrammarError(f"bad root {root!r}", line_no)
            aspects = ASPECT_TAGS & features
            times = TIME_TAGS & features
            if (aspects or times) and (len(aspects) != 1 or len(times) != 1):
                raise GrammarError(
                    f"entry {surface!r} must carry exactly one tense combination",
                    line_no,
                )
            lexicon.append(
                (LexEntry(category, surface, root, frozenset(features), Fraction(1)), prob)
            )
        elif kind == "mwe":
            src, arrow, merged = rest.partition("->")
            words = tuple(src.split())
            merged = merged.strip()
            if not arrow or len(words) < 2 or not merged:
                raise GrammarError("expected `mwe word word ... -> merged_token`", line_no)
            mwe[words] = merged
        else:
            raise GrammarError(f"unknown declaration {kind!r}", line_no)

    if start is None:
        raise GrammarError("missing start declaration")

    lexicon = _fill_lex_probs(lexicon)
    g = Grammar(tuple(productions), tuple(lexicon), mwe, start, normalized)
    _validate(g)
    return g


def load_grammar_file(path) -> Grammar:
    with open(path, encoding="utf-8") as f:
        return load_grammar(f.read())


def _fill_lex_probs(entries) -> list:
    """Omitted lexical probabilities split the category's remaining mass."""
    by_cat = {}
    for e, prob in entries:
        by_cat.setdefault(e.category, []).append((e, prob))
    filled = {}
    for cat, group in by_cat.items():
        explicit = sum((p for _, p in group if p is not None), Fraction(0))
        missing = sum(1 for _, p in group if p is None)
        if missing and explicit >= 1:
            raise GrammarError(
                f"category {cat!r}: explicit probabilities leave no mass "
                f"for the {missing} entries without one"
            )
        share = (1 - explicit) / missing if missing else Fraction(0)
        for e, p in group:
            filled[id(e)] = p if p is not None else share
    return [
        LexEntry(e.category, e.surface, e.root, e.features, filled[id(e)])
        for e, _ in entries
    ]


def _validate(g: Grammar) -> None:
    defined = g.nonterminals | g.categories
    for p in g.productions:
        for sym in p.rhs:
            if isinstance(sym, Lit):
                continue
            if sym not in defined:
                raise GrammarError(f"undefined symbol {sym!r} in {p!r}")
    if g.start not in defined:
        raise GrammarError(f"start symbol {g.start!r} is never defined")
    if not g.normalized:
        return
    sums = {}
    for p in g.productions:
        sums[p.lhs] = sums.get(p.lhs, Fraction(0)) + p.prob
    for e in g.lexicon:
        sums[e.category] = sums.get(e.category, Fraction(0)) + e.prob
    for sym, total in sums.items():
        if abs(total - 1) > _SUM_TOLERANCE:
            raise GrammarError(
                f"probabilities for {sym!r} sum to {float(total):g}, expected 1"
            )


def grammar_text(g: Grammar) -> str:
    """Canonical serialization; load_grammar(grammar_text(g)) reproduces g."""
    lines = []
    if not g.normalized:
        lines.append("pragma nonnormalized")
    lines.append(f"start {g.start}")
    for p in g.productions:
        body = " ".join(f"'{s.word}'" if isinstance(s, Lit) else s for s in p.rhs)
        lines.append(f"prod {p.lhs} -> {body} @ {p.prob}")
    for e in g.lexicon:
        opts = ""
        if e.root != e.surface:
            opts += f" root={e.root}"
        if e.features:
            opts += f" feat={','.join(sorted(e.features))}"
        lines.append(f"lex {e.category} {e.surface}{opts} @ {e.prob}")
    for words, merged in g.mwe.items():
        lines.append(f"mwe {' '.join(words)} -> {merged}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# CNF conversion (for the bottom-up CYK baseline)
#
# Output productions have rhs of either two nonterminals or one Lit.  Unit
# rules are removed by a max-probability closure over unit chains; each
# emitted rule remembers the chain it replaces in `via` so parse trees can
# be rebuilt in terms of the original grammar.


def to_cnf(g: Grammar) -> Grammar:
    for p in g.productions:
        if not p.rhs:
            raise GrammarError(f"empty production {p!r} not supported")

    helper_count = 0
    core = []  # rules with rhs already of the CNF shapes, pre unit-removal
    lit_cat = {}

    def lit_category(word: str) -> str:
        if word not in lit_cat:
            name = f"lit~{word}"
            lit_cat[word] = name
            core.append(Production(name, (Lit(word),), Fraction(1)))
        return lit_cat[word]

    unit_edges = []  # (lhs, rhs_symbol, prob)
    for p in g.productions:
        rhs = list(p.rhs)
        if len(rhs) == 1:
            sym = rhs[0]
            if isinstance(sym, Lit):
                core.append(Production(p.lhs, (sym,), p.prob))
            else:
                unit_edges.append((p.lhs, sym, p.prob))
            continue
        # TERM: literals inside longer bodies get a carrier category.
        rhs = [lit_category(s.word) if isinstance(s, Lit) else s for s in rhs]
        # BIN: left-factor bodies longer than two.
        lhs, prob = p.lhs, p.prob
        while len(rhs) > 2:
            helper_count += 1
            helper = f"{p.lhs}~{helper_count}"
            core.append(Production(lhs, (rhs[0], helper), prob))
            lhs, prob, rhs = helper, Fraction(1), rhs[1:]
        core.append(Production(lhs, tuple(rhs), prob))

    # Lexical entries become terminal rules on their category.
    for e in g.lexicon:
        core.append(Production(e.category, (Lit(e.surface),), e.prob))

    # Max-probability unit closure.  chains[a][b] = (prob, intermediate
    # symbols) for the best unit path a ->* b.  Probabilities never exceed
    # 1, so relaxation converges; ties prefer shorter chains.
    chains = {}
    for a, b, p in unit_edges:
        cur = chains.setdefault(a, {}).get(b)
        if cur is None or p > cur[0]:
            chains[a][b] = (p, ())
    changed = True
    while changed:
        changed = False
        for a in list(chains):
            for b, (p_ab, mid_ab) in list(chains[a].items()):
                for c, (p_bc, mid_bc) in chains.get(b, {}).items():
                    if c == a:
                        continue
                    cand = (p_ab * p_bc, mid_ab + (b,) + mid_bc)
                    cur = chains[a].get(c)
                    if cur is None or cand[0] > cur[0] or (
                        cand[0] == cur[0] and len(cand[1]) < len(cur[1])
                    ):
                        chains[a][c] = cand
                        changed = True

    out = list(core)
    core_by_lhs = {}
    for p in core:
        core_by_lhs.setdefault(p.lhs, []).append(p)
    for a, targets in chains.items():
        for b, (p_ab, mid) in targets.items():
            for p in core_by_lhs.get(b, ()):
                out.append(Production(a, p.rhs, p_ab * p.prob, via=mid + (b,) + p.via))

    cnf = Grammar(tuple(out), (), dict(g.mwe), g.start, normalized=False)
    cnf._cache["source_grammar"] = g
    return cnf
