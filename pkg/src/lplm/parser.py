"""Tokenization and tabled most-probable parsing.

`parse_best` runs a memoized top-down chart parse: each subgoal is
expanded at most once, its answers — (end, best probability, best tree) —
are tabled, and later demands consume the table.  Walkers suspended on an
in-progress subgoal are resumed whenever one of its answers appears or
improves, so left-recursive grammars terminate and the final chart is a
fixpoint holding the globally best parse per span.

Probabilities are exact `Fraction`s when `exact=True` (golden tests, the
engine path) and floats otherwise (the benchmark hot path).

`parse_all` is the independent oracle: a direct enumeration of every
derivation of the full span, exponential and therefore gated to short
inputs.  It shares nothing with the chart machinery beyond the grammar.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .grammar import Grammar, Lit

__all__ = [
    "ParseTree",
    "ParseStats",
    "UnknownWordError",
    "InputTooLongError",
    "tokenize",
    "normalize_sentence",
    "parse_best",
    "parse_all",
    "tree_prob",
]


class UnknownWordError(ValueError):
    """Input contains tokens the grammar has no entry for."""

    def __init__(self, words):
        self.words = list(words)
        super().__init__("unknown words: " + ", ".join(self.words))


class InputTooLongError(ValueError):
    pass


class ParseTree:
    """Constituency tree node.  `prob` is the probability of the subtree:
    the production's probability times the children's, or the lexical
    entry's probability at a leaf."""

    __slots__ = ("label", "children", "token", "prob", "entry", "size", "_text")

    def __init__(self, label, children=(), token=None, prob=Fraction(1), entry=None):
        self.label = label
        self.children = tuple(children)
        self.token = token
        self.prob = prob
        self.entry = entry
        self.size = 1 + sum(c.size for c in self.children)
        self._text = None

    def leaves(self):
        if self.token is not None:
            return [self.token]
        out = []
        for c in self.children:
            out.extend(c.leaves())
        return out

    def text(self) -> str:
        """Nested dump, e.g. `s(np(pn(bob)),vp(v(runs)))`."""
        if self._text is None:
            if self.token is not None:
                if self.label == self.token:  # literal terminal
                    self._text = self.token
                else:
                    self._text = f"{self.label}({self.token})"
            else:
                self._text = f"{self.label}({','.join(c.text() for c in self.children)})"
        return self._text

    def __repr__(self):
        return f"ParseTree({self.text()}, p={self.prob})"


def tree_prob(g: Grammar, tree: ParseTree) -> Fraction:
    """Recompute a tree's probability bottom-up from the grammar.

    Independent of whatever the parser stored; used by consistency tests
    and to re-probabilize CYK trees after de-binarization.
    """
    if tree.token is not None:
        if tree.label == tree.token:
            return Fraction(1)
        entries = g.lex_index.get((tree.label, tree.token), ())
        if not entries:
            raise ValueError(f"no lexical entry for {tree.label}({tree.token})")
        return max(e.prob for e in entries)
    shape = tuple(
        Lit(c.token) if c.token is not None and c.label == c.token else c.label
        for c in tree.children
    )
    for p in g.prods_by_lhs.get(tree.label, ()):
        if p.rhs == shape:
            prob = p.prob
            for c in tree.children:
                prob *= tree_prob(g, c)
            return prob
    raise ValueError(f"no production {tree.label} -> {shape}")


# ---------------------------------------------------------------------------
# Tokenization

_PUNCT = re.compile(r"[.,;:!?()\[\]{}\"'`‘’“”]+")


def normalize_sentence(text: str) -> str:
    """Lowercased, punctuation-free sentence text, whitespace collapsed.
    This is the form stored as a fact's source (multi-word entities are
    left unmerged)."""
    return " ".join(_PUNCT.sub(" ", text.lower()).split())


def tokenize(g: Grammar, text: str) -> list:
    """Lowercased, punctuation-free tokens with multi-word entities merged
    (maximal munch over the grammar's `mwe` declarations)."""
    words = _PUNCT.sub(" ", text.lower()).split()
    if not g.mwe:
        return words
    by_len = sorted(g.mwe, key=len, reverse=True)
    out = []
    i = 0
    while i < len(words):
        for seq in by_len:
            if tuple(words[i : i + len(seq)]) == seq:
                out.append(g.mwe[seq])
                i += len(seq)
                break
        else:
            out.append(words[i])
            i += 1
    return out


# ---------------------------------------------------------------------------
# Tabled chart parsing


@dataclass
class ParseStats:
    """Instrumentation for the tabling contract."""

    expansions: int = 0  # distinct subgoals expanded (each at most once)
    answers: int = 0  # answer slots filled for the first time
    improvements: int = 0  # answers replaced by a better derivation


class _Entry:
    __slots__ = ("answers", "consumers")

    def __init__(self):
        self.answers = {}  # end -> (prob, tree)
        self.consumers = []  # suspended walkers: (prod, dot, start, prob, children, pinned)


def _better(prob, tree, old_prob, old_tree) -> bool:
    # Total order: higher probability, then fewer nodes, then the smaller
    # canonical dump.  Total so the returned parse is deterministic.
    if prob != old_prob:
        return prob > old_prob
    if tree.size != old_tree.size:
        return tree.size < old_tree.size
    return tree.text() < old_tree.text()


class _Chart:
    """Worklist fixpoint over tabled subgoals.

    A subgoal is (nonterminal, start, pinned).  `pinned` marks subgoals
    that must end exactly at the last token: the root is pinned, and a
    pinned production pins its final symbol.  Pinned right-recursive
    chains therefore keep one answer per subgoal instead of one per end,
    which is what makes long right-recursive inputs cheap.

    Answer propagation runs in rounds: walk tasks drain first, then the
    batch of new/improved answers is delivered to suspended consumers.
    Inner subgoals settle before their consumers combine over them, so an
    improved answer almost never has to be re-propagated.
    """

    def __init__(self, g: Grammar, tokens, exact: bool, stats: ParseStats):
        self.g = g
        self.tokens = tokens
        self.stats = stats
        self.entries = {}
        self.pending = deque()
        self.dirty = {}  # (key, end) -> None, insertion ordered
        self.prods_by_lhs = g.prods_by_lhs
        self.lex_index = g.lex_index
        if exact:
            self.prod_prob = {id(p): p.prob for ps in self.prods_by_lhs.values() for p in ps}
            self.lex_prob = {id(e): e.prob for e in g.lexicon}
            self.one = Fraction(1)
        else:
            self.prod_prob = {
                id(p): float(p.prob) for ps in self.prods_by_lhs.values() for p in ps
            }
            self.lex_prob = {id(e): float(e.prob) for e in g.lexicon}
            self.one = 1.0

    def demand(self, nt: str, start: int, pinned: bool) -> _Entry:
        key = (nt, start, pinned)
        entry = self.entries.get(key)
        if entry is None:
            entry = self.entries[key] = _Entry()
            self.stats.expansions += 1
            for prod in self.prods_by_lhs.get(nt, ()):
                self.pending.append(
                    (prod, 0, start, start, self.prod_prob[id(prod)], (), pinned)
                )
        return entry

    def offer(self, key, end: int, prob, tree: ParseTree):
        entry = self.entries[key]
        old = entry.answers.get(end)
        if old is not None:
            if not _better(prob, tree, old[0], old[1]):
                return
            self.stats.improvements += 1
        else:
            self.stats.answers += 1
        entry.answers[end] = (prob, tree)
        self.dirty[(key, end)] = None

    def run(self, roots, start_pos=0):
        for root in roots:
            if root in self.prods_by_lhs:
                self.demand(root, start_pos, True)
        tokens = self.tokens
        n = len(tokens)
        pending = self.pending
        while pending or self.dirty:
            while pending:
                prod, dot, start, pos, prob, children, pinned = pending.popleft()
                if dot == len(prod.rhs):
                    self.offer(
                        (prod.lhs, start, pinned),
                        pos,
                        prob,
                        ParseTree(prod.lhs, children, prob=prob),
                    )
                    continue
                sym = prod.rhs[dot]
                last = pinned and dot == len(prod.rhs) - 1
                if isinstance(sym, Lit):
                    if pos < n and tokens[pos] == sym.word and not (last and pos + 1 != n):
                        leaf = ParseTree(sym.word, token=sym.word, prob=self.one)
                        pending.append(
                            (prod, dot + 1, start, pos + 1, prob, children + (leaf,), pinned)
                        )
                    continue
                if pos < n and not (last and pos + 1 != n):
                    for e in self.lex_index.get((sym, tokens[pos]), ()):
                        p = self.lex_prob[id(e)]
                        leaf = ParseTree(sym, token=tokens[pos], prob=p, entry=e)
                        pending.append(
                            (prod, dot + 1, start, pos + 1, prob * p, children + (leaf,), pinned)
                        )
                if sym in self.prods_by_lhs:
                    entry = self.demand(sym, pos, last)
                    entry.consumers.append((prod, dot, start, prob, children, pinned))
                    for end, (aprob, atree) in list(entry.answers.items()):
                        pending.append(
                            (prod, dot + 1, start, end, prob * aprob,
                             children + (atree,), pinned)
                        )
            # Deliver this round's settled answers to their consumers.
            batch, self.dirty = self.dirty, {}
            for key, end in batch:
                entry = self.entries[key]
                aprob, atree = entry.answers[end]
                for prod, dot, wstart, wprob, wchildren, wpinned in entry.consumers:
                    pending.append(
                        (prod, dot + 1, wstart, end, wprob * aprob,
                         wchildren + (atree,), wpinned)
                    )


def _check_words(g: Grammar, tokens) -> None:
    unknown = [t for t in dict.fromkeys(tokens) if t not in g.known_words]
    if unknown:
        raise UnknownWordError(unknown)


def parse_best(g, tokens, *, roots=None, exact=False, stats=None):
    """Most probable parse of the whole token sequence, or None.

    `roots` defaults to (g.start,); passing several root symbols parses
    them over one shared chart and returns the best full-span parse among
    them.  Raises UnknownWordError if a token has no entry at all.
    """
    _check_words(g, tokens)
    if not tokens:
        return None
    if roots is None:
        roots = (g.start,)
    stats = stats if stats is not None else ParseStats()
    chart = _Chart(g, tokens, exact, stats)
    chart.run(roots)
    n = len(tokens)
    best = None
    for root in roots:
        entry = chart.entries.get((root, 0, True))
        hit = entry.answers.get(n) if entry else None
        if hit and (best is None or _better(hit[0], hit[1], best[0], best[1])):
            best = hit
    if best is None:
        return None
    return best[1], best[0]


# ---------------------------------------------------------------------------
# Exhaustive enumeration oracle


def _unit_paths(g):
    """All simple paths through the unit-rule graph, per start symbol.

    A path is a tuple of unit productions with pairwise distinct symbols.
    Derivations repeating a (nonterminal, start, end) along a unit chain
    are excluded by construction: over the same span only unit rules can
    recurse, and with all probabilities <= 1 such cycles never improve a
    parse, so only simple chains matter.
    """
    edges = {}
    for ps in g.prods_by_lhs.values():
        for p in ps:
            if len(p.rhs) == 1 and not isinstance(p.rhs[0], Lit):
                edges.setdefault(p.lhs, []).append(p)
    paths = {}

    def extend(prefix, seen):
        tail = prefix[-1].rhs[0]
        for p in edges.get(tail, ()):
            nxt = p.rhs[0]
            if nxt in seen:
                continue
            path = prefix + (p,)
            paths.setdefault(path[0].lhs, []).append(path)
            extend(path, seen | {nxt})

    for a, ps in edges.items():
        for p in ps:
            paths.setdefault(a, []).append((p,))
            extend((p,), {a, p.rhs[0]})
    return paths


def parse_all(g, tokens, *, roots=None, maxlen=10):
    """Every distinct parse of the full span with exact probabilities.

    Exhaustive enumeration, exponential in general; inputs longer than
    `maxlen` tokens are rejected.  Shares no machinery with the chart.
    """
    _check_words(g, tokens)
    if len(tokens) > maxlen:
        raise InputTooLongError(f"{len(tokens)} tokens exceeds the bound {maxlen}")
    if not tokens:
        return []
    if roots is None:
        roots = (g.start,)
    tokens = list(tokens)
    unit_paths = _unit_paths(g)
    base_memo = {}

    def base(sym, i, j):
        """Derivations of `sym` over [i, j) whose top step is lexical or a
        non-unit production."""
        key = (sym, i, j)
        hit = base_memo.get(key)
        if hit is not None:
            return hit
        results = []
        base_memo[key] = results
        if j == i + 1:
            for e in g.lex_index.get((sym, tokens[i]), ()):
                results.append(
                    (e.prob, ParseTree(sym, token=tokens[i], prob=e.prob, entry=e))
                )
        for prod in g.prods_by_lhs.get(sym, ()):
            if len(prod.rhs) == 1 and not isinstance(prod.rhs[0], Lit):
                continue  # unit rules are applied as chains in full()
            for cuts in _splits(prod.rhs, i, j):
                _expand(prod, cuts, i, results)
        return results

    def _splits(rhs, i, j):
        # All ways to cut [i, j) into len(rhs) nonempty pieces.
        if len(rhs) == 1:
            yield (j,)
            return
        for k in range(i + 1, j - len(rhs) + 2):
            for rest in _splits(rhs[1:], k, j):
                yield (k,) + rest

    def _expand(prod, cuts, i, results):
        options = []
        start = i
        for sym, end in zip(prod.rhs, cuts):
            if isinstance(sym, Lit):
                if end != start + 1 or tokens[start] != sym.word:
                    return
                subs = [(Fraction(1), ParseTree(sym.word, token=sym.word))]
            else:
                subs = full(sym, start, end)
                if not subs:
                    return
            options.append(subs)
            start = end

        def product(idx):
            if idx == len(options):
                yield ()
                return
            for head in options[idx]:
                for tail in product(idx + 1):
                    yield (head,) + tail

        for parts in product(0):
            prob = prod.prob
            for p, _ in parts:
                prob *= p
            results.append(
                (prob, ParseTree(prod.lhs, tuple(t for _, t in parts), prob=prob))
            )

    full_memo = {}

    def full(sym, i, j):
        """All derivations: a base derivation, optionally under a simple
        unit chain ending in one."""
        key = (sym, i, j)
        hit = full_memo.get(key)
        if hit is not None:
            return hit
        results = list(base(sym, i, j))
        for path in unit_paths.get(sym, ()):
            tail = path[-1].rhs[0]
            for bp, bt in base(tail, i, j):
                prob, tree = bp, bt
                for p in reversed(path):
                    prob = p.prob * prob
                    tree = ParseTree(p.lhs, (tree,), prob=prob)
                results.append((prob, tree))
        full_memo[key] = results
        return results

    seen = {}
    for root in roots:
        for prob, tree in full(root, 0, len(tokens)):
            key = tree.text()
            if key not in seen or prob > seen[key][0]:
                seen[key] = (prob, tree)
    return [(t, p) for p, t in seen.values()]
