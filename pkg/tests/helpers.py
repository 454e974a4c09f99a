"""Shared test apparatus: exhaustive sentence enumeration and the
randomized KB exerciser."""

from __future__ import annotations

import random

from lplm.grammar import Grammar, Lit
from lplm.kb import KnowledgeBase
from lplm.terms import render


def all_sentences(g: Grammar, maxlen: int, roots=("s",)):
    """Every token sequence of length <= maxlen derivable from the roots.

    Pure set-valued fixpoint over the productions; independent of both
    parsers, so it can drive them as an oracle workload.
    """
    yields = {}
    for e in g.lexicon:
        yields.setdefault(e.category, set()).add((e.surface,))
    changed = True
    while changed:
        changed = False
        for p in g.productions:
            parts = []
            usable = True
            for sym in p.rhs:
                if isinstance(sym, Lit):
                    parts.append({(sym.word,)})
                else:
                    have = yields.get(sym)
                    if not have:
                        usable = False
                        break
                    parts.append(have)
            if not usable:
                continue
            combos = {()}
            for part in parts:
                combos = {a + b for a in combos for b in part if len(a + b) <= maxlen}
                if not combos:
                    break
            target = yields.setdefault(p.lhs, set())
            fresh = combos - target
            if fresh:
                target |= fresh
                changed = True
    out = set()
    for r in roots:
        out |= yields.get(r, set())
    return sorted(out)


def check_kb_integrity(kb: KnowledgeBase):
    """Index and position map must exactly mirror the fact list."""
    expect_index = {}
    expect_pos = {}
    for pos, fact in enumerate(kb.facts):
        t = fact.term
        key = (t.functor, len(t.args)) if hasattr(t, "functor") else (t.name, 0)
        expect_index.setdefault(key, []).append(pos)
        assert t not in expect_pos, f"duplicate fact {render(t)}"
        expect_pos[t] = pos
    assert kb.index == expect_index
    assert kb._state.positions == expect_pos


def run_kb_machine(kb: KnowledgeBase, statements, questions, ops: int, seed: int,
                   save_path=None):
    """Random add/remove/query workload asserting the KB contracts after
    every operation.  Returns the number of operations performed."""
    rng = random.Random(seed)
    performed = 0
    for _ in range(ops):
        roll = rng.random()
        if roll < 0.45:
            sentence = rng.choice(statements)
            before = {f.term for f in kb.facts}
            stmt = kb.add(sentence)
            after = [f.term for f in kb.facts]
            assert len(after) == len(set(after))
            if stmt.term in before:
                assert len(after) == len(before)  # duplicate add is a no-op
        elif roll < 0.70:
            sentence = rng.choice(statements)
            size = len(kb)
            removed = kb.remove(sentence)
            assert len(kb) == size - (1 if removed else 0)
        else:
            question = rng.choice(questions)
            snapshot = [(f.term, f.source) for f in kb.facts]
            kb.query(question)
            assert [(f.term, f.source) for f in kb.facts] == snapshot  # purity
        check_kb_integrity(kb)
        performed += 1
        if save_path is not None and performed % 100 == 0:
            kb.save(save_path)
            loaded = KnowledgeBase.load(save_path, kb.grammar)
            assert [(render(f.term), f.source) for f in loaded.facts] == [
                (render(f.term), f.source) for f in kb.facts
            ]
    return performed
