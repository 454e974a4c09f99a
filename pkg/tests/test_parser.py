from fractions import Fraction

import pytest

from lplm.bench import gen_grammar, gen_sentences
from lplm.parser import (
    InputTooLongError,
    ParseStats,
    UnknownWordError,
    parse_all,
    parse_best,
    tokenize,
    tree_prob,
)

from helpers import all_sentences


class TestTokenize:
    def test_plain(self, english):
        assert tokenize(english, "the black bird flies bravely") == [
            "the", "black", "bird", "flies", "bravely",
        ]

    def test_mwe_and_punctuation(self, english):
        assert tokenize(english, "Furosemide causes temporary hearing loss.") == [
            "furosemide", "causes", "temporary", "hearing_loss",
        ]

    def test_three_word_mwe(self, english):
        assert tokenize(english, "Fir trees can grow in human lungs.") == [
            "fir_trees", "can", "grow", "in_human_lungs",
        ]

    def test_empty(self, english):
        assert tokenize(english, "") == []

    def test_quotes_stripped(self, english):
        assert tokenize(english, "'the black bird flies bravely'") == [
            "the", "black", "bird", "flies", "bravely",
        ]


class TestParseBest:
    def test_statement_golden_exact(self, example):
        tree, prob = parse_best(example, ["bob", "runs"], exact=True)
        assert tree.text() == "s(np(pn(bob)),vp(v(runs)))"
        assert prob == Fraction(9, 2000)

    def test_statement_golden_float(self, example):
        tree, prob = parse_best(example, ["bob", "runs"])
        assert abs(prob - 0.0045) <= 1e-12

    def test_question_golden(self, example):
        tree, prob = parse_best(example, ["who", "runs"], roots=("s", "q"), exact=True)
        assert tree.text() == "q(qw(who),v(runs))"
        assert prob == Fraction(1, 20)

    def test_yesno_tree_golden(self, example):
        tree, _ = parse_best(example, ["does", "bob", "run"], roots=("s", "q"),
                             exact=True)
        assert tree.text() == "q(av(does),np(pn(bob)),v(run))"

    def test_empty_input(self, example):
        assert parse_best(example, []) is None

    def test_no_derivation(self, example):
        assert parse_best(example, ["runs", "bob"]) is None

    def test_unknown_words_listed(self, english):
        with pytest.raises(UnknownWordError) as exc:
            parse_best(english, tokenize(english, "colorless green ideas sleep furiously"))
        assert set(exc.value.words) >= {"colorless", "green", "ideas", "furiously"}

    def test_leaves_match_input(self, english):
        toks = tokenize(english, "the black bird flies bravely")
        tree, _ = parse_best(english, toks, exact=True)
        assert tree.leaves() == toks

    def test_tree_probability_consistency(self, english, mini, example):
        cases = [
            (english, "the black bird flies bravely"),
            (english, "bob will have been running"),
            (mini, "who chases the black cat"),
            (example, "bob runs"),
        ]
        for g, text in cases:
            toks = tokenize(g, text)
            tree, prob = parse_best(g, toks, roots=("s", "q"), exact=True)
            assert tree_prob(g, tree) == prob

    def test_determinism(self, amb, english):
        for g, toks in [(amb, ["duck"] * 6),
                        (english, tokenize(english, "the black bird flies bravely"))]:
            runs = {parse_best(g, toks, exact=True)[0].text() for _ in range(3)}
            assert len(runs) == 1

    def test_all_twelve_tense_chains_parse(self, english):
        chains = [
            "runs", "ran", "will run",
            "has run", "had run", "will have run",
            "is running", "was running", "will be running",
            "has been running", "had been running", "will have been running",
        ]
        for chain in chains:
            toks = tokenize(english, f"bob {chain}")
            assert parse_best(english, toks, exact=True) is not None, chain


class TestParseAll:
    def test_fig1_unambiguous(self, fig1):
        trees = parse_all(fig1, ["the", "man", "sleeps"])
        assert len(trees) == 1
        assert trees[0][0].text() == "s(np(dt(the),nn(man)),vp(vi(sleeps)))"

    def test_hand_counted_ambiguity(self, amb):
        # Catalan(n-1) bracketings times 2^n homonym choices.
        for n, expected in [(1, 2), (2, 4), (3, 16), (4, 80), (5, 448), (6, 2688)]:
            assert len(parse_all(amb, ["duck"] * n)) == expected

    def test_empty(self, amb):
        assert parse_all(amb, []) == []

    def test_too_long(self, amb):
        with pytest.raises(InputTooLongError):
            parse_all(amb, ["duck"] * 11)
        assert len(parse_all(amb, ["duck"] * 7, maxlen=7)) == 16896

    def test_probabilities_are_exact(self, amb):
        for tree, prob in parse_all(amb, ["duck"] * 4):
            assert isinstance(prob, Fraction)
            assert prob == Fraction(2, 5) ** 3 * Fraction(3, 10) ** 4


class TestOracleEquivalence:
    @pytest.mark.parametrize("name,maxlen", [
        ("fig1", 8), ("example", 8), ("amb", 6), ("mini", 5),
    ])
    def test_best_matches_enumeration(self, name, maxlen, request):
        g = request.getfixturevalue(name)
        roots = ("s", "q") if "q" in g.nonterminals else ("s",)
        for sent in all_sentences(g, maxlen, roots):
            got = parse_best(g, list(sent), roots=roots, exact=True)
            best = max(p for _, p in parse_all(g, list(sent), roots=roots))
            assert got is not None and got[1] == best, sent

    def test_tie_break_is_canonical_minimum(self, amb):
        got, prob = parse_best(amb, ["duck"] * 5, exact=True)
        candidates = [t for t, p in parse_all(amb, ["duck"] * 5) if p == prob]
        assert len(candidates) == 448  # every parse ties here
        want = min(candidates, key=lambda t: (t.size, t.text()))
        assert got.text() == want.text()


class TestTabling:
    def test_left_recursion_terminates_all_lengths(self):
        g = gen_grammar("left_recursive", 1, 0)
        batch = gen_sentences(g, range(1, 51), seed=0)
        assert not batch.skipped
        for sent in batch.sentences:
            assert parse_best(g, sent) is not None

    @pytest.mark.parametrize("kind", ["left_recursive", "right_recursive",
                                      "unambiguous", "ambiguous"])
    def test_expansion_bound(self, kind):
        g = gen_grammar(kind, 2, 0)
        bound_units = len(g.nonterminals)
        for n in (10, 20, 30):
            sent = gen_sentences(g, [n], seed=0).sentences[0]
            stats = ParseStats()
            parse_best(g, sent, stats=stats)
            assert stats.expansions <= bound_units * (n + 1)

    def test_right_recursion_answer_table_stays_linear(self):
        # Pinned tail subgoals keep one answer per position instead of one
        # per (position, end) pair.
        g = gen_grammar("right_recursive", 2, 0)
        for n in (10, 30):
            sent = gen_sentences(g, [n], seed=0).sentences[0]
            stats = ParseStats()
            parse_best(g, sent, stats=stats)
            assert stats.answers <= 2 * (n + 1), (n, stats)
