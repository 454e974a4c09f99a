import csv
from fractions import Fraction

import pytest

from lplm.bench import (
    KINDS,
    BenchSpec,
    cyk_viterbi,
    gen_grammar,
    gen_sentences,
    linear_fit,
    run_bench,
    write_csv,
    write_gnuplot,
)
from lplm.grammar import grammar_text, to_cnf
from lplm.parser import parse_all, parse_best, tree_prob

from helpers import all_sentences

_TIER_RANGES = {1: (3, 10), 2: (20, 50), 3: (100, 10**9)}


class TestGenGrammar:
    @pytest.mark.parametrize("kind", KINDS)
    @pytest.mark.parametrize("tier", [1, 2, 3])
    def test_tier_rule_counts(self, kind, tier):
        g = gen_grammar(kind, tier, 42)
        count = len(g.productions) + len(g.lexicon)
        lo, hi = _TIER_RANGES[tier]
        assert lo <= count <= hi

    @pytest.mark.parametrize("kind", KINDS)
    def test_deterministic(self, kind):
        a = grammar_text(gen_grammar(kind, 2, 7))
        b = grammar_text(gen_grammar(kind, 2, 7))
        assert a == b
        assert grammar_text(gen_grammar(kind, 2, 8)) != a

    def test_left_recursive_rule_present(self):
        g = gen_grammar("left_recursive", 1, 42)
        assert any(p.rhs[0] == p.lhs for p in g.productions)

    def test_ambiguous_has_witness(self):
        g = gen_grammar("ambiguous", 2, 7)
        word = g.lexicon[0].surface
        assert len(parse_all(g, [word])) >= 2

    def test_unambiguous_unique_parses(self):
        g = gen_grammar("unambiguous", 1, 3)
        for sent in all_sentences(g, 6, (g.start,)):
            assert len(parse_all(g, list(sent))) == 1

    @pytest.mark.parametrize("kind", KINDS)
    def test_probabilities_normalized(self, kind):
        g = gen_grammar(kind, 2, 0)
        sums = {}
        for p in g.productions:
            sums[p.lhs] = sums.get(p.lhs, Fraction(0)) + p.prob
        for e in g.lexicon:
            sums[e.category] = sums.get(e.category, Fraction(0)) + e.prob
        assert all(total == 1 for total in sums.values())


class TestGenSentences:
    def test_fig1_length_three(self, fig1):
        batch = gen_sentences(fig1, [3])
        assert batch.sentences == [["the", "man", "sleeps"]]
        assert batch.skipped == []

    def test_fig1_unrealizable_length(self, fig1):
        batch = gen_sentences(fig1, [4])
        assert batch.sentences == [] and batch.skipped == [4]

    def test_exact_lengths_and_monotone(self):
        g = gen_grammar("right_recursive", 2, 1)
        lengths = [3, 1, 7, 5, 7]
        batch = gen_sentences(g, lengths, seed=2)
        got = [len(s) for s in batch.sentences]
        assert got == [1, 3, 5, 7]

    @pytest.mark.parametrize("kind", KINDS)
    def test_generated_sentences_reparse(self, kind):
        g = gen_grammar(kind, 2, 5)
        batch = gen_sentences(g, [1, 4, 9, 16, 25], seed=9)
        assert not batch.skipped
        for sent in batch.sentences:
            assert parse_best(g, sent) is not None

    def test_deterministic(self):
        g = gen_grammar("ambiguous", 2, 5)
        a = gen_sentences(g, range(1, 20), seed=1).sentences
        b = gen_sentences(g, range(1, 20), seed=1).sentences
        assert a == b


class TestCykViterbi:
    def test_published_probability(self, example):
        cnf = to_cnf(example)
        prob, tree = cyk_viterbi(cnf, ["bob", "runs"])
        assert abs(prob - 0.0045) <= 1e-12
        assert tree.text() == "s(np(pn(bob)),vp(v(runs)))"

    def test_underivable(self, fig1):
        assert cyk_viterbi(to_cnf(fig1), ["sleeps", "man"]) is None

    def test_rebuilt_tree_is_original_grammar_shaped(self, mini):
        cnf = to_cnf(mini)
        ptoks = ["the", "black", "cat", "chases", "bob"]
        prob, tree = cyk_viterbi(cnf, ptoks)
        assert tree.leaves() == ptoks
        assert float(tree_prob(mini, tree)) == pytest.approx(prob, rel=1e-9)

    @pytest.mark.parametrize("kind", KINDS)
    @pytest.mark.parametrize("tier", [1, 2])
    def test_agreement_with_tabled_parser(self, kind, tier):
        g = gen_grammar(kind, tier, 11)
        cnf = to_cnf(g)
        batch = gen_sentences(g, range(1, 9), seed=4)
        for sent in batch.sentences:
            _, best = parse_best(g, sent, exact=True)
            got, _ = cyk_viterbi(cnf, sent)
            assert got == pytest.approx(float(best), rel=1e-9)


class TestRunBench:
    def test_smoke(self, tmp_path):
        spec = BenchSpec(kind="right_recursive", tier=1, seed=2,
                         lengths=(2, 4, 6, 8), repeats=2)
        res = run_bench(spec)
        assert [r.length for r in res.rows] == [2, 4, 6, 8]
        for row in res.rows:
            assert row.mean_tabled is not None and row.mean_tabled > 0
            assert row.mean_baseline is not None
            assert not row.tabled_timeout and not row.baseline_timeout
        assert res.fit is not None

        out = tmp_path / "bench.csv"
        write_csv([res], out)
        with open(out) as f:
            rows = list(csv.DictReader(f))
        assert len(rows) == 8  # two parsers x four lengths
        assert {r["parser"] for r in rows} == {"tabled", "cyk"}
        assert all(r["kind"] == "right_recursive" for r in rows)

        write_gnuplot([res], tmp_path / "plots")
        data = (tmp_path / "plots" / "right_recursive.dat").read_text()
        assert data.splitlines()[0].startswith("# length")

    def test_inputs_deterministic_across_runs(self):
        spec = BenchSpec(kind="ambiguous", tier=1, seed=3, lengths=(2, 5), repeats=1)
        r1 = run_bench(spec)
        r2 = run_bench(spec)
        assert grammar_text(r1.grammar) == grammar_text(r2.grammar)
        assert [r.length for r in r1.rows] == [r.length for r in r2.rows]

    def test_linear_fit_on_exact_line(self):
        fit = linear_fit([(x, 2.0 * x + 1.0) for x in range(1, 10)])
        assert fit.slope == pytest.approx(2.0)
        assert fit.intercept == pytest.approx(1.0)
        assert fit.r2 == pytest.approx(1.0)
