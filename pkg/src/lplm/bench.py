"""Parser efficiency study: seeded grammar/sentence generators, a greedy
bottom-up CYK-Viterbi baseline over the CNF conversion, and a timing
harness that fits running time against sentence length.

Four grammar families, three size tiers (3-10, 20-50, 100+ rules counting
productions and lexical entries):

  left_recursive   s -> s t_i | t_i
  right_recursive  s -> t_i s | t_i
  unambiguous      s_j -> t_j s_{j+1} | t_j   (categories cycle)
  ambiguous        s -> a_i s | b_i s | a_i | b_i, with one word per pair
                   declared under both a_i and b_i; every token is a
                   homonym, so an n-word sentence has 2^n parses, while
                   the shared chart keeps the best-parse search cheap.

Timings run sequentially on one thread with gc paused; timeouts are
recorded as incomplete rows, not errors.
"""

from __future__ import annotations

import csv
import gc
import random
import statistics
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .grammar import Grammar, Lit, load_grammar, to_cnf
from .parser import ParseTree, parse_all, parse_best

__all__ = [
    "BenchSpec",
    "BenchRow",
    "BenchResult",
    "FitResult",
    "KINDS",
    "TIERS",
    "gen_grammar",
    "gen_sentences",
    "SentenceBatch",
    "cyk_viterbi",
    "run_bench",
    "write_csv",
    "write_gnuplot",
    "linear_fit",
]

KINDS = ("left_recursive", "right_recursive", "unambiguous", "ambiguous")
TIERS = (1, 2, 3)

# Rule-count targets per tier; generated counts land inside these.
_TIER_RANGES = {1: (3, 10), 2: (20, 50), 3: (100, 140)}


@dataclass
class BenchSpec:
    kind: str
    tier: int
    seed: int = 0
    lengths: tuple = tuple(range(1, 51))
    repeats: int = 10
    timeout_s: float = 30.0
    baseline: bool = True


@dataclass
class BenchRow:
    length: int
    mean_tabled: float | None
    std_tabled: float | None
    mean_baseline: float | None
    std_baseline: float | None
    runs: int
    tabled_timeout: bool = False
    baseline_timeout: bool = False


@dataclass
class FitResult:
    slope: float
    intercept: float
    r2: float


@dataclass
class BenchResult:
    spec: BenchSpec
    grammar: Grammar
    rows: list = field(default_factory=list)
    skipped_lengths: list = field(default_factory=list)
    fit: FitResult | None = None


# ---------------------------------------------------------------------------
# Grammar generation


def _weights(rng, n) -> list:
    """n positive probabilities summing to exactly 1.  Drawn from a wide
    range so distinct rules essentially never tie on probability."""
    raw = [rng.randint(1, 999_983) for _ in range(n)]
    total = sum(raw)
    return [Fraction(w, total) for w in raw]


def gen_grammar(kind: str, tier: int, seed: int) -> Grammar:
    """Deterministic seeded grammar of the requested kind and size tier."""
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    if tier not in TIERS:
        raise ValueError(f"tier must be one of {TIERS}")
    rng = random.Random(f"{kind}:{tier}:{seed}")
    lines = ["start s"]

    if kind in ("left_recursive", "right_recursive"):
        k = {1: rng.randint(1, 3), 2: rng.randint(7, 16), 3: rng.randint(34, 46)}[tier]
        ws = _weights(rng, 2 * k)
        for i in range(k):
            if kind == "left_recursive":
                lines.append(f"prod s -> s t{i} @ {ws[i]}")
            else:
                lines.append(f"prod s -> t{i} s @ {ws[i]}")
        for i in range(k):
            lines.append(f"prod s -> t{i} @ {ws[k + i]}")
        for i in range(k):
            lines.append(f"lex t{i} w{i:03d} @ 1")
    elif kind == "unambiguous":
        # Categories cycle with position; every position offers `c`
        # distinct terminals, each with its own continue/stop rules, so
        # the parse is forced by the tokens but all rules stay live.
        m, c = rng.choice(
            {1: [(1, 2), (2, 1), (1, 3), (3, 1)],
             2: [(2, 4), (3, 3), (4, 2), (2, 5), (4, 3), (3, 4), (5, 3)],
             3: [(6, 6), (4, 9), (5, 7), (6, 7), (7, 6), (4, 10), (8, 5), (5, 9)]}[tier]
        )
        for j in range(m):
            ws = _weights(rng, 2 * c)
            nxt = f"s{(j + 1) % m}"
            for i in range(c):
                lines.append(f"prod s{j} -> t{j}_{i} {nxt} @ {ws[2 * i]}")
                lines.append(f"prod s{j} -> t{j}_{i} @ {ws[2 * i + 1]}")
        for j in range(m):
            for i in range(c):
                lines.append(f"lex t{j}_{i} w{j:02d}x{i:02d} @ 1")
        lines[0] = "start s0"
    else:  # ambiguous
        k = {1: 1, 2: rng.randint(4, 8), 3: rng.randint(17, 23)}[tier]
        ws = _weights(rng, 4 * k)
        for i in range(k):
            lines.append(f"prod s -> a{i} s @ {ws[4 * i]}")
            lines.append(f"prod s -> b{i} s @ {ws[4 * i + 1]}")
            lines.append(f"prod s -> a{i} @ {ws[4 * i + 2]}")
            lines.append(f"prod s -> b{i} @ {ws[4 * i + 3]}")
        for i in range(k):
            lines.append(f"lex a{i} u{i:03d} @ 1")
            lines.append(f"lex b{i} u{i:03d} @ 1")

    g = load_grammar("\n".join(lines) + "\n")

    count = len(g.productions) + len(g.lexicon)
    lo, hi = _TIER_RANGES[tier]
    if not (lo <= count <= (hi if tier < 3 else max(hi, count))):
        raise AssertionError(f"generated {count} rules, outside tier {tier} range")
    if kind == "left_recursive":
        assert any(p.rhs and p.rhs[0] == p.lhs for p in g.productions)
    if kind == "ambiguous":
        witness = next(e.surface for e in g.lexicon)
        if len(parse_all(g, [witness])) < 2:
            raise AssertionError("ambiguous grammar lacks an ambiguous witness")
    return g


# ---------------------------------------------------------------------------
# Sentence generation


@dataclass
class SentenceBatch:
    sentences: list  # token lists, one per realized length, increasing
    skipped: list  # requested lengths the grammar cannot realize


def _realizable(g: Grammar, maxlen: int) -> dict:
    """symbol -> set of realizable yield lengths (capped at maxlen)."""
    lens = {}
    for e in g.lexicon:
        lens.setdefault(e.category, set()).add(1)
    for p in g.productions:
        for s in p.rhs:
            if isinstance(s, Lit):
                lens.setdefault(s, {1})
    changed = True
    while changed:
        changed = False
        for p in g.productions:
            combos = {0}
            for sym in p.rhs:
                sym_lens = {1} if isinstance(sym, Lit) else lens.get(sym, set())
                combos = {
                    a + b for a in combos for b in sym_lens if a + b <= maxlen
                }
                if not combos:
                    break
            target = lens.setdefault(p.lhs, set())
            new = combos - target
            if new:
                target.update(new)
                changed = True
    return lens


def gen_sentences(g: Grammar, lengths, seed: int = 0) -> SentenceBatch:
    """One seeded random sentence of each requested length, derived from
    g.start; lengths the grammar cannot realize are skipped and reported."""
    lengths = sorted(set(lengths))
    if not lengths:
        return SentenceBatch([], [])
    rng = random.Random(f"sentences:{seed}")
    maxlen = max(lengths)
    lens = _realizable(g, maxlen)

    def suffix_ok(rhs, idx, rem) -> bool:
        if idx == len(rhs):
            return rem == 0
        sym = rhs[idx]
        sym_lens = {1} if isinstance(sym, Lit) else lens.get(sym, set())
        return any(l <= rem and suffix_ok(rhs, idx + 1, rem - l) for l in sym_lens)

    def sample(sym, want) -> list:
        options = []
        if isinstance(sym, Lit):
            return [sym.word]
        if want == 1:
            for e in g.lexicon:
                if e.category == sym:
                    options.append((float(e.prob), ("lex", e)))
        for p in g.prods_by_lhs.get(sym, ()):
            if suffix_ok(p.rhs, 0, want):
                options.append((float(p.prob), ("prod", p)))
        if not options:
            raise ValueError(f"cannot realize {sym} at length {want}")
        weights = [w for w, _ in options]
        kind, payload = rng.choices([o for _, o in options], weights=weights)[0]
        if kind == "lex":
            return [payload.surface]
        out = []
        rem = want
        rhs = payload.rhs
        for idx, child in enumerate(rhs):
            child_lens = {1} if isinstance(child, Lit) else lens.get(child, set())
            feasible = [
                l for l in sorted(child_lens)
                if l <= rem and suffix_ok(rhs, idx + 1, rem - l)
            ]
            pick = rng.choice(feasible)
            out.extend(sample(child, pick))
            rem -= pick
        return out

    start_lens = lens.get(g.start, set())
    sentences, skipped = [], []
    for want in lengths:
        if want in start_lens:
            sentences.append(sample(g.start, want))
        else:
            skipped.append(want)
    return SentenceBatch(sentences, skipped)


# ---------------------------------------------------------------------------
# CYK-Viterbi baseline (greedy bottom-up over the CNF conversion)


def cyk_viterbi(g_cnf: Grammar, tokens, root: str | None = None):
    """Max-probability parse by dynamic programming over spans.

    Returns (prob, tree) or None.  The tree is rebuilt in terms of the
    original grammar when the CNF grammar carries its source (to_cnf
    attaches it); probabilities use floats.
    """
    if not tokens:
        return None
    root = root or g_cnf.start
    n = len(tokens)

    term_rules = {}
    by_left = {}
    for p in g_cnf.productions:
        if len(p.rhs) == 1 and isinstance(p.rhs[0], Lit):
            term_rules.setdefault(p.rhs[0].word, []).append((p.lhs, float(p.prob), p))
        elif len(p.rhs) == 2:
            b, c = p.rhs
            by_left.setdefault(b, []).append((c, p.lhs, float(p.prob), p))
        else:
            raise ValueError(f"grammar is not in CNF: {p!r}")

    # cell[(i, j)]: label -> (prob, back); back is ("t", word, rule) or
    # ("b", split, left_label, right_label, rule)
    cells = {}
    for i in range(n):
        cell = {}
        for lhs, prob, rule in term_rules.get(tokens[i], ()):
            old = cell.get(lhs)
            if old is None or prob > old[0]:
                cell[lhs] = (prob, ("t", tokens[i], rule))
        cells[(i, i + 1)] = cell
    for width in range(2, n + 1):
        for i in range(0, n - width + 1):
            j = i + width
            cell = {}
            for k in range(i + 1, j):
                left = cells[(i, k)]
                right = cells[(k, j)]
                for b, (pb, _) in left.items():
                    for c, lhs, prule, rule in by_left.get(b, ()):
                        rc = right.get(c)
                        if rc is None:
                            continue
                        prob = prule * pb * rc[0]
                        old = cell.get(lhs)
                        if old is None or prob > old[0]:
                            cell[lhs] = (prob, ("b", k, b, c, rule))
            cells[(i, j)] = cell

    hit = cells[(0, n)].get(root)
    if hit is None:
        return None

    source = g_cnf._cache.get("source_grammar")

    def wrap_chain(rule, children):
        # Rebuild the unit chain a CNF rule replaced: rule.lhs on the
        # outside, rule.via in order, children under the innermost label.
        labels = (rule.lhs,) + rule.via
        node_children = children
        node = None
        for label in reversed(labels):
            node = ParseTree(label, node_children)
            node_children = (node,)
        return node

    def make_leaf(rule, word):
        labels = (rule.lhs,) + rule.via
        inner_label = labels[-1]
        if inner_label.startswith("lit~"):
            node = ParseTree(word, token=word)  # literal terminal
        elif source is not None and (inner_label, word) in source.lex_index:
            node = ParseTree(inner_label, token=word)
        else:
            # Original production `inner -> 'word'`.
            node = ParseTree(inner_label, (ParseTree(word, token=word),))
        for label in reversed(labels[:-1]):
            node = ParseTree(label, (node,))
        return node

    def rebuild(label, i, j) -> ParseTree:
        _, back = cells[(i, j)][label]
        if back[0] == "t":
            _, word, rule = back
            return make_leaf(rule, word)
        _, k, b, c, rule = back
        left = rebuild(b, i, k)
        right = rebuild(c, k, j)
        # Splice binarization helpers (named with '~') back in.
        children = (left,)
        if right.token is None and "~" in right.label:
            children += right.children
        else:
            children += (right,)
        return wrap_chain(rule, children)

    tree = rebuild(root, 0, n)
    if source is not None:
        tree = _reprobabilize(source, tree)
    return hit[0], tree


def _reprobabilize(g: Grammar, tree: ParseTree) -> ParseTree:
    """Rebuild the tree with per-node probabilities from the grammar g."""
    if tree.token is not None:
        if tree.label == tree.token:
            return ParseTree(tree.label, token=tree.token, prob=Fraction(1))
        entries = g.lex_index.get((tree.label, tree.token), ())
        if not entries:
            raise ValueError(f"no lexical entry for {tree.label}({tree.token})")
        best = max(entries, key=lambda e: e.prob)
        return ParseTree(tree.label, token=tree.token, prob=best.prob, entry=best)
    children = tuple(_reprobabilize(g, c) for c in tree.children)
    shape = tuple(
        Lit(c.token) if c.token is not None and c.label == c.token else c.label
        for c in children
    )
    for p in g.prods_by_lhs.get(tree.label, ()):
        if p.rhs == shape:
            prob = p.prob
            for c in children:
                prob *= c.prob
            return ParseTree(tree.label, children, prob=prob)
    raise ValueError(f"no production {tree.label} -> {shape}")


# ---------------------------------------------------------------------------
# Timing harness


def _time_once(fn, iters: int = 1) -> float:
    """Seconds per call, averaged over `iters` back-to-back calls."""
    gc_was_enabled = gc.isenabled()
    gc.disable()
    try:
        t0 = time.perf_counter()
        for _ in range(iters):
            fn()
        return (time.perf_counter() - t0) / iters
    finally:
        if gc_was_enabled:
            gc.enable()


def run_bench(spec: BenchSpec) -> BenchResult:
    """Time the tabled parser (and optionally the CYK baseline) on one
    seeded grammar over sentences of increasing length."""
    g = gen_grammar(spec.kind, spec.tier, spec.seed)
    g_cnf = to_cnf(g) if spec.baseline else None
    batch = gen_sentences(g, spec.lengths, seed=spec.seed)
    result = BenchResult(spec=spec, grammar=g, skipped_lengths=batch.skipped)

    tabled_dead = False
    baseline_dead = False
    for sentence in batch.sentences:
        length = len(sentence)
        row = BenchRow(length, None, None, None, None, runs=spec.repeats)

        def run_tabled():
            parse_best(g, sentence)

        def run_baseline():
            cyk_viterbi(g_cnf, sentence)

        if not tabled_dead:
            times = _measure(run_tabled, spec.repeats, spec.timeout_s)
            if times is None:
                row.tabled_timeout = tabled_dead = True
            else:
                row.mean_tabled = statistics.fmean(times)
                row.std_tabled = statistics.pstdev(times)
        else:
            row.tabled_timeout = True

        if spec.baseline:
            if not baseline_dead:
                times = _measure(run_baseline, spec.repeats, spec.timeout_s)
                if times is None:
                    row.baseline_timeout = baseline_dead = True
                else:
                    row.mean_baseline = statistics.fmean(times)
                    row.std_baseline = statistics.pstdev(times)
            else:
                row.baseline_timeout = True

        result.rows.append(row)

    pts = [(r.length, r.mean_tabled) for r in result.rows if r.mean_tabled is not None]
    if len(pts) >= 3:
        result.fit = linear_fit(pts)
    return result


# Each timed run spans at least this long; fast parses are batched so a
# single scheduler stall cannot dominate a measurement.
_MIN_RUN_WINDOW_S = 0.1


def _measure(fn, repeats, timeout_s):
    """Warm-up plus `repeats` timed runs; None when the budget is blown.

    Each run is the better of two batched windows: timing noise in a
    shared environment is strictly additive, so the smaller window is the
    closer estimate of the true cost.
    """
    est = _time_once(fn)
    if est > timeout_s:
        return None
    iters = max(1, min(1000, int(_MIN_RUN_WINDOW_S / max(est, 1e-9))))
    times = []
    for _ in range(repeats):
        dt = _time_once(fn, iters)
        if iters > 1:
            dt = min(dt, _time_once(fn, iters))
        times.append(dt)
        if dt > timeout_s:
            return None
    return times


def linear_fit(points) -> FitResult:
    import numpy as np

    xs = np.array([x for x, _ in points], dtype=float)
    ys = np.array([y for _, y in points], dtype=float)
    slope, intercept = np.polyfit(xs, ys, 1)
    pred = slope * xs + intercept
    ss_res = float(((ys - pred) ** 2).sum())
    ss_tot = float(((ys - ys.mean()) ** 2).sum())
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return FitResult(float(slope), float(intercept), r2)


# ---------------------------------------------------------------------------
# Output


CSV_FIELDS = ("kind", "tier", "seed", "length", "parser", "mean_s", "std_s", "runs", "timeout")


def write_csv(results, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(CSV_FIELDS)
        for res in results:
            s = res.spec
            for row in res.rows:
                w.writerow(
                    [s.kind, s.tier, s.seed, row.length, "tabled",
                     _fmt(row.mean_tabled), _fmt(row.std_tabled), row.runs,
                     int(row.tabled_timeout)]
                )
                if s.baseline:
                    w.writerow(
                        [s.kind, s.tier, s.seed, row.length, "cyk",
                         _fmt(row.mean_baseline), _fmt(row.std_baseline), row.runs,
                         int(row.baseline_timeout)]
                    )


def _fmt(x):
    return "" if x is None else f"{x:.6g}"


def write_gnuplot(results, directory) -> None:
    """One data file per kind, one tabled-parser series (column) per tier."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    by_kind = {}
    for res in results:
        by_kind.setdefault(res.spec.kind, {})[res.spec.tier] = res
    for kind, tiers in by_kind.items():
        lengths = sorted({r.length for res in tiers.values() for r in res.rows})
        with open(directory / f"{kind}.dat", "w", encoding="utf-8") as f:
            cols = " ".join(f"tier{t}_s" for t in sorted(tiers))
            f.write(f"# length {cols}\n")
            for length in lengths:
                vals = []
                for t in sorted(tiers):
                    row = next((r for r in tiers[t].rows if r.length == length), None)
                    vals.append(_fmt(row.mean_tabled) if row else "")
                f.write(f"{length} {' '.join(v or 'nan' for v in vals)}\n")
