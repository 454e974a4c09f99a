#!/usr/bin/env python3
"""Reproduce the parser-efficiency study at a demo scale.

Generates one grammar per family at the largest size tier, times the
tabled parser and the CYK baseline on sentences of growing length, and
fits time against length.  Full-scale runs: `lplm bench --tier 3`.
"""

from lplm.bench import KINDS, BenchSpec, run_bench, write_csv

results = []
for kind in KINDS:
    spec = BenchSpec(
        kind=kind,
        tier=3,
        seed=0,
        lengths=tuple(range(5, 51, 5)),
        repeats=5,
    )
    res = run_bench(spec)
    results.append(res)

    rules = len(res.grammar.productions) + len(res.grammar.lexicon)
    times = {r.length: r.mean_tabled for r in res.rows}
    print(f"{kind} (tier 3, {rules} rules)")
    for row in res.rows:
        base = f"{row.mean_baseline * 1e3:8.2f} ms" if row.mean_baseline else "timeout"
        print(f"  n={row.length:2d}  tabled {row.mean_tabled * 1e3:8.2f} ms"
              f"   cyk {base}")
    print(f"  linear fit: slope={res.fit.slope * 1e3:.3f} ms/token"
          f"  R^2={res.fit.r2:.3f}"
          f"  t(40)/t(20)={times[40] / times[20]:.2f}")
    print()

write_csv(results, "demo_bench.csv")
print("wrote demo_bench.csv")
