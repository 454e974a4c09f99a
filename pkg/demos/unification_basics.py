#!/usr/bin/env python3
"""The unification steps behind every answer, on paper-sized terms."""

from lplm.terms import Atom, Compound, Var, apply_subst, parse_term, render, unify

a, b = Atom("a"), Atom("b")
X, Y = Var("X"), Var("Y")

# foo(a,X) against foo(Y,b): matching argument by argument instantiates
# Y to a and X to b, and both sides become foo(a,b).
left = Compound("foo", (a, X))
right = Compound("foo", (Y, b))
subst = unify(left, right)
print("unify(foo(a,X), foo(Y,b)) =", {render(k): render(v) for k, v in subst.items()})
print("applied to both sides:    ", render(apply_subst(subst, left)),
      render(apply_subst(subst, right)))

# Mismatched functors can never unify.
print("unify(f(X), g(a)) =", unify(parse_term("f(_X)"), parse_term("g(a)")))

# The occurs check refuses cyclic bindings, so no infinite term exists.
print("unify(X, f(X)) =", unify(X, Compound("f", (X,))))

# This is exactly how a question meets a fact: run(X) against run(bob).
goal = Compound("run", (X,))
fact = parse_term("run(bob)")
subst = unify(goal, fact)
print("run(X) ~ run(bob) gives X =", render(apply_subst(subst, X)))
