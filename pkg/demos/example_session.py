#!/usr/bin/env python3
"""Walk through a complete knowledge-base session.

A statement is parsed into a constituency tree, translated to a ground
logical term, and stored; questions are parsed the same way and answered
purely by unifying the question's term against the stored facts.
"""

from lplm import load_default_grammar, render
from lplm.kb import KnowledgeBase

kb = KnowledgeBase(load_default_grammar())

# Store one fact: determiner + adjective + noun + verb + adverb.
stmt = kb.add("the black bird flies bravely")
print("sentence:", stmt.source)
print("tree:    ", stmt.tree.text())
print("term:    ", render(stmt.term))
print("prob:    ", float(stmt.prob))
print()

# Three kinds of question over the same fact.
for q in [
    "how does the black bird fly",   # wh over the adverb slot
    "who flies bravely",             # wh over the subject slot
    "does the black bird fly bravely",  # yes/no, closed world
]:
    answer = kb.query(q)
    if answer.kind == "yesno":
        text = "yes" if answer.truth else "no"
    else:
        text = ", ".join(render(t) for t, _ in answer.bindings)
    print(f"?- {q}")
    print(f"   Answer: {text}")

# Retract the fact; the closed-world answer flips.
kb.remove("the black bird flies bravely")
answer = kb.query("does the black bird fly bravely")
print()
print("after removal, 'does the black bird fly bravely' ->",
      "yes" if answer.truth else "no")

# Facts the KB was never told cannot surface: the engine answers only
# from what unification finds.
kb.add("furosemide causes temporary hearing loss")
answer = kb.query("what causes temporary hearing loss")
for term, source in answer.bindings:
    print()
    print("grounded answer:", render(term))
    print("source fact:    ", source)
