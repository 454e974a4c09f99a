"""Logical terms, unification, and the canonical text form.

Terms are immutable: atoms (lowercase constants), variables, and compound
terms with a lowercase functor and at least one argument.  Substitutions
are plain dicts mapping Var -> Term and are kept idempotent by `unify`.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterator, Optional, Union

__all__ = [
    "Atom",
    "Var",
    "Compound",
    "Term",
    "Subst",
    "TermSyntaxError",
    "unify",
    "apply_subst",
    "rename_apart",
    "is_ground",
    "variables_of",
    "render",
    "parse_term",
    "fresh_var",
]

_NAME_RE = re.compile(r"[a-z][a-z0-9_]*")


@dataclass(frozen=True)
class Atom:
    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class Var:
    name: str
    id: int = 0

    def __repr__(self):
        return f"_{self.name}{self.id or ''}"


@dataclass(frozen=True)
class Compound:
    functor: str
    args: tuple["Term", ...]

    def __post_init__(self):
        if not self.args:
            raise ValueError("compound terms need at least one argument; use Atom")
        object.__setattr__(self, "args", tuple(self.args))

    def __repr__(self):
        return render(self)


Term = Union[Atom, Var, Compound]
Subst = dict[Var, Term]

# Fresh-variable ids are drawn from a process-wide counter; next() on an
# itertools.count is atomic under CPython, which is all the thread safety
# rename_apart needs.
_fresh_ids = itertools.count(1)


def fresh_var(name: str = "G") -> Var:
    return Var(name, next(_fresh_ids))


def is_ground(t: Term) -> bool:
    if isinstance(t, Var):
        return False
    if isinstance(t, Compound):
        return all(is_ground(a) for a in t.args)
    return True


def variables_of(t: Term) -> Iterator[Var]:
    if isinstance(t, Var):
        yield t
    elif isinstance(t, Compound):
        for a in t.args:
            yield from variables_of(a)


def _walk(t: Term, bindings: Subst) -> Term:
    # Follow variable bindings to the representative term.
    while isinstance(t, Var) and t in bindings:
        t = bindings[t]
    return t


def _occurs(v: Var, t: Term, bindings: Subst) -> bool:
    t = _walk(t, bindings)
    if isinstance(t, Var):
        return t == v
    if isinstance(t, Compound):
        return any(_occurs(v, a, bindings) for a in t.args)
    return False


def unify(a: Term, b: Term) -> Optional[Subst]:
    """Most general unifier of `a` and `b`, or None if they don't match.

    The result is idempotent: no bound variable appears in any range term.
    The occurs check is always on, so no cyclic term can be produced.
    """
    bindings: Subst = {}
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        x = _walk(x, bindings)
        y = _walk(y, bindings)
        if x == y:
            continue
        if isinstance(x, Var):
            if _occurs(x, y, bindings):
                return None
            bindings[x] = y
        elif isinstance(y, Var):
            if _occurs(y, x, bindings):
                return None
            bindings[y] = x
        elif isinstance(x, Compound) and isinstance(y, Compound):
            if x.functor != y.functor or len(x.args) != len(y.args):
                return None
            stack.extend(zip(x.args, y.args))
        else:
            return None
    # Resolve chains so the substitution is idempotent.
    return {v: apply_subst(bindings, t) for v, t in bindings.items() if v != t}


def apply_subst(s: Subst, t: Term, _seen: frozenset = frozenset()) -> Term:
    """Replace every bound variable in `t`, chasing bindings to a fixpoint."""
    if isinstance(t, Var):
        if t in s:
            if t in _seen:
                raise ValueError(f"cyclic substitution through {t!r}")
            return apply_subst(s, s[t], _seen | {t})
        return t
    if isinstance(t, Compound):
        return Compound(t.functor, tuple(apply_subst(s, a, _seen) for a in t.args))
    return t


def rename_apart(t: Term) -> Term:
    """Copy of `t` with every variable replaced by a globally fresh one.

    Shared variables stay shared in the copy.
    """
    t2, _ = rename_apart_with_map(t)
    return t2


def rename_apart_with_map(t: Term) -> tuple[Term, dict[Var, Var]]:
    mapping: dict[Var, Var] = {}

    def go(u: Term) -> Term:
        if isinstance(u, Var):
            if u not in mapping:
                mapping[u] = fresh_var(u.name)
            return mapping[u]
        if isinstance(u, Compound):
            return Compound(u.functor, tuple(go(a) for a in u.args))
        return u

    return go(t), mapping


def render(t: Term) -> str:
    """Canonical text: `functor(arg1,arg2)` with no spaces, `_name` for vars."""
    if isinstance(t, Atom):
        return t.name
    if isinstance(t, Var):
        return f"_{t.name}{t.id or ''}"
    return f"{t.functor}({','.join(render(a) for a in t.args)})"


class TermSyntaxError(ValueError):
    """Malformed term text; `position` is the 0-based offset of the problem."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at offset {position}")
        self.position = position


def parse_term(text: str) -> Term:
    """Inverse of `render`: parse_term(render(t)) == t for ground terms."""
    term, pos = _parse(text, 0)
    pos = _skip_ws(text, pos)
    if pos != len(text):
        raise TermSyntaxError(f"unexpected {text[pos]!r}", pos)
    return term


def _skip_ws(text: str, pos: int) -> int:
    while pos < len(text) and text[pos].isspace():
        pos += 1
    return pos


def _parse(text: str, pos: int) -> tuple[Term, int]:
    pos = _skip_ws(text, pos)
    if pos >= len(text):
        raise TermSyntaxError("unexpected end of input", pos)
    if text[pos] == "_":
        m = re.match(r"_([A-Za-z0-9_]*)", text[pos:])
        name = m.group(1) or "G"
        return Var(name), pos + m.end()
    m = _NAME_RE.match(text, pos)
    if not m:
        raise TermSyntaxError(f"expected a term, found {text[pos]!r}", pos)
    name, pos = m.group(0), m.end()
    if pos < len(text) and text[pos] == "(":
        pos += 1
        args = []
        while True:
            arg, pos = _parse(text, pos)
            args.append(arg)
            pos = _skip_ws(text, pos)
            if pos >= len(text):
                raise TermSyntaxError("unclosed argument list", pos)
            if text[pos] == ",":
                pos += 1
                continue
            if text[pos] == ")":
                return Compound(name, tuple(args)), pos + 1
            raise TermSyntaxError(f"expected ',' or ')', found {text[pos]!r}", pos)
    return Atom(name), pos
