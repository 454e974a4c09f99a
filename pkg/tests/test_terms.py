import pytest
from hypothesis import given
from hypothesis import strategies as st

from lplm.terms import (
    Atom,
    Compound,
    TermSyntaxError,
    Var,
    apply_subst,
    is_ground,
    parse_term,
    rename_apart,
    render,
    unify,
    variables_of,
)

X, Y, Z = Var("X"), Var("Y"), Var("Z")
a, b, c = Atom("a"), Atom("b"), Atom("c")


def foo(*args):
    return Compound("foo", tuple(args))


class TestUnify:
    def test_published_example(self):
        s = unify(foo(a, X), foo(Y, b))
        assert s == {Y: a, X: b}
        assert apply_subst(s, foo(a, X)) == foo(a, b)
        assert apply_subst(s, foo(Y, b)) == foo(a, b)

    def test_identical_variables(self):
        assert unify(X, X) == {}

    def test_functor_clash(self):
        assert unify(Compound("f", (X,)), Compound("g", (a,))) is None

    def test_arity_clash(self):
        assert unify(foo(a), foo(a, b)) is None

    def test_occurs_check(self):
        assert unify(X, Compound("f", (X,))) is None
        assert unify(Compound("f", (X, a)), Compound("f", (Compound("g", (X,)), a))) is None

    def test_shared_variable_chains(self):
        s = unify(foo(X, X), foo(Y, a))
        assert apply_subst(s, X) == a
        assert apply_subst(s, Y) == a


class TestApply:
    def test_single_binding(self):
        assert apply_subst({X: b}, foo(a, X)) == foo(a, b)

    def test_empty(self):
        t = foo(a, X)
        assert apply_subst({}, t) == t

    def test_transitive(self):
        s = {X: Compound("g", (Y,)), Y: c}
        assert apply_subst(s, Compound("f", (X,))) == Compound("f", (Compound("g", (c,)),))

    def test_cyclic_substitution_rejected(self):
        with pytest.raises(ValueError):
            apply_subst({X: Compound("f", (X,))}, X)


class TestRenameApart:
    def test_fresh_variable(self):
        t = Compound("run", (X,))
        t2 = rename_apart(t)
        v2 = next(variables_of(t2))
        assert v2 != X and t2 == Compound("run", (v2,))

    def test_ground_unchanged(self):
        assert rename_apart(Atom("bob")) == Atom("bob")

    def test_sharing_preserved(self):
        t2 = rename_apart(Compound("f", (X, X)))
        v1, v2 = list(variables_of(t2))
        assert v1 == v2 != X


class TestText:
    def test_render(self):
        assert render(Compound("black", (Atom("bird"),))) == "black(bird)"
        assert render(Atom("bravely")) == "bravely"
        assert render(
            Compound("cause", (Atom("furosemide"),
                               Compound("temporary", (Atom("hearing_loss"),))))
        ) == "cause(furosemide,temporary(hearing_loss))"

    def test_parse(self):
        assert parse_term("run(bob)") == Compound("run", (Atom("bob"),))
        assert parse_term("bob") == Atom("bob")

    def test_unclosed(self):
        with pytest.raises(TermSyntaxError) as exc:
            parse_term("f(")
        assert exc.value.position == 2

    def test_garbage(self):
        with pytest.raises(TermSyntaxError):
            parse_term("f(a,)")
        with pytest.raises(TermSyntaxError):
            parse_term("F(a)")
        with pytest.raises(TermSyntaxError):
            parse_term("f(a) junk")


# --- property tests --------------------------------------------------------

_atoms = st.sampled_from([a, b, c])
_vars = st.sampled_from([X, Y, Z])
_functors = st.sampled_from(["f", "g", "h"])


def _compound(children):
    return st.builds(
        lambda f, args: Compound(f, tuple(args)),
        _functors,
        st.lists(children, min_size=1, max_size=3),
    )


terms = st.recursive(_atoms | _vars, _compound, max_leaves=12)
ground_terms = st.recursive(_atoms, _compound, max_leaves=12)


@st.composite
def generalized_pairs(draw):
    """Two generalizations of one ground term over disjoint variable
    pools; they always unify because the base term is a common instance."""
    base = draw(ground_terms)

    def generalize(t, prefix, var_for):
        # Equal subterms may share a variable; unequal ones never do, so
        # the result genuinely generalizes `base`.
        if draw(st.integers(0, 3)) == 0:
            return var_for.setdefault(t, Var(prefix, len(var_for) + 1))
        if isinstance(t, Compound):
            return Compound(
                t.functor, tuple(generalize(x, prefix, var_for) for x in t.args)
            )
        return t

    return generalize(base, "L", {}), generalize(base, "R", {})


def _equal_mod_renaming(t1, t2, fwd=None, bwd=None):
    fwd = {} if fwd is None else fwd
    bwd = {} if bwd is None else bwd
    if isinstance(t1, Var) and isinstance(t2, Var):
        if fwd.setdefault(t1, t2) != t2 or bwd.setdefault(t2, t1) != t1:
            return False
        return True
    if isinstance(t1, Atom) and isinstance(t2, Atom):
        return t1 == t2
    if isinstance(t1, Compound) and isinstance(t2, Compound):
        return (t1.functor == t2.functor and len(t1.args) == len(t2.args)
                and all(_equal_mod_renaming(x, y, fwd, bwd)
                        for x, y in zip(t1.args, t2.args)))
    return False


class TestProperties:
    @given(generalized_pairs())
    def test_mgu_soundness_on_unifiable_pairs(self, pair):
        t1, t2 = pair
        s = unify(t1, t2)
        assert s is not None
        assert apply_subst(s, t1) == apply_subst(s, t2)

    @given(terms, terms)
    def test_mgu_soundness_general(self, t1, t2):
        s = unify(t1, t2)
        if s is not None:
            assert apply_subst(s, t1) == apply_subst(s, t2)

    @given(terms, terms)
    def test_symmetry(self, t1, t2):
        s1 = unify(t1, t2)
        s2 = unify(t2, t1)
        assert (s1 is None) == (s2 is None)
        if s1 is not None:
            assert _equal_mod_renaming(apply_subst(s1, t1), apply_subst(s2, t2))

    @given(terms, terms)
    def test_idempotence(self, t1, t2):
        s = unify(t1, t2)
        if s is not None:
            for t in (t1, t2):
                once = apply_subst(s, t)
                assert apply_subst(s, once) == once

    @given(ground_terms)
    def test_round_trip(self, t):
        assert parse_term(render(t)) == t

    @given(terms)
    def test_occurs_never_builds_infinite_terms(self, t):
        if any(v == X for v in variables_of(t)) and t != X:
            assert unify(X, t) is None

    @given(ground_terms)
    def test_ground_terms_have_no_variables(self, t):
        assert is_ground(t)
        assert list(variables_of(t)) == []
