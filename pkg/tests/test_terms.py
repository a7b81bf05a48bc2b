"""Meaning-language terms: typing, substitution, normalization, comparison."""

import pytest
from hypothesis import given, settings, strategies as st

from gluesem.errors import (
    ExtensionOfNonIntension,
    TypeMismatch,
    UnboundVariable,
)
from gluesem.terms import (
    App,
    Const,
    Down,
    Lam,
    Up,
    Var,
    alpha_equal,
    app,
    canonical_key,
    format_term,
    infer_type,
    normalize,
    parse_term,
    subst_map,
    substitute,
    typecheck,
)
from gluesem.types import E, S, T, ArrowType, arrow, parse_type

ET = arrow(E, T)
SIG = {
    "Bill": E,
    "Al": E,
    "leave": ET,
    "man": ET,
    "unicorn": ET,
    "find": arrow(E, E, T),
    "seek": parse_type("e -> (s -> ((s -> (e -> t)) -> t)) -> t"),
    "every": arrow(ET, ET, T),
    "a": arrow(ET, ET, T),
}

BILL = Const("Bill", E)
LEAVE = Const("leave", ET)


# ---------------------------------------------------------------------------
# typechecking


def test_application_eliminates_arrow():
    assert typecheck(App(LEAVE, BILL)) == T


def test_quantified_scope_abstraction_type():
    # \P. a(z, unicorn(z), !P(z)) where P holds an individual concept's
    # property: the whole abstraction maps s -> (e -> t) down to t
    term = parse_term("\\P:(s -> e -> t). a(z, unicorn(z), !P(z))", SIG)
    assert typecheck(term) == ArrowType(arrow(S, E, T), T)


def test_extension_requires_an_intension():
    with pytest.raises(ExtensionOfNonIntension):
        typecheck(Down(BILL))


def test_free_variable_must_be_declared():
    with pytest.raises(UnboundVariable):
        typecheck(Var("X", E))
    assert typecheck(Var("X", E), {"X": E}) == E


def test_application_domain_mismatch():
    with pytest.raises(TypeMismatch):
        typecheck(App(LEAVE, LEAVE))


def test_env_disagreeing_with_annotation_is_an_error():
    with pytest.raises(TypeMismatch):
        typecheck(Var("X", E), {"X": T})


# ---------------------------------------------------------------------------
# substitution


def test_substitute_into_application():
    X = Var("X", E)
    assert substitute(App(LEAVE, X), X, BILL) == App(LEAVE, BILL)


def test_substitute_ignores_bound_variable():
    identity = Lam(Var("x", E), Var("x", E))
    assert substitute(identity, Var("y", E), BILL) == identity


def test_substitution_avoids_capture():
    # \x. find(x, y) with y := x must rename the binder, not capture
    x, y = Var("x", E), Var("y", E)
    term = Lam(x, app(Const("find", arrow(E, E, T)), x, y))
    out = substitute(term, y, x)
    assert isinstance(out, Lam)
    assert out.var.name != "x"
    inner_args = (out.body.fn.arg, out.body.arg)
    assert inner_args == (out.var, x)


def test_substitute_rejects_wrong_type():
    with pytest.raises(TypeMismatch):
        substitute(Var("X", E), Var("X", E), LEAVE)


# ---------------------------------------------------------------------------
# normalization


def test_beta_step():
    redex = App(Lam(Var("x", E), App(LEAVE, Var("x", E))), BILL)
    assert normalize(redex) == App(LEAVE, BILL)


def test_extension_of_intension_cancels():
    P = Var("P", arrow(S, E, T))
    assert normalize(Down(Up(P))) == P


def test_eta_contraction_of_simple_wrapper():
    wrapped = Lam(Var("x", E), App(LEAVE, Var("x", E)))
    assert normalize(wrapped) == LEAVE


def test_eta_leaves_non_tail_occurrences_alone():
    # \x. find(x, Bill): x is not the final argument, so no eta step fires
    x = Var("x", E)
    term = Lam(x, app(Const("find", arrow(E, E, T)), x, BILL))
    assert normalize(term) == term


def test_normalization_is_stable_on_parsed_reading():
    text = "seek(Bill, ^(\\P:(s -> e -> t). a(z, unicorn(z), !P(z))))"
    term = parse_term(text, SIG)
    assert alpha_equal(normalize(term), normalize(normalize(term)))


# ---------------------------------------------------------------------------
# alpha comparison


def test_alpha_equal_identity_functions():
    assert alpha_equal(Lam(Var("x", E), Var("x", E)),
                       Lam(Var("y", E), Var("y", E)))


def test_alpha_equal_quantified_bodies():
    a = parse_term("every(z, man(z), leave(z))", SIG)
    b = parse_term("every(w, man(w), leave(w))", SIG)
    assert alpha_equal(a, b)
    assert canonical_key(a) == canonical_key(b)


def test_alpha_distinguishes_argument_order():
    a = parse_term("\\x:e. \\y:e. find(x, y)", SIG)
    b = parse_term("\\x:e. \\y:e. find(y, x)", SIG)
    assert not alpha_equal(a, b)


# ---------------------------------------------------------------------------
# parsing and printing


@pytest.mark.parametrize("text", [
    "leave(Bill)",
    "every(z, man(z), leave(z))",
    "seek(Bill, ^(\\P:(s -> e -> t). !P(Al)))",
    "\\x:e. find(x, Bill)",
    "^leave",
])
def test_print_parse_round_trip(text):
    term = parse_term(text, SIG)
    again = parse_term(format_term(term), SIG)
    assert alpha_equal(term, again)


def test_quantifier_sugar_is_application_underneath():
    term = parse_term("every(z, man(z), leave(z))", SIG)
    assert isinstance(term, App)
    assert isinstance(term.fn, App)
    assert term.fn.fn == Const("every", arrow(ET, ET, T))


def test_printer_regenerates_quantifier_sugar():
    term = app(Const("every", arrow(ET, ET, T)),
               Const("man", ET), Const("leave", ET))
    assert format_term(term) == "every(z, man(z), leave(z))"


# ---------------------------------------------------------------------------
# randomized properties

_TYPE_POOL = [E, T, S, ET, arrow(S, T), arrow(E, E), arrow(ET, T),
              arrow(S, E, T)]


def _gen_term(draw, ty, env, depth):
    choices = ["const"]
    scoped = [v for v in env if v.ty == ty]
    if scoped:
        choices.extend(["var", "var"])
    if depth > 0:
        if isinstance(ty, ArrowType):
            choices.extend(["lam", "lam"])
            if ty.dom == S:
                choices.append("up")
        choices.extend(["app", "down"])
    pick = draw(st.sampled_from(choices))
    if pick == "var":
        return draw(st.sampled_from(scoped))
    if pick == "lam":
        var = Var(f"v{len(env)}", ty.dom)
        return Lam(var, _gen_term(draw, ty.cod, env + [var], depth - 1))
    if pick == "up":
        return Up(_gen_term(draw, ty.cod, env, depth - 1))
    if pick == "down":
        return Down(_gen_term(draw, ArrowType(S, ty), env, depth - 1))
    if pick == "app":
        arg_ty = draw(st.sampled_from(_TYPE_POOL))
        fun = _gen_term(draw, ArrowType(arg_ty, ty), env, depth - 1)
        arg = _gen_term(draw, arg_ty, env, depth - 1)
        return App(fun, arg)
    return Const(f"k_{str(ty).replace(' ', '')}", ty)


@st.composite
def closed_terms(draw):
    ty = draw(st.sampled_from(_TYPE_POOL))
    return _gen_term(draw, ty, [], draw(st.integers(0, 4)))


def _contains_cancelled_pair(t):
    if isinstance(t, Down) and isinstance(t.body, Up):
        return True
    if isinstance(t, (Up, Down)):
        return _contains_cancelled_pair(t.body)
    if isinstance(t, Lam):
        return _contains_cancelled_pair(t.body)
    if isinstance(t, App):
        return (_contains_cancelled_pair(t.fn)
                or _contains_cancelled_pair(t.arg))
    return False


@settings(max_examples=300, deadline=None)
@given(closed_terms())
def test_normalize_idempotent_and_type_preserving(term):
    once = normalize(term)
    assert alpha_equal(normalize(once), once)
    assert infer_type(once) == infer_type(term)
    assert not _contains_cancelled_pair(once)


@st.composite
def open_term_with_filler(draw):
    hole_ty = draw(st.sampled_from(_TYPE_POOL))
    hole = Var("hole", hole_ty)
    ty = draw(st.sampled_from(_TYPE_POOL))
    body = _gen_term(draw, ty, [hole], draw(st.integers(0, 3)))
    value = _gen_term(draw, hole_ty, [], draw(st.integers(0, 3)))
    return body, value


@settings(max_examples=200, deadline=None)
@given(open_term_with_filler())
def test_substitution_commutes_with_normalization(pair):
    body, value = pair
    direct = normalize(subst_map(body, {"hole": value}))
    staged = normalize(subst_map(normalize(body), {"hole": normalize(value)}))
    assert alpha_equal(direct, staged)
