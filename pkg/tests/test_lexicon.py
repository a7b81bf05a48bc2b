"""Lexical templates: instantiation at f-structure nodes, scenarios."""

import pytest

from gluesem.errors import LexiconError, MissingAttribute, PredMismatch
from gluesem.fstructure import parse_fstructure
from gluesem.glue import alpha_equal_formulas, formula_key, parse_glue
from gluesem.lexicon import (
    instantiate,
    load_scenario,
    parse_lexicon,
    parse_scenario,
    premises,
)

# what each corpus entry should contribute once anchored at its node,
# written out in full
EXPECTED_PREMISES = {
    ("bill-left", "Bill"): "g.sig ~> Bill",
    ("bill-left", "left"):
        "forall X:e. g.sig ~> X -o f.sig ~> leave(X)",
    ("every-man-left", "every-man"):
        "forall H:proj(t), S:e -> t. "
        "(forall x:e. g.sig ~> x -o H ~> S(x)) -o "
        "H ~> every(z, man(z), S(z))",
    ("bill-finds-al", "finds"):
        "forall Z:e, Y:e. g.sig ~> Z * h.sig ~> Y -o f.sig ~> find(Z, Y)",
    ("bill-finds-al", "Al"): "h.sig ~> Al",
    ("bill-seeks-al", "seeks"):
        "forall Z:e, Y:(s -> (e -> t)) -> t. "
        "g.sig ~> Z * (forall s:proj(t), p:e -> t. "
        "(forall X:e. h.sig ~> X -o s ~> p(X)) -o s ~> Y(^p)) "
        "-o f.sig ~> seek(Z, ^Y)",
    ("bill-seeks-a-unicorn", "a-unicorn"):
        "forall H:proj(t), S:e -> t. "
        "(forall x:e. h.sig ~> x -o H ~> S(x)) -o "
        "H ~> a(z, unicorn(z), S(z))",
    ("conversation", "every-unicorn"):
        "forall G:proj(t), S:e -> t. "
        "(forall x:e. i.sig ~> x -o G ~> S(x)) -o "
        "G ~> every(u, unicorn(u), S(u))",
    ("conversation", "a"):
        "forall H:proj(t), R:e -> t, T:e -> t. "
        "((forall x:e. h.sig.VAR ~> x -o h.sig.RESTR ~> R(x)) "
        "* (forall x:e. h.sig ~> x -o H ~> T(x))) "
        "-o H ~> a(z, R(z), T(z))",
    ("conversation", "conv-with"):
        "forall Z:e, X:e. "
        "h.sig.VAR ~> Z * i.sig ~> X -o h.sig.RESTR ~> conv-with(Z, X)",
}

EXPECTED_COUNTS = {
    "bill-left": 2,
    "every-man-left": 2,
    "bill-finds-al": 3,
    "bill-seeks-al": 3,
    "bill-seeks-a-unicorn": 3,
    "conversation": 5,
}


@pytest.mark.parametrize("scenario_name,headword",
                         sorted(EXPECTED_PREMISES))
def test_instantiation_matches_written_out_form(corpus, scenario_name,
                                                headword):
    scenario, prems = corpus[scenario_name]
    got = [p.formula for p in prems if p.name == headword]
    assert len(got) == 1
    want = parse_glue(EXPECTED_PREMISES[scenario_name, headword],
                      scenario.lexicon.signature)
    assert alpha_equal_formulas(got[0], want)


def test_premise_counts_and_names_follow_attachments(corpus):
    for name, (scenario, prems) in corpus.items():
        assert len(prems) == EXPECTED_COUNTS[name]
        assert [p.name for p in prems] == [w for w, _ in
                                           scenario.attachments]


def test_instantiation_is_deterministic(corpus):
    scenario, _ = corpus["conversation"]
    first = premises(scenario, scenario.lexicon)
    second = premises(scenario, scenario.lexicon)
    assert [formula_key(p.formula) for p in first] == \
           [formula_key(p.formula) for p in second]


# ---------------------------------------------------------------------------
# constraint checking


LEXICON = parse_lexicon("""
entry left
PRED = leave
const leave : e -> t
glue forall X:e. (^ SUBJ).sig ~> X -o ^.sig ~> leave(X)

entry finds
PRED = find
const find : e -> e -> t
glue forall Z:e, Y:e.
  (^ SUBJ).sig ~> Z * (^ OBJ).sig ~> Y -o ^.sig ~> find(Z, Y)
""")


def _entry(headword):
    return LEXICON.entries[headword]


def test_pred_constraint_must_match_node():
    fs = parse_fstructure("f:[PRED 'sleep', SUBJ g:[PRED 'Bill']]")
    with pytest.raises(PredMismatch):
        instantiate(_entry("left"), "f", fs)


def test_unresolvable_template_path_is_reported():
    # 'finds' needs an OBJ under its anchor
    fs = parse_fstructure("f:[PRED 'find', SUBJ g:[PRED 'Bill']]")
    with pytest.raises(MissingAttribute):
        instantiate(_entry("finds"), "f", fs)


def test_attachment_to_unknown_entry_is_an_error():
    text = """scenario tiny
lexicon ../lexicon.glue
fstructure
  f:[PRED 'leave', SUBJ g:[PRED 'Bill']]
attach gallops -> f
goal f
"""
    scenario = parse_scenario(text)
    with pytest.raises(LexiconError):
        premises(scenario, LEXICON)


# ---------------------------------------------------------------------------
# scenario files


def test_parse_scenario_fields():
    scenario = parse_scenario("""scenario tiny
lexicon ../lexicon.glue
fstructure
  f:[PRED 'leave'
     SUBJ g:[PRED 'Bill']]
attach left -> f
goal f
""")
    assert scenario.name == "tiny"
    assert scenario.goal == "f"
    assert scenario.attachments == [("left", "f")]
    assert set(scenario.fs.nodes()) == {"f", "g"}
    assert scenario.lexicon is None  # resolved only by load_scenario


def test_load_scenario_resolves_lexicon(corpus_dir):
    scenario = load_scenario(str(corpus_dir / "bill-left" / "scenario.txt"))
    assert scenario.lexicon is not None
    assert "leave" in scenario.lexicon.signature


def test_scenario_goal_must_name_a_node():
    with pytest.raises(LexiconError):
        parse_scenario("""scenario tiny
lexicon ../lexicon.glue
fstructure
  f:[PRED 'leave']
attach left -> f
goal q
""")
