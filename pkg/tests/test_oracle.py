"""The reference enumerator must agree with the search on every scenario."""

import pytest

from gluesem.glue import parse_glue
from gluesem.oracle import oracle_enumerate
from gluesem.prover import SearchStats, derive_readings
from gluesem.terms import canonical_key, format_term
from gluesem.types import parse_type


def keys(readings):
    return [canonical_key(r.meaning) for r in readings]


def test_agrees_with_search_on_all_scenarios(corpus):
    for scenario, prems in corpus.values():
        searched = derive_readings(prems, scenario.goal)
        enumerated = oracle_enumerate(prems, scenario.goal)
        assert keys(enumerated) == keys(searched), scenario.name


def test_printed_forms_also_agree(corpus):
    scenario, prems = corpus["conversation"]
    searched = derive_readings(prems, scenario.goal)
    enumerated = oracle_enumerate(prems, scenario.goal)
    assert [format_term(r.meaning) for r in enumerated] == \
        [format_term(r.meaning) for r in searched]


def test_enumerated_readings_carry_no_proof(corpus):
    scenario, prems = corpus["bill-left"]
    for reading in oracle_enumerate(prems, scenario.goal):
        assert reading.proof is None


def test_only_projection_goals_are_supported():
    sig = {"Bill": parse_type("e")}
    premise = parse_glue("g.sig ~> Bill", sig)
    with pytest.raises(TypeError):
        oracle_enumerate([premise], premise)


def test_depth_exhaustion_is_flagged(corpus):
    scenario, prems = corpus["bill-seeks-a-unicorn"]
    stats = SearchStats()
    assert oracle_enumerate(prems, scenario.goal, depth=2,
                            stats=stats) == []
    assert stats.limit_hit


def test_work_is_counted(corpus):
    scenario, prems = corpus["bill-left"]
    stats = SearchStats()
    oracle_enumerate(prems, scenario.goal, stats=stats)
    assert stats.nodes > 0
