"""Shared fixtures: the shipped corpus, loaded once per test session."""

from pathlib import Path

import pytest

from gluesem.lexicon import Premise, Scenario, load_scenario, premises

CORPUS = Path(__file__).resolve().parent.parent / "corpus"

SCENARIO_NAMES = [
    "bill-left",
    "every-man-left",
    "bill-finds-al",
    "bill-seeks-al",
    "bill-seeks-a-unicorn",
    "conversation",
]

EXPECTED_COUNTS = {
    "bill-left": 1,
    "every-man-left": 1,
    "bill-finds-al": 1,
    "bill-seeks-al": 1,
    "bill-seeks-a-unicorn": 2,
    "conversation": 5,
}


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return CORPUS


@pytest.fixture(scope="session")
def corpus() -> dict[str, tuple[Scenario, list[Premise]]]:
    loaded = {}
    for name in SCENARIO_NAMES:
        scenario = load_scenario(str(CORPUS / name / "scenario.txt"))
        loaded[name] = (scenario, premises(scenario, scenario.lexicon))
    return loaded
