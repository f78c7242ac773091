"""Shared fixtures: bundled example files and random-model helpers."""

import numpy as np
import pytest

from winoctx.empirical import EmpiricalModel
from winoctx.files import load_model, load_scenario
from winoctx.fixtures import fixture_path


@pytest.fixture(scope="session")
def chsh_scenario():
    return load_scenario(fixture_path("chsh_scenario.json"))


@pytest.fixture(scope="session")
def bell_model():
    return load_model(fixture_path("bell_state_model.json"))


@pytest.fixture(scope="session")
def uniform_model():
    return load_model(fixture_path("uniform_model.json"))


@pytest.fixture(scope="session")
def judgment_model():
    return load_model(fixture_path("cannibal_judgment_model.json"))


@pytest.fixture(scope="session")
def pr_model():
    return load_model(fixture_path("pr_box_model.json"))


def symmetric_tables(scenario, p_sames):
    """Tables for an outcome-symmetric model: per context, probability
    p_same on each agreeing joint outcome and 0.5 - p_same on each
    disagreeing one."""
    first, second = scenario.outcomes
    tables = {}
    from winoctx.scenario import maximal_contexts

    for ctx, p_same in zip(maximal_contexts(scenario), p_sames):
        tables[ctx] = {
            (first, first): p_same,
            (second, second): p_same,
            (first, second): 0.5 - p_same,
            (second, first): 0.5 - p_same,
        }
    return tables


def random_symmetric_model(scenario, rng: np.random.Generator) -> EmpiricalModel:
    """Random outcome-symmetric model on a four-context binary scenario."""
    # denominators are powers of two so every table entry is an exact double
    p_sames = rng.integers(0, 1025, size=4) / 2048.0
    return EmpiricalModel.build(scenario, symmetric_tables(scenario, p_sames))
