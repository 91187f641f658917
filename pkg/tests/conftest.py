"""Shared fixtures: a fast-running variant of the default experiment config."""

import copy

import pytest

from interoai.harness.config import default_config, parse_config


def quick_config_doc(**run_overrides) -> dict:
    doc = copy.deepcopy(default_config())
    doc["run"].update({"train_steps": 300, "eval_steps": 200, "seeds": [0, 1, 2]})
    doc["run"].update(run_overrides)
    doc["blanket"]["steps"] = 4000
    return doc


@pytest.fixture()
def quick_doc():
    return quick_config_doc()


@pytest.fixture()
def quick_cfg():
    return parse_config(quick_config_doc())
