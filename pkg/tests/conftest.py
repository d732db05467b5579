from __future__ import annotations

import random

import pytest


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep
