from __future__ import annotations

from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from ladderlab.algebra import Vec, make_field
from ladderlab.colouring import Colouring, FilterD
from ladderlab.ladder import LadderSystem

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

DATA = Path(__file__).parent / "data"
FIELD_PARAMS = {2: (2, 1), 3: (3, 1), 4: (2, 2)}


def field_q(q: int):
    return make_field(*FIELD_PARAMS[q])


def twin_q(q: int) -> tuple[LadderSystem, FilterD]:
    """Two length-1 ladders at 3 and 4 sharing the step g1."""
    F = field_q(q)
    g1 = Vec.gen(1, 5)
    return LadderSystem.from_mapping(F, 5, 1, {3: [g1], 4: [g1]}), FilterD(1, frozenset({0}))


def separated() -> tuple[LadderSystem, FilterD]:
    F = make_field(2)
    v = lambda *xs: Vec.from_mapping(6, {x: 1 for x in xs})
    sys = LadderSystem.from_mapping(F, 6, 2, {3: [v(0), v(1, 2)], 5: [v(1), v(4)]})
    return sys, FilterD(2, frozenset({1}))


def col(mapping: dict) -> Colouring:
    return Colouring.from_mapping(mapping)


@pytest.fixture
def pq2():
    return twin_q(2)


@pytest.fixture
def sep():
    return separated()
