"""Shared fixtures and helpers for the whole suite."""

from __future__ import annotations

import pytest

from iimnet import EntityId, parse_network

# Seven-entity worked example used throughout: four power-layer entities,
# three communication-layer entities, every rule shape represented (a pure
# conjunction, pure disjunctions and a mixed rule).  Fourteen minterms.
DEMO_IDR = """\
entities a:4 b:3
a1 <- b1 b2
a2 <- b1 + b2
a3 <- b1 + b2 + b3
a4 <- b1 + b3
b1 <- a1 a3 + a2
b2 <- a1 a2 a3
b3 <- a1 + a2 + a3
"""


def eid(token: str) -> EntityId:
    return EntityId.parse(token)


def ids(*tokens: str) -> frozenset[EntityId]:
    return frozenset(EntityId.parse(t) for t in tokens)


@pytest.fixture(scope="session")
def demo():
    return parse_network(DEMO_IDR)


@pytest.fixture(scope="session")
def demo_attack():
    return ids("a2", "b3")
