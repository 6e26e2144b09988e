import pytest

from lhom.decompositions import find_bipartite_decomposition
from lhom.graph import Graph, components, is_bipartite
from lhom.obstructions import find_obstruction
from lhom.rng import SplitMix64


def searched_asteroid_target(seed=11, max_vertices=14):
    """First random bipartite graph whose obstruction is an asteroid.

    Also required: connected and without a bipartite decomposition, so every
    gadget built over it has to go through the asteroid constructions.
    """
    rng = SplitMix64(seed)
    while True:
        a = rng.between(5, max_vertices // 2)
        b = rng.between(5, max_vertices // 2)
        h = Graph(a + b, [(i, a + j) for i in range(a) for j in range(b) if rng.chance(1, 3)])
        if len(components(h)) != 1:
            continue
        sides = is_bipartite(h)
        ob = find_obstruction(h, sides)
        if ob is None or ob.kind != "Asteroid":
            continue
        if find_bipartite_decomposition(h, sides) is not None:
            continue
        return h, ob


@pytest.fixture(scope="session")
def asteroid_target():
    return searched_asteroid_target()


_ACCEPTANCE: list[tuple[int, str]] = []


@pytest.fixture
def record():
    """Report one acceptance criterion as a PASS/FAIL line; returns the verdict."""

    def rec(number, title, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {title} [{detail}]"
        _ACCEPTANCE.append((number, line))
        print(line)
        return ok

    return rec


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_ACCEPTANCE):
            terminalreporter.write_line(line)
