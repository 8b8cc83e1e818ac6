from importlib import resources

import numpy as np
import pytest

from factoredlift.groups import cyclic_group, dihedral_group
from factoredlift.reps import builtin_irreps
from factoredlift.voltage import parse_voltage_graph

ZETA = np.exp(2j * np.pi / 3)


def data_path(name):
    return str(resources.files("factoredlift") / "data" / name)


def bundled(name):
    return parse_voltage_graph(data_path(f"{name}.json"))


@pytest.fixture(scope="session")
def fig1():
    return bundled("fig1")


@pytest.fixture(scope="session")
def ex1():
    return bundled("example1")


@pytest.fixture(scope="session")
def ex2():
    return bundled("example2")


@pytest.fixture(scope="session")
def z4():
    return cyclic_group(4)


@pytest.fixture(scope="session")
def d3():
    return dihedral_group(3)


@pytest.fixture(scope="session")
def d3_irreps(d3):
    return builtin_irreps(d3)


def all_subgroups(G):
    """Every subgroup of G: grow from {e} by adjoining one element at a time."""
    from factoredlift.groups import subgroup_generate

    found = {(0,): subgroup_generate(G, [])}
    frontier = list(found.values())
    while frontier:
        nxt = []
        for H in frontier:
            for g in range(G.order):
                if g in H:
                    continue
                K = subgroup_generate(G, list(H.elements) + [g])
                if K.elements not in found:
                    found[K.elements] = K
                    nxt.append(K)
        frontier = nxt
    return list(found.values())


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for row in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.format_line(*row))
