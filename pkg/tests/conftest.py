from pathlib import Path

import pytest

from elpmeans.graph import parse_edge_list, parse_labels

DATA = Path(__file__).resolve().parents[1] / "src" / "elpmeans" / "datasets"

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def karate():
    with open(DATA / "karate.edges") as fh:
        graph = parse_edge_list(fh)
    with open(DATA / "karate.labels") as fh:
        truth = parse_labels(fh, graph)
    return graph, truth


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
