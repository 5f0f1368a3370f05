import os

import pytest

os.environ.setdefault("MAXSHAPE_THREADS", "1")


@pytest.fixture(scope="session")
def unit_square():
    from maxshape.geometry import DomainSpec

    return DomainSpec.unit_square()


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
