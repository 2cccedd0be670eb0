import pytest

from fuzzy_incubator.incubator import Phase, RuleMode, build_incubator_fis


@pytest.fixture(scope="session")
def phase1():
    return build_incubator_fis(Phase.DAYS_1_TO_17, RuleMode.ALL_15)


@pytest.fixture(scope="session")
def phase2():
    return build_incubator_fis(Phase.DAYS_18_TO_21, RuleMode.ALL_15)


@pytest.fixture(scope="session")
def phase1_pairs():
    return build_incubator_fis(Phase.DAYS_1_TO_17, RuleMode.PAIRS_ONLY_9)


@pytest.fixture(scope="session")
def phase2_pairs():
    return build_incubator_fis(Phase.DAYS_18_TO_21, RuleMode.PAIRS_ONLY_9)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
