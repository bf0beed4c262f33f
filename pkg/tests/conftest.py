import pytest

from gapdist import build_config


@pytest.fixture(scope="session")
def classical():
    return build_config("classical")


@pytest.fixture(scope="session")
def ap3():
    return build_config("ap3")


@pytest.fixture(scope="session")
def ap9():
    return build_config("ap9")


@pytest.fixture(scope="session", params=["classical", "ap3", "ap9"])
def any_cfg(request):
    return build_config(request.param)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
