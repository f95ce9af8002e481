import pytest

from beattysolve import BeattyCtx


@pytest.fixture(scope="session")
def pi_ctx():
    return BeattyCtx.named("pi")


@pytest.fixture(scope="session")
def e_ctx():
    return BeattyCtx.named("e")


@pytest.fixture(scope="session", params=["pi", "e"])
def ctx(request):
    return BeattyCtx.named(request.param)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
