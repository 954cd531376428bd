import pytest

from toa_lab import DetectorSpec, ObservationWindow, TimeGrid, WavePacketSpec

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def fig1_packet():
    return WavePacketSpec(-10.0, 7.0, 1.0)


@pytest.fixture
def point_detector():
    return DetectorSpec(0.0, 0.0)


@pytest.fixture
def fig1_window():
    return ObservationWindow(5.0, 50.0)


@pytest.fixture
def fig1_grid():
    return TimeGrid(5.0, 2000)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
