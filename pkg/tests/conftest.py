import pytest

from ofdm_isac import SystemParams, derive

# collected by the acceptance tests, printed after the run
ACCEPTANCE_LINES: list[str] = []


def table1_system(**overrides) -> SystemParams:
    """Reference parameter set used throughout the tests."""
    base = dict(carrier_frequency=24e9, subcarrier_spacing=120e3,
                num_subcarriers=2048, num_symbols=14, tx_power=0.1,
                tx_gain_db=20.0, rx_gain_db=20.0, noise_figure_db=2.9,
                temperature=290.0, modulation_order=4, rng_seed=0,
                cp_duration=0.59e-6)
    base.update(overrides)
    return SystemParams(**base)


@pytest.fixture(scope="session")
def params():
    return table1_system()


@pytest.fixture(scope="session")
def dp(params):
    return derive(params)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
