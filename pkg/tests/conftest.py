import json
from pathlib import Path

import numpy as np
import pytest

from fscs import build_dht_dictionary, make_time_grid

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def oracle():
    return json.loads((FIXTURES / "oracle.json").read_text())


@pytest.fixture(scope="session")
def tau0(oracle):
    return oracle["tau0"]


@pytest.fixture(scope="session")
def grid_1ms():
    return make_time_grid(1e-3, 0.5e-6)


@pytest.fixture(scope="session")
def grid_short():
    return make_time_grid(0.2e-3, 0.5e-6)


@pytest.fixture(scope="session")
def dict_1ms(grid_1ms):
    return build_dht_dictionary(grid_1ms, 5, 5e3)


@pytest.fixture(scope="session")
def dict_short(grid_short):
    return build_dht_dictionary(grid_short, 5, 5e3)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    verdicts = getattr(mod, "VERDICTS", None)
    if verdicts:
        terminalreporter.write_sep("=", "acceptance criteria")
        for n in sorted(verdicts):
            terminalreporter.write_line(verdicts[n])
