import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from staffrules import FormatConfig, parse_log  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"

TABLE1_FORMAT = FormatConfig(
    event_id="EventID",
    process="FlowID",
    task="ActID",
    resource="Staff",
    case="CaseID",
    timestamp="SetDate",
)


def load_fixture(name, fmt=FormatConfig()):
    with open(FIXTURES / name, newline="") as fh:
        log, errors = parse_log(fh, fmt)
    assert not errors, errors
    return log


@pytest.fixture(scope="session")
def table1_log():
    return load_fixture("table1.csv", TABLE1_FORMAT)


@pytest.fixture(scope="session")
def table2_log():
    return load_fixture("table2.csv")


@pytest.fixture(scope="session")
def skew_log():
    from helpers import skewed_activity_log

    return skewed_activity_log()
