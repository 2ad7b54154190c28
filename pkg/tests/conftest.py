from pathlib import Path

import pytest

from ncsat.core import CriteriaSpec, UncsModel, UpSet
from ncsat.formats import read_learning_set

DATA = Path(__file__).parent / "data"
TERRY_CSV = DATA / "terry.csv"
TERRY_MIN = ("cost", "acceleration")

# acceptance results collected by test_acceptance.py, printed at the end of the run
ACCEPTANCE = {}


@pytest.fixture
def terry():
    return read_learning_set(TERRY_CSV, minimize=TERRY_MIN)


@pytest.fixture
def terry_model(terry):
    crit = terry.criteria
    b1 = crit.orient((17250, 30, 2.2, 1.9))
    b2 = crit.orient((15500, 28.8, 2.5, 2.6))
    # bits: cost=0, acceleration=1, braking=2, road_holding=3
    return UncsModel(crit, 3, (b1, b2), UpSet.generated_by(4, [0b0101, 0b1001, 0b0110, 0b1010]))


@pytest.fixture
def crit2():
    return CriteriaSpec.default(2)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'} - {detail}")
