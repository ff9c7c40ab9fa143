import re

import pytest

from mcvd_duo import Scenario

ACCEPTANCE_LINES = []


@pytest.fixture
def near_pair():
    return Scenario(diffusion_coeff=100.0, far_radius=5.0, pos1=(30, 0, 0), pos2=(30, 15, 0))


@pytest.fixture
def link_setup():
    return Scenario(diffusion_coeff=100.0, far_radius=5.0, pos1=(20, 5, 0), pos2=(-25, -10, 0),
                    slot_duration=5.0, molecules_per_bit=1000, bit_prior=0.5,
                    noise_mean=5.0, noise_var=5.0, slots=10)


@pytest.fixture
def record_criterion():
    def record(number, passed, detail):
        ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {detail}")
    return record


def _criterion_key(line):
    num, suffix = re.search(r"criterion (\d+)(\w*)", line).groups()
    return int(num), suffix


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=_criterion_key):
            terminalreporter.write_line(line)
