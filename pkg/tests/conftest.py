from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from brf.catalog import aligned_ids, load_model

settings.register_profile(
    "default",
    deadline=None,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("default")

# spaces cheap enough for property tests
SMALL_IDS = ["su2xsu2_s1_11", "su2xsu2_s1_21", "su2xsu3_s1_21", "su3xsu3_so3", "su3xsu3_u2", "g2xsp2_su2"]

_ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record_acceptance(number: int, passed: bool, detail: str) -> None:
    _ACCEPTANCE[number] = (passed, detail)
    print(f"ACCEPTANCE {number:2d}: {'PASS' if passed else 'FAIL'} | {detail}")


@pytest.fixture(scope="session")
def acceptance_log():
    return record_acceptance


@pytest.fixture(scope="session")
def su3_model():
    return load_model("su3xsu3_so3")


@pytest.fixture(scope="session")
def so8_model():
    return load_model("so8xso7_g2")


@pytest.fixture(scope="session", params=SMALL_IDS)
def small_model(request):
    return load_model(request.param)


@pytest.fixture(scope="session", params=aligned_ids())
def any_model(request):
    return load_model(request.param)


def z1_grid(c1) -> list[Fraction]:
    return [Fraction(1, 10), Fraction(1, 2), Fraction(c1) - 1, Fraction(1), Fraction(2), Fraction(10)]


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_ACCEPTANCE):
        passed, detail = _ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if passed else 'FAIL'} | {detail}")
