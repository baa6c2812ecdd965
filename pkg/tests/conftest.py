import numpy as np
import pytest

from tca.specs import BUILTIN_SYSTEMS, builtin_system

# criterion number -> (verdict, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[str, str]] = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(params=sorted(BUILTIN_SYSTEMS))
def any_system(request):
    return builtin_system(request.param)


@pytest.fixture
def torus():
    return builtin_system("Z2-torus")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        verdict, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {verdict}  {detail}")
