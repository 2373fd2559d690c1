import numpy as np
import pytest

from crossqam.constellation import build_dicyclic, build_welti_class1, trim_high_power
from crossqam.graymap import gray_labeling, progressive_labeling


@pytest.fixture(scope="session")
def gray12():
    return gray_labeling(1)


@pytest.fixture(scope="session")
def gray48():
    return gray_labeling(2)


@pytest.fixture(scope="session")
def prog12(gray12):
    return progressive_labeling(gray12, 7)


@pytest.fixture(scope="session")
def class1_trim():
    return trim_high_power(build_welti_class1(), 128)


@pytest.fixture(scope="session")
def class1_prog(class1_trim):
    return progressive_labeling(class1_trim, 7)


@pytest.fixture(scope="session")
def dicyclic_prog():
    return progressive_labeling(build_dicyclic(128), 7)


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)


# criterion number -> list of (passed, detail); filled by the acceptance suite
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[num]
        ok = all(p for p, _ in parts)
        detail = "; ".join(d for _, d in parts)
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
