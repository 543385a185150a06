import numpy as np
import pytest
from hypothesis import settings

from fiberheat.field import make_field

settings.register_profile("fiberheat", max_examples=40, deadline=None)
settings.load_profile("fiberheat")

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def record(number, passed, detail):
    ACCEPTANCE[number] = (bool(passed), detail)
    print(f"criterion {number}: {'PASS' if passed else 'FAIL'} {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def annulus():
    return make_field(kind="Annulus2D")


@pytest.fixture(scope="session")
def channel():
    return make_field(kind="Channel2D", delta=0.15)


@pytest.fixture(scope="session")
def torus():
    return make_field(kind="TorusIntegrable")


@pytest.fixture(scope="session")
def perturbed():
    return make_field(kind="TorusPerturbed")


CATALOG_SPECS = (
    {"kind": "Annulus2D"},
    {"kind": "Channel2D"},
    {"kind": "TorusIntegrable"},
    {"kind": "TorusPerturbed"},
)


@pytest.fixture(params=CATALOG_SPECS, ids=lambda s: s["kind"])
def catalog_field(request):
    return make_field(request.param)


def small_dims(field):
    return (17, 16) if field.dim == 2 else (9, 12, 12)


def random_points(field, n, seed=0):
    rng = np.random.default_rng(seed)
    lo, hi = field.psi_range
    pts = [rng.uniform(lo, hi, n)] + [rng.uniform(0, 2 * np.pi, n) for _ in range(field.dim - 1)]
    return tuple(pts)
