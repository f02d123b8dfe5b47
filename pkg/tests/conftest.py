import os

import pytest

from fibertrap.arraymode import FiberPairGeometry, solve_mode
from fibertrap.atom import CESIUM
from fibertrap.potentials import SILICA_DIELECTRIC, VdwModel
from fibertrap.trap import trap_metrics

WORKERS = max(1, min(8, os.cpu_count() or 1))


@pytest.fixture(scope="session")
def baseline_geometry():
    return FiberPairGeometry.from_nm(200, 300, 780, n_fiber=1.4537)


@pytest.fixture(scope="session")
def baseline_mode(baseline_geometry):
    """Baseline mode normalized to 100 mW."""
    return solve_mode(baseline_geometry, power=0.1)


@pytest.fixture(scope="session")
def vdw_model(baseline_geometry):
    """Cesium / silica model with the full radial table for a = 200 nm."""
    model = VdwModel(CESIUM, SILICA_DIELECTRIC, baseline_geometry.radius)
    model.build_table(workers=WORKERS)
    return model


@pytest.fixture(scope="session")
def baseline_trap(baseline_mode, vdw_model):
    return trap_metrics(baseline_mode, CESIUM, vdw_model)


ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def record_criterion(request):
    """Record one acceptance line; printed again in the terminal summary."""
    lines = request.config.stash.setdefault(ACCEPTANCE, [])

    def record(number, title, passed, detail):
        line = f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {title}: {detail}"
        lines.append((number, line))
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
