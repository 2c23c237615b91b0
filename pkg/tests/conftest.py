import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

settings.register_profile("default", max_examples=60, deadline=None)
settings.register_profile("ci", max_examples=300, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("quick", max_examples=15, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

SEED = int(os.environ.get("NBODY_SEED", "20240917"))


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


coord = st.floats(-4, 4, allow_nan=False, allow_infinity=False)
points = st.builds(complex, coord, coord)
radii = st.sampled_from([0.5, 1.0, 2.0])
masses = st.floats(0.05, 5.0)


def random_points(rng, n, R=1.0):
    return R * (rng.normal(size=n) + 1j * rng.normal(size=n))


def well_separated(z, R=1.0, gap=1e-2):
    z = np.asarray(z)
    k, j = np.triu_indices(len(z), 1)
    return bool(np.all(np.abs(z[j] - z[k]) > gap * R)
                and np.all(np.abs(R**2 + np.conj(z[j]) * z[k]) > gap * R**2))


_RESULTS = {}


def record(name, ok, detail):
    _RESULTS[name] = (ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_RESULTS, key=lambda s: int(s.split()[1])):
        ok, detail = _RESULTS[name]
        terminalreporter.write_line(f"{name}: {'PASS' if ok else 'FAIL'}  {detail}")
