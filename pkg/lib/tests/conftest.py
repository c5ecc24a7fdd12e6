"""Shared fixtures.

The package is normally installed with ``pip install -e lib``; when it is not,
the ``lib`` directory is loaded under its package name so that the tests can
run from a plain checkout.
"""

import importlib.util
import pathlib
import sys

import numpy as np
import pytest

try:
    import bps_workbench  # noqa: F401
except ImportError:  # pragma: no cover
    _root = pathlib.Path(__file__).resolve().parents[1]
    _spec = importlib.util.spec_from_file_location(
        "bps_workbench",
        _root / "__init__.py",
        submodule_search_locations=[str(_root)],
    )
    _module = importlib.util.module_from_spec(_spec)
    sys.modules["bps_workbench"] = _module
    _spec.loader.exec_module(_module)

from bps_workbench.fields import FieldState, Grid2D, ModelParams, lift_radial
from bps_workbench.potentials import builtin_g, potential_from_g
from bps_workbench.radial import solve_radial


@pytest.fixture(scope="session")
def acceptance_params():
    return ModelParams(lambda1=1.0, lambda2=10.0, lambda4=1.0, n=1)


@pytest.fixture(scope="session")
def power2():
    return builtin_g("power", (2,))


@pytest.fixture(scope="session")
def acceptance_potential(power2, acceptance_params):
    return potential_from_g(power2, acceptance_params)


@pytest.fixture(scope="session")
def acceptance_profile(power2, acceptance_params):
    return solve_radial(power2, acceptance_params)


@pytest.fixture(scope="session")
def bps_grid():
    return Grid2D(128, 128, -8.0, 8.0, -8.0, 8.0)


@pytest.fixture(scope="session")
def bps_state(acceptance_profile, bps_grid):
    return lift_radial(acceptance_profile, bps_grid, 1)


@pytest.fixture(scope="session")
def perturbed_state(bps_state):
    """The lifted soliton with the gauge profile scaled by 1.1."""
    return bps_state.with_fields(a1=1.1 * bps_state.a1, a2=1.1 * bps_state.a2)


@pytest.fixture
def small_grid():
    return Grid2D(21, 17, -2.0, 2.0, -1.5, 1.7)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def smooth_state(small_grid):
    """A generic smooth non-symmetric configuration."""
    X, Y = small_grid.mesh()
    omega = (0.6 * X + 0.3j * Y + 0.2 * X * Y) * np.exp(-0.3 * (X**2 + Y**2))
    a1 = 0.4 * np.sin(Y) * np.exp(-0.2 * X**2)
    a2 = 0.3 * np.cos(X) * Y
    return FieldState(small_grid, omega, a1, a2)


@pytest.fixture
def random_smooth_state():
    """Factory for seeded smooth states with a Gaussian envelope."""

    def build(rng, grid):
        X, Y = grid.mesh()
        c = rng.uniform(-1.0, 1.0, size=9)
        envelope = np.exp(-rng.uniform(0.2, 0.5) * (X**2 + Y**2))
        omega = (
            c[0] * X + c[1] * Y + 1j * (c[2] * X + c[3] * Y) + c[4] * X * Y
        ) * envelope
        a1 = c[5] * np.sin(Y + c[6]) * envelope
        a2 = (c[7] * np.cos(X) * Y + c[8]) * envelope
        return FieldState(grid, omega, a1, a2)

    return build
