import math

import numpy as np
import pytest

from bps_workbench.fields import FieldState, Grid2D, ModelParams, lift_radial
from bps_workbench.radial import solve_radial
from bps_workbench.topology import (
    bound_report,
    degree,
    degree_density,
    invariant_density,
)


def test_vacuum_degree_and_report(
    small_grid, power2, acceptance_potential, acceptance_params
):
    state = FieldState.vacuum(small_grid)
    assert degree(state) == 0.0
    report = bound_report(state, acceptance_potential, power2, acceptance_params)
    assert report.integral_i1 == 0.0
    assert report.energy == 0.0
    assert report.relative_gap == 0.0


def test_lifted_soliton_degree(bps_state):
    assert degree(bps_state) == pytest.approx(1.0, abs=2e-2)


def test_mirrored_soliton_has_negative_degree(acceptance_profile, bps_grid):
    one = lift_radial(acceptance_profile, bps_grid, 1)
    mirrored = one.with_fields(omega=np.conj(one.omega))
    assert degree(mirrored) == pytest.approx(-1.0, abs=2e-2)


def test_degree_density_is_localised(bps_state, bps_grid):
    density = degree_density(bps_state)
    X, Y = bps_grid.mesh()
    far = np.hypot(X, Y) > 7.0
    # the Gaussian tail of u is still about 1e-6 at r = 7
    assert np.max(np.abs(density[far])) < 1e-4 * np.max(np.abs(density))
    assert np.max(np.abs(density[far])) < 1e-5


def test_bound_is_saturated(
    bps_state, power2, acceptance_potential, acceptance_params
):
    report = bound_report(bps_state, acceptance_potential, power2, acceptance_params)
    assert report.relative_gap <= 1e-3
    assert report.bound == pytest.approx(2.0 * math.pi, rel=2e-2)
    assert report.invariant_charge == pytest.approx(1.0, abs=2e-2)
    # H + I1 is a sum of squares when V is generated by G1
    assert report.min_h_plus_i1 > -1e-9


def test_perturbation_opens_the_gap(
    bps_state, perturbed_state, power2, acceptance_potential, acceptance_params
):
    bps = bound_report(bps_state, acceptance_potential, power2, acceptance_params)
    off = bound_report(perturbed_state, acceptance_potential, power2, acceptance_params)
    assert off.relative_gap > 3.0 * bps.relative_gap
    assert off.min_h_plus_i1 > -1e-9


def test_invariant_density_vanishes_at_vacuum(small_grid, power2, acceptance_params):
    vacuum = FieldState.vacuum(small_grid)
    density = invariant_density(vacuum, power2, acceptance_params)
    assert np.all(density == 0.0)


@pytest.mark.parametrize("state_name", ["bps_state", "smooth_state"])
def test_density_plus_invariant_is_a_sum_of_squares(
    request, state_name, power2, acceptance_potential, acceptance_params
):
    from bps_workbench.energy import energy_density
    from bps_workbench.residuals import bogomolny_fields

    state = request.getfixturevalue(state_name)
    p = acceptance_params
    total = energy_density(state, acceptance_potential, p) + invariant_density(
        state, power2, p
    )
    r = bogomolny_fields(state, power2, p)
    squares = p.lambda4**2 / (4.0 * p.lambda1) * r["R1"] ** 2 + p.lambda2 * r["R2"] ** 2
    assert np.max(np.abs(total - squares)) < 1e-10
    assert np.min(total) > -1e-12


@pytest.fixture(scope="module")
def winding_two_profile(power2):
    return solve_radial(power2, ModelParams(1.0, 10.0, 1.0, n=2))


@pytest.mark.parametrize(
    "nodes", [128, pytest.param(256, marks=pytest.mark.slow)]
)
def test_winding_two_solution_has_degree_two(winding_two_profile, nodes):
    state = lift_radial(winding_two_profile, Grid2D.centred(nodes, 8.0), 2)
    assert degree(state) == pytest.approx(2.0, abs=1e-2)
