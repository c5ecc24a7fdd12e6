import math

import numpy as np
import pytest

from bps_workbench.energy import (
    energy_components,
    energy_density,
    energy_density_svector,
    energy_gradient,
    magnetic,
    total_energy,
    x_density,
)
from bps_workbench.fields import FieldState, Grid2D, ModelParams
from bps_workbench.potentials import builtin_g, potential_from_g


def test_vacuum_has_zero_energy(small_grid, acceptance_potential, acceptance_params):
    state = FieldState.vacuum(small_grid)
    assert total_energy(state, acceptance_potential, acceptance_params) == 0.0


def test_uniform_magnetic_field():
    grid = Grid2D(11, 11, 0.0, 1.0, 0.0, 1.0)
    X, _ = grid.mesh()
    zeros = np.zeros(grid.shape)
    state = FieldState(grid, zeros.astype(complex), zeros, X)
    params = ModelParams(1.0, 3.0, 1.0)
    pot = potential_from_g(builtin_g("power", (2,)), params)
    assert total_energy(state, pot, params) == pytest.approx(1.5, abs=1e-6)


def test_constant_field_has_no_bracket():
    grid = Grid2D(9, 9, -1.0, 1.0, -1.0, 1.0)
    X, Y = grid.mesh()
    omega = np.full(grid.shape, 0.3 - 0.8j)
    state = FieldState(grid, omega, 2.0 * Y, X)
    assert np.max(np.abs(x_density(state))) < 1e-14
    assert np.allclose(magnetic(state), -1.0, atol=1e-12)


def test_omega_and_unit_vector_forms_agree(smooth_state, acceptance_potential):
    params = ModelParams(0.7, 2.0, -1.3)
    a = energy_density(smooth_state, acceptance_potential, params)
    b = energy_density_svector(smooth_state, acceptance_potential, params)
    assert np.allclose(a, b, rtol=1e-10, atol=1e-13)


def test_forms_agree_near_the_pole(bps_state, acceptance_potential, acceptance_params):
    a = energy_density(bps_state, acceptance_potential, acceptance_params)
    b = energy_density_svector(bps_state, acceptance_potential, acceptance_params)
    assert np.max(np.abs(a - b)) < 1e-9 * np.max(np.abs(a))


def test_components_add_up(smooth_state, acceptance_potential, acceptance_params):
    parts = energy_components(smooth_state, acceptance_potential, acceptance_params)
    total = total_energy(smooth_state, acceptance_potential, acceptance_params)
    assert parts.total == pytest.approx(total, rel=1e-12)
    assert min(parts.skyrme, parts.maxwell, parts.potential) > 0


def test_gradient_matches_finite_differences(smooth_state, acceptance_potential):
    params = ModelParams(1.0, 2.0, 1.0)
    grad = energy_gradient(smooth_state, acceptance_potential, params)
    eps = 1e-6

    def energy_with(name, index, delta):
        values = np.array(getattr(smooth_state, name))
        values[index] += delta
        return total_energy(
            smooth_state.with_fields(**{name: values}), acceptance_potential, params
        )

    # one interior node, one boundary node
    for index in [(8, 10), (0, 3)]:
        for name, expected in (
            ("a1", grad.a1[index]),
            ("a2", grad.a2[index]),
            ("omega", grad.omega[index].real),
        ):
            fd = (energy_with(name, index, eps) - energy_with(name, index, -eps)) / (
                2 * eps
            )
            assert fd == pytest.approx(expected, rel=1e-5, abs=1e-9)
        fd_im = (
            energy_with("omega", index, 1j * eps)
            - energy_with("omega", index, -1j * eps)
        ) / (2 * eps)
        assert fd_im == pytest.approx(grad.omega[index].imag, rel=1e-5, abs=1e-9)


def test_lifted_soliton_energy(bps_state, acceptance_potential, acceptance_params):
    energy = total_energy(bps_state, acceptance_potential, acceptance_params)
    assert energy == pytest.approx(2.0 * math.pi, rel=2e-2)


def test_energy_is_gauge_invariant_on_fine_grids(acceptance_potential):
    from bps_workbench.fields import diff_x, diff_y, gauge_transform

    params = ModelParams(1.0, 1.0, 1.0)
    grid = Grid2D(81, 81, -3.0, 3.0, -3.0, 3.0)
    X, Y = grid.mesh()
    omega = (X + 0.5j * Y) * np.exp(-0.4 * (X**2 + Y**2))
    state = FieldState(grid, omega, 0.1 * Y, 0.2 * X)
    chi = 0.5 * np.cos(0.7 * X) * np.sin(0.4 * Y)
    moved = gauge_transform(state, chi, diff_x(chi, grid), diff_y(chi, grid))
    assert total_energy(moved, acceptance_potential, params) == pytest.approx(
        total_energy(state, acceptance_potential, params), rel=1e-3
    )


def test_forms_agree_on_random_states(random_smooth_state, rng, acceptance_potential):
    grid = Grid2D(64, 64, -3.0, 3.0, -3.0, 3.0)
    params = ModelParams(1.0, 10.0, 1.0)
    for _ in range(100):
        state = random_smooth_state(rng, grid)
        a = energy_density(state, acceptance_potential, params)
        b = energy_density_svector(state, acceptance_potential, params)
        assert np.max(np.abs(a - b)) <= 1e-10 * np.max(np.abs(a))


def _directional_derivative(state, direction, pot, params, eps=1e-6):
    d_omega, d_a1, d_a2 = direction

    def shifted(t):
        return state.with_fields(
            omega=state.omega + t * d_omega,
            a1=state.a1 + t * d_a1,
            a2=state.a2 + t * d_a2,
        )

    forward = total_energy(shifted(eps), pot, params)
    backward = total_energy(shifted(-eps), pot, params)
    return (forward - backward) / (2.0 * eps)


def _pairing(grad, direction):
    d_omega, d_a1, d_a2 = direction
    return float(
        np.sum(grad.omega.real * d_omega.real + grad.omega.imag * d_omega.imag)
        + np.sum(grad.a1 * d_a1)
        + np.sum(grad.a2 * d_a2)
    )


def test_gradient_matches_random_directions(
    random_smooth_state, rng, acceptance_potential
):
    grid = Grid2D(64, 64, -3.0, 3.0, -3.0, 3.0)
    params = ModelParams(1.0, 10.0, 1.0)
    state = random_smooth_state(rng, grid)
    grad = energy_gradient(state, acceptance_potential, params)
    for _ in range(20):
        direction = (
            rng.normal(size=grid.shape) + 1j * rng.normal(size=grid.shape),
            rng.normal(size=grid.shape),
            rng.normal(size=grid.shape),
        )
        fd = _directional_derivative(state, direction, acceptance_potential, params)
        assert _pairing(grad, direction) == pytest.approx(fd, rel=1e-6, abs=1e-9)
