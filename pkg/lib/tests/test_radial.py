import logging
import math

import numpy as np
import pytest

from bps_workbench.errors import DomainError, SingularityError
from bps_workbench.fields import ModelParams, lift_radial
from bps_workbench.potentials import builtin_g
from bps_workbench.radial import (
    RadialProfile,
    SolverOptions,
    Termination,
    asymptotic_gauge,
    power_first_integral,
    radial_densities,
    radial_energy,
    reduced_rhs,
    solve_radial,
    stretch_profile,
)
from bps_workbench.topology import degree


def test_acceptance_profile_shape(acceptance_profile):
    p = acceptance_profile
    assert p.termination is Termination.VACUUM
    assert p.r[0] == 0.0
    assert p.u[0] == 2.0
    assert p.a[0] == 0.0
    assert np.all(np.diff(p.u) <= 1e-12)
    assert np.all(np.diff(p.a) <= 1e-12)
    assert p.u_end <= 1.1e-10
    assert 8.0 < p.r_end < 11.0


def test_acceptance_energy_and_bound(acceptance_profile, power2, acceptance_params):
    result = radial_energy(acceptance_profile, power2, acceptance_params)
    assert result.energy == pytest.approx(2.0 * math.pi, rel=1e-6)
    assert result.bound == pytest.approx(result.energy, rel=1e-4)
    assert result.charge_bound == pytest.approx(2.0 * math.pi, rel=1e-8)
    assert result.relative_gap < 1e-4


def test_tolerance_halving_is_stable(acceptance_profile, power2, acceptance_params):
    refined = solve_radial(power2, acceptance_params, SolverOptions().halved())
    e0 = radial_energy(acceptance_profile, power2, acceptance_params).energy
    e1 = radial_energy(refined, power2, acceptance_params).energy
    assert abs(e1 - e0) <= 1e-8 * e0


def test_densities_are_on_shell(acceptance_profile, power2, acceptance_params):
    densities = radial_densities(acceptance_profile, power2, acceptance_params)
    assert densities.on_shell_error() < 1e-12
    assert densities.max_abs_sum() < 1e-12


def test_first_integral_is_conserved(acceptance_profile, power2, acceptance_params):
    drift = power_first_integral(acceptance_profile, power2, acceptance_params)
    assert np.max(np.abs(drift)) < 1e-7
    assert acceptance_profile.a_end == pytest.approx(
        asymptotic_gauge(power2, acceptance_params), abs=1e-6
    )


@pytest.mark.parametrize(
    "family, params, n, expected",
    [
        ("scaled", (0.5, 2), 1, math.pi),
        ("power", (2,), 2, 4.0 * math.pi),
        ("scaled", (2.0, 2), 1, 4.0 * math.pi),
    ],
)
def test_energy_equals_charge_bound(family, params, n, expected):
    g = builtin_g(family, params)
    model = ModelParams(1.0, 10.0, 1.0, n)
    profile = solve_radial(g, model)
    assert profile.termination.is_regular()
    assert radial_energy(profile, g, model).energy == pytest.approx(expected, rel=1e-5)


def test_strong_gauge_coupling_is_singular(power2):
    profile = solve_radial(power2, ModelParams(1.0, 0.01, 1.0))
    assert profile.termination is Termination.SINGULARITY
    assert not profile.termination.is_regular()
    assert 1.0 + profile.a_end == pytest.approx(1e-6, rel=1e-3)
    assert profile.u_end > 0.0


def test_negative_coupling_selects_decaying_branch(
    acceptance_profile, power2, caplog
):
    with caplog.at_level(logging.WARNING):
        profile = solve_radial(power2, ModelParams(1.0, 10.0, -1.0))
    assert profile.branch == -1
    assert "decaying branch" in caplog.text
    assert np.array_equal(profile.u, acceptance_profile.u)


def test_reversed_winding_and_coupling_give_the_same_profile(
    acceptance_profile, power2, bps_grid
):
    profile = solve_radial(power2, ModelParams(1.0, 10.0, -1.0, n=-1))
    assert profile.branch == 1
    assert profile.n == -1
    assert profile.termination is Termination.VACUUM
    assert np.allclose(profile.r, acceptance_profile.r, rtol=1e-12, atol=0.0)
    assert np.allclose(profile.u, acceptance_profile.u, rtol=1e-12, atol=1e-15)
    assert np.allclose(profile.a, acceptance_profile.a, rtol=1e-12, atol=1e-15)
    state = lift_radial(profile, bps_grid, profile.n)
    assert degree(state) == pytest.approx(-1.0, abs=2e-2)


def test_degenerate_family_stays_at_the_pole():
    g = builtin_g("zero")
    profile = solve_radial(g, ModelParams(1.0, 1.0, 1.0), SolverOptions(r_max=1.0))
    assert profile.degenerate
    assert profile.termination is Termination.MAX_RADIUS
    assert np.all(profile.u == 2.0)


def test_compacton_classification(power2, acceptance_params):
    profile = solve_radial(
        power2, acceptance_params, SolverOptions(compacton_ratio=1e6)
    )
    assert profile.termination is Termination.COMPACTON
    u, a = profile.interpolate([profile.r_end + 1.0])
    assert u[0] == 0.0
    assert a[0] == profile.a_end


def test_interpolation_beyond_a_singular_end(power2):
    profile = solve_radial(power2, ModelParams(1.0, 0.01, 1.0))
    u, _ = profile.interpolate([profile.r_end + 1.0])
    assert u[0] == profile.u_end


def test_reduced_rhs_rejects_singular_gauge(power2):
    with pytest.raises(SingularityError):
        reduced_rhs(1.0, 1.0, -1.5, power2, ModelParams(1.0, 1.0, 1.0))


def test_stretch_profile(acceptance_profile):
    stretched = stretch_profile(acceptance_profile, 1.3)
    assert stretched.r_end == pytest.approx(1.3 * acceptance_profile.r_end)
    assert np.array_equal(stretched.u, acceptance_profile.u)
    u0, _ = acceptance_profile.interpolate([1.0])
    u1, _ = stretched.interpolate([1.3])
    assert u1[0] == pytest.approx(u0[0], rel=1e-9)
    with pytest.raises(DomainError):
        stretch_profile(acceptance_profile, 0.0)


@pytest.mark.parametrize(
    "r, u, a",
    [
        ([0.1, 0.2], [2.0, 1.0], [0.0, 0.0]),
        ([0.0, 0.2], [2.0, 2.5], [0.0, 0.0]),
        ([0.0, 0.2], [2.0, 1.0], [0.0, -1.0]),
        ([0.0, 0.2, 0.1], [2.0, 1.0, 0.5], [0.0, 0.0, 0.0]),
    ],
)
def test_profile_validation(r, u, a):
    with pytest.raises(DomainError):
        RadialProfile(np.array(r), np.array(u), np.array(a), Termination.VACUUM)


def test_solver_options_validation():
    with pytest.raises(DomainError):
        SolverOptions(rtol=0.0)
    with pytest.raises(DomainError):
        SolverOptions(r_start=1.0, r_max=0.5)
