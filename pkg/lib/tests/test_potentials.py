import numpy as np
import pytest

from bps_workbench.errors import DomainError, UnknownFamilyError
from bps_workbench.fields import ModelParams
from bps_workbench.potentials import (
    FAMILIES,
    GProfile,
    builtin_g,
    check_condition,
    parse_g_spec,
    potential_from_g,
    potential_from_table,
    tabulate,
)

UNIT = ModelParams(1.0, 1.0, 1.0)


@pytest.mark.parametrize("spec", ["power:2", "power:3.5", "scaled:-0.5,2", "zero"])
def test_builtin_families_vanish_at_the_vacuum(spec):
    g = parse_g_spec(spec)
    assert float(g.g(np.float64(0.0))) == 0.0
    assert float(g.gprime(np.float64(0.0))) == 0.0
    assert g.family in FAMILIES


def test_power_two_potential():
    pot = potential_from_g(builtin_g("power", (2,)), UNIT)
    u = np.linspace(0.0, 2.0, 11)
    assert np.allclose(pot.V(u), (u**2 + u**4 / 4.0) / 4.0, atol=1e-15)
    assert pot.provenance == "from-G1"


def test_generated_potential_derivative():
    g = builtin_g("scaled", (0.7, 3))
    params = ModelParams(1.3, 0.4, -2.0)
    pot = potential_from_g(g, params)
    u = np.linspace(0.1, 1.9, 7)
    h = 1e-6
    numeric = (pot.V(u + h) - pot.V(u - h)) / (2 * h)
    assert np.allclose(pot.Vprime(u), numeric, rtol=1e-6)


def test_condition_holds_for_generated_potentials():
    for spec in ("power:2", "scaled:0.5,2", "power:4", "zero"):
        g = parse_g_spec(spec)
        assert check_condition(potential_from_g(g, UNIT), g, UNIT) < 1e-13


def test_condition_fails_for_scaled_potential():
    g = builtin_g("power", (2,))
    pot = potential_from_g(g, UNIT).scaled(1.1)
    assert check_condition(pot, g, UNIT) == pytest.approx(0.1 * 2.0, rel=1e-12)


@pytest.mark.parametrize(
    "family, params, error",
    [
        ("power", (1.5,), DomainError),
        ("power", (), DomainError),
        ("scaled", (0.0, 2), DomainError),
        ("zero", (1,), DomainError),
        ("exponential", (1,), UnknownFamilyError),
    ],
)
def test_builtin_errors(family, params, error):
    with pytest.raises(error):
        builtin_g(family, params)


def test_malformed_spec():
    with pytest.raises(DomainError):
        parse_g_spec("power:two")


def test_profile_must_vanish_at_the_vacuum():
    with pytest.raises(DomainError):
        GProfile(lambda u: u + 1.0, lambda u: np.ones_like(u), np.zeros_like)


def test_degenerate_detection():
    assert builtin_g("zero").is_degenerate()
    assert not builtin_g("power", (2,)).is_degenerate()


def test_table_potential_reproduces_samples():
    g = builtin_g("power", (2,))
    u = np.linspace(0.0, 2.0, 401)
    exact = potential_from_g(g, UNIT)
    pot = potential_from_table(u, exact.V(u))
    assert pot.provenance == "user-supplied"
    assert np.allclose(pot.V(u), exact.V(u), atol=1e-14)
    assert check_condition(pot, g, UNIT, 1001) < 1e-4


@pytest.mark.parametrize(
    "u, v",
    [
        ([0.0, 1.0], [0.0, 1.0]),
        ([0.0, 1.0, 2.0], [0.1, 1.0, 2.0]),
        ([0.0, 1.0, 2.0], [0.0, -1.0, 2.0]),
        ([0.0, 2.0, 1.0], [0.0, 1.0, 2.0]),
    ],
)
def test_table_validation(u, v):
    with pytest.raises(DomainError):
        potential_from_table(np.array(u), np.array(v))


def test_validate_rejects_vacuum_offset():
    pot = potential_from_g(builtin_g("power", (2,)), UNIT).shifted(0.5)
    with pytest.raises(DomainError):
        pot.validate()


def test_tabulate():
    g = builtin_g("power", (2,))
    table = tabulate(potential_from_g(g, UNIT), g, UNIT, 5)
    assert table.u.tolist() == [0.0, 0.5, 1.0, 1.5, 2.0]
    assert table.v[-1] == 2.0
    assert table.max_error == 0.0


def test_condition_error_of_a_linear_potential():
    g = builtin_g("power", (2,))
    u = np.linspace(0.0, 2.0, 201)
    pot = potential_from_table(u, u)
    error = np.abs(u - (u**2 + u**4 / 4.0) / 4.0)
    worst = int(np.argmax(error))
    assert 0 < worst < u.size - 1
    assert check_condition(pot, g, UNIT) == pytest.approx(error[worst], rel=1e-12)
    assert error[worst] == pytest.approx(0.7107, abs=1e-3)
