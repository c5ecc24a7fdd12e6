"""Static energy of the gauged restricted baby Skyrme model.

Two independent evaluations of the density are provided. The omega form
works with the covariant bracket

    X = i(w_x w*_y - w_y w*_x) - A1 (w_y w* + w w*_y) + A2 (w_x w* + w w*_x)

and reads ``H = 4 l1 X^2 / (1 + |w|^2)^4 + l2 B^2 + V(u)``. The unit-vector
form evaluates ``l1 (S . D1S x D2S)^2 + l2 B^2 + V(1 - S3)`` with the
covariant derivative ``D_i S = d_i S + A_i (n x S)``. Energies carry the
overall factor 1/2 of ``E = 1/2 integral H``.

The discrete energy gradient lives here too: it differentiates the
trapezoid-rule energy with respect to every nodal value, using the exact
adjoints of the difference operators.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .fields import (
    FieldJet,
    FieldState,
    ModelParams,
    diff_x,
    diff_x_adjoint,
    diff_y,
    diff_y_adjoint,
    field_jet,
    n_cross,
    stereographic,
    stereographic_jacobian,
    trapezoid_weights,
    weighted_sum,
)
from .potentials import PotentialSpec

log = logging.getLogger(__name__)

_NORTH = np.array([0.0, 0.0, 1.0])


def covariant_bracket(omega, omega_x, omega_y, a1, a2):
    """Evaluate the bracket X literally in complex arithmetic.

    The result is real up to rounding; callers take the real part.

    >>> float(covariant_bracket(0j, 1 + 0j, 1j, 0.0, 0.0).real)
    2.0
    """
    oc = np.conj(omega)
    oxc = np.conj(omega_x)
    oyc = np.conj(omega_y)
    return (
        1j * (omega_x * oyc - omega_y * oxc)
        - a1 * (omega_y * oc + omega * oyc)
        + a2 * (omega_x * oc + omega * oxc)
    )


def x_from_jet(jet: FieldJet) -> np.ndarray:
    """Real bracket X from a precomputed jet."""
    bracket = covariant_bracket(jet.omega, jet.omega_x, jet.omega_y, jet.a1, jet.a2)
    if log.isEnabledFor(logging.DEBUG):
        log.debug("Bracket X: max |Im| = %.3e", float(np.max(np.abs(bracket.imag))))
    return bracket.real


def x_density(state: FieldState) -> np.ndarray:
    """Covariant bracket X at every node."""
    return x_from_jet(field_jet(state))


def magnetic(state: FieldState) -> np.ndarray:
    """Magnetic field ``B = A2,x - A1,y``."""
    return diff_x(state.a2, state.grid) - diff_y(state.a1, state.grid)


def density_from_jet(
    jet: FieldJet, pot: PotentialSpec, params: ModelParams
) -> np.ndarray:
    """Omega-form energy density from a precomputed jet."""
    skyrme, maxwell, potential = _density_parts(jet, pot, params)
    return skyrme + maxwell + potential


def _density_parts(jet: FieldJet, pot: PotentialSpec, params: ModelParams):
    q = jet.q
    x = x_from_jet(jet)
    skyrme = 4.0 * params.lambda1 * x * x / q**4
    maxwell = params.lambda2 * jet.b * jet.b
    potential = np.asarray(pot.V(jet.u), dtype=float)
    return skyrme, maxwell, potential


def energy_density(
    state: FieldState, pot: PotentialSpec, params: ModelParams
) -> np.ndarray:
    """Energy density in the omega representation."""
    return density_from_jet(field_jet(state), pot, params)


@dataclass(frozen=True, eq=False)
class _SVectorTerms:
    s: np.ndarray = field(repr=False)
    d1: np.ndarray = field(repr=False)
    d2: np.ndarray = field(repr=False)
    t: np.ndarray = field(repr=False)
    b: np.ndarray = field(repr=False)


def _svector_terms(state: FieldState) -> _SVectorTerms:
    grid = state.grid
    s = stereographic(state.omega)
    ns = n_cross(s)
    d1 = diff_x(s, grid) + state.a1[..., None] * ns
    d2 = diff_y(s, grid) + state.a2[..., None] * ns
    # only tangent parts of d1, d2 survive the triple product
    t = np.sum(s * np.cross(d1, d2), axis=-1)
    return _SVectorTerms(s=s, d1=d1, d2=d2, t=t, b=magnetic(state))


def energy_density_svector(
    state: FieldState, pot: PotentialSpec, params: ModelParams
) -> np.ndarray:
    """Energy density in the unit-vector representation (cross-check oracle)."""
    terms = _svector_terms(state)
    u = 1.0 - terms.s[..., 2]
    return (
        params.lambda1 * terms.t**2
        + params.lambda2 * terms.b**2
        + np.asarray(pot.V(u), dtype=float)
    )


def total_energy(state: FieldState, pot: PotentialSpec, params: ModelParams) -> float:
    """``1/2`` times the trapezoid integral of the energy density."""
    density = energy_density(state, pot, params)
    return 0.5 * weighted_sum(density, trapezoid_weights(state.grid))


@dataclass(frozen=True)
class EnergyComponents:
    """Skyrme, Maxwell and potential contributions to the total energy."""

    skyrme: float
    maxwell: float
    potential: float

    @property
    def total(self) -> float:
        return self.skyrme + self.maxwell + self.potential


def energy_components(
    state: FieldState, pot: PotentialSpec, params: ModelParams
) -> EnergyComponents:
    """Split the total energy into its three terms."""
    weights = trapezoid_weights(state.grid)
    parts = _density_parts(field_jet(state), pot, params)
    skyrme, maxwell, potential = (0.5 * weighted_sum(p, weights) for p in parts)
    return EnergyComponents(skyrme=skyrme, maxwell=maxwell, potential=potential)


@dataclass(frozen=True, eq=False)
class EnergyGradient:
    """Partial derivatives of the discrete energy with respect to nodal values.

    ``omega`` packs ``dE/dRe(omega) + i dE/dIm(omega)``.
    """

    omega: np.ndarray = field(repr=False)
    a1: np.ndarray = field(repr=False)
    a2: np.ndarray = field(repr=False)

    def squared_norm(self) -> float:
        return float(
            np.sum(np.abs(self.omega) ** 2) + np.sum(self.a1**2) + np.sum(self.a2**2)
        )


def energy_gradient(
    state: FieldState, pot: PotentialSpec, params: ModelParams
) -> EnergyGradient:
    """Exact gradient of the trapezoid energy, boundary nodes included."""
    grid = state.grid
    w = trapezoid_weights(grid)
    terms = _svector_terms(state)
    s, d1, d2 = terms.s, terms.d1, terms.d2

    # dT/dd1 and dT/dd2 for T = S . (d1 x d2)
    p1 = np.cross(d2, s)
    p2 = np.cross(s, d1)
    wt = (params.lambda1 * w * terms.t)[..., None]
    t_s = (
        np.cross(d1, d2)
        + state.a1[..., None] * np.cross(p1, _NORTH)
        + state.a2[..., None] * np.cross(p2, _NORTH)
    )
    g_s = wt * t_s + diff_x_adjoint(wt * p1, grid) + diff_y_adjoint(wt * p2, grid)
    u = 1.0 - s[..., 2]
    g_s[..., 2] -= 0.5 * w * np.asarray(pot.Vprime(u), dtype=float)

    d_re, d_im = stereographic_jacobian(state.omega)
    g_re = np.sum(g_s * d_re, axis=-1)
    g_im = np.sum(g_s * d_im, axis=-1)

    ns = n_cross(s)
    wb = params.lambda2 * w * terms.b
    g_a1 = wt[..., 0] * np.sum(p1 * ns, axis=-1) - diff_y_adjoint(wb, grid)
    g_a2 = wt[..., 0] * np.sum(p2 * ns, axis=-1) + diff_x_adjoint(wb, grid)
    return EnergyGradient(omega=g_re + 1j * g_im, a1=g_a1, a2=g_a2)
