"""Topological invariant density, degree and Bogomolny-bound diagnostics."""

import logging
import math
from dataclasses import dataclass

import numpy as np

from .energy import density_from_jet, x_from_jet
from .fields import (
    FieldJet,
    FieldState,
    ModelParams,
    diff_x,
    diff_y,
    field_jet,
    stereographic,
    trapezoid_weights,
    weighted_sum,
)
from .potentials import GProfile, PotentialSpec

log = logging.getLogger(__name__)


def invariant_from_jet(jet: FieldJet, g: GProfile, params: ModelParams) -> np.ndarray:
    """``I1 = l4 (2 G1'(u) X / q^2 + G1(u) B)`` from a precomputed jet."""
    u = jet.u
    x = x_from_jet(jet)
    return params.lambda4 * (2.0 * g.gprime(u) * x / jet.q**2 + g.g(u) * jet.b)


def invariant_density(
    state: FieldState, g: GProfile, params: ModelParams
) -> np.ndarray:
    """Invariant density I1 at every node."""
    return invariant_from_jet(field_jet(state), g, params)


def degree_density(state: FieldState) -> np.ndarray:
    """Pulled-back area form ``S . (S_x x S_y)``."""
    s = stereographic(state.omega)
    sx = diff_x(s, state.grid)
    sy = diff_y(s, state.grid)
    return np.sum(s * np.cross(sx, sy), axis=-1)


def degree(state: FieldState) -> float:
    """Topological degree ``Q = -(1 / 4 pi) int S . (S_x x S_y)``.

    The sign makes ``omega = f(r) exp(i n theta)`` with f decreasing from the
    pole to zero have ``Q = n``.
    """
    total = weighted_sum(degree_density(state), trapezoid_weights(state.grid))
    return -total / (4.0 * math.pi)


@dataclass(frozen=True)
class InvariantReport:
    """Bound diagnostics of one field state."""

    integral_i1: float
    degree_q: float
    max_abs_h_plus_i1: float
    min_h_plus_i1: float
    energy: float
    invariant_charge: float

    @property
    def bound(self) -> float:
        """``-1/2 int I1``."""
        return -0.5 * self.integral_i1

    @property
    def relative_gap(self) -> float:
        """``|E + 1/2 int I1| / E`` (zero for the vacuum)."""
        return abs(self.energy - self.bound) / self.energy if self.energy else 0.0


def bound_report(
    state: FieldState, pot: PotentialSpec, g: GProfile, params: ModelParams
) -> InvariantReport:
    """Integrate I1 and compare it with the energy node by node.

    ``invariant_charge`` is ``-int I1 / (2 pi l4 G1(2))``; for well-resolved
    states it approaches the degree because I1 is G1' times the pulled-back
    area form plus a total derivative.
    """
    jet = field_jet(state)
    weights = trapezoid_weights(state.grid)
    density = density_from_jet(jet, pot, params)
    inv = invariant_from_jet(jet, g, params)
    total = density + inv
    integral = weighted_sum(inv, weights)
    g_top = float(g.g(np.float64(2.0)))
    report = InvariantReport(
        integral_i1=integral,
        degree_q=degree(state),
        max_abs_h_plus_i1=float(np.max(np.abs(total))),
        min_h_plus_i1=float(np.min(total)),
        energy=0.5 * weighted_sum(density, weights),
        invariant_charge=(
            -integral / (2.0 * math.pi * params.lambda4 * g_top) if g_top else 0.0
        ),
    )
    log.debug("Bound report: %s", report)
    return report
