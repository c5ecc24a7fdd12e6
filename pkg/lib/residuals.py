"""Euler-Lagrange, Bogomolny and dual-equation residuals.

Grid residuals are reported as :class:`ResidualReport` with norms taken over
the interior nodes. The pointwise checks work on :class:`PointJet` values and
evaluate the strong necessary conditions of the gauge-shifted density
``H + I1 + D_x G2 + D_y G3`` after the substitutions

* ``X = -l4 q^2 G1'(u) / (4 l1)`` (fixes the bracket),
* ``b = -l4 G1(u) / (2 l2)`` (fixes the magnetic field),
* ``G2``, ``G3`` constant (their derivative terms vanish).
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .energy import energy_gradient, x_from_jet
from .fields import (
    FieldState,
    ModelParams,
    PointJet,
    field_jet,
    interior_mask,
    trapezoid_weights,
)
from .potentials import GProfile, PotentialSpec

log = logging.getLogger(__name__)

DEFAULT_JET_SEED = 20240607


@dataclass(frozen=True)
class ResidualReport:
    """Sup and l2 norms of a set of residual fields.

    ``l2_norm`` is the Euclidean norm over all ``entry_count`` entries, so
    ``sup_norm >= l2_norm / sqrt(entry_count)``.
    """

    sup_norm: float
    l2_norm: float
    breakdown: Tuple[Tuple[str, float], ...] = ()
    entry_count: int = 0
    seed: int = -1

    def __post_init__(self) -> None:
        if self.sup_norm < 0 or self.l2_norm < 0:
            raise ValueError("residual norms must be nonnegative")

    def sup(self, label: str) -> float:
        """Sup-norm of one labelled equation."""
        return dict(self.breakdown)[label]

    @classmethod
    def from_fields(
        cls, fields: Dict[str, np.ndarray], mask: Optional[np.ndarray] = None
    ) -> "ResidualReport":
        breakdown = []
        squares = []
        count = 0
        for label, values in fields.items():
            selected = np.abs(values[mask] if mask is not None else np.ravel(values))
            breakdown.append((label, float(np.max(selected)) if selected.size else 0.0))
            squares.append(math.fsum(np.ravel(selected**2)))
            count += selected.size
        return cls(
            sup_norm=max((v for _, v in breakdown), default=0.0),
            l2_norm=math.sqrt(math.fsum(squares)),
            breakdown=tuple(breakdown),
            entry_count=count,
        )


def el_residual_fields(
    state: FieldState, pot: PotentialSpec, params: ModelParams
) -> Dict[str, np.ndarray]:
    """Nodewise Euler-Lagrange residuals.

    Each is ``-2 dE_h / d(value) / w`` with ``w`` the quadrature weight, i.e.
    the discrete variational derivative of the energy density integral. For
    omega the complex combination ``dE/dRe - i dE/dIm`` is used; the conjugate
    equation is its complex conjugate. The gauge equations use the curvature
    ``A2,x - A1,y``.
    """
    grad = energy_gradient(state, pot, params)
    w = trapezoid_weights(state.grid)
    omega = -np.conj(grad.omega) / w
    return {
        "omega": omega,
        "omega_conj": np.conj(omega),
        "a1": -2.0 * grad.a1 / w,
        "a2": -2.0 * grad.a2 / w,
    }


def el_residual(
    state: FieldState, pot: PotentialSpec, params: ModelParams
) -> ResidualReport:
    """Euler-Lagrange residual norms over interior nodes."""
    report = ResidualReport.from_fields(
        el_residual_fields(state, pot, params), interior_mask(state.grid)
    )
    log.debug("EL residual: sup %.3e, l2 %.3e", report.sup_norm, report.l2_norm)
    return report


def bogomolny_fields(
    state: FieldState, g: GProfile, params: ModelParams
) -> Dict[str, np.ndarray]:
    """``R1 = 4 l1 X / (l4 q^2) + G1'(u)`` and ``R2 = B + l4 G1(u) / (2 l2)``."""
    jet = field_jet(state)
    x = x_from_jet(jet)
    u = jet.u
    return {
        "R1": 4.0 * params.lambda1 * x / (params.lambda4 * jet.q**2) + g.gprime(u),
        "R2": jet.b + params.lambda4 * g.g(u) / (2.0 * params.lambda2),
    }


def bogomolny_residual(
    state: FieldState, g: GProfile, params: ModelParams
) -> ResidualReport:
    """Bogomolny residual norms over interior nodes."""
    report = ResidualReport.from_fields(
        bogomolny_fields(state, g, params), interior_mask(state.grid)
    )
    log.debug(
        "Bogomolny residual: R1 %.3e, R2 %.3e", report.sup("R1"), report.sup("R2")
    )
    return report


def _substituted(jet: PointJet, g: GProfile, params: ModelParams, b_shift: float):
    u = jet.u
    q = 1.0 + abs(jet.omega) ** 2
    gp = float(g.gprime(np.float64(u)))
    x = -params.lambda4 * q * q * gp / (4.0 * params.lambda1)
    b = -params.lambda4 * float(g.g(np.float64(u))) / (2.0 * params.lambda2) + b_shift
    return u, q, gp, x, b


def dual_residual_breakdown(
    jet: PointJet, g: GProfile, params: ModelParams, b_shift: float = 0.0
) -> Dict[str, complex]:
    """Values of the eight strong necessary conditions after substitution.

    Keys name the variable each condition differentiates by: ``omega_x``,
    ``omega_y``, ``omega_conj_x``, ``omega_conj_y``, ``a1``, ``a2``, ``a1_y``
    and ``a2_x``. ``b_shift`` perturbs the magnetic-field substitution.
    """
    u, q, gp, x, b = _substituted(jet, g, params, b_shift)
    w, wx, wy = jet.omega, jet.omega_x, jet.omega_y
    wc, wxc, wyc = w.conjugate(), wx.conjugate(), wy.conjugate()
    a1, a2 = jet.a1, jet.a2
    l4 = params.lambda4
    skyrme = 8.0 * params.lambda1 * x / q**4
    linear = 2.0 * l4 * gp / q**2
    # G2,omega = G3,omega = 0 for constant G2, G3
    curvature = 2.0 * params.lambda2 * b + l4 * float(g.g(np.float64(u)))
    return {
        "omega_x": skyrme * (1j * wyc + a2 * wc) + linear * (1j * wyc + a2 * wc),
        "omega_y": skyrme * (-1j * wxc - a1 * wc) + linear * (-1j * wxc - a1 * wc),
        "omega_conj_x": skyrme * (-1j * wy + a2 * w) + linear * (-1j * wy + a2 * w),
        "omega_conj_y": skyrme * (1j * wx - a1 * w) + linear * (1j * wx - a1 * w),
        "a1": skyrme * (-wy * wc - w * wyc) + linear * (-wy * wc - w * wyc),
        "a2": skyrme * (wx * wc + w * wxc) + linear * (wx * wc + w * wxc),
        "a1_y": -curvature,
        "a2_x": curvature,
    }


def dual_tautology_check(
    jet: PointJet, g: GProfile, params: ModelParams, b_shift: float = 0.0
) -> float:
    """Largest magnitude among the substituted strong necessary conditions.

    >>> from .potentials import builtin_g
    >>> jet = PointJet(0j, 1 + 1j, -1j, 0.5, -0.5, 3.0)
    >>> dual_tautology_check(jet, builtin_g("power", (2,)), ModelParams(1, 1, 1))
    0.0
    """
    values = dual_residual_breakdown(jet, g, params, b_shift)
    return max(abs(v) for v in values.values())


def dual_el_values(
    jet: PointJet, g: GProfile, pot: PotentialSpec, params: ModelParams
) -> Tuple[complex, complex]:
    """The omega and omega* equations of the shifted density, substituted."""
    u, q, gp, x, b = _substituted(jet, g, params, 0.0)
    gpp = float(g.gsecond(np.float64(u)))
    vp = float(pot.Vprime(np.float64(u)))
    l1, l4 = params.lambda1, params.lambda4
    w, wx, wy = jet.omega, jet.omega_x, jet.omega_y
    a1, a2 = jet.a1, jet.a2

    def one_side(v: complex, vx: complex, vy: complex) -> complex:
        # v is the conjugate partner of the variable being differentiated
        mixed = -a1 * vy + a2 * vx
        return (
            -16.0 * l1 * x * x * v / q**5
            + 8.0 * l1 * x / q**4 * mixed
            + vp * 2.0 * v / q**2
            + l4
            * (
                gpp * 4.0 * v * x / q**4
                + 2.0 * gp * mixed / q**2
                - 4.0 * gp * x * v / q**3
                + gp * 2.0 * v * b / q**2
            )
        )

    return (
        one_side(w.conjugate(), wx.conjugate(), wy.conjugate()),
        one_side(w, wx, wy),
    )


def dual_el_consistency(
    jet: PointJet, g: GProfile, pot: PotentialSpec, params: ModelParams
) -> float:
    """Largest magnitude of the substituted omega and omega* equations.

    Vanishes for every jet exactly when ``pot`` satisfies the existence
    condition for ``g``.
    """
    return max(abs(v) for v in dual_el_values(jet, g, pot, params))


def random_jets(
    rng: np.random.Generator, count: int, scale: float = 2.0
) -> List[PointJet]:
    """Jets with every real component uniform in ``[-scale, scale]``."""
    values = rng.uniform(-scale, scale, size=(count, 9))
    return [
        PointJet(
            omega=complex(v[0], v[1]),
            omega_x=complex(v[2], v[3]),
            omega_y=complex(v[4], v[5]),
            a1=float(v[6]),
            a2=float(v[7]),
            b=float(v[8]),
        )
        for v in values
    ]


@dataclass(frozen=True)
class JetSweep:
    """Worst dual-equation residuals over a batch of random jets."""

    samples: int
    seed: int
    tautology: float
    el_consistency: float
    worst: Sequence[Tuple[str, float]] = field(default=())


def sweep_jets(
    g: GProfile,
    pot: PotentialSpec,
    params: ModelParams,
    samples: int = 1000,
    seed: int = DEFAULT_JET_SEED,
    scale: float = 2.0,
) -> JetSweep:
    """Run both pointwise checks on ``samples`` seeded random jets."""
    jets = random_jets(np.random.default_rng(seed), samples, scale)
    worst: Dict[str, float] = {}
    el = 0.0
    for jet in jets:
        for label, value in dual_residual_breakdown(jet, g, params).items():
            worst[label] = max(worst.get(label, 0.0), abs(value))
        el = max(el, dual_el_consistency(jet, g, pot, params))
    sweep = JetSweep(
        samples=samples,
        seed=seed,
        tautology=max(worst.values(), default=0.0),
        el_consistency=el,
        worst=tuple(sorted(worst.items())),
    )
    log.info(
        "Jet sweep (%d jets, seed %d): tautology %.3e, EL consistency %.3e",
        samples,
        seed,
        sweep.tautology,
        sweep.el_consistency,
    )
    return sweep
