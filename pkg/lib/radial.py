"""Radial reduction of the Bogomolny equations and its numerical solution.

Under the hedgehog ansatz ``omega = f(r) exp(i n theta)`` with the azimuthal
potential ``A1 = -n a y / r^2``, ``A2 = n a x / r^2`` and ``u = 2 f^2 / (1 + f^2)``
the Bogomolny equations reduce to

    u' = -l4 r G1'(u) / (2 l1 n (1 + a))
    a' = -l4 r G1(u) / (2 l2 n)

with both boundary conditions, ``u(0) = 2`` and ``a(0) = 0``, at the centre.
The system is therefore integrated as an initial-value problem. The right-hand
sides carry a removable factor r, so integration starts from the leading
series terms at a small radius instead of at r = 0.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.interpolate import PchipInterpolator

from .errors import DomainError, IntegrationError, SingularityError
from .fields import ModelParams
from .potentials import GProfile, potential_from_g

log = logging.getLogger(__name__)


class Termination(str, Enum):
    """Why the radial integration stopped."""

    VACUUM = "vacuum-reached"
    COMPACTON = "compacton-boundary"
    SINGULARITY = "singularity-1+a"
    MAX_RADIUS = "max-radius"

    def is_regular(self) -> bool:
        return self in (Termination.VACUUM, Termination.COMPACTON)


@dataclass(frozen=True)
class SolverOptions:
    """Tolerances and stopping thresholds of :func:`solve_radial`."""

    rtol: float = 1e-10
    atol: float = 1e-12
    r_max: float = 50.0
    u_stop: float = 1e-10
    a_stop: float = 1e-6
    r_start: float = 1e-4
    dr_out: float = 1e-3
    compacton_ratio: float = 1e-3
    method: str = "DOP853"

    def __post_init__(self) -> None:
        for name in ("rtol", "atol", "r_max", "u_stop", "a_stop", "r_start", "dr_out"):
            if not getattr(self, name) > 0:
                raise DomainError(f"solver option {name} must be positive")
        if self.r_start >= self.r_max:
            raise DomainError(
                f"r_start={self.r_start} must be below r_max={self.r_max}"
            )
        if self.compacton_ratio < 0:
            raise DomainError("compacton_ratio must be nonnegative")

    def halved(self) -> "SolverOptions":
        """Same options with both tolerances halved."""
        return replace(self, rtol=0.5 * self.rtol, atol=0.5 * self.atol)


DenseFn = Callable[[float], Tuple[float, float]]


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Sampled radial solution ``u(r)``, ``a(r)``.

    Solver output starts at ``u(0) = 2``, ``a(0) = 0``; profiles read from
    disk only have to satisfy the range checks below. ``dense`` is the
    solver's continuous extension and is not serialised.
    """

    r: np.ndarray = field(repr=False)
    u: np.ndarray = field(repr=False)
    a: np.ndarray = field(repr=False)
    termination: Termination
    n: int = 1
    branch: int = 1
    degenerate: bool = False
    dense: Optional[DenseFn] = field(default=None, repr=False)

    def __post_init__(self) -> None:
        r = np.asarray(self.r, dtype=float)
        u = np.asarray(self.u, dtype=float)
        a = np.asarray(self.a, dtype=float)
        if r.ndim != 1 or r.shape != u.shape or r.shape != a.shape or r.size < 2:
            raise DomainError("profile needs matching 1D r, u, a with >= 2 samples")
        if r[0] != 0.0 or np.any(np.diff(r) <= 0):
            raise DomainError("profile radii must start at 0 and increase strictly")
        if np.any(u < 0.0) or np.any(u > 2.0):
            raise DomainError(
                f"profile u outside [0, 2]: min={u.min():g}, max={u.max():g}"
            )
        if np.any(1.0 + a <= 0.0):
            raise DomainError("profile has samples with 1 + a <= 0")
        for name, arr in (("r", r), ("u", u), ("a", a)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "termination", Termination(self.termination))

    @property
    def r_end(self) -> float:
        return float(self.r[-1])

    @cached_property
    def _interpolants(self) -> Tuple[PchipInterpolator, PchipInterpolator]:
        return PchipInterpolator(self.r, self.u), PchipInterpolator(self.r, self.a)

    def interpolate(self, r) -> Tuple[np.ndarray, np.ndarray]:
        """Monotone cubic interpolation of ``(u, a)`` at radii ``r``.

        Beyond the last sample the profile continues as ``u = 0`` (or the last
        u if the solve stopped before the vacuum) and ``a = a_last``.
        """
        r = np.asarray(r, dtype=float)
        pu, pa = self._interpolants
        inside = r <= self.r_end
        rc = np.clip(r, 0.0, self.r_end)
        u_out = 0.0 if self.termination.is_regular() else float(self.u[-1])
        u = np.where(inside, np.clip(pu(rc), 0.0, 2.0), u_out)
        a = np.where(inside, pa(rc), float(self.a[-1]))
        return u, a

    def evaluate(self, r: float) -> Tuple[float, float]:
        """``(u, a)`` at one radius, from the dense solution when available."""
        if self.dense is not None and 0.0 <= r <= self.r_end:
            return self.dense(r)
        u, a = self.interpolate(r)
        return float(u), float(a)

    @property
    def u_end(self) -> float:
        return float(self.u[-1])

    @property
    def a_end(self) -> float:
        return float(self.a[-1])


def _rhs_over_r(u, a, g: GProfile, params: ModelParams, lambda4: float):
    """Reduced right-hand sides divided by r; regular at r = 0."""
    u = np.clip(u, 0.0, 2.0)
    du = -lambda4 * g.gprime(u) / (2.0 * params.lambda1 * params.n * (1.0 + a))
    da = -lambda4 * g.g(u) / (2.0 * params.lambda2 * params.n)
    return du, da


def reduced_rhs(
    r: float, u: float, a: float, g: GProfile, params: ModelParams
) -> Tuple[float, float]:
    """``(du/dr, da/dr)`` of the reduced Bogomolny system.

    >>> from .potentials import builtin_g
    >>> reduced_rhs(1.0, 2.0, 0.0, builtin_g("power", (2,)), ModelParams(1, 1, 1))
    (-1.0, -1.0)

    Raises:
        SingularityError: If ``1 + a <= 0``.
    """
    if 1.0 + a <= 0.0:
        raise SingularityError(f"1 + a = {1.0 + a:g} <= 0 at r = {r:g}")
    du, da = _rhs_over_r(u, a, g, params, params.lambda4)
    return float(r * du), float(r * da)


def _select_branch(g: GProfile, params: ModelParams) -> int:
    slope = float(g.gprime(np.float64(2.0))) or float(g.g(np.float64(2.0)))
    sign = math.copysign(1.0, params.lambda4 * params.n * slope) if slope else 1.0
    if sign < 0:
        log.warning(
            "lambda4 * n * G1'(2) < 0: integrating the decaying branch with"
            " lambda4 -> %g",
            -params.lambda4,
        )
    return int(sign)


def _series(r, g: GProfile, params: ModelParams, lambda4: float):
    r2 = np.asarray(r, dtype=float) ** 2
    u = 2.0 - lambda4 * float(g.gprime(np.float64(2.0))) * r2 / (
        4.0 * params.lambda1 * params.n
    )
    a = -lambda4 * float(g.g(np.float64(2.0))) * r2 / (4.0 * params.lambda2 * params.n)
    return u, a


def solve_radial(
    g: GProfile, params: ModelParams, opts: Optional[SolverOptions] = None
) -> RadialProfile:
    """Integrate the reduced system outward from the soliton centre.

    Stops at the first of: ``u <= u_stop`` (vacuum or compacton boundary),
    ``1 + a <= a_stop`` (singularity) or ``r_max``. A singular outcome is
    returned, not raised, with termination ``singularity-1+a``.

    Raises:
        IntegrationError: If the integrator itself fails.
    """
    opts = opts or SolverOptions()
    branch = _select_branch(g, params)
    lam4 = branch * params.lambda4
    degenerate = g.is_degenerate()
    if degenerate:
        log.warning("G1 is degenerate at u = 2; the profile stays at u = 2, a = 0")

    def rhs(r, y):
        # floor keeps trial stages finite; the singularity event ends the run
        one_plus_a = max(1.0 + y[1], 1e-3 * opts.a_stop)
        du, da = _rhs_over_r(y[0], one_plus_a - 1.0, g, params, lam4)
        return [r * du, r * da]

    def vacuum_event(r, y):
        return y[0] - opts.u_stop

    vacuum_event.terminal = True  # type: ignore[attr-defined]
    vacuum_event.direction = -1  # type: ignore[attr-defined]

    def singularity_event(r, y):
        return 1.0 + y[1] - opts.a_stop

    singularity_event.terminal = True  # type: ignore[attr-defined]
    singularity_event.direction = -1  # type: ignore[attr-defined]

    u0, a0 = _series(opts.r_start, g, params, lam4)
    sol = solve_ivp(
        rhs,
        (opts.r_start, opts.r_max),
        [float(u0), float(a0)],
        method=opts.method,
        rtol=opts.rtol,
        atol=opts.atol,
        events=[vacuum_event, singularity_event],
        dense_output=True,
    )
    if sol.status == -1:
        raise IntegrationError(f"radial integration failed: {sol.message}")
    r_end = float(sol.t[-1])
    log.debug("Radial solve: %d steps, %d rhs evaluations", sol.t.size, sol.nfev)

    def dense(r: float) -> Tuple[float, float]:
        if r < opts.r_start:
            u, a = _series(r, g, params, lam4)
        else:
            u, a = sol.sol(min(r, r_end))
        return float(min(max(u, 0.0), 2.0)), float(a)

    r = np.arange(0.0, r_end, opts.dr_out)
    if r_end - r[-1] < 1e-3 * opts.dr_out:
        r = r[:-1]
    r = np.append(r, r_end)
    near = r < opts.r_start
    u = np.empty_like(r)
    a = np.empty_like(r)
    u[near], a[near] = _series(r[near], g, params, lam4)
    u[~near], a[~near] = sol.sol(r[~near])
    np.clip(u, 0.0, 2.0, out=u)

    if sol.t_events[1].size:
        termination = Termination.SINGULARITY
        log.warning("Gauge profile singular: 1 + a reached %g at r = %.6g",
                    opts.a_stop, r_end)
    elif sol.t_events[0].size:
        slope, _ = rhs(r_end, sol.y[:, -1])
        distance = u[-1] / abs(slope) if slope else math.inf
        if distance < opts.compacton_ratio * r_end:
            termination = Termination.COMPACTON
        else:
            termination = Termination.VACUUM
    else:
        termination = Termination.MAX_RADIUS
        if not degenerate:
            log.warning("Radial solve reached r_max = %g with u = %.3e",
                        opts.r_max, u[-1])

    log.info(
        "Radial solve finished: %s at r = %.6g (u = %.3e, 1 + a = %.6g)",
        termination.value,
        r_end,
        u[-1],
        1.0 + a[-1],
    )
    return RadialProfile(
        r=r,
        u=u,
        a=a,
        termination=termination,
        n=params.n,
        branch=branch,
        degenerate=degenerate,
        dense=dense,
    )


@dataclass(frozen=True, eq=False)
class RadialDensities:
    """Energy pieces and the invariant density sampled along a profile."""

    r: np.ndarray = field(repr=False)
    skyrme: np.ndarray = field(repr=False)
    maxwell: np.ndarray = field(repr=False)
    potential: np.ndarray = field(repr=False)
    invariant: np.ndarray = field(repr=False)

    @property
    def total(self) -> np.ndarray:
        return self.skyrme + self.maxwell + self.potential

    @property
    def two_v(self) -> np.ndarray:
        return 2.0 * self.potential

    def on_shell_error(self) -> float:
        """Max of ``|H - 2V|`` relative to ``max 2V``."""
        scale = float(np.max(self.two_v)) or 1.0
        return float(np.max(np.abs(self.total - self.two_v))) / scale

    def max_abs_sum(self) -> float:
        """Max of ``|H + I1|`` along the profile."""
        return float(np.max(np.abs(self.total + self.invariant)))


def _reduced_pieces(u, a, g: GProfile, params: ModelParams, branch: int):
    lam4 = branch * params.lambda4
    du, da = _rhs_over_r(u, a, g, params, lam4)
    n = params.n
    skyrme = params.lambda1 * (n * (1.0 + a) * du) ** 2
    maxwell = params.lambda2 * (n * da) ** 2
    invariant = lam4 * n * (g.gprime(u) * (1.0 + a) * du + g.g(u) * da)
    return skyrme, maxwell, invariant


def radial_densities(
    profile: RadialProfile, g: GProfile, params: ModelParams
) -> RadialDensities:
    """Evaluate the density pieces at the stored samples.

    Slopes come from the reduced right-hand sides, so ``H = 2V`` here is a
    check, not an assumption.
    """
    skyrme, maxwell, invariant = _reduced_pieces(
        profile.u, profile.a, g, params, profile.branch
    )
    pot = potential_from_g(g, params)
    return RadialDensities(
        r=profile.r,
        skyrme=np.asarray(skyrme, dtype=float),
        maxwell=np.asarray(maxwell, dtype=float),
        potential=np.asarray(pot.V(profile.u), dtype=float),
        invariant=np.asarray(invariant, dtype=float),
    )


@dataclass(frozen=True)
class RadialEnergy:
    """Energy of a radial profile and three evaluations of its bound."""

    energy: float
    bound: float
    charge_bound: float

    @property
    def relative_gap(self) -> float:
        return abs(self.energy - self.bound) / abs(self.energy) if self.energy else 0.0


def _segments(profile: RadialProfile, count: int = 400) -> np.ndarray:
    stride = max(1, profile.r.size // count)
    return np.unique(np.concatenate([profile.r[::stride], [profile.r_end]]))


def radial_energy(
    profile: RadialProfile, g: GProfile, params: ModelParams
) -> RadialEnergy:
    """Energy ``1/2 int H 2 pi r dr`` and bound ``-1/2 int I1 2 pi r dr``.

    The energy uses the on-shell density ``2V``; the bound uses I1 built from
    the reduced fields. Both are adaptive quadratures over the profile's
    continuous representation, split at sample radii and summed with
    compensated summation. ``charge_bound`` is the closed form
    ``pi l4 n (G1(2) - G1(u_end)(1 + a_end))``.
    """
    pot = potential_from_g(g, params)

    def energy_integrand(r: float) -> float:
        u, _ = profile.evaluate(r)
        return 2.0 * math.pi * r * float(pot.V(u))

    def bound_integrand(r: float) -> float:
        u, a = profile.evaluate(r)
        _, _, inv = _reduced_pieces(u, a, g, params, profile.branch)
        return -math.pi * r * float(inv)

    edges = _segments(profile)
    energy_parts, bound_parts = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        energy_parts.append(
            quad(energy_integrand, lo, hi, epsabs=1e-15, epsrel=1e-12, limit=200)[0]
        )
        bound_parts.append(
            quad(bound_integrand, lo, hi, epsabs=1e-15, epsrel=1e-12, limit=200)[0]
        )
    lam4 = profile.branch * params.lambda4
    g_centre = float(g.g(np.float64(2.0)))
    g_end = float(g.g(np.float64(profile.u_end)))
    charge_bound = (
        math.pi * lam4 * params.n * (g_centre - g_end * (1.0 + profile.a_end))
    )
    result = RadialEnergy(
        energy=math.fsum(energy_parts),
        bound=math.fsum(bound_parts),
        charge_bound=charge_bound,
    )
    log.info(
        "Radial energy %.12g, bound %.12g, closed-form bound %.12g",
        result.energy,
        result.bound,
        result.charge_bound,
    )
    return result


def power_first_integral(
    profile: RadialProfile, g: GProfile, params: ModelParams
) -> np.ndarray:
    """Conserved combination ``ln(1 + a) - l1 (u^2 - 4) / (2 p l2)``.

    Defined for the power-law families; zero at the centre.
    """
    p = g.exponent
    return np.log1p(profile.a) - params.lambda1 * (profile.u**2 - 4.0) / (
        2.0 * p * params.lambda2
    )


def asymptotic_gauge(g: GProfile, params: ModelParams) -> float:
    """Limit of ``a`` at the vacuum implied by the first integral.

    >>> from .potentials import builtin_g
    >>> round(asymptotic_gauge(builtin_g("power", (2,)), ModelParams(1, 10, 1)), 6)
    -0.095163
    """
    return math.expm1(-2.0 * params.lambda1 / (g.exponent * params.lambda2))


def stretch_profile(profile: RadialProfile, factor: float) -> RadialProfile:
    """Profile with radii scaled by ``factor``: ``u(r / factor)``, ``a(r / factor)``."""
    if not factor > 0:
        raise DomainError(f"stretch factor must be positive, got {factor}")
    return replace(profile, r=profile.r * factor, dense=None)
