"""Gradient flow on the discrete 2D energy.

The flow moves every interior nodal value along the L2 gradient of the
trapezoid energy (the nodal gradient divided by the quadrature weight).
With line search enabled each accepted step satisfies the Armijo condition,
so the energy history is strictly decreasing. The outer ring of nodes keeps
its initial values, which for compact configurations is the vacuum up to a
pure gauge.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np

from .energy import EnergyGradient, energy_gradient, total_energy
from .errors import DomainError, NonFiniteEnergyError
from .fields import FieldState, ModelParams, interior_mask, trapezoid_weights
from .potentials import PotentialSpec

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FlowConfig:
    """Step control and stopping rules of :func:`flow`.

    Attributes:
        step (float): Initial (or, without line search, fixed) step size.
        line_search (bool): Armijo backtracking with step growth on success.
        max_iter (int): Upper bound on accepted steps.
        grad_tol (float): Stop once the L2 gradient norm drops below this.
        energy_tol (float): Relative energy decrease counted as a plateau step.
        patience (int): Consecutive plateau steps that end the flow.
        snapshot_every (int): Call the snapshot hook every this many steps
            (0 disables it).
    """

    step: float = 1e-3
    line_search: bool = True
    max_iter: int = 5000
    grad_tol: float = 1e-8
    energy_tol: float = 1e-10
    patience: int = 20
    snapshot_every: int = 0
    armijo: float = 1e-4
    shrink: float = 0.5
    grow: float = 1.5
    max_backtracks: int = 40

    def __post_init__(self) -> None:
        if not self.step > 0:
            raise DomainError(f"flow step must be positive, got {self.step}")
        if self.max_iter < 1:
            raise DomainError(f"max_iter must be >= 1, got {self.max_iter}")
        if not 0.0 < self.shrink < 1.0:
            raise DomainError("shrink must lie in (0, 1)")
        if self.grow < 1.0:
            raise DomainError("grow must be >= 1")
        if self.snapshot_every < 0 or self.patience < 1:
            raise DomainError("snapshot_every must be >= 0 and patience >= 1")


@dataclass(frozen=True)
class FlowRecord:
    """One line of the energy history."""

    iteration: int
    energy: float
    grad_norm: float


@dataclass(frozen=True, eq=False)
class FlowResult:
    """Final state, energy history and the reason the flow stopped."""

    state: FieldState
    history: List[FlowRecord] = field(repr=False)
    reason: str = ""

    @property
    def iterations(self) -> int:
        return self.history[-1].iteration

    @property
    def initial_energy(self) -> float:
        return self.history[0].energy

    @property
    def final_energy(self) -> float:
        return self.history[-1].energy


def discrete_gradient(
    state: FieldState, pot: PotentialSpec, params: ModelParams
) -> EnergyGradient:
    """Gradient of the discrete energy with the boundary ring held fixed."""
    grad = energy_gradient(state, pot, params)
    inside = interior_mask(state.grid)
    return EnergyGradient(
        omega=np.where(inside, grad.omega, 0.0),
        a1=np.where(inside, grad.a1, 0.0),
        a2=np.where(inside, grad.a2, 0.0),
    )


def _l2_norm(grad: EnergyGradient, weights: np.ndarray) -> float:
    squares = np.abs(grad.omega) ** 2 + grad.a1**2 + grad.a2**2
    return math.sqrt(math.fsum(np.ravel(squares / weights)))


def _advance(
    state: FieldState, grad: EnergyGradient, weights: np.ndarray, step: float
) -> FieldState:
    return state.with_fields(
        omega=state.omega - step * grad.omega / weights,
        a1=state.a1 - step * grad.a1 / weights,
        a2=state.a2 - step * grad.a2 / weights,
    )


def _checked_energy(
    state: FieldState, pot: PotentialSpec, params: ModelParams
) -> float:
    energy = total_energy(state, pot, params)
    if not math.isfinite(energy):
        raise NonFiniteEnergyError(f"energy became {energy}")
    return energy


def flow(
    initial: FieldState,
    pot: PotentialSpec,
    params: ModelParams,
    cfg: FlowConfig,
    on_snapshot: Optional[Callable[[int, FieldState], None]] = None,
) -> Tuple[FieldState, List[FlowRecord]]:
    """Run the gradient flow; see :func:`run_flow` for the full result."""
    result = run_flow(initial, pot, params, cfg, on_snapshot)
    return result.state, result.history


def run_flow(
    initial: FieldState,
    pot: PotentialSpec,
    params: ModelParams,
    cfg: FlowConfig,
    on_snapshot: Optional[Callable[[int, FieldState], None]] = None,
) -> FlowResult:
    """Descend the discrete energy from ``initial``.

    Stops on a small gradient, an energy plateau, a stalled line search or
    ``max_iter``.

    Raises:
        NonFiniteEnergyError: If the energy becomes NaN or infinite.
    """
    weights = trapezoid_weights(initial.grid)
    state = initial
    energy = _checked_energy(state, pot, params)
    grad = discrete_gradient(state, pot, params)
    grad_norm = _l2_norm(grad, weights)
    history = [FlowRecord(0, energy, grad_norm)]
    step = cfg.step
    plateau = 0
    reason = "max-iter"

    for iteration in range(1, cfg.max_iter + 1):
        if grad_norm <= cfg.grad_tol:
            reason = "gradient"
            break
        slope = -(grad_norm**2)

        if cfg.line_search:
            trial, trial_energy = None, math.nan
            for _ in range(cfg.max_backtracks + 1):
                candidate = _advance(state, grad, weights, step)
                candidate_energy = total_energy(candidate, pot, params)
                if (
                    math.isfinite(candidate_energy)
                    and candidate_energy < energy
                    and candidate_energy <= energy + cfg.armijo * step * slope
                ):
                    trial, trial_energy = candidate, candidate_energy
                    break
                if not math.isfinite(candidate_energy):
                    log.debug("Non-finite trial energy at step %.3e", step)
                step *= cfg.shrink
            if trial is None:
                if not math.isfinite(candidate_energy):
                    raise NonFiniteEnergyError(
                        f"energy non-finite at iteration {iteration}"
                        " for every trial step"
                    )
                reason = "line-search-stalled"
                break
        else:
            trial = _advance(state, grad, weights, step)
            trial_energy = _checked_energy(trial, pot, params)
            if trial_energy > energy:
                log.warning(
                    "Energy increased at iteration %d (%.12g -> %.12g); reduce --step",
                    iteration,
                    energy,
                    trial_energy,
                )

        decrease = energy - trial_energy
        plateau = plateau + 1 if decrease <= cfg.energy_tol * abs(energy) else 0
        state, energy = trial, trial_energy
        grad = discrete_gradient(state, pot, params)
        grad_norm = _l2_norm(grad, weights)
        history.append(FlowRecord(iteration, energy, grad_norm))
        if cfg.line_search:
            step *= cfg.grow

        if iteration % 100 == 0:
            log.info(
                "Flow iteration %d: energy %.12g, grad %.3e, step %.3e",
                iteration,
                energy,
                grad_norm,
                step,
            )
        if on_snapshot and cfg.snapshot_every and iteration % cfg.snapshot_every == 0:
            on_snapshot(iteration, state)
        if plateau >= cfg.patience:
            reason = "plateau"
            break

    log.info(
        "Flow stopped (%s) after %d iterations: energy %.12g -> %.12g",
        reason,
        history[-1].iteration,
        history[0].energy,
        history[-1].energy,
    )
    return FlowResult(state=state, history=history, reason=reason)
