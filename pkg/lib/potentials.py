"""G1 profiles and the potentials they generate.

A G1 profile fixes both Bogomolny equations and, through the existence
condition ``V = (l4^2 / 4) (G1'^2 / l1 + G1^2 / l2)``, the only potential for
which those equations exist. Profiles are configured on the command line as
``family:params`` strings:

===========  ==========================  ==================
label        G1(u)                       example
===========  ==========================  ==================
``power``    ``u^p / p`` (p >= 2)        ``power:2``
``scaled``   ``c u^p / p`` (p >= 2)      ``scaled:0.5,2``
``zero``     ``0``                       ``zero``
===========  ==========================  ==================
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Tuple

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DomainError, UnknownFamilyError
from .fields import ModelParams

log = logging.getLogger(__name__)

ArrayFn = Callable[[np.ndarray], np.ndarray]

PROVENANCE_FROM_G1 = "from-G1"
PROVENANCE_USER = "user-supplied"


@dataclass(frozen=True)
class GProfile:
    """G1 with its first two derivatives, all vectorised over u."""

    g: ArrayFn = field(repr=False)
    gprime: ArrayFn = field(repr=False)
    gsecond: ArrayFn = field(repr=False)
    family: str = "custom"
    parameters: Tuple[float, ...] = ()

    def __post_init__(self) -> None:
        g0, gp0 = float(self.g(np.float64(0.0))), float(self.gprime(np.float64(0.0)))
        if abs(g0) > 1e-14 or abs(gp0) > 1e-14:
            raise DomainError(
                f"G1 must satisfy G1(0) = G1'(0) = 0 for a finite-energy vacuum, got"
                f" G1(0)={g0:g}, G1'(0)={gp0:g}"
            )

    @property
    def label(self) -> str:
        """Family string accepted by :func:`parse_g_spec`."""
        if not self.parameters:
            return self.family
        return f"{self.family}:" + ",".join(format(p, "g") for p in self.parameters)

    @property
    def exponent(self) -> float:
        """Exponent p of the power-law families."""
        if self.family not in ("power", "scaled"):
            raise DomainError(f"family {self.family!r} has no power-law exponent")
        return float(self.parameters[-1])

    def is_degenerate(self) -> bool:
        """True when G1 and G1' both vanish at u = 2 (no soliton can start)."""
        return float(self.g(np.float64(2.0))) == 0.0 and float(
            self.gprime(np.float64(2.0))
        ) == 0.0


@dataclass(frozen=True)
class PotentialSpec:
    """A potential V(u) on [0, 2] with its derivative."""

    V: ArrayFn = field(repr=False)
    Vprime: ArrayFn = field(repr=False)
    provenance: str = PROVENANCE_USER

    def validate(self, nsamples: int = 401) -> None:
        """Check V >= 0 on [0, 2] and V(0) = 0.

        Raises:
            DomainError: If either condition fails.
        """
        u = np.linspace(0.0, 2.0, nsamples)
        v = np.asarray(self.V(u), dtype=float)
        if abs(v[0]) > 1e-14:
            raise DomainError(f"potential must vanish at the vacuum, V(0)={v[0]:g}")
        if np.min(v) < -1e-14:
            raise DomainError(
                f"potential must be nonnegative, min V={np.min(v):g}"
                f" at u={u[int(np.argmin(v))]:g}"
            )

    def scaled(self, factor: float) -> "PotentialSpec":
        """``factor * V``."""
        return PotentialSpec(
            lambda u: factor * self.V(u),
            lambda u: factor * self.Vprime(u),
            PROVENANCE_USER,
        )

    def shifted(self, offset: float) -> "PotentialSpec":
        """``V + offset``; breaks the vacuum normalisation unless offset is 0."""
        return PotentialSpec(
            lambda u: self.V(u) + offset, self.Vprime, PROVENANCE_USER
        )


def _power_family(c: float, p: float) -> Tuple[ArrayFn, ArrayFn, ArrayFn]:
    if p < 2:
        raise DomainError(f"power-law G1 needs p >= 2 to be C^2 at the vacuum, got {p}")
    return (
        lambda u: c * np.power(u, p) / p,
        lambda u: c * np.power(u, p - 1.0),
        lambda u: c * (p - 1.0) * np.power(u, p - 2.0),
    )


def builtin_g(family: str, params: Tuple[float, ...] = ()) -> GProfile:
    """Return a built-in G1 family with analytic derivatives.

    >>> g = builtin_g("power", (3,))
    >>> [float(f(1.0)) for f in (g.g, g.gprime, g.gsecond)]
    [0.3333333333333333, 1.0, 2.0]

    Raises:
        UnknownFamilyError: If ``family`` is not registered.
        DomainError: If the parameters are out of range.
    """
    params = tuple(float(p) for p in params)
    if family == "power":
        if len(params) != 1:
            raise DomainError(f"power family takes one parameter p, got {params}")
        fns = _power_family(1.0, params[0])
    elif family == "scaled":
        if len(params) != 2:
            raise DomainError(f"scaled family takes parameters c,p, got {params}")
        if params[0] == 0.0:
            raise DomainError("scaled family needs c != 0; use 'zero' instead")
        fns = _power_family(params[0], params[1])
    elif family == "zero":
        if params:
            raise DomainError(f"zero family takes no parameters, got {params}")
        fns = (np.zeros_like, np.zeros_like, np.zeros_like)
    else:
        raise UnknownFamilyError(
            f"unknown G1 family {family!r}; known: {', '.join(sorted(FAMILIES))}"
        )
    return GProfile(*fns, family=family, parameters=params)


FAMILIES: Dict[str, str] = {
    "power": "u^p/p, p >= 2",
    "scaled": "c u^p/p, p >= 2",
    "zero": "0 (degenerate sector)",
}


def parse_g_spec(spec: str) -> GProfile:
    """Parse a ``family:params`` string such as ``power:2`` or ``scaled:0.5,2``.

    >>> parse_g_spec("power:2").label
    'power:2'
    >>> parse_g_spec("zero").label
    'zero'
    """
    family, _, rest = spec.strip().partition(":")
    try:
        params = tuple(float(p) for p in rest.split(",")) if rest else ()
    except ValueError as e:
        raise DomainError(f"malformed G1 parameters in {spec!r}: {e}") from e
    return builtin_g(family.strip(), params)


def condition_target(g: GProfile, params: ModelParams, u: np.ndarray) -> np.ndarray:
    """Right-hand side of the existence condition at ``u``."""
    c = 0.25 * params.lambda4**2
    return c * (g.gprime(u) ** 2 / params.lambda1 + g.g(u) ** 2 / params.lambda2)


def potential_from_g(g: GProfile, params: ModelParams) -> PotentialSpec:
    """Build the potential admitted by ``g`` and its analytic derivative.

    >>> p = ModelParams(1.0, 1.0, 1.0)
    >>> float(potential_from_g(builtin_g("power", (2,)), p).V(2.0))
    2.0
    """
    c = 0.25 * params.lambda4**2
    l1, l2 = params.lambda1, params.lambda2

    def v(u):
        return c * (g.gprime(u) ** 2 / l1 + g.g(u) ** 2 / l2)

    def vprime(u):
        gp = g.gprime(u)
        return c * (2.0 * gp * g.gsecond(u) / l1 + 2.0 * g.g(u) * gp / l2)

    return PotentialSpec(v, vprime, PROVENANCE_FROM_G1)


def check_condition(
    pot: PotentialSpec, g: GProfile, params: ModelParams, nsamples: int = 201
) -> float:
    """Max deviation of ``pot`` from the existence condition on [0, 2].

    Samples are uniform and include both endpoints.
    """
    if nsamples < 2:
        raise DomainError(f"check_condition needs nsamples >= 2, got {nsamples}")
    u = np.linspace(0.0, 2.0, nsamples)
    err = np.abs(np.asarray(pot.V(u), dtype=float) - condition_target(g, params, u))
    worst = int(np.argmax(err))
    log.debug("Existence condition: max error %.3e at u=%.6g", err[worst], u[worst])
    return float(err[worst])


def potential_from_table(u: np.ndarray, v: np.ndarray) -> PotentialSpec:
    """Monotone cubic interpolant of a tabulated potential.

    Raises:
        DomainError: If the table does not span [0, 2] or violates V >= 0,
            V(0) = 0.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.ndim != 1 or u.shape != v.shape or u.size < 2:
        raise DomainError("potential table needs matching 1D u and V columns")
    if np.any(np.diff(u) <= 0):
        raise DomainError("potential table u column must be strictly increasing")
    if u[0] > 0.0 or u[-1] < 2.0:
        raise DomainError(f"potential table must span [0, 2], got [{u[0]}, {u[-1]}]")
    interp = PchipInterpolator(u, v, extrapolate=False)
    deriv = interp.derivative()
    pot = PotentialSpec(
        lambda x: interp(np.clip(x, 0.0, 2.0)),
        lambda x: deriv(np.clip(x, 0.0, 2.0)),
        PROVENANCE_USER,
    )
    pot.validate()
    return pot


@dataclass(frozen=True)
class PotentialTable:
    """Tabulated V(u) next to the existence-condition target."""

    u: np.ndarray
    v: np.ndarray
    vprime: np.ndarray
    target: np.ndarray
    max_error: float


def tabulate(
    pot: PotentialSpec, g: GProfile, params: ModelParams, nsamples: int = 201
) -> PotentialTable:
    """Sample ``pot`` on a uniform grid of [0, 2] for plotting."""
    if nsamples < 2:
        raise DomainError(f"tabulate needs nsamples >= 2, got {nsamples}")
    u = np.linspace(0.0, 2.0, nsamples)
    v = np.asarray(pot.V(u), dtype=float)
    target = condition_target(g, params, u)
    return PotentialTable(
        u=u,
        v=v,
        vprime=np.asarray(pot.Vprime(u), dtype=float),
        target=target,
        max_error=float(np.max(np.abs(v - target))),
    )
