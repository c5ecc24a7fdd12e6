"""Grids, field storage and finite-difference calculus for the planar model.

The complex field omega parametrises the unit vector S through the
stereographic projection. Lifted soliton profiles put the omega pole at
the soliton centre, so derivatives of omega are never differenced directly:
``field_jet`` differences the smooth unit-vector field, projects the result
onto the tangent plane of S and maps it back through the inverse
stereographic Jacobian. The scalar operators ``diff_x``/``diff_y`` are plain
second-order differences and are backed by sparse matrices so that their
exact adjoints are available to the discrete energy gradient.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import TYPE_CHECKING, Callable, Tuple

import numpy as np
import scipy.sparse as sps

from .errors import DomainError, GridError

if TYPE_CHECKING:  # pragma: no cover
    from .radial import RadialProfile

log = logging.getLogger(__name__)

# u is clamped to 2 - POLE_CLAMP before f = sqrt(u / (2 - u)) is taken.
POLE_CLAMP = 1e-12


@dataclass(frozen=True)
class Grid2D:
    """Uniform rectangular grid, nodes stored row-major in y then x.

    Arrays living on the grid have shape ``(ny, nx)``.

    >>> g = Grid2D(5, 3, 0.0, 1.0, -1.0, 1.0)
    >>> g.hx, g.hy, g.shape
    (0.25, 1.0, (3, 5))
    """

    nx: int
    ny: int
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self) -> None:
        if self.nx < 3 or self.ny < 3:
            raise GridError(
                f"central differences need nx, ny >= 3, got {self.nx}x{self.ny}"
            )
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise GridError(
                "grid extents must be increasing: "
                f"x=[{self.x_min}, {self.x_max}], y=[{self.y_min}, {self.y_max}]"
            )

    @property
    def hx(self) -> float:
        return (self.x_max - self.x_min) / (self.nx - 1)

    @property
    def hy(self) -> float:
        return (self.y_max - self.y_min) / (self.ny - 1)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.ny, self.nx)

    @property
    def size(self) -> int:
        return self.nx * self.ny

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx)

    @property
    def y(self) -> np.ndarray:
        return np.linspace(self.y_min, self.y_max, self.ny)

    def mesh(self) -> Tuple[np.ndarray, np.ndarray]:
        """Return coordinate arrays ``(X, Y)`` of shape ``(ny, nx)``."""
        return np.meshgrid(self.x, self.y, indexing="xy")

    def has_node_at_origin(self) -> bool:
        """Whether some node sits (numerically) on the origin."""
        x, y = self.x, self.y
        return bool(
            np.min(np.abs(x)) < 1e-9 * self.hx and np.min(np.abs(y)) < 1e-9 * self.hy
        )

    def shifted_half_cell(self) -> "Grid2D":
        """The same grid moved by half a spacing in both directions."""
        dx, dy = 0.5 * self.hx, 0.5 * self.hy
        return Grid2D(
            self.nx,
            self.ny,
            self.x_min + dx,
            self.x_max + dx,
            self.y_min + dy,
            self.y_max + dy,
        )

    def spec_string(self) -> str:
        """Inverse of :meth:`from_spec`."""
        return ",".join(
            [str(self.nx), str(self.ny)]
            + [
                format(v, ".17g")
                for v in (self.x_min, self.x_max, self.y_min, self.y_max)
            ]
        )

    @classmethod
    def from_spec(cls, spec: str) -> "Grid2D":
        """Parse ``"NX,NY,XMIN,XMAX,YMIN,YMAX"``.

        >>> Grid2D.from_spec("4,4,-1,1,-1,1").hx
        0.6666666666666666
        """
        parts = [p.strip() for p in spec.split(",")]
        if len(parts) != 6:
            raise GridError(f"grid spec needs 6 comma-separated values: {spec!r}")
        try:
            nx, ny = int(parts[0]), int(parts[1])
            x_min, x_max, y_min, y_max = (float(p) for p in parts[2:])
        except ValueError as e:
            raise GridError(f"malformed grid spec {spec!r}: {e}") from e
        return cls(nx, ny, x_min, x_max, y_min, y_max)

    @classmethod
    def centred(cls, n: int, half_width: float) -> "Grid2D":
        """Square grid on ``[-L, L]^2`` that never has a node on the origin.

        An even node count already straddles the origin; an odd one is
        shifted by half a spacing.
        """
        grid = cls(n, n, -half_width, half_width, -half_width, half_width)
        if grid.has_node_at_origin():
            grid = grid.shifted_half_cell()
        return grid


def _as_grid_array(values: np.ndarray, grid: Grid2D, name: str, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    if arr.shape != grid.shape:
        raise GridError(f"{name} has shape {arr.shape}, grid expects {grid.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite values")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class FieldState:
    """Immutable snapshot of omega and the gauge potential on a grid."""

    grid: Grid2D
    omega: np.ndarray = field(repr=False)
    a1: np.ndarray = field(repr=False)
    a2: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "omega", _as_grid_array(self.omega, self.grid, "omega", complex)
        )
        object.__setattr__(self, "a1", _as_grid_array(self.a1, self.grid, "a1", float))
        object.__setattr__(self, "a2", _as_grid_array(self.a2, self.grid, "a2", float))

    @classmethod
    def vacuum(cls, grid: Grid2D) -> "FieldState":
        zeros = np.zeros(grid.shape)
        return cls(grid, zeros.astype(complex), zeros, zeros)

    @property
    def u(self) -> np.ndarray:
        """Potential argument ``2|omega|^2 / (1 + |omega|^2)``."""
        return potential_argument(self.omega)

    def with_fields(self, **changes) -> "FieldState":
        return replace(self, **changes)


@dataclass(frozen=True)
class ModelParams:
    """Couplings of the rescaled energy density and the winding number."""

    lambda1: float
    lambda2: float
    lambda4: float
    n: int = 1

    def __post_init__(self) -> None:
        if not (self.lambda1 > 0 and self.lambda2 > 0):
            raise DomainError(
                "lambda1 and lambda2 must be positive, "
                f"got {self.lambda1}, {self.lambda2}"
            )
        if self.lambda4 == 0 or not math.isfinite(self.lambda4):
            raise DomainError(f"lambda4 must be finite and nonzero, got {self.lambda4}")
        if int(self.n) != self.n or self.n == 0:
            raise DomainError(f"winding number must be a nonzero integer, got {self.n}")
        object.__setattr__(self, "n", int(self.n))


@dataclass(frozen=True)
class PointJet:
    """Values of omega, its first derivatives and the gauge data at a point."""

    omega: complex
    omega_x: complex
    omega_y: complex
    a1: float
    a2: float
    b: float

    def __post_init__(self) -> None:
        values = (self.omega, self.omega_x, self.omega_y, self.a1, self.a2, self.b)
        if not all(np.isfinite(v) for v in values):
            raise DomainError("point jet components must be finite")

    @property
    def u(self) -> float:
        return float(potential_argument(self.omega))


@dataclass(frozen=True, eq=False)
class FieldJet:
    """Grid analogue of :class:`PointJet`, built once by :func:`field_jet`."""

    grid: Grid2D
    omega: np.ndarray = field(repr=False)
    omega_x: np.ndarray = field(repr=False)
    omega_y: np.ndarray = field(repr=False)
    a1: np.ndarray = field(repr=False)
    a2: np.ndarray = field(repr=False)
    b: np.ndarray = field(repr=False)

    @property
    def q(self) -> np.ndarray:
        """``1 + |omega|^2``."""
        return 1.0 + np.abs(self.omega) ** 2

    @property
    def u(self) -> np.ndarray:
        return potential_argument(self.omega)


def potential_argument(omega):
    """``u = 2 omega omega* / (1 + omega omega*)``, equal to ``1 - n.S``.

    >>> float(potential_argument(1.0 + 0j))
    1.0
    """
    m = np.abs(omega) ** 2
    return 2.0 * m / (1.0 + m)


def stereographic(omega) -> np.ndarray:
    """Unit vector S for omega; the component axis is last.

    >>> stereographic(0j).tolist()
    [0.0, 0.0, 1.0]
    >>> stereographic(1j).round(15).tolist()
    [0.0, 1.0, 0.0]
    """
    omega = np.asarray(omega, dtype=complex)
    q = 1.0 + np.abs(omega) ** 2
    return np.stack(
        [
            2.0 * omega.real / q,
            2.0 * omega.imag / q,
            (2.0 - q) / q,
        ],
        axis=-1,
    )


def stereographic_jacobian(omega) -> Tuple[np.ndarray, np.ndarray]:
    """Partial derivatives of S with respect to Re(omega) and Im(omega)."""
    omega = np.asarray(omega, dtype=complex)
    p, s = omega.real, omega.imag
    q = 1.0 + p * p + s * s
    q2 = q * q
    d_re = np.stack([2.0 / q - 4.0 * p * p / q2, -4.0 * p * s / q2, -4.0 * p / q2], -1)
    d_im = np.stack([-4.0 * p * s / q2, 2.0 / q - 4.0 * s * s / q2, -4.0 * s / q2], -1)
    return d_re, d_im


@lru_cache(maxsize=32)
def derivative_matrix(n: int, h: float) -> sps.csr_matrix:
    """1D second-order first-derivative matrix with one-sided end rows."""
    if n < 3:
        raise GridError(f"need at least 3 nodes for a derivative stencil, got {n}")
    c = 1.0 / (2.0 * h)
    rows = [0, 0, 0]
    cols = [0, 1, 2]
    vals = [-3.0 * c, 4.0 * c, -c]
    interior = np.arange(1, n - 1)
    rows += list(np.repeat(interior, 2))
    cols += list(np.column_stack([interior - 1, interior + 1]).ravel())
    vals += [-c, c] * (n - 2)
    rows += [n - 1, n - 1, n - 1]
    cols += [n - 3, n - 2, n - 1]
    vals += [c, -4.0 * c, 3.0 * c]
    return sps.csr_matrix((vals, (rows, cols)), shape=(n, n))


def _check_shape(values: np.ndarray, grid: Grid2D) -> None:
    if values.shape[:2] != grid.shape:
        raise GridError(
            f"field shape {values.shape[:2]} does not match grid {grid.shape}"
        )


def _apply_along(matrix: sps.csr_matrix, values: np.ndarray, axis: int) -> np.ndarray:
    moved = np.moveaxis(values, axis, 0)
    flat = moved.reshape(moved.shape[0], -1)
    out = np.asarray(matrix @ flat).reshape(moved.shape)
    return np.moveaxis(out, 0, axis)


def diff_x(values: np.ndarray, grid: Grid2D) -> np.ndarray:
    """x-derivative of a grid array (trailing component axes allowed).

    >>> g = Grid2D(5, 4, 0.0, 2.0, 0.0, 1.0)
    >>> X, _ = g.mesh()
    >>> bool(np.allclose(diff_x(3.0 * X, g), 3.0))
    True
    """
    values = np.asarray(values)
    _check_shape(values, grid)
    return _apply_along(derivative_matrix(grid.nx, grid.hx), values, 1)


def diff_y(values: np.ndarray, grid: Grid2D) -> np.ndarray:
    """y-derivative of a grid array (trailing component axes allowed)."""
    values = np.asarray(values)
    _check_shape(values, grid)
    return _apply_along(derivative_matrix(grid.ny, grid.hy), values, 0)


def diff_x_adjoint(values: np.ndarray, grid: Grid2D) -> np.ndarray:
    """Transpose of :func:`diff_x` in the plain Euclidean inner product."""
    values = np.asarray(values)
    _check_shape(values, grid)
    return _apply_along(derivative_matrix(grid.nx, grid.hx).T.tocsr(), values, 1)


def diff_y_adjoint(values: np.ndarray, grid: Grid2D) -> np.ndarray:
    """Transpose of :func:`diff_y` in the plain Euclidean inner product."""
    values = np.asarray(values)
    _check_shape(values, grid)
    return _apply_along(derivative_matrix(grid.ny, grid.hy).T.tocsr(), values, 0)


@lru_cache(maxsize=16)
def _trapezoid_weights(grid: Grid2D) -> np.ndarray:
    wx = np.full(grid.nx, grid.hx)
    wx[[0, -1]] *= 0.5
    wy = np.full(grid.ny, grid.hy)
    wy[[0, -1]] *= 0.5
    weights = np.outer(wy, wx)
    weights.setflags(write=False)
    return weights


def trapezoid_weights(grid: Grid2D) -> np.ndarray:
    """Tensor-product trapezoid weights, shape ``(ny, nx)``.

    >>> float(trapezoid_weights(Grid2D(3, 3, 0.0, 1.0, 0.0, 1.0)).sum())
    1.0
    """
    return _trapezoid_weights(grid)


def weighted_sum(values: np.ndarray, weights: np.ndarray) -> float:
    """Compensated sum of ``values * weights``, independent of summation order."""
    return math.fsum(np.ravel(np.asarray(values) * weights))


def interior_mask(grid: Grid2D) -> np.ndarray:
    """Boolean mask of the nodes not on the outer ring."""
    mask = np.zeros(grid.shape, dtype=bool)
    mask[1:-1, 1:-1] = True
    return mask


def n_cross(s: np.ndarray) -> np.ndarray:
    """``n x S`` with ``n = (0, 0, 1)``."""
    return np.stack([-s[..., 1], s[..., 0], np.zeros_like(s[..., 2])], axis=-1)


def tangent_projection(s: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Remove the component of ``v`` along the unit vector ``s``."""
    return v - np.sum(s * v, axis=-1, keepdims=True) * s


def _omega_derivative(omega: np.ndarray, s: np.ndarray, ds: np.ndarray) -> np.ndarray:
    # sigma = S1 + i S2 = omega (1 + S3) and 1 + S3 = 2 / q
    v = tangent_projection(s, ds)
    q = 1.0 + np.abs(omega) ** 2
    return (v[..., 0] + 1j * v[..., 1] - omega * v[..., 2]) * (0.5 * q)


def field_jet(state: FieldState) -> FieldJet:
    """Pole-safe first derivatives of omega plus the magnetic field."""
    grid = state.grid
    s = stereographic(state.omega)
    dsx = diff_x(s, grid)
    dsy = diff_y(s, grid)
    return FieldJet(
        grid=grid,
        omega=state.omega,
        omega_x=_omega_derivative(state.omega, s, dsx),
        omega_y=_omega_derivative(state.omega, s, dsy),
        a1=state.a1,
        a2=state.a2,
        b=diff_x(state.a2, grid) - diff_y(state.a1, grid),
    )


def profile_amplitude(u: np.ndarray) -> np.ndarray:
    """``f = sqrt(u / (2 - u))`` with u clamped below the pole."""
    u = np.asarray(u, dtype=float)
    if np.any(u < -1e-12) or np.any(u > 2.0 + 1e-12):
        raise DomainError("profile u must lie in [0, 2]")
    u = np.clip(u, 0.0, 2.0 - POLE_CLAMP)
    return np.sqrt(u / (2.0 - u))


def hedgehog_state(
    u_of_r: Callable[[np.ndarray], np.ndarray],
    a_of_r: Callable[[np.ndarray], np.ndarray],
    grid: Grid2D,
    n: int,
) -> FieldState:
    """Axially symmetric state ``omega = f(r) exp(i n theta)``.

    The gauge potential is purely azimuthal:
    ``A1 = -n a y / r^2``, ``A2 = n a x / r^2``, zero at ``r = 0``.
    """
    X, Y = grid.mesh()
    r = np.hypot(X, Y)
    theta = np.arctan2(Y, X)
    u = np.asarray(u_of_r(r), dtype=float)
    a = np.asarray(a_of_r(r), dtype=float)
    omega = profile_amplitude(u) * np.exp(1j * n * theta)
    r2 = r * r
    safe = r2 > 0.0
    inv_r2 = np.divide(1.0, r2, out=np.zeros_like(r2), where=safe)
    a1 = -n * a * Y * inv_r2
    a2 = n * a * X * inv_r2
    return FieldState(grid, omega, a1, a2)


def lift_radial(profile: "RadialProfile", grid: Grid2D, n: int) -> FieldState:
    """Lift a radial profile to a 2D hedgehog on ``grid``.

    Beyond the last stored radius the profile is extended by ``u = 0`` and
    ``a = a_last``.
    """
    if grid.has_node_at_origin() and profile.u[0] >= 2.0 - POLE_CLAMP:
        log.warning(
            "Grid has a node on the soliton centre; omega is clamped there to"
            " |omega| = %.3g",
            float(profile_amplitude(2.0)),
        )
    X, Y = grid.mesh()
    u, a = profile.interpolate(np.hypot(X, Y))
    return hedgehog_state(lambda r: u, lambda r: a, grid, n)


def gauge_transform(
    state: FieldState, chi: np.ndarray, chi_x: np.ndarray, chi_y: np.ndarray
) -> FieldState:
    """Apply the U(1) action ``omega -> omega e^{-i chi}``, ``A -> A + grad chi``.

    With ``D_i S = d_i S + A_i (n x S)`` this is the sign pairing that keeps
    the covariant bracket and the magnetic field invariant.
    """
    return state.with_fields(
        omega=state.omega * np.exp(-1j * np.asarray(chi)),
        a1=state.a1 + chi_x,
        a2=state.a2 + chi_y,
    )
