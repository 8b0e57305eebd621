"""Log-radial discretization with exact absorption of the inverse-square potential.

Radial functions are carried in the variables s = ln r and W(s) = r^sigma w(r).
Because sigma solves sigma*(n-2-sigma) = lam, the operator

    laplace(w) + lam/r^2 w    becomes    e^(-2s) * (W_ss + (n-2-2*sigma) W_s)

with no zeroth-order term: the singular potential disappears identically and
the drift coefficient n-2-2*sigma = 2*sqrt((n-2)^2/4 - lam) is nonnegative.
The price is a diffusion coefficient e^(-2s) that reaches ~1e12 at the inner
edge of the default grid, so time stepping is implicit (theta >= 1/2,
backward Euler by default) with a direct tridiagonal solve per step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Callable, Literal, Optional, Sequence

import numpy as np
from scipy.linalg import solve_banded

from .errors import DomainError, NonFiniteError, SolveError
from .exponents import ExponentSet

#: "neumann", "dirichlet", or ("robin", alpha) imposing W_s = alpha * W
BoundaryKind = Literal["neumann", "dirichlet"] | tuple[str, float]

ReactionFn = Callable[["RadialField"], np.ndarray]


@dataclass(frozen=True)
class LogGrid:
    """Uniform grid in s = ln r."""

    s_min: float
    s_max: float
    m_points: int

    def __post_init__(self) -> None:
        if self.m_points < 16:
            raise DomainError(f"need at least 16 grid points, got {self.m_points}")
        if not self.s_min < self.s_max:
            raise DomainError("need s_min < s_max")

    @property
    def h(self) -> float:
        return (self.s_max - self.s_min) / (self.m_points - 1)

    @cached_property
    def s(self) -> np.ndarray:
        return np.linspace(self.s_min, self.s_max, self.m_points)

    @cached_property
    def r(self) -> np.ndarray:
        return np.exp(self.s)

    @classmethod
    def from_radii(cls, r_min: float, r_max: float, m_points: int) -> "LogGrid":
        return cls(math.log(r_min), math.log(r_max), m_points)


@dataclass
class RadialField:
    """Scaled unknown W(s) = r^sigma w(r) at time t on a LogGrid."""

    grid: LogGrid
    W: np.ndarray
    sigma: float
    t: float = 0.0

    def __post_init__(self) -> None:
        self.W = np.asarray(self.W, dtype=float)
        if self.W.shape != (self.grid.m_points,):
            raise DomainError("field length does not match grid")

    def w(self) -> np.ndarray:
        """Recover w(r) = e^(-sigma s) W(s)."""
        return np.exp(-self.sigma * self.grid.s) * self.W

    def copy(self) -> "RadialField":
        return RadialField(self.grid, self.W.copy(), self.sigma, self.t)

    @classmethod
    def from_w(cls, grid: LogGrid, sigma: float, w_of_r: Callable[[np.ndarray], np.ndarray], t: float = 0.0) -> "RadialField":
        w = np.asarray(w_of_r(grid.r), dtype=float)
        return cls(grid, np.exp(sigma * grid.s) * w, sigma, t)


@dataclass(frozen=True)
class EvolutionConfig:
    """Geometric time-step schedule with exact snapshot hits."""

    t1: float
    t0: float = 0.0
    dt0: float = 1e-4
    growth: float = 1.05
    theta: float = 1.0
    snapshot_times: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.t0 < 0.0 or self.t1 <= self.t0:
            raise DomainError("need 0 <= t0 < t1")
        if self.dt0 <= 0.0:
            raise DomainError("need dt0 > 0")
        if not 1.0 <= self.growth <= 1.1:
            raise DomainError("growth ratio must lie in [1, 1.1]")
        if not 0.5 <= self.theta <= 1.0:
            raise DomainError("theta must lie in [0.5, 1]")
        snaps = tuple(sorted(float(x) for x in self.snapshot_times))
        if snaps and (snaps[0] < self.t0 - 1e-12 or snaps[-1] > self.t1 * (1 + 1e-12)):
            raise DomainError("snapshot times must lie within [t0, t1]")
        object.__setattr__(self, "snapshot_times", snaps)

    def with_snapshots(self, times: Sequence[float]) -> "EvolutionConfig":
        return replace(self, snapshot_times=tuple(times))


@dataclass
class TridiagOperator:
    """Second-order central-difference discretization of e^(-2s)(d_ss + drift d_s)."""

    grid: LogGrid
    n: int
    sigma: float
    drift: float
    lower: np.ndarray  # lower[i] multiplies W[i-1] in row i (lower[0] unused)
    diag: np.ndarray
    upper: np.ndarray  # upper[i] multiplies W[i+1] in row i (upper[-1] unused)
    bc: tuple[BoundaryKind, BoundaryKind]

    def apply(self, W: np.ndarray) -> np.ndarray:
        out = self.diag * W
        out[1:] += self.lower[1:] * W[:-1]
        out[:-1] += self.upper[:-1] * W[1:]
        return out

    def dense(self) -> np.ndarray:
        m = self.grid.m_points
        A = np.zeros((m, m))
        A[np.arange(m), np.arange(m)] = self.diag
        A[np.arange(1, m), np.arange(m - 1)] = self.lower[1:]
        A[np.arange(m - 1), np.arange(1, m)] = self.upper[:-1]
        return A

    def dirichlet_mask(self) -> np.ndarray:
        mask = np.zeros(self.grid.m_points, dtype=bool)
        if self.bc[0] == "dirichlet":
            mask[0] = True
        if self.bc[1] == "dirichlet":
            mask[-1] = True
        return mask


def assemble_operator(
    grid: LogGrid,
    exps: ExponentSet,
    bc: tuple[BoundaryKind, BoundaryKind] = ("neumann", "dirichlet"),
) -> TridiagOperator:
    """Operator for the exponent set's (n, sigma); see :func:`assemble_hardy_operator`."""
    return assemble_hardy_operator(grid, exps.n, exps.sigma, bc)


def assemble_hardy_operator(
    grid: LogGrid,
    n: int,
    sigma: float,
    bc: tuple[BoundaryKind, BoundaryKind] = ("neumann", "dirichlet"),
) -> TridiagOperator:
    """Assemble e^(-2s)(W_ss + (n-2-2 sigma) W_s) with the requested end conditions.

    Neumann ends use the ghost reflection W_{-1} = W_1, which also cancels
    the drift term there; Dirichlet ends get a zero row so the pinned value
    never moves.  A Robin condition ("robin", alpha) at the inner end imposes
    W_s = alpha W through the ghost W_{-1} = W_1 - 2 sinh(alpha h) W_0, which
    pure exponential profiles e^(alpha s) satisfy exactly (no spurious
    boundary layer when the solution follows the v_inf shape).  The mesh must
    resolve the drift (h |drift| / 2 < 1) so the off-diagonals stay
    nonnegative and the maximum principle holds.
    """
    if not math.isfinite(sigma):
        raise DomainError("sigma must be finite and real")
    drift = n - 2.0 - 2.0 * sigma
    h = grid.h
    if h * abs(drift) / 2.0 >= 1.0:
        raise DomainError(
            f"grid too coarse for drift {drift:.3g}: need h < {2.0 / abs(drift):.3g}, got {h:.3g}"
        )
    m = grid.m_points
    coef = np.exp(-2.0 * grid.s)
    lower = coef * (1.0 / h**2 - drift / (2.0 * h)) * np.ones(m)
    diag = coef * (-2.0 / h**2) * np.ones(m)
    upper = coef * (1.0 / h**2 + drift / (2.0 * h)) * np.ones(m)

    if bc[0] == "neumann":
        upper[0] = coef[0] * 2.0 / h**2
    elif bc[0] == "dirichlet":
        lower[0] = diag[0] = upper[0] = 0.0
    elif isinstance(bc[0], tuple) and bc[0][0] == "robin":
        alpha = float(bc[0][1])
        if alpha < 0.0:
            raise DomainError("robin coefficient must be >= 0")
        q = 2.0 * math.sinh(alpha * h)
        diag[0] = coef[0] * (-(2.0 + q) / h**2 + drift * q / (2.0 * h))
        upper[0] = coef[0] * 2.0 / h**2
    else:
        raise DomainError(f"unknown boundary kind {bc[0]!r}")
    if bc[1] == "neumann":
        lower[-1] = coef[-1] * 2.0 / h**2
    elif bc[1] == "dirichlet":
        lower[-1] = diag[-1] = upper[-1] = 0.0
    else:
        raise DomainError(f"unknown boundary kind {bc[1]!r}")
    lower[0] = 0.0
    upper[-1] = 0.0
    return TridiagOperator(grid, n, sigma, drift, lower, diag, upper, tuple(bc))


def step_implicit(
    field: RadialField,
    op: TridiagOperator,
    reaction: Optional[ReactionFn],
    dt: float,
    theta: float = 1.0,
    reaction_jacobian: Optional[ReactionFn] = None,
) -> RadialField:
    """One theta-step: solve (I - theta dt A) W+ = W + dt ((1-theta) A W + R(W)).

    The reaction is evaluated at the old iterate.  When
    ``reaction_jacobian`` returns the (nonnegative) damping diagonal
    J = -dR/dW, the step is linearly implicit in the reaction as well:
    (I - theta dt A + theta dt J) W+ = rhs + theta dt J W, which keeps stiff
    pointwise damping unconditionally stable without changing the fixed
    points or the first-order accuracy.
    """
    if dt <= 0.0:
        raise DomainError(f"need dt > 0, got {dt}")
    W = field.W
    mask = op.dirichlet_mask()
    if reaction is not None:
        R = np.asarray(reaction(field), dtype=float)
        R[mask] = 0.0
    else:
        R = np.zeros_like(W)

    rhs = W + dt * ((1.0 - theta) * op.apply(W) + R)
    ab = np.zeros((3, W.size))
    ab[0, 1:] = -theta * dt * op.upper[:-1]
    ab[1, :] = 1.0 - theta * dt * op.diag
    ab[2, :-1] = -theta * dt * op.lower[1:]

    if reaction_jacobian is not None:
        J = np.asarray(reaction_jacobian(field), dtype=float)
        J[mask] = 0.0
        ab[1, :] += theta * dt * J
        rhs += theta * dt * J * W

    try:
        W_new = solve_banded((1, 1), ab, rhs, check_finite=False)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - M-matrix, cannot occur
        raise SolveError(f"tridiagonal solve failed: {exc}") from exc
    return RadialField(field.grid, W_new, field.sigma, field.t + dt)


@dataclass
class Trajectory:
    """Snapshots of an evolution plus per-step diagnostics."""

    grid: LogGrid
    sigma: float
    times: np.ndarray
    fields: list[np.ndarray]
    max_norms: np.ndarray
    nonnegative: bool

    def field_at(self, i: int) -> RadialField:
        return RadialField(self.grid, self.fields[i], self.sigma, float(self.times[i]))

    def w_at(self, i: int) -> np.ndarray:
        return np.exp(-self.sigma * self.grid.s) * self.fields[i]

    def __len__(self) -> int:
        return len(self.fields)


def evolve(
    field: RadialField,
    op: TridiagOperator,
    reaction: Optional[ReactionFn],
    config: EvolutionConfig,
    reaction_jacobian: Optional[ReactionFn] = None,
) -> Trajectory:
    """March from t0 to t1 with a geometric dt schedule, hitting snapshots exactly."""
    if abs(field.t - config.t0) > 1e-12 * max(1.0, config.t0):
        raise DomainError(f"field time {field.t} does not match config t0 {config.t0}")
    snaps = list(config.snapshot_times)
    times: list[float] = []
    fields: list[np.ndarray] = []
    max_norms: list[float] = []
    nonneg = True

    cur = field.copy()
    # a snapshot exactly at t0 records the initial state
    while snaps and snaps[0] <= config.t0 * (1 + 1e-15):
        times.append(config.t0)
        fields.append(cur.W.copy())
        snaps.pop(0)

    dt = config.dt0
    t_end = config.t1
    while cur.t < t_end * (1.0 - 1e-15):
        dt_step = min(dt, t_end - cur.t)
        hit = None
        if snaps and cur.t + dt_step >= snaps[0] * (1.0 - 1e-15):
            hit = snaps[0]
            dt_step = hit - cur.t
        if dt_step <= 0.0:
            # snapshot coincides with current time up to roundoff
            snaps.pop(0)
            times.append(cur.t)
            fields.append(cur.W.copy())
            continue
        cur = step_implicit(cur, op, reaction, dt_step, config.theta, reaction_jacobian)
        if not np.all(np.isfinite(cur.W)):
            raise NonFiniteError(f"field became non-finite at t = {cur.t:.6g}")
        if hit is not None:
            cur.t = hit
            snaps.pop(0)
            times.append(hit)
            fields.append(cur.W.copy())
        max_norms.append(float(np.max(np.abs(cur.W))))
        if nonneg and np.min(cur.W) < 0.0:
            nonneg = False
        dt *= config.growth

    return Trajectory(
        grid=field.grid,
        sigma=field.sigma,
        times=np.asarray(times),
        fields=fields,
        max_norms=np.asarray(max_norms),
        nonnegative=nonneg,
    )
