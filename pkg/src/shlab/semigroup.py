"""Linear flow e^(-tH) with H = laplace + lam/|x|^2, weights and weighted norms.

The two-piece weight

    phi_sigma(x, t) = (sqrt(t)/|x|)^sigma   for |x| <= sqrt(t),
                      1                     for |x| >= sqrt(t)

describes the near-origin profile of the flow: kernel columns grow like
|x|^(-sigma) inside the parabolic ball.  Weighted L^q norms are defined so
that q = 2 reproduces the plain L^2 norm (the weight factors cancel), and
the flow obeys an L^r -> L^q smoothing estimate with the free-heat rate
t^(-(n/2)(1/r - 1/q)) measured in these norms.

Everything here works on the W = r^sigma w representation of
:mod:`shlab.radial_pde`; the inverse-square potential is absorbed by the
change of variables, so the linear flow is just the drift-diffusion
evolution with zero reaction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss

_trapezoid = getattr(np, "trapezoid", np.trapz)

from .errors import (
    DivisionError,
    DomainError,
    EmptyRegionError,
    NonFiniteError,
    QuadratureError,
)
from .exponents import ExponentSet
from .radial_pde import (
    EvolutionConfig,
    LogGrid,
    RadialField,
    Trajectory,
    assemble_hardy_operator,
    evolve,
)


def sphere_area(n: int) -> float:
    """Surface measure of the unit sphere S^(n-1)."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def phi(x_radius, t: float, sigma: float):
    """Two-piece weight phi_sigma(x, t); continuous and >= 1 for t > 0."""
    if t <= 0.0:
        raise DomainError(f"need t > 0, got {t}")
    r = np.asarray(x_radius, dtype=float)
    if np.any(r <= 0.0):
        raise DomainError("weight undefined at x = 0")
    inner = (math.sqrt(t) / r) ** sigma
    out = np.where(r <= math.sqrt(t), inner, 1.0)
    return float(out) if np.isscalar(x_radius) else out


@dataclass(frozen=True)
class WeightEvaluator:
    sigma: float

    def __call__(self, x_radius, t: float):
        return phi(x_radius, t, self.sigma)


@dataclass(frozen=True)
class WeightedNormSpec:
    """Exponent q in [1, inf] and the weight time t."""

    q: float
    t: float

    def __post_init__(self) -> None:
        if not self.q >= 1.0:
            raise DomainError(f"need q >= 1, got {self.q}")
        if self.t <= 0.0:
            raise DomainError(f"need t > 0, got {self.t}")


def _phi_inverse_times_w(field: RadialField, t: float) -> np.ndarray:
    """phi_sigma^{-1} w evaluated overflow-free from the W representation.

    Inside the parabolic ball phi^{-1} w = t^{-sigma/2} W; outside it equals
    e^{-sigma s} W.
    """
    s = field.grid.s
    sigma = field.sigma
    half = 0.5 * math.log(t)
    scale = np.where(s <= half, t ** (-sigma / 2.0), np.exp(-sigma * s))
    return scale * field.W


def weighted_norm(field: RadialField, spec: WeightedNormSpec, n: int) -> float:
    """Weighted L^q norm (integral of |w phi^{-1}|^q phi^2 over R^n)^(1/q).

    Computed radially by the trapezoid rule in s = ln r; for q = inf the
    sup of phi^{-1} |w| over grid nodes is returned.  q = 2 reproduces the
    plain L^2 norm identically.
    """
    t, q = spec.t, spec.q
    g = np.abs(_phi_inverse_times_w(field, t))
    if not np.all(np.isfinite(g)):
        raise NonFiniteError("weighted integrand is non-finite on the grid")
    if math.isinf(q):
        return float(np.max(g))
    s = field.grid.s
    sigma = field.sigma
    half = 0.5 * math.log(t)
    # phi^2 r^n in log-radial measure: t^sigma e^{(n-2 sigma)s} inside, e^{ns} outside
    log_meas = np.where(
        s <= half,
        sigma * math.log(t) + (n - 2.0 * sigma) * s,
        n * s,
    )
    integrand = g**q * np.exp(log_meas)
    if not np.all(np.isfinite(integrand)):
        raise NonFiniteError("weighted integrand is non-finite on the grid")
    val = sphere_area(n) * float(_trapezoid(integrand, s))
    return val ** (1.0 / q)


def radial_lq_norm(field: RadialField, q: float, n: int, radial_weight: float = 0.0) -> float:
    """Plain L^q norm of |x|^(-radial_weight) w over R^n, trapezoid in s."""
    s = field.grid.s
    w = field.w()
    if math.isinf(q):
        return float(np.max(np.abs(w)))
    integrand = np.abs(w) ** q * np.exp((n - q * radial_weight) * s)
    val = sphere_area(n) * float(_trapezoid(integrand, s))
    return val ** (1.0 / q)


def sup_weighted(field: RadialField, t: float) -> float:
    """sup over grid nodes of phi_sigma^{-1}(x, t) |w(x)|."""
    return float(np.max(np.abs(_phi_inverse_times_w(field, t))))


def default_linear_config(t1: float, snapshots: Sequence[float], t0: float = 0.0) -> EvolutionConfig:
    return EvolutionConfig(t1=t1, t0=t0, dt0=1e-4, growth=1.05, theta=1.0, snapshot_times=tuple(snapshots))


def apply_semigroup(
    w0: RadialField,
    t: float,
    exps: ExponentSet,
    config: Optional[EvolutionConfig] = None,
    bc=("neumann", "dirichlet"),
) -> RadialField:
    """Evolve the linear equation (zero reaction) from w0.t to time t."""
    if t <= w0.t:
        raise DomainError(f"need t > start time {w0.t}, got {t}")
    op = assemble_hardy_operator(w0.grid, exps.n, w0.sigma, bc)
    cfg = config or default_linear_config(t, [t], t0=w0.t)
    traj = evolve(w0, op, None, cfg)
    return traj.field_at(len(traj) - 1)


def linear_trajectory(
    w0: RadialField,
    exps: ExponentSet,
    times: Sequence[float],
    config: Optional[EvolutionConfig] = None,
    bc=("neumann", "dirichlet"),
) -> Trajectory:
    """Linear evolution with snapshots at the requested times."""
    times = sorted(float(x) for x in times)
    op = assemble_hardy_operator(w0.grid, exps.n, w0.sigma, bc)
    cfg = (config or default_linear_config(times[-1], times, t0=w0.t)).with_snapshots(times)
    return evolve(w0, op, None, cfg)


def decay_series_linear(
    w0: RadialField,
    exps: ExponentSet,
    times: Sequence[float],
    config: Optional[EvolutionConfig] = None,
) -> np.ndarray:
    """Series (t, sup_x phi^{-1}|e^{-tH} w0|) at the requested times."""
    traj = linear_trajectory(w0, exps, times, config)
    out = np.empty((len(traj), 2))
    for i, t in enumerate(traj.times):
        out[i] = (t, sup_weighted(traj.field_at(i), float(t)))
    return out


def vanishing_series_linear(
    w0: RadialField,
    exps: ExponentSet,
    times: Sequence[float],
    config: Optional[EvolutionConfig] = None,
) -> np.ndarray:
    """Series (t, t^(sigma/2) * sup_x phi^{-1}|e^{-tH} w0|)."""
    series = decay_series_linear(w0, exps, times, config)
    series[:, 1] *= series[:, 0] ** (exps.sigma / 2.0)
    return series


def smoothing_ratio(
    w0: RadialField,
    t: float,
    q: float,
    r: float,
    exps: ExponentSet,
    config: Optional[EvolutionConfig] = None,
) -> Optional[float]:
    """Measured constant in the L^r -> L^q smoothing bound at time t.

    Returns ||e^{-tH} w0||_{q, phi(t)} / (t^{-(n/2)(1/r - 1/q)} ||w0||_{r, phi(t)}),
    or None for the 0/0 case of a zero field.
    """
    if not 1.0 <= r <= q:
        raise DomainError(f"need 1 <= r <= q, got r={r}, q={q}")
    n = exps.n
    evolved = apply_semigroup(w0, t, exps, config)
    num = weighted_norm(evolved, WeightedNormSpec(q=q, t=t), n)
    den_norm = weighted_norm(w0, WeightedNormSpec(q=r, t=t), n)
    inv_r = 0.0 if math.isinf(r) else 1.0 / r
    inv_q = 0.0 if math.isinf(q) else 1.0 / q
    den = t ** (-(n / 2.0) * (inv_r - inv_q)) * den_norm
    if den == 0.0:
        if num == 0.0:
            return None
        raise DivisionError("zero input norm with nonzero output norm")
    return num / den


def gaussian_kernel_radial(
    r_nodes: np.ndarray,
    rho: float,
    tau: float,
    n: int,
    n_theta: int = 64,
    _selfcheck: bool = True,
) -> np.ndarray:
    """Spherical average of the heat kernel G(x - y, tau) over |y| = rho.

    G(z, tau) = (4 pi tau)^(-n/2) exp(-|z|^2 / (4 tau)) and the polar-angle
    integral uses Gauss-Legendre quadrature in u = cos(theta) with weight
    (1 - u^2)^((n-3)/2).  Doubling the node count must not move the result
    by more than 1e-8 relative, otherwise a QuadratureError is raised.
    """
    if n_theta < 64:
        raise DomainError(f"need at least 64 angular nodes, got {n_theta}")

    def rule(m_nodes: int) -> np.ndarray:
        u, wq = leggauss(m_nodes)
        ang = (1.0 - u**2) ** ((n - 3) / 2.0)
        den = float(np.sum(wq * ang))
        d2 = r_nodes[:, None] ** 2 + rho**2 - 2.0 * rho * r_nodes[:, None] * u[None, :]
        vals = np.exp(-d2 / (4.0 * tau)) * (4.0 * math.pi * tau) ** (-n / 2.0)
        return (vals * (wq * ang)[None, :]).sum(axis=1) / den

    coarse = rule(n_theta)
    if _selfcheck:
        fine = rule(2 * n_theta)
        scale = np.maximum(np.abs(fine), np.max(np.abs(fine)) * 1e-280 + 1e-300)
        err = np.max(np.abs(fine - coarse) / scale)
        if err > 1e-8:
            raise QuadratureError(f"angular quadrature not converged: rel change {err:.2e}")
        return fine
    return coarse


def annular_bump(grid: LogGrid, sigma: float, rho: float, n: int, width_cells: int = 4) -> RadialField:
    """Unit-mass smooth annular bump of width ``width_cells`` * h around rho."""
    s0 = math.log(rho)
    half_width = 0.5 * width_cells * grid.h
    xi = (grid.s - s0) / half_width
    w = np.where(np.abs(xi) < 1.0, np.cos(0.5 * math.pi * np.clip(xi, -1, 1)) ** 2, 0.0)
    mass = sphere_area(n) * float(_trapezoid(w * np.exp(n * grid.s), grid.s))
    if mass <= 0.0:
        raise DomainError("bump has no mass on the grid; rho outside range?")
    w = w / mass
    return RadialField(grid, np.exp(sigma * grid.s) * w, sigma, 0.0)


def kernel_bound_check(
    rho: float,
    t: float,
    exps_n_sigma: tuple[int, float],
    c: float = 2.0,
    grid: Optional[LogGrid] = None,
    evolved: Optional[RadialField] = None,
    rel_floor: float = 1e-9,
) -> float:
    """Max over nodes of e^{-tH}b(x) / (phi(x,t) phi(rho,t) G_rad(|x|, rho, c t)).

    ``b`` is the unit-mass annular bump at radius rho.  Nodes where either
    the evolved value or the bound has fallen below ``rel_floor`` times its
    own peak are excluded: implicit time stepping produces algebraically fat
    tails, so the deep-tail ratio measures discretization error, not the
    kernel.
    """
    n, sigma = exps_n_sigma
    if evolved is None:
        if grid is None:
            raise DomainError("need either a grid or a pre-evolved field")
        bump = annular_bump(grid, sigma, rho, n)
        op = assemble_hardy_operator(grid, n, sigma, ("neumann", "dirichlet"))
        # slow step growth keeps the discrete kernel Gaussian-accurate far
        # into the tail, where fast schedules produce algebraic fatness
        cfg = EvolutionConfig(t1=t, dt0=1e-4, growth=1.01, snapshot_times=(t,))
        evolved = evolve(bump, op, None, cfg).field_at(0)
    g = evolved.grid
    w = evolved.w()
    bound = phi(g.r, t, sigma) * phi(rho, t, sigma) * gaussian_kernel_radial(g.r, rho, c * t, n)
    mask = (w > rel_floor * np.max(w)) & (bound > rel_floor * np.max(bound))
    if not np.any(mask):
        raise DomainError("no usable nodes for the kernel ratio")
    return float(np.max(w[mask] / bound[mask]))


def kernel_check_sweep(
    rho: float,
    times: Sequence[float],
    n: int,
    sigma: float,
    grid: LogGrid,
    c_values: Sequence[float] = (1.0, 2.0, 4.0),
    config: Optional[EvolutionConfig] = None,
) -> dict:
    """Evolve the bump once and tabulate the kernel ratio over (t, c).

    Also fits the near-origin log-slope of the evolved column on
    r in [1e-4 sqrt(t), 1e-1 sqrt(t)], which should be -sigma.
    """
    times = sorted(float(x) for x in times)
    bump = annular_bump(grid, sigma, rho, n)
    op = assemble_hardy_operator(grid, n, sigma, ("neumann", "dirichlet"))
    if config is None:
        config = EvolutionConfig(t1=times[-1], dt0=1e-4, growth=1.01, snapshot_times=tuple(times))
    traj = evolve(bump, op, None, config.with_snapshots(times))

    ratios = np.empty((len(c_values), len(times)))
    slopes = []
    for j, t in enumerate(traj.times):
        fld = traj.field_at(j)
        for i, c in enumerate(c_values):
            ratios[i, j] = kernel_bound_check(rho, float(t), (n, sigma), c, evolved=fld)
        slopes.append(near_origin_slope(fld, float(t)))

    variation = ratios.max(axis=1) / ratios.min(axis=1)
    best = int(np.argmin(variation))
    return {
        "times": np.asarray(times),
        "c_values": list(c_values),
        "ratios": ratios,
        "variation": variation,
        "best_c": c_values[best],
        "best_variation": float(variation[best]),
        "origin_slopes": np.asarray(slopes),
    }


def near_origin_slope(field: RadialField, t: float, lo_frac: float = 1e-4, hi_frac: float = 1e-1) -> float:
    """Log-log slope of w(r) on r in [lo_frac sqrt(t), hi_frac sqrt(t)]."""
    s = field.grid.s
    lo, hi = math.log(lo_frac * math.sqrt(t)), math.log(hi_frac * math.sqrt(t))
    mask = (s >= lo) & (s <= hi)
    if np.count_nonzero(mask) < 4:
        raise EmptyRegionError("near-origin window holds fewer than 4 grid nodes")
    w = field.w()[mask]
    if np.any(w <= 0.0):
        raise DomainError("near-origin slope needs positive field values")
    return float(np.polyfit(s[mask], np.log(w), 1)[0])
