"""Nonlinear radial dynamics in the gap variable w = v_inf - u.

Substituting u = v_inf - w into u_t = laplace(u) + u^p gives

    w_t = laplace(w) + lam/|x|^2 w - N(w),
    N(w) = (v_inf - w)^p - v_inf^p + p v_inf^(p-1) w >= 0,

where the sign of the defect N follows from convexity of s -> s^p.  The
equation is solved in the W = r^sigma w representation, where the
inverse-square term vanishes identically and the defect becomes the
reaction -e^(sigma s) N(e^(-sigma s) W).

Because N'(w) grows like lam/r^2 where w approaches v_inf, a purely
explicit reaction is unstable once the geometric time step exceeds a few
units; the evolution therefore passes the damping diagonal N'(w) to the
linearly implicit step.  The analogous flow behind a regular steady state
psi_k uses v = psi_k - u, whose extra reaction
p (psi_k^(p-1) - v_inf^(p-1)) v is nonpositive for p > p_JL.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .errors import ComparisonViolation, DomainError
from .exponents import ExponentSet, HardyBranch, ProblemParams, hardy_admissible
from .radial_pde import (
    EvolutionConfig,
    LogGrid,
    RadialField,
    Trajectory,
    assemble_operator,
    evolve,
)
from .steady_states import RadialProfile, psi_k

#: relative tolerance for the pointwise barrier 0 <= w <= v_inf at snapshots
BARRIER_RTOL = 1e-8

#: relative slack when accepting arguments of the defect outside [0, v_inf]
DEFECT_RTOL = 1e-10


@dataclass(frozen=True)
class InitialDataSpec:
    """Admissible initial gap w0 = v_inf - u0 (or v0 = psi_k - u0).

    kinds:
      power_tail(b, ell):  w0 = b r^(-2/(p-1)) for r <= 1, b r^(-ell) beyond
      sigma_tail(b):       w0 = b min(r^(-2/(p-1)), r^(-sigma)/ln(e + r))
      annulus(b, r_lo, r_hi): smooth compact bump, so w0 and |x|^(-sigma) w0
                           are both integrable
      l2_tail(b, r_hi):    square-integrable slowly decaying tail, truncated
      psi_k_gap(k, b, r_lo, r_hi): bump deficit below psi_k of relative size b
    """

    kind: str
    b: float = 0.1
    ell: float = 5.0
    r_lo: float = 1.0
    r_hi: float = 2.0
    k: float = 1.0

    @classmethod
    def power_tail(cls, b: float, ell: float) -> "InitialDataSpec":
        return cls(kind="power_tail", b=b, ell=ell)

    @classmethod
    def sigma_tail(cls, b: float) -> "InitialDataSpec":
        return cls(kind="sigma_tail", b=b)

    @classmethod
    def annulus(cls, b: float, r_lo: float, r_hi: float) -> "InitialDataSpec":
        return cls(kind="annulus", b=b, r_lo=r_lo, r_hi=r_hi)

    @classmethod
    def l2_tail(cls, b: float, r_hi: float = 100.0) -> "InitialDataSpec":
        return cls(kind="l2_tail", b=b, r_hi=r_hi)

    @classmethod
    def psi_k_gap(cls, k: float, b: float = 0.5, r_lo: float = 0.5, r_hi: float = 2.0) -> "InitialDataSpec":
        return cls(kind="psi_k_gap", k=k, b=b, r_lo=r_lo, r_hi=r_hi)

    def scaled(self, factor: float) -> "InitialDataSpec":
        return replace(self, b=self.b * factor)


def _mollifier(r: np.ndarray, r_lo: float, r_hi: float) -> np.ndarray:
    """Standard C^infinity bump on [r_lo, r_hi], peak value 1."""
    xi = (2.0 * r - (r_lo + r_hi)) / (r_hi - r_lo)
    inside = np.abs(xi) < 1.0
    out = np.zeros_like(r)
    with np.errstate(divide="ignore", over="ignore"):
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - xi[inside] ** 2))
    return out


def w0_callable(spec: InitialDataSpec, exps: ExponentSet) -> Callable[[np.ndarray], np.ndarray]:
    """Gap profile w0(r) for the spec, validated against 0 <= u0 <= v_inf."""
    b, m, sigma, L = spec.b, exps.m, exps.sigma, exps.L
    if spec.kind == "power_tail":
        if not 0.0 <= b <= L:
            raise DomainError(f"power_tail needs 0 <= b <= L = {L:.6g}, got b={b}")
        if not spec.ell > 0.0:
            raise DomainError("power_tail needs ell > 0")
        ell = spec.ell
        return lambda r: b * np.where(r <= 1.0, r ** (-m), r ** (-ell))
    if spec.kind == "sigma_tail":
        if not 0.0 <= b <= L:
            raise DomainError(f"sigma_tail needs 0 <= b <= L = {L:.6g}, got b={b}")
        return lambda r: b * np.minimum(r ** (-m), r ** (-sigma) / np.log(math.e + r))
    if spec.kind == "annulus":
        if not 0.0 < spec.r_lo < spec.r_hi:
            raise DomainError("annulus needs 0 < r_lo < r_hi")
        cap = L * spec.r_hi ** (-m)
        if not 0.0 <= b <= cap:
            raise DomainError(f"annulus amplitude must satisfy 0 <= b <= {cap:.6g} so u0 >= 0")
        return lambda r: b * _mollifier(r, spec.r_lo, spec.r_hi)
    if spec.kind == "l2_tail":
        if b < 0.0:
            raise DomainError("l2_tail needs b >= 0")
        r_hi = spec.r_hi
        # decays like r^-6 (square integrable, slowly for L^1 purposes),
        # capped by v_inf near the origin and truncated smoothly at r_hi
        return lambda r: np.minimum(L * r ** (-m), b * r ** (-6.0)) * np.exp(-((r / r_hi) ** 2))
    raise DomainError(f"no direct profile for data kind {spec.kind!r}")


def build_field(
    spec: InitialDataSpec,
    exps: ExponentSet,
    grid: LogGrid,
    t0: float = 0.0,
) -> RadialField:
    """Sample the gap profile w0 on the grid in the W representation."""
    return RadialField.from_w(grid, exps.sigma, w0_callable(spec, exps), t=t0)


def v_inf_on_grid(grid: LogGrid, exps: ExponentSet) -> np.ndarray:
    return exps.L * np.exp(-exps.m * grid.s)


def _defect_scaled(x: np.ndarray, p: float) -> np.ndarray:
    """N(w)/base^p as a function of x = w/base, extended C^1-linearly beyond x = 1.

    On [0, 1] this is (1-x)^p - 1 + p x, evaluated as expm1(p log1p(-x)) + p x
    for full precision near x = 0.  The linear extension p x - 1 for x >= 1
    keeps the restoring force growing when discretization transients push w
    past the barrier; without it the barrier is not preserved.
    """
    x = np.asarray(x, dtype=float)
    out = np.full(x.shape, 0.0)
    mid = (x > 0.0) & (x < 1.0)
    out[mid] = np.expm1(p * np.log1p(-x[mid])) + p * x[mid]
    hi = x >= 1.0
    out[hi] = p * x[hi] - 1.0
    return out


def _defect_slope_scaled(x: np.ndarray, p: float) -> np.ndarray:
    """N'(w)/(p base^(p-1)) = 1 - (1-x)^(p-1) on [0, 1], extended by 0 and 1."""
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape)
    mid = (x > 0.0) & (x < 1.0)
    out[mid] = -np.expm1((p - 1.0) * np.log1p(-x[mid]))
    out[x >= 1.0] = 1.0
    return out


def nonlinear_defect(w_value, r, exps: ExponentSet):
    """Convexity defect N(w) = (v_inf - w)^p - v_inf^p + p v_inf^(p-1) w >= 0.

    Evaluated as v_inf^p * (expm1(p log1p(-x)) + p x) with x = w / v_inf,
    which keeps full precision for small gaps.  Arguments outside
    [0, v_inf] beyond a 1e-10 relative slack are rejected.
    """
    r_arr = np.asarray(r, dtype=float)
    vinf = exps.L * r_arr ** (-exps.m)
    w_arr = np.asarray(w_value, dtype=float)
    x = w_arr / vinf
    if np.any(x < -DEFECT_RTOL) or np.any(x > 1.0 + DEFECT_RTOL):
        raise DomainError("defect argument outside [0, v_inf]")
    out = vinf**exps.p * _defect_scaled(np.clip(x, 0.0, 1.0), exps.p)
    return float(out) if np.isscalar(w_value) and np.isscalar(r) else out


def defect_reaction(exps: ExponentSet, grid: LogGrid):
    """Reaction -e^(sigma s) N(w) and its damping diagonal N'(w) for the stepper."""
    s = grid.s
    vinf = v_inf_on_grid(grid, exps)
    V = np.exp(exps.sigma * s) * vinf  # v_inf in the W representation
    p = exps.p
    e_sig = np.exp(exps.sigma * s)
    vinf_p = vinf**p

    def reaction(field: RadialField) -> np.ndarray:
        return -e_sig * vinf_p * _defect_scaled(field.W / V, p)

    def jacobian(field: RadialField) -> np.ndarray:
        return p * vinf ** (p - 1.0) * _defect_slope_scaled(field.W / V, p)

    return reaction, jacobian


def _check_barrier(traj: Trajectory, barrier_W: np.ndarray, label: str) -> None:
    for i in range(len(traj)):
        W = traj.fields[i]
        rel_hi = np.max((W - barrier_W) / barrier_W)
        rel_lo = np.max(-W / barrier_W)
        if rel_hi > BARRIER_RTOL or rel_lo > BARRIER_RTOL:
            raise ComparisonViolation(
                f"{label} left [0, barrier] at t = {traj.times[i]:.6g}: "
                f"overshoot {rel_hi:.3e}, undershoot {rel_lo:.3e} (relative)"
            )


def evolve_nonlinear(
    spec: InitialDataSpec,
    exps: ExponentSet,
    config: EvolutionConfig,
    grid: LogGrid,
    implicit_defect: bool = True,
) -> Trajectory:
    """Evolve the gap equation; every snapshot is checked against 0 <= w <= v_inf."""
    params = ProblemParams(exps.n, exps.p)
    if hardy_admissible(params) is not HardyBranch.JL_BRANCH:
        raise DomainError("nonlinear gap flow requires the high branch p >= p_JL")
    field = build_field(spec, exps, grid, t0=config.t0)
    # inner profile follows v_inf ~ r^-m, i.e. W ~ e^((sigma-m)s): Robin end
    op = assemble_operator(grid, exps, bc=(("robin", exps.sigma - exps.m), "dirichlet"))
    reaction, jacobian = defect_reaction(exps, grid)
    traj = evolve(field, op, reaction, config, jacobian if implicit_defect else None)
    V = np.exp(exps.sigma * grid.s) * v_inf_on_grid(grid, exps)
    _check_barrier(traj, V, "gap field w")
    return traj


def linear_twin(
    spec: InitialDataSpec,
    exps: ExponentSet,
    config: EvolutionConfig,
    grid: LogGrid,
) -> Trajectory:
    """Linear flow e^(-tH) w0 from the same data and schedule."""
    field = build_field(spec, exps, grid, t0=config.t0)
    op = assemble_operator(grid, exps)
    return evolve(field, op, None, config)


def comparison_monitor(
    spec: InitialDataSpec,
    exps: ExponentSet,
    config: EvolutionConfig,
    grid: LogGrid,
) -> float:
    """Max over snapshots and nodes of w_nonlinear - w_linear (should be <= 0)."""
    nl = evolve_nonlinear(spec, exps, config, grid)
    lin = linear_twin(spec, exps, config, grid)
    return trajectory_violation(nl, lin)


def trajectory_violation(bounded: Trajectory, bounding: Trajectory) -> float:
    """Max node-wise excess of one trajectory over another, in w units."""
    if len(bounded) != len(bounding):
        raise DomainError("trajectories do not share snapshot times")
    decay = np.exp(-bounded.sigma * bounded.grid.s)
    worst = -math.inf
    for i in range(len(bounded)):
        worst = max(worst, float(np.max((bounded.fields[i] - bounding.fields[i]) * decay)))
    return worst


def psi_k_on_grid(
    profile: RadialProfile,
    k: float,
    grid: LogGrid,
    params: ProblemParams,
) -> np.ndarray:
    return np.asarray(psi_k(profile, k, grid.r, params), dtype=float)


def build_psik_gap_field(
    spec: InitialDataSpec,
    exps: ExponentSet,
    grid: LogGrid,
    psi_vals: np.ndarray,
    t0: float = 0.0,
) -> RadialField:
    """v0 = psi_k - u0: a bump deficit of relative depth b below psi_k."""
    if spec.kind != "psi_k_gap":
        raise DomainError(f"expected psi_k_gap data, got {spec.kind!r}")
    if not 0.0 <= spec.b <= 1.0:
        raise DomainError("psi_k_gap depth b must lie in [0, 1]")
    bump = _mollifier(grid.r, spec.r_lo, spec.r_hi)
    support = bump > 0.0
    if not np.any(support):
        raise DomainError("deficit annulus misses the grid")
    amp = spec.b * float(np.min(psi_vals[support]))
    v0 = amp * bump
    return RadialField(grid, np.exp(exps.sigma * grid.s) * v0, exps.sigma, t0)


def psik_reaction(exps: ExponentSet, grid: LogGrid, psi_vals: np.ndarray):
    """Reaction for v = psi_k - u in the W representation.

    R(v) = p (psi_k^(p-1) - v_inf^(p-1)) v - [(psi_k - v)^p - psi_k^p + p psi_k^(p-1) v];
    both parts are nonpositive for 0 <= v <= psi_k and p > p_JL, and the
    damping diagonal -R'(v) is nonnegative.
    """
    s = grid.s
    p = exps.p
    vinf = v_inf_on_grid(grid, exps)
    psi = np.asarray(psi_vals, dtype=float)
    if np.any(psi > vinf * (1.0 + 1e-6)):
        raise DomainError("psi_k must stay below v_inf for this flow (p > p_JL)")
    # the true gap v_inf - psi_k shrinks like r^-sigma and drops below double
    # precision in the far tail; clamp so roundoff cannot flip its sign
    psi = np.minimum(psi, vinf)
    gap_pot = p * (vinf ** (p - 1.0) - psi ** (p - 1.0))  # >= 0
    e_sig = np.exp(exps.sigma * s)
    psi_p = psi**p
    Vpsi = e_sig * psi

    def reaction(field: RadialField) -> np.ndarray:
        x = field.W / Vpsi
        v = np.maximum(x, 0.0) * psi
        return -e_sig * (gap_pot * v + psi_p * _defect_scaled(x, p))

    def jacobian(field: RadialField) -> np.ndarray:
        x = field.W / Vpsi
        return gap_pot + p * psi ** (p - 1.0) * _defect_slope_scaled(x, p)

    return reaction, jacobian


def evolve_near_psik(
    spec: InitialDataSpec,
    exps: ExponentSet,
    config: EvolutionConfig,
    grid: LogGrid,
    profile: RadialProfile,
    check_linear_bound: bool = True,
    linear_tol_factor: float = 1e-6,
) -> Trajectory:
    """Evolve v = psi_k - u behind the regular steady state psi_k (p > p_JL).

    Asserts 0 <= v <= psi_k at snapshots and, unless disabled, the
    node-wise domination v(t) <= e^(-tH) v(0).
    """
    params = ProblemParams(exps.n, exps.p)
    if exps.p <= exps.p_JL:
        raise DomainError("psi_k gap flow requires p > p_JL")
    psi_vals = psi_k_on_grid(profile, spec.k, grid, params)
    field = build_psik_gap_field(spec, exps, grid, psi_vals, t0=config.t0)
    # v = psi_k - u stays bounded at the origin, so W ~ e^(sigma s): Robin end
    op = assemble_operator(grid, exps, bc=(("robin", exps.sigma), "dirichlet"))
    reaction, jacobian = psik_reaction(exps, grid, psi_vals)
    traj = evolve(field, op, reaction, config, jacobian)
    _check_barrier(traj, np.exp(exps.sigma * grid.s) * psi_vals, "gap field v")
    if check_linear_bound:
        lin = evolve(field.copy(), op, None, config)
        viol = trajectory_violation(traj, lin)
        tol = linear_tol_factor * float(np.max(field.w()))
        if viol > tol:
            raise ComparisonViolation(
                f"v exceeded e^(-tH) v0 by {viol:.3e} (tolerance {tol:.3e})"
            )
    return traj
