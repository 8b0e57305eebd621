"""Radial steady states: the singular power law v_inf and the regular family psi_k.

``v_inf(r) = L r**(-2/(p-1))`` solves ``psi'' + (n-1)/r psi' + psi**p = 0``
exactly for p > n/(n-2).  The regular profile psi_1 solves the same ODE with
psi(0) = 1, psi'(0) = 0 and exists globally positive for p >= (n+2)/(n-2);
the one-parameter family is ``psi_k(r) = k * psi_1(k**((p-1)/2) * r)``.

For p >= p_JL every psi_k stays below v_inf; for p_S <= p < p_JL the two
graphs intersect.  Both facts are checked numerically on the integrated
profile.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .errors import BlowdownError, DomainError, RangeError
from .exponents import ExponentSet, ProblemParams, singular_prefactor

#: radius where series initial data hand over to the ODE integrator
SERIES_START = 1e-3


def v_infinity(r, params: ProblemParams | ExponentSet):
    """Singular steady state L * r**(-2/(p-1)); r may be scalar or array."""
    if isinstance(params, ExponentSet):
        L, m = params.L, params.m
    else:
        L, m = singular_prefactor(params)
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr <= 0.0):
        raise DomainError("v_infinity is undefined at r = 0")
    out = L * r_arr ** (-m)
    return float(out) if np.isscalar(r) else out


def steady_residual(values, radii, params: ProblemParams) -> np.ndarray:
    """Residual of psi'' + (n-1)/r psi' + psi^p for a power-law v_inf sample.

    Uses the exact derivatives of L r^-m, so this is a closed-form check of
    the steady equation rather than a finite-difference one.
    """
    L, m = singular_prefactor(params)
    r = np.asarray(radii, dtype=float)
    p, n = params.p, params.n
    d2 = L * m * (m + 1.0) * r ** (-m - 2.0)
    d1 = -L * m * r ** (-m - 1.0)
    return d2 + (n - 1.0) / r * d1 + np.asarray(values, dtype=float) ** p


def _series_value(x, n: int, p: float) -> np.ndarray:
    """Quartic Taylor expansion of psi_1 about the origin."""
    x2 = np.asarray(x, dtype=float) ** 2
    return 1.0 - x2 / (2.0 * n) + p * x2 ** 2 / (8.0 * n * (n + 1.0))


def _series_slope(x, n: int, p: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return -x / n + p * x ** 3 / (2.0 * n * (n + 1.0))


@dataclass
class RadialProfile:
    """Sampled radial profile with a monotone-cubic interpolant between nodes."""

    radii: np.ndarray
    values: np.ndarray
    _interp: PchipInterpolator | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        self.radii = np.asarray(self.radii, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.radii.ndim != 1 or self.radii.shape != self.values.shape:
            raise DomainError("radii and values must be matching 1-d arrays")
        if not np.all(np.diff(self.radii) > 0.0):
            raise DomainError("radii must be strictly increasing")
        if not (np.all(np.isfinite(self.values)) and np.all(self.values >= 0.0)):
            raise DomainError("profile values must be finite and nonnegative")

    @property
    def r_min(self) -> float:
        return float(self.radii[0])

    @property
    def r_max(self) -> float:
        return float(self.radii[-1])

    def __call__(self, r):
        if self._interp is None:
            self._interp = PchipInterpolator(self.radii, self.values, extrapolate=False)
        return self._interp(r)


def integrate_psi(
    params: ProblemParams,
    k: float = 1.0,
    r_max: float = 50.0,
    tol: float = 1e-8,
    n_nodes: int = 2048,
) -> RadialProfile:
    """Integrate psi'' + (n-1)/r psi' + psi^p = 0 with psi(0) = k, psi'(0) = 0.

    Starts from the quartic series at r0 = 1e-3 (the 1/r coefficient is a
    removable singularity at the origin) and marches with an adaptive
    embedded Runge-Kutta 4(5) pair at local tolerance ``tol``.  Raises
    BlowdownError if the profile crosses zero, which signals p < p_S or an
    integrator failure.
    """
    n, p = params.n, params.p
    if k <= 0.0:
        raise DomainError(f"need k > 0, got {k}")
    if r_max < 10.0:
        raise DomainError(f"need r_max >= 10, got {r_max}")
    if not 0.0 < tol <= 1e-4:
        raise DomainError(f"need tol in (0, 1e-4], got {tol}")

    scale = k ** ((p - 1.0) / 2.0)
    r0 = SERIES_START
    # psi_k(r) = k psi_1(scale * r): series start expressed through psi_1
    y0 = [k * float(_series_value(scale * r0, n, p)),
          k * scale * float(_series_slope(scale * r0, n, p))]

    def rhs(r, y):
        psi, dpsi = y
        return [dpsi, -(n - 1.0) / r * dpsi - max(psi, 0.0) ** p]

    def hit_zero(r, y):
        return y[0]

    hit_zero.terminal = True
    hit_zero.direction = -1

    r_eval = np.geomspace(r0, r_max, n_nodes)
    sol = solve_ivp(
        rhs,
        (r0, r_max),
        y0,
        method="RK45",
        t_eval=r_eval,
        rtol=tol,
        atol=tol * 1e-6,
        events=hit_zero,
        dense_output=False,
    )
    if sol.t_events[0].size > 0:
        raise BlowdownError(
            f"psi crossed zero at r = {sol.t_events[0][0]:.6g} (p < p_S or integrator failure)"
        )
    if not sol.success:
        raise BlowdownError(f"profile integration failed: {sol.message}")
    values = sol.y[0]
    if np.any(values <= 0.0):
        raise BlowdownError("profile lost positivity")
    return RadialProfile(sol.t, values)


def integrate_psi1(params: ProblemParams, r_max: float = 50.0, tol: float = 1e-8) -> RadialProfile:
    """Profile psi_1 with psi_1(0) = 1; see :func:`integrate_psi`."""
    return integrate_psi(params, k=1.0, r_max=r_max, tol=tol)


def psi_k(profile_psi1: RadialProfile, k: float, r, params: ProblemParams):
    """Evaluate psi_k(r) = k * psi_1(k**((p-1)/2) * r) from the psi_1 profile.

    Below the series handover radius the quartic expansion is used; beyond
    the integrated range a RangeError is raised.
    """
    if k <= 0.0:
        raise DomainError(f"need k > 0, got {k}")
    n, p = params.n, params.p
    scale = k ** ((p - 1.0) / 2.0)
    x = scale * np.asarray(r, dtype=float)
    if np.any(x > profile_psi1.r_max * (1.0 + 1e-12)):
        raise RangeError(
            f"scaled radius {float(np.max(x)):.6g} exceeds profile range {profile_psi1.r_max:.6g}"
        )
    out = np.where(
        x < profile_psi1.r_min,
        k * _series_value(x, n, p),
        k * np.nan_to_num(profile_psi1(np.clip(x, profile_psi1.r_min, profile_psi1.r_max))),
    )
    return float(out) if np.isscalar(r) else out


def crossings_with_v_infinity(profile: RadialProfile, params: ProblemParams, xtol: float = 1e-8) -> list[float]:
    """Radii where psi_1 - v_inf changes sign, refined by bracketed root finding."""
    diff = profile.values - v_infinity(profile.radii, params)
    roots: list[float] = []
    sign = np.sign(diff)
    for i in np.nonzero(sign[:-1] * sign[1:] < 0)[0]:
        a, b = profile.radii[i], profile.radii[i + 1]
        f = lambda r: float(profile(r)) - v_infinity(float(r), params)
        roots.append(float(brentq(f, a, b, xtol=xtol)))
    return roots


def below_v_infinity(profile: RadialProfile, params: ProblemParams) -> bool:
    """True when the profile sits strictly below v_inf at every node."""
    return bool(np.all(profile.values < v_infinity(profile.radii, params)))
