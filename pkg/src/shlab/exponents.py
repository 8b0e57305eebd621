"""Exponent algebra for the supercritical semilinear heat equation.

For ``u_t = laplace(u) + u**p`` on R^n the long-time behaviour is organised
by a handful of critical exponents.  This module computes them in closed
form together with the constants attached to the singular steady state

    v_inf(r) = L * r**(-2/(p-1)),      L = (m*(n-2-m))**(1/(p-1)),  m = 2/(p-1),

the inverse-square coefficient of the linearisation around ``v_inf``

    lam = 2*p/(p-1) * (n - 2 - 2/(p-1)) = (m+2)*(n-2-m),

and the weight exponent ``sigma``, the smaller root of
``sigma*(n-2-sigma) = lam``.  ``sigma`` is real exactly when
``lam <= (n-2)^2/4`` (Hardy threshold), which happens on two branches of
``p``; the high branch is ``p >= p_JL`` in dimensions ``n >= 11``.

All arithmetic is double precision.  Near the admissibility boundary the
discriminant ``(n-2)^2/4 - lam`` is evaluated through its factored form in
``y = 1/(p-1)``,

    (n-2)^2/4 - lam = 4*(y - y_plus)*(y - y_minus),
    y_{+,-} = (n - 4 +- 2*sqrt(n-1)) / 4,

which avoids the catastrophic cancellation of the direct difference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

from .errors import AdmissibilityError, DegenerateError, DomainError

# Relative slack used to snap classifications sitting on the admissibility
# boundary (p == p_JL in floating point must classify as admissible).
_BOUNDARY_RTOL = 1e-12


def p_fujita(n: int) -> float:
    """Fujita exponent 1 + 2/n."""
    if n < 1:
        raise DomainError(f"dimension must be >= 1, got {n}")
    return 1.0 + 2.0 / n


def p_singular(n: int) -> float:
    """Existence threshold n/(n-2) for the singular steady state (n >= 3)."""
    if n < 3:
        raise DomainError(f"singular steady state needs n >= 3, got {n}")
    return n / (n - 2.0)


def p_sobolev(n: int) -> float:
    """Sobolev exponent (n+2)/(n-2), threshold for bounded steady states."""
    if n < 3:
        raise DomainError(f"Sobolev exponent needs n >= 3, got {n}")
    return (n + 2.0) / (n - 2.0)


def p_joseph_lundgren(n: int) -> float:
    """Joseph-Lundgren exponent; +inf for 3 <= n <= 10 so classification stays total."""
    if n < 3:
        raise DomainError(f"Joseph-Lundgren exponent needs n >= 3, got {n}")
    if n <= 10:
        return math.inf
    root = 2.0 * math.sqrt(n - 1.0)
    return (n - root) / (n - 4.0 - root)


@dataclass(frozen=True)
class ProblemParams:
    """Problem instance (n, p): spatial dimension and nonlinearity exponent."""

    n: int
    p: float

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"dimension must be a positive integer, got {self.n}")
        if not self.p > 1.0:
            raise DomainError(f"nonlinearity exponent must satisfy p > 1, got {self.p}")


class HardyBranch(Enum):
    JL_BRANCH = "JL_branch"
    LOW_BRANCH = "low_branch"
    INADMISSIBLE = "inadmissible"


def _hardy_roots(n: int) -> tuple[float, float]:
    """Roots y_- <= y_+ of 16 y^2 + (32 - 8n) y + n^2 - 12n + 20 = 0."""
    root = 2.0 * math.sqrt(n - 1.0)
    return (n - 4.0 - root) / 4.0, (n - 4.0 + root) / 4.0


def hardy_admissible(params: ProblemParams) -> HardyBranch:
    """Classify (n, p) against the Hardy threshold lam <= (n-2)^2/4.

    In terms of y = 1/(p-1) the threshold reads
    16 y^2 + (32 - 8n) y + n^2 - 12n + 20 >= 0, i.e. y outside the open
    interval (y_-, y_+).  ``y <= y_-`` is the high-p branch (p >= p_JL,
    n >= 11); ``y >= y_+`` is the low-p branch.  Total on p > 1.
    """
    y = 1.0 / (params.p - 1.0)
    y_minus, y_plus = _hardy_roots(params.n)
    snap_lo = _BOUNDARY_RTOL * max(1.0, abs(y_minus))
    snap_hi = _BOUNDARY_RTOL * max(1.0, abs(y_plus))
    if y <= y_minus + snap_lo:
        return HardyBranch.JL_BRANCH
    if y >= y_plus - snap_hi:
        return HardyBranch.LOW_BRANCH
    return HardyBranch.INADMISSIBLE


def singular_prefactor(params: ProblemParams) -> tuple[float, float]:
    """(L, m) of v_inf = L r^(-m); needs only n >= 3 and p > n/(n-2)."""
    n, p = params.n, params.p
    if n < 3:
        raise DomainError(f"singular steady state needs n >= 3, got n={n}")
    if not p > p_singular(n):
        raise DomainError(f"need p > n/(n-2) for v_inf, got p={p}")
    m = 2.0 / (p - 1.0)
    return (m * (n - 2.0 - m)) ** (1.0 / (p - 1.0)), m


@dataclass(frozen=True)
class ExponentSet:
    """Every derived constant of the (n, p) exponent algebra.

    ``lam`` is the inverse-square coefficient of the linearisation,
    ``sigma`` the smaller root of ``sigma*(n-2-sigma) = lam``, ``lambda1``
    the auxiliary root with ``sigma = m + lambda1`` and ``ell_window`` the
    open interval (sigma, n - sigma) of admissible tail exponents.
    """

    n: int
    p: float
    p_F: float
    p_st: float
    p_S: float
    p_JL: float
    m: float
    L: float
    lam: float
    sigma: float
    lambda1: float
    ell_window: tuple[float, float]

    @property
    def drift(self) -> float:
        """First-order coefficient n - 2 - 2*sigma = 2*sqrt((n-2)^2/4 - lam) >= 0."""
        return self.n - 2.0 - 2.0 * self.sigma

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "p_F": self.p_F,
            "p_st": self.p_st,
            "p_S": self.p_S,
            "p_JL": self.p_JL,
            "m": self.m,
            "L": self.L,
            "lambda": self.lam,
            "sigma": self.sigma,
            "lambda1": self.lambda1,
            "ell_window": list(self.ell_window),
        }


def compute_exponents(params: ProblemParams) -> ExponentSet:
    """Evaluate the full exponent algebra for an admissible (n, p).

    Requires n >= 3 and p > n/(n-2) (existence of v_inf) and Hardy
    admissibility (sigma real).  The auxiliary root ``lambda1`` solves
    z^2 - (n-2-2m) z + 2 (n-2-m) = 0 with m = 2/(p-1); its discriminant
    equals (n-2)^2 - 4 lam, so it is real exactly on the admissible set and
    satisfies sigma = m + lambda1 identically.
    """
    n, p = params.n, params.p
    if n < 3:
        raise DomainError(f"singular steady state needs n >= 3, got n={n}")
    p_st = p_singular(n)
    if not p > p_st:
        raise DomainError(f"need p > n/(n-2) = {p_st:.6g} for v_inf, got p={p}")
    branch = hardy_admissible(params)
    if branch is HardyBranch.INADMISSIBLE:
        raise AdmissibilityError(
            f"(n={n}, p={p}) has lam > (n-2)^2/4; sigma is not real"
        )

    m = 2.0 / (p - 1.0)
    lam = (m + 2.0) * (n - 2.0 - m)
    L = (m * (n - 2.0 - m)) ** (1.0 / (p - 1.0))

    y = 1.0 / (p - 1.0)
    y_minus, y_plus = _hardy_roots(n)
    disc = 4.0 * (y - y_plus) * (y - y_minus)  # == (n-2)^2/4 - lam, factored
    # a boundary p is representable only to roundoff; snap the discriminant
    # so sigma(n, p_JL(n)) = (n-2)/2 holds exactly instead of to sqrt(eps)
    if abs(y - y_minus) <= _BOUNDARY_RTOL * max(1.0, abs(y_minus)):
        disc = 0.0
    if abs(y - y_plus) <= _BOUNDARY_RTOL * max(1.0, abs(y_plus)):
        disc = 0.0
    disc = max(disc, 0.0)
    root = math.sqrt(disc)
    sigma = (n - 2.0) / 2.0 - root
    lambda1 = (n - 2.0 - 2.0 * m) / 2.0 - root

    return ExponentSet(
        n=n,
        p=p,
        p_F=p_fujita(n),
        p_st=p_st,
        p_S=p_sobolev(n),
        p_JL=p_joseph_lundgren(n),
        m=m,
        L=L,
        lam=lam,
        sigma=sigma,
        lambda1=lambda1,
        ell_window=(sigma, n - sigma),
    )


def envelope_value(r: float, t: float, b_eff: float, exps: ExponentSet, ell: float) -> float:
    """Lower envelope F(r, t) = v_inf(r) - b_eff * phi_sigma(r, t) * t^(-ell/2).

    Two-piece in r: the weight is (sqrt(t)/r)^sigma inside the parabolic
    ball r <= sqrt(t) and 1 outside.
    """
    L, m, sigma = exps.L, exps.m, exps.sigma
    if r <= math.sqrt(t):
        return L * r ** (-m) - b_eff * t ** ((sigma - ell) / 2.0) * r ** (-sigma)
    return L * r ** (-m) - b_eff * t ** (-ell / 2.0)


def envelope_max(b_eff: float, exps: ExponentSet, ell: float, t: float) -> tuple[float, float]:
    """Closed-form maximiser and maximum of the lower envelope F(., t).

    On the inner branch the stationary point is

        r* = (sigma*b_eff*t^((sigma-ell)/2) / (m*L))^(1/(sigma-m)),
        F(r*) = L*(1 - m/sigma)*r*^(-m),

    so the maximum grows like t^((ell-sigma)/(sigma(p-1)-2)) while the
    maximiser drifts like t^((sigma-ell)/2 * (p-1)/(sigma(p-1)-2)).  When
    r* falls outside the inner region the two-piece maximum sits at
    r = sqrt(t) instead and may be nonpositive for large b_eff.
    """
    if t <= 0.0:
        raise DomainError(f"need t > 0, got {t}")
    if b_eff <= 0.0:
        raise DomainError(f"need b_eff > 0, got {b_eff}")
    lo, hi = exps.ell_window
    if not (lo < ell < hi):
        raise DomainError(f"ell={ell} outside the admissible window ({lo:.6g}, {hi:.6g})")
    sigma, m, L = exps.sigma, exps.m, exps.L
    if sigma <= m:
        raise DomainError("envelope needs sigma*(p-1) > 2, i.e. sigma > m")

    ln_rstar = (math.log(sigma * b_eff / (m * L)) + 0.5 * (sigma - ell) * math.log(t)) / (sigma - m)
    ln_sqrt_t = 0.5 * math.log(t)
    if ln_rstar <= ln_sqrt_t:
        r_star = math.exp(ln_rstar)
        f_max = L * (1.0 - m / sigma) * math.exp(-m * ln_rstar)
    else:
        r_star = math.exp(ln_sqrt_t)
        f_max = L * math.exp(-m * ln_sqrt_t) - b_eff * t ** (-ell / 2.0)
    if f_max <= 0.0:
        raise DegenerateError(
            f"envelope maximum {f_max:.3g} <= 0: b_eff={b_eff} too large at t={t}"
        )
    return r_star, f_max


def golden_section_max(f: Callable[[float], float], lo: float, hi: float, iters: int = 160) -> tuple[float, float]:
    """Locate the maximum of a unimodal f on [lo, hi] by golden-section search."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def envelope_max_search(b_eff: float, exps: ExponentSet, ell: float, t: float) -> tuple[float, float]:
    """Numerical twin of :func:`envelope_max` via golden-section in log-radius."""
    if t <= 0.0 or b_eff <= 0.0:
        raise DomainError("need t > 0 and b_eff > 0")
    ln_sqrt_t = 0.5 * math.log(t)
    x, val = golden_section_max(
        lambda x: envelope_value(math.exp(x), t, b_eff, exps, ell),
        ln_sqrt_t - 40.0,
        ln_sqrt_t + 10.0,
    )
    if val <= 0.0:
        raise DegenerateError(f"envelope maximum {val:.3g} <= 0 at t={t}")
    return math.exp(x), val
