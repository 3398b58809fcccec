"""Explicit enclosure, magnitude and counting bounds as checkable values.

Everything here is closed-form arithmetic on ``(gamma, R)`` plus a few
empirical measurements fed in from the eigenvalue solver.  ``BoundReport``
pairs a right-hand side with the measured quantity it should dominate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import in_gamma_strip, lambert_w, sqrt_upper
from .eigen import ZRegion, char_log, f_closed_zero
from .errors import ConditionViolated, DomainError, PreconditionError, ValidationError
from .potentials import exp_weighted_norm, l1_norm

COMPACT_COUNT_CONST = 11.0 / math.log(2.0)
NAIMARK_COUNT_CONST = 88788.0


@dataclass(frozen=True)
class BoundReport:
    R: float
    bound_name: str
    rhs: float
    measured: float
    satisfied: bool = field(init=False)
    detail: str = ""

    def __post_init__(self):
        object.__setattr__(self, "satisfied", bool(self.measured <= self.rhs))

    def as_dict(self):
        return {"R": self.R, "bound": self.bound_name, "rhs": self.rhs,
                "measured": self.measured, "satisfied": self.satisfied, "detail": self.detail}


@dataclass(frozen=True)
class JensenParams:
    """Radii and shape parameters of the half-disc zero-count estimate.

    Zeros are counted in ``{eta <= Im z <= Y, |z| <= alpha r}`` using data on
    the boundary of the closed upper half-disc of radius ``r``.
    """

    r: float
    alpha: float
    beta: float
    eta: float
    Y: float

    def __post_init__(self):
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValidationError(f"{name} must lie in (0, 1), got {v}", name)
        if not self.eta > 0:
            raise ValidationError("eta must be positive", "eta")
        if not self.eta < self.Y < self.r:
            raise ValidationError("need eta < Y < r", "Y")
        if not separation_margin(self.alpha, self.beta) > self.Y / self.eta:
            raise ConditionViolated(
                f"beta((1-alpha)/(alpha+beta))^2 = {separation_margin(self.alpha, self.beta):.6g}"
                f" does not exceed Y/eta = {self.Y / self.eta:.6g}")

    @property
    def inner_radius(self):
        return self.alpha * self.r

    @property
    def center_point(self):
        """Interior point ``i beta r`` where |f| is sampled."""
        return 1j * self.beta * self.r


def separation_margin(alpha, beta):
    """``beta ((1 - alpha) / (alpha + beta))^2``; must exceed ``Y / eta``."""
    return beta * ((1.0 - alpha) / (alpha + beta)) ** 2


# --- magnitude and enclosure --------------------------------------------------


def magnitude_radius(gamma, R, form="simplified"):
    """Radius bounding ``sqrt|lambda - i gamma|`` for eigenvalues in the strip.

    >>> round(magnitude_radius(1.0, 100.0), 2)
    108.57
    """
    if form == "simplified":
        if not R > 1:
            raise DomainError("simplified form needs R > 1")
        return 5.0 * gamma * R / math.log(R)
    if form == "lambert":
        x = 4.0 * gamma * R
        if not x > 0:
            raise DomainError("lambert form needs gamma R > 0")
        return x / lambert_w(x)
    raise ValidationError(f"unknown form {form!r}", "form")


def check_enclosure(eigs, x_radius, *, R=None, gamma=None):
    """One report per eigenvalue: inside the ball of radius ``x_radius`` or the strip.

    ``measured`` is ``|lambda|`` for eigenvalues outside the strip and 0 for
    those inside it.
    """
    if not x_radius > 0:
        raise DomainError("x_radius must be positive")
    if gamma is None:
        gamma = eigs.problem.gamma
    if R is None:
        R = eigs.problem.R
    lams = eigs.lambdas if hasattr(eigs, "lambdas") else np.asarray(eigs, dtype=complex)
    out = []
    for lam in lams:
        inside = bool(in_gamma_strip(lam, gamma))
        m = 0.0 if inside else abs(lam)
        out.append(BoundReport(float(R), "enclosure", float(x_radius), float(m), f"lambda={lam!r}"))
    return out


def empirical_x(lambdas, gamma, headroom=1.1):
    """``headroom * max |lambda|`` over eigenvalues outside the strip, at least ``1 + gamma``."""
    lam = np.asarray(lambdas, dtype=complex)
    outside = lam[~np.asarray(in_gamma_strip(lam, gamma), dtype=bool).reshape(lam.shape)] if lam.size else lam
    peak = float(np.max(np.abs(outside))) if outside.size else 0.0
    return max(headroom * peak, 1.0 + gamma)


# --- counting -----------------------------------------------------------------


def count_bound_compact(gamma, R):
    """``(11 / log 2) gamma R^2 / log R``."""
    if not R > 1:
        raise DomainError("needs R > 1")
    return COMPACT_COUNT_CONST * gamma * R * R / math.log(R)


def count_bound_naimark(gamma, R, a, x_radius):
    """``88788 (sqrt X + a) / a^2 * gamma^2 R^3 / (log R)^2``."""
    if not R > 1:
        raise DomainError("needs R > 1")
    if not a > 0:
        raise DomainError("needs a > 0")
    if not x_radius > 0:
        raise DomainError("needs x_radius > 0")
    return (NAIMARK_COUNT_CONST * (math.sqrt(x_radius) + a) / a**2
            * gamma**2 * R**3 / math.log(R) ** 2)


def alpha_beta_default(eta, Y):
    """``alpha = beta = eta / (4 (2Y + eta))``, which always satisfies the separation condition."""
    if not 0 < eta < Y:
        raise PreconditionError("need 0 < eta < Y")
    a = eta / (4.0 * (2.0 * Y + eta))
    if not separation_margin(a, a) > Y / eta:
        raise ConditionViolated("default alpha, beta failed the separation condition")
    return a, a


def lambda_factor(p):
    """``(1 + 4 beta eta / ((alpha+beta)^2 r)) / (1 + 4 Y / ((1-alpha)^2 r))``."""
    num = 1.0 + 4.0 * p.beta * p.eta / ((p.alpha + p.beta) ** 2 * p.r)
    den = 1.0 + 4.0 * p.Y / ((1.0 - p.alpha) ** 2 * p.r)
    return num / den


def jensen_zero_bound(f_boundary_sup, f_center, p, *, log=False):
    """Upper bound on the zeros of f in ``{eta <= Im z <= Y, |z| <= alpha r}``.

    ``f_boundary_sup`` is ``sup |f|`` over the boundary of the upper half-disc
    of radius r and ``f_center`` is ``|f(i beta r)|``.  With ``log=True`` both
    are natural logarithms, which keeps very large moduli representable.
    Negative values are clamped to 0.
    """
    lam = lambda_factor(p)
    if not lam > 1.0:
        raise ConditionViolated(f"Lambda(r) = {lam} is not > 1")
    if log:
        log_sup, log_center = float(f_boundary_sup), float(f_center)
    else:
        if not f_center > 0:
            raise PreconditionError("f_center must be positive")
        log_sup, log_center = math.log(f_boundary_sup), math.log(f_center)
    if not math.isfinite(log_center):
        raise PreconditionError("f_center must be positive and finite")
    val = 2.0 / math.log(lam) * (log_sup - log_center - math.log(min(p.beta, 1.0 - p.beta)))
    return max(val, 0.0)


# --- elementary inequalities --------------------------------------------------


@dataclass(frozen=True)
class HpmResult:
    """Whether each applicable inequality holds; non-applicable cases are True."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray

    @property
    def all(self):
        return np.logical_and.reduce([self.a, self.b, self.c])


def hpm_check(lam, gamma, *, slack=1e-12, exclude=1e-9):
    """Check the sum/difference inequalities for ``sqrt(lambda) +- sqrt(lambda - i gamma)``.

    Three cases by where lambda sits relative to the strip and ``[0, inf)``:

    * strip or ``[0, inf)``: ``|s + m| <= gamma / sqrt|lambda - i gamma|`` and
      ``|s - m| >= sqrt|lambda - i gamma|``
    * elsewhere: ``|s + m| >= sqrt|lambda|`` and ``|s - m| <= gamma / sqrt|lambda|``
    * strip: ``Im m <= gamma / sqrt(2 |lambda - i gamma|)``

    where ``s = sqrt(lambda)`` and ``m = sqrt(lambda - i gamma)`` on the upper
    branch.  Points within ``exclude`` of 0 or ``i gamma`` count as satisfied.
    ``slack`` is a relative tolerance on each comparison.
    """
    lam = np.asarray(lam, dtype=complex)
    s = np.asarray(sqrt_upper(lam))
    m = np.asarray(sqrt_upper(lam - 1j * gamma))
    plus, minus = np.abs(s + m), np.abs(s - m)
    dm = np.abs(lam - 1j * gamma)
    dl = np.abs(lam)
    degenerate = (dl < exclude) | (dm < exclude)
    safe_m = np.where(degenerate, 1.0, np.sqrt(dm))
    safe_l = np.where(degenerate, 1.0, np.sqrt(dl))
    strip = np.asarray(in_gamma_strip(lam, gamma), dtype=bool)
    halfline = (lam.imag == 0) & (lam.real >= 0)
    case_a = strip | halfline
    up = 1.0 + slack
    lo = 1.0 - slack
    ok_a = (plus <= up * gamma / safe_m) & (minus >= lo * safe_m)
    ok_b = (plus >= lo * safe_l) & (minus <= up * gamma / safe_l)
    ok_c = m.imag <= up * gamma / (math.sqrt(2.0) * safe_m)
    a = np.where(case_a & ~degenerate, ok_a, True)
    b = np.where(~case_a & ~degenerate, ok_b, True)
    c = np.where(strip & ~degenerate, ok_c, True)
    if lam.ndim == 0:
        return HpmResult(bool(a), bool(b), bool(c))
    return HpmResult(a, b, c)


# --- literature baselines and proximity to the q = 0 problem -------------------


@dataclass(frozen=True)
class Baselines:
    """Literature bounds for the full potential ``q + i gamma chi_[0,R]``.

    ``magnitude`` bounds ``|lambda|``; ``count`` bounds the number of eigenvalues.
    """

    magnitude: float
    count: float


def baseline_bounds(q, gamma, R):
    """``(||q||_1 + gamma R)^2`` and ``R^2 (int e^{t/R}|q| + gamma R (e - 1))^2``."""
    if not R > 0:
        raise DomainError("R must be positive")
    mag = (l1_norm(q) + gamma * R) ** 2
    weighted = exp_weighted_norm(q, 1.0 / R) + gamma * R * (math.e - 1.0)
    return Baselines(float(mag), float(R * R * weighted**2))


def fr0_proximity(problem, grid, n=20, *, rtol=1e-10):
    """Empirical constant in ``|f - f0| <= C exp(Im mu R)`` over an ``n x n`` grid.

    Both functions are converted from the z-plane normalisation used by
    ``f_general`` to the lambda-plane one by the factor ``2 mu``:
    ``F(lambda) = 2 mu f(z)`` with ``mu = sqrt(z^2 - i gamma)``.  The returned
    value is ``max |F - F0| exp(-Im mu R)``.
    """
    if not isinstance(grid, ZRegion):
        raise ValidationError("grid must be a ZRegion", "grid")
    if grid.im_min <= 0:
        raise PreconditionError("grid must lie in the open upper half-plane")
    xs = np.linspace(grid.re_min, grid.re_max, n)
    ys = np.linspace(grid.im_min, grid.im_max, n)
    z = (xs[None, :] + 1j * ys[:, None]).ravel()
    if np.any(np.abs(z * z) < 1.0 + problem.gamma):
        raise PreconditionError("grid points need |z^2| >= 1 + gamma")
    mu = np.asarray(sqrt_upper(z * z - 1j * problem.gamma))
    damp = mu.imag * problem.R
    logf, _ = char_log(problem, z, rtol=rtol)
    f_scaled = np.exp(logf - damp)
    f0_scaled = f_closed_zero(problem.gamma, problem.R, z) * np.exp(-damp)
    return float(np.max(np.abs(2.0 * mu * (f_scaled - f0_scaled))))
