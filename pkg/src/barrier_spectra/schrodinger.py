"""Regular solution theta and Jost solution phi at complex spectral parameter.

Both solve ``psi'' = (q(x) - E) psi``: theta with ``E = z^2 - i gamma`` and
``theta(0) = 0, theta'(0) = 1``; phi with ``E = z^2`` and ``phi ~ e^{izx}``
at infinity.  All propagation works on batches of ``z`` and carries a complex
log-scale next to a normalised state, so that solutions growing like
``exp(1e4)`` stay representable.  The true state is ``exp(s) * y``.

Two integrators are available on pieces where q varies:

``"rk"``      adaptive Dormand-Prince 5(4)
``"magnus"``  adaptive fourth-order Magnus with step doubling; its step size
              is governed by the variation of q, not by ``|z|``, so it is the
              workhorse for contour sampling at high frequency.

Pieces on which q is zero or constant are propagated exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import sqrt_upper
from .errors import PreconditionError, StepSizeUnderflow, ValidationError
from .potentials import Potential, eval_q, weighted_moment

_SQ3 = math.sqrt(3.0)
_GAUSS = (0.5 - _SQ3 / 6.0, 0.5 + _SQ3 / 6.0)


@dataclass(frozen=True, eq=False)
class Problem:
    """The operator ``-d^2/dx^2 + q + i gamma chi_[0,R]`` on the half-line."""

    q: Potential
    gamma: float
    R: float

    def __post_init__(self):
        if not (self.gamma >= 0 and math.isfinite(self.gamma)):
            raise ValidationError("gamma must be finite and >= 0", "gamma")
        if not (self.R > 0 and math.isfinite(self.R)):
            raise ValidationError("R must be finite and > 0", "R")


@dataclass(frozen=True)
class SolutionSample:
    value: complex | np.ndarray
    derivative: complex | np.ndarray
    x: float
    est_error: float | np.ndarray


# --- batched propagation kernels -------------------------------------------


def _renorm(y, s):
    n = np.maximum(np.abs(y[0]), np.abs(y[1]))
    n = np.where(n > 0, n, 1.0)
    return y / n, s + np.log(n)


def _apply_expm(d, b, c, y):
    """Apply ``exp([[d, b], [c, -d]])`` to ``y``; returns (scaled y, log growth)."""
    sig = np.sqrt(d * d + b * c + 0j)
    em = np.exp(-2.0 * sig)
    ch = 0.5 * (1.0 + em)
    small = np.abs(sig) < 1e-7
    sig_safe = np.where(small, 1.0, sig)
    sh = np.where(small, 1.0 - sig + (2.0 / 3.0) * sig * sig, 0.5 * (1.0 - em) / sig_safe)
    y0 = ch * y[0] + sh * (d * y[0] + b * y[1])
    y1 = ch * y[1] + sh * (c * y[0] - d * y[1])
    return np.array([y0, y1]), sig


def _const_step(qval, E, h, y, s):
    yn, g = _apply_expm(0.0, h, h * (qval - E), y)
    return _renorm(yn, s + g)


def _magnus_step(q, E, x, h, y):
    q1 = float(eval_q(q, x + _GAUSS[0] * h))
    q2 = float(eval_q(q, x + _GAUSS[1] * h))
    d = (_SQ3 / 12.0) * h * h * (q1 - q2)
    return _apply_expm(d, h, h * (0.5 * (q1 + q2) - E), y)


def _wnorm(y, nu):
    return np.maximum(np.abs(y[0]), np.abs(y[1]) / nu)


def _magnus_segment(q, E, a, b, y, s, rtol, nu):
    """Adaptive Magnus over ``[a, b]`` (either direction) with step doubling."""
    span = b - a
    direction = 1.0 if span > 0 else -1.0
    h = direction * min(abs(span), 0.05)
    x = a
    while direction * (b - x) > 0:
        if direction * (x + h - b) > 0:
            h = b - x
        y1, g1 = _magnus_step(q, E, x, h, y)
        yh, gh = _magnus_step(q, E, x, 0.5 * h, y)
        y2, g2 = _magnus_step(q, E, x + 0.5 * h, 0.5 * h, yh)
        g2 = g2 + gh
        diff = y1 * np.exp(g1 - g2) - y2
        err = float(np.max(_wnorm(diff, nu) / _wnorm(y2, nu))) if y.shape[1] else 0.0
        if err <= rtol:
            x = x + h
            y, s = _renorm(y2, s + g2)
        if abs(h) < 1e-13 * max(1.0, abs(x)):
            raise StepSizeUnderflow(f"Magnus step size underflow at x={x}", x)
        fac = 5.0 if err == 0 else min(5.0, max(0.2, 0.9 * (rtol / err) ** 0.2))
        h = h * fac
    return y, s


# Dormand-Prince 5(4) tableau
_DP_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_DP_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)


def _rk_segment(q, E, a, b, y, s, rtol, nu, const=None):
    """Adaptive Dormand-Prince over ``[a, b]`` for ``y' = [[0, 1], [q - E, 0]] y``."""
    span = b - a
    direction = 1.0 if span > 0 else -1.0
    h = direction * min(abs(span), 0.5 / float(np.max(nu)))
    x = a

    def rhs(xx, yy):
        qv = const if const is not None else float(eval_q(q, max(xx, 0.0)))
        return np.array([yy[1], (qv - E) * yy[0]])

    k1 = rhs(x, y)
    while direction * (b - x) > 0:
        if direction * (x + h - b) > 0:
            h = b - x
        ks = [k1]
        for i in range(1, 7):
            yi = y + h * sum(aij * kj for aij, kj in zip(_DP_A[i], ks))
            ks.append(rhs(x + _DP_C[i] * h, yi))
        ynew = y + h * sum(bi * ki for bi, ki in zip(_DP_B, ks) if bi)
        errv = h * sum(ei * ki for ei, ki in zip(_DP_E, ks) if ei)
        scale = np.maximum(_wnorm(y, nu), _wnorm(ynew, nu))
        err = float(np.max(_wnorm(errv, nu) / scale)) if y.shape[1] else 0.0
        if err <= rtol:
            x = x + h
            n = np.maximum(np.abs(ynew[0]), np.abs(ynew[1]))
            n = np.where(n > 0, n, 1.0)
            y = ynew / n
            s = s + np.log(n)
            k1 = ks[6] / n
        if abs(h) < 1e-13 * max(1.0, abs(x)):
            raise StepSizeUnderflow(f"Runge-Kutta step size underflow at x={x}", x)
        fac = 5.0 if err == 0 else min(5.0, max(0.2, 0.9 * (rtol / err) ** 0.2))
        h = h * fac
    return y, s


def propagate(q, E, x0, x1, y, s, *, method="magnus", rtol=1e-10, free_tail=True):
    """Carry the state ``exp(s) y`` of ``psi'' = (q - E) psi`` from x0 to x1."""
    E = np.asarray(E, dtype=complex)
    nu = np.maximum(1.0, np.sqrt(np.abs(E)))
    lo, hi = min(x0, x1), max(x0, x1)
    pieces = [seg for seg in q.segments(hi) if seg.b > lo]
    if x1 < x0:
        pieces = pieces[::-1]
    for seg in pieces:
        a, b = max(seg.a, lo), min(seg.b, hi)
        if x1 < x0:
            a, b = b, a
        if seg.kind == "zero" and free_tail:
            y, s = _const_step(0.0, E, b - a, y, s)
        elif seg.kind == "const" and method == "magnus":
            y, s = _const_step(seg.value, E, b - a, y, s)
        elif method == "magnus":
            y, s = _magnus_segment(q, E, a, b, y, s, rtol, nu)
        elif method == "rk":
            const = seg.value if seg.kind != "smooth" else None
            y, s = _rk_segment(q, E, a, b, y, s, rtol, nu, const)
        else:
            raise ValueError(f"unknown method {method!r}")
    return y, s


def theta_state(problem, z, x_end, *, method="magnus", rtol=1e-10, free_tail=True):
    """Batched ``theta(x_end, z)`` as ``(y, s)`` with ``exp(s) * y = (theta, theta')``."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    E = z * z - 1j * problem.gamma
    y = np.zeros((2, z.size), dtype=complex)
    y[1] = 1.0
    s = np.zeros(z.size, dtype=complex)
    return propagate(problem.q, E, 0.0, x_end, y, s, method=method, rtol=rtol, free_tail=free_tail)


def jost_start(q, tail_tol=1e-12):
    """Point beyond which phi is replaced by ``e^{izx}``, on a 1/8 grid."""
    T = q.truncation_point(tail_tol)
    return math.ceil(T * 8.0) / 8.0 if T > 0 else 0.0


def jost_state(q, z, x_eval, *, tail_tol=1e-12, method="magnus", rtol=1e-10):
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    x_inf = jost_start(q, tail_tol)
    y = np.array([np.ones_like(z), 1j * z])
    if x_eval >= x_inf:
        return y, 1j * z * x_eval
    return propagate(q, z * z, x_inf, x_eval, y, 1j * z * x_inf, method=method, rtol=rtol)


# --- public operations ------------------------------------------------------


def _finish(y, s, x, est, scalar):
    with np.errstate(over="ignore", invalid="ignore"):
        scale = np.exp(s)
        val, der = scale * y[0], scale * y[1]
    if scalar:
        return SolutionSample(complex(val[0]), complex(der[0]), float(x), float(est[0]))
    return SolutionSample(val, der, float(x), est)


def _refined_error(y, s, y2, s2):
    with np.errstate(over="ignore", invalid="ignore"):
        a = np.exp(s) * y
        b = np.exp(s2) * y2
    return np.abs(a[0] - b[0]) + np.abs(a[1] - b[1])


def solve_theta(problem, z, x_end, *, rtol=1e-10, method="rk", free_tail=True):
    """Regular solution ``theta(x_end, z), theta'(x_end, z)``.

    ``est_error`` is ``|d theta| + |d theta'|`` against a re-integration at
    a 16x tighter tolerance.  Raises ``StepSizeUnderflow`` if the integrator
    stalls.
    """
    if not x_end > 0:
        raise PreconditionError("x_end must be positive")
    if x_end > problem.R * (1 + 1e-12):
        raise PreconditionError("theta is only defined up to the barrier end R")
    scalar = np.ndim(z) == 0
    y, s = theta_state(problem, z, x_end, method=method, rtol=rtol, free_tail=free_tail)
    y2, s2 = theta_state(problem, z, x_end, method=method, rtol=rtol / 16, free_tail=free_tail)
    return _finish(y, s, x_end, _refined_error(y, s, y2, s2), scalar)


def solve_jost(q, z, x_eval, tail_tol=1e-12, *, rtol=1e-10, method="rk"):
    """Jost solution ``phi(x_eval, z)`` by backward integration from the tail."""
    if x_eval < 0:
        raise PreconditionError("x_eval must be >= 0")
    za = np.atleast_1d(np.asarray(z, dtype=complex))
    if not q.is_compact:
        if q.decay_rate is None:
            raise PreconditionError("Jost solution needs decay metadata")
        if np.any(za.imag <= 0):
            raise PreconditionError("Jost solution requires Im z > 0 for non-compact q")
    scalar = np.ndim(z) == 0
    y, s = jost_state(q, za, x_eval, tail_tol=tail_tol, method=method, rtol=rtol)
    y2, s2 = jost_state(q, za, x_eval, tail_tol=tail_tol, method=method, rtol=rtol / 16)
    return _finish(y, s, x_eval, _refined_error(y, s, y2, s2), scalar)


def gronwall_rhs(q, z, gamma, x):
    """``(1 + x) e^{|Im mu| x} exp(int_0^x (1 + t)|q(t)| dt)`` with ``mu = sqrt(z^2 - i gamma)``."""
    if x < 0:
        raise PreconditionError("x must be >= 0")
    mu = sqrt_upper(np.asarray(z, dtype=complex) ** 2 - 1j * gamma)
    out = (1.0 + x) * np.exp(np.abs(np.imag(mu)) * x + weighted_moment(q, x))
    return float(out) if np.ndim(out) == 0 else out
