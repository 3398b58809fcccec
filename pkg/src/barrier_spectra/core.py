"""Branch-consistent complex helpers and region predicates.

Complex numbers are plain Python ``complex`` or numpy complex arrays; every
function here broadcasts over arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SingularInputError, ValidationError


@dataclass(frozen=True)
class GammaStrip:
    """The open strip ``(0, inf) x i(0, gamma)`` in the eigenvalue plane."""

    gamma: float

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValidationError("gamma must be positive", "gamma")


@dataclass(frozen=True)
class Enclosure:
    """Ball of radius ``x_radius`` about 0 united with the gamma strip."""

    gamma: float
    x_radius: float

    def __post_init__(self):
        if not self.x_radius > 0:
            raise ValidationError("x_radius must be positive", "x_radius")

    def contains(self, lam):
        lam = np.asarray(lam)
        return (np.abs(lam) < self.x_radius) | in_gamma_strip(lam, self.gamma)


def _scalar_out(x):
    return x.item() if isinstance(x, np.ndarray) and x.ndim == 0 else x


def sqrt_upper(w):
    """Square root with the cut along ``[0, inf)`` so that ``Im >= 0``.

    Positive reals map to their positive root.
    """
    w = np.asarray(w, dtype=complex)
    r = np.sqrt(w)
    # Im r can underflow to -0.0 just below the cut; the input's sign decides then
    flip = (r.imag < 0) | ((r.imag == 0) & (w.imag < 0))
    r = np.where(flip, -r, r)
    return _scalar_out(r)


def lambert_w(x, *, tol=1e-13, max_iter=100):
    """Principal branch of Lambert W on ``(0, inf)`` by Halley iteration."""
    xa = np.asarray(x, dtype=float)
    if np.any(~(xa > 0)) or not np.all(np.isfinite(xa)):
        raise DomainError("lambert_w requires finite x > 0")
    w = np.log1p(xa)
    for _ in range(max_iter):
        ew = np.exp(w)
        f = w * ew - xa
        if np.all(np.abs(f) <= tol * xa):
            break
        denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0)
        step = f / denom
        w = w - step
        if np.all(np.abs(step) <= 1e-16 * np.maximum(1.0, np.abs(w))):
            break
    return _scalar_out(w)


def blaschke_modulus(z, zj):
    """``|(z - conj(zj)) / (z - zj)|`` for a single Blaschke factor."""
    z = np.asarray(z, dtype=complex)
    zj = np.asarray(zj, dtype=complex)
    if np.any(z == zj):
        raise SingularInputError("Blaschke factor is singular at z == zj")
    return _scalar_out(np.abs((z - np.conj(zj)) / (z - zj)))


def blaschke_modulus_closed(z, zj):
    """Same modulus via ``sqrt(1 + 4 Im z Im zj / |z - zj|^2)``."""
    z = np.asarray(z, dtype=complex)
    zj = np.asarray(zj, dtype=complex)
    if np.any(z == zj):
        raise SingularInputError("Blaschke factor is singular at z == zj")
    return _scalar_out(np.sqrt(1.0 + 4.0 * z.imag * zj.imag / np.abs(z - zj) ** 2))


def in_gamma_strip(lam, strip):
    """True iff ``Re lam > 0`` and ``0 < Im lam < gamma`` (open strip)."""
    gamma = strip.gamma if isinstance(strip, GammaStrip) else float(strip)
    lam = np.asarray(lam, dtype=complex)
    return _scalar_out((lam.real > 0) & (lam.imag > 0) & (lam.imag < gamma))


def wrap_phase(d):
    """Map phase differences into ``(-pi, pi]``."""
    return np.pi - np.mod(np.pi - d, 2.0 * np.pi)
