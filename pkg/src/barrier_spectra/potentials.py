"""Background potentials ``q`` with the decay metadata the bounds need.

Families
--------
zero      q = 0
box       q = A on [0, Q], 0 after
bump      smooth bump on (0, Q) with peak A at Q/2, 0 after
expdecay  q = A exp(-k x)
samples   piecewise-linear interpolation of (x, q) pairs, 0 past the last abscissa

Compactly supported families carry ``support_bound`` (Q); ``expdecay`` carries
``decay_rate`` (k), meaning ``|q(x)| <= |A| exp(-k x)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import integrate

from .errors import DivergenceError, DomainError, ValidationError

FAMILIES = ("zero", "box", "bump", "expdecay", "samples")

# Semi-infinite integrals are cut where the envelope tail drops below this.
TAIL_CUTOFF = 1e-14


@dataclass(frozen=True)
class Segment:
    """Piece of ``[0, inf)`` on which q is zero, constant or smooth."""

    a: float
    b: float
    kind: str  # "zero" | "const" | "smooth"
    value: float = 0.0


@dataclass(frozen=True, eq=False)
class Potential:
    family: str
    params: dict = field(default_factory=dict)
    support_bound: float | None = None
    decay_rate: float | None = None
    xs: np.ndarray | None = None
    qs: np.ndarray | None = None

    def __call__(self, x):
        return eval_q(self, x)

    @property
    def amplitude(self):
        if self.family == "samples":
            return float(np.max(np.abs(self.qs)))
        return abs(self.params.get("A", 0.0))

    @property
    def is_compact(self):
        return self.family == "zero" or self.support_bound is not None

    def envelope(self, x):
        """Declared majorant of ``|q(x)|``."""
        x = np.asarray(x, dtype=float)
        if self.family == "zero":
            return np.zeros_like(x)
        if self.family == "expdecay":
            return self.amplitude * np.exp(-self.decay_rate * x)
        return np.where(x <= self.support_bound, self.amplitude, 0.0)

    def tail_integral(self, T, eps=0.0):
        """``int_T^inf e^{eps t} envelope(t) dt`` in closed form."""
        if self.family == "zero" or self.amplitude == 0.0:
            return 0.0
        if self.is_compact:
            Q = self.support_bound
            if T >= Q:
                return 0.0
            if eps == 0.0:
                return self.amplitude * (Q - T)
            return self.amplitude * (math.exp(eps * Q) - math.exp(eps * T)) / eps
        k = self.decay_rate - eps
        if k <= 0:
            return math.inf
        return self.amplitude * math.exp(-k * T) / k

    def truncation_point(self, tol=TAIL_CUTOFF, eps=0.0):
        """Smallest T with ``tail_integral(T, eps) < tol``."""
        if self.family == "zero" or self.amplitude == 0.0:
            return 0.0
        if self.is_compact:
            return float(self.support_bound)
        k = self.decay_rate - eps
        if k <= 0:
            raise DivergenceError(f"weight e^({eps} t) is not integrable against decay rate {self.decay_rate}")
        return max(0.0, math.log(self.amplitude / (k * tol)) / k)

    def breakpoints(self):
        if self.family in ("box", "bump"):
            return [0.0, float(self.support_bound)]
        if self.family == "samples":
            return sorted({0.0, *map(float, self.xs)})
        return [0.0]

    def segments(self, x_end, *, tail_tol=TAIL_CUTOFF):
        """Split ``[0, x_end]`` into zero / constant / smooth pieces.

        For ``expdecay`` the potential is treated as zero beyond the point
        where its envelope tail falls below ``tail_tol``.
        """
        out = []
        if self.family == "zero" or self.amplitude == 0.0:
            pieces = [Segment(0.0, math.inf, "zero")]
        elif self.family == "box":
            pieces = [Segment(0.0, self.support_bound, "const", self.params["A"]),
                      Segment(self.support_bound, math.inf, "zero")]
        elif self.family == "bump":
            pieces = [Segment(0.0, self.support_bound, "smooth"),
                      Segment(self.support_bound, math.inf, "zero")]
        elif self.family == "expdecay":
            T = self.truncation_point(tail_tol)
            pieces = [Segment(0.0, T, "smooth"), Segment(T, math.inf, "zero")]
        else:
            bps = self.breakpoints()
            pieces = [Segment(a, b, "smooth") for a, b in zip(bps[:-1], bps[1:])]
            pieces.append(Segment(bps[-1], math.inf, "zero"))
        for s in pieces:
            if s.a >= x_end:
                break
            if s.b > s.a:
                out.append(Segment(s.a, min(s.b, x_end), s.kind, s.value))
        return out


def _pos(params, name, family):
    v = params.get(name)
    if v is None:
        raise ValidationError(f"{family} requires parameter {name}", name)
    v = float(v)
    if not (math.isfinite(v) and v > 0):
        raise ValidationError(f"{family}: {name} must be finite and > 0, got {v}", name)
    return v


def _finite(params, name, family):
    v = params.get(name)
    if v is None:
        raise ValidationError(f"{family} requires parameter {name}", name)
    v = float(v)
    if not math.isfinite(v):
        raise ValidationError(f"{family}: {name} must be finite", name)
    return v


def make_potential(family, **params):
    """Build a validated ``Potential``.

    >>> make_potential("box", A=2, Q=1).support_bound
    1.0
    """
    if family not in FAMILIES:
        raise ValidationError(f"unknown family {family!r}", "family")
    if family == "zero":
        if params:
            raise ValidationError("zero takes no parameters", next(iter(params)))
        return Potential("zero")
    if family in ("box", "bump"):
        extra = set(params) - {"A", "Q"}
        if extra:
            raise ValidationError(f"{family}: unknown parameter {sorted(extra)[0]}", sorted(extra)[0])
        A = _finite(params, "A", family)
        Q = _pos(params, "Q", family)
        return Potential(family, {"A": A, "Q": Q}, support_bound=Q)
    if family == "expdecay":
        extra = set(params) - {"A", "k"}
        if extra:
            raise ValidationError(f"expdecay: unknown parameter {sorted(extra)[0]}", sorted(extra)[0])
        A = _finite(params, "A", family)
        k = _pos(params, "k", family)
        return Potential(family, {"A": A, "k": k}, decay_rate=k)
    # samples
    if "path" in params:
        data = np.loadtxt(Path(params["path"]), ndmin=2)
        if data.shape[1] != 2:
            raise ValidationError("samples file must have two columns", "path")
        xs, qs = data[:, 0], data[:, 1]
    else:
        xs = np.asarray(params.get("xs"), dtype=float)
        qs = np.asarray(params.get("qs"), dtype=float)
    if xs.ndim != 1 or xs.shape != qs.shape or xs.size < 2:
        raise ValidationError("samples need matching 1-d x and q arrays (>= 2 points)", "xs")
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(qs))):
        raise ValidationError("samples must be finite", "qs")
    if xs[0] < 0 or np.any(np.diff(xs) <= 0):
        raise ValidationError("sample abscissae must be >= 0 and strictly increasing", "xs")
    xs = xs.copy()
    qs = qs.copy()
    xs.setflags(write=False)
    qs.setflags(write=False)
    return Potential("samples", {}, support_bound=float(xs[-1]), xs=xs, qs=qs)


def parse_potential(text):
    """Parse ``family[:key=value,...]``, e.g. ``box:A=1,Q=1``."""
    family, _, rest = text.strip().partition(":")
    params = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, sep, value = item.partition("=")
        if not sep:
            raise ValidationError(f"malformed potential parameter {item!r}", item)
        params[key.strip()] = value.strip() if key.strip() == "path" else float(value)
    return make_potential(family.strip(), **params)


def eval_q(q, x):
    """Pointwise value of the potential; ``x`` must be non-negative."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0):
        raise DomainError("potential evaluated at x < 0")
    if q.family == "zero":
        out = np.zeros_like(xa)
    elif q.family == "box":
        out = np.where(xa <= q.support_bound, q.params["A"], 0.0)
    elif q.family == "bump":
        Q = q.support_bound
        u = 2.0 * xa / Q - 1.0
        inside = np.abs(u) < 1.0
        us = np.where(inside, u, 0.0)
        out = np.where(inside, q.params["A"] * np.exp(1.0 - 1.0 / (1.0 - us * us)), 0.0)
    elif q.family == "expdecay":
        out = q.params["A"] * np.exp(-q.params["k"] * xa)
    else:
        out = np.where(xa <= q.xs[-1], np.interp(xa, q.xs, q.qs), 0.0)
    return out.item() if out.ndim == 0 else out


def _weighted_integral(q, weight, T):
    """``int_0^T weight(t) |q(t)| dt`` split at the potential's kinks."""
    if T <= 0:
        return 0.0
    pts = [p for p in q.breakpoints() if 0.0 < p < T]
    edges = [0.0, *pts, T]
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        val, _ = integrate.quad(lambda t: weight(t) * abs(eval_q(q, t)), a, b,
                                epsabs=1e-12, epsrel=1e-12, limit=200)
        total += val
    return total


def l1_norm(q):
    """``||q||_{L^1(0, inf)}``."""
    if q.family == "zero":
        return 0.0
    return _weighted_integral(q, lambda t: 1.0, q.truncation_point())


def exp_weighted_norm(q, eps):
    """``int_0^inf e^{eps t} |q(t)| dt``; diverges when ``eps >= decay_rate``."""
    if not eps > 0:
        raise DomainError("eps must be positive")
    if q.family == "zero":
        return 0.0
    if not q.is_compact and eps >= q.decay_rate:
        raise DivergenceError(f"eps={eps} >= decay rate {q.decay_rate}: integral diverges")
    T = q.truncation_point(eps=eps)
    return _weighted_integral(q, lambda t: math.exp(eps * t), T)


def weighted_moment(q, x):
    """``int_0^x (1 + t) |q(t)| dt``, the Gronwall exponent."""
    if q.family == "zero":
        return 0.0
    T = min(x, q.support_bound) if q.is_compact else x
    return _weighted_integral(q, lambda t: 1.0 + t, T)
