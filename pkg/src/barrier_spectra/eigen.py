"""Characteristic function f_R(z) and its zeros in the z = sqrt(lambda) plane.

``z`` in the upper half-plane is a zero of f_R exactly when ``z**2`` is an
eigenvalue of H_R.  Zeros are counted with the argument principle on
rectangle boundaries and isolated by recursive quad subdivision followed by
Newton refinement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import sqrt_upper, wrap_phase
from .errors import (
    BoundaryZeroError,
    BudgetExceededError,
    NonIntegerWindingError,
    PreconditionError,
    ValidationError,
)
from .schrodinger import Problem, jost_state, theta_state

SERIES_CUTOFF = 1e-4


@dataclass(frozen=True)
class ZRegion:
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not self.re_min < self.re_max:
            raise ValidationError("re_min must be < re_max", "re_min")
        if not self.im_min < self.im_max:
            raise ValidationError("im_min must be < im_max", "im_min")

    @property
    def diameter(self):
        return math.hypot(self.re_max - self.re_min, self.im_max - self.im_min)

    @property
    def center(self):
        return complex(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))

    def corners(self):
        a, b, c, d = self.re_min, self.re_max, self.im_min, self.im_max
        return complex(a, c), complex(b, c), complex(b, d), complex(a, d)

    def edges(self):
        """Counter-clockwise boundary as four (start, end) pairs."""
        p = self.corners()
        return [(p[0], p[1]), (p[1], p[2]), (p[2], p[3]), (p[3], p[0])]

    def contains(self, z, pad=0.0):
        z = np.asarray(z)
        return ((z.real >= self.re_min - pad) & (z.real <= self.re_max + pad)
                & (z.imag >= self.im_min - pad) & (z.imag <= self.im_max + pad))

    def dilate(self, factor):
        c = self.center
        hw = 0.5 * (self.re_max - self.re_min) * factor
        hh = 0.5 * (self.im_max - self.im_min) * factor
        return ZRegion(c.real - hw, c.real + hw, c.imag - hh, c.imag + hh)

    def split(self, fx=0.5, fy=0.5):
        """Four children; the cut sits at fraction (fx, fy) of each side.

        Boxes more than four times wider than tall (or the reverse) are cut
        into four strips across the long side instead.
        """
        w = self.re_max - self.re_min
        h = self.im_max - self.im_min
        if w > 4.0 * h or h > 4.0 * w:
            ts = [0.0, 0.5 * fx, fx, fx + 0.5 * (1.0 - fx), 1.0]
            if w > h:
                xs = [self.re_min + t * w for t in ts]
                xs[-1] = self.re_max
                return [ZRegion(a, b, self.im_min, self.im_max) for a, b in zip(xs[:-1], xs[1:])]
            ys = [self.im_min + t * h for t in ts]
            ys[-1] = self.im_max
            return [ZRegion(self.re_min, self.re_max, a, b) for a, b in zip(ys[:-1], ys[1:])]
        mx = self.re_min + fx * w
        my = self.im_min + fy * h
        return [
            ZRegion(self.re_min, mx, self.im_min, my),
            ZRegion(mx, self.re_max, self.im_min, my),
            ZRegion(mx, self.re_max, my, self.im_max),
            ZRegion(self.re_min, mx, my, self.im_max),
        ]


@dataclass(frozen=True)
class Eigenvalue:
    lam: complex
    z: complex
    multiplicity: int
    residual: float


@dataclass
class EigenvalueSet:
    entries: list
    problem: Problem
    region: ZRegion
    stats: dict = field(default_factory=dict)

    @property
    def count(self):
        """Number of eigenvalues with multiplicity."""
        return sum(e.multiplicity for e in self.entries)

    @property
    def lambdas(self):
        return np.array([e.lam for e in self.entries], dtype=complex)

    @property
    def zs(self):
        return np.array([e.z for e in self.entries], dtype=complex)

    def __len__(self):
        return len(self.entries)


# --- characteristic functions ----------------------------------------------


def f_closed_zero(gamma, R, z):
    """``iz sin(mu R)/mu - cos(mu R)`` with ``mu = sqrt(z^2 - i gamma)``; entire in z."""
    z = np.asarray(z, dtype=complex)
    mu = np.asarray(sqrt_upper(z * z - 1j * gamma))
    x = mu * R
    small = np.abs(x) < SERIES_CUTOFF
    xs = np.where(small, 1.0, x)
    x2 = x * x
    sinc = np.where(small, R * (1.0 - x2 / 6.0 + x2 * x2 / 120.0), np.sin(xs) / np.where(small, 1.0, mu))
    cos = np.where(small, 1.0 - x2 / 2.0 + x2 * x2 / 24.0, np.cos(xs))
    out = 1j * z * sinc - cos
    return out.item() if out.ndim == 0 else out


def f_lambda_zero(gamma, R, lam):
    """The q = 0 eigenvalue function in the lambda-plane normalisation."""
    lam = np.asarray(lam, dtype=complex)
    sl = sqrt_upper(lam)
    mu = sqrt_upper(lam - 1j * gamma)
    out = (sl - mu) * np.exp(1j * mu * R) - (sl + mu) * np.exp(-1j * mu * R)
    return out.item() if np.ndim(out) == 0 else out


def char_log(problem, z, *, rtol=1e-10, method="magnus"):
    """Complex logarithm of f_R at a batch of ``z``.

    Returns ``(log f, log scale)`` where ``scale`` is the sum of the moduli of
    the terms that make up f, for scale-free residuals.  For compactly
    supported q with ``Q <= R`` f is entire; otherwise ``Im z > 0`` is needed.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    q, R = problem.q, problem.R
    y, s = theta_state(problem, z, R, method=method, rtol=rtol)
    with np.errstate(divide="ignore", invalid="ignore"):
        if q.is_compact and (q.family == "zero" or q.support_bound <= R):
            a = 1j * z * y[0]
            w = a - y[1]
            logf = s + np.log(w)
            logscale = s.real + np.log(np.abs(a) + np.abs(y[1]))
        else:
            if not q.is_compact and np.any(z.imag <= 0):
                raise PreconditionError("f_R needs Im z > 0 unless q has compact support")
            yp, sp = jost_state(q, z, R, method=method, rtol=rtol)
            a = y[0] * yp[1]
            b = y[1] * yp[0]
            logf = s + sp - 1j * z * R + np.log(a - b)
            logscale = (s + sp - 1j * z * R).real + np.log(np.abs(a) + np.abs(b))
    return logf, logscale


def f_general(problem, z, *, rtol=1e-10, method="magnus"):
    """f_R(z): ``iz theta(R) - theta'(R)`` for q supported in [0, R], else
    ``(theta phi' - theta' phi)(R) e^{-izR}``."""
    scalar = np.ndim(z) == 0
    logf, _ = char_log(problem, z, rtol=rtol, method=method)
    with np.errstate(over="ignore"):
        out = np.exp(logf)
    return complex(out[0]) if scalar else out


def phase_rate(problem, z):
    """Rough bound on ``|d log f_R / dz|`` away from zeros.

    f_R is built from ``exp(+-i mu R)`` with ``mu = sqrt(z^2 - i gamma)``, whose
    log-derivative is ``R z / mu``; near ``mu = 0`` f_R is smooth in ``mu^2``
    on the scale ``1 / R^2``.
    """
    z = np.asarray(z, dtype=complex)
    mu = np.abs(sqrt_upper(z * z - 1j * problem.gamma))
    R = problem.R
    return R * np.abs(z) / np.maximum(mu, 1.0 / R) + R


# --- argument principle -------------------------------------------------------


_LOG_GAP = math.log(1e13)


def edge_phases(logf, edges, *, density=16.0, min_samples=8, max_samples=2**20, rate=None):
    """Total continuous phase change of f along each straight edge.

    ``logf`` maps an array of points to complex logarithms of f.  Each edge is
    sampled at ``max(min_samples, density * length)`` points and bisected
    wherever consecutive phase jumps reach pi/2.  ``rate``, if given, bounds
    ``|d log f / dz|`` pointwise; segments longer than ``1 / rate`` are also
    bisected, which prevents aliasing where f oscillates quickly.  Returns
    ``(phase, status)``: status is 0 for a clean edge, 1 for a suspected boundary zero and 2 when
    the sample cap was hit.
    """
    m = len(edges)
    z0 = np.array([e[0] for e in edges], dtype=complex)
    z1 = np.array([e[1] for e in edges], dtype=complex)
    length = np.abs(z1 - z0)
    nseg = np.maximum(min_samples, np.ceil(density * length)).astype(int)

    eid = np.repeat(np.arange(m), nseg + 1)
    offs = np.concatenate([np.linspace(0.0, 1.0, n + 1) for n in nseg]) if m else np.zeros(0)
    pts = z0[eid] + offs * (z1 - z0)[eid] if m else np.zeros(0, complex)
    vals = logf(pts)
    rates = rate(pts) if rate is not None else np.zeros(pts.size)
    starts = np.concatenate([[0], np.cumsum(nseg + 1)[:-1]]) if m else np.zeros(0, int)
    keep = np.ones(eid.size, bool)
    keep[starts + nseg] = False
    seg_e = eid[keep]
    ta, tb = offs[keep], np.roll(offs, -1)[keep]
    la, lb = vals[keep], np.roll(vals, -1)[keep]
    ra, rb = rates[keep], np.roll(rates, -1)[keep]

    phase = np.zeros(m)
    status = np.zeros(m, dtype=int)
    count = nseg.copy()
    while seg_e.size:
        bad_val = ~(np.isfinite(la) & np.isfinite(lb))
        if np.any(bad_val):
            status[np.unique(seg_e[bad_val])] = 1
        d = wrap_phase(lb.imag - la.imag)
        gap = np.abs(la.real - lb.real) > _LOG_GAP
        if np.any(gap & ~bad_val):
            status[np.unique(seg_e[gap & ~bad_val])] = 1
        fast = np.maximum(ra, rb) * (tb - ta) * length[seg_e] > 1.0
        jump = (np.abs(d) >= 0.5 * np.pi) & ~bad_val
        tiny = jump & ((tb - ta) * length[seg_e] < 1e-13 * (1.0 + np.abs(z0[seg_e])))
        if np.any(tiny):
            status[np.unique(seg_e[tiny])] = 1
        capped = (jump | fast) & (count[seg_e] >= max_samples)
        if np.any(capped):
            ce = np.unique(seg_e[capped])
            status[ce] = np.maximum(status[ce], 2)
        live = (status[seg_e] == 0) & ~bad_val
        refine = (jump | fast) & live
        done = ~refine & live
        np.add.at(phase, seg_e[done], d[done])
        if not np.any(refine):
            break
        e, a, b, va, vb = seg_e[refine], ta[refine], tb[refine], la[refine], lb[refine]
        rra, rrb = ra[refine], rb[refine]
        tm = 0.5 * (a + b)
        zm = z0[e] + tm * (z1[e] - z0[e])
        vm = logf(zm)
        rm = rate(zm) if rate is not None else np.zeros(zm.size)
        np.add.at(count, e, 1)
        seg_e = np.concatenate([e, e])
        ta = np.concatenate([a, tm])
        tb = np.concatenate([tm, b])
        la = np.concatenate([va, vm])
        lb = np.concatenate([vm, vb])
        ra = np.concatenate([rra, rm])
        rb = np.concatenate([rm, rrb])
    return phase, status


class WindingEngine:
    """Argument-principle counter for one function with a shared edge cache."""

    def __init__(self, logf, *, density=16.0, max_samples=2**20, rate=None):
        self.logf = logf
        self.rate = rate
        self.density = density
        self.max_samples = max_samples
        self._cache = {}
        self.evaluations = 0

    def _counted(self, z):
        self.evaluations += np.size(z)
        return self.logf(z)

    @staticmethod
    def _key(a, b):
        if (a.real, a.imag) <= (b.real, b.imag):
            return (a, b), 1.0
        return (b, a), -1.0

    def phases(self, edges):
        """Phase change along each edge; ``None`` where the edge is unusable."""
        keys = [self._key(a, b) for a, b in edges]
        missing = list({k for k, _ in keys if k not in self._cache})
        if missing:
            ph, st = edge_phases(self._counted, missing, density=self.density,
                                 max_samples=self.max_samples, rate=self.rate)
            for k, p, s in zip(missing, ph, st):
                self._cache[k] = (p, int(s))
        out = []
        for k, sign in keys:
            p, s = self._cache[k]
            out.append(None if s else sign * p)
        return out, [self._cache[k][1] for k, _ in keys]

    def windings(self, regions):
        """Winding numbers for many rectangles; raises on the first bad one."""
        edges = [e for r in regions for e in r.edges()]
        ph, st = self.phases(edges)
        out = []
        for i, r in enumerate(regions):
            p = ph[4 * i:4 * i + 4]
            s = st[4 * i:4 * i + 4]
            if any(v is None for v in p):
                if max(s) >= 2:
                    raise NonIntegerWindingError(f"phase refinement exhausted on {r}")
                raise BoundaryZeroError(f"zero on or near the boundary of {r}", r)
            out.append(_round_winding(sum(p), r))
        return out


def _round_winding(total, region):
    w = total / (2.0 * math.pi)
    n = round(w)
    if abs(w - n) >= 0.2:
        raise NonIntegerWindingError(f"winding {w:.3f} around {region} is not an integer", w)
    if n < 0:
        raise NonIntegerWindingError(f"negative winding {n} around {region}", w)
    return int(n)


def _as_logf(f, log):
    if log:
        return f

    def logf(z):
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.log(np.asarray(f(z), dtype=complex))

    return logf


def winding_count(f, region, *, log=False, density=16.0, retries=5, max_samples=2**20):
    """Zeros of analytic ``f`` inside ``region`` counted with multiplicity.

    ``f`` is evaluated on arrays; with ``log=True`` it returns log f instead.
    A zero on the boundary triggers up to ``retries`` dilations by 1e-3.
    """
    engine = WindingEngine(_as_logf(f, log), density=density, max_samples=max_samples)
    r = region
    for attempt in range(retries + 1):
        try:
            return engine.windings([r])[0]
        except BoundaryZeroError:
            if attempt == retries:
                raise
            r = r.dilate(1.0 + 1e-3)


# --- eigenvalue location ------------------------------------------------------


def _newton(logf, z, tol, max_iter=50):
    """Batched Newton on f; ``f'/f`` comes from a central difference of f
    taken relative to f(z), which stays well conditioned near the root."""
    z = np.array(z, dtype=complex)
    active = np.ones(z.size, bool)
    converged = np.zeros(z.size, bool)
    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        zi = z[idx]
        h = 1e-6 * (1.0 + np.abs(zi))
        k = idx.size
        lv = logf(np.concatenate([zi, zi + h, zi - h]))
        l0, lp, lm = lv[:k], lv[k:2 * k], lv[2 * k:]
        with np.errstate(all="ignore"):
            ratio = (np.exp(lp - l0) - np.exp(lm - l0)) / (2.0 * h)
            step = -1.0 / ratio
        bad = ~np.isfinite(step)
        step[bad] = 0.0
        z[idx] = zi + step
        conv = (np.abs(step) < tol) & ~bad
        converged[idx[conv]] = True
        active[idx[conv | bad]] = False
    return z, converged


_SPLITS = ((0.5, 0.5), (0.4871, 0.5129), (0.5237, 0.4763), (0.4619, 0.5381))


def locate_eigenvalues(problem, region, tol=1e-10, *, margin=1e-4, contour_rtol=1e-8,
                       newton_rtol=1e-12, density=None, max_boxes=100_000,
                       cluster_diameter=1e-3):
    """Eigenvalues ``lambda = z^2`` of H_R whose square roots lie in ``region``.

    The region is subdivided into quarters while a box holds more than one
    zero; boxes with a single zero are handed to Newton, and a box whose
    Newton iterate escapes is split further.  ``residual`` on each entry is
    ``|f_R(z)|`` relative to the size of the terms forming f_R.
    """
    if region.im_min < margin:
        raise PreconditionError(f"region must satisfy im_min >= {margin}")
    if density is None:
        density = max(16.0, 1.5 * problem.R)

    entire = problem.q.is_compact

    def logf_contour(z):
        return char_log(problem, z, rtol=contour_rtol)[0]

    def logf_fine(z):
        # Newton iterates may leave the half-plane where f is defined
        out = np.full(z.shape, np.nan, dtype=complex)
        ok = entire | (z.imag > 0)
        if np.any(ok):
            out[ok] = char_log(problem, z[ok], rtol=newton_rtol)[0]
        return out

    engine = WindingEngine(logf_contour, density=density, rate=lambda z: phase_rate(problem, z))
    root = region
    for attempt in range(6):
        try:
            total = engine.windings([root])[0]
            break
        except BoundaryZeroError:
            if attempt == 5:
                raise
            root = root.dilate(1.0 + 1e-3)

    found = []
    boxes = [(root, total)] if total else []
    n_boxes = 1
    while boxes:
        cand = [(r, w) for r, w in boxes if w == 1 or r.diameter < cluster_diameter]
        rest = [(r, w) for r, w in boxes if not (w == 1 or r.diameter < cluster_diameter)]
        if cand:
            zc, ok = _newton(logf_fine, [r.center for r, _ in cand], tol)
            for (r, w), zz, good in zip(cand, zc, ok):
                pad = 1e-9 * (1.0 + abs(zz))
                if good and r.contains(zz, pad):
                    found.append((zz, w))
                elif r.diameter < 1e-12:
                    found.append((r.center, w))
                else:
                    rest.append((r, w))
        nxt = []
        for r, w in rest:
            for fx, fy in _SPLITS:
                kids = r.split(fx, fy)
                try:
                    ws = engine.windings(kids)
                except BoundaryZeroError:
                    continue
                if sum(ws) == w:
                    break
            else:
                raise BoundaryZeroError(f"could not split {r} away from boundary zeros", r)
            nxt.extend((k, kw) for k, kw in zip(kids, ws) if kw)
            n_boxes += 4
        if n_boxes > max_boxes:
            partial = _assemble(problem, region, found, logf_fine, engine)
            raise BudgetExceededError(f"subdivision exceeded {max_boxes} boxes", partial)
        boxes = nxt
    out = _assemble(problem, region, found, logf_fine, engine)
    out.stats.update(boxes=n_boxes, winding_total=total)
    return out


def _assemble(problem, region, found, logf_fine, engine):
    entries = []
    if found:
        zs = np.array([z for z, _ in found], dtype=complex)
        logf, logscale = char_log(problem, zs, rtol=1e-12)
        with np.errstate(over="ignore", under="ignore"):
            resid = np.exp(logf.real - logscale)
        for (z, w), r in zip(found, resid):
            entries.append(Eigenvalue(complex(z * z), complex(z), int(w), float(r)))
    entries.sort(key=lambda e: (e.z.real, e.z.imag))
    return EigenvalueSet(entries, problem, region, {"evaluations": engine.evaluations})
