"""Experiment drivers shared by the command line, the scripts and the tests.

Each function takes plain parameters, returns plain data (dataclasses, dicts,
arrays) and does no file I/O.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import (
    BoundReport,
    JensenParams,
    alpha_beta_default,
    baseline_bounds,
    check_enclosure,
    count_bound_compact,
    count_bound_naimark,
    empirical_x,
    fr0_proximity,
    jensen_zero_bound,
    magnitude_radius,
)
from .core import in_gamma_strip, sqrt_upper
from .eigen import (
    EigenvalueSet,
    WindingEngine,
    ZRegion,
    char_log,
    locate_eigenvalues,
    phase_rate,
)
from .errors import BoundaryZeroError, PreconditionError
from .oracle import LambdaRect, aligned_grid, default_length, fd_build, fd_count, richardson_eigenvalues
from .potentials import parse_potential
from .schrodinger import Problem, gronwall_rhs, solve_theta

# --- full spectrum in the upper half-plane ------------------------------------


def search_regions(problem, *, reach=1.25, tall=3.0, split=2.0):
    """Two z-rectangles that together hold every eigenvalue of interest.

    For real q the barrier is dissipative, so ``0 < Im lambda <= gamma``; with
    ``lambda = z^2`` this gives ``Im z <= gamma / (2 Re z)``.  A tall box covers
    ``Re z < split`` and a flat box of height ``gamma / (2 split)`` covers the
    rest out to ``reach`` times the magnitude radius.
    """
    g, R = problem.gamma, problem.R
    zmax = reach * (magnitude_radius(g, R) + math.sqrt(g)) if R > 1 else reach * 10.0
    flat = 1.2 * g / (2.0 * split)
    return [ZRegion(0.0, split, 1e-4, max(tall, 2.0 * flat)), ZRegion(split, max(zmax, 2.0 * split), 1e-4, flat)]


def full_spectrum(problem, *, tol=1e-10, regions=None):
    """Eigenvalues from :func:`search_regions`, merged and sorted."""
    regions = regions or search_regions(problem)
    entries, stats = [], {}
    for i, reg in enumerate(regions):
        s = locate_eigenvalues(problem, reg, tol)
        entries.extend(s.entries)
        stats[f"region{i}"] = s.stats
    entries = _dedupe(entries)
    bbox = ZRegion(min(r.re_min for r in regions), max(r.re_max for r in regions),
                   min(r.im_min for r in regions), max(r.im_max for r in regions))
    return EigenvalueSet(entries, problem, bbox, stats)


def _dedupe(entries, rel=1e-8):
    # a zero on the shared edge can be reported by both boxes after dilation
    entries = sorted(entries, key=lambda e: (e.z.real, e.z.imag))
    out = []
    for e in entries:
        if any(abs(e.z - o.z) <= rel * (1.0 + abs(e.z)) for o in out[-4:]):
            continue
        out.append(e)
    return out


# --- R sweeps -----------------------------------------------------------------


@dataclass
class SweepPoint:
    R: float
    eigs: EigenvalueSet
    x_emp: float
    reports: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)


def proximity_grid(gamma):
    """Default z-grid for the q-to-free proximity constant: ``|z^2| >= 1 + gamma``."""
    lo = 1.2 * math.sqrt(1.0 + gamma)
    return ZRegion(lo, lo + 4.5, 0.05, 1.0)


def sweep_point(q, gamma, R, *, tol=1e-10):
    """Spectrum and every applicable bound report at one R."""
    problem = Problem(q, gamma, R)
    eigs = full_spectrum(problem, tol=tol)
    lam = eigs.lambdas
    x_emp = empirical_x(lam, gamma)
    reports = list(check_enclosure(eigs, x_emp))
    strip = np.asarray(in_gamma_strip(lam, gamma), dtype=bool).reshape(lam.shape)
    dist = np.sqrt(np.abs(lam[strip] - 1j * gamma)) if lam.size else np.zeros(0)
    max_dist = float(dist.max()) if dist.size else 0.0
    rad = magnitude_radius(gamma, R)
    reports.append(BoundReport(R, "magnitude", rad, max_dist, "max sqrt|lambda - i gamma| over the strip"))
    n = eigs.count
    if q.is_compact:
        reports.append(BoundReport(R, "count_compact", count_bound_compact(gamma, R), n))
    if q.decay_rate is not None:
        a = q.decay_rate / 4.0
        reports.append(BoundReport(R, "count_naimark", count_bound_naimark(gamma, R, a, x_emp), n, f"a={a}"))
    base = baseline_bounds(q, gamma, R)
    max_abs = float(np.abs(lam).max()) if lam.size else 0.0
    reports.append(BoundReport(R, "baseline_magnitude", base.magnitude, max_abs,
                               "bound on |lambda|"))
    reports.append(BoundReport(R, "baseline_count", base.count, n))
    c2 = fr0_proximity(problem, proximity_grid(gamma), 20)
    summary = {
        "R": R, "count": n, "x_emp": x_emp, "max_sqrt_dist": max_dist,
        "max_abs_lambda": max_abs, "magnitude_radius": rad,
        "magnitude_radius_lambert": magnitude_radius(gamma, R, "lambert"),
        "proximity_constant": c2,
        "baseline_magnitude": base.magnitude, "baseline_count": base.count,
    }
    if q.is_compact:
        summary["count_bound_compact"] = count_bound_compact(gamma, R)
    if q.decay_rate is not None:
        summary["count_bound_naimark"] = count_bound_naimark(gamma, R, q.decay_rate / 4.0, x_emp)
    return SweepPoint(R, eigs, x_emp, reports, summary)


def bound_onsets(points):
    """Smallest R from which each bound holds at every later R of the sweep."""
    names = sorted({r.bound_name for p in points for r in p.reports})
    out = {}
    for name in names:
        onset = None
        for p in sorted(points, key=lambda p: p.R):
            ok = all(r.satisfied for r in p.reports if r.bound_name == name)
            if ok and onset is None:
                onset = p.R
            elif not ok:
                onset = None
        out[name] = onset
    return out


def loglog_slope(xs, ys):
    """Least-squares slope of log y against log x."""
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def relative_spread(values):
    """``(max - min) / min``."""
    v = np.asarray(values, dtype=float)
    return float((v.max() - v.min()) / v.min())


# --- finite-difference agreement ------------------------------------------------


MATCHED_RECT = (0.1, 10.0, 0.2, 0.95)


@dataclass
class OracleAgreement:
    fd_count: int
    shooting_count: int
    shooting: np.ndarray
    extrapolated: np.ndarray
    error: np.ndarray
    convergence_ratio: np.ndarray
    L: float

    @property
    def deviation(self):
        return np.abs(self.shooting - self.extrapolated)

    @property
    def ok(self):
        return (self.fd_count == self.shooting_count
                and bool(np.all(self.deviation <= self.error))
                and bool(np.all(self.error < 1e-3)))


def oracle_agreement(q, gamma, R, n=6000, *, rect=None, tol=1e-10):
    """FD count and Richardson-extrapolated FD eigenvalues against shooting.

    The lambda-rectangle is scaled by gamma; its bottom edge keeps away from
    the near-real modes that truncation to ``[0, L]`` creates.
    """
    a, b, c, d = rect or MATCHED_RECT
    rect = LambdaRect(a, b, c * gamma, d * gamma)
    problem = Problem(q, gamma, R)
    corner = sqrt_upper(complex(rect.re_max, rect.im_min))
    L = default_length(R, corner.imag)
    eigs = full_spectrum(problem, tol=tol)
    lam = eigs.lambdas
    inside = lam[rect.contains(lam)]
    L, n = aligned_grid(problem, L, n)
    count = fd_count(fd_build(problem, L, n), rect)
    rr = richardson_eigenvalues(problem, L, n, inside)
    return OracleAgreement(count, inside.size, inside, rr.extrapolated, rr.error,
                           rr.convergence_ratio, L)


# --- randomized inequality checks ----------------------------------------------------


BUILTIN_POTENTIALS = ("zero", "box:A=2,Q=1", "bump:A=3,Q=2", "expdecay:A=1,k=5", "box:A=-1,Q=2")


def gronwall_trials(n, seed, method="magnus"):
    """Random ``(z, x, potential, gamma)``; returns ``(lhs, rhs)`` arrays.

    ``method`` picks the integrator for theta (``"magnus"`` or ``"rk"``).
    """
    rng = np.random.default_rng(seed)
    pots = [parse_potential(s) for s in BUILTIN_POTENTIALS]
    lhs, rhs = np.zeros(n), np.zeros(n)
    for i in range(n):
        q = pots[i % len(pots)]
        r, t = 5.0 * math.sqrt(rng.uniform()), rng.uniform(0, 2 * math.pi)
        z = r * complex(math.cos(t), math.sin(t))
        x = rng.uniform(0.01, 10.0)
        gamma = rng.uniform(0.0, 5.0)
        sol = solve_theta(Problem(q, gamma, x), z, x, method=method)
        lhs[i] = abs(sol.value) + abs(sol.derivative)
        rhs[i] = gronwall_rhs(q, z, gamma, x)
    return lhs, rhs


def hpm_trials(n, gammas, seed):
    """Violation counts of the elementary inequalities on uniform samples of ``[-50, 50]^2``."""
    from .bounds import hpm_check

    rng = np.random.default_rng(seed)
    out = {}
    for g in gammas:
        lam = rng.uniform(-50, 50, n) + 1j * rng.uniform(-50, 50, n)
        res = hpm_check(lam, g)
        out[g] = int(np.sum(~res.all))
    return out


def _half_disc_boundary(r, m=4096):
    t = np.linspace(0.0, math.pi, m)
    t = np.union1d(t, [0.5 * math.pi])
    return np.concatenate([np.linspace(-r, r, m).astype(complex), r * np.exp(1j * t)])


def _in_strip_disc(z, p):
    return (z.imag >= p.eta) & (z.imag <= p.Y) & (np.abs(z) <= p.inner_radius)


def jensen_polynomial_trial(rng):
    """One planted-zero polynomial; returns ``(bound, planted count)``."""
    eta = rng.uniform(0.5, 2.0)
    Y = eta * rng.uniform(1.5, 5.0)
    alpha, beta = alpha_beta_default(eta, Y)
    r = Y * rng.uniform(12.0, 40.0)
    p = JensenParams(r, alpha, beta, eta, Y)
    k = int(rng.integers(0, 11))
    inner = []
    while len(inner) < k:
        z = complex(rng.uniform(-p.inner_radius, p.inner_radius), rng.uniform(eta, min(Y, p.inner_radius)))
        if _in_strip_disc(np.array([z]), p)[0]:
            inner.append(z)
    outer = []
    for _ in range(int(rng.integers(0, 6))):
        kind = rng.integers(0, 3)
        if kind == 0:
            z = complex(rng.uniform(-2 * r, 2 * r), rng.uniform(-2 * r, 0.0))
        elif kind == 1:
            z = complex(rng.uniform(-r, r), rng.uniform(0.0, 0.99 * eta))
        else:
            rad, t = rng.uniform(1.01 * p.inner_radius, 2 * r), rng.uniform(0, math.pi)
            z = rad * complex(math.cos(t), math.sin(t))
        if not _in_strip_disc(np.array([z]), p)[0]:
            outer.append(z)
    roots = np.array(inner + outer, dtype=complex)
    log_c = rng.uniform(-3, 3)

    def log_abs(z):
        z = np.asarray(z, dtype=complex)
        return log_c + np.sum(np.log(np.abs(z[:, None] - roots[None, :])), axis=1) if roots.size else np.full(z.shape, log_c)

    sup = float(np.max(log_abs(_half_disc_boundary(r))))
    center = float(log_abs(np.array([p.center_point]))[0])
    return jensen_zero_bound(sup, center, p, log=True), k


# --- Jensen demonstration on the characteristic function -----------------------


def _polyline(points):
    return [(a, b) for a, b in zip(points[:-1], points[1:])]


def strip_disc_edges(rho, eta, Y, arc_segments=64):
    """Counter-clockwise polyline around ``{eta <= Im z <= Y, |z| <= rho}``."""
    xb, xt = math.sqrt(rho * rho - eta * eta), math.sqrt(rho * rho - Y * Y)
    right = rho * np.exp(1j * np.linspace(math.asin(eta / rho), math.asin(Y / rho), arc_segments + 1))
    left = -np.conj(right[::-1])
    pts = [complex(-xb, eta), complex(xb, eta), *right[1:-1], complex(xt, Y),
           complex(-xt, Y), *left[1:-1], complex(-xb, eta)]
    return _polyline(pts)


def jensen_demo(q, gamma, R, a, x_emp=None, *, boundary_samples=200_001):
    """Half-disc zero bound for ``f(z - i a)`` against its true zero count.

    ``x_emp`` defaults to the empirical enclosure radius of the computed
    spectrum.  Returns a dict with the bound, the winding count, the number
    of eigenvalues found directly and the counting bound for decaying q.
    """
    if not q.is_compact:
        raise PreconditionError("the shifted characteristic function is entire only for compact q")
    problem = Problem(q, gamma, R)
    eigs = full_spectrum(problem)
    if x_emp is None:
        x_emp = empirical_x(eigs.lambdas, gamma)
    eta, Y = a, math.sqrt(x_emp) + a
    alpha, beta = alpha_beta_default(eta, Y)
    inner = math.sqrt(gamma) + a + magnitude_radius(gamma, R)
    p = JensenParams(inner / alpha, alpha, beta, eta, Y)

    def log_shifted(z):
        return char_log(problem, np.asarray(z) - 1j * a)[0]

    bnd = _half_disc_boundary(p.r, boundary_samples // 2)
    log_sup = -math.inf
    for chunk in np.array_split(bnd, max(1, bnd.size // 20000)):
        log_sup = max(log_sup, float(np.max(log_shifted(chunk).real)))
    log_center = float(log_shifted(np.array([p.center_point]))[0].real)
    bound = jensen_zero_bound(log_sup, log_center, p, log=True)

    engine = WindingEngine(log_shifted, density=max(16.0, 1.5 * R),
                           rate=lambda z: phase_rate(problem, np.asarray(z) - 1j * a))
    edges = strip_disc_edges(p.inner_radius, eta, Y)
    for attempt in range(6):
        ph, st = engine.phases(edges)
        if all(v is not None for v in ph):
            break
        if attempt == 5:
            raise BoundaryZeroError("zero on the strip-disc boundary", None)
        eta *= 1.0 - 1e-3
        edges = strip_disc_edges(p.inner_radius, eta, Y)
    winding = round(sum(ph) / (2.0 * math.pi))
    naimark = count_bound_naimark(gamma, R, a, x_emp)
    return {
        "R": R, "gamma": gamma, "a": a, "x_emp": x_emp,
        "eta": eta, "Y": Y, "alpha": alpha, "beta": beta, "r": p.r, "inner_radius": p.inner_radius,
        "log_boundary_sup": log_sup, "log_center": log_center,
        "bound": bound, "winding_count": int(winding), "eigenvalue_count": eigs.count,
        "count_bound_naimark": naimark,
        "ok": bool(bound >= winding and bound <= naimark and winding <= naimark),
    }
