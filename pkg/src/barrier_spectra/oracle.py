"""Finite-difference cross-check of eigenvalues and counts.

The operator is truncated to ``[0, L]`` with Dirichlet ends and discretised
by the three-point Laplacian.  Determinants of ``A - lambda`` come from the
ratio form of the tridiagonal recurrence, vectorised over lambda, so nothing
here touches the ODE shooting code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import wrap_phase
from .errors import (
    BoundaryZeroError,
    NonIntegerWindingError,
    PreconditionError,
    ValidationError,
)
from .potentials import eval_q


@dataclass(frozen=True)
class LambdaRect:
    """Axis-aligned rectangle in the eigenvalue plane."""

    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValidationError("rectangle needs min < max on both axes", "re_min")

    def contains(self, lam):
        lam = np.asarray(lam)
        return ((lam.real > self.re_min) & (lam.real < self.re_max)
                & (lam.imag > self.im_min) & (lam.imag < self.im_max))


@dataclass(frozen=True, eq=False)
class FDSystem:
    """Tridiagonal ``A`` with diagonal ``2/h^2 + q + i gamma [x <= R]`` and off-diagonal ``-1/h^2``.

    On the cell holding a jump of q or of the barrier the cell average is
    used in place of the node value.
    """

    problem: object
    L: float
    n: int
    h: float
    x: np.ndarray
    diag: np.ndarray

    @property
    def offdiag_sq(self):
        return 1.0 / self.h**4


def default_length(R, im_z_min):
    """Truncation length ``R + max(20, 10 / Im z_min)``."""
    if not im_z_min > 0:
        raise PreconditionError("im_z_min must be positive")
    return R + max(20.0, 10.0 / im_z_min)


def aligned_grid(problem, L, n):
    """Nudge ``(L, n)`` so every jump of q and the barrier edge sits on a node.

    With a jump on a node the half-cell average gives an error that is a
    clean power series in h, so Richardson extrapolation applies.  Halving h
    keeps the alignment.  The barrier edge is always aligned; jumps of q
    are aligned when a spacing at most 4x finer than asked allows it.
    Returns ``(L, n)`` with ``L`` no shorter than asked.
    """
    jumps = [b for b in problem.q.breakpoints() if 0.0 < b < L] + [problem.R]
    h0 = L / (n + 1)
    first = max(1, math.ceil(problem.R / h0))
    h = problem.R / first
    # refine by up to 4x looking for a spacing that also hits the jumps of q
    for m in range(first, 4 * first + 1):
        if all(abs(b * m / problem.R - round(b * m / problem.R)) < 1e-9 for b in jumps):
            h = problem.R / m
            break
    steps = int(math.ceil(L / h - 1e-9))
    return steps * h, steps - 1


_GL3 = (np.array([-math.sqrt(0.6), 0.0, math.sqrt(0.6)]), np.array([5.0, 8.0, 5.0]) / 9.0)


def _cell_average(q, x, h):
    """Node values of q, replaced by cell averages on cells that straddle a jump.

    A jump inside a cell otherwise costs O(h) accuracy and spoils h^2
    extrapolation.
    """
    out = np.asarray(eval_q(q, x), dtype=float).copy()
    lo, hi = x - 0.5 * h, x + 0.5 * h
    nodes, weights = _GL3
    for bp in q.breakpoints():
        if bp <= 0.0:
            continue
        for j in np.flatnonzero((lo < bp) & (bp < hi)):
            total = 0.0
            for a, b in ((lo[j], bp), (bp, hi[j])):
                mid, half = 0.5 * (a + b), 0.5 * (b - a)
                # nudge off the breakpoint so each side sees its own limit
                t = np.clip(mid + half * nodes, a + 1e-12 * h, b - 1e-12 * h)
                total += half * float(np.dot(weights, eval_q(q, t)))
            out[j] = total / h
    return out


def fd_build(problem, L, n):
    if not L > problem.R:
        raise PreconditionError(f"truncation length {L} must exceed R = {problem.R}")
    if int(n) != n or n < 16:
        raise PreconditionError("need an integer n >= 16")
    n = int(n)
    h = L / (n + 1)
    x = h * np.arange(1, n + 1)
    barrier = np.clip((problem.R - (x - 0.5 * h)) / h, 0.0, 1.0)
    diag = 2.0 / h**2 + _cell_average(problem.q, x, h) + 1j * problem.gamma * barrier
    x.setflags(write=False)
    diag.setflags(write=False)
    return FDSystem(problem, float(L), n, h, x, diag)


def _recurrence(sys, lam, with_derivative=False):
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    b2 = sys.offdiag_sq
    logmag = np.zeros(lam.shape)
    phase = np.zeros(lam.shape)
    dlog = np.zeros(lam.shape, dtype=complex)
    r = np.ones(lam.shape, dtype=complex)
    dr = np.zeros(lam.shape, dtype=complex)
    tiny = 1e-300
    for k, a in enumerate(sys.diag):
        if k == 0:
            r_new = a - lam
            dr_new = -np.ones_like(lam)
        else:
            inv = 1.0 / r
            r_new = (a - lam) - b2 * inv
            if with_derivative:
                dr_new = -1.0 + b2 * dr * inv * inv
        r_new = np.where(r_new == 0, tiny, r_new)
        logmag += np.log(np.abs(r_new))
        phase += np.angle(r_new)
        if with_derivative:
            dlog += dr_new / r_new
            dr = dr_new
        r = r_new
    return logmag, wrap_phase(phase), dlog


def fd_logdet_phase(sys, lam):
    """``log|det(A - lambda)|`` and ``arg det(A - lambda)`` in ``(-pi, pi]``."""
    scalar = np.ndim(lam) == 0
    logmag, phase, _ = _recurrence(sys, lam)
    if scalar:
        return float(logmag[0]), float(phase[0])
    return logmag, phase


def fd_sturm_count(sys, lam):
    """Eigenvalues below real ``lam`` for a real symmetric system (gamma = 0)."""
    if np.any(sys.diag.imag != 0):
        raise PreconditionError("Sturm counting needs a real system")
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    b2 = sys.offdiag_sq
    r = np.ones(lam.shape)
    neg = np.zeros(lam.shape, dtype=int)
    for k, a in enumerate(sys.diag.real):
        r = (a - lam) - (b2 / r if k else 0.0)
        r = np.where(r == 0, 1e-300, r)
        neg += r < 0
    return neg


def _boundary_phase(sys, rect, density, max_samples):
    """Phase of det(A - lambda) around ``rect``.

    A segment is bisected while its phase jump reaches pi/2 or while the
    exact log-derivative from the recurrence says the phase could turn by
    more than one radian across it; the second rule stops aliasing where
    eigenvalues crowd just outside the rectangle.
    """
    corners = [complex(rect.re_min, rect.im_min), complex(rect.re_max, rect.im_min),
               complex(rect.re_max, rect.im_max), complex(rect.re_min, rect.im_max)]
    pts = []
    for a, b in zip(corners, corners[1:] + corners[:1]):
        m = max(8, int(math.ceil(density * abs(b - a))))
        pts.append(a + (b - a) * np.arange(m) / m)
    lam = np.concatenate(pts)
    _, ph, dl = _recurrence(sys, lam, with_derivative=True)
    ph, rate = wrap_phase(ph), np.abs(dl)
    # segments (lam[i], lam[i+1]) around the closed loop
    a, b = lam, np.roll(lam, -1)
    pa, pb = ph, np.roll(ph, -1)
    ra, rb = rate, np.roll(rate, -1)
    total = 0.0
    count = lam.size
    scale = max(abs(c) for c in corners)
    while a.size:
        d = wrap_phase(pb - pa)
        big = (np.abs(d) >= 0.5 * np.pi) | (np.maximum(ra, rb) * np.abs(b - a) > 1.0)
        total += float(np.sum(d[~big]))
        if not np.any(big):
            break
        a, b, pa, pb, ra, rb = a[big], b[big], pa[big], pb[big], ra[big], rb[big]
        if np.any(np.abs(b - a) < 1e-12 * (1.0 + scale)):
            raise BoundaryZeroError("eigenvalue on the rectangle boundary", rect)
        count += a.size
        if count > max_samples:
            raise NonIntegerWindingError("boundary refinement exceeded the sample cap", math.nan)
        m = 0.5 * (a + b)
        _, pm, dm = _recurrence(sys, m, with_derivative=True)
        pm, rm = wrap_phase(pm), np.abs(dm)
        a, b = np.concatenate([a, m]), np.concatenate([m, b])
        pa, pb = np.concatenate([pa, pm]), np.concatenate([pm, pb])
        ra, rb = np.concatenate([ra, rm]), np.concatenate([rm, rb])
    return total


def fd_count(sys, rect, *, delta=None, density=64.0, max_samples=2**20):
    """Eigenvalues of the discrete system inside ``rect`` by the argument principle."""
    if delta is None:
        delta = 0.01 * sys.problem.gamma
    if rect.im_min < delta:
        raise PreconditionError(f"rectangle must stay above Im lambda = {delta}")
    total = _boundary_phase(sys, rect, density, max_samples)
    w = total / (2.0 * math.pi)
    k = round(w)
    if abs(w - k) >= 0.2 or k < 0:
        raise NonIntegerWindingError(f"winding {w:.3f} is not a non-negative integer", w)
    return int(k)


def fd_refine(sys, lam0, *, tol=1e-12, max_iter=50):
    """Newton on ``det(A - lambda)`` from each starting point; returns (lambda, converged)."""
    lam = np.array(np.atleast_1d(lam0), dtype=complex)
    ok = np.zeros(lam.size, bool)
    active = np.ones(lam.size, bool)
    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        _, _, dlog = _recurrence(sys, lam[idx], with_derivative=True)
        # d/dlambda log det = sum r_k'/r_k, and det vanishes where it has a pole
        step = np.where(dlog != 0, -1.0 / dlog, 0.0)
        lam[idx] += step
        done = np.abs(step) <= tol * (1.0 + np.abs(lam[idx]))
        ok[idx[done]] = True
        active[idx[done]] = False
    return lam, ok


@dataclass(frozen=True)
class RichardsonResult:
    """Eigenvalues on grids n, 2n+1, 4n+3 (h halving exactly) and their extrapolations."""

    coarse: np.ndarray
    mid: np.ndarray
    fine: np.ndarray
    extrapolated: np.ndarray
    error: np.ndarray

    @property
    def convergence_ratio(self):
        return np.abs(self.coarse - self.mid) / np.abs(self.mid - self.fine)


def richardson_eigenvalues(problem, L, n, seeds, *, tol=1e-12):
    """Follow each seed through three grids and extrapolate in ``h^2``.

    ``extrapolated`` combines the two finer grids; ``error`` is its distance
    from the coarser extrapolation, a conservative estimate.
    """
    # finest grid first: its eigenvalues sit closest to the seeds, and the
    # h^2 law predicts where each coarser copy lies
    L, n = aligned_grid(problem, L, n)
    fine_sys, mid_sys, coarse_sys = (fd_build(problem, L, m) for m in (4 * n + 3, 2 * n + 1, n))
    f, ok_f = fd_refine(fine_sys, seeds, tol=tol)
    m_, ok_m = fd_refine(mid_sys, f, tol=tol)
    c, ok_c = fd_refine(coarse_sys, m_ + 4.0 * (m_ - f), tol=tol)
    for ok, sys in ((ok_f, fine_sys), (ok_m, mid_sys), (ok_c, coarse_sys)):
        if not np.all(ok):
            raise PreconditionError(f"Newton failed on the n={sys.n} grid for {int(np.sum(~ok))} seeds")
    ext_coarse = (4.0 * m_ - c) / 3.0
    ext_fine = (4.0 * f - m_) / 3.0
    return RichardsonResult(c, m_, f, ext_fine, np.abs(ext_fine - ext_coarse))
