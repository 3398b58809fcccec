"""Reference computations that share no code with the package solvers."""

import numpy as np


def closed_form_free(gamma, R, z):
    """``i z sin(mu R)/mu - cos(mu R)`` written out with numpy's principal sqrt.

    The expression is even in mu, so the branch does not matter.
    """
    z = np.asarray(z, dtype=complex)
    mu = np.sqrt(z * z - 1j * gamma)
    return 1j * z * np.sinc(mu * R / np.pi) * R - np.cos(mu * R)


def newton_roots(f, re, im, n_re, n_im, *, iters=60, tol=1e-13):
    """Roots of an analytic f in ``re x im`` from a dense grid of Newton seeds."""
    x = np.linspace(*re, n_re)
    y = np.linspace(*im, n_im)
    z = (x[None, :] + 1j * y[:, None]).ravel()
    for _ in range(iters):
        h = 1e-6 * (1 + np.abs(z))
        d = (f(z + h) - f(z - h)) / (2 * h)
        with np.errstate(all="ignore"):
            z = z - f(z) / d
        z = np.where(np.isfinite(z), z, np.nan)
    ok = np.isfinite(z)
    z = z[ok]
    with np.errstate(all="ignore"):
        small = np.abs(f(z)) < 1e-8
    z = z[small & (z.real > re[0]) & (z.real < re[1]) & (z.imag > im[0]) & (z.imag < im[1])]
    roots = []
    for w in sorted(z, key=lambda w: (w.real, w.imag)):
        if not any(abs(w - r) < 1e-7 * (1 + abs(w)) for r in roots):
            roots.append(w)
    return np.array(roots)


def match_sets(a, b):
    """Greedy nearest pairing; returns the largest relative distance."""
    a, b = list(a), list(b)
    worst = 0.0
    for w in a:
        j = int(np.argmin([abs(w - v) for v in b]))
        worst = max(worst, abs(w - b[j]) / abs(w))
        b.pop(j)
    return worst
