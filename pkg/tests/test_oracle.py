import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from barrier_spectra.errors import PreconditionError, ValidationError
from barrier_spectra.oracle import (
    FDSystem,
    LambdaRect,
    aligned_grid,
    default_length,
    fd_build,
    fd_count,
    fd_logdet_phase,
    fd_refine,
    fd_sturm_count,
    richardson_eigenvalues,
)
from barrier_spectra.potentials import make_potential
from barrier_spectra.schrodinger import Problem

ZERO = make_potential("zero")


def laplacian_eigs(n, h):
    k = np.arange(1, n + 1)
    return 2 * (1 - np.cos(k * np.pi / (n + 1))) / h**2


def test_build_layout():
    sys = fd_build(Problem(ZERO, 1.0, 5.0), 10.0, 99)
    assert sys.h == pytest.approx(0.1)
    inside = sys.x < 5.0 - 1e-9
    assert np.all(sys.diag[inside].imag == 1.0)
    assert np.all(sys.diag[sys.x > 5.0 + 1e-9].imag == 0.0)
    with pytest.raises(PreconditionError):
        fd_build(Problem(ZERO, 1.0, 5.0), 4.0, 99)


def test_sturm_matches_laplacian():
    sys = fd_build(Problem(ZERO, 0.0, 1.0), 10.0, 200)
    ev = laplacian_eigs(200, sys.h)
    mids = 0.5 * (ev[:-1] + ev[1:])
    assert np.array_equal(fd_sturm_count(sys, mids), np.arange(1, 200))
    with pytest.raises(PreconditionError):
        fd_sturm_count(fd_build(Problem(ZERO, 1.0, 1.0), 10.0, 50), 1.0)


def test_logdet_drops_at_laplacian_eigenvalue():
    sys = fd_build(Problem(ZERO, 0.0, 1.0), 10.0, 200)
    lam = laplacian_eigs(200, sys.h)[3]
    logmag, _ = fd_logdet_phase(sys, lam + 1e-12)
    far, _ = fd_logdet_phase(sys, lam + 0.5)
    assert logmag < far - 20


def test_logdet_matches_dense_determinant():
    rng = np.random.default_rng(7)
    n, h = 8, 0.37
    # small random system assembled by hand; fd_build insists on n >= 16
    diag = 2 / h**2 + rng.normal(size=n) + 1j * 0.8 * (rng.uniform(size=n) < 0.5)
    sys = FDSystem(Problem(ZERO, 0.8, 1.0), (n + 1) * h, n, h, h * np.arange(1, n + 1), diag)
    A = np.diag(sys.diag) - np.diag(np.full(n - 1, 1 / sys.h**2), 1) - np.diag(np.full(n - 1, 1 / sys.h**2), -1)
    for lam in rng.uniform(-5, 50, 4) + 1j * rng.uniform(-1, 1, 4):
        det = np.linalg.det(A - lam * np.eye(n))
        logmag, phase = fd_logdet_phase(sys, lam)
        assert logmag == pytest.approx(math.log(abs(det)), rel=1e-10)
        assert abs(np.angle(np.exp(1j * (phase - np.angle(det))))) < 1e-10


def test_count_self_adjoint_is_zero():
    sys = fd_build(Problem(ZERO, 0.0, 1.0), 20.0, 400)
    assert fd_count(sys, LambdaRect(0.1, 5.0, 0.05, 0.9), delta=0.01) == 0


def test_count_rejects_low_rectangles():
    sys = fd_build(Problem(ZERO, 1.0, 5.0), 20.0, 400)
    with pytest.raises(PreconditionError):
        fd_count(sys, LambdaRect(0.1, 5.0, 0.001, 0.9))
    with pytest.raises(ValidationError):
        LambdaRect(1.0, 0.0, 0.1, 0.2)


def test_count_insensitive_to_truncation_length():
    P = Problem(ZERO, 1.0, 10.0)
    rect = LambdaRect(0.1, 10.0, 0.2, 0.95)
    counts = {fd_count(fd_build(P, L, int(L / 0.05)), rect) for L in (240.0, 336.0, 420.0)}
    assert len(counts) == 1


def test_default_length():
    assert default_length(20.0, 1.0) == 40.0
    assert default_length(20.0, 0.1) == pytest.approx(120.0)
    with pytest.raises(PreconditionError):
        default_length(20.0, 0.0)


@settings(max_examples=25, deadline=None)
@given(st.floats(1.0, 40.0), st.integers(100, 5000))
def test_aligned_grid_puts_barrier_on_node(R, n):
    P = Problem(make_potential("box", A=1, Q=1), 1.0, R)
    L, m = aligned_grid(P, R + 30.0, n)
    assert m >= n
    h = L / (m + 1)
    assert L >= R + 30.0 - 1e-9
    assert abs(R / h - round(R / h)) < 1e-6


def test_aligned_grid_hits_commensurate_jumps():
    P = Problem(make_potential("box", A=1, Q=1), 1.0, 20.0)
    L, m = aligned_grid(P, 336.0, 6000)
    h = L / (m + 1)
    assert abs(1 / h - round(1 / h)) < 1e-9 and abs(20 / h - round(20 / h)) < 1e-9


def test_refine_recovers_laplacian_eigenvalue():
    sys = fd_build(Problem(ZERO, 0.0, 1.0), 10.0, 200)
    ev = laplacian_eigs(200, sys.h)[:5]
    lam, ok = fd_refine(sys, ev + 1e-3)
    assert ok.all()
    assert np.allclose(lam, ev, rtol=1e-10)


def test_richardson_is_second_order():
    P = Problem(make_potential("box", A=1, Q=1), 1.0, 10.0)
    seed = np.array([1.59 + 0.85j])
    L, n = aligned_grid(P, 200.0, 1000)
    sys = fd_build(P, L, 4 * n + 3)
    lam, _ = fd_refine(sys, seed)
    rr = richardson_eigenvalues(P, L, n, lam)
    assert rr.convergence_ratio[0] == pytest.approx(4.0, rel=0.05)
