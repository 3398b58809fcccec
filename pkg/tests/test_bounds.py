import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import lambertw

from barrier_spectra.bounds import (
    BoundReport,
    JensenParams,
    alpha_beta_default,
    baseline_bounds,
    check_enclosure,
    count_bound_compact,
    count_bound_naimark,
    empirical_x,
    fr0_proximity,
    hpm_check,
    jensen_zero_bound,
    lambda_factor,
    magnitude_radius,
    separation_margin,
)
from barrier_spectra.eigen import ZRegion
from barrier_spectra.errors import ConditionViolated, DomainError, PreconditionError, ValidationError
from barrier_spectra.experiments import full_spectrum
from barrier_spectra.potentials import make_potential, parse_potential
from barrier_spectra.schrodinger import Problem

ZERO = make_potential("zero")


def test_magnitude_radius_examples():
    assert magnitude_radius(1.0, 100.0) == pytest.approx(108.5736204758, rel=1e-10)
    assert magnitude_radius(1.0, math.e) == pytest.approx(5 * math.e, rel=1e-14)
    assert magnitude_radius(1.0, 100.0, "lambert") == pytest.approx(400 / lambertw(400).real, rel=1e-12)
    with pytest.raises(DomainError):
        magnitude_radius(1.0, 1.0)
    with pytest.raises(ValidationError):
        magnitude_radius(1.0, 10.0, "other")


def test_lambert_form_below_simplified_for_large_R():
    Rs = np.geomspace(20, 1e6, 40)
    assert all(magnitude_radius(1.0, R, "lambert") <= magnitude_radius(1.0, R) for R in Rs)


def test_count_bound_examples():
    assert count_bound_compact(1.0, math.e) == pytest.approx(117.26, abs=5e-3)
    assert count_bound_compact(1.0, 100.0) == pytest.approx(34460.5, abs=0.1)
    assert count_bound_compact(2.0, 100.0) == 2 * count_bound_compact(1.0, 100.0)
    assert count_bound_naimark(1.0, 100.0, 1.0, 4.0) == pytest.approx(88788 * 3e6 / math.log(100) ** 2, rel=1e-14)
    assert count_bound_naimark(1.0, 100.0, 1.0, 4.0) == pytest.approx(1.25598e10, rel=1e-5)


@given(st.floats(0.1, 100), st.floats(1.01, 1e4))
def test_naimark_decreases_in_a_beyond_sqrt_x(X, R):
    a = np.linspace(1.01 * math.sqrt(X), 10 * math.sqrt(X) + 1, 20)
    vals = [count_bound_naimark(1.0, R, ai, X) for ai in a]
    assert all(x > y for x, y in zip(vals, vals[1:]))


def test_alpha_beta_examples():
    a, b = alpha_beta_default(1.0, 4.0)
    assert a == b == pytest.approx(1 / 36)
    assert separation_margin(a, b) == pytest.approx(8.50694, abs=1e-5)
    a, _ = alpha_beta_default(1.0, 2.0)
    assert a == pytest.approx(0.05)
    with pytest.raises(PreconditionError):
        alpha_beta_default(2.0, 1.0)


@given(st.floats(1e-3, 10), st.floats(1.001, 100))
def test_alpha_beta_always_separated(eta, ratio):
    a, b = alpha_beta_default(eta, eta * ratio)
    assert b < 0.125
    assert separation_margin(a, b) > ratio


def test_jensen_params_validation():
    with pytest.raises(ValidationError):
        JensenParams(100.0, 1.5, 0.1, 1.0, 4.0)
    with pytest.raises(ConditionViolated):
        JensenParams(100.0, 0.4, 0.4, 1.0, 4.0)


def test_lambda_factor_example():
    p = JensenParams(100.0, 1 / 36, 1 / 36, 1.0, 4.0)
    assert lambda_factor(p) == pytest.approx(1.163115, abs=1e-6)
    assert 1 + 4 * p.Y / ((1 - p.alpha) ** 2 * p.r) == pytest.approx(1.16927, abs=1e-5)


def test_jensen_constant_function():
    p = JensenParams(100.0, 1 / 36, 1 / 36, 1.0, 4.0)
    expected = 2 / math.log(lambda_factor(p)) * math.log(36)
    assert jensen_zero_bound(3.0, 3.0, p) == pytest.approx(expected)
    assert jensen_zero_bound(math.log(3.0), math.log(3.0), p, log=True) == pytest.approx(expected)
    with pytest.raises(PreconditionError):
        jensen_zero_bound(1.0, 0.0, p)


def test_hpm_examples():
    r = hpm_check(1 + 1j, 2.0)
    assert r.a and r.b and r.c
    s, m = cmath.sqrt(1 + 1j), cmath.sqrt(1 - 1j)
    m = m if m.imag >= 0 else -m
    assert abs(s + m) == pytest.approx(0.9102, abs=1e-4)
    assert hpm_check(-4.0, 1.0).all
    assert hpm_check(1 + 0.5j, 1.0).all
    mu = cmath.sqrt(1 - 0.5j)
    assert abs(mu.imag) == pytest.approx(0.2430, abs=1e-4)


@settings(max_examples=200)
@given(st.floats(-50, 50), st.floats(-50, 50), st.floats(0.05, 10))
def test_hpm_holds_everywhere(x, y, gamma):
    assert bool(hpm_check(complex(x, y), gamma).all)


def test_hpm_vectorised():
    rng = np.random.default_rng(3)
    lam = rng.uniform(-50, 50, 10_000) + 1j * rng.uniform(-50, 50, 10_000)
    assert hpm_check(lam, 1.0).all.all()


def test_bound_report():
    r = BoundReport(10.0, "x", 2.0, 1.5)
    assert r.satisfied
    assert not BoundReport(10.0, "x", 2.0, 2.5).satisfied
    assert r.as_dict()["satisfied"] is True


def test_enclosure_examples():
    assert check_enclosure([1 + 0.5j], 0.5, R=1.0, gamma=1.0)[0].satisfied
    assert not check_enclosure([-2.0], 1.0, R=1.0, gamma=1.0)[0].satisfied
    eigs = full_spectrum(Problem(ZERO, 1.0, 50.0))
    assert eigs.count > 0
    assert all(r.satisfied for r in check_enclosure(eigs, 2.0))


def test_empirical_x_floor():
    assert empirical_x(np.array([1 + 0.5j]), 1.0) == 2.0
    assert empirical_x(np.array([-3.0 + 0j]), 1.0) == pytest.approx(3.3)


def test_baselines():
    b = baseline_bounds(ZERO, 0.0, 10.0)
    assert b.magnitude == 0.0 and b.count == 0.0
    b = baseline_bounds(ZERO, 1.0, 100.0)
    assert b.magnitude == pytest.approx(1e4)
    assert b.count == pytest.approx(1e4 * (100 * (math.e - 1)) ** 2)
    box = baseline_bounds(make_potential("box", A=2, Q=1), 1.0, 10.0)
    assert box.magnitude == pytest.approx(144.0)
    w = 2 * 10 * math.expm1(0.1) + 10 * (math.e - 1)
    assert box.count == pytest.approx(100 * w * w, rel=1e-9)


def test_proximity_constant():
    grid = ZRegion(1.7, 6.2, 0.05, 1.0)
    assert fr0_proximity(Problem(ZERO, 1.0, 20.0), grid) < 1e-9
    c = [fr0_proximity(Problem(parse_potential("expdecay:A=1,k=5"), 1.0, R), grid) for R in (10.0, 20.0)]
    assert c[0] == pytest.approx(c[1], rel=0.1)
    with pytest.raises(PreconditionError):
        fr0_proximity(Problem(ZERO, 1.0, 5.0), ZRegion(0.1, 1.0, 0.05, 1.0))
