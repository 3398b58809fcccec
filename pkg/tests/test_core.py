import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from barrier_spectra.core import (
    Enclosure,
    GammaStrip,
    blaschke_modulus,
    blaschke_modulus_closed,
    in_gamma_strip,
    lambert_w,
    sqrt_upper,
    wrap_phase,
)
from barrier_spectra.errors import DomainError, SingularInputError, ValidationError

finite = st.floats(-1e3, 1e3, allow_nan=False)
cplx = st.builds(complex, finite, finite)


def test_sqrt_upper_examples():
    assert sqrt_upper(4) == 2
    assert sqrt_upper(-4) == pytest.approx(2j)
    w = sqrt_upper(1 - 1j)
    assert w == pytest.approx(-1.09868411346781 + 0.45508986056222733j, abs=1e-12)
    assert w * w == pytest.approx(1 - 1j, abs=1e-14)


@given(cplx)
def test_sqrt_upper_branch(w):
    r = sqrt_upper(w)
    assert r.imag >= 0
    assert abs(r * r - w) <= 1e-12 * (1 + abs(w))


def test_sqrt_upper_broadcasts():
    out = sqrt_upper(np.array([4, -4, 1 - 1j]))
    assert out.shape == (3,)
    assert np.all(out.imag >= 0)


def test_lambert_w_examples():
    assert lambert_w(math.e) == pytest.approx(1.0, abs=1e-13)
    assert lambert_w(1.0) == pytest.approx(0.5671432904097838, abs=1e-12)
    x = 2 * math.e
    w = lambert_w(x)
    assert abs(w * math.exp(w) - x) <= 1e-13 * x


@given(st.floats(1e-8, 1e12))
def test_lambert_w_residual(x):
    w = lambert_w(x)
    assert abs(w * math.exp(w) - x) <= 1e-12 * x


@pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan])
def test_lambert_w_domain(bad):
    with pytest.raises(DomainError):
        lambert_w(bad)


def test_blaschke_examples():
    assert blaschke_modulus(0.7, 1 + 2j) == pytest.approx(1.0)
    assert blaschke_modulus(2j, 1j) == pytest.approx(3.0)
    assert blaschke_modulus(1 + 2j, 0.5 + 1j) == pytest.approx(blaschke_modulus_closed(1 + 2j, 0.5 + 1j), rel=1e-14)
    with pytest.raises(SingularInputError):
        blaschke_modulus(1j, 1j)


@given(cplx, cplx)
def test_blaschke_two_formulas_agree(z, zj):
    if abs(z - zj) < 1e-3:
        return
    # both sides of the real axis: the closed form holds for any pair
    assert blaschke_modulus(z, zj) == pytest.approx(blaschke_modulus_closed(z, zj), rel=1e-9)


def test_in_gamma_strip_examples():
    assert in_gamma_strip(1 + 0.5j, 1.0)
    assert not in_gamma_strip(-1 + 0.5j, 1.0)
    assert not in_gamma_strip(1 + 1j, 1.0)
    assert in_gamma_strip(1 + 0.5j, GammaStrip(1.0))


def test_region_types_validate():
    with pytest.raises(ValidationError):
        GammaStrip(0.0)
    with pytest.raises(ValidationError):
        Enclosure(1.0, -2.0)
    enc = Enclosure(1.0, 2.0)
    assert enc.contains(1.5) and enc.contains(5 + 0.5j) and not enc.contains(-3.0)


@given(st.floats(-50, 50))
def test_wrap_phase_range(d):
    w = wrap_phase(d)
    assert -math.pi < w <= math.pi
    assert math.isclose(math.cos(w), math.cos(d), abs_tol=1e-9)


def test_sqrt_upper_just_below_cut():
    # Im of the principal root underflows; the lower-side limit is -1
    assert sqrt_upper(complex(1.0, -5e-324)) == -1
    assert sqrt_upper(complex(4.0, -0.0)) == 2
