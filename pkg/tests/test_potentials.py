import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from barrier_spectra.errors import DivergenceError, DomainError, ValidationError
from barrier_spectra.potentials import (
    eval_q,
    exp_weighted_norm,
    l1_norm,
    make_potential,
    parse_potential,
    weighted_moment,
)


def test_families():
    z = make_potential("zero")
    assert z.is_compact and z.decay_rate is None
    box = make_potential("box", A=2, Q=1)
    assert box.support_bound == 1.0
    e = make_potential("expdecay", A=1, k=5)
    assert e.decay_rate == 5 and not e.is_compact
    # any a < k/4 satisfies the decay assumption
    assert e.decay_rate / 4 == 1.25


def test_parse_matches_make():
    a, b = parse_potential("box:A=2,Q=1"), make_potential("box", A=2, Q=1)
    assert (a.family, a.params, a.support_bound) == (b.family, b.params, b.support_bound)
    assert parse_potential(" zero ").family == "zero"


@pytest.mark.parametrize("text,param", [
    ("box:A=1", "Q"), ("box:A=1,Q=-1", "Q"), ("box:A=1,Q=1,Z=3", "Z"), ("expdecay:A=1,k=0", "k"),
])
def test_bad_parameters_name_culprit(text, param):
    with pytest.raises(ValidationError) as info:
        parse_potential(text)
    assert info.value.param == param


def test_unknown_family():
    with pytest.raises(ValidationError):
        make_potential("well")


def test_eval_examples():
    assert eval_q(make_potential("zero"), 3.0) == 0.0
    box = make_potential("box", A=2, Q=1)
    assert eval_q(box, 0.5) == 2.0 and eval_q(box, 1.5) == 0.0
    bump = make_potential("bump", A=3, Q=2)
    assert eval_q(bump, 1.0) == pytest.approx(3.0)
    assert eval_q(bump, 2.0) == 0.0
    with pytest.raises(DomainError):
        eval_q(box, -0.1)


def test_samples_interpolate(tmp_path):
    path = tmp_path / "q.txt"
    np.savetxt(path, [[0.0, 1.0], [1.0, 3.0], [2.0, 0.0]])
    q = make_potential("samples", path=str(path))
    assert q.support_bound == 2.0
    assert eval_q(q, 0.5) == pytest.approx(2.0)
    assert eval_q(q, 5.0) == 0.0
    with pytest.raises(ValidationError):
        make_potential("samples", xs=[0.0, 0.0], qs=[1.0, 2.0])


def test_norm_examples():
    assert l1_norm(make_potential("zero")) == 0.0
    assert l1_norm(make_potential("box", A=2, Q=1)) == pytest.approx(2.0, rel=1e-10)
    e = make_potential("expdecay", A=1, k=5)
    assert l1_norm(e) == pytest.approx(0.2, rel=1e-9)
    assert exp_weighted_norm(make_potential("zero"), 1.0) == 0.0
    assert exp_weighted_norm(e, 1.0) == pytest.approx(0.25, rel=1e-9)
    assert exp_weighted_norm(make_potential("box", A=2, Q=1), 1.0) == pytest.approx(2 * (math.e - 1), rel=1e-10)


def test_exp_norm_diverges_past_decay_rate():
    with pytest.raises(DivergenceError):
        exp_weighted_norm(make_potential("expdecay", A=1, k=5), 5.0)
    with pytest.raises(DomainError):
        exp_weighted_norm(make_potential("box", A=1, Q=1), 0.0)


@pytest.mark.parametrize("text", ["box:A=2,Q=1", "bump:A=3,Q=2", "expdecay:A=1,k=5", "box:A=-1,Q=2"])
def test_exp_norm_small_eps_limit(text):
    q = parse_potential(text)
    assert exp_weighted_norm(q, 1e-8) == pytest.approx(l1_norm(q), rel=1e-6)


@settings(max_examples=30, deadline=None)
@given(st.floats(-5, 5), st.floats(0.1, 3), st.floats(0.01, 2))
def test_box_exp_norm_closed_form(A, Q, eps):
    q = make_potential("box", A=A, Q=Q)
    assert exp_weighted_norm(q, eps) == pytest.approx(abs(A) * math.expm1(eps * Q) / eps, rel=1e-9, abs=1e-14)


def test_weighted_moment_box():
    # int_0^1 (1 + t) dt = 1.5
    assert weighted_moment(make_potential("box", A=1, Q=1), 2.0) == pytest.approx(1.5, rel=1e-12)
