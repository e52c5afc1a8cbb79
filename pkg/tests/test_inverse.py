import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from hankel_ssf.direct import StepFunction, ssf, ssf_moment_measure
from hankel_ssf.errors import DomainError, InterlacingError
from hankel_ssf.inverse import (IntervalSystem, contraction_decay_check, contraction_model,
                                finite_rank_inverse, inverse, pwm_step, roundtrip,
                                spectral_fidelity)
from hankel_ssf.sequences import DiscreteMeasure, from_moment_measure


@st.composite
def interval_systems(draw, max_pairs=5):
    n = draw(st.integers(1, max_pairs))
    pts = sorted(draw(st.lists(st.floats(0.05, 3.0), min_size=2 * n, max_size=2 * n, unique=True)))
    assume(np.min(np.diff(pts)) > 0.02)
    return IntervalSystem.from_pairs(zip(pts[0::2], pts[1::2]))


def test_interval_system_validation():
    with pytest.raises(InterlacingError):
        IntervalSystem.from_pairs([(0.5, 1.0), (0.8, 2.0)])
    with pytest.raises(InterlacingError):
        IntervalSystem.from_pairs([(0.0, 1.0)])
    s = IntervalSystem.from_pairs([(1.5, 2.0), (0.5, 1.0)])
    assert s.pairs == [(1.5, 2.0), (0.5, 1.0)]
    assert IntervalSystem.from_json(s.to_json()).pairs == s.pairs


def test_from_step_function_floors_zero_endpoint():
    s = IntervalSystem.from_step_function(StepFunction.from_intervals([(0.0, 1.0), (4.0, 9.0)]))
    assert s.lam.tolist() == [3.0, 1.0]
    assert 0 < s.mu[-1] <= 1e-8 * 3.0


def test_rank_one_closed_form():
    # one pair (mu, lam): alpha_n = (lam^2 - mu^2)/lam * (mu/lam)^n
    a = finite_rank_inverse(IntervalSystem.from_pairs([(0.5, 1.0)]), 16)
    assert np.max(np.abs(a.values - 0.75 * 0.5 ** np.arange(17))) <= 1e-15
    assert a.tail.atoms[0] == (pytest.approx(0.5), pytest.approx(0.75))


def test_two_interval_frozen_values(two_intervals):
    a = finite_rank_inverse(two_intervals, 4)
    # alpha_0 = sum_j nu_j / lam_j with nu = (0.3125, 2.1875) at lam = (1, 2)
    assert a.values[0] == pytest.approx(45 / 32, abs=1e-15)
    assert a.values.tolist() == pytest.approx(
        [1.40625, 0.58349609375, 0.2658462524414, 0.1425737142563, 0.0941188], abs=1e-7)
    # the sum of squares equals int xi = (1 - 0.25) + (4 - 2.25)
    assert a.sum_of_squares() == pytest.approx(2.5, abs=1e-13)


def test_two_interval_exact_spectrum(two_intervals):
    a = finite_rank_inverse(two_intervals, 0)
    xi = ssf_moment_measure(a.tail)
    assert xi.intervals() == [(pytest.approx(0.25, abs=1e-12), pytest.approx(1.0, abs=1e-12)),
                              (pytest.approx(2.25, abs=1e-12), pytest.approx(4.0, abs=1e-12))]


def test_secular_and_eigh_agree(two_intervals):
    m1 = contraction_model(two_intervals, "secular")
    m2 = contraction_model(two_intervals, "eigh")
    assert np.allclose(m1.sigma, m2.sigma, atol=1e-13)
    assert m1.omega.allclose(m2.omega, atol=1e-12)


def test_pwm_step_pulses():
    f = pwm_step(StepFunction([0.0, 1.0, 2.0], [0.25, 1.0]), 4)
    assert f.intervals() == [(0.0, 0.0625), (0.25, 0.3125), (0.5, 0.5625), (0.75, 0.8125), (1.0, 2.0)]
    with pytest.raises(DomainError):
        pwm_step(f, 0)


def test_inverse_of_indicator_is_geometric():
    res = inverse(StepFunction.indicator(0.25, 1.0), 64, 16)
    assert np.max(np.abs(res.alpha.values - 0.75 * 0.5 ** np.arange(17))) <= 1e-10
    assert res.slice_counts == [8, 16, 32, 64]
    assert np.all(res.deltas == 0) or np.max(res.deltas) < 1e-15
    rows = list(res.to_rows())
    assert len(rows) == 4 * 17 and rows[0][:2] == (8, 0)


def test_inverse_of_fractional_ssf_settles():
    # Cauchy-type check: changes between successive slice counts shrink
    xi = StepFunction([0.0, 1.0, 2.0], [0.4, 0.7])
    res = inverse(xi, 64, 4)
    d = res.deltas.max(axis=1)
    assert np.all(np.diff(d) < 0)
    # the integral of every modulated function equals int xi
    for s in res.slice_counts:
        assert pwm_step(xi, s).integral() == pytest.approx(xi.integral(), rel=1e-13)


def test_roundtrip_report(geometric):
    rep = roundtrip(geometric, 64, 8, 8)
    assert rep.max_delta < 1e-12
    assert rep.l2_residual < 1e-12
    assert rep.alpha0_residual < 1e-6


def test_decay_profile(two_intervals):
    # the slowest mode decays like 0.9746^n
    prof = contraction_decay_check(two_intervals, [1.0, -0.3], 2000)
    assert prof.monotone
    assert prof.norms[-1] < 1e-6
    assert abs(prof.isometry_defect[-1]) < 1e-10


def test_spectral_fidelity_large_truncation(two_intervals):
    a = finite_rank_inverse(two_intervals, 0)
    fid = spectral_fidelity(a, two_intervals, 512)
    assert fid.lam_error < 1e-10 and fid.mu_error < 1e-10


# -- properties ----------------------------------------------------------------

@given(interval_systems())
@settings(max_examples=40, deadline=None)
def test_contraction_is_a_contraction(sys):
    m = contraction_model(sys)
    assert m.sigma_norm <= 1 + 1e-12
    k = len(sys)
    defect = m.sigma.T @ m.sigma - (np.eye(k) - np.outer(m.u, m.u))
    assert np.abs(defect).max() < 1e-10


@given(interval_systems())
@settings(max_examples=40, deadline=None)
def test_inverse_then_direct_is_identity(sys):
    a = finite_rank_inverse(sys, 0)
    xi = ssf_moment_measure(a.tail)
    got = xi.intervals()
    want = sorted(zip(sys.mu ** 2, sys.lam ** 2))
    assert len(got) == len(want)
    # clustered pairs put atoms of omega near t = 1, where 1 - t carries only
    # eps/(1 - t) relative accuracy and the Gram matrix inherits it
    gap = 1.0 - a.tail.positions[-1]
    rtol = 1e-9 + 1e4 * np.finfo(float).eps / gap
    assert np.allclose(np.array(got), np.array(want), rtol=rtol, atol=1e-10)


@given(interval_systems())
@settings(max_examples=40, deadline=None)
def test_tail_reproduces_values(sys):
    a = finite_rank_inverse(sys, 12)
    assert np.allclose(a.tail.moments(12), a.values, rtol=1e-10, atol=1e-13)


@given(st.lists(st.floats(0.0, 1.0), min_size=1, max_size=5), st.integers(1, 32))
@settings(max_examples=60, deadline=None)
def test_pwm_preserves_piece_integrals(vals, slices):
    x = np.arange(len(vals) + 1, dtype=float)
    xi = StepFunction(x, vals)
    mod = pwm_step(xi, slices)
    assert mod.is_binary()
    for a, b, v in zip(x[:-1], x[1:], vals):
        assert mod.integral_over(a, b) == pytest.approx(v, abs=1e-12)


@given(st.lists(st.tuples(st.floats(0.0, 0.9), st.floats(0.05, 1.0)), min_size=1, max_size=4))
@settings(max_examples=20, deadline=None)
def test_direct_then_inverse_is_identity(pairs):
    a = from_moment_measure(DiscreteMeasure.from_atoms(pairs), 0)
    back = finite_rank_inverse(IntervalSystem.from_step_function(ssf(a, 256)), 8)
    assert np.max(np.abs(back.values - a.extended(8))) <= 1e-5
