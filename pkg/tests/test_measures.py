import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hankel_ssf.direct import StepFunction, ssf
from hankel_ssf.errors import ConditioningError, DomainError, ModelError
from hankel_ssf.hankel import spectral_measure
from hankel_ssf.measures import (cauchy_transform, recurrence_residual, partial_fraction_weights,
                                 reconstruct_from_rho, recurrence_step, ssf_to_rho, sqrt_moment)
from hankel_ssf.sequences import DiscreteMeasure, from_moment_measure

atoms = st.lists(st.tuples(st.floats(0.0, 0.85), st.floats(0.05, 1.0)), min_size=1, max_size=5)


def test_ssf_to_rho_rank_one():
    rho = ssf_to_rho(StepFunction.indicator(0.25, 1.0))
    assert rho.atoms == [(0.0, pytest.approx(0.25)), (1.0, pytest.approx(0.75))]


def test_ssf_to_rho_needs_binary():
    with pytest.raises(DomainError):
        ssf_to_rho(StepFunction([0.0, 1.0], [0.5]))


def test_zero_ssf_gives_point_mass_at_zero():
    assert ssf_to_rho(StepFunction.zero()).atoms == [(0.0, 1.0)]


def test_partial_fractions_match_residues():
    lo, hi = np.array([0.25, 2.25]), np.array([1.0, 4.0])
    nu = partial_fraction_weights(lo, hi)
    # residues of 1 - prod (lo - z)/(hi - z) at z = hi
    z = hi[0] + 1e-7
    f = 1 - np.prod((lo - z) / (hi - z))
    assert nu[0] == pytest.approx(-(z - hi[0]) * f, rel=1e-5)
    assert nu.tolist() == pytest.approx([0.3125, 2.1875])


def test_cauchy_transform_values_and_guard():
    rho = DiscreteMeasure.from_atoms([(0.0, 0.25), (1.0, 0.75)])
    c = cauchy_transform(rho, -1.0)
    assert c.F == pytest.approx(0.25 / 1 + 0.75 / 2)
    assert c.H == pytest.approx(0.75 / 2)
    with pytest.raises(ConditioningError):
        cauchy_transform(rho, 1.0 + 1e-12j)


def test_recurrence_on_geometric_halves_the_operator():
    # S*alpha = alpha/2, so the nonzero atom moves from 1 to 1/4 with the same weight
    rho = ssf_to_rho(StepFunction.indicator(0.25, 1.0))
    nxt = recurrence_step(rho, seed=1)
    assert nxt.allclose(DiscreteMeasure.from_atoms([(0.0, 0.25), (0.25, 0.75)]), atol=1e-14)


def test_reconstruct_geometric():
    rho = ssf_to_rho(StepFunction.indicator(0.25, 1.0))
    log = []
    a = reconstruct_from_rho(rho, 7, seed=3, log=log)
    assert np.allclose(a.values, 0.75 * 0.5 ** np.arange(8), rtol=0, atol=1e-10)
    assert len(log) == 7 and all(r.recurrence_residual < 1e-12 for r in log)


def test_downdate_rejects_invalid_measure():
    # total mass 2 makes diag(x) - m m^T indefinite
    with pytest.raises(ModelError):
        recurrence_step(DiscreteMeasure.point(1.0, 2.0), seed=0)


def test_sqrt_moment_is_alpha0(geometric):
    assert sqrt_moment(spectral_measure(geometric, 32)) == pytest.approx(0.75, abs=1e-14)


@given(atoms)
@settings(max_examples=30, deadline=None)
def test_recurrence_matches_shifted_truncation(pairs):
    # rho of S*alpha computed from rho of alpha agrees with the direct computation
    a = from_moment_measure(DiscreteMeasure.from_atoms(pairs), 0)
    N = 120
    rho = spectral_measure(a, N)
    nxt = recurrence_step(rho, seed=0)
    assert nxt.mass == pytest.approx(rho.mass, abs=1e-12)
    # int lam d rho_next = ||G' e_0||^2 for the shifted truncation
    expected = np.sum(a.extended(N + 1)[1:N + 1] ** 2)
    assert nxt.integrate(lambda x: x) == pytest.approx(expected, rel=1e-8, abs=1e-14)
    # atoms sit at squared eigenvalues known to about eps * alpha_0**2, so entries
    # below sqrt(eps) * alpha_0 cannot be resolved
    assert sqrt_moment(nxt) == pytest.approx(a[1], rel=1e-8, abs=1e-7 * a[0])


@given(atoms, st.floats(-2, 2), st.floats(0.05, 2))
@settings(max_examples=30, deadline=None)
def test_cauchy_transform_is_herglotz(pairs, x, y):
    rho = spectral_measure(from_moment_measure(DiscreteMeasure.from_atoms(pairs), 0), 30)
    assert cauchy_transform(rho, complex(x, y)).F.imag > 0


@given(atoms)
@settings(max_examples=30, deadline=None)
def test_ssf_to_rho_inverts_direct_map(pairs):
    a = from_moment_measure(DiscreteMeasure.from_atoms(pairs), 0)
    xi = ssf(a, 60)
    rho = ssf_to_rho(xi)
    assert rho.mass == pytest.approx(1.0, abs=1e-12)
    assert sqrt_moment(rho) == pytest.approx(a[0], rel=1e-7)
    nxt = recurrence_step(rho, seed=5)
    z = 0.3 + 1.1j
    assert recurrence_residual(rho, nxt, z) <= 1e-8
