import numpy as np
import pytest
from scipy import linalg

from hankel_ssf.errors import LengthError
from hankel_ssf.hankel import (SpectralData, SymMatrix, measure_from_spectrum, norm_bounds_check,
                               spectral_measure, symmetric_eigen, truncate)
from hankel_ssf.oracle import hilbert_sequence
from hankel_ssf.sequences import RealSequence


def test_truncate_entries(geometric):
    G = truncate(geometric, 4).entries
    i, j = np.indices((4, 4))
    assert np.array_equal(G, 0.75 * 0.5 ** (i + j))
    assert truncate(geometric, 0).n == 0


def test_truncate_needs_enough_entries():
    with pytest.raises(LengthError):
        truncate(RealSequence([1.0, 2.0], tail=None), 3)


def test_symmatrix_uses_lower_triangle():
    m = SymMatrix([[1.0, 99.0], [2.0, 3.0]])
    assert m.entries.tolist() == [[1.0, 2.0], [2.0, 3.0]]
    assert m.to_csv() == "1.0,2.0\n2.0,3.0\n"


def test_symmetric_eigen_weights_sum_to_one():
    sd = symmetric_eigen(truncate(hilbert_sequence(0, 40), 20))
    assert sd.weights.sum() == pytest.approx(1.0, abs=1e-13)
    assert SpectralData.from_json(sd.to_json()).eigenvalues.tolist() == sd.eigenvalues.tolist()


def test_spectral_measure_rank_one(geometric):
    # Gamma has one nonzero eigenvalue 1 with eigenvector (2^-n) sqrt(3/4)
    rho = spectral_measure(geometric, 64)
    assert len(rho) == 2
    (x0, w0), (x1, w1) = rho.atoms
    assert x0 == 0.0 and w0 == pytest.approx(0.25, abs=1e-14)
    assert x1 == pytest.approx(1.0, abs=1e-14) and w1 == pytest.approx(0.75, abs=1e-14)


def test_spectral_measure_moment_matches_gram(geometric):
    # int lam d rho = ||G e_0||^2 for the truncation
    a = hilbert_sequence(0, 200)
    rho = spectral_measure(a, 100)
    assert rho.mass == pytest.approx(1.0, abs=1e-13)
    assert rho.integrate(lambda x: x) == pytest.approx(np.sum(a.values[:100] ** 2), rel=1e-12)


def test_measure_from_spectrum_clusters_and_tops_up():
    m = measure_from_spectrum(np.array([1.0, 1.0 + 1e-12, 2.0, 1e-20]),
                              np.array([0.1, 0.1, 0.3, 0.2]), floor=1e-15)
    assert m.atoms[0] == (0.0, pytest.approx(0.5))
    assert m.atoms[1][1] == pytest.approx(0.2)


def test_norm_bounds_hilbert():
    rep = norm_bounds_check(hilbert_sequence(0, 600), 300)
    assert rep.passed
    assert rep.weak_norm == pytest.approx(1.0)
    assert 2.0 < rep.operator_norm < np.pi


def test_norm_bounds_operator_norm_is_spectral_norm(rng):
    vals = rng.uniform(0, 1, 19) / np.arange(1, 20)
    rep = norm_bounds_check(RealSequence(vals), 10)
    i, j = np.indices((10, 10))
    assert rep.operator_norm == pytest.approx(linalg.norm(vals[i + j], 2), rel=1e-12)
