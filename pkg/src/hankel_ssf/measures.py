"""Cauchy transforms of atomic measures and the shift recurrence on ``rho``.

``rho_alpha`` is the spectral measure of ``Gamma_alpha**2`` at ``e_0``. Given
``rho_alpha``, :func:`recurrence_step` produces ``rho_{S*alpha}`` and
:func:`reconstruct_from_rho` iterates it, reading off
``alpha_n = int sqrt(lam) d rho_{(S*)^n alpha}``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import linalg

from .direct import StepFunction
from .errors import ConditioningError, InterlacingError, ModelError, NumericError
from .hankel import measure_from_spectrum
from .sequences import DiscreteMeasure, RealSequence

DEFAULT_SEED = 20140523
RECURRENCE_TOL = 1e-8
MIN_WEIGHT = 1e-14


def default_seed() -> int:
    return int(os.environ.get("HANKEL_SSF_SEED", DEFAULT_SEED))


@dataclass(frozen=True)
class CauchyEvaluation:
    z: complex
    F: complex
    H: complex


def cauchy_transform(rho: DiscreteMeasure, z: complex, min_distance: float = 1e-9) -> CauchyEvaluation:
    """``F = int drho/(lam - z)`` and ``H = int sqrt(lam) drho/(lam - z)``."""
    z = complex(z)
    if not len(rho):
        return CauchyEvaluation(z, 0j, 0j)
    d = rho.positions - z
    if np.abs(d).min() < min_distance:
        raise ConditioningError("z is too close to an atom", z=[z.real, z.imag])
    F = complex(np.sum(rho.weights / d))
    H = complex(np.sum(rho.weights * np.sqrt(rho.positions) / d))
    return CauchyEvaluation(z, F, H)


def ssf_to_rho(xi: StepFunction) -> DiscreteMeasure:
    """Spectral measure at ``e_0`` determined by a {0,1}-valued SSF.

    With ``xi`` the indicator of ``[mu_j**2, lam_j**2]``, the measure
    ``nu = sum_j nu_j delta_{lam_j**2}`` from the partial fractions of
    ``1 - prod (mu_k**2 - z)/(lam_k**2 - z)`` gives ``rho = nu / lam`` plus
    the missing mass at 0.
    """
    ivs = xi.intervals()
    if not ivs:
        return DiscreteMeasure.point(0.0, 1.0)
    lo = np.array([a for a, _ in ivs])
    hi = np.array([b for _, b in ivs])
    if lo[0] < 0 or np.any(lo[1:] <= hi[:-1]):
        raise InterlacingError("intervals must be disjoint and non-negative")
    nu = partial_fraction_weights(lo, hi)
    if np.any(nu <= 0):
        raise NumericError("non-positive partial-fraction weight", min_weight=float(nu.min()))
    w = nu / hi
    zero = 1.0 - w.sum()
    if zero < -1e-12:
        raise NumericError("mass at zero came out negative", mass_at_zero=float(zero))
    atoms = list(zip(hi, w))
    if zero > 0:
        atoms.append((0.0, zero))
    return DiscreteMeasure.from_atoms(atoms, merge_rtol=0.0)


def partial_fraction_weights(lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """``nu_j = prod_k (hi_j - lo_k) / prod_{k != j} (hi_j - hi_k)``, evaluated in log form."""
    num = hi[:, None] - lo[None, :]
    den = hi[:, None] - hi[None, :]
    np.fill_diagonal(den, 1.0)
    sign = np.prod(np.sign(num), axis=1) * np.prod(np.sign(den), axis=1)
    with np.errstate(divide="ignore"):
        logmag = np.sum(np.log(np.abs(num)), axis=1) - np.sum(np.log(np.abs(den)), axis=1)
    return sign * np.exp(logmag)


def sqrt_moment(rho: DiscreteMeasure) -> float:
    return rho.integrate(np.sqrt)


def _validation_points(rho: DiscreteMeasure, rng: np.random.Generator, count: int) -> np.ndarray:
    scale = max(1.0, float(rho.positions[-1]) if len(rho) else 1.0)
    x = rng.uniform(-2.0, 2.0, count)
    y = rng.uniform(0.5, 2.0, count)
    return scale * (x + 1j * y)


def recurrence_residual(rho: DiscreteMeasure, rho_next: DiscreteMeasure, z: complex) -> float:
    """``|F'(z) - F(z) + F(z)**-1 H(z)**2 / z|`` for ``rho`` and its successor."""
    c = cauchy_transform(rho, z)
    nxt = cauchy_transform(rho_next, z)
    if c.F == 0:
        raise ConditioningError("Cauchy transform vanishes at validation point")
    return abs(nxt.F - c.F + c.H ** 2 / (c.F * z))


def _downdate(rho: DiscreteMeasure) -> DiscreteMeasure:
    nz = rho.positions > 0
    x, w = rho.positions[nz], rho.weights[nz]
    if not x.size:
        return DiscreteMeasure.point(0.0, rho.mass)
    u = np.sqrt(w)
    m = np.sqrt(x) * u
    theta, V = linalg.eigh(np.diag(x) - np.outer(m, m))
    if theta[0] < -1e-10 * max(1.0, x.max()):
        raise ModelError("downdated operator is not positive; input is not a valid rho",
                         min_eigenvalue=float(theta[0]))
    theta = np.clip(theta, 0.0, None)
    weights = (V.T @ u) ** 2
    floor = theta.size * np.finfo(float).eps * max(theta.max(), x.max())
    weights = np.where(weights < MIN_WEIGHT, 0.0, weights)
    # total mass restored by the top-up at zero
    return measure_from_spectrum(theta, weights, rtol=1e-12, floor=floor)


def _step(rho: DiscreteMeasure, rng: np.random.Generator, points: int, tol: float):
    nxt = _downdate(rho)
    zs = _validation_points(rho, rng, points)
    resid = max(recurrence_residual(rho, nxt, z) for z in zs)
    if resid > tol:
        raise NumericError("recurrence identity violated", residual=float(resid), tol=tol)
    return nxt, resid


def recurrence_step(rho: DiscreteMeasure, seed: Optional[int] = None, points: int = 5,
                    tol: float = RECURRENCE_TOL) -> DiscreteMeasure:
    """``rho_{S*alpha}`` from ``rho_alpha``.

    Works in the orthonormal basis of normalised atom indicators, where
    ``Gamma_alpha**2`` is ``diag(x)`` and ``Gamma_{S*alpha}**2`` is
    ``diag(x) - m m^T`` with ``m = sqrt(x w)``. The result is checked against
    the Cauchy-transform recurrence at ``points`` seeded random ``z``.
    """
    rng = np.random.default_rng(default_seed() if seed is None else seed)
    return _step(rho, rng, points, tol)[0]


@dataclass(frozen=True)
class StepRecord:
    step: int
    n_atoms: int
    recurrence_residual: float
    mass_at_zero: float


def reconstruct_from_rho(rho: DiscreteMeasure, n_max: int, seed: Optional[int] = None,
                         log: Optional[list] = None, tol: float = RECURRENCE_TOL) -> RealSequence:
    """``alpha_0..alpha_{n_max}`` from ``rho_alpha`` by iterating the recurrence.

    If ``log`` is a list, one :class:`StepRecord` per step is appended.
    """
    rng = np.random.default_rng(default_seed() if seed is None else seed)
    out = np.empty(n_max + 1)
    cur = rho
    for n in range(n_max + 1):
        out[n] = sqrt_moment(cur)
        if n == n_max:
            break
        cur, resid = _step(cur, rng, 5, tol)
        if log is not None:
            log.append(StepRecord(n + 1, len(cur), float(resid), cur.mass_at_zero()))
    return RealSequence(out, tail=None)
