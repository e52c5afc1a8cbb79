"""Closed forms for the Hilbert family ``alpha_n = 1/(n + 1 + gamma)``.

Only ``gamma = 0`` has explicit SSF and spectral measure; there
``arccosh(x)`` is always evaluated as ``log(x + sqrt(x**2 - 1))``.
"""

from __future__ import annotations

import numpy as np

from .direct import StepFunction, ssf
from .errors import DomainError
from .hankel import spectral_measure
from .sequences import RealSequence

PI2 = np.pi ** 2


def hilbert_sequence(gamma: float, n_max: int) -> RealSequence:
    """``alpha_n = 1/(n+1+gamma)`` for ``n <= n_max``; entries beyond are not stored."""
    if gamma <= -0.5:
        raise DomainError("gamma must exceed -1/2", gamma=gamma)
    return RealSequence(1.0 / (np.arange(n_max + 1) + 1.0 + gamma), tail=None)


def _arccosh_ratio(lam):
    # log(pi/sqrt(lam) + sqrt(pi^2/lam - 1)) on (0, pi^2)
    return np.log(np.pi / np.sqrt(lam) + np.sqrt(PI2 / lam - 1.0))


def _on_support(f, lam):
    lam = np.asarray(lam, dtype=float)
    inside = (lam > 0) & (lam < PI2)
    out = np.zeros_like(lam)
    with np.errstate(divide="ignore", invalid="ignore"):
        out[inside] = f(lam[inside])
    return out if out.ndim else float(out)


def xi_closed_form(lam):
    """SSF of the ``gamma = 0`` Hilbert matrix; 0 outside ``(0, pi^2)``."""
    return _on_support(lambda x: np.arctan(2 / np.pi * _arccosh_ratio(x)) / np.pi, lam)


def rho_density(lam):
    """Density of the spectral measure at ``e_0``; 0 outside ``(0, pi^2)``."""
    return _on_support(lambda x: _arccosh_ratio(x) / (PI2 * np.sqrt(x)), lam)


def rho_cdf(lam):
    """``rho([0, lam])`` in closed form.

    With ``X = arccosh(pi/sqrt(lam))`` the tail mass is
    ``(2/pi)(arctan(sinh X) - X/cosh X)``.
    """
    lam = np.asarray(lam, dtype=float)
    out = np.where(lam >= PI2, 1.0, 0.0)
    inside = (lam > 0) & (lam < PI2)
    x = lam[inside]
    X = _arccosh_ratio(x)
    cosh = np.pi / np.sqrt(x)
    sinh = np.sqrt(PI2 / x - 1.0)
    out[inside] = 1.0 - 2 / np.pi * (np.arctan(sinh) - X / cosh)
    return out if out.ndim else float(out)


def inverse_determinant(z):
    """``exp(-int xi/(lam - z))`` in closed form: ``arcsinh(zeta)/zeta``, ``zeta = pi/sqrt(-z)``."""
    z = np.asarray(z, dtype=complex)
    zeta = np.pi / np.sqrt(-z)
    return np.arcsinh(zeta) / zeta


def xi_step(breakpoints) -> StepFunction:
    """Cell averages of the closed-form SSF on ``breakpoints`` inside ``[0, pi^2]``."""
    return StepFunction.discretize(xi_closed_form, breakpoints)


def xi_step_uniform(pieces: int) -> StepFunction:
    return xi_step(np.linspace(0.0, PI2, pieces + 1))


def cdf_distance(N: int, grid: int = 2000) -> float:
    """Sup distance on a grid between the truncated and exact distribution functions of rho."""
    rho = spectral_measure(hilbert_sequence(0.0, 2 * N), N)
    lam = np.linspace(0.0, PI2, grid + 1)[1:-1]
    cum = np.cumsum(rho.weights)
    idx = np.searchsorted(rho.positions, lam, side="right") - 1
    emp = np.where(idx >= 0, cum[np.clip(idx, 0, None)], 0.0)
    # compare against both one-sided limits of the empirical step function
    left_idx = np.searchsorted(rho.positions, lam, side="left") - 1
    emp_left = np.where(left_idx >= 0, cum[np.clip(left_idx, 0, None)], 0.0)
    exact = rho_cdf(lam)
    return float(max(np.abs(emp - exact).max(), np.abs(emp_left - exact).max()))


def comparison_table(N: int, grid: int, half_width: float = 0.5):
    """Rows ``(lam, xi_oracle, xi_truncation_avg, cdf_oracle, cdf_truncation)``.

    The truncation SSF is averaged over ``[lam - h, lam + h]`` because the
    finite model is {0,1}-valued and only converges weakly.
    """
    alpha = hilbert_sequence(0.0, 2 * N)
    xi_n = ssf(alpha, N)
    rho = spectral_measure(alpha, N)
    cum = np.minimum(np.cumsum(rho.weights), 1.0)
    lam = np.linspace(0.0, PI2, grid + 2)[1:-1]
    rows = []
    for x in lam:
        lo, hi = max(0.0, x - half_width), min(PI2, x + half_width)
        avg = xi_n.integral_over(lo, hi) / (hi - lo)
        i = np.searchsorted(rho.positions, x, side="right") - 1
        rows.append((float(x), float(xi_closed_form(x)), avg, float(rho_cdf(x)),
                     float(cum[i]) if i >= 0 else 0.0))
    return rows
