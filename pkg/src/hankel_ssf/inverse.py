"""Reconstruction of ``alpha`` from its spectral shift function.

Finite-rank data (``xi`` an indicator of ``N`` disjoint intervals) is
inverted in closed form through a contraction model; general ``xi`` is first
replaced by pulse-width-modulated indicators that converge to it weakly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import linalg

from .direct import StepFunction, ssf, trace_formulas
from .errors import DomainError, InterlacingError, NumericError
from .measures import partial_fraction_weights
from .sequences import DiscreteMeasure, RealSequence, hankel_block

MU_FLOOR = 1e-8
PSD_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class IntervalSystem:
    """Interlaced ``0 < mu_N < lam_N < ... < mu_1 < lam_1`` (stored decreasing).

    ``xi`` is the indicator of the union of ``[mu_j**2, lam_j**2]``.
    """

    mu: np.ndarray
    lam: np.ndarray

    def __post_init__(self):
        mu = np.array(self.mu, dtype=float).reshape(-1)
        lam = np.array(self.lam, dtype=float).reshape(-1)
        if mu.shape != lam.shape:
            raise InterlacingError("mu and lambda must have equal length")
        seq = np.empty(2 * mu.size)
        seq[0::2] = lam
        seq[1::2] = mu
        if mu.size and (mu[-1] <= 0 or np.any(np.diff(seq) >= 0)):
            raise InterlacingError("need 0 < mu_N < lam_N < ... < mu_1 < lam_1",
                                   pairs=[[float(m), float(l)] for m, l in zip(mu, lam)])
        mu.setflags(write=False)
        lam.setflags(write=False)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "lam", lam)

    @classmethod
    def from_pairs(cls, pairs: Sequence) -> "IntervalSystem":
        pairs = sorted(((float(m), float(l)) for m, l in pairs), key=lambda p: -p[1])
        return cls([m for m, _ in pairs], [l for _, l in pairs])

    @classmethod
    def from_step_function(cls, xi: StepFunction, floor: float = MU_FLOOR) -> "IntervalSystem":
        """Interval system of a {0,1}-valued ``xi``.

        An interval starting at 0 gets ``mu = floor * lam_1`` to keep the
        interlacing strict.
        """
        ivs = xi.intervals()
        if not ivs:
            return cls([], [])
        lam = np.sqrt([b for _, b in ivs])[::-1]
        mu = np.sqrt([a for a, _ in ivs])[::-1]
        if mu[-1] == 0.0:
            mu[-1] = min(floor * lam[0], 0.5 * lam[-1])
        return cls(mu, lam)

    def __len__(self):
        return self.mu.size

    @property
    def pairs(self) -> list[tuple[float, float]]:
        return [(float(m), float(l)) for m, l in zip(self.mu, self.lam)]

    def to_step_function(self) -> StepFunction:
        return StepFunction.from_intervals(zip(self.mu ** 2, self.lam ** 2))

    def to_json(self) -> dict:
        return {"pairs": [[m, l] for m, l in self.pairs]}

    @classmethod
    def from_json(cls, data: dict) -> "IntervalSystem":
        return cls.from_pairs(data.get("pairs", []))


def pwm_step(xi: StepFunction, slices: int) -> StepFunction:
    """Replace each piece of height ``A`` on ``[a, b]`` by ``slices`` full-height pulses.

    Pulse ``n`` (1-based) covers ``[a + (n-1)L/slices, a + (n-1+A)L/slices]``
    with ``L = b - a``, so every slice keeps the mass ``A L / slices``.
    """
    if slices < 1:
        raise DomainError("slices must be a positive integer")
    ivs = []
    for a, b, A in zip(xi.breakpoints[:-1], xi.breakpoints[1:], xi.values):
        if A <= 0:
            continue
        if A >= 1:
            ivs.append((a, b))
            continue
        L = b - a
        n = np.arange(slices)
        ivs.extend(zip(a + n * L / slices, a + (n + A) * L / slices))
    return StepFunction.from_intervals(ivs)


def pwm(xi: StepFunction, slices_per_piece: int, floor: float = MU_FLOOR) -> IntervalSystem:
    return IntervalSystem.from_step_function(pwm_step(xi, slices_per_piece), floor)


@dataclass(frozen=True, eq=False)
class ContractionModel:
    """Finite model ``L^2(rho~)`` of a finite-rank interval system.

    ``u`` is the constant function 1, ``h = H0 u``, ``H`` the square root of
    ``H0**2 - h h^T`` and ``sigma = H H0^{-1}``; then
    ``alpha_n = u^T sigma**n h``.
    """

    x: np.ndarray
    w: np.ndarray
    u: np.ndarray
    h: np.ndarray
    H: np.ndarray
    sigma: np.ndarray
    omega: DiscreteMeasure

    @property
    def sigma_norm(self) -> float:
        return float(linalg.norm(self.sigma, 2)) if self.sigma.size else 0.0

    def alpha(self, n_max: int) -> np.ndarray:
        out = np.empty(n_max + 1)
        v = self.h.copy()
        for n in range(n_max + 1):
            out[n] = self.u @ v
            v = self.sigma @ v
        return out


def contraction_model(sys: IntervalSystem, method: str = "secular") -> ContractionModel:
    """Build the contraction model of ``sys``.

    ``method="secular"`` uses that the eigenvalues of ``H0**2 - h h^T`` are
    exactly ``mu_k**2``, with eigenvectors proportional to
    ``h_i / (lam_i**2 - mu_k**2)``; every quantity is then formed from
    differences of the input data and small ``lam_j`` cause no loss of
    accuracy. ``method="eigh"`` diagonalises the matrix numerically instead.
    """
    if not len(sys):
        e = np.empty(0)
        return ContractionModel(e, e, e, e, np.zeros((0, 0)), np.zeros((0, 0)), DiscreteMeasure.empty())
    x = sys.lam ** 2
    nu = partial_fraction_weights(sys.mu ** 2, x)
    if np.any(nu <= 0):
        raise NumericError("non-positive partial-fraction weight", min_weight=float(nu.min()))
    w = nu / x
    u = np.sqrt(w)
    r = sys.lam
    h = r * u
    if method == "secular":
        # C[i, k] = 1 / (lam_i^2 - mu_k^2); eigenvector k is h * C[:, k] normalised
        C = 1.0 / (x[:, None] - sys.mu[None, :] ** 2)
        norm = np.sqrt(np.sum((h[:, None] * C) ** 2, axis=0))
        Vr = (u[:, None] * C) / norm  # V[i, k] / lam_i
        V = r[:, None] * Vr
        H = (V * sys.mu) @ V.T
        sigma = (V * sys.mu) @ Vr.T
        q = np.sqrt(r)
        S = ((q[:, None] * Vr) * sys.mu) @ (q[:, None] * Vr).T
    elif method == "eigh":
        theta, V = linalg.eigh(np.diag(x) - np.outer(h, h))
        if theta[0] < -PSD_TOL * x.max():
            raise InterlacingError("H0^2 - h h^T is not positive semidefinite",
                                   min_eigenvalue=float(theta[0]))
        theta = np.clip(theta, 0.0, None)
        H = (V * np.sqrt(theta)) @ V.T
        sigma = H / r[None, :]
        q = np.sqrt(r)
        S = H / np.outer(q, q)
    else:
        raise ValueError(f"unknown method {method!r}")
    omega = _moment_measure(S, np.sqrt(r) * u)
    return ContractionModel(x, w, u, h, H, sigma, omega)


def _moment_measure(S: np.ndarray, b: np.ndarray) -> DiscreteMeasure:
    # sigma = H R^{-1} is similar to the symmetric S = R^{-1/2} H R^{-1/2}; in the
    # eigenbasis of S, alpha_n = sum_k c_k**2 t_k**n with c = Q^T R^{1/2} u.
    t, Q = linalg.eigh((S + S.T) / 2)
    c = Q.T @ b
    t = np.clip(t, 0.0, None)
    keep = c ** 2 > 0
    return DiscreteMeasure.from_atoms(zip(np.minimum(t[keep], np.nextafter(1.0, 0)), c[keep] ** 2))


def finite_rank_inverse(sys: IntervalSystem, n_max: int, norm_tol: float = 1e-12,
                        method: str = "secular") -> RealSequence:
    """``alpha_0..alpha_{n_max}`` whose SSF is the indicator of ``sys``.

    The values come from ``u^T sigma**n h``; the tail rule is the equivalent
    moment measure of the model.
    """
    model = contraction_model(sys, method)
    if model.sigma.size and model.sigma_norm > 1 + norm_tol:
        raise NumericError("contraction has norm above 1", norm=model.sigma_norm)
    return RealSequence(model.alpha(n_max), tail=model.omega)


@dataclass(frozen=True)
class DecayProfile:
    norms: np.ndarray
    isometry_defect: np.ndarray

    @property
    def monotone(self) -> bool:
        return bool(np.all(np.diff(self.norms) <= 1e-12 * max(self.norms[0], 1.0)))


def contraction_decay_check(sys: IntervalSystem, f, n_steps: int) -> DecayProfile:
    """``|| sigma**n f ||`` for ``n = 0..n_steps`` and the isometry defect.

    ``isometry_defect[n] = ||f||**2 - sum_{k<=n} (u^T sigma**k f)**2``; it
    tends to 0 exactly when the norms do.
    """
    model = contraction_model(sys)
    v = np.array(f, dtype=float).reshape(-1)
    total = float(v @ v)
    norms = np.empty(n_steps + 1)
    defect = np.empty(n_steps + 1)
    acc = 0.0
    for n in range(n_steps + 1):
        norms[n] = linalg.norm(v)
        acc += float(model.u @ v) ** 2 if v.size else 0.0
        defect[n] = total - acc
        v = model.sigma @ v
    return DecayProfile(norms, defect)


@dataclass(frozen=True)
class SpectralFidelity:
    N: int
    lam_error: float
    mu_error: float


def spectral_fidelity(alpha: RealSequence, sys: IntervalSystem, N: int) -> SpectralFidelity:
    """Distance between the top eigenvalues of the truncations and ``sys``."""
    vals = alpha.extended(2 * N - 1)
    g = linalg.eigvalsh(hankel_block(vals, N))[::-1][:len(sys)]
    gs = linalg.eigvalsh(hankel_block(vals, N, offset=1))[::-1][:len(sys)]
    return SpectralFidelity(N, float(np.abs(g - sys.lam).max(initial=0.0)),
                            float(np.abs(gs - sys.mu).max(initial=0.0)))


@dataclass(frozen=True, eq=False)
class InverseResult:
    alpha: RealSequence
    slice_counts: list
    history: np.ndarray
    deltas: np.ndarray = field(default=None)

    def to_rows(self):
        for s, row in zip(self.slice_counts, self.history):
            for n, v in enumerate(row):
                yield s, n, float(v)


def _slice_schedule(slices: int, levels: int = 4) -> list[int]:
    counts = sorted({max(1, slices >> k) for k in range(levels)})
    return counts


def inverse(xi: StepFunction, slices: int, n_max: int) -> InverseResult:
    """Approximate ``alpha`` with SSF ``xi`` through PWM at ``slices`` pulses per piece.

    The same reconstruction at ``slices/8, slices/4, slices/2`` is kept in
    ``history`` and ``deltas`` holds the entrywise changes between successive
    slice counts (all zero for {0,1}-valued ``xi``).
    """
    counts = _slice_schedule(slices)
    rows = []
    alpha = None
    for s in counts:
        alpha = finite_rank_inverse(pwm(xi, s), n_max)
        rows.append(alpha.values)
    history = np.array(rows)
    deltas = np.abs(np.diff(history, axis=0)) if len(rows) > 1 else np.zeros((0, n_max + 1))
    return InverseResult(alpha, counts, history, deltas)


@dataclass(frozen=True)
class RoundtripReport:
    N: int
    slices: int
    n_max: int
    max_delta: float
    deltas: list
    l2_residual: Optional[float]
    alpha0_residual: float

    def to_json(self) -> dict:
        return dict(self.__dict__)


def roundtrip(alpha: RealSequence, N: int, slices: int, n_max: int) -> RoundtripReport:
    xi = ssf(alpha, N)
    back = inverse(xi, slices, n_max).alpha
    ref = alpha.extended(n_max)
    deltas = np.abs(ref - back.values)
    tr = trace_formulas(xi, alpha)
    return RoundtripReport(N=N, slices=slices, n_max=n_max, max_delta=float(deltas.max()),
                           deltas=[float(d) for d in deltas], l2_residual=tr.l2_residual,
                           alpha0_residual=abs(tr.alpha0_estimate - ref[0]))
