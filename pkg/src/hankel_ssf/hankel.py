"""Finite Hankel truncations and their spectral data at ``e_0``."""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import LengthError, NumericError
from .sequences import DiscreteMeasure, RealSequence, hankel_block, weak_norm

CLUSTER_RTOL = 1e-9
RESIDUAL_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class SymMatrix:
    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("SymMatrix needs a square array")
        # keep the lower triangle as the single source of truth
        a = np.tril(a) + np.tril(a, -1).T
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def to_csv(self) -> str:
        buf = io.StringIO()
        for row in self.entries:
            buf.write(",".join(repr(float(v)) for v in row) + "\n")
        return buf.getvalue()


@dataclass(frozen=True, eq=False)
class SpectralData:
    """Ascending eigenvalues with the squared first coordinates of the eigenvectors."""

    eigenvalues: np.ndarray
    weights: np.ndarray

    def to_json(self) -> dict:
        return {"eigenvalues": [float(v) for v in self.eigenvalues],
                "weights": [float(v) for v in self.weights]}

    @classmethod
    def from_json(cls, data: dict) -> "SpectralData":
        return cls(np.asarray(data["eigenvalues"], float), np.asarray(data["weights"], float))


def truncate(alpha: RealSequence, N: int) -> SymMatrix:
    """``N x N`` matrix with entries ``alpha_{i+j}``."""
    if N < 0:
        raise LengthError("N must be non-negative")
    if N == 0:
        return SymMatrix(np.zeros((0, 0)))
    return SymMatrix(hankel_block(alpha.extended(2 * N - 2), N))


def symmetric_eigen(M: SymMatrix, check: bool = True) -> SpectralData:
    a = M.entries
    if a.size == 0:
        return SpectralData(np.empty(0), np.empty(0))
    try:
        w, v = linalg.eigh(a)
    except (linalg.LinAlgError, ValueError) as exc:
        raise NumericError(f"eigen-solver failed: {exc}", n=M.n) from exc
    if check:
        scale = np.abs(a).max()
        resid = np.abs(a - (v * w) @ v.T).max()
        if resid > RESIDUAL_RTOL * max(scale, np.finfo(float).tiny):
            raise NumericError("eigen-decomposition residual too large",
                               residual=float(resid), scale=float(scale), n=M.n)
    return SpectralData(w, v[0] ** 2)


def noise_floor(eigenvalues: np.ndarray) -> float:
    """Magnitude below which an eigenvalue of an ``n x n`` matrix is indistinguishable from 0."""
    if not eigenvalues.size:
        return 0.0
    return eigenvalues.size * np.finfo(float).eps * np.abs(eigenvalues).max()


def measure_from_spectrum(values: np.ndarray, weights: np.ndarray,
                          rtol: float = CLUSTER_RTOL, floor: float = 0.0) -> DiscreteMeasure:
    """Atomic measure with atoms at ``values`` (clustered), mass at zero topped up to 1.

    Values at or below ``floor`` are treated as zero. Neighbouring values
    within ``rtol`` (relative) are merged and their weights summed.
    """
    order = np.argsort(values)
    values, weights = values[order], weights[order]
    keep = values > floor
    pos: list[float] = []
    wts: list[float] = []
    for x, w in zip(values[keep], weights[keep]):
        if pos and x - pos[-1] <= rtol * x:
            total = wts[-1] + w
            if total > 0:
                pos[-1] = (pos[-1] * wts[-1] + x * w) / total
            wts[-1] = total
        else:
            pos.append(float(x))
            wts.append(float(w))
    atoms = [(x, w) for x, w in zip(pos, wts) if w > 0]
    zero = 1.0 - sum(w for _, w in atoms)
    if zero > 0:
        atoms.insert(0, (0.0, zero))
    return DiscreteMeasure.from_atoms(atoms, merge_rtol=0.0)


def spectral_measure(alpha: RealSequence, N: int) -> DiscreteMeasure:
    """Spectral measure of the squared ``N``-truncation at ``e_0``.

    Atoms sit at the squared eigenvalues of the truncation. The atom at 0
    receives exactly ``1 - (sum of the other weights)``.
    """
    sd = symmetric_eigen(truncate(alpha, N))
    floor = noise_floor(sd.eigenvalues)
    return measure_from_spectrum(sd.eigenvalues ** 2, sd.weights, floor=floor ** 2)


@dataclass(frozen=True)
class NormBoundsReport:
    N: int
    operator_norm: float
    weak_norm: float
    quarter_lower_ok: bool
    pi_upper_ok: bool
    half_lower_ok: bool

    @property
    def passed(self) -> bool:
        return self.quarter_lower_ok and self.pi_upper_ok and self.half_lower_ok

    def to_json(self) -> dict:
        out = dict(self.__dict__)
        out["passed"] = self.passed
        return out


def norm_bounds_check(alpha: RealSequence, N: int, slack: float = 1e-12) -> NormBoundsReport:
    """Compare the truncation norm with the weak norm of the entries it uses.

    The weak norm is taken over ``alpha_0..alpha_{2N-2}``, the entries that
    appear in the truncation.
    """
    if N < 1:
        raise LengthError("N must be at least 1")
    vals = alpha.extended(2 * N - 2)
    eig = linalg.eigvalsh(hankel_block(vals, N))
    op = float(np.abs(eig).max())
    wn = weak_norm(RealSequence(vals))
    tol = slack * max(op, wn, 1.0)
    return NormBoundsReport(N=N, operator_norm=op, weak_norm=wn,
                            quarter_lower_ok=wn / 4 <= op + tol,
                            pi_upper_ok=op <= np.pi * wn + tol,
                            half_lower_ok=wn / 2 <= op + tol)
