"""Spectral shift function of the pair (Gamma_alpha^2, Gamma_{S*alpha}^2).

The finite model used throughout: with ``G`` the ``N x N`` truncation of the
Hankel matrix and ``a`` its first column, ``A = G @ G`` and ``B = A - a a^T``.
``B`` equals ``M M^T`` where ``M`` is ``G`` without its first column, so its
eigenvalues are the squared singular values of ``M`` padded by one zero. The
eigenvalues of ``A`` and ``B`` interlace, and the SSF is the indicator of the
union of the gaps ``[b_k, a_k]``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np
from scipy import integrate, linalg

from .errors import ConditioningError, DomainError, ModelError
from .hankel import truncate
from .sequences import DiscreteMeasure, RealSequence

VALUE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class StepFunction:
    """Piecewise-constant function, zero outside ``[x_0, x_m]``.

    ``values[i]`` is the value on ``[x_i, x_{i+1})``; evaluation uses this
    right-continuous representative. Values must lie in ``[0, 1]``.
    """

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        x = np.array(self.breakpoints, dtype=float).reshape(-1)
        v = np.array(self.values, dtype=float).reshape(-1)
        if x.size == 0 and v.size == 0:
            pass
        elif x.size != v.size + 1:
            raise DomainError("need len(breakpoints) == len(values) + 1")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(v))):
            raise DomainError("step function data must be finite")
        if x.size and x[0] < 0:
            raise DomainError("support must lie in [0, inf)")
        if np.any(np.diff(x) <= 0):
            raise DomainError("breakpoints must be strictly increasing")
        if np.any(v < -VALUE_TOL) or np.any(v > 1 + VALUE_TOL):
            raise DomainError("values must lie in [0, 1]",
                              min_value=float(v.min()), max_value=float(v.max()))
        v = np.clip(v, 0.0, 1.0)
        x.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "breakpoints", x)
        object.__setattr__(self, "values", v)

    # -- construction -----------------------------------------------------

    @classmethod
    def zero(cls) -> "StepFunction":
        return cls(np.empty(0), np.empty(0))

    @classmethod
    def indicator(cls, a: float, b: float, height: float = 1.0) -> "StepFunction":
        return cls([a, b], [height])

    @classmethod
    def from_intervals(cls, intervals: Iterable[tuple[float, float]]) -> "StepFunction":
        """Indicator of a union of disjoint intervals (touching ones are merged)."""
        ivs = sorted((float(a), float(b)) for a, b in intervals if b > a)
        merged: list[list[float]] = []
        for a, b in ivs:
            if merged and a <= merged[-1][1]:
                if a < merged[-1][1]:
                    raise DomainError("intervals overlap", at=a)
                merged[-1][1] = max(merged[-1][1], b)
            else:
                merged.append([a, b])
        x: list[float] = []
        v: list[float] = []
        for a, b in merged:
            if x and x[-1] == a:
                pass
            elif x:
                x.append(a)
                v.append(0.0)
            else:
                x.append(a)
            x.append(b)
            v.append(1.0)
        return cls(x, v)

    @classmethod
    def discretize(cls, f: Callable[[float], float], breakpoints) -> "StepFunction":
        """Piecewise averages of ``f`` over the cells of ``breakpoints``."""
        x = np.asarray(breakpoints, dtype=float)
        vals = [integrate.quad(f, a, b, limit=200)[0] / (b - a) for a, b in zip(x[:-1], x[1:])]
        return cls(x, np.clip(vals, 0.0, 1.0))

    def canonical(self) -> "StepFunction":
        """Merge equal neighbouring pieces and trim zero pieces at both ends."""
        if not self.values.size:
            return self
        x = [self.breakpoints[0]]
        v: list[float] = []
        for xi, vi in zip(self.breakpoints[1:], self.values):
            if v and vi == v[-1]:
                x[-1] = xi
            else:
                x.append(xi)
                v.append(vi)
        while v and v[0] == 0:
            v.pop(0)
            x.pop(0)
        while v and v[-1] == 0:
            v.pop()
            x.pop()
        if not v:
            return StepFunction.zero()
        return StepFunction(x, v)

    # -- queries ----------------------------------------------------------

    @property
    def support_end(self) -> float:
        return float(self.breakpoints[-1]) if self.breakpoints.size else 0.0

    def is_binary(self) -> bool:
        return bool(np.all((self.values == 0) | (self.values == 1)))

    def intervals(self) -> list[tuple[float, float]]:
        """Maximal intervals where the function equals 1 (binary functions only)."""
        if not self.is_binary():
            raise DomainError("intervals() needs a {0,1}-valued step function")
        c = self.canonical()
        return [(float(a), float(b)) for a, b, v in zip(c.breakpoints[:-1], c.breakpoints[1:], c.values)
                if v == 1]

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        if not self.values.size:
            return np.zeros_like(lam)
        idx = np.searchsorted(self.breakpoints, lam, side="right") - 1
        inside = (idx >= 0) & (idx < self.values.size)
        out = np.zeros_like(lam)
        out[inside] = self.values[idx[inside]]
        return out

    def integral(self) -> float:
        return self.moment(0)

    def moment(self, k: int) -> float:
        """``int xi(lam) lam**k dlam``."""
        if not self.values.size:
            return 0.0
        x = self.breakpoints
        return float(np.dot(self.values, (x[1:] ** (k + 1) - x[:-1] ** (k + 1)) / (k + 1)))

    def integral_over(self, a: float, b: float) -> float:
        if not self.values.size or b <= a:
            return 0.0
        lo = np.clip(self.breakpoints[:-1], a, b)
        hi = np.clip(self.breakpoints[1:], a, b)
        return float(np.dot(self.values, hi - lo))

    def local_average(self, center: float, half_width: float) -> float:
        return self.integral_over(center - half_width, center + half_width) / (2 * half_width)

    def cauchy(self, z):
        """``int xi(lam) / (lam - z) dlam`` in closed form (principal branch)."""
        z = np.asarray(z, dtype=complex)
        if not self.values.size:
            return np.zeros_like(z)
        x = self.breakpoints
        zz = z[..., None]
        with np.errstate(divide="ignore"):
            terms = np.log((x[1:] - zz) / (x[:-1] - zz))
        return np.sum(self.values * terms, axis=-1)

    def log_integral(self, s):
        """``int xi(lam) / (lam + s) dlam`` for real ``s >= 0`` (may be ``inf`` at 0)."""
        s = np.asarray(s, dtype=float)
        if not self.values.size:
            return np.zeros_like(s)
        x = self.breakpoints
        ss = s[..., None]
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.log(x[1:] + ss) - np.log(x[:-1] + ss)
        terms = np.where(self.values > 0, terms, 0.0)
        return np.sum(self.values * terms, axis=-1)

    # -- serialisation ----------------------------------------------------

    def to_json(self) -> dict:
        return {"breakpoints": [float(v) for v in self.breakpoints],
                "values": [float(v) for v in self.values]}

    @classmethod
    def from_json(cls, data: dict) -> "StepFunction":
        return cls(data.get("breakpoints", []), data.get("values", []))

    def grid(self, size: int, upper: Optional[float] = None) -> tuple[np.ndarray, np.ndarray]:
        upper = self.support_end if upper is None else upper
        lam = np.linspace(0.0, upper, size)
        return lam, self(lam)


# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FiniteModel:
    """Ascending eigenvalues of ``A = G**2`` and of ``B = A - a a^T``."""

    N: int
    a_eigs: np.ndarray
    b_eigs: np.ndarray
    min_eig_hankel: float
    min_eig_shifted: float

    def determinant(self, z):
        """Perturbation determinant ``prod (a_k - z)/(b_k - z)``."""
        z = np.asarray(z, dtype=complex)[..., None]
        return np.prod((self.a_eigs - z) / (self.b_eigs - z), axis=-1)


def finite_model(alpha: RealSequence, N: int, tol: float = 1e-8) -> FiniteModel:
    """Eigenvalue pairs of the finite model, with a double-positivity guard.

    Raises ModelError when the truncation of ``Gamma_alpha`` or of
    ``Gamma_{S*alpha}`` has an eigenvalue below ``-tol`` times its scale.
    """
    G = truncate(alpha, N).entries
    if N == 0:
        return FiniteModel(0, np.empty(0), np.empty(0), 0.0, 0.0)
    eig = linalg.eigvalsh(G)
    scale = max(np.abs(eig).max(), 1.0)
    shifted = linalg.eigvalsh(G[1:, :-1] if N > 1 else np.zeros((0, 0)))
    min_g = float(eig[0])
    min_s = float(shifted[0]) if shifted.size else 0.0
    if min_g < -tol * scale or min_s < -tol * scale:
        raise ModelError("truncation is not positive semidefinite; alpha is not doubly positive "
                         "or N is too small", min_eig_hankel=min_g, min_eig_shifted=min_s, N=N)
    a = np.sort(eig ** 2)
    sv = linalg.svdvals(G[:, 1:]) if N > 1 else np.empty(0)
    b = np.sort(np.concatenate([sv ** 2, np.zeros(N - sv.size)]))
    # rounding can break b_k <= a_k <= b_{k+1} by a few ulps; restore it
    b = np.minimum(b, a)
    b[1:] = np.maximum(b[1:], a[:-1])
    return FiniteModel(N, a, b, min_g, min_s)


def ssf(alpha: RealSequence, N: int, tol: float = 1e-8) -> StepFunction:
    """SSF of the ``N``-truncated model as a {0,1}-valued step function.

    Gaps ``[b_k, a_k]`` shorter than the eigen-solver noise
    (``64 * eps * max a_k``) are dropped.
    """
    model = finite_model(alpha, N, tol)
    if not model.a_eigs.size:
        return StepFunction.zero()
    drop = 64 * np.finfo(float).eps * model.a_eigs[-1]
    keep = model.a_eigs - model.b_eigs > drop
    return StepFunction.from_intervals(zip(model.b_eigs[keep], model.a_eigs[keep]))


def _distance_to_halfline(z: complex) -> float:
    return abs(z) if z.real < 0 else abs(z.imag)


def cauchy_residual(xi: StepFunction, rho: DiscreteMeasure, z: complex, min_distance: float = 1e-6) -> float:
    """``|int lam drho/(lam - z) - 1 + exp(-int xi/(lam - z))|``."""
    z = complex(z)
    if _distance_to_halfline(z) < min_distance:
        raise ConditioningError("z is too close to [0, inf)", z=[z.real, z.imag])
    lhs = np.sum(rho.weights * rho.positions / (rho.positions - z)) if len(rho) else 0.0
    rhs = 1.0 - np.exp(-complex(xi.cauchy(z)))
    return float(abs(lhs - rhs))


@dataclass(frozen=True)
class TraceReport:
    xi_integral: float
    sum_of_squares: Optional[float]
    l2_residual: Optional[float]
    alpha0_estimate: float
    quad_error: float
    tail_bound: float
    T: float

    def to_json(self) -> dict:
        return dict(self.__dict__)


def alpha0_from_ssf(xi: StepFunction, T: float = 1e8) -> tuple[float, float, float]:
    """``(2/pi) int_0^T {1 - exp(-int xi/(lam + t**2))} dt`` via ``t = s/(1-s)``.

    Returns ``(value, quadrature error estimate, tail bound)``; the neglected
    tail ``t > T`` is at most ``int xi / T``.
    """
    if not xi.values.size:
        return 0.0, 0.0, 0.0

    def integrand(s):
        t = s / (1.0 - s)
        g = xi.log_integral(t * t)
        return -np.expm1(-g) / (1.0 - s) ** 2

    s_cut = T / (1.0 + T)
    pts = np.sqrt(xi.breakpoints[xi.breakpoints > 0])
    pts = pts / (1.0 + pts)
    kw = {"points": pts} if 0 < pts.size <= 50 else {}
    val, err = integrate.quad(integrand, 0.0, s_cut, epsabs=1e-13, epsrel=1e-10, limit=500, **kw)
    return 2 / np.pi * val, 2 / np.pi * err, 2 / np.pi * xi.integral() / T


def trace_formulas(xi: StepFunction, alpha: RealSequence, T: float = 1e8) -> TraceReport:
    """Check the two trace identities for ``xi`` against ``alpha``.

    ``l2_residual`` compares ``int xi`` with the full ``sum alpha_n**2``
    (``None`` if ``alpha`` has no tail rule); ``alpha0_estimate`` is the
    value the exponential formula assigns to ``alpha_0``.
    """
    total = xi.integral()
    sq = alpha.sum_of_squares()
    if sq is None:
        sq = float(np.dot(alpha.values, alpha.values))
    a0, err, tail = alpha0_from_ssf(xi, T)
    return TraceReport(xi_integral=total, sum_of_squares=sq, l2_residual=abs(total - sq),
                       alpha0_estimate=a0, quad_error=err, tail_bound=tail, T=T)


class KernelClass(str, enum.Enum):
    TRIVIAL = "trivial_kernel"
    INFINITE = "infinite_dim_kernel"


def kernel_classification(xi: StepFunction) -> KernelClass:
    """Decide triviality of the kernel from the behaviour of ``xi`` near 0.

    ``int_0 xi/lam`` diverges iff the first value ``v`` is positive and
    ``int_0 (1-xi)/lam`` diverges iff ``v < 1``; the kernel is trivial iff
    both diverge.
    """
    v = 0.0
    if xi.values.size and xi.breakpoints[0] == 0.0:
        v = float(xi.values[0])
    return KernelClass.TRIVIAL if 0.0 < v < 1.0 else KernelClass.INFINITE


def ssf_moment_measure(omega: DiscreteMeasure) -> StepFunction:
    """Exact SSF of the infinite Hankel operator of a finite moment measure.

    With ``alpha_n = sum_k w_k t_k**n`` the operator is ``V W V^T`` for the
    vectors ``(t_k**n)_n``, so its nonzero spectrum is that of
    ``W^{1/2} G W^{1/2}`` with the Gram matrix ``G_kl = 1/(1 - t_k t_l)``;
    the shifted operator uses the weights ``w_k t_k``. No truncation in
    ``n`` is involved.
    """
    if not len(omega):
        return StepFunction.zero()
    t, w = omega.positions, omega.weights
    if t[-1] >= 1:
        raise DomainError("moment measure atoms must lie in [0, 1)")
    gram = 1.0 / (1.0 - np.outer(t, t))
    sw = np.sqrt(w)
    sws = np.sqrt(w * t)
    a = np.sort(np.clip(linalg.eigvalsh(sw[:, None] * gram * sw[None, :]), 0, None) ** 2)
    b = np.sort(np.clip(linalg.eigvalsh(sws[:, None] * gram * sws[None, :]), 0, None) ** 2)
    b = np.minimum(b, a)
    b[1:] = np.maximum(b[1:], a[:-1])
    drop = 64 * np.finfo(float).eps * a[-1]
    keep = a - b > drop
    return StepFunction.from_intervals(zip(b[keep], a[keep]))
