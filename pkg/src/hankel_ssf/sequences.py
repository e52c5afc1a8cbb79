"""Moment sequences and the discrete measures that generate them.

A sequence ``alpha`` enters every computation in this package through a finite
prefix of stored values plus a rule for the entries beyond it. Two rules are
supported: ``"zero"`` (the sequence vanishes past the prefix) and a moment
rule ``alpha_n = sum_k w_k t_k**n`` backed by a :class:`DiscreteMeasure` on
``[0, 1)``. A sequence without a tail rule only knows its prefix, and asking
for more raises :class:`~hankel_ssf.errors.LengthError`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Union

import numpy as np
from scipy import special

from .errors import InvalidMeasureError, LengthError

MERGE_RTOL = 1e-12


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Finite non-negative atomic measure on ``[0, inf)``.

    Atoms are kept sorted by position with strictly positive weights. Use
    :meth:`from_atoms` to build one from raw data; it sorts, drops zero
    weights and merges positions that agree to ``merge_rtol``.
    """

    positions: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "positions", _frozen(self.positions))
        object.__setattr__(self, "weights", _frozen(self.weights))
        if self.positions.shape != self.weights.shape or self.positions.ndim != 1:
            raise InvalidMeasureError("positions and weights must be 1-d arrays of equal length")
        if not (np.all(np.isfinite(self.positions)) and np.all(np.isfinite(self.weights))):
            raise InvalidMeasureError("atoms must be finite")
        if np.any(self.positions < 0):
            raise InvalidMeasureError("atom positions must be non-negative",
                                      min_position=float(self.positions.min()))
        if np.any(self.weights <= 0):
            raise InvalidMeasureError("atom weights must be positive")
        if np.any(np.diff(self.positions) <= 0):
            raise InvalidMeasureError("atom positions must be strictly increasing")

    @classmethod
    def from_atoms(cls, atoms: Iterable, merge_rtol: float = MERGE_RTOL) -> "DiscreteMeasure":
        pairs = [(float(x), float(w)) for x, w in atoms]
        if any(w < 0 for _, w in pairs):
            raise InvalidMeasureError("atom weights must be non-negative")
        pairs = sorted((x, w) for x, w in pairs if w > 0)
        pos: list[float] = []
        wts: list[float] = []
        for x, w in pairs:
            if pos and x - pos[-1] <= merge_rtol * max(abs(x), abs(pos[-1])):
                total = wts[-1] + w
                pos[-1] = (pos[-1] * wts[-1] + x * w) / total
                wts[-1] = total
            else:
                pos.append(x)
                wts.append(w)
        return cls(np.array(pos), np.array(wts))

    @classmethod
    def empty(cls) -> "DiscreteMeasure":
        return cls(np.empty(0), np.empty(0))

    @classmethod
    def point(cls, position: float, weight: float = 1.0) -> "DiscreteMeasure":
        return cls.from_atoms([(position, weight)])

    def __len__(self):
        return self.positions.size

    @property
    def atoms(self) -> list[tuple[float, float]]:
        return [(float(x), float(w)) for x, w in zip(self.positions, self.weights)]

    @property
    def mass(self) -> float:
        return float(self.weights.sum())

    def mass_at_zero(self) -> float:
        if len(self) and self.positions[0] == 0.0:
            return float(self.weights[0])
        return 0.0

    def integrate(self, f) -> float:
        """Return ``sum_k w_k f(x_k)`` for a vectorised callable ``f``."""
        if not len(self):
            return 0.0
        return float(np.dot(self.weights, f(self.positions)))

    def moments(self, n_max: int) -> np.ndarray:
        """Power moments ``sum_k w_k x_k**n`` for ``n = 0..n_max``."""
        n = np.arange(n_max + 1)[:, None]
        return np.power(self.positions[None, :], n) @ self.weights

    def allclose(self, other: "DiscreteMeasure", atol: float = 1e-12) -> bool:
        return (len(self) == len(other)
                and np.allclose(self.positions, other.positions, rtol=0, atol=atol)
                and np.allclose(self.weights, other.weights, rtol=0, atol=atol))

    def to_json(self) -> dict:
        return {"atoms": [[x, w] for x, w in self.atoms]}

    @classmethod
    def from_json(cls, data: dict) -> "DiscreteMeasure":
        return cls.from_atoms(data.get("atoms", []))

    def __repr__(self):
        return f"DiscreteMeasure({self.atoms!r})"


def _check_unit_interval(omega: DiscreteMeasure) -> None:
    if len(omega) and (omega.positions[0] < 0 or omega.positions[-1] >= 1):
        raise InvalidMeasureError(
            "moment measure atoms must lie in [0, 1)",
            positions=[float(omega.positions[0]), float(omega.positions[-1])])


Tail = Union[str, DiscreteMeasure, None]


@dataclass(frozen=True, eq=False)
class RealSequence:
    """Finite prefix ``alpha_0..alpha_{n_max}`` plus a tail rule.

    ``tail`` is ``"zero"``, a :class:`DiscreteMeasure` on ``[0, 1)`` (moment
    rule) or ``None`` (nothing is known past the prefix).
    """

    values: np.ndarray
    tail: Tail = "zero"

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(np.atleast_1d(self.values)
                                                   if np.size(self.values) else np.empty(0)))
        if self.values.ndim != 1:
            raise ValueError("values must be one-dimensional")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("sequence values must be finite")
        if isinstance(self.tail, DiscreteMeasure):
            _check_unit_interval(self.tail)
        elif self.tail not in ("zero", None):
            raise ValueError(f"unknown tail rule {self.tail!r}")

    def __len__(self):
        return self.values.size

    @property
    def n_max(self) -> int:
        return self.values.size - 1

    @property
    def is_moment(self) -> bool:
        return isinstance(self.tail, DiscreteMeasure)

    def extended(self, n_max: int) -> np.ndarray:
        """Entries ``alpha_0..alpha_{n_max}``, using the tail rule if needed."""
        if n_max < 0:
            return np.empty(0)
        size = n_max + 1
        if size <= len(self):
            return np.array(self.values[:size])
        if self.tail == "zero":
            return np.concatenate([self.values, np.zeros(size - len(self))])
        if self.tail is None:
            raise LengthError(f"need alpha_0..alpha_{n_max} but only {len(self)} entries are stored",
                              stored=len(self), required=size)
        extra = self.tail.moments(n_max)[len(self):]
        return np.concatenate([self.values, extra])

    def __getitem__(self, n):
        if isinstance(n, slice):
            return self.values[n]
        return float(self.extended(n)[n])

    def sum_of_squares(self) -> Optional[float]:
        """``sum_n alpha_n**2`` over the whole sequence, or ``None`` when the tail is unknown."""
        head = float(np.dot(self.values, self.values))
        if self.tail == "zero":
            return head
        if self.tail is None:
            return None
        t, w = self.tail.positions, self.tail.weights
        tt = np.outer(t, t)
        return head + float(w @ (tt ** len(self) / (1.0 - tt)) @ w)

    def to_json(self) -> dict:
        if self.is_moment:
            tail = {"moment": self.tail.to_json()}
        else:
            tail = self.tail
        return {"values": [float(v) for v in self.values], "tail": tail}

    @classmethod
    def from_json(cls, data: dict) -> "RealSequence":
        tail = data.get("tail", "zero")
        if isinstance(tail, dict):
            tail = DiscreteMeasure.from_json(tail["moment"])
        return cls(np.asarray(data.get("values", []), dtype=float), tail)


def from_moment_measure(omega: DiscreteMeasure, n_max: int) -> RealSequence:
    """Moment sequence ``alpha_n = int t**n d omega(t)`` for ``n <= n_max``."""
    _check_unit_interval(omega)
    if n_max < 0:
        raise LengthError("n_max must be non-negative")
    return RealSequence(omega.moments(n_max), tail=omega)


def moment_quadrature(order: int, gamma: float = 0.0) -> DiscreteMeasure:
    """Gauss-Jacobi discretisation of ``t**gamma dt`` on ``[0, 1)``.

    With ``order`` nodes the moments ``n <= 2*order - 1`` are exact, so for
    ``gamma = 0`` the sequence approximates ``1/(n+1)``.
    """
    if gamma <= -1:
        raise InvalidMeasureError("gamma must exceed -1")
    x, w = special.roots_jacobi(order, 0.0, gamma)
    return DiscreteMeasure.from_atoms(zip((1 + x) / 2, w * 2.0 ** (-gamma - 1)))


def shift(alpha: RealSequence, k: int = 1) -> RealSequence:
    """Return ``(S*)**k alpha``, i.e. the sequence ``alpha_{n+k}``."""
    if k < 0:
        raise ValueError("shift count must be non-negative")
    if k == 0:
        return alpha
    if k > len(alpha) and alpha.tail is None:
        raise LengthError(f"cannot shift by {k}: only {len(alpha)} entries stored",
                          stored=len(alpha), required=k)
    if alpha.is_moment:
        omega = alpha.tail
        tail = DiscreteMeasure.from_atoms(zip(omega.positions, omega.weights * omega.positions ** k))
        values = alpha.extended(max(len(alpha), k + 1) - 1)[k:]
        return RealSequence(values, tail)
    return RealSequence(alpha.values[k:], alpha.tail)


def weak_norm(alpha: RealSequence) -> float:
    """``max (n+1)|alpha_n|`` over the stored entries."""
    if not len(alpha):
        return 0.0
    return float(np.max(np.arange(1, len(alpha) + 1) * np.abs(alpha.values)))


def hankel_block(values: np.ndarray, size: int, offset: int = 0) -> np.ndarray:
    idx = np.add.outer(np.arange(size), np.arange(size)) + offset
    return values[idx]


@dataclass(frozen=True)
class PositivityReport:
    N: int
    K: int
    tol: float
    min_eig_hankel: float
    min_eig_shifted: float
    min_difference: float
    hankel_ok: bool
    shifted_ok: bool
    monotone_ok: bool

    @property
    def passed(self) -> bool:
        return self.hankel_ok and self.shifted_ok and self.monotone_ok

    def to_json(self) -> dict:
        out = dict(self.__dict__)
        out["passed"] = self.passed
        return out


def iterated_differences(alpha: RealSequence, N: int, K: int) -> np.ndarray:
    """Array ``D[k, n] = ((I - S*)**k alpha)_n`` for ``k <= K``, ``n <= N``.

    For moment sequences this is ``int t**n (1-t)**k d omega`` and is computed
    that way, which avoids the cancellation of repeated differencing.
    """
    if alpha.is_moment and len(alpha.tail):
        t, w = alpha.tail.positions, alpha.tail.weights
        k = np.arange(K + 1)[:, None, None]
        n = np.arange(N + 1)[None, :, None]
        return np.sum(w * t ** n * (1 - t) ** k, axis=-1)
    vals = alpha.extended(N + K)
    out = np.empty((K + 1, N + 1))
    row = vals
    for k in range(K + 1):
        out[k] = row[:N + 1]
        row = row[:-1] - row[1:]
    return out


def positivity_report(alpha: RealSequence, N: int, K: int = 8, tol: float = 1e-8) -> PositivityReport:
    """Numerical evidence for double positivity of ``alpha``.

    Checks that the ``N x N`` truncations of the Hankel matrices of ``alpha``
    and of its shift have no eigenvalue below ``-tol``, and that the iterated
    differences up to order ``K`` stay above ``-tol``. A failure certifies
    that ``alpha`` is not doubly positive; a pass is evidence only.
    """
    if N < 1:
        raise LengthError("N must be at least 1")
    vals = alpha.extended(2 * N - 1)
    g = hankel_block(vals, N)
    gs = hankel_block(vals, N, offset=1)
    min_g = float(np.linalg.eigvalsh(g)[0])
    min_gs = float(np.linalg.eigvalsh(gs)[0])
    diffs = iterated_differences(alpha, N, K)
    min_d = float(diffs.min())
    return PositivityReport(N=N, K=K, tol=tol, min_eig_hankel=min_g, min_eig_shifted=min_gs,
                            min_difference=min_d, hankel_ok=min_g >= -tol,
                            shifted_ok=min_gs >= -tol, monotone_ok=min_d >= -tol)
