"""Probability vectors, the majorization order and its lattice operations.

Vectors of different length are compared after padding with trailing zeros.
All order tests take an explicit tolerance; the default ``EPS`` is meant for
analytic inputs.
"""

from __future__ import annotations

import enum
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "EPS",
    "MajOrder",
    "ProbVec",
    "point_mass",
    "sort_desc",
    "partial_sums",
    "compare",
    "majorizes",
    "is_uncertain",
    "outer",
    "infimum",
    "supremum",
    "least_concave_majorant",
    "from_partial_sums",
]

EPS = 1e-12


class MajOrder(enum.Enum):
    """Outcome of comparing ``a`` with ``b`` under majorization."""

    FIRST_MAJORIZED = "a < b"
    SECOND_MAJORIZED = "b < a"
    EQUAL = "a = b"
    INCOMPARABLE = "a ? b"


class ProbVec:
    """Immutable finite probability vector.

    Entries slightly below zero (down to ``-tol``) are clamped and the
    vector renormalized; anything more negative, or a total that misses 1
    by more than ``tol``, raises ``ValueError``.
    """

    __slots__ = ("_p",)

    def __init__(self, entries, tol: float = EPS):
        p = np.array(entries, dtype=float).ravel()
        if p.size == 0:
            raise ValueError("a probability vector needs at least one entry")
        if not np.all(np.isfinite(p)):
            raise ValueError("non-finite probability entry")
        if p.min() < -tol:
            raise ValueError(f"negative probability entry {p.min():.3g}")
        total = p.sum()
        if abs(total - 1.0) > tol:
            raise ValueError(f"entries sum to {total!r}, not 1")
        if p.min() < 0.0:
            p = np.clip(p, 0.0, None)
            p /= p.sum()
        p.setflags(write=False)
        self._p = p

    @property
    def entries(self) -> np.ndarray:
        return self._p

    def __len__(self) -> int:
        return self._p.size

    def __iter__(self):
        return iter(self._p.tolist())

    def __getitem__(self, i):
        return self._p[i]

    def __array__(self, dtype=None, copy=None):
        return self._p if dtype is None else self._p.astype(dtype)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProbVec):
            return NotImplemented
        return self._p.shape == other._p.shape and bool(np.all(self._p == other._p))

    def __hash__(self) -> int:
        return hash(self._p.tobytes())

    def __repr__(self) -> str:
        body = ", ".join(f"{x:.6g}" for x in self._p)
        return f"ProbVec([{body}])"

    def padded(self, n: int) -> np.ndarray:
        """Entries with trailing zeros appended up to length ``n``."""
        if n < self._p.size:
            raise ValueError("cannot pad to a shorter length")
        out = np.zeros(n)
        out[: self._p.size] = self._p
        return out


def point_mass(d: int = 1) -> ProbVec:
    """The vector (1, 0, ..., 0) of length ``d``."""
    p = np.zeros(d)
    p[0] = 1.0
    return ProbVec(p)


def _as_probvec(v) -> ProbVec:
    return v if isinstance(v, ProbVec) else ProbVec(v)


def sort_desc(v) -> ProbVec:
    v = _as_probvec(v)
    order = np.argsort(-v.entries, kind="stable")
    return ProbVec(v.entries[order])


def partial_sums(v) -> np.ndarray:
    """Cumulative sums of a vector already sorted in nonincreasing order."""
    v = _as_probvec(v)
    if np.any(np.diff(v.entries) > EPS):
        raise ValueError("partial_sums expects a vector sorted in nonincreasing order")
    return np.cumsum(v.entries)


def _sorted_sums(vectors: Sequence[ProbVec], n: int) -> np.ndarray:
    """Row k holds the partial sums of vectors[k], sorted and padded to n."""
    rows = []
    for v in vectors:
        p = -np.sort(-v.padded(n))
        rows.append(np.cumsum(p))
    return np.array(rows)


def compare(a, b, tol: float = EPS) -> MajOrder:
    a, b = _as_probvec(a), _as_probvec(b)
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    n = max(len(a), len(b))
    sa, sb = _sorted_sums([a, b], n)
    a_below = bool(np.all(sa <= sb + tol))
    b_below = bool(np.all(sb <= sa + tol))
    if a_below and b_below:
        return MajOrder.EQUAL
    if a_below:
        return MajOrder.FIRST_MAJORIZED
    if b_below:
        return MajOrder.SECOND_MAJORIZED
    return MajOrder.INCOMPARABLE


def majorizes(b, a, tol: float = EPS) -> bool:
    """True if ``a`` is majorized by ``b`` (a < b), equality included."""
    return compare(a, b, tol) in (MajOrder.FIRST_MAJORIZED, MajOrder.EQUAL)


def is_uncertain(v, tol: float = EPS) -> bool:
    """True unless ``v`` is (numerically) the point mass."""
    return float(np.max(_as_probvec(v).entries)) < 1.0 - tol


def outer(*vectors) -> ProbVec:
    """Joint vector of independent outcomes, first factor slowest."""
    if not vectors:
        raise ValueError("outer needs at least one vector")
    out = np.array([1.0])
    for v in vectors:
        out = np.multiply.outer(out, _as_probvec(v).entries).ravel()
    return ProbVec(out, tol=1e-9)


def from_partial_sums(mu) -> ProbVec:
    """Adjacent differences of a cumulative sequence (mu_0 = 0 implied)."""
    mu = np.asarray(mu, dtype=float)
    diffs = np.diff(np.concatenate([[0.0], mu]))
    return ProbVec(diffs, tol=1e-9)


def infimum(vectors: Iterable) -> ProbVec:
    """Greatest lower bound of a set of probability vectors.

    The pointwise minimum of concave partial-sum sequences is concave, so
    the differences are already nonincreasing.
    """
    vectors = [_as_probvec(v) for v in vectors]
    if not vectors:
        raise ValueError("infimum of an empty set")
    n = max(len(v) for v in vectors)
    mu = _sorted_sums(vectors, n).min(axis=0)
    mu[-1] = 1.0
    return from_partial_sums(mu)


def least_concave_majorant(mu) -> np.ndarray:
    """Smallest concave sequence dominating ``mu`` on j = 1..n.

    ``mu[j-1]`` is the value at j; the point (0, 0) is prepended and the
    last value is pinned to 1, as befits cumulative probabilities.
    """
    mu = np.asarray(mu, dtype=float)
    n = mu.size
    ys = np.concatenate([[0.0], mu])
    ys[-1] = 1.0
    xs = np.arange(n + 1, dtype=float)
    hull: list[int] = []
    for j in range(n + 1):
        # drop the last hull point while it lies on or below the chord
        while len(hull) >= 2:
            i0, i1 = hull[-2], hull[-1]
            cross = (xs[i1] - xs[i0]) * (ys[j] - ys[i0]) - (ys[i1] - ys[i0]) * (xs[j] - xs[i0])
            if cross >= 0:
                hull.pop()
            else:
                break
        hull.append(j)
    env = np.interp(xs, xs[hull], ys[hull])
    # interpolation can only lift values; keep the originals where they are larger
    env = np.maximum(env, ys)
    return env[1:]


def supremum(vectors: Iterable) -> ProbVec:
    """Least upper bound of a set of probability vectors.

    The pointwise maximum of the partial sums need not be concave; its
    least concave majorant is the tightest admissible cumulative sequence.
    """
    vectors = [_as_probvec(v) for v in vectors]
    if not vectors:
        raise ValueError("supremum of an empty set")
    n = max(len(v) for v in vectors)
    mu = _sorted_sums(vectors, n).max(axis=0)
    return from_partial_sums(least_concave_majorant(mu))
