"""Entanglement detectors built on majorization and on scalar disorder measures.

Every detector is a necessary condition for separability: it reports
``ENTANGLED`` when violated and ``INCONCLUSIVE`` otherwise, never
"separable".
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .bounds import OptimizerConfig
from .entropy import EntropyMeasure
from .probvec import ProbVec, from_partial_sums, infimum, least_concave_majorant, outer
from .quantum import (
    DensityMatrix,
    Observable,
    Povm,
    bell_basis,
    born_probs,
    eig_hermitian,
    partial_trace,
    projective_from_observable,
    rank_one_povm,
    spectrum,
)

__all__ = [
    "TOL_ANALYTIC",
    "TOL_OPTIMIZED",
    "Status",
    "Verdict",
    "ThresholdPoint",
    "SubsystemDisorder",
    "majorization_verdict",
    "theorem1_detect",
    "optimal_measurement",
    "product_measurement",
    "theorem2_detect",
    "theorem3_detect",
    "corollary_detect",
    "werner_bell_statistics",
    "werner_pauli_statistics",
    "tsallis_threshold",
    "werner_scan",
    "estimate_spectrum",
]

TOL_ANALYTIC = 1e-9
TOL_OPTIMIZED = 1e-4


class Status(enum.Enum):
    ENTANGLED = "Entangled"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True, eq=False)
class Verdict:
    """Detector outcome.

    For majorization detectors ``violated_index`` is the first (1-based)
    partial sum where the tested vector exceeds the bound by more than the
    tolerance, and ``margin`` is the largest such excess. Scalar detectors
    leave the index empty and put the gap in the scalar inequality in
    ``margin``.
    """

    status: Status
    violated_index: int | None
    margin: float
    detail: tuple

    @property
    def entangled(self) -> bool:
        return self.status is Status.ENTANGLED


@dataclass(frozen=True)
class ThresholdPoint:
    d: int
    measure: EntropyMeasure
    q_star: float
    method: str


@dataclass(frozen=True, eq=False)
class SubsystemDisorder:
    subsystem_spectra: dict
    lambda_inf: ProbVec


def _sums(v: ProbVec, n: int) -> np.ndarray:
    return np.cumsum(-np.sort(-v.padded(n)))


def majorization_verdict(lhs: ProbVec, bound: ProbVec, tol: float) -> Verdict:
    """ENTANGLED iff ``lhs`` is not majorized by ``bound`` beyond ``tol``."""
    n = max(len(lhs), len(bound))
    excess = _sums(lhs, n) - _sums(bound, n)
    margin = float(excess.max())
    hits = np.flatnonzero(excess > tol)
    if hits.size:
        return Verdict(Status.ENTANGLED, int(hits[0]) + 1, margin, (lhs, bound))
    return Verdict(Status.INCONCLUSIVE, None, margin, (lhs, bound))


def theorem1_detect(sigma: DensityMatrix, m: Povm, sep_bound: ProbVec, tol_detect: float = TOL_ANALYTIC) -> Verdict:
    """Outcome statistics of one measurement against its separable bound."""
    return majorization_verdict(born_probs(m, sigma), sep_bound, tol_detect)


def _bell_diagonal(sigma: DensityMatrix) -> list | None:
    dims = sigma.dims
    if len(dims) != 2 or dims[0] != dims[1]:
        return None
    basis = bell_basis(dims[0])
    u = np.column_stack([b.amplitudes for b in basis])
    rotated = u.conj().T @ sigma.matrix @ u
    off = rotated - np.diag(np.diag(rotated))
    if np.abs(off).max() > 1e-10:
        return None
    return basis


def optimal_measurement(sigma: DensityMatrix) -> Povm:
    """Rank-1 projective measurement onto an eigenbasis of ``sigma``.

    Degenerate two-qudit states that are diagonal in the generalized Bell
    basis (Werner states among them) get that basis; a fully degenerate
    spectrum gets the computational basis.
    """
    w, v = eig_hermitian(sigma.matrix)
    degenerate = np.any(np.abs(np.diff(w)) <= 1e-10)
    fully = np.ptp(w) <= 1e-10
    if degenerate and not fully:
        basis = _bell_diagonal(sigma)
        if basis is not None:
            return rank_one_povm(basis, label="bell")
    if fully:
        return rank_one_povm(list(np.eye(sigma.dim, dtype=complex)), label="computational")
    return rank_one_povm([v[:, k] for k in range(v.shape[1])], label="eigenbasis")


def product_measurement(obs_a: Observable, obs_b: Observable) -> Povm:
    """Projective measurement of ``obs_a (x) obs_b``, one element per product eigenvalue."""
    return projective_from_observable(Observable(np.kron(obs_a.matrix, obs_b.matrix)))


def theorem2_detect(
    sigma: DensityMatrix,
    local_pairs: Sequence,
    single_sys_bound: ProbVec,
    tol_detect: float = TOL_ANALYTIC,
) -> Verdict:
    """Joint statistics of product measurements against a single-system bound.

    ``local_pairs`` holds ``(Observable, Observable)`` pairs, or ready-made
    product ``Povm`` objects.
    """
    if len(sigma.dims) != 2:
        raise ValueError("theorem2_detect needs a bipartite state")
    vecs = [born_probs(_pair_povm(pair), sigma) for pair in local_pairs]
    return majorization_verdict(outer(*vecs), single_sys_bound, tol_detect)


def _pair_povm(pair) -> Povm:
    if isinstance(pair, Povm):
        return pair
    a, b = pair
    return product_measurement(a, b)


def theorem3_detect(rho: DensityMatrix, tol_detect: float = TOL_ANALYTIC):
    """Global spectrum against the infimum of all proper subsystem spectra."""
    f = len(rho.dims)
    if f < 2:
        raise ValueError("theorem3_detect needs at least two parties")
    spectra = {}
    for size in range(1, f):
        for keep in itertools.combinations(range(f), size):
            spectra[keep] = spectrum(partial_trace(rho, keep))
    lam = infimum(list(spectra.values()))
    verdict = majorization_verdict(spectrum(rho), lam, tol_detect)
    return verdict, SubsystemDisorder(spectra, lam)


# entries at or below this are rounding noise; orders below 1 blow such
# noise up (sqrt(1e-16) = 1e-8), so they are zeroed before evaluation
ROUNDING_FLOOR = 1e-14


def _denoise(v: ProbVec) -> ProbVec:
    p = v.entries
    if not np.any((p > 0) & (p <= ROUNDING_FLOOR)):
        return v
    return ProbVec(np.where(p <= ROUNDING_FLOOR, 0.0, p) / p[p > ROUNDING_FLOOR].sum())


def _max_entry(v: ProbVec) -> float:
    return float(v.entries.max())


def corollary_detect(
    measure: EntropyMeasure,
    lhs,
    rhs_bound: ProbVec,
    which: str,
    tol_detect: float = TOL_ANALYTIC,
) -> Verdict:
    """Scalar form of a majorization detector: entangled if G(lhs) < G(bound).

    ``which`` is ``"C1"`` (one outcome vector vs separable bound), ``"C2"``
    (a sequence of product-measurement vectors vs single-system bound, the
    left side being the sum of their values) or ``"C3"`` (global spectrum
    vs subsystem disorder). Tsallis order ``inf`` compares largest entries.
    Entries at or below ``ROUNDING_FLOOR`` count as zero.
    """
    which = which.upper()
    if which not in ("C1", "C2", "C3"):
        raise ValueError(f"unknown corollary {which!r}")
    if which == "C2":
        if isinstance(lhs, ProbVec) or len(lhs) < 2:
            raise ValueError("C2 takes a sequence of at least two outcome vectors")
        parts = [p if isinstance(p, ProbVec) else ProbVec(p) for p in lhs]
    else:
        if not isinstance(lhs, ProbVec):
            raise ValueError(f"{which} takes a single outcome vector")
        parts = [lhs]
    parts = [_denoise(p) for p in parts]
    rhs_bound = _denoise(rhs_bound)

    if measure.is_max_entry:
        joint_max = math.prod(_max_entry(p) for p in parts)
        margin = joint_max - _max_entry(rhs_bound)
    elif which == "C2" and measure.kind == "tsallis" and measure.order < 1:
        # sub-unit Tsallis is superadditive; only the joint value is safe
        margin = measure(rhs_bound) - measure(outer(*parts))
    else:
        margin = measure(rhs_bound) - sum(measure(p) for p in parts)
    status = Status.ENTANGLED if margin > tol_detect else Status.INCONCLUSIVE
    left = parts[0] if len(parts) == 1 else tuple(parts)
    return Verdict(status, None, float(margin), (left, rhs_bound))


# ---------------------------------------------------------------------------
# Werner family
# ---------------------------------------------------------------------------


def werner_bell_statistics(d: int, q: float) -> ProbVec:
    """Generalized-Bell outcome vector of the d x d Werner state (its spectrum)."""
    p = np.full(d * d, (1.0 - q) / d**2)
    p[0] = q + (1.0 - q) / d**2
    return ProbVec(p)


def werner_pauli_statistics(q: float) -> ProbVec:
    """Joint sigma_i (x) sigma_i statistics of the two-qubit Werner state, i = x, y, z."""
    plus, minus = (1 + q) / 2, (1 - q) / 2
    v = ProbVec([plus, minus])
    return outer(v, v, v)


def _tsallis_margin(d: int, measure: EntropyMeasure, q: float) -> float:
    """bound value minus Werner value; positive means detected."""
    return measure(ProbVec(np.full(d, 1.0 / d))) - measure(werner_bell_statistics(d, q))


def tsallis_threshold(d: int, r: float, tol: float = 1e-10) -> ThresholdPoint:
    """Smallest Werner mixing q detected by the Tsallis-r scalar detector."""
    if d < 2:
        raise ValueError("d must be at least 2")
    if not r >= 1:
        raise ValueError("Tsallis order must be at least 1")
    measure = EntropyMeasure("tsallis", r)
    if math.isinf(r):
        return ThresholdPoint(d, measure, 1.0 / (1.0 + d), "analytic")
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _tsallis_margin(d, measure, mid) > 0:
            hi = mid
        else:
            lo = mid
    return ThresholdPoint(d, measure, hi, "bisection")


def werner_scan(d_range: Sequence[int], orders: Sequence[float]) -> list[ThresholdPoint]:
    """Threshold grid ordered by (d, order)."""
    return [tsallis_threshold(int(d), float(r)) for d in d_range for r in orders]


# ---------------------------------------------------------------------------
# spectrum from measurements
# ---------------------------------------------------------------------------


def _random_unitaries(rng: np.random.Generator, count: int, n: int) -> np.ndarray:
    z = rng.normal(size=(count, n, n)) + 1j * rng.normal(size=(count, n, n))
    q, r = np.linalg.qr(z)
    ph = np.diagonal(r, axis1=1, axis2=2)
    return q * (ph / np.abs(ph))[:, None, :]


def estimate_spectrum(rho: DensityMatrix, cfg: OptimizerConfig = OptimizerConfig(), return_samples: bool = False):
    """Spectrum as the supremum of rank-1 projective measurement statistics.

    Each restart is a random orthonormal basis that is pushed uphill by
    orthogonal iteration (basis <- QR(rho basis)); every visited basis
    contributes its outcome vector to the running supremum.
    """
    n = rho.dim
    rng = np.random.default_rng([cfg.seed, n])
    bases = _random_unitaries(rng, cfg.restarts, n)
    best = np.zeros(n)
    samples = [] if return_samples else None
    m = rho.matrix
    for _ in range(cfg.max_iters):
        probs = np.real(np.einsum("rai,ab,rbi->ri", bases.conj(), m, bases))
        probs = np.clip(probs, 0.0, None)
        probs /= probs.sum(axis=1, keepdims=True)
        if samples is not None:
            samples.extend(ProbVec(p, tol=1e-9) for p in probs)
        sums = np.cumsum(-np.sort(-probs, axis=1), axis=1).max(axis=0)
        gain = float((sums - best).max())
        best = np.maximum(best, sums)
        # each column's Ritz residual drives the stopping test
        rb = np.einsum("ab,rbi->rai", m, bases)
        resid = np.linalg.norm(rb - bases * probs[:, None, :], axis=1).max()
        if resid <= cfg.tol_fp and gain <= 1e-15:
            break
        bases, r = np.linalg.qr(rb)
        ph = np.diagonal(r, axis1=1, axis2=2)
        ph = np.where(np.abs(ph) > 1e-300, ph / np.maximum(np.abs(ph), 1e-300), 1.0)
        bases = bases * ph[:, None, :]
    est = from_partial_sums(least_concave_majorant(best))
    if return_samples:
        return est, samples
    return est
