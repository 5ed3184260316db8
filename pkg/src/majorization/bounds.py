"""Majorization uncertainty bounds for sets of measurements.

The j-th cumulative entry of a bound is the largest total probability that
j distinct joint outcomes can carry, maximized over states. Maximization is
restricted to pure states (or pure product states for the separable bound)
and carried out by a multi-start fixed-point iteration: select the j
currently largest joint outcomes, build the operator whose expectation is
their gradient, move to its top eigenvector, repeat.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .probvec import ProbVec, from_partial_sums, least_concave_majorant, outer
from .quantum import (
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    DensityMatrix,
    Observable,
    Povm,
    PureState,
    born_probs,
    projective_from_observable,
    schmidt_coefficients,
)

__all__ = [
    "MeasurementSet",
    "OptimizerConfig",
    "BoundResult",
    "joint_probs",
    "mu_sup_component",
    "sup_all_states",
    "sup_separable",
    "max_product_overlap",
    "pauli_measurements",
    "pauli_bound_closed_form",
    "bell_separable_bound",
]

# step lengths tried, in order, when the full eigenvector step does not improve
_BACKTRACK = tuple(0.5**k for k in range(0, 12))
# an objective reaching this is treated as 1: every later component is 1 too
_SATURATED = 1.0 - 1e-13


@dataclass(frozen=True)
class MeasurementSet:
    povms: tuple

    def __post_init__(self):
        povms = tuple(self.povms)
        if not povms:
            raise ValueError("measurement set is empty")
        if len({m.dim for m in povms}) != 1:
            raise ValueError("measurements act on different dimensions")
        object.__setattr__(self, "povms", povms)

    @property
    def dim(self) -> int:
        return self.povms[0].dim

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(m) for m in self.povms)

    @property
    def n_outcomes(self) -> int:
        return math.prod(self.shape)


@dataclass(frozen=True)
class OptimizerConfig:
    """Iteration control for the bound optimizers.

    ``exhaustive_max_outcomes``: when the joint outcome count is at most
    this, every index set of each size is also optimized on its own, as a
    check on the greedy selection.
    """

    restarts: int = 64
    max_iters: int = 500
    tol_fp: float = 1e-10
    seed: int = 0
    exhaustive_max_outcomes: int = 12

    def __post_init__(self):
        if self.restarts < 1 or self.max_iters < 1 or not self.tol_fp > 0:
            raise ValueError("restarts, max_iters and tol_fp must be positive")


@dataclass(frozen=True, eq=False)
class BoundResult:
    """Computed bound with per-component diagnostics.

    ``mu[j-1]`` is the optimized maximum of the sum of j joint outcomes;
    ``bound`` holds the differences of its least concave majorant.
    ``residuals`` are stationarity residuals at the witnesses.
    """

    bound: ProbVec
    mu: np.ndarray
    witnesses: tuple
    converged: tuple
    residuals: np.ndarray


def _as_set(ms) -> MeasurementSet:
    if isinstance(ms, MeasurementSet):
        return ms
    if isinstance(ms, Povm):
        return MeasurementSet((ms,))
    return MeasurementSet(tuple(ms))


def joint_probs(ms, rho: DensityMatrix) -> ProbVec:
    """Outer product of the individual outcome vectors, first measurement slowest."""
    ms = _as_set(ms)
    return outer(*(born_probs(m, rho) for m in ms.povms))


# ---------------------------------------------------------------------------
# batched objective machinery; leading axis of every array runs over starts
# ---------------------------------------------------------------------------


class _Problem:
    def __init__(self, ms: MeasurementSet):
        self.stacks = [m.stacked() for m in ms.povms]
        self.shape = ms.shape
        self.m = len(self.stacks)
        self.n = ms.n_outcomes

    def probs(self, psi: np.ndarray) -> list[np.ndarray]:
        return [np.real(np.einsum("ra,kab,rb->rk", psi.conj(), e, psi)) for e in self.stacks]

    def joint(self, plist: list[np.ndarray]) -> np.ndarray:
        r = plist[0].shape[0]
        j = np.ones((r,) + (1,) * self.m)
        for k, p in enumerate(plist):
            shape = [r] + [1] * self.m
            shape[k + 1] = self.shape[k]
            j = j * p.reshape(shape)
        return j.reshape(r, self.n)

    def top_mask(self, joint: np.ndarray, i: int) -> np.ndarray:
        order = np.argsort(-joint, axis=1, kind="stable")[:, :i]
        mask = np.zeros(joint.shape, dtype=bool)
        np.put_along_axis(mask, order, True, axis=1)
        return mask

    def value(self, psi: np.ndarray, i: int, fixed: np.ndarray | None) -> np.ndarray:
        joint = self.joint(self.probs(psi))
        if fixed is not None:
            return (joint * fixed).sum(axis=1)
        return -np.sort(-joint, axis=1)[:, :i].sum(axis=1)

    def operator(self, psi: np.ndarray, i: int, fixed: np.ndarray | None):
        """Gradient operator of the selected outcomes, and the objective."""
        plist = self.probs(psi)
        joint = self.joint(plist)
        mask = fixed if fixed is not None else self.top_mask(joint, i)
        r = psi.shape[0]
        tmask = mask.reshape((r,) + self.shape)
        op = np.zeros((r, psi.shape[1], psi.shape[1]), dtype=complex)
        for k in range(self.m):
            others = np.ones((r,) + (1,) * self.m)
            for l, p in enumerate(plist):
                if l == k:
                    continue
                shape = [r] + [1] * self.m
                shape[l + 1] = self.shape[l]
                others = others * p.reshape(shape)
            axes = tuple(a + 1 for a in range(self.m) if a != k)
            w = (tmask * others).sum(axis=axes)
            op += np.einsum("ra,aij->rij", w, self.stacks[k])
        return op, (joint * mask).sum(axis=1)


def _normalize(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def _stationarity(op: np.ndarray, v: np.ndarray) -> np.ndarray:
    ov = np.einsum("rij,rj->ri", op, v)
    lam = np.real(np.einsum("ri,ri->r", v.conj(), ov))
    return np.linalg.norm(ov - lam[:, None] * v, axis=1)


def _top_eigvec(op: np.ndarray, current: np.ndarray) -> np.ndarray:
    _, vecs = np.linalg.eigh(op)
    cand = vecs[:, :, -1]
    overlap = np.einsum("ri,ri->r", cand.conj(), current)
    phase = np.where(np.abs(overlap) > 1e-300, overlap / np.maximum(np.abs(overlap), 1e-300), 1.0)
    return cand * phase[:, None]


def _line_search(value_fn, current: np.ndarray, target: np.ndarray, f0: np.ndarray):
    """Move toward ``target``, halving the step until the objective does not drop."""
    new = current.copy()
    fnew = f0.copy()
    moved = np.zeros(current.shape[0], dtype=bool)
    for t in _BACKTRACK:
        todo = ~moved
        if not todo.any():
            break
        trial = _normalize((1.0 - t) * current[todo] + t * target[todo])
        ft = value_fn(trial, todo)
        ok = ft >= f0[todo] - 1e-15
        idx = np.flatnonzero(todo)[ok]
        new[idx] = trial[ok]
        fnew[idx] = ft[ok]
        moved[idx] = True
    return new, fnew, moved


def _ascend_pure(prob: _Problem, psi: np.ndarray, i: int, cfg: OptimizerConfig, fixed=None):
    """Fixed-point ascent over pure states for every start in ``psi``."""
    active = np.ones(psi.shape[0], dtype=bool)

    def value_fn(x, rows):
        return prob.value(x, i, None if fixed is None else fixed[rows])

    for _ in range(cfg.max_iters):
        rows = np.flatnonzero(active)
        if rows.size == 0:
            break
        sub = psi[rows]
        op, f = prob.operator(sub, i, None if fixed is None else fixed[rows])
        res = _stationarity(op, sub)
        target = _top_eigvec(op, sub)
        new, fnew, moved = _line_search(lambda x, m: value_fn(x, rows[m]), sub, target, f)
        psi[rows] = new
        stalled = (res <= cfg.tol_fp) | ~moved
        active[rows[stalled]] = False
    op, f = prob.operator(psi, i, fixed)
    return psi, f, _stationarity(op, psi)


def _kron_rows(phis: Sequence[np.ndarray]) -> np.ndarray:
    out = phis[0]
    for p in phis[1:]:
        out = np.einsum("ra,rb->rab", out, p).reshape(out.shape[0], -1)
    return out


def _party_operator(op: np.ndarray, phis: Sequence[np.ndarray], dims: Sequence[int], a: int) -> np.ndarray:
    """Contract ``op`` with every party's vector except party ``a``."""
    f = len(dims)
    r = op.shape[0]
    rows = "abcdefgh"[:f]
    cols = "ABCDEFGH"[:f]
    t = op.reshape((r,) + tuple(dims) * 2)
    operands = [t]
    subs = ["z" + rows + cols]
    for b in range(f):
        if b == a:
            continue
        operands += [phis[b].conj(), phis[b]]
        subs += ["z" + rows[b], "z" + cols[b]]
    spec = ",".join(subs) + "->z" + rows[a] + cols[a]
    return np.einsum(spec, *operands, optimize=True)


def _ascend_product(prob: _Problem, phis: list, dims: Sequence[int], i: int, cfg: OptimizerConfig, fixed=None):
    """Alternating top-eigenvector updates, one party at a time."""
    n_starts = phis[0].shape[0]
    active = np.ones(n_starts, dtype=bool)

    def party_residuals(sel):
        ps = [p[sel] for p in phis]
        op, _ = prob.operator(_kron_rows(ps), i, None if fixed is None else fixed[sel])
        out = np.zeros(len(sel))
        for a in range(len(dims)):
            out = np.maximum(out, _stationarity(_party_operator(op, ps, dims, a), ps[a]))
        return out

    for _ in range(cfg.max_iters):
        rows = np.flatnonzero(active)
        if rows.size == 0:
            break
        f_start = prob.value(_kron_rows([p[rows] for p in phis]), i, None if fixed is None else fixed[rows])
        any_moved = np.zeros(rows.size, dtype=bool)
        for a in range(len(dims)):
            ps = [p[rows] for p in phis]
            op, f = prob.operator(_kron_rows(ps), i, None if fixed is None else fixed[rows])
            eff = _party_operator(op, ps, dims, a)
            target = _top_eigvec(eff, ps[a])

            def value_fn(x, m, a=a, ps=ps):
                trial = list(p[m] for p in ps)
                trial[a] = x
                return prob.value(_kron_rows(trial), i, None if fixed is None else fixed[rows[m]])

            new, _, moved = _line_search(value_fn, ps[a], target, f)
            phis[a][rows] = new
            any_moved |= moved
        f_end = prob.value(_kron_rows([p[rows] for p in phis]), i, None if fixed is None else fixed[rows])
        res = party_residuals(rows)
        stalled = (res <= cfg.tol_fp) | ~any_moved
        active[rows[stalled]] = False
    all_rows = np.arange(n_starts)
    f = prob.value(_kron_rows(phis), i, fixed)
    return phis, f, party_residuals(all_rows)


def _haar_rows(rng: np.random.Generator, count: int, d: int) -> np.ndarray:
    z = rng.normal(size=(count, d)) + 1j * rng.normal(size=(count, d))
    return _normalize(z)


def _best(f: np.ndarray) -> int:
    # argmax returns the lowest index among ties
    return int(np.argmax(f))


def _component(ms: MeasurementSet, i: int, cfg: OptimizerConfig, dims=None, warm=None):
    """Optimize one cumulative entry; returns (value, witness vector(s), residual)."""
    prob = _Problem(ms)
    rng = np.random.default_rng([cfg.seed, i])
    product = dims is not None
    if not product:
        starts = _haar_rows(rng, cfg.restarts, ms.dim)
        if warm is not None:
            starts = np.vstack([starts, warm[None, :]])
        psi, f, res = _ascend_pure(prob, starts, i, cfg)
        k = _best(f)
        best = (float(f[k]), psi[k].copy(), float(res[k]))
    else:
        phis = [_haar_rows(rng, cfg.restarts, d) for d in dims]
        if warm is not None:
            phis = [np.vstack([p, w[None, :]]) for p, w in zip(phis, warm)]
        phis, f, res = _ascend_product(prob, phis, dims, i, cfg)
        k = _best(f)
        best = (float(f[k]), [p[k].copy() for p in phis], float(res[k]))

    if ms.n_outcomes <= cfg.exhaustive_max_outcomes and 1 < i < ms.n_outcomes:
        best = _exhaustive(prob, ms, i, cfg, dims, best)
    return best


def _exhaustive(prob: _Problem, ms: MeasurementSet, i: int, cfg: OptimizerConfig, dims, best):
    """Optimize each i-subset of joint outcomes separately; keep any improvement."""
    sets = list(itertools.combinations(range(ms.n_outcomes), i))
    per_set = 2
    masks = np.zeros((len(sets) * per_set, ms.n_outcomes), dtype=bool)
    for s, idx in enumerate(sets):
        masks[s * per_set : (s + 1) * per_set, list(idx)] = True
    rng = np.random.default_rng([cfg.seed, i, 1])
    quick = OptimizerConfig(1, max(50, cfg.max_iters // 5), cfg.tol_fp, cfg.seed, 0)
    if dims is None:
        starts = _haar_rows(rng, masks.shape[0], ms.dim)
        starts[::per_set] = best[1]
        psi, _, _ = _ascend_pure(prob, starts, i, quick, fixed=masks)
        # finish the most promising start with free selection
        f = prob.value(psi, i, None)
        k = _best(f)
        if f[k] > best[0]:
            psi_k, fk, rk = _ascend_pure(prob, psi[k : k + 1].copy(), i, cfg)
            if fk[0] > best[0]:
                return float(fk[0]), psi_k[0].copy(), float(rk[0])
        return best
    phis = [_haar_rows(rng, masks.shape[0], d) for d in dims]
    for p, w in zip(phis, best[1]):
        p[::per_set] = w
    phis, _, _ = _ascend_product(prob, phis, dims, i, quick, fixed=masks)
    f = prob.value(_kron_rows(phis), i, None)
    k = _best(f)
    if f[k] > best[0]:
        sub = [p[k : k + 1].copy() for p in phis]
        sub, fk, rk = _ascend_product(prob, sub, dims, i, cfg)
        if fk[0] > best[0]:
            return float(fk[0]), [p[0].copy() for p in sub], float(rk[0])
    return best


def mu_sup_component(ms, i: int, cfg: OptimizerConfig = OptimizerConfig()):
    """Largest total probability of ``i`` distinct joint outcomes over pure states.

    Returns ``(value, witness)``.
    """
    ms = _as_set(ms)
    if not 1 <= i <= ms.n_outcomes:
        raise ValueError(f"component index must lie in 1..{ms.n_outcomes}")
    value, vec, _ = _component(ms, i, cfg)
    return value, PureState(_normalize(vec))


def _assemble(ms: MeasurementSet, cfg: OptimizerConfig, dims=None, first=None) -> BoundResult:
    n = ms.n_outcomes
    mu = np.zeros(n)
    res = np.zeros(n)
    witnesses: list = []
    converged: list[bool] = []
    warm = None
    for i in range(1, n + 1):
        if i > 1 and mu[i - 2] >= _SATURATED:
            mu[i - 1] = 1.0
            res[i - 1] = res[i - 2]
            witnesses.append(witnesses[-1])
            converged.append(converged[-1])
            continue
        if i == 1 and first is not None:
            value, vec, r = first
        else:
            value, vec, r = _component(ms, i, cfg, dims, warm)
        warm = vec
        mu[i - 1] = max(value, mu[i - 2] if i > 1 else 0.0)
        res[i - 1] = r
        converged.append(bool(r <= cfg.tol_fp))
        if dims is None:
            witnesses.append(PureState(_normalize(vec)))
        else:
            witnesses.append(tuple(PureState(_normalize(p)) for p in vec))
    mu = np.minimum(mu, 1.0)
    bound = from_partial_sums(least_concave_majorant(mu))
    return BoundResult(bound, mu, tuple(witnesses), tuple(converged), res)


def sup_all_states(ms, cfg: OptimizerConfig = OptimizerConfig()) -> BoundResult:
    """Uncertainty bound of a measurement set over all states."""
    return _assemble(_as_set(ms), cfg)


def max_product_overlap(psi, dims) -> float:
    """Largest |<a, b|psi>|^2 over product vectors: the top squared Schmidt coefficient."""
    dims = tuple(dims)
    if len(dims) != 2:
        raise ValueError("max_product_overlap needs a bipartite state")
    s = schmidt_coefficients(psi, dims[0], dims[1])
    return float(s[0] ** 2)


def _rank_one_first(ms: MeasurementSet, dims):
    """Exact first component for one rank-1 measurement on two parties."""
    if len(ms.povms) != 1 or len(dims) != 2 or not ms.povms[0].is_rank_one():
        return None
    best = None
    for e in ms.povms[0].elements:
        w, v = np.linalg.eigh(e)
        weight, vec = float(w[-1]), v[:, -1]
        u, s, vh = np.linalg.svd(vec.reshape(dims[0], dims[1]))
        value = weight * float(s[0] ** 2)
        if best is None or value > best[0] + 1e-15:
            best = (value, [u[:, 0].copy(), vh[0].conj().copy()], 0.0)
    return best


def sup_separable(ms, dims: Sequence[int], cfg: OptimizerConfig = OptimizerConfig()) -> BoundResult:
    """Uncertainty bound of a measurement set over separable states."""
    ms = _as_set(ms)
    dims = tuple(int(d) for d in dims)
    if math.prod(dims) != ms.dim:
        raise ValueError(f"party dimensions {dims} do not match {ms.dim}")
    if len(dims) > 8:
        raise ValueError("at most 8 parties are supported")
    return _assemble(ms, cfg, dims, first=_rank_one_first(ms, dims))


# ---------------------------------------------------------------------------
# closed forms used as references
# ---------------------------------------------------------------------------


def pauli_measurements() -> MeasurementSet:
    """The three mutually unbiased qubit measurements (sigma_x, sigma_y, sigma_z)."""
    return MeasurementSet(
        tuple(projective_from_observable(Observable(p), label=name) for p, name in ((PAULI_X, "x"), (PAULI_Y, "y"), (PAULI_Z, "z")))
    )


def pauli_bound_closed_form() -> ProbVec:
    """Bound of the three qubit Pauli measurements over all states."""
    a = (1 + 1 / math.sqrt(3)) ** 3
    b = (1 + 1 / math.sqrt(2)) ** 2
    return ProbVec(np.array([a, 2 * b - a, 4 - b, 4 - b, 0, 0, 0, 0]) / 8)


def bell_separable_bound(d: int) -> ProbVec:
    """Separable bound of the generalized Bell measurement on d x d."""
    p = np.zeros(d * d)
    p[:d] = 1.0 / d
    return ProbVec(p)
