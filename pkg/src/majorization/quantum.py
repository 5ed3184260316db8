"""Finite-dimensional states and measurements.

Operators are plain complex ``numpy`` arrays. Composite systems use the
big-endian convention: party 0 (A) is the slowest tensor index, so
``np.kron(a, b)`` is "a on A, b on B".
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .probvec import ProbVec

__all__ = [
    "HERM_TOL",
    "DensityMatrix",
    "PureState",
    "Povm",
    "Observable",
    "PAULI_X",
    "PAULI_Y",
    "PAULI_Z",
    "eig_hermitian",
    "spectrum",
    "tensor",
    "partial_trace",
    "born_probs",
    "projective_from_observable",
    "rank_one_povm",
    "computational_povm",
    "bell_basis",
    "schmidt_coefficients",
    "werner",
    "haar_pure",
    "random_density",
    "random_separable",
    "state_to_json",
    "state_from_json",
    "save_state",
    "load_state",
]

HERM_TOL = 1e-10
# fixed-coordinate Gram-Schmidt keeps a projected basis vector above this norm
_GS_KEEP = 1e-3

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def _is_hermitian(m: np.ndarray, tol: float = HERM_TOL) -> bool:
    return m.ndim == 2 and m.shape[0] == m.shape[1] and float(np.max(np.abs(m - m.conj().T), initial=0.0)) < tol


# ---------------------------------------------------------------------------
# Eigensolver
# ---------------------------------------------------------------------------


def _jacobi_sweeps(a: np.ndarray, max_sweeps: int = 60):
    """Cyclic complex Jacobi; returns (diagonal, accumulated unitary)."""
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(float(np.abs(a).max(initial=0.0)), 1e-300)
    offdiag = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        if np.abs(a[offdiag]).max(initial=0.0) <= 1e-17 * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= 1e-18 * scale:
                    continue
                phase = apq / mag
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # J = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                j00, j01 = c, s
                j10, j11 = -s * phase.conjugate(), c * phase.conjugate()
                cp, cq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = cp * j00 + cq * j10
                a[:, q] = cp * j01 + cq * j11
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = np.conj(j00) * rp + np.conj(j10) * rq
                a[q, :] = np.conj(j01) * rp + np.conj(j11) * rq
                a[p, q] = a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = vp * j00 + vq * j10
                v[:, q] = vp * j01 + vq * j11
    return np.real(np.diag(a)).copy(), v


def _canonical_basis(vg: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of span(vg) via projected unit vectors."""
    n, k = vg.shape
    basis: list[np.ndarray] = []
    for j in range(n):
        if len(basis) == k:
            break
        cand = vg @ vg[j, :].conj()
        for _ in range(2):
            for b in basis:
                cand = cand - b * np.vdot(b, cand)
        norm = np.linalg.norm(cand)
        if norm > _GS_KEEP:
            basis.append(cand / norm)
    return np.column_stack(basis)


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    j = int(np.argmax(np.abs(vec)))
    return vec * (abs(vec[j]) / vec[j])


def eig_hermitian(m, deg_tol: float = 1e-12):
    """Eigen-decomposition of a Hermitian matrix.

    Returns ``(values, vectors)`` with values sorted in nonincreasing order
    and ``vectors[:, i]`` the matching unit eigenvector. Eigenvalues closer
    than ``deg_tol`` (relative to the largest magnitude) are treated as one
    degenerate subspace, whose basis is rebuilt by Gram-Schmidt on the
    projected coordinate vectors so that it does not depend on the rotation
    history of the solver.
    """
    m = np.asarray(m, dtype=complex)
    if not _is_hermitian(m):
        raise ValueError("matrix is not Hermitian")
    a = (m + m.conj().T) / 2
    w, v = _jacobi_sweeps(a.copy())
    order = np.argsort(-w, kind="stable")
    w, v = w[order], v[:, order]
    tol = deg_tol * max(1.0, float(np.abs(w).max(initial=0.0)))
    out = np.empty_like(v)
    start = 0
    n = w.size
    while start < n:
        stop = start + 1
        while stop < n and w[stop - 1] - w[stop] <= tol:
            stop += 1
        if stop - start == 1:
            out[:, start] = _fix_phase(v[:, start])
        else:
            out[:, start:stop] = _canonical_basis(v[:, start:stop])
        start = stop
    return w, out


# ---------------------------------------------------------------------------
# States
# ---------------------------------------------------------------------------


def _check_dims(dims, dim: int) -> tuple[int, ...]:
    dims = (dim,) if dims is None else tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise ValueError("dims must be a nonempty list of positive integers")
    if math.prod(dims) != dim:
        raise ValueError(f"dims {dims} do not multiply to {dim}")
    return dims


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, positive, unit-trace operator with subsystem dimensions."""

    matrix: np.ndarray
    dims: tuple[int, ...] = None

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("density matrix must be square")
        if not _is_hermitian(m):
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > HERM_TOL:
            raise ValueError(f"trace is {np.trace(m).real!r}, not 1")
        lo = np.linalg.eigvalsh(m).min()
        if lo < -HERM_TOL:
            raise ValueError(f"density matrix has negative eigenvalue {lo:.3g}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", _check_dims(self.dims, m.shape[0]))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_pure(cls, psi: "PureState") -> "DensityMatrix":
        return cls(np.outer(psi.amplitudes, psi.amplitudes.conj()), psi.dims)


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit vector with subsystem dimensions."""

    amplitudes: np.ndarray
    dims: tuple[int, ...] = None

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=complex).ravel()
        if abs(np.linalg.norm(a) - 1.0) > 1e-12:
            raise ValueError("state vector is not normalized")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)
        object.__setattr__(self, "dims", _check_dims(self.dims, a.size))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @classmethod
    def basis(cls, index: int, dims: Sequence[int]) -> "PureState":
        a = np.zeros(math.prod(dims), dtype=complex)
        a[index] = 1.0
        return cls(a, tuple(dims))

    def density(self) -> DensityMatrix:
        return DensityMatrix.from_pure(self)


# ---------------------------------------------------------------------------
# Measurements
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Povm:
    """Positive operators summing to the identity."""

    elements: tuple
    label: str = ""

    def __post_init__(self):
        els = [np.array(e, dtype=complex) for e in self.elements]
        if not els:
            raise ValueError("a measurement needs at least one element")
        dim = els[0].shape[0]
        total = np.zeros((dim, dim), dtype=complex)
        for e in els:
            if e.shape != (dim, dim):
                raise ValueError("measurement elements must share one square shape")
            if not _is_hermitian(e):
                raise ValueError("measurement element is not Hermitian")
            if np.linalg.eigvalsh(e).min() < -HERM_TOL:
                raise ValueError("measurement element is not positive")
            e.setflags(write=False)
            total += e
        if np.abs(total - np.eye(dim)).max() > HERM_TOL:
            raise ValueError("measurement elements do not sum to the identity")
        object.__setattr__(self, "elements", tuple(els))

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def __len__(self) -> int:
        return len(self.elements)

    def stacked(self) -> np.ndarray:
        return np.stack(self.elements)

    def is_rank_one(self, tol: float = 1e-9) -> bool:
        for e in self.elements:
            w = np.linalg.eigvalsh(e)
            if np.sum(w > tol) > 1:
                return False
        return True


@dataclass(frozen=True, eq=False)
class Observable:
    """Hermitian operator together with a grouping of its eigenvalues.

    ``bins`` is a sequence of eigenvalue groups. ``None`` means one bin per
    distinct eigenvalue (a maximal measurement).
    """

    matrix: np.ndarray
    bins: tuple = None

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if not _is_hermitian(m):
            raise ValueError("observable is not Hermitian")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        if self.bins is not None:
            object.__setattr__(self, "bins", tuple(tuple(float(x) for x in b) for b in self.bins))


def projective_from_observable(obs: Observable, tol: float = 1e-9, label: str = "") -> Povm:
    """One projector per bin of the observable's spectrum."""
    w, v = eig_hermitian(obs.matrix)
    distinct: list[float] = []
    for x in w:
        if not distinct or abs(distinct[-1] - x) > tol:
            distinct.append(float(x))
    bins = obs.bins if obs.bins is not None else tuple((x,) for x in distinct)
    owner = np.full(w.size, -1)
    for b, values in enumerate(bins):
        for x in values:
            hit = np.abs(w - x) <= tol
            if not hit.any():
                raise ValueError(f"bin value {x} is not an eigenvalue")
            if np.any(owner[hit] >= 0) and np.any(owner[hit] != b):
                raise ValueError("bins overlap")
            owner[hit] = b
    if np.any(owner < 0):
        raise ValueError("bins do not cover the spectrum")
    elements = []
    for b in range(len(bins)):
        cols = v[:, owner == b]
        elements.append(cols @ cols.conj().T)
    return Povm(tuple(elements), label)


def rank_one_povm(vectors: Sequence, label: str = "") -> Povm:
    """Projective measurement onto an orthonormal list of vectors."""
    vecs = [v.amplitudes if isinstance(v, PureState) else np.asarray(v, dtype=complex) for v in vectors]
    return Povm(tuple(np.outer(v, v.conj()) for v in vecs), label)


def computational_povm(dim: int) -> Povm:
    return rank_one_povm(list(np.eye(dim, dtype=complex)), label="computational")


def born_probs(m: Povm, rho: DensityMatrix) -> ProbVec:
    if m.dim != rho.dim:
        raise ValueError(f"measurement acts on dimension {m.dim}, state has {rho.dim}")
    p = np.real(np.einsum("kij,ji->k", m.stacked(), rho.matrix))
    return ProbVec(p, tol=1e-9)


# ---------------------------------------------------------------------------
# Composite systems
# ---------------------------------------------------------------------------


def tensor(a, b):
    """Kronecker product of two states or two plain matrices."""
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        return DensityMatrix(np.kron(a.matrix, b.matrix), a.dims + b.dims)
    if isinstance(a, PureState) and isinstance(b, PureState):
        return PureState(np.kron(a.amplitudes, b.amplitudes), a.dims + b.dims)
    if isinstance(a, (DensityMatrix, PureState)) or isinstance(b, (DensityMatrix, PureState)):
        raise TypeError("tensor needs two operands of the same kind")
    return np.kron(np.asarray(a), np.asarray(b))


def _trace_out(m: np.ndarray, dims: Sequence[int], drop: Sequence[int]) -> np.ndarray:
    t = m.reshape(tuple(dims) * 2)
    # trace highest axes first so lower axis numbers stay valid
    for k in sorted(drop, reverse=True):
        t = np.trace(t, axis1=k, axis2=k + t.ndim // 2)
    keep = [d for i, d in enumerate(dims) if i not in set(drop)]
    size = math.prod(keep)
    return t.reshape(size, size)


def partial_trace(rho: DensityMatrix, keep: Sequence[int]) -> DensityMatrix:
    """Reduced state on the parties listed in ``keep``."""
    keep = sorted(set(int(k) for k in keep))
    f = len(rho.dims)
    if not keep or len(keep) == f or keep[0] < 0 or keep[-1] >= f:
        raise ValueError("keep must be a nonempty proper subset of the parties")
    drop = [i for i in range(f) if i not in keep]
    red = _trace_out(rho.matrix, rho.dims, drop)
    red = (red + red.conj().T) / 2
    return DensityMatrix(red, tuple(rho.dims[i] for i in keep))


def spectrum(rho: DensityMatrix) -> ProbVec:
    """Eigenvalues of a density matrix, nonincreasing."""
    w, _ = eig_hermitian(rho.matrix)
    return ProbVec(w, tol=1e-9)


def schmidt_coefficients(psi, d_a: int, d_b: int) -> np.ndarray:
    amps = psi.amplitudes if isinstance(psi, PureState) else np.asarray(psi, dtype=complex)
    if d_a * d_b != amps.size:
        raise ValueError(f"{d_a} x {d_b} does not match state dimension {amps.size}")
    s = np.linalg.svd(amps.reshape(d_a, d_b), compute_uv=False)
    return np.sort(s)[::-1]


def bell_basis(d: int) -> list[PureState]:
    """Generalized Bell basis of two d-level parties.

    Element ``m * d + n`` is ``sum_j exp(2 pi i j n / d) |j>|j + m mod d>``
    divided by sqrt(d); element 0 is the symmetric state sum_j |jj>.
    """
    if d < 2:
        raise ValueError("d must be at least 2")
    states = []
    for m in range(d):
        for n in range(d):
            a = np.zeros(d * d, dtype=complex)
            for j in range(d):
                a[j * d + (j + m) % d] = np.exp(2j * np.pi * j * n / d)
            states.append(PureState(a / np.sqrt(d), (d, d)))
    return states


def werner(d: int, q: float) -> DensityMatrix:
    """(1 - q) I / d^2 + q |B1><B1| on two d-level parties."""
    if d < 2:
        raise ValueError("d must be at least 2")
    if not 0.0 <= q <= 1.0:
        raise ValueError("q must lie in [0, 1]")
    b1 = bell_basis(d)[0].amplitudes
    m = (1.0 - q) / d**2 * np.eye(d * d) + q * np.outer(b1, b1.conj())
    return DensityMatrix(m, (d, d))


# ---------------------------------------------------------------------------
# Random states
# ---------------------------------------------------------------------------


def haar_pure(dims, rng: np.random.Generator) -> PureState:
    dims = tuple(dims) if isinstance(dims, (tuple, list)) else (int(dims),)
    n = math.prod(dims)
    a = rng.normal(size=n) + 1j * rng.normal(size=n)
    return PureState(a / np.linalg.norm(a), dims)


def random_density(dims, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    """Induced-measure mixed state: G G^dagger / tr, G of shape n x rank."""
    dims = tuple(dims) if isinstance(dims, (tuple, list)) else (int(dims),)
    n = math.prod(dims)
    k = n if rank is None else rank
    g = rng.normal(size=(n, k)) + 1j * rng.normal(size=(n, k))
    m = g @ g.conj().T
    m = (m + m.conj().T) / 2
    return DensityMatrix(m / np.trace(m).real, dims)


def random_separable(dims, rng: np.random.Generator, terms: int | None = None) -> DensityMatrix:
    """Random mixture of up to ten random pure product states."""
    dims = tuple(dims)
    k = int(rng.integers(1, 11)) if terms is None else terms
    weights = rng.dirichlet(np.ones(k))
    n = math.prod(dims)
    m = np.zeros((n, n), dtype=complex)
    for w in weights:
        vec = np.array([1.0 + 0j])
        for d in dims:
            vec = np.kron(vec, haar_pure((d,), rng).amplitudes)
        m += w * np.outer(vec, vec.conj())
    m = (m + m.conj().T) / 2
    return DensityMatrix(m / np.trace(m).real, dims)


# ---------------------------------------------------------------------------
# State files
# ---------------------------------------------------------------------------

# eigenvalues above this are treated as rounding noise and left untouched
_CLAMP_NOISE = 1e-12


def state_to_json(rho: DensityMatrix) -> str:
    doc = {
        "dims": list(rho.dims),
        "matrix_re": rho.matrix.real.tolist(),
        "matrix_im": rho.matrix.imag.tolist(),
    }
    return json.dumps(doc)


def state_from_json(text: str) -> DensityMatrix:
    """Parse and validate a state document.

    Small negative eigenvalues (down to -1e-10) are clamped to zero and the
    matrix renormalized; rounding-level ones are kept as they are so that a
    saved state loads back bit for bit.
    """
    doc = json.loads(text)
    if not isinstance(doc, dict):
        raise ValueError("state file must hold a JSON object")
    try:
        dims = [int(d) for d in doc["dims"]]
        re = np.array(doc["matrix_re"], dtype=float)
        im = np.array(doc.get("matrix_im", np.zeros_like(re)), dtype=float)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed state document: {exc}") from exc
    if re.ndim != 2 or re.shape != im.shape:
        raise ValueError("matrix_re and matrix_im must be equally shaped 2-D arrays")
    m = re + 1j * im
    if _is_hermitian(m):
        w, v = np.linalg.eigh((m + m.conj().T) / 2)
        if -HERM_TOL <= w.min() < -_CLAMP_NOISE:
            w = np.clip(w, 0.0, None)
            m = (v * w) @ v.conj().T
            m = m / np.trace(m).real
    return DensityMatrix(m, tuple(dims))


def save_state(rho: DensityMatrix, path) -> None:
    with open(path, "w") as fh:
        fh.write(state_to_json(rho))
        fh.write("\n")


def load_state(path) -> DensityMatrix:
    with open(path) as fh:
        return state_from_json(fh.read())
