"""Schur-concave disorder measures on probability vectors (natural log)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .probvec import ProbVec

__all__ = [
    "EntropyMeasure",
    "SHANNON",
    "shannon",
    "tsallis",
    "renyi",
    "parse_measure",
    "evaluate",
]

# above this order, 1 - sum(p**r) loses digits without exact summation
_FSUM_ORDER = 20.0


def _entries(p) -> np.ndarray:
    return p.entries if isinstance(p, ProbVec) else np.asarray(p, dtype=float)


def _power_sum(p: np.ndarray, r: float) -> float:
    nz = p[p > 0]
    terms = nz**r
    if r > _FSUM_ORDER:
        return math.fsum(terms.tolist())
    return float(terms.sum())


def shannon(p) -> float:
    p = _entries(p)
    nz = p[p > 0]
    return float(max(-(nz * np.log(nz)).sum(), 0.0))


def tsallis(p, r: float) -> float:
    if r <= 0:
        raise ValueError("Tsallis order must be positive")
    if math.isinf(r):
        raise ValueError("Tsallis entropy is not evaluated at infinite order; compare largest entries")
    if r == 1:
        return shannon(p)
    p = _entries(p)
    return float(max((1.0 - _power_sum(p, r)) / (r - 1.0), 0.0))


def renyi(p, r: float) -> float:
    if r <= 0 or math.isinf(r):
        raise ValueError("Renyi order must be positive and finite")
    if r == 1:
        return shannon(p)
    p = _entries(p)
    return float(max(math.log(_power_sum(p, r)) / (1.0 - r), 0.0))


@dataclass(frozen=True)
class EntropyMeasure:
    """A named member of the Shannon/Tsallis/Renyi families.

    ``kind`` is one of ``"shannon"``, ``"tsallis"`` or ``"renyi"``. Order 1
    of either parametrized family is folded into Shannon at construction.
    Tsallis order ``inf`` is a marker: it has no value, and detectors
    replace it with a comparison of largest entries.
    """

    kind: str
    order: float = 1.0

    def __post_init__(self):
        kind = self.kind.lower()
        if kind not in ("shannon", "tsallis", "renyi"):
            raise ValueError(f"unknown entropy kind {self.kind!r}")
        order = float(self.order)
        if kind != "shannon":
            if not order > 0:
                raise ValueError("entropy order must be positive")
            if kind == "renyi" and math.isinf(order):
                raise ValueError("Renyi order must be finite")
            if order == 1.0:
                kind = "shannon"
        if kind == "shannon":
            order = 1.0
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "order", order)

    @property
    def is_max_entry(self) -> bool:
        return self.kind == "tsallis" and math.isinf(self.order)

    @property
    def is_additive(self) -> bool:
        """Additive on outer products (Shannon and Renyi)."""
        return self.kind in ("shannon", "renyi")

    @property
    def is_trace_type(self) -> bool:
        return self.kind in ("shannon", "tsallis")

    def __call__(self, p) -> float:
        if self.kind == "shannon":
            return shannon(p)
        if self.kind == "tsallis":
            return tsallis(p, self.order)
        return renyi(p, self.order)

    def __str__(self) -> str:
        if self.kind == "shannon":
            return "shannon"
        r = "inf" if math.isinf(self.order) else f"{self.order:g}"
        return f"{self.kind}:{r}"


SHANNON = EntropyMeasure("shannon")


def evaluate(measure: EntropyMeasure, p) -> float:
    return measure(p)


def parse_measure(text: str) -> EntropyMeasure:
    """Parse ``shannon``, ``tsallis:<r>``, ``renyi:<r>`` or ``tsallis:inf``."""
    kind, _, order = text.strip().lower().partition(":")
    if kind == "shannon":
        if order:
            raise ValueError("shannon takes no order")
        return SHANNON
    if not order:
        raise ValueError(f"{kind!r} needs an order, e.g. {kind}:2")
    r = math.inf if order in ("inf", "infinity") else float(order)
    return EntropyMeasure(kind, r)
