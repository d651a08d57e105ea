"""Finite distributions and the information measures used by the exponents.

All logarithms are base 2. Conventions: ``0 log 0 = 0`` and ``0**alpha = 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Hashable, Sequence

import numpy as np

if TYPE_CHECKING:
    from .channel import Dmc

SUM_TOL = 1e-12


class AlphabetMismatch(ValueError):
    """Two objects that must share an alphabet do not."""


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Pmf:
    """Probability mass function over a labeled finite alphabet.

    Construction validates non-negativity and unit sum (within ``1e-12``)
    and then renormalizes exactly.
    """

    labels: tuple
    probs: np.ndarray

    def __post_init__(self):
        labels = tuple(self.labels)
        probs = np.array(self.probs, dtype=float).reshape(-1)
        if len(labels) == 0 or len(labels) != probs.size:
            raise ValueError(f"need equal, non-zero numbers of labels and probs "
                             f"(got {len(labels)} and {probs.size})")
        if len(set(labels)) != len(labels):
            raise ValueError(f"labels are not distinct: {labels}")
        if not np.all(np.isfinite(probs)) or np.any(probs < 0):
            raise ValueError(f"probabilities must be finite and >= 0: {probs}")
        total = probs.sum()
        if abs(total - 1.0) > SUM_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "probs", _frozen(probs / total))

    @classmethod
    def from_probs(cls, probs: Sequence[float], labels: Sequence[Hashable] | None = None) -> "Pmf":
        probs = list(probs)
        if labels is None:
            labels = range(len(probs))
        return cls(tuple(labels), probs)

    @classmethod
    def uniform(cls, labels: Sequence[Hashable]) -> "Pmf":
        labels = tuple(labels)
        return cls(labels, np.full(len(labels), 1.0 / len(labels)))

    @classmethod
    def point_mass(cls, labels: Sequence[Hashable], at: Hashable) -> "Pmf":
        labels = tuple(labels)
        p = np.zeros(len(labels))
        p[labels.index(at)] = 1.0
        return cls(labels, p)

    def __len__(self):
        return len(self.labels)

    def __getitem__(self, label) -> float:
        return float(self.probs[self.labels.index(label)])

    @property
    def support(self) -> tuple:
        return tuple(lab for lab, p in zip(self.labels, self.probs) if p > 0)

    def same_alphabet(self, other: "Pmf") -> bool:
        return self.labels == other.labels

    def allclose(self, other: "Pmf", atol: float = 1e-12) -> bool:
        return self.same_alphabet(other) and bool(np.allclose(self.probs, other.probs, rtol=0, atol=atol))

    def to_dict(self) -> dict:
        return {"labels": [_jsonable(x) for x in self.labels], "probs": [float(p) for p in self.probs]}

    def __repr__(self):
        body = ", ".join(f"{lab!r}: {p:.6g}" for lab, p in zip(self.labels, self.probs))
        return f"Pmf({{{body}}})"


@dataclass(frozen=True, eq=False)
class JointPmf:
    """Joint distribution ``P(x, y)`` stored as a matrix with rows indexed by x."""

    row_labels: tuple
    col_labels: tuple
    probs: np.ndarray

    def __post_init__(self):
        rows, cols = tuple(self.row_labels), tuple(self.col_labels)
        probs = np.array(self.probs, dtype=float)
        if probs.shape != (len(rows), len(cols)):
            raise ValueError(f"joint matrix shape {probs.shape} does not match "
                             f"labels ({len(rows)}, {len(cols)})")
        if not np.all(np.isfinite(probs)) or np.any(probs < 0):
            raise ValueError("joint probabilities must be finite and >= 0")
        total = probs.sum()
        if abs(total - 1.0) > SUM_TOL:
            raise ValueError(f"joint probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "row_labels", rows)
        object.__setattr__(self, "col_labels", cols)
        object.__setattr__(self, "probs", _frozen(probs / total))

    @classmethod
    def from_input_and_channel(cls, px: Pmf, w: "Dmc") -> "JointPmf":
        _check_input(px, w)
        return cls(w.input_labels, w.output_labels, px.probs[:, None] * w.w)

    def row_marginal(self) -> Pmf:
        return Pmf(self.row_labels, self.probs.sum(axis=1))

    def col_marginal(self) -> Pmf:
        return Pmf(self.col_labels, self.probs.sum(axis=0))


def _jsonable(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, tuple):
        return list(x)
    return x


def _check_input(px: Pmf, w: "Dmc"):
    if px.labels != tuple(w.input_labels):
        raise AlphabetMismatch(f"input distribution over {px.labels} but channel "
                               f"inputs are {tuple(w.input_labels)}")


# Array-level helpers; the exponent code calls these in tight loops.

def entropy_of(p: np.ndarray) -> float:
    p = np.asarray(p, dtype=float).ravel()
    nz = p[p > 0]
    return float(-np.sum(nz * np.log2(nz)))


def renyi_of(alpha: float, p: np.ndarray) -> float:
    p = np.asarray(p, dtype=float).ravel()
    nz = p[p > 0]
    return float(np.log2(np.sum(nz ** alpha)) / (1.0 - alpha))


def kl_of(p: np.ndarray, q: np.ndarray) -> float:
    p = np.asarray(p, dtype=float).ravel()
    q = np.asarray(q, dtype=float).ravel()
    mask = p > 0
    if np.any(q[mask] <= 0):
        return math.inf
    # rounding can leave a tiny negative value when p == q
    return max(float(np.sum(p[mask] * (np.log2(p[mask]) - np.log2(q[mask])))), 0.0)


def mutual_information_of(px: np.ndarray, w: np.ndarray) -> float:
    px = np.asarray(px, dtype=float)
    joint = px[:, None] * w
    py = joint.sum(axis=0)
    mask = joint > 0
    ratio = np.ones_like(joint)
    ratio[mask] = w[mask] / np.broadcast_to(py, w.shape)[mask]
    return max(0.0, float(np.sum(joint[mask] * np.log2(ratio[mask]))))


# Public operations on validated objects.

def entropy(p: Pmf) -> float:
    """Shannon entropy in bits."""
    return entropy_of(p.probs)


def renyi_entropy(alpha: float, p: Pmf) -> float:
    """Renyi entropy of order ``alpha`` in bits; ``alpha`` must be positive and not 1."""
    if not alpha > 0 or alpha == 1:
        raise ValueError(f"Renyi order must be > 0 and != 1, got {alpha}")
    return renyi_of(alpha, p.probs)


def kl_divergence(p: Pmf, q: Pmf) -> float:
    """``D(p || q)`` in bits, or ``math.inf`` when ``supp(p)`` is not inside ``supp(q)``."""
    if not p.same_alphabet(q):
        raise AlphabetMismatch(f"KL divergence over different alphabets: {p.labels} vs {q.labels}")
    return kl_of(p.probs, q.probs)


def mutual_information(px: Pmf, w: "Dmc") -> float:
    """``I(X;Y)`` in bits for input ``px`` through channel ``w``."""
    _check_input(px, w)
    return mutual_information_of(px.probs, w.w)


def conditional_entropy(px: Pmf, w: "Dmc") -> float:
    """``H(X|Y)`` in bits."""
    return entropy(px) - mutual_information(px, w)


def arimoto_cond_renyi(alpha: float, pxy: JointPmf) -> float:
    """Arimoto's conditional Renyi entropy ``H_alpha(X|Y)`` for ``alpha`` in (0, 1).

    ``(alpha / (1 - alpha)) * log2 sum_y (sum_x P(x,y)**alpha)**(1/alpha)``.
    Rows of ``pxy`` index X, columns index Y.
    """
    if not 0 < alpha < 1:
        raise ValueError(f"conditional Renyi order must lie in (0, 1), got {alpha}")
    inner = np.sum(np.where(pxy.probs > 0, pxy.probs, 0.0) ** alpha, axis=0)
    return float(alpha / (1.0 - alpha) * np.log2(np.sum(inner ** (1.0 / alpha))))
