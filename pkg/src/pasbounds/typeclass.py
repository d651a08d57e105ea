"""Method of types: n-types, type-class sizes and bounds, quantization, ranking.

Sequences are ordered lexicographically by the declared alphabet order, so
rank 0 is the sequence with all copies of the first symbol up front.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Hashable, Sequence

import numpy as np

from .prob import Pmf, entropy_of, kl_of

# Exact big-integer multinomials up to this blocklength, log-gamma beyond.
EXACT_N_LIMIT = 10_000


class TypeClassTooLarge(ValueError):
    def __init__(self, cardinality: int, limit: int):
        super().__init__(f"type class has {cardinality} members, more than the allowed {limit}")
        self.cardinality = cardinality
        self.limit = limit


@dataclass(frozen=True)
class NType:
    """An n-type: integer symbol counts summing to the blocklength ``n``."""

    alphabet: tuple
    counts: tuple

    def __post_init__(self):
        alphabet = tuple(self.alphabet)
        counts = tuple(int(c) for c in self.counts)
        if len(alphabet) != len(counts) or not alphabet:
            raise ValueError("alphabet and counts must have the same non-zero length")
        if len(set(alphabet)) != len(alphabet):
            raise ValueError(f"alphabet symbols are not distinct: {alphabet}")
        if any(c < 0 for c in counts):
            raise ValueError(f"negative count in {counts}")
        if sum(counts) < 1:
            raise ValueError("blocklength must be positive")
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "counts", counts)

    @property
    def n(self) -> int:
        return sum(self.counts)

    @classmethod
    def from_sequence(cls, seq: Sequence[Hashable], alphabet: Sequence[Hashable]) -> "NType":
        alphabet = tuple(alphabet)
        return cls(alphabet, tuple(sum(1 for s in seq if s == a) for a in alphabet))

    @classmethod
    def from_pmf(cls, p: Pmf, n: int) -> "NType":
        """Exact conversion; raises if ``p`` is not an n-type."""
        counts = np.rint(p.probs * n).astype(int)
        if counts.sum() != n or not np.allclose(counts / n, p.probs, rtol=0, atol=1e-9):
            raise ValueError(f"{p!r} is not a {n}-type")
        return cls(p.labels, tuple(counts))


@dataclass(frozen=True)
class TypeClassInfo:
    log2_cardinality_exact: float
    lower_bound_bits: float
    upper_bound_bits: float


def as_pmf(t: NType) -> Pmf:
    return Pmf(t.alphabet, np.array(t.counts, dtype=float) / t.n)


def multinomial(counts: Sequence[int]) -> int:
    """``n! / prod(c_i!)`` as an exact integer."""
    total, result = 0, 1
    for c in counts:
        total += c
        result *= math.comb(total, c)
    return result


def log2_multinomial(counts: Sequence[int]) -> float:
    n = sum(counts)
    if n <= EXACT_N_LIMIT:
        return math.log2(multinomial(counts))
    return (math.lgamma(n + 1) - sum(math.lgamma(c + 1) for c in counts)) / math.log(2)


def type_class_info(t: NType) -> TypeClassInfo:
    """Exact ``log2 |T(P)|`` together with the ``nH - |Z| log2(n+1) <= . <= nH`` sandwich."""
    n = t.n
    nh = n * entropy_of(np.array(t.counts, dtype=float) / n)
    return TypeClassInfo(
        log2_cardinality_exact=log2_multinomial(t.counts),
        lower_bound_bits=nh - len(t.alphabet) * math.log2(n + 1),
        upper_bound_bits=nh,
    )


def type_sequence_prob(t: NType, q: Pmf) -> float:
    """log2 of ``q^n(z^n)`` for any ``z^n`` of type ``t``; ``-inf`` on support violation.

    Equals ``-n (H(P) + D(P || q))`` with ``P = as_pmf(t)``.
    """
    if q.labels != t.alphabet:
        raise ValueError(f"distribution over {q.labels} but type over {t.alphabet}")
    total = 0.0
    for c, qi in zip(t.counts, q.probs):
        if c == 0:
            continue
        if qi <= 0:
            return -math.inf
        total += c * math.log2(qi)
    return total


def quantize_to_ntype(target: Pmf, n: int) -> NType:
    """n-type minimizing ``D(P || target)`` over n-types supported inside ``supp(target)``.

    The divergence is a separable convex function of the counts, so handing
    out the ``n`` counts one at a time, each to the symbol whose increment
    raises ``sum_i c_i log2(c_i / (n t_i))`` least (lowest index on ties),
    reaches the global minimum. Starting from ``floor(n * target)`` instead
    is not safe: the optimum may put fewer than ``floor(n t_i)`` counts on a
    dominant symbol.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    t = target.probs
    nt = n * t
    counts = np.zeros(len(t), dtype=int)

    def term(c, i):
        return 0.0 if c == 0 else c * math.log2(c / nt[i])

    gains = np.array([term(1, i) if t[i] > 0 else math.inf for i in range(len(t))])
    for _ in range(n):
        i = int(np.argmin(gains))
        counts[i] += 1
        gains[i] = term(counts[i] + 1, i) - term(counts[i], i)
    return NType(target.labels, tuple(int(c) for c in counts))


def ntype_divergence(t: NType, target: Pmf) -> float:
    return kl_of(np.array(t.counts, dtype=float) / t.n, target.probs)


def all_ntypes(k: int, n: int):
    """Yield every count vector of length ``k`` summing to ``n`` (lexicographic)."""
    if k == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in all_ntypes(k - 1, n - first):
            yield (first,) + rest


def enumerate_type_class_indices(counts: Sequence[int]):
    """Yield members of the type class as tuples of symbol indices, lexicographically."""
    counts = list(counts)
    n = sum(counts)
    seq = [0] * n

    def rec(pos):
        if pos == n:
            yield tuple(seq)
            return
        for j, c in enumerate(counts):
            if c:
                counts[j] -= 1
                seq[pos] = j
                yield from rec(pos + 1)
                counts[j] += 1

    yield from rec(0)


def enumerate_type_class(t: NType, max_count: int = 1 << 20) -> list[tuple]:
    """All sequences of type ``t`` in lexicographic order.

    Raises :class:`TypeClassTooLarge` (carrying the exact size) when the class
    has more than ``max_count`` members.
    """
    size = multinomial(t.counts)
    if size > max_count:
        raise TypeClassTooLarge(size, max_count)
    return [tuple(t.alphabet[i] for i in idx) for idx in enumerate_type_class_indices(t.counts)]


def rank_type_sequence(t: NType, seq: Sequence[Hashable]) -> int:
    idx = [t.alphabet.index(s) for s in seq]
    counts = list(t.counts)
    if len(idx) != t.n or any(idx.count(j) != c for j, c in enumerate(counts)):
        raise ValueError("sequence is not a member of the type class")
    rank = 0
    for sym in idx:
        for j in range(sym):
            if counts[j]:
                counts[j] -= 1
                rank += multinomial(counts)
                counts[j] += 1
        counts[sym] -= 1
    return rank


def unrank_type_sequence_indices(counts: Sequence[int], rank: int) -> tuple:
    counts = list(counts)
    size = multinomial(counts)
    if not 0 <= rank < size:
        raise IndexError(f"rank {rank} outside [0, {size})")
    out = []
    for _ in range(sum(counts)):
        for j, c in enumerate(counts):
            if not c:
                continue
            counts[j] -= 1
            block = multinomial(counts)
            if rank < block:
                out.append(j)
                break
            rank -= block
            counts[j] += 1
    return tuple(out)


def unrank_type_sequence(t: NType, rank: int) -> tuple:
    """The ``rank``-th member of ``enumerate_type_class(t)``."""
    return tuple(t.alphabet[i] for i in unrank_type_sequence_indices(t.counts, rank))
