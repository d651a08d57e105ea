"""Discrete memoryless channels, the factored input alphabet X = A x S, and
discretized ASK over AWGN with Maxwell-Boltzmann amplitude shaping."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Hashable, Sequence

import numpy as np
from scipy.special import ndtr

from .prob import AlphabetMismatch, Pmf, _frozen, _jsonable

ROW_TOL = 1e-12


def _tupleize(x):
    return tuple(_tupleize(v) for v in x) if isinstance(x, list) else x


@dataclass(frozen=True, eq=False)
class Dmc:
    """Row-stochastic transition matrix ``w[x, y] = W(y|x)``."""

    input_labels: tuple
    output_labels: tuple
    w: np.ndarray

    def __post_init__(self):
        xs, ys = tuple(self.input_labels), tuple(self.output_labels)
        w = np.array(self.w, dtype=float)
        if w.ndim != 2 or w.shape != (len(xs), len(ys)) or not xs or not ys:
            raise ValueError(f"transition matrix shape {w.shape} does not match "
                             f"{len(xs)} inputs x {len(ys)} outputs")
        if len(set(xs)) != len(xs) or len(set(ys)) != len(ys):
            raise ValueError("channel labels must be distinct")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValueError("transition probabilities must be finite and >= 0")
        sums = w.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > ROW_TOL):
            bad = int(np.argmax(np.abs(sums - 1.0)))
            raise ValueError(f"row {bad} sums to {sums[bad]!r}, not 1")
        object.__setattr__(self, "input_labels", xs)
        object.__setattr__(self, "output_labels", ys)
        object.__setattr__(self, "w", _frozen(w / sums[:, None]))

    @property
    def shape(self):
        return self.w.shape

    def to_dict(self) -> dict:
        return {
            "input_labels": [_jsonable(x) for x in self.input_labels],
            "output_labels": [_jsonable(y) for y in self.output_labels],
            "w": [[float(v) for v in row] for row in self.w],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "Dmc":
        try:
            w = d["w"]
            xs = d.get("input_labels") or list(range(len(w)))
            ys = d.get("output_labels") or list(range(len(w[0])))
        except (KeyError, TypeError, IndexError) as exc:
            raise ValueError(f"malformed channel document: {exc}") from exc
        return cls(_tupleize(list(xs)), _tupleize(list(ys)), w)

    @classmethod
    def from_json(cls, text: str) -> "Dmc":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True, eq=False)
class FactoredDmc:
    """A DMC whose inputs are indexed by pairs (a, s).

    ``index_map[i, j]`` is the row of ``base`` for amplitude ``a_labels[i]``
    and sign/parity ``s_labels[j]``.
    """

    base: Dmc
    a_labels: tuple
    s_labels: tuple
    index_map: np.ndarray
    amplitudes: tuple | None = None

    def __post_init__(self):
        a, s = tuple(self.a_labels), tuple(self.s_labels)
        idx = np.array(self.index_map, dtype=int)
        nx = len(self.base.input_labels)
        if idx.shape != (len(a), len(s)) or len(a) * len(s) != nx:
            raise ValueError(f"|A| x |S| = {len(a)} x {len(s)} does not factor {nx} inputs")
        if sorted(idx.ravel().tolist()) != list(range(nx)):
            raise ValueError("index map is not a bijection onto the channel inputs")
        idx.setflags(write=False)
        object.__setattr__(self, "a_labels", a)
        object.__setattr__(self, "s_labels", s)
        object.__setattr__(self, "index_map", idx)

    @property
    def w_as(self) -> np.ndarray:
        """Transition tensor indexed ``[a, s, y]``."""
        return self.base.w[self.index_map]

    def to_dict(self) -> dict:
        d = self.base.to_dict()
        d["a_labels"] = [_jsonable(x) for x in self.a_labels]
        d["s_labels"] = [_jsonable(x) for x in self.s_labels]
        d["index_map"] = self.index_map.tolist()
        return d


def factor(base: Dmc, a_labels: Sequence[Hashable], s_labels: Sequence[Hashable],
           index_map=None) -> FactoredDmc:
    """Attach an (a, s) structure to ``base``; default map is ``x = a * |S| + s``."""
    if index_map is None:
        index_map = np.arange(len(a_labels) * len(s_labels)).reshape(len(a_labels), len(s_labels))
    return FactoredDmc(base, tuple(a_labels), tuple(s_labels), index_map)


def make_bsc(p: float) -> Dmc:
    if not 0 <= p <= 0.5:
        raise ValueError(f"crossover probability must lie in [0, 0.5], got {p}")
    return Dmc((0, 1), (0, 1), [[1 - p, p], [p, 1 - p]])


def make_identity(k: int) -> Dmc:
    return Dmc(tuple(range(k)), tuple(range(k)), np.eye(k))


def make_parallel(wa: Dmc, ws: Dmc) -> FactoredDmc:
    """Two independent channel uses, the first carrying ``a`` and the second ``s``."""
    xs = tuple((a, s) for a in wa.input_labels for s in ws.input_labels)
    ys = tuple((u, v) for u in wa.output_labels for v in ws.output_labels)
    base = Dmc(xs, ys, np.kron(wa.w, ws.w))
    return factor(base, wa.input_labels, ws.input_labels)


def make_ask_awgn(m: int, snr_db: float, bins: int = 64, span_sigmas: float = 4.0) -> FactoredDmc:
    """2^m-ASK over AWGN with a uniformly quantized output.

    Points ``{±1, ±3, ..., ±(2^m - 1)}`` are scaled to unit average power
    under uniform input, so the noise variance is ``10**(-snr_db/10)``.
    ``bins`` equal cells cover ``[-(x_max + span_sigmas*sigma), x_max + span_sigmas*sigma]``
    and two more cells take the tails. Amplitudes index A, signs index S.
    """
    if not 1 <= m <= 4:
        raise ValueError(f"m must be in 1..4, got {m}")
    if not 2 <= bins <= 512:
        raise ValueError(f"bins must be in 2..512, got {bins}")
    if not span_sigmas > 0 or not math.isfinite(snr_db):
        raise ValueError("span_sigmas must be positive and snr_db finite")
    size = 2 ** m
    amps = np.arange(1, size, 2)
    scale = 1.0 / math.sqrt((size * size - 1) / 3.0)
    sigma = 10.0 ** (-snr_db / 20.0)
    edge = (amps[-1] * scale) + span_sigmas * sigma
    cuts = np.linspace(-edge, edge, bins + 1)
    bounds = np.concatenate(([-np.inf], cuts, [np.inf]))

    points = np.concatenate((-amps[::-1], amps)).astype(float)  # ascending
    cdf = ndtr((bounds[None, :] - points[:, None] * scale) / sigma)
    w = np.diff(cdf, axis=1)
    w /= w.sum(axis=1, keepdims=True)
    x_labels = tuple(int(v) for v in points)
    y_labels = tuple(range(bins + 2))
    base = Dmc(x_labels, y_labels, w)

    a_labels = tuple(int(a) for a in amps)
    s_labels = ("+", "-")
    index_map = [[x_labels.index(a), x_labels.index(-a)] for a in a_labels]
    return FactoredDmc(base, a_labels, s_labels, index_map, amplitudes=tuple(float(a) for a in amps))


def maxwell_boltzmann(amplitudes: Sequence[float], nu: float, labels=None) -> Pmf:
    """``P(a) ∝ exp(-nu a^2)``."""
    if nu < 0:
        raise ValueError("nu must be >= 0")
    a = np.asarray(amplitudes, dtype=float)
    if len(set(a.tolist())) != a.size:
        raise ValueError("amplitudes must be distinct")
    logits = -nu * (a * a - np.min(a * a))
    p = np.exp(logits)
    return Pmf(tuple(labels) if labels is not None else tuple(amplitudes), p / p.sum())


def product_input(pa: Pmf, ps: Pmf, fd: FactoredDmc) -> Pmf:
    """``P_X(index_map(a, s)) = P_A(a) P_S(s)``."""
    if pa.labels != fd.a_labels:
        raise AlphabetMismatch(f"P_A over {pa.labels}, channel amplitudes are {fd.a_labels}")
    if ps.labels != fd.s_labels:
        raise AlphabetMismatch(f"P_S over {ps.labels}, channel signs are {fd.s_labels}")
    px = np.zeros(len(fd.base.input_labels))
    px[fd.index_map] = pa.probs[:, None] * ps.probs[None, :]
    return Pmf(fd.base.input_labels, px)
