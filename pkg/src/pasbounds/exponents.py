"""Random-coding error exponents for the classical, systematic, mismatched and
PAS setups, and the rate thresholds that make them positive.

Every exponent is ``max_{0<=rho<=1} integrand(rho)`` in bits, so that the
block error probability is bounded by ``2**(-n * exponent)``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .channel import Dmc, FactoredDmc, product_input
from .prob import (AlphabetMismatch, Pmf, _check_input, entropy_of, kl_divergence,
                   mutual_information, renyi_of)

GRID_STEP = 1.0 / 256
RHO_TOL = 1e-6
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class PreconditionError(ValueError):
    """An exponent was requested outside the region where its bound holds."""


@dataclass(frozen=True, eq=False)
class RhoCurve:
    rho_values: np.ndarray
    integrand_values: np.ndarray

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["rho", "integrand_bits"])
        for r, v in zip(self.rho_values, self.integrand_values):
            writer.writerow([f"{r:.12g}", f"{v:.12g}"])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "RhoCurve":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or rows[0] != ["rho", "integrand_bits"]:
            raise ValueError("curve CSV must start with the header 'rho,integrand_bits'")
        data = np.array([[float(a), float(b)] for a, b in rows[1:]]).reshape(-1, 2)
        return cls(data[:, 0], data[:, 1])


@dataclass(frozen=True, eq=False)
class ExponentResult:
    """Maximized exponent, its maximizer, and the integrand on the coarse grid.

    ``exponent`` is the raw maximum and may be negative (vacuous bound);
    ``clamped`` is ``max(exponent, 0)``.
    """

    exponent: float
    rho_star: float
    curve: RhoCurve
    alpha_n: float | None = None
    penalty: float | None = None

    @property
    def clamped(self) -> float:
        return max(self.exponent, 0.0)

    @property
    def negative(self) -> bool:
        return self.exponent < 0

    def bound(self, n: int) -> float:
        """``2**(-n * exponent)``, the block error bound (can exceed 1)."""
        return 2.0 ** (-n * self.exponent)

    def summary(self) -> dict:
        d = {
            "exponent_bits": self.exponent,
            "exponent_clamped_bits": self.clamped,
            "negative": self.negative,
            "rho_star": self.rho_star,
        }
        if self.alpha_n is not None:
            d["alpha_n"] = self.alpha_n
        if self.penalty is not None:
            d["penalty_bits"] = self.penalty
        return d


@dataclass(frozen=True)
class RateThresholds:
    mutual_info: float
    penalty: float
    rate_limit: float
    extra: dict = field(default_factory=dict)

    @property
    def clamped_rate_limit(self) -> float:
        return max(self.rate_limit, 0.0)

    @property
    def negative(self) -> bool:
        return self.rate_limit < 0

    def summary(self) -> dict:
        return {
            "mutual_info_bits": self.mutual_info,
            "penalty_bits": self.penalty,
            "rate_limit_bits": self.rate_limit,
            "rate_limit_clamped_bits": self.clamped_rate_limit,
            "negative": self.negative,
            **self.extra,
        }


def maximize_over_rho(integrand: Callable[[float], float]) -> ExponentResult:
    """Maximize ``integrand`` over [0, 1].

    A 1/256 grid locates the best point; golden-section search then refines
    inside the two neighbouring grid cells until the bracket is below 1e-6.
    The refined point only replaces the grid maximum if strictly better.
    """
    rhos = np.linspace(0.0, 1.0, int(round(1 / GRID_STEP)) + 1)
    vals = np.array([integrand(float(r)) for r in rhos])
    if not np.all(np.isfinite(vals)):
        raise ValueError("integrand is not finite on [0, 1]")
    k = int(np.argmax(vals))
    best_rho, best_val = float(rhos[k]), float(vals[k])

    lo, hi = float(rhos[max(k - 1, 0)]), float(rhos[min(k + 1, rhos.size - 1)])
    c = hi - _GOLDEN * (hi - lo)
    d = lo + _GOLDEN * (hi - lo)
    fc, fd = integrand(c), integrand(d)
    while hi - lo > RHO_TOL:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - _GOLDEN * (hi - lo)
            fc = integrand(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _GOLDEN * (hi - lo)
            fd = integrand(d)
    r = c if fc >= fd else d
    v = max(fc, fd)
    if v > best_val:
        best_rho, best_val = r, v
    return ExponentResult(best_val, best_rho, RhoCurve(rhos, vals))


# Array kernels -------------------------------------------------------------

def e0_of(rho: float, px: np.ndarray, w: np.ndarray) -> float:
    if rho == 0:
        return 0.0
    inner = px @ (w ** (1.0 / (1.0 + rho)))
    return float(-np.log2(np.sum(inner ** (1.0 + rho))))


def es_integrand_of(rho: float, pa: np.ndarray, ps: np.ndarray, w_as: np.ndarray) -> float:
    if rho == 0:
        return 0.0
    eta = 1.0 / (1.0 + rho)
    inner = np.einsum("s,asy->y", ps, (pa[:, None, None] * w_as) ** eta)
    return float(-np.log2(np.sum(inner ** (1.0 + rho))))


def alpha_n(n: int, a_size: int) -> float:
    """Finite-blocklength slack ``|A| log2(n+1) / n``."""
    if n < 1:
        raise ValueError("n must be positive")
    return a_size * math.log2(n + 1) / n


# Public operations ---------------------------------------------------------

def gallager_e0(rho: float, px: Pmf, w: Dmc) -> float:
    """``-log2 sum_y (sum_x P(x) W(y|x)^(1/(1+rho)))^(1+rho)``."""
    _check_input(px, w)
    return e0_of(rho, px.probs, w.w)


def dms_renyi(pa: Pmf) -> Callable[[float], float]:
    """Per-symbol Renyi entropy of a memoryless source, order 1 mapped to Shannon."""
    def f(alpha):
        return entropy_of(pa.probs) if alpha == 1 else renyi_of(alpha, pa.probs)
    return f


def uniform_renyi(num_messages: int, n: int) -> Callable[[float], float]:
    """Per-symbol Renyi entropy of a uniform source over ``num_messages`` blocks."""
    value = math.log2(num_messages) / n
    return lambda alpha: value


def exponent_eg(px: Pmf, w: Dmc, per_symbol_renyi: Callable[[float], float]) -> ExponentResult:
    """Classical joint source-channel exponent with a MAP decoder."""
    _check_input(px, w)
    p, mat = px.probs, w.w

    def integrand(rho):
        if rho == 0:
            return 0.0
        return e0_of(rho, p, mat) - rho * per_symbol_renyi(1.0 / (1.0 + rho))

    return maximize_over_rho(integrand)


def _check_factored(pa: Pmf, ps: Pmf, fd: FactoredDmc):
    if pa.labels != fd.a_labels or ps.labels != fd.s_labels:
        raise AlphabetMismatch(f"P_A/P_S over {pa.labels}/{ps.labels}, channel factors are "
                               f"{fd.a_labels}/{fd.s_labels}")


def exponent_es_integrand(rho: float, pa: Pmf, ps: Pmf, fd: FactoredDmc) -> float:
    """Systematic-encoding integrand
    ``-log2 sum_y (sum_{a,s} P_S(s) (P_A(a) W(y|a,s))^(1/(1+rho)))^(1+rho)``."""
    _check_factored(pa, ps, fd)
    return es_integrand_of(rho, pa.probs, ps.probs, fd.w_as)


def exponent_es(pa: Pmf, ps: Pmf, fd: FactoredDmc) -> ExponentResult:
    _check_factored(pa, ps, fd)
    a, s, w_as = pa.probs, ps.probs, fd.w_as
    return maximize_over_rho(lambda rho: es_integrand_of(rho, a, s, w_as))


def _support_penalty(pbar: Pmf, pa: Pmf) -> float:
    d = kl_divergence(pbar, pa)
    if math.isinf(d):
        raise PreconditionError(
            "mismatched decoding needs supp(P_Abar) inside supp(P_A) (P_A >> P_Abar); "
            f"P_Abar support {pbar.support} is not covered by P_A support {pa.support}")
    return d


def exponent_em_integrand(rho: float, pbar: Pmf, pa: Pmf, px: Pmf, w: Dmc) -> float:
    d = _support_penalty(pbar, pa)
    return _em_integrand(rho, d + entropy_of(pbar.probs), pa.probs, px.probs, w.w)


def _em_integrand(rho, d_plus_h, pa, px, w):
    if rho == 0:
        return 0.0
    return (e0_of(rho, px, w) - rho / (1.0 + rho) * d_plus_h
            - rho * rho / (1.0 + rho) * renyi_of(1.0 / (1.0 + rho), pa))


def exponent_em(pbar: Pmf, pa: Pmf, px: Pmf, w: Dmc) -> ExponentResult:
    """Exponent for a source uniform-ish on the type class of ``pbar`` decoded
    with the memoryless prior ``pa`` over all of A^n."""
    _check_input(px, w)
    d = _support_penalty(pbar, pa)
    d_plus_h = d + entropy_of(pbar.probs)
    p_a, p_x, mat = pa.probs, px.probs, w.w
    res = maximize_over_rho(lambda rho: _em_integrand(rho, d_plus_h, p_a, p_x, mat))
    return ExponentResult(res.exponent, res.rho_star, res.curve, penalty=d)


def _check_ntype(pbar: Pmf, n: int):
    counts = pbar.probs * n
    if not np.allclose(counts, np.rint(counts), rtol=0, atol=1e-9):
        raise PreconditionError(f"P_Abar {pbar!r} is not an {n}-type")


def exponent_esm(n: int, pbar: Pmf, pa: Pmf, ps: Pmf, fd: FactoredDmc) -> ExponentResult:
    """PAS exponent with a type permuter: systematic integrand minus
    ``alpha(n)`` and ``D(P_Abar || P_A)``. Can come out negative."""
    _check_factored(pa, ps, fd)
    d = _support_penalty(pbar, pa)
    _check_ntype(pbar, n)
    slack = alpha_n(n, len(fd.a_labels))
    a, s, w_as = pa.probs, ps.probs, fd.w_as
    res = maximize_over_rho(lambda rho: es_integrand_of(rho, a, s, w_as) - slack - d)
    return ExponentResult(res.exponent, res.rho_star, res.curve, alpha_n=slack, penalty=d)


def rate_thresholds_es(pa: Pmf, ps: Pmf, fd: FactoredDmc) -> RateThresholds:
    """``I(X;Y)`` for ``P_X = P_A P_S``; the exponent is positive iff
    ``H(A) < I(AS;Y)``, equivalently ``H(S) > H(X|Y)``."""
    px = product_input(pa, ps, fd)
    mi = mutual_information(px, fd.base)
    h_a, h_s = entropy_of(pa.probs), entropy_of(ps.probs)
    h_x_given_y = h_a + h_s - mi
    return RateThresholds(mi, 0.0, mi, extra={
        "source_entropy_bits": h_a,
        "redundancy_bits": h_s,
        "equivocation_bits": h_x_given_y,
        "positive_exponent": h_a < mi,
        "redundancy_exceeds_equivocation": h_s > h_x_given_y,
    })


def rate_thresholds_em(pbar: Pmf, pa: Pmf, px: Pmf, w: Dmc) -> RateThresholds:
    """``I(X;Y) - D(P_Abar || P_A)``; negative values mean no positive rate."""
    d = _support_penalty(pbar, pa)
    mi = mutual_information(px, w)
    h_bar = entropy_of(pbar.probs)
    return RateThresholds(mi, d, mi - d, extra={
        "source_entropy_bits": h_bar,
        "positive_exponent": h_bar < mi - d,
    })
