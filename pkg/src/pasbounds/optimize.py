"""Input-distribution optimization: Blahut-Arimoto capacity and alternating
ascent of I(X;Y) over product inputs ``P_A x P_S``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import Dmc, FactoredDmc
from .prob import Pmf
from .typeclass import NType, quantize_to_ntype

DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITER = 10_000
DEFAULT_RESTARTS = 8


@dataclass(frozen=True, eq=False)
class CapacityResult:
    capacity: float
    px_star: Pmf
    iterations: int
    gap: float
    converged: bool
    history: tuple = ()

    def to_dict(self) -> dict:
        return {
            "capacity_bits": self.capacity,
            "px": [float(p) for p in self.px_star.probs],
            "gap": self.gap,
            "iterations": self.iterations,
            "converged": self.converged,
        }


@dataclass(frozen=True, eq=False)
class ProductOptResult:
    mi: float
    pa_star: Pmf
    ps_star: Pmf
    converged: bool
    iterations: int = 0
    gap: float = 0.0

    def to_dict(self) -> dict:
        return {
            "mi_bits": self.mi,
            "pa": [float(p) for p in self.pa_star.probs],
            "ps": [float(p) for p in self.ps_star.probs],
            "converged": self.converged,
            "iterations": self.iterations,
            "gap": self.gap,
        }


def _divergences(w: np.ndarray, q: np.ndarray) -> np.ndarray:
    """``D(W(.|x) || q)`` in bits for every row ``x``."""
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(w > 0, w * np.log2(w / q), 0.0)
    return terms.sum(axis=-1)


def blahut_arimoto(w: Dmc, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> CapacityResult:
    """Channel capacity by Blahut-Arimoto.

    Stops once ``max_x D(W(.|x) || q) - I`` (an upper minus lower bound on
    capacity) drops below ``tol``. The reported capacity is the lower bound
    ``I(p; W)`` of the final iterate.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    mat = w.w
    p = np.full(mat.shape[0], 1.0 / mat.shape[0])
    history = []
    gap = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        d = _divergences(mat, p @ mat)
        lower = float(p @ d)
        upper = float(d.max())
        history.append(lower)
        gap = upper - lower
        if gap < tol:
            break
        p = p * np.exp2(d - upper)
        p /= p.sum()
    return CapacityResult(max(history[-1], 0.0), Pmf(w.input_labels, p), it, max(gap, 0.0),
                          gap < tol, tuple(history))


def _ascend(w_as, pa, ps, tol, max_iter):
    gap = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        px = pa[:, None] * ps[None, :]
        q = np.einsum("as,asy->y", px, w_as)
        d = _divergences(w_as, q)
        mi = float(np.sum(px * d))
        ca, cs = d @ ps, pa @ d
        gap = max(ca.max(), cs.max()) - mi
        if gap < tol:
            break
        pa = pa * np.exp2(ca - ca.max())
        pa /= pa.sum()
        q = np.einsum("a,s,asy->y", pa, ps, w_as)
        cs = pa @ _divergences(w_as, q)
        ps = ps * np.exp2(cs - cs.max())
        ps /= ps.sum()
    px = pa[:, None] * ps[None, :]
    mi = float(np.sum(px * _divergences(w_as, np.einsum("as,asy->y", px, w_as))))
    return mi, pa, ps, it, max(float(gap), 0.0), gap < tol


def maximize_product_mi(fd: FactoredDmc, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                        restarts: int = DEFAULT_RESTARTS, seed: int = 0) -> ProductOptResult:
    """Maximize ``I(AS;Y)`` over ``P_A x P_S`` by alternating Blahut-style steps.

    Each half-step is a monotone ascent on one factor with the other fixed.
    The objective is not jointly concave, so the search starts from the
    uniform pair and ``restarts`` Dirichlet draws (seeded) and keeps the best
    result; exact ties go to the lexicographically smallest pair.
    """
    w_as = fd.w_as
    na, ns = w_as.shape[:2]
    rng = np.random.default_rng(seed)
    starts = [(np.full(na, 1.0 / na), np.full(ns, 1.0 / ns))]
    starts += [(rng.dirichlet(np.ones(na)), rng.dirichlet(np.ones(ns))) for _ in range(restarts)]

    best = None
    for pa0, ps0 in starts:
        run = _ascend(w_as, pa0, ps0, tol, max_iter)
        if best is None or run[0] > best[0] or (
                run[0] == best[0] and (tuple(run[1]), tuple(run[2])) < (tuple(best[1]), tuple(best[2]))):
            best = run
    mi, pa, ps, it, gap, conv = best
    return ProductOptResult(mi, Pmf(fd.a_labels, pa), Pmf(fd.s_labels, ps), bool(conv), it, gap)


def project_to_ntype_design(pa_star: Pmf, n: int) -> NType:
    """Closest n-type to ``pa_star`` in divergence; the second step of the design recipe."""
    return quantize_to_ntype(pa_star, n)
