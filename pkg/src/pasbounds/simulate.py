"""Small-blocklength verification of the random-coding bounds.

Codes are materialized as full tables over A^n. Messages ``a^n`` are
identified with integers in base ``|A|`` (first symbol most significant), so
integer order is lexicographic order. Decoders search exhaustively in the
log domain and break ties toward the lexicographically smallest message.

Randomness: the code for index ``c`` uses ``default_rng([seed, 0, c])``, its
permuter ``[seed, 1, c]`` and Monte Carlo trial ``t`` uses ``[seed, 2, c, t]``,
so results do not depend on evaluation order.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .channel import Dmc, FactoredDmc
from .exponents import (ExponentResult, PreconditionError, dms_renyi, exponent_eg, exponent_em,
                        exponent_es, exponent_esm, uniform_renyi)
from .prob import Pmf
from .typeclass import NType, multinomial

SETUPS = ("classical", "systematic", "mismatched", "pas")
ENSEMBLES = ("iid", "affine-binary")
MAX_LOG2_SIZE = 24
Z_99 = 2.5758293035489004  # two-sided 99% normal quantile
TIE_RTOL = 1e-9
_CHUNK_ENTRIES = 1 << 22


class InfeasibleConfig(ValueError):
    pass


def _rng(*key: int) -> np.random.Generator:
    return np.random.default_rng([int(k) for k in key])


def _digits(codes: np.ndarray, base: int, n: int) -> np.ndarray:
    """Base-``base`` digits of ``codes``, most significant first, shape (len, n)."""
    codes = np.asarray(codes, dtype=np.int64)
    out = np.empty((codes.size, n), dtype=np.int64)
    rem = codes.copy()
    for i in range(n - 1, -1, -1):
        out[:, i] = rem % base
        rem //= base
    return out


def _check_size(base: int, n: int, what: str):
    bits = n * math.log2(base)
    if bits > MAX_LOG2_SIZE + 1e-12:
        raise InfeasibleConfig(f"n*log2|{what}| = {n}*log2({base}) = {bits:.3f} exceeds {MAX_LOG2_SIZE}")


def wilson_interval(successes: float, trials: int, z: float = Z_99) -> tuple[float, float]:
    """Wilson score interval for a proportion (successes may be fractional)."""
    if trials <= 0:
        return 0.0, 1.0
    p = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    centre = p + z2 / (2 * trials)
    half = z * math.sqrt(max(p * (1 - p), 0.0) / trials + z2 / (4 * trials * trials))
    return max(0.0, (centre - half) / denom), min(1.0, (centre + half) / denom)


# Codes, sources, permuters ---------------------------------------------------

@dataclass(frozen=True, eq=False)
class CodeTable:
    """Map from every ``a^n`` (row index) to a length-n block over ``s_alphabet``.

    With ``systematic`` the block is the parity part and the channel input is
    ``(a_i, s_i)``; otherwise the block is the channel input itself.
    """

    n: int
    a_alphabet: tuple
    s_alphabet: tuple
    table: np.ndarray
    systematic: bool = True
    affine: tuple | None = None

    def __post_init__(self):
        if self.table.shape != (len(self.a_alphabet) ** self.n, self.n):
            raise ValueError("code table must have one row per a^n and n columns")

    def lookup(self, a_seq) -> tuple:
        code = 0
        for s in a_seq:
            code = code * len(self.a_alphabet) + self.a_alphabet.index(s)
        return tuple(self.s_alphabet[j] for j in self.table[code])


def sample_code_iid(n: int, a_alphabet, ps: Pmf, rng: np.random.Generator,
                    systematic: bool = True) -> CodeTable:
    """Every table entry drawn independently, each symbol i.i.d. ``ps``."""
    a_alphabet = tuple(a_alphabet)
    _check_size(len(a_alphabet), n, "A")
    rows = len(a_alphabet) ** n
    table = rng.choice(len(ps), size=(rows, n), p=ps.probs) if len(ps) > 1 \
        else np.zeros((rows, n), dtype=np.int64)
    return CodeTable(n, a_alphabet, ps.labels, table.astype(np.int64), systematic)


def _log2_exact(k: int, what: str) -> int:
    b = k.bit_length() - 1
    if k < 1 or (1 << b) != k:
        raise ValueError(f"|{what}| = {k} is not a power of two")
    return b


def affine_code_table(n: int, m_bits: int, p_bits: int, G: np.ndarray, b: np.ndarray,
                      a_alphabet=None, s_alphabet=None, systematic: bool = True) -> CodeTable:
    """Table of ``a^n -> G bits(a^n) + b`` over GF(2), ``|A| = 2^(m-p)``, ``|S| = 2^p``."""
    a_bits = m_bits - p_bits
    if a_bits < 0 or p_bits < 0:
        raise ValueError("need 0 <= p_bits <= m_bits")
    a_alphabet = tuple(a_alphabet) if a_alphabet is not None else tuple(range(1 << a_bits))
    s_alphabet = tuple(s_alphabet) if s_alphabet is not None else tuple(range(1 << p_bits))
    if len(a_alphabet) != 1 << a_bits or len(s_alphabet) != 1 << p_bits:
        raise ValueError("alphabet sizes do not match the bit widths")
    _check_size(len(a_alphabet), n, "A")
    G = np.asarray(G, dtype=np.int64) & 1
    b = np.asarray(b, dtype=np.int64) & 1
    if G.shape != (n * p_bits, n * a_bits) or b.shape != (n * p_bits,):
        raise ValueError(f"G must be {(n * p_bits, n * a_bits)} and b length {n * p_bits}")
    rows = len(a_alphabet) ** n
    in_bits = _digits(np.arange(rows), 2, n * a_bits) if a_bits else np.zeros((rows, 0), np.int64)
    out_bits = (in_bits @ G.T + b) & 1
    weights = 1 << np.arange(p_bits - 1, -1, -1)
    table = out_bits.reshape(rows, n, p_bits) @ weights if p_bits else np.zeros((rows, n), np.int64)
    return CodeTable(n, a_alphabet, s_alphabet, table.astype(np.int64), systematic, (G, b))


def sample_code_affine_binary(n: int, m_bits: int, p_bits: int, rng: np.random.Generator,
                              a_alphabet=None, s_alphabet=None, systematic: bool = True) -> CodeTable:
    """Uniform draw of ``G`` and ``b`` over GF(2)."""
    a_bits = m_bits - p_bits
    G = rng.integers(0, 2, size=(n * p_bits, n * a_bits))
    b = rng.integers(0, 2, size=n * p_bits)
    return affine_code_table(n, m_bits, p_bits, G, b, a_alphabet, s_alphabet, systematic)


@dataclass(frozen=True, eq=False)
class Permuter:
    """Permutation of one type class, identity elsewhere.

    ``members`` are the message codes of the class in rank order and
    ``perm[r]`` is the rank that rank ``r`` is sent to.
    """

    t: NType
    members: np.ndarray
    perm: np.ndarray

    def mapping(self, num_messages: int) -> np.ndarray:
        phi = np.arange(num_messages)
        phi[self.members] = self.members[self.perm]
        return phi

    def inverse(self) -> "Permuter":
        return Permuter(self.t, self.members, np.argsort(self.perm))

    def __call__(self, a_seq) -> tuple:
        k = len(self.t.alphabet)
        code = 0
        for s in a_seq:
            code = code * k + self.t.alphabet.index(s)
        pos = np.searchsorted(self.members, code)
        if pos < self.members.size and self.members[pos] == code:
            code = int(self.members[self.perm[pos]])
        return tuple(self.t.alphabet[j] for j in _digits([code], k, self.t.n)[0])


def type_class_codes(t: NType) -> np.ndarray:
    """Message codes of every member of ``T(t)``, ascending (= lexicographic)."""
    k, n = len(t.alphabet), t.n
    _check_size(k, n, "A")
    digits = _digits(np.arange(k ** n), k, n)
    counts = np.stack([(digits == j).sum(axis=1) for j in range(k)], axis=1)
    return np.flatnonzero(np.all(counts == np.array(t.counts), axis=1))


def sample_permuter(t: NType, rng: np.random.Generator, max_count: int = 1 << 24) -> Permuter:
    size = multinomial(t.counts)
    if size > max_count:
        raise InfeasibleConfig(f"type class has {size} members, more than {max_count}")
    return Permuter(t, type_class_codes(t), rng.permutation(size))


@dataclass(frozen=True, eq=False)
class SourceModel:
    """Message distribution: probabilities on a set of message codes."""

    n: int
    alphabet: tuple
    support: np.ndarray
    probs: np.ndarray

    @property
    def num_messages(self) -> int:
        return len(self.alphabet) ** self.n

    def log_prior(self) -> np.ndarray:
        out = np.full(self.num_messages, -np.inf)
        with np.errstate(divide="ignore"):
            out[self.support] = np.log(self.probs)
        return out


def dms_source(pa: Pmf, n: int) -> SourceModel:
    _check_size(len(pa), n, "A")
    digits = _digits(np.arange(len(pa) ** n), len(pa), n)
    probs = np.prod(pa.probs[digits], axis=1)
    return SourceModel(n, pa.labels, np.arange(probs.size), probs)


def type_source(t: NType, fraction: float = 1.0) -> SourceModel:
    """Uniform over the first ``ceil(fraction |T|)`` members of ``T(t)`` in rank order."""
    if not 0 < fraction <= 1:
        raise ValueError("q_support_fraction must lie in (0, 1]")
    members = type_class_codes(t)
    k = max(1, math.ceil(fraction * members.size - 1e-9))
    return SourceModel(t.n, t.alphabet, members[:k], np.full(k, 1.0 / k))


# Decoding ---------------------------------------------------------------------

def codewords(code: CodeTable, channel: Dmc | FactoredDmc, permuter: Permuter | None = None) -> np.ndarray:
    """Channel-input indices ``x^n`` for every message, shape ``(|A|^n, n)``."""
    rows = code.table.shape[0]
    src = permuter.mapping(rows) if permuter is not None else np.arange(rows)
    if not code.systematic:
        return code.table[src]
    if not isinstance(channel, FactoredDmc):
        raise TypeError("systematic codes need a factored channel")
    a_digits = _digits(src, len(code.a_alphabet), code.n)
    return channel.index_map[a_digits, code.table[src]]


def _log_w(channel) -> np.ndarray:
    """Natural-log transition matrix indexed ``[y, x]``."""
    w = channel.base.w if isinstance(channel, FactoredDmc) else channel.w
    with np.errstate(divide="ignore"):
        return np.ascontiguousarray(np.log(w).T)


def _pick(metric: np.ndarray) -> np.ndarray:
    """Row-wise argmax with near-ties (relative 1e-9) resolved to the smallest index."""
    best = metric.max(axis=-1, keepdims=True)
    with np.errstate(invalid="ignore"):
        thresh = best - TIE_RTOL * (1.0 + np.abs(best))
        hits = metric >= thresh
    return np.argmax(hits.view(np.uint8), axis=-1)


def _decode_one(y_idx, cw: np.ndarray, logw: np.ndarray, log_prior: np.ndarray) -> int:
    metric = log_prior.copy()
    for i, y in enumerate(y_idx):
        metric += logw[y, cw[:, i]]
    return int(_pick(metric))


def _y_indices(y_seq, channel) -> list[int]:
    base = channel.base if isinstance(channel, FactoredDmc) else channel
    out = []
    for y in y_seq:
        if isinstance(y, (int, np.integer)) and y not in base.output_labels:
            out.append(int(y))
        else:
            out.append(base.output_labels.index(y))
    return out


def map_decode(y_seq, code: CodeTable, source: SourceModel | Pmf, channel) -> tuple:
    """MAP decision over the support of the true source (all of A^n for a DMS prior)."""
    if isinstance(source, Pmf):
        source = dms_source(source, code.n)
    cw = codewords(code, channel)
    msg = _decode_one(_y_indices(y_seq, channel), cw, _log_w(channel), source.log_prior())
    return tuple(code.a_alphabet[j] for j in _digits([msg], len(code.a_alphabet), code.n)[0])


def mmap_decode(y_seq, code: CodeTable, pa: Pmf, channel, permuter: Permuter | None = None) -> tuple:
    """Decision with the memoryless prior ``pa^n`` over every ``a^n``, whatever the true source."""
    cw = codewords(code, channel, permuter)
    prior = dms_source(pa, code.n).log_prior()
    msg = _decode_one(_y_indices(y_seq, channel), cw, _log_w(channel), prior)
    return tuple(code.a_alphabet[j] for j in _digits([msg], len(code.a_alphabet), code.n)[0])


def exact_error_from_codewords(cw: np.ndarray, logw: np.ndarray, log_prior: np.ndarray,
                               source: SourceModel) -> float:
    """Exact block error probability by enumerating every ``y^n``.

    Output sequences are split as prefix + suffix; suffix log-likelihoods are
    tabulated once and each prefix adds its own row offset.
    """
    num_msgs, n = cw.shape
    ny = logw.shape[0]
    _check_size(ny, n, "Y")
    per_pos = [logw[:, cw[:, i]] for i in range(n)]  # each (ny, num_msgs)
    p = 0
    while p < n and ny ** (n - p) * num_msgs > _CHUNK_ENTRIES:
        p += 1
    suffix = np.zeros((1, num_msgs))
    for i in range(p, n):
        suffix = (suffix[:, None, :] + per_pos[i][None, :, :]).reshape(-1, num_msgs)

    support, q = source.support, source.probs
    prior_s = log_prior[support]
    if not np.all(np.isfinite(prior_s)):
        raise ValueError("decoder prior vanishes on a message the source can emit")
    suffix += log_prior
    metric = np.empty_like(suffix)
    total = 0.0
    for prefix in range(ny ** p):
        offset = np.zeros(num_msgs)
        for i, y in enumerate(_digits([prefix], ny, p)[0] if p else []):
            offset += per_pos[i][y]
        np.add(suffix, offset, out=metric)
        dec = _pick(metric)
        lik = np.exp(metric[:, support] - prior_s) * q
        wrong = support[None, :] != dec[:, None]
        total += float(np.sum(lik[wrong]))
    return min(max(total, 0.0), 1.0)


# Experiments ------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SimConfig:
    setup: str
    n: int
    channel: Dmc | FactoredDmc
    pa: Pmf
    ps: Pmf | None = None
    px: Pmf | None = None
    pbar: Pmf | None = None
    q_support_fraction: float = 1.0
    ensemble: str = "iid"
    permuter_enabled: bool = True
    num_codes: int = 200
    trials_per_code: int = 1000
    mode: str = "auto"
    seed: int = 0

    def __post_init__(self):
        if self.setup not in SETUPS:
            raise ValueError(f"setup must be one of {SETUPS}")
        if self.ensemble not in ENSEMBLES:
            raise ValueError(f"ensemble must be one of {ENSEMBLES}")
        if self.mode not in ("auto", "exact", "montecarlo"):
            raise ValueError("mode must be auto, exact or montecarlo")
        if self.n < 1 or self.num_codes < 1:
            raise ValueError("n and num_codes must be positive")
        if not 0 < self.q_support_fraction <= 1:
            raise ValueError("q_support_fraction must lie in (0, 1]")
        if self.setup in ("systematic", "pas"):
            if not isinstance(self.channel, FactoredDmc):
                raise ValueError(f"{self.setup} setup needs a factored channel")
            if self.ps is None:
                raise ValueError(f"{self.setup} setup needs ps")
        else:
            if self.px is None:
                raise ValueError(f"{self.setup} setup needs px")
        if self.setup in ("mismatched", "pas") and self.pbar is None:
            raise ValueError(f"{self.setup} setup needs pbar")
        _check_size(len(self.pa), self.n, "A")

    @property
    def dmc(self) -> Dmc:
        return self.channel.base if isinstance(self.channel, FactoredDmc) else self.channel

    @property
    def a_alphabet(self) -> tuple:
        return self.channel.a_labels if self.setup in ("systematic", "pas") else self.pa.labels

    def pbar_type(self) -> NType:
        return NType.from_pmf(self.pbar, self.n)

    def exact_feasible(self) -> bool:
        return self.n * math.log2(len(self.dmc.output_labels)) <= MAX_LOG2_SIZE + 1e-12

    def to_dict(self) -> dict:
        d = {
            "setup": self.setup, "n": self.n,
            "channel": self.channel.to_dict(),
            "pa": self.pa.to_dict(),
            "ps": self.ps.to_dict() if self.ps is not None else None,
            "px": self.px.to_dict() if self.px is not None else None,
            "pbar": self.pbar.to_dict() if self.pbar is not None else None,
            "q_support_fraction": self.q_support_fraction,
            "ensemble": self.ensemble,
            "permuter_enabled": self.permuter_enabled,
            "num_codes": self.num_codes,
            "trials_per_code": self.trials_per_code,
            "mode": self.mode,
            "seed": self.seed,
        }
        return d


@dataclass(frozen=True)
class SimReport:
    """Ensemble-average error estimate checked against ``2**(-n E)``.

    In exact mode ``trials`` counts sampled codes and ``errors`` is the sum
    of their exact error probabilities; in Monte Carlo mode both are
    transmission counts.
    """

    setup: str
    n: int
    mode: str
    trials: int
    errors: float
    p_hat: float
    ci_99_upper: float
    analytic_exponent: float
    analytic_bound: float
    verdict: bool
    rho_star: float = 0.0
    vacuous: bool = False
    codes_within_bound: float = 0.0
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "setup": self.setup, "n": self.n, "mode": self.mode,
            "trials": self.trials, "errors": self.errors, "p_hat": self.p_hat,
            "ci_99_upper": self.ci_99_upper,
            "analytic_exponent": self.analytic_exponent,
            "analytic_bound": self.analytic_bound,
            "rho_star": self.rho_star,
            "verdict": self.verdict, "vacuous": self.vacuous,
            "codes_within_bound": self.codes_within_bound,
            **self.extra,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    CSV_HEADER = ("setup", "n", "exponent_bits", "bound", "p_exact_or_hat", "ci_upper", "verdict")

    def csv_row(self) -> list[str]:
        return [self.setup, str(self.n), f"{self.analytic_exponent:.12g}", f"{self.analytic_bound:.12g}",
                f"{self.p_hat:.12g}", f"{self.ci_99_upper:.12g}", str(self.verdict).lower()]

    def to_csv(self, header: bool = True) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if header:
            writer.writerow(self.CSV_HEADER)
        writer.writerow(self.csv_row())
        return buf.getvalue()


def source_for(config: SimConfig) -> SourceModel:
    """True message law: memoryless ``pa`` for the systematic setup (and the
    classical setup without ``pbar``), otherwise uniform on a rank prefix of
    the type class of ``pbar``."""
    if config.setup == "systematic" or (config.setup == "classical" and config.pbar is None):
        return dms_source(Pmf(config.a_alphabet, config.pa.probs), config.n)
    t = config.pbar_type()
    if t.alphabet != tuple(config.a_alphabet):
        raise ValueError(f"pbar over {t.alphabet} but messages over {config.a_alphabet}")
    return type_source(t, config.q_support_fraction)


def decoder_prior(config: SimConfig, source: SourceModel) -> np.ndarray:
    if config.setup in ("classical", "systematic"):
        return source.log_prior()
    return dms_source(config.pa, config.n).log_prior()


def analytic_exponent(config: SimConfig, source: SourceModel | None = None) -> ExponentResult:
    """The exponent whose bound the setup's ensemble must satisfy at blocklength n."""
    if config.setup == "classical":
        if config.pbar is None:
            renyi = dms_renyi(config.pa)
        else:
            source = source or source_for(config)
            renyi = uniform_renyi(source.support.size, config.n)
        return exponent_eg(config.px, config.dmc, renyi)
    if config.setup == "systematic":
        return exponent_es(config.pa, config.ps, config.channel)
    if config.setup == "mismatched":
        return exponent_em(config.pbar, config.pa, config.px, config.dmc)
    return exponent_esm(config.n, config.pbar, config.pa, config.ps, config.channel)


def sample_code(config: SimConfig, code_index: int) -> CodeTable:
    rng = _rng(config.seed, 0, code_index)
    systematic = config.setup in ("systematic", "pas")
    parity = config.ps if systematic else config.px
    if config.ensemble == "iid":
        return sample_code_iid(config.n, config.a_alphabet, parity, rng, systematic)
    a_bits = _log2_exact(len(config.a_alphabet), "A")
    p_bits = _log2_exact(len(parity), "S" if systematic else "X")
    return sample_code_affine_binary(config.n, a_bits + p_bits, p_bits, rng,
                                     config.a_alphabet, parity.labels, systematic)


def sample_code_permuter(config: SimConfig, code_index: int) -> Permuter | None:
    if config.setup != "pas" or not config.permuter_enabled:
        return None
    return sample_permuter(config.pbar_type(), _rng(config.seed, 1, code_index))


def exact_error_probability(code: CodeTable, config: SimConfig, permuter: Permuter | None = None) -> float:
    """Exact ``P_e`` of one fixed code (and permuter) under the setup's source and decoder."""
    if not config.exact_feasible():
        raise InfeasibleConfig(f"n*log2|Y| = {config.n}*log2({len(config.dmc.output_labels)}) "
                               f"exceeds {MAX_LOG2_SIZE}")
    source = source_for(config)
    cw = codewords(code, config.channel, permuter)
    return exact_error_from_codewords(cw, _log_w(config.channel), decoder_prior(config, source), source)


def monte_carlo_errors(code: CodeTable, config: SimConfig, permuter: Permuter | None,
                       trials: int, code_index: int = 0) -> int:
    """Count decoding errors over ``trials`` simulated transmissions of one code."""
    source = source_for(config)
    cw = codewords(code, config.channel, permuter)
    logw = _log_w(config.channel)
    prior = decoder_prior(config, source)
    cdf_w = np.cumsum(config.dmc.w, axis=1)
    cdf_q = np.cumsum(source.probs)
    errors = 0
    for t in range(trials):
        rng = _rng(config.seed, 2, code_index, t)
        msg = int(source.support[min(np.searchsorted(cdf_q, rng.random() * cdf_q[-1], side="right"),
                                     source.support.size - 1)])
        x = cw[msg]
        u = rng.random(config.n)
        y = [min(int(np.searchsorted(cdf_w[xi], ui, side="right")), cdf_w.shape[1] - 1)
             for xi, ui in zip(x, u)]
        if _decode_one(y, cw, logw, prior) != msg:
            errors += 1
    return errors


def run_ensemble_experiment(config: SimConfig, jobs: int = 1) -> SimReport:
    """Average error probability over ``num_codes`` sampled codes versus the analytic bound.

    Exact mode (default when ``n log2|Y| <= 24``) evaluates each code's
    error probability by full output enumeration; the Wilson 99% interval is
    then taken over code sampling. Monte Carlo mode pools transmissions.
    The verdict is ``ci_99_upper <= bound``. ``jobs > 1`` evaluates codes on a
    thread pool; per-code results are combined in code order either way.
    """
    source = source_for(config)
    exp_res = analytic_exponent(config, source)
    bound = exp_res.bound(config.n)
    exact = config.mode == "exact" or (config.mode == "auto" and config.exact_feasible())
    if config.mode == "exact" and not config.exact_feasible():
        raise InfeasibleConfig(f"n*log2|Y| = {config.n}*log2({len(config.dmc.output_labels)}) "
                               f"exceeds {MAX_LOG2_SIZE}")
    logw = _log_w(config.channel)
    prior = decoder_prior(config, source)

    def one(c):
        code = sample_code(config, c)
        perm = sample_code_permuter(config, c)
        if exact:
            return exact_error_from_codewords(codewords(code, config.channel, perm), logw, prior, source)
        return monte_carlo_errors(code, config, perm, config.trials_per_code, c)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            per_code = list(pool.map(one, range(config.num_codes)))
    else:
        per_code = [one(c) for c in range(config.num_codes)]

    if exact:
        trials = config.num_codes
        errors = float(math.fsum(per_code))
        within = float(np.mean(np.array(per_code) <= bound))
    else:
        trials = config.num_codes * config.trials_per_code
        errors = int(sum(per_code))
        within = float(np.mean(np.array(per_code) / max(config.trials_per_code, 1) <= bound))
    p_hat = errors / trials if trials else 0.0
    _, upper = wilson_interval(errors, trials)
    extra = {
        "support_size": int(source.support.size),
        "ensemble": config.ensemble,
        "permuter_enabled": bool(config.permuter_enabled and config.setup == "pas"),
        "seed": config.seed,
    }
    if exp_res.alpha_n is not None:
        extra["alpha_n"] = exp_res.alpha_n
    if exp_res.penalty is not None:
        extra["penalty_bits"] = exp_res.penalty
    return SimReport(
        setup=config.setup, n=config.n, mode="exact" if exact else "montecarlo",
        trials=trials, errors=errors, p_hat=p_hat, ci_99_upper=upper,
        analytic_exponent=exp_res.exponent, analytic_bound=bound,
        verdict=bool(upper <= bound), rho_star=exp_res.rho_star, vacuous=bool(bound >= 1.0),
        codes_within_bound=within, extra=extra,
    )


__all__ = [
    "CodeTable", "Permuter", "SimConfig", "SimReport", "SourceModel", "InfeasibleConfig",
    "PreconditionError", "sample_code_iid", "sample_code_affine_binary", "affine_code_table",
    "sample_permuter", "map_decode", "mmap_decode", "exact_error_probability",
    "run_ensemble_experiment", "wilson_interval", "dms_source", "type_source", "codewords",
]
