"""Surrogate nulls for zero transfer, edge inference and scoring.

The null for "no transfer from j to i" is built by circularly shifting j's
symbol column, which keeps j's autocorrelation but destroys its timing
relative to everything else.  Recounting windows from scratch for every
surrogate would dominate the benchmarks, so the codec below encodes the
windows once and realizes a shifted source as a roll of one precomputed
integer array; only two histograms per surrogate remain.
"""

from __future__ import annotations

import os
import warnings
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import stats

from .errors import DegenerateNull, SeriesTooShort, ShapeMismatch, UnfittedNull
from .dynamics import DependencyGraph
from .estimation import RealSeries, SymbolSeries, symbolize_median
from .flows import Conditioning

MIN_SURROGATES = 20


def worker_count() -> int:
    """Worker cap from INFOFLOW_THREADS; defaults to single-threaded."""
    raw = os.environ.get("INFOFLOW_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _entropy_from_counts(counts: np.ndarray, total: int) -> float:
    occupied = counts[counts > 0].astype(np.float64)
    return float(np.log2(total) - occupied @ np.log2(occupied) / total)


class PairCodec:
    """Window codes of one directed pair over fixed data segments.

    The statistic is H(YG) + H(GS) - H(YGS) - H(G) with Y the target's
    present, S the source's past window and G the conditioning pasts.  Y and
    G do not move under source shifts, so their entropies are cached; a
    shifted source's window codes are a circular roll of ``code_s``.
    """

    def __init__(
        self,
        segments: Sequence[np.ndarray],
        arities: Sequence[int],
        source: int,
        target: int,
        order: int,
        lag: int,
        mode: Conditioning,
    ) -> None:
        if source == target:
            raise ShapeMismatch("source and target must differ")
        n = len(arities)
        span = order * lag
        m_src = int(arities[source])
        m_tgt = int(arities[target])
        if mode is Conditioning.PAIRWISE:
            cond_vars = [target]
        else:
            cond_vars = [v for v in range(n) if v != source]
        n_g = 1
        for v in cond_vars:
            n_g *= int(arities[v]) ** order
        self.n_s = m_src**order
        self.n_g = n_g
        self.n_yg = n_g * m_tgt
        self._per_segment: list[tuple[np.ndarray, np.ndarray, np.ndarray]] = []
        self.segment_lengths: list[int] = []
        self.total = 0
        counts_yg = np.zeros(self.n_yg, dtype=np.int64)
        counts_g = np.zeros(self.n_g, dtype=np.int64)
        for sym in segments:
            length = sym.shape[1]
            if length <= span or length < 8:
                raise SeriesTooShort(
                    f"segment of length {length} too short for order {order}, lag {lag}"
                )
            windows = length - span
            code_g = np.zeros(windows, dtype=np.int64)
            for v in cond_vars:
                for d in range(1, order + 1):
                    code_g *= int(arities[v])
                    code_g += sym[v, span - d * lag : length - d * lag]
            code_yg = code_g * m_tgt + sym[target, span:]
            code_s = np.zeros(length, dtype=np.int64)
            for d in range(1, order + 1):
                code_s *= m_src
                code_s += np.roll(sym[source], d * lag)
            self._per_segment.append((code_yg * self.n_s, code_g * self.n_s, code_s))
            self.segment_lengths.append(length)
            self.total += windows
            counts_yg += np.bincount(code_yg, minlength=self.n_yg)
            counts_g += np.bincount(code_g, minlength=self.n_g)
        self._span = span
        self._h_yg = _entropy_from_counts(counts_yg, self.total)
        self._h_g = _entropy_from_counts(counts_g, self.total)

    def statistic(self, shifts: Sequence[int] | None = None) -> float:
        """Transfer statistic with each segment's source rolled by a shift."""
        counts_gs = np.zeros(self.n_g * self.n_s, dtype=np.int64)
        counts_ygs = np.zeros(self.n_yg * self.n_s, dtype=np.int64)
        for idx, (yg_scaled, g_scaled, code_s) in enumerate(self._per_segment):
            shift = 0 if shifts is None else int(shifts[idx])
            rolled = np.roll(code_s, shift)[self._span :] if shift else code_s[self._span :]
            counts_gs += np.bincount(g_scaled + rolled, minlength=counts_gs.size)
            counts_ygs += np.bincount(yg_scaled + rolled, minlength=counts_ygs.size)
        h_gs = _entropy_from_counts(counts_gs, self.total)
        h_ygs = _entropy_from_counts(counts_ygs, self.total)
        return self._h_yg + h_gs - h_ygs - self._h_g


def _surrogate_shifts(
    master_seed: int, source: int, target: int, index: int, lengths: Sequence[int]
) -> list[int]:
    """Per-segment circular shifts for one surrogate, schedule-independent."""
    seq = np.random.SeedSequence(master_seed, spawn_key=(source, target, index))
    rng = np.random.default_rng(seq)
    return [int(rng.integers(n // 4, 3 * n // 4 + 1)) for n in lengths]


class PValueMethod(Enum):
    EMPIRICAL = "empirical"
    GAMMA = "gamma"

    @classmethod
    def parse(cls, token: str) -> "PValueMethod":
        for member in cls:
            if token.lower() in (member.value, member.name.lower()):
                return member
        raise ValueError(f"unknown p-value method {token!r}")


@dataclass(frozen=True)
class NullModel:
    """Surrogate distribution of one transfer statistic, in bits."""

    statistic_name: str
    samples: tuple[float, ...]
    gamma_shape: float | None
    gamma_scale: float | None

    @property
    def n_surrogates(self) -> int:
        return len(self.samples)

    @property
    def fitted(self) -> bool:
        return self.gamma_shape is not None


def _fit_null(name: str, samples: np.ndarray) -> NullModel:
    mean = float(samples.mean())
    var = float(samples.var())
    if var == 0.0:
        warnings.warn(
            f"{name}: zero-variance null, gamma fit skipped", DegenerateNull,
            stacklevel=3,
        )
        shape = scale = None
    else:
        shape = mean * mean / var
        scale = var / mean
    return NullModel(name, tuple(float(s) for s in samples), shape, scale)


def _null_from_codec(
    codec: PairCodec,
    name: str,
    source: int,
    target: int,
    n_surrogates: int,
    seed: int,
) -> NullModel:
    if n_surrogates < MIN_SURROGATES:
        raise ShapeMismatch(f"need at least {MIN_SURROGATES} surrogates")
    samples = np.empty(n_surrogates)
    for s in range(n_surrogates):
        shifts = _surrogate_shifts(seed, source, target, s, codec.segment_lengths)
        samples[s] = codec.statistic(shifts)
    return _fit_null(name, samples)


def surrogate_null(
    symbols: SymbolSeries,
    source: int,
    target: int,
    order: int,
    lag: int,
    mode: Conditioning = Conditioning.MULTIVARIATE,
    n_surrogates: int = 200,
    seed: int = 0,
) -> NullModel:
    """Null distribution of the (source -> target) transfer statistic."""
    codec = PairCodec(
        [symbols.symbols], symbols.arities, source, target, order, lag, mode
    )
    name = f"T[{source}->{target}|{mode.value}]"
    return _null_from_codec(codec, name, source, target, n_surrogates, seed)


def p_value(null: NullModel, observed: float, method: PValueMethod) -> float:
    """Upper-tail probability of the observed statistic under the null."""
    if method is PValueMethod.EMPIRICAL:
        exceed = sum(1 for s in null.samples if s >= observed)
        return (1 + exceed) / (1 + null.n_surrogates)
    if not null.fitted:
        raise UnfittedNull(f"{null.statistic_name}: gamma parameters unavailable")
    return float(stats.gamma.sf(observed, a=null.gamma_shape, scale=null.gamma_scale))


@dataclass(frozen=True)
class PairTest:
    """Outcome of one directed-pair significance test."""

    source: int
    target: int
    statistic: float
    p_value: float
    significant: bool

    def to_dict(self) -> dict:
        return {
            "from": self.source,
            "to": self.target,
            "statistic_bits": self.statistic,
            "p_value": self.p_value,
            "significant": self.significant,
        }


def _test_pairs(
    segments: Sequence[np.ndarray],
    arities: Sequence[int],
    order: int,
    lag: int,
    mode: Conditioning,
    alpha: float,
    n_surrogates: int,
    seed: int,
) -> list[PairTest]:
    n = len(arities)
    pairs = [(j, i) for j in range(n) for i in range(n) if i != j]

    def run(pair: tuple[int, int]) -> PairTest:
        j, i = pair
        codec = PairCodec(segments, arities, j, i, order, lag, mode)
        observed = codec.statistic()
        null = _null_from_codec(
            codec, f"T[{j}->{i}|{mode.value}]", j, i, n_surrogates, seed
        )
        p = p_value(null, observed, PValueMethod.EMPIRICAL)
        return PairTest(j, i, observed, p, p < alpha)

    workers = worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run, pairs))
    return [run(pair) for pair in pairs]


def infer_details(
    series: RealSeries | SymbolSeries,
    order: int,
    lag: int,
    mode: Conditioning = Conditioning.MULTIVARIATE,
    alpha: float = 0.01,
    n_surrogates: int = 200,
    seed: int = 0,
) -> tuple[DependencyGraph, list[PairTest]]:
    """Test every directed pair; edge present iff its p-value beats alpha.

    Per-pair surrogate streams derive from (seed, source, target, surrogate
    index), so the result is independent of evaluation order and of
    INFOFLOW_THREADS.
    """
    symbols = symbolize_median(series) if isinstance(series, RealSeries) else series
    tests = _test_pairs(
        [symbols.symbols], symbols.arities, order, lag, mode, alpha, n_surrogates, seed
    )
    adj = np.zeros((symbols.n_vars, symbols.n_vars), dtype=bool)
    for t in tests:
        adj[t.source, t.target] = t.significant
    return DependencyGraph(adj), tests


def infer_graph(
    series: RealSeries | SymbolSeries,
    order: int,
    lag: int,
    mode: Conditioning = Conditioning.MULTIVARIATE,
    alpha: float = 0.01,
    n_surrogates: int = 200,
    seed: int = 0,
) -> DependencyGraph:
    return infer_details(series, order, lag, mode, alpha, n_surrogates, seed)[0]


@dataclass(frozen=True)
class InferenceScore:
    """Pair- and case-level accuracy of inferred graphs vs ground truth."""

    pair_accuracy: float
    case_accuracy: float
    confusion: dict[str, int]

    def to_dict(self) -> dict:
        return {
            "pair_accuracy": self.pair_accuracy,
            "case_accuracy": self.case_accuracy,
            "confusion": dict(self.confusion),
        }


def score_inference(
    estimated: Sequence[DependencyGraph], truth: Sequence[DependencyGraph]
) -> InferenceScore:
    """Score off-diagonal edge decisions over matched case lists."""
    if len(estimated) != len(truth):
        raise ShapeMismatch(
            f"{len(estimated)} estimates vs {len(truth)} ground-truth cases"
        )
    if not truth:
        raise ShapeMismatch("nothing to score")
    tp = fp = tn = fn = 0
    perfect = 0
    for est, ref in zip(estimated, truth):
        if est.n_vars != ref.n_vars:
            raise ShapeMismatch("estimate and truth differ in n_vars")
        off = ~np.eye(ref.n_vars, dtype=bool)
        e = est.adjacency[off]
        r = ref.adjacency[off]
        tp += int(np.sum(e & r))
        fp += int(np.sum(e & ~r))
        tn += int(np.sum(~e & ~r))
        fn += int(np.sum(~e & r))
        perfect += int(np.array_equal(e, r))
    total = tp + fp + tn + fn
    return InferenceScore(
        pair_accuracy=(tp + tn) / total,
        case_accuracy=perfect / len(truth),
        confusion={
            "true_pos": tp,
            "false_pos": fp,
            "true_neg": tn,
            "false_neg": fn,
        },
    )
