"""Benchmark drivers: topology-recovery scoring and Lorenz lag sweeps.

Both drivers are deterministic functions of their configuration; every
random choice (initial conditions, surrogate shifts, case subsampling)
derives from the master seed through fixed spawn keys, never from run order.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .dynamics import (
    CtmlConfig,
    DependencyGraph,
    LorenzParams,
    TopologyClass,
    ctml_generate,
    enumerate_topologies,
    lorenz_ensemble,
)
from .errors import ShapeMismatch
from .estimation import RealSeries, symbolize_median
from .flows import Conditioning
from .significance import (
    InferenceScore,
    PairCodec,
    PairTest,
    PValueMethod,
    _null_from_codec,
    infer_details,
    p_value,
    score_inference,
)

#: One recording per topology case in the recovery benchmark.
CTML_STEPS_DEFAULT = 100_000
CTML_BURN_IN = 1000

#: Lorenz assembly policy: each set spans this much post-transient time, and
#: the number of sets grows with the sampling interval so every lag sees
#: about 300k samples.
LORENZ_SET_SPAN = 2000.0
LORENZ_TARGET_SAMPLES = 300_000


def _derived_seed(master: int, *key: int) -> int:
    seq = np.random.SeedSequence(master, spawn_key=tuple(key))
    return int(seq.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class CaseRecord:
    """One topology case: ground truth and both inference outcomes."""

    case_index: int
    truth: DependencyGraph
    class_size: int
    estimates: dict[str, DependencyGraph]
    tests: dict[str, tuple[PairTest, ...]]


@dataclass(frozen=True)
class Table1Result:
    n_vars: int
    case_indices: tuple[int, ...]
    scores: dict[str, InferenceScore]
    cases: tuple[CaseRecord, ...]


def select_cases(
    classes: Sequence[TopologyClass], case_limit: int | None, seed: int
) -> list[int]:
    """Indices of benchmark cases; a seeded subset when a limit is given."""
    if case_limit is None or case_limit >= len(classes):
        return list(range(len(classes)))
    if case_limit < 1:
        raise ShapeMismatch("case_limit must be >= 1")
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0xCA5E,)))
    picked = rng.choice(len(classes), size=case_limit, replace=False)
    return sorted(int(i) for i in picked)


def run_table1_bench(
    n_vars: int,
    epsilon: float = 0.2,
    noise_amplitude: float = 0.0,
    steps: int = CTML_STEPS_DEFAULT,
    order: int = 3,
    lag: int = 1,
    alpha: float = 0.01,
    n_surrogates: int = 200,
    seed: int = 0,
    case_limit: int | None = None,
) -> Table1Result:
    """Recover every benchmark topology from its own lattice recording.

    For each canonical dependency class, one coupled tent map run is
    generated with that class as ground truth, then the graph is inferred
    independently under both conditioning modes and scored against the truth.
    Case seeds key on the position in the full canonical list, so a
    subsampled run uses the same data as the corresponding full run.
    """
    classes = enumerate_topologies(n_vars)
    indices = select_cases(classes, case_limit, seed)
    records: list[CaseRecord] = []
    for case_index in indices:
        cls = classes[case_index]
        config = CtmlConfig(
            topology=cls.graph,
            epsilon=epsilon,
            noise_amplitude=noise_amplitude,
            steps=steps,
            burn_in=CTML_BURN_IN,
            seed=_derived_seed(seed, case_index, 0),
        )
        symbols = symbolize_median(ctml_generate(config))
        estimates: dict[str, DependencyGraph] = {}
        tests: dict[str, tuple[PairTest, ...]] = {}
        for mode_idx, mode in enumerate(
            (Conditioning.MULTIVARIATE, Conditioning.PAIRWISE)
        ):
            graph, detail = infer_details(
                symbols,
                order,
                lag,
                mode,
                alpha,
                n_surrogates,
                seed=_derived_seed(seed, case_index, 1 + mode_idx),
            )
            estimates[mode.value] = graph
            tests[mode.value] = tuple(detail)
        records.append(
            CaseRecord(case_index, cls.graph, cls.size, estimates, tests)
        )
    truth = [r.truth for r in records]
    scores = {
        mode.value: score_inference([r.estimates[mode.value] for r in records], truth)
        for mode in (Conditioning.MULTIVARIATE, Conditioning.PAIRWISE)
    }
    return Table1Result(n_vars, tuple(indices), scores, tuple(records))


@dataclass(frozen=True)
class SweepRow:
    lag: float
    source: int
    target: int
    statistic: float
    p_value: float
    significant: bool


@dataclass(frozen=True)
class LagSweepResult:
    mode: Conditioning
    rows: tuple[SweepRow, ...]

    def at_lag(self, lag: float) -> list[SweepRow]:
        return [r for r in self.rows if r.lag == lag]


def lorenz_set_count(resample_dt: float) -> int:
    """Number of independent sets assembled for one sampling interval."""
    return max(1, int(LORENZ_TARGET_SAMPLES * resample_dt / LORENZ_SET_SPAN))


def lorenz_segments(
    resample_dt: float, seed: int, params: LorenzParams | None = None
) -> list[RealSeries]:
    """Independent resampled trajectories per the assembly policy."""
    params = params or LorenzParams(t0=50.0, t1=50.0 + LORENZ_SET_SPAN)
    n_samples = int(LORENZ_SET_SPAN / resample_dt)
    return lorenz_ensemble(
        params, resample_dt, n_samples, lorenz_set_count(resample_dt), seed
    )


def pooled_median_symbols(segments: Sequence[RealSeries]) -> list[np.ndarray]:
    """Binary symbols per segment, split at the pooled per-variable median."""
    stacked = np.concatenate([s.values for s in segments], axis=1)
    med = np.median(stacked, axis=1, keepdims=True)
    return [(s.values >= med).astype(np.int64) for s in segments]


def sweep_segments(
    segments: Sequence[np.ndarray],
    arities: Sequence[int],
    lag_value: float,
    order: int,
    mode: Conditioning,
    alpha: float,
    n_surrogates: int,
    seed: int,
) -> list[SweepRow]:
    """All directed-pair tests on one segmented recording."""
    n = len(arities)
    rows = []
    for j in range(n):
        for i in range(n):
            if i == j:
                continue
            codec = PairCodec(segments, arities, j, i, order, 1, mode)
            observed = codec.statistic()
            null = _null_from_codec(
                codec, f"T[{j}->{i}|{mode.value}]", j, i, n_surrogates, seed
            )
            p = p_value(null, observed, PValueMethod.EMPIRICAL)
            rows.append(SweepRow(lag_value, j, i, observed, p, p < alpha))
    return rows


def run_lorenz_sweep(
    lags: Sequence[float],
    order: int = 1,
    mode: Conditioning = Conditioning.MULTIVARIATE,
    alpha: float = 0.01,
    n_surrogates: int = 200,
    seed: int = 0,
    params: LorenzParams | None = None,
) -> LagSweepResult:
    """Directed statistics between the three coordinates across lags.

    Each lag integrates its own ensemble, resamples at the lag, splits at
    the pooled median and tests all six ordered pairs.  Window counting
    never crosses set boundaries, and each surrogate shifts every set
    independently.
    """
    if not lags:
        raise ShapeMismatch("need at least one lag")
    rows: list[SweepRow] = []
    for lag_idx, lag_value in enumerate(lags):
        segments = lorenz_segments(
            float(lag_value), _derived_seed(seed, lag_idx, 1), params
        )
        symbols = pooled_median_symbols(segments)
        rows.extend(
            sweep_segments(
                symbols,
                (2, 2, 2),
                float(lag_value),
                order,
                mode,
                alpha,
                n_surrogates,
                _derived_seed(seed, lag_idx, 7),
            )
        )
    return LagSweepResult(mode, tuple(rows))


def run_series_sweep(
    series: RealSeries,
    lags: Sequence[int],
    order: int,
    mode: Conditioning,
    alpha: float = 0.01,
    n_surrogates: int = 200,
    seed: int = 0,
) -> LagSweepResult:
    """Sweep integer sample lags on a user-provided recording."""
    if not lags:
        raise ShapeMismatch("need at least one lag")
    symbols = symbolize_median(series)
    rows: list[SweepRow] = []
    for lag_idx, lag_value in enumerate(lags):
        n = symbols.n_vars
        for j in range(n):
            for i in range(n):
                if i == j:
                    continue
                codec = PairCodec(
                    [symbols.symbols], symbols.arities, j, i, order, int(lag_value), mode
                )
                observed = codec.statistic()
                null = _null_from_codec(
                    codec,
                    f"T[{j}->{i}|{mode.value}]",
                    j,
                    i,
                    n_surrogates,
                    _derived_seed(seed, lag_idx, 7),
                )
                p = p_value(null, observed, PValueMethod.EMPIRICAL)
                rows.append(SweepRow(float(lag_value), j, i, observed, p, p < alpha))
    return LagSweepResult(mode, tuple(rows))
