"""Benchmark generators and topology enumeration.

Two data sources: fixed-step RK4 Lorenz trajectories resampled by linear
interpolation, and coupled tent map lattices driven by a dependency graph.
Plus the canonicalization of all off-diagonal boolean dependency matrices
under node relabeling, which defines the benchmark case lists.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from .errors import DivergedTrajectory, NTooLarge, OutOfDomain, ShapeMismatch
from .estimation import RealSeries

#: Low-bit dither amplitude for free-running tent orbits.  Plain float64
#: iteration of the tent map is exact (both branches are representable), so
#: every orbit walks its dyadic start down to exactly 0 within about 60
#: steps.  Adding uniform noise of one part in 2**48 per step keeps the orbit
#: chaotic indefinitely while staying ten orders of magnitude below the
#: symbolization scale, and makes distinct variables genuinely independent.
_TENT_DITHER = 2.0**-48


def tent_map(x: float) -> float:
    """Piecewise-linear unit-interval map: up on [0, 1/2], down on [1/2, 1]."""
    if not 0.0 <= x <= 1.0:
        raise OutOfDomain(f"tent map needs x in [0, 1], got {x}")
    return 2.0 * x if x < 0.5 else 2.0 - 2.0 * x


# -- Lorenz ------------------------------------------------------------------


@dataclass(frozen=True)
class LorenzParams:
    sigma: float = 10.0
    rho: float = 28.0
    beta: float = 8.0 / 3.0
    initial: tuple[float, float, float] = (1.0, 0.5, 0.0)
    t0: float = 50.0
    t1: float = 2050.0
    dt_integrate: float = 1e-3

    def __post_init__(self) -> None:
        if self.dt_integrate <= 0:
            raise ShapeMismatch("dt_integrate must be positive")
        if self.t1 <= self.t0:
            raise ShapeMismatch("need t1 > t0")


def _lorenz_deriv(state: np.ndarray, p: LorenzParams) -> np.ndarray:
    x, y, z = state
    return np.stack(
        (p.sigma * (y - x), x * (p.rho - z) - y, x * y - p.beta * z)
    )


def lorenz_ensemble(
    params: LorenzParams,
    resample_dt: float,
    n_samples: int,
    n_sets: int,
    seed: int,
) -> list[RealSeries]:
    """Integrate n_sets trajectories at once and resample each one.

    Every set starts from params.initial plus an independent uniform[0, 0.01)
    perturbation of each coordinate.  Classical RK4 at dt_integrate; the
    stretch before t0 is transient and discarded; outputs are linear
    interpolations onto the grid t0 + k * resample_dt.
    """
    if resample_dt <= 0:
        raise ShapeMismatch("resample_dt must be positive")
    if n_samples < 2 or n_sets < 1:
        raise ShapeMismatch("need n_samples >= 2 and n_sets >= 1")
    horizon = params.t0 + (n_samples - 1) * resample_dt
    if horizon > params.t1 + 1e-9:
        raise ShapeMismatch(
            f"resample grid ends at t={horizon:g} but integration stops at {params.t1:g}"
        )
    rng = np.random.default_rng(seed)
    state = np.array(params.initial, dtype=np.float64)[:, None] + rng.uniform(
        0.0, 0.01, size=(3, n_sets)
    )
    dt = params.dt_integrate
    out = np.empty((n_sets, 3, n_samples))
    next_k = 0
    step = 0
    t_cur = 0.0
    while next_k < n_samples:
        t_prev, prev = t_cur, state
        k1 = _lorenz_deriv(state, params)
        k2 = _lorenz_deriv(state + 0.5 * dt * k1, params)
        k3 = _lorenz_deriv(state + 0.5 * dt * k2, params)
        k4 = _lorenz_deriv(state + dt * k3, params)
        state = state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        step += 1
        t_cur = step * dt
        if step % 50000 == 0 and not np.all(np.isfinite(state)):
            raise DivergedTrajectory(f"non-finite state at t={t_cur:g}")
        while next_k < n_samples:
            t_sample = params.t0 + next_k * resample_dt
            if t_sample > t_cur + 1e-12:
                break
            w = (t_sample - t_prev) / dt
            out[:, :, next_k] = ((1.0 - w) * prev + w * state).T
            next_k += 1
    if not np.all(np.isfinite(out)):
        raise DivergedTrajectory("non-finite resampled values")
    return [
        RealSeries(out[s], sample_interval=resample_dt) for s in range(n_sets)
    ]


def lorenz_generate(
    params: LorenzParams, resample_dt: float, n_samples: int, seed: int
) -> RealSeries:
    """Single resampled trajectory; see lorenz_ensemble."""
    return lorenz_ensemble(params, resample_dt, n_samples, 1, seed)[0]


# -- dependency graphs -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DependencyGraph:
    """Directed dependency structure; adjacency[j, i] means j feeds i."""

    adjacency: np.ndarray

    def __post_init__(self) -> None:
        adj = np.asarray(self.adjacency, dtype=bool).copy()
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise ShapeMismatch("adjacency must be square")
        np.fill_diagonal(adj, False)
        adj.setflags(write=False)
        object.__setattr__(self, "adjacency", adj)

    @property
    def n_vars(self) -> int:
        return self.adjacency.shape[0]

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(
            (int(j), int(i)) for j, i in np.argwhere(self.adjacency)
        )

    @property
    def n_edges(self) -> int:
        return int(self.adjacency.sum())

    @classmethod
    def from_edges(cls, n_vars: int, edges: Iterable[Sequence[int]]) -> "DependencyGraph":
        adj = np.zeros((n_vars, n_vars), dtype=bool)
        for j, i in edges:
            if not (0 <= j < n_vars and 0 <= i < n_vars):
                raise ShapeMismatch(f"edge ({j}, {i}) outside 0..{n_vars - 1}")
            if j != i:
                adj[j, i] = True
        return cls(adj)

    def to_dict(self) -> dict:
        return {"n_vars": self.n_vars, "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_dict(cls, payload: dict) -> "DependencyGraph":
        return cls.from_edges(int(payload["n_vars"]), payload["edges"])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DependencyGraph):
            return NotImplemented
        return self.adjacency.shape == other.adjacency.shape and bool(
            np.array_equal(self.adjacency, other.adjacency)
        )

    def __hash__(self) -> int:
        return hash((self.n_vars, self.adjacency.tobytes()))


# -- coupled tent map lattice ------------------------------------------------


@dataclass(frozen=True)
class CtmlConfig:
    topology: DependencyGraph
    epsilon: float = 0.2
    noise_amplitude: float = 0.0
    steps: int = 100_000
    burn_in: int = 1000
    seed: int = 0

    def __post_init__(self) -> None:
        if self.epsilon < 0 or self.noise_amplitude < 0:
            raise ShapeMismatch("epsilon and noise_amplitude must be >= 0")
        if self.steps < 1 or self.burn_in < 0:
            raise ShapeMismatch("need steps >= 1 and burn_in >= 0")

    @property
    def n_vars(self) -> int:
        return self.topology.n_vars


def _free_tent_orbit(x0: float, n_steps: int, rng: np.random.Generator) -> np.ndarray:
    """Free-running tent orbit with per-step low-bit dither.

    The dither draws come from the variable's own stream, so orbits of
    distinct variables are independent by construction.
    """
    dither = rng.random(n_steps) * _TENT_DITHER
    ceiling = 1.0 - 2.0**-50
    out = np.empty(n_steps)
    x = x0
    for t in range(n_steps):
        x = 2.0 * x if x < 0.5 else 2.0 - 2.0 * x
        x += dither[t]
        if x > ceiling:
            x = ceiling
        out[t] = x
    return out


def ctml_generate(config: CtmlConfig) -> RealSeries:
    """Iterate the coupled tent map lattice and return the recorded stretch.

    Each variable maps a noisy convex mix of its own value and its graph
    parents' values through the tent map.  One child RNG stream per variable
    (initial value, then one draw per step for noise or dither as needed),
    so output depends only on config and is bit-identical across runs.
    """
    n = config.n_vars
    weights = config.topology.adjacency.T.astype(np.float64)  # [i, j]: j -> i
    degree = weights.sum(axis=1)
    rng_streams = [
        np.random.default_rng(s) for s in np.random.SeedSequence(config.seed).spawn(n)
    ]
    x0 = np.array([float(r.uniform()) for r in rng_streams])
    total = config.burn_in + config.steps
    r = config.noise_amplitude

    # A variable with no drive beyond its own past iterates the bare map,
    # which float64 cannot sustain; those run on the dithered path.
    decoupled = (r == 0.0) & ((config.epsilon == 0.0) | (degree == 0.0))
    values = np.empty((n, total))
    for i in np.flatnonzero(decoupled):
        values[i] = _free_tent_orbit(x0[i], total, rng_streams[i])

    coupled = np.flatnonzero(~decoupled)
    if coupled.size:
        noise = (
            np.stack([rng_streams[i].uniform(0.0, r, size=total) for i in coupled])
            if r > 0.0
            else np.zeros((coupled.size, total))
        )
        w_c = config.epsilon * weights[coupled]
        denom_base = 1.0 + config.epsilon * degree[coupled]
        x = x0.copy()
        for t in range(total):
            # every update reads the previous step's state of ALL variables
            eta = noise[:, t]
            mixed = (x[coupled] + w_c @ x + eta) / (denom_base + eta)
            y = np.where(mixed < 0.5, 2.0 * mixed, 2.0 - 2.0 * mixed)
            x[coupled] = y
            values[coupled, t] = y
            x[decoupled] = values[decoupled, t]
    return RealSeries(values[:, config.burn_in :])


# -- topology enumeration ----------------------------------------------------


@dataclass(frozen=True)
class TopologyClass:
    """One equivalence class of dependency matrices under node relabeling."""

    graph: DependencyGraph = field(compare=False)
    size: int


def _offdiag_cells(n: int) -> list[tuple[int, int]]:
    return [(r, c) for r in range(n) for c in range(n) if r != c]


def _code_to_graph(code: int, n: int) -> DependencyGraph:
    cells = _offdiag_cells(n)
    bits = len(cells)
    adj = np.zeros((n, n), dtype=bool)
    for p, (r, c) in enumerate(cells):
        if code >> (bits - 1 - p) & 1:
            adj[r, c] = True
    return DependencyGraph(adj)


def enumerate_topologies(n_vars: int) -> list[TopologyClass]:
    """All relabeling classes of directed dependency structures.

    Bit p of a code holds off-diagonal cell p in row-major order, most
    significant first, so the numeric minimum over a class is also the
    lexicographically minimal adjacency matrix.  Class sizes always sum to
    2**(N*(N-1)).
    """
    if n_vars > 5:
        raise NTooLarge(f"enumeration is guarded at N <= 5, got {n_vars}")
    if n_vars < 2:
        raise ShapeMismatch("need at least 2 variables")
    cells = _offdiag_cells(n_vars)
    bits = len(cells)
    pos = {cell: p for p, cell in enumerate(cells)}
    shift = {p: bits - 1 - p for p in range(bits)}
    codes = np.arange(1 << bits, dtype=np.uint32)
    best = codes.copy()
    for perm in itertools.permutations(range(n_vars)):
        # image under relabeling: bit at (r, c) lands at (perm[r], perm[c])
        mapping = [shift[pos[(perm[r], perm[c])]] for (r, c) in cells]
        lo_bits = min(10, bits)
        lo_table = np.zeros(1 << lo_bits, dtype=np.uint32)
        hi_table = np.zeros(1 << (bits - lo_bits), dtype=np.uint32)
        for p in range(bits):
            src = shift[p]
            contrib = np.uint32(1) << np.uint32(mapping[p])
            if src < lo_bits:
                idx = np.arange(1 << lo_bits)
                lo_table[(idx >> src) & 1 == 1] |= contrib
            else:
                idx = np.arange(1 << (bits - lo_bits))
                hi_table[(idx >> (src - lo_bits)) & 1 == 1] |= contrib
        permuted = hi_table[codes >> lo_bits] | lo_table[codes & ((1 << lo_bits) - 1)]
        np.minimum(best, permuted, out=best)
    reps, sizes = np.unique(best, return_counts=True)
    return [
        TopologyClass(_code_to_graph(int(code), n_vars), int(size))
        for code, size in zip(reps, sizes)
    ]
