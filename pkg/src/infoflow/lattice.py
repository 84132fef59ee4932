"""Per-step information terms of finite-horizon systems, and their identities.

A system here is a joint table over N variables at T time steps (1-based).
The elementary quantity is the *lattice term*: the multivariate conditional
mutual information of one chosen time step per participating variable, each
conditioned on that variable's own strict past.  Summing lattice terms over
all time assignments recovers the multivariate mutual information of the
full histories, which is what the verifiers in this module check, together
with the peel-one-step chain rule and the partial-expansion identity.

All verifiers evaluate marginals exhaustively and refuse systems whose
tuple space exceeds ``LATTICE_CELL_LIMIT`` cells.
"""

from __future__ import annotations

import itertools
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .errors import (
    EmptyAxisSet,
    IndexOutOfRange,
    OverlappingAxisSets,
    ShapeMismatch,
    SystemTooLarge,
)
from .measures import EntropyCache
from .table import AxisLabel, AxisSet, JointTable

LATTICE_CELL_LIMIT = 1 << 20

EMPTY = None  # placeholder for a variable that does not participate in a term

IDENTITY_TOLERANCE = 1e-9


@dataclass(frozen=True)
class LatticeIndex:
    """One time step per participating variable; ``None`` marks a bystander."""

    times: tuple[int | None, ...]

    def __post_init__(self) -> None:
        if not any(t is not None for t in self.times):
            raise IndexOutOfRange("a lattice index needs at least one entry")


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of one identity or inequality check.

    For identities ``gap = lhs - rhs``; for inequalities ``gap`` is the
    violation amount (0 when satisfied).  ``passed`` iff ``|gap|`` is within
    ``tolerance``.
    """

    identity_name: str
    lhs: float
    rhs: float
    gap: float
    tolerance: float
    passed: bool

    @classmethod
    def for_identity(
        cls, name: str, lhs: float, rhs: float, tolerance: float = IDENTITY_TOLERANCE
    ) -> "VerificationReport":
        gap = lhs - rhs
        return cls(name, lhs, rhs, gap, tolerance, abs(gap) <= tolerance)

    @classmethod
    def for_lower_bound(
        cls, name: str, lhs: float, rhs: float, tolerance: float
    ) -> "VerificationReport":
        """Check ``lhs >= rhs`` within tolerance; gap is the shortfall."""
        gap = max(0.0, rhs - lhs)
        return cls(name, lhs, rhs, gap, tolerance, gap <= tolerance)

    def to_dict(self) -> dict:
        return {
            "identity": self.identity_name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "gap": self.gap,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def system_axes(n_vars: int, t_steps: int) -> tuple[AxisLabel, ...]:
    """Variable-major axis layout: (var 0, t=1..T), (var 1, t=1..T), ..."""
    return tuple(
        AxisLabel(v, t) for v in range(n_vars) for t in range(1, t_steps + 1)
    )


def random_system(
    n_vars: int, t_steps: int, seed: int, arity: int = 2
) -> JointTable:
    """A full-support random joint table over the N x T grid."""
    axes = system_axes(n_vars, t_steps)
    cells = arity ** (n_vars * t_steps)
    if cells > LATTICE_CELL_LIMIT:
        raise SystemTooLarge(f"{cells} cells exceed the dense guard")
    rng = np.random.Generator(np.random.PCG64(seed))
    weights = rng.exponential(size=cells)
    dense = (weights / weights.sum()).reshape((arity,) * len(axes))
    return JointTable._from_dense(axes, (arity,) * len(axes), dense)


class SystemView:
    """Axis bookkeeping plus a shared entropy cache for one system table."""

    def __init__(self, table: JointTable) -> None:
        if table.cells > LATTICE_CELL_LIMIT:
            raise SystemTooLarge(
                f"{table.cells} cells exceed the {LATTICE_CELL_LIMIT}-cell guard"
            )
        self.table = table
        self._pos: dict[tuple[int, int], int] = {}
        variables: set[int] = set()
        times: set[int] = set()
        for position, label in enumerate(table.axes):
            self._pos[(label.variable_id, label.time_offset)] = position
            variables.add(label.variable_id)
            times.add(label.time_offset)
        self.variables = tuple(sorted(variables))
        self.n_vars = len(self.variables)
        if min(times) < 1:
            raise ShapeMismatch("system axes must use 1-based time indices")
        self.t_steps = max(times)
        for v in self.variables:
            for t in range(1, self.t_steps + 1):
                if (v, t) not in self._pos:
                    raise ShapeMismatch(f"missing axis for variable {v} at t={t}")
        self.cache = EntropyCache(table)

    def pos(self, variable: int, t: int) -> int:
        try:
            return self._pos[(variable, t)]
        except KeyError:
            raise IndexOutOfRange(f"no axis for variable {variable} at t={t}") from None

    def step(self, variable: int, t: int) -> AxisSet:
        return frozenset((self.pos(variable, t),))

    def past(self, variable: int, t: int) -> AxisSet:
        """Strict past of one variable: times 1..t-1."""
        return frozenset(self.pos(variable, s) for s in range(1, t))

    def history(self, variable: int, t: int | None = None) -> AxisSet:
        """Times 1..t (defaults to the full horizon)."""
        upto = self.t_steps if t is None else t
        return frozenset(self.pos(variable, s) for s in range(1, upto + 1))

    def lattice_term_value(self, index: LatticeIndex) -> float:
        if len(index.times) != self.n_vars:
            raise IndexOutOfRange(
                f"index has {len(index.times)} entries for {self.n_vars} variables"
            )
        parts: list[AxisSet] = []
        givens: set[int] = set()
        for v, t in zip(self.variables, index.times):
            if t is EMPTY:
                continue
            if not 1 <= t <= self.t_steps:
                raise IndexOutOfRange(f"t={t} outside 1..{self.t_steps}")
            parts.append(self.step(v, t))
            givens |= self.past(v, t)
        return self.cache.co_information(parts, frozenset(givens))

    def group_history_mi(self, groups: Sequence[Sequence[int]]) -> float:
        """Multivariate MI of full per-group histories."""
        parts = []
        for group in groups:
            union: AxisSet = frozenset()
            for v in group:
                union |= self.history(v)
            parts.append(union)
        return self.cache.co_information(parts)


def lattice_term(system: JointTable, index: LatticeIndex) -> float:
    """Value of one lattice term, in bits.

    With a single participating variable this is the conditional entropy of
    that step given its own strict past; with two it is a conditional mutual
    information (nonnegative); with three or more it may be negative.
    """
    return SystemView(system).lattice_term_value(index)


def verify_identity_lemma1(
    system: JointTable,
    parts: Sequence[Sequence[int]],
    conditioner: Sequence[int],
) -> VerificationReport:
    """Conditioning identity: pooling the conditioner as an extra part.

    I(parts | Y) must equal I(parts[:-1]; last+Y) - I(parts[:-1]; Y).
    """
    view = SystemView(system)
    n = view.table.n_axes
    part_sets = [frozenset(int(p) for p in s) for s in parts]
    cond = frozenset(int(p) for p in conditioner)
    for s in part_sets + [cond]:
        for p in s:
            if not 0 <= p < n:
                raise ShapeMismatch(f"axis position {p} outside table")
    lhs = view.cache.co_information(part_sets, cond)
    if cond:
        head = part_sets[:-1]
        rhs = view.cache.co_information(
            head + [part_sets[-1] | cond]
        ) - view.cache.co_information(head + [cond])
    else:
        rhs = view.cache.co_information(part_sets)
    return VerificationReport.for_identity("conditioning_pooling", lhs, rhs)


def verify_chain_rule_lemma2(
    system: JointTable,
    group_sizes: Sequence[int],
    t_max: int | None = None,
) -> VerificationReport:
    """Peel the last group's history one step at a time.

    Variables are partitioned in order into groups of the given sizes.  The
    multivariate MI of the group histories (the last truncated at ``t_max``)
    must equal the sum over t of the per-step terms where the last group's
    presents are one part conditioned on that group's joint strict past.
    With a single group this is the chain rule of entropy.
    """
    view = SystemView(system)
    if sum(group_sizes) != view.n_vars or any(g < 1 for g in group_sizes):
        raise ShapeMismatch(
            f"group sizes {tuple(group_sizes)} do not partition {view.n_vars} variables"
        )
    upto = view.t_steps if t_max is None else t_max
    if not 1 <= upto <= view.t_steps:
        raise IndexOutOfRange(f"t_max={upto} outside 1..{view.t_steps}")
    groups: list[list[int]] = []
    cursor = 0
    for size in group_sizes:
        groups.append(list(view.variables[cursor : cursor + size]))
        cursor += size

    def union_history(group: list[int], t: int) -> AxisSet:
        out: AxisSet = frozenset()
        for v in group:
            out |= view.history(v, t)
        return out

    head = [union_history(g, view.t_steps) for g in groups[:-1]]
    last = groups[-1]
    lhs = view.cache.co_information(head + [union_history(last, upto)])
    rhs = 0.0
    for t in range(1, upto + 1):
        present: AxisSet = frozenset()
        past: AxisSet = frozenset()
        for v in last:
            present |= view.step(v, t)
            past |= view.past(v, t)
        rhs += view.cache.co_information(head + [present], past)
    return VerificationReport.for_identity("history_peel_chain_rule", lhs, rhs)


def verify_joint_entropy_decomposition(system: JointTable) -> VerificationReport:
    """Joint entropy as the alternating sum of group history MIs.

    H(everything) must equal sum over nonempty variable subsets S of
    (-1)^(|S|+1) I(histories of S), each history MI being itself the sum of
    lattice terms over that subset's time grid.
    """
    view = SystemView(system)
    rhs = 0.0
    for k in range(1, view.n_vars + 1):
        sign = 1.0 if k % 2 == 1 else -1.0
        for subset in itertools.combinations(view.variables, k):
            subset_sum = 0.0
            for times in itertools.product(
                range(1, view.t_steps + 1), repeat=len(subset)
            ):
                entry: list[int | None] = [EMPTY] * view.n_vars
                for v, t in zip(subset, times):
                    entry[view.variables.index(v)] = t
                subset_sum += view.lattice_term_value(LatticeIndex(tuple(entry)))
            rhs += sign * subset_sum
    lhs = view.cache.h(frozenset(range(view.table.n_axes)))
    return VerificationReport.for_identity("joint_entropy_decomposition", lhs, rhs)


def verify_partial_expansion(
    system: JointTable,
    k: int,
    times: Sequence[int] | None = None,
) -> VerificationReport:
    """Expand a k-variable conditional term over the remaining variables.

    The term with variables 1..k active at their chosen steps, conditioned on
    their own strict pasts and on the *full* histories of the rest, must
    equal the alternating sum, over subsets s of the rest, of lattice terms
    with s's variables activated at every time up to their horizon.  k = N
    degenerates to a single lattice term on both sides.
    """
    view = SystemView(system)
    if not 1 <= k <= view.n_vars:
        raise IndexOutOfRange(f"k={k} outside 1..{view.n_vars}")
    chosen = (
        tuple(view.t_steps for _ in range(view.n_vars))
        if times is None
        else tuple(int(t) for t in times)
    )
    if len(chosen) != view.n_vars:
        raise ShapeMismatch("one time per variable required")
    for t in chosen:
        if not 1 <= t <= view.t_steps:
            raise IndexOutOfRange(f"t={t} outside 1..{view.t_steps}")

    active = list(view.variables[:k])
    rest = list(view.variables[k:])
    parts = [view.step(v, chosen[i]) for i, v in enumerate(active)]
    givens: set[int] = set()
    for i, v in enumerate(active):
        givens |= view.past(v, chosen[i])
    for K_i, v in zip(chosen[k:], rest):
        givens |= view.history(v, K_i)
    lhs = view.cache.co_information(parts, frozenset(givens))

    rhs = 0.0
    for m in range(0, len(rest) + 1):
        sign = 1.0 if m % 2 == 0 else -1.0
        for subset in itertools.combinations(range(len(rest)), m):
            ranges = [range(1, chosen[k + idx] + 1) for idx in subset]
            for combo in itertools.product(*ranges):
                entry: list[int | None] = [EMPTY] * view.n_vars
                for i, v in enumerate(active):
                    entry[view.variables.index(v)] = chosen[i]
                for idx, t in zip(subset, combo):
                    entry[view.variables.index(rest[idx])] = t
                rhs += sign * view.lattice_term_value(LatticeIndex(tuple(entry)))
    return VerificationReport.for_identity("partial_expansion", lhs, rhs)


def verify_entropy_chain_rule(
    system: JointTable, order: Sequence[int] | None = None
) -> VerificationReport:
    """H(everything) telescopes into one-axis conditionals in any order."""
    view = SystemView(system)
    axes = (
        list(range(system.n_axes)) if order is None else [int(p) for p in order]
    )
    if sorted(axes) != list(range(system.n_axes)):
        raise ShapeMismatch("order must be a permutation of the axis positions")
    lhs = view.cache.h(frozenset(axes))
    rhs = 0.0
    seen: AxisSet = frozenset()
    for p in axes:
        rhs += view.cache.h(seen | {p}) - view.cache.h(seen)
        seen |= {p}
    return VerificationReport.for_identity("chain_rule_entropy", lhs, rhs)


def verify_information_chain_rule(
    system: JointTable,
    left: Sequence[int],
    right_parts: Sequence[Sequence[int]],
) -> VerificationReport:
    """I(A; B1..Bm) accumulates as sum of I(A; Bk | B1..B(k-1))."""
    view = SystemView(system)
    a = frozenset(int(p) for p in left)
    parts = [frozenset(int(p) for p in s) for s in right_parts]
    if not a or not parts or any(not s for s in parts):
        raise EmptyAxisSet("need a nonempty left set and nonempty right parts")
    for p in a.union(*parts):
        if not 0 <= p < system.n_axes:
            raise IndexOutOfRange(f"axis position {p} outside table")
    stacked = frozenset().union(*parts)
    if len(stacked) != sum(len(s) for s in parts) or (a & stacked):
        raise OverlappingAxisSets("left set and right parts must be disjoint")
    lhs = view.cache.co_information([a, stacked])
    rhs = 0.0
    seen: AxisSet = frozenset()
    for s in parts:
        rhs += view.cache.co_information([a, s], seen)
        seen |= s
    return VerificationReport.for_identity("chain_rule_information", lhs, rhs)
