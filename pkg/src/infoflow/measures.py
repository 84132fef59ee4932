"""Entropy-family measures on joint tables, in bits.

All quantities use base-2 logarithms.  Degenerate conventions: the entropy
of an empty axis selection is 0, conditioning on an empty selection is
unconditional, and a multivariate measure with a single part reduces to a
(conditional) entropy.
"""

from __future__ import annotations

import itertools
from collections.abc import Callable, Iterable, Sequence

import numpy as np

from .errors import (
    AbsoluteContinuityViolation,
    EmptyAxisSet,
    OverlappingAxisSets,
    ShapeMismatch,
    TooFewParts,
)
from .table import AxisSet, JointTable, as_axis_set, marginalize


def entropy(table: JointTable) -> float:
    """Shannon entropy of the whole table, in bits."""
    if table._dense is not None:
        flat = table._dense.reshape(-1)
        p = flat[flat > 0.0]
        return float(-(p * np.log2(p)).sum())
    acc = 0.0
    for _, p in table._sparse.items():
        if p > 0.0:
            acc -= p * np.log2(p)
    return float(acc)


def marginal_entropy(table: JointTable, axes: Iterable[int]) -> float:
    """Entropy of the marginal over ``axes``; 0 bits for the empty selection."""
    axis_set = as_axis_set(axes, table.n_axes)
    if not axis_set:
        return 0.0
    if len(axis_set) == table.n_axes:
        return entropy(table)
    return entropy(marginalize(table, axis_set))


def conditional_entropy(
    table: JointTable, targets: Iterable[int], givens: Iterable[int] = ()
) -> float:
    """H(targets | givens) = H(targets, givens) - H(givens)."""
    t = as_axis_set(targets, table.n_axes)
    g = as_axis_set(givens, table.n_axes)
    if not t:
        raise EmptyAxisSet("conditional entropy needs a nonempty target")
    if t & g:
        raise OverlappingAxisSets(f"targets and givens share axes {sorted(t & g)}")
    if not g:
        return marginal_entropy(table, t)
    return marginal_entropy(table, t | g) - marginal_entropy(table, g)


def _check_parts(
    table: JointTable,
    parts: Sequence[Iterable[int]],
    givens: Iterable[int] = (),
    min_parts: int = 2,
) -> tuple[list[AxisSet], AxisSet]:
    sets = [as_axis_set(p, table.n_axes) for p in parts]
    g = as_axis_set(givens, table.n_axes)
    if len(sets) < min_parts:
        raise TooFewParts(f"need at least {min_parts} parts, got {len(sets)}")
    for s in sets:
        if not s:
            raise EmptyAxisSet("every part must be nonempty")
    pool: set[int] = set(g)
    for s in sets:
        if pool & s:
            raise OverlappingAxisSets(f"parts/givens share axes {sorted(pool & s)}")
        pool |= s
    return sets, g


def _inclusion_exclusion(
    h: Callable[[AxisSet], float], parts: Sequence[AxisSet]
) -> float:
    """Multivariate mutual information of ``parts`` via entropy sums.

    With one part this is plainly its entropy; with two it is the ordinary
    mutual information; signs alternate for larger collections, so the
    result may be negative (synergy).
    """
    total = 0.0
    n = len(parts)
    for k in range(1, n + 1):
        sign = 1.0 if k % 2 == 1 else -1.0
        for combo in itertools.combinations(range(n), k):
            union: AxisSet = frozenset()
            for idx in combo:
                union |= parts[idx]
            total += sign * h(union)
    return total


def _co_information(
    h: Callable[[AxisSet], float],
    parts: Sequence[AxisSet],
    givens: AxisSet = frozenset(),
) -> float:
    """Conditional multivariate MI: MI(parts) minus MI(parts + [givens])."""
    base = _inclusion_exclusion(h, parts)
    if not givens:
        return base
    return base - _inclusion_exclusion(h, list(parts) + [givens])


def mutual_information(
    table: JointTable, a: Iterable[int], b: Iterable[int]
) -> float:
    """I(a; b) in bits; nonnegative up to rounding."""
    sets, _ = _check_parts(table, [a, b])
    return _inclusion_exclusion(lambda s: marginal_entropy(table, s), sets)


def conditional_mutual_information(
    table: JointTable, a: Iterable[int], b: Iterable[int], givens: Iterable[int]
) -> float:
    """I(a; b | givens) = H(a | givens) - H(a | b, givens)."""
    sets, g = _check_parts(table, [a, b], givens)
    a_set, b_set = sets
    h = lambda s: marginal_entropy(table, s)
    return h(a_set | g) + h(b_set | g) - h(a_set | b_set | g) - h(g)


def total_correlation(table: JointTable, parts: Sequence[Iterable[int]]) -> float:
    """Sum of part entropies minus the joint entropy; 0 iff parts independent."""
    sets, _ = _check_parts(table, parts)
    h = lambda s: marginal_entropy(table, s)
    union: AxisSet = frozenset()
    for s in sets:
        union |= s
    return sum(h(s) for s in sets) - h(union)


def multivariate_mutual_information(
    table: JointTable, parts: Sequence[Iterable[int]]
) -> float:
    """Inclusion-exclusion multivariate MI; may be negative for 3+ parts."""
    sets, _ = _check_parts(table, parts)
    return _inclusion_exclusion(lambda s: marginal_entropy(table, s), sets)


def multivariate_conditional_mi(
    table: JointTable,
    parts: Sequence[Iterable[int]],
    givens: Iterable[int] = (),
) -> float:
    """Multivariate MI of ``parts`` given ``givens`` (one extra pooled part)."""
    sets, g = _check_parts(table, parts, givens)
    return _co_information(lambda s: marginal_entropy(table, s), sets, g)


def kl_divergence(p: JointTable, q: JointTable) -> float:
    """D(p || q) in bits over a shared tuple space."""
    if p.axes != q.axes or p.arities != q.arities:
        raise ShapeMismatch("tables must share axes and arities")
    acc = 0.0
    for key, mass in p.items():
        if mass <= 0.0:
            continue
        ref = q.probability(key)
        if ref <= 0.0:
            raise AbsoluteContinuityViolation(
                f"p has mass {mass!r} at {key} where q has none"
            )
        acc += mass * (np.log2(mass) - np.log2(ref))
    return float(acc)


class EntropyCache:
    """Memoized subset-marginal entropies of one joint table.

    The exhaustive verifiers evaluate the same marginals thousands of times;
    caching by frozen axis set makes them cheap.
    """

    def __init__(self, table: JointTable) -> None:
        self.table = table
        self._cache: dict[AxisSet, float] = {frozenset(): 0.0}

    def h(self, axes: Iterable[int]) -> float:
        key = axes if isinstance(axes, frozenset) else frozenset(axes)
        found = self._cache.get(key)
        if found is None:
            found = marginal_entropy(self.table, key)
            self._cache[key] = found
        return found

    def co_information(
        self, parts: Sequence[AxisSet], givens: AxisSet = frozenset()
    ) -> float:
        return _co_information(self.h, parts, givens)
