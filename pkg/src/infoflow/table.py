"""Probability tables over labeled discrete tuple spaces.

A :class:`JointTable` assigns probability mass to tuples of symbols.  Each
tuple position is described by an :class:`AxisLabel` naming a random variable
at a time coordinate, so the same container serves both finite-horizon joint
distributions (1-based absolute times) and stationary window distributions
(offset 0 = present, negative offsets = lagged past).

Storage is dense (one ndarray cell per tuple) up to ``DENSE_CELL_LIMIT``
cells and switches to a hash map above that; the two storages are
semantically identical and the choice is invisible to callers.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass

import numpy as np

from .errors import EmptyAxisSet, ShapeMismatch, TupleOutOfRange, ZeroTotalCount

# Any frozenset of axis positions; plain sets/iterables are accepted at call
# sites and normalized internally.
AxisSet = frozenset[int]

MASS_TOLERANCE = 1e-12
DENSE_CELL_LIMIT = 1 << 24


@dataclass(frozen=True, order=True)
class AxisLabel:
    """One random variable at one time coordinate."""

    variable_id: int
    time_offset: int


def _cell_count(arities: tuple[int, ...]) -> int:
    n = 1
    for a in arities:
        n *= a
    return n


class JointTable:
    """Normalized probability mass over a finite labeled tuple space."""

    __slots__ = ("axes", "arities", "_dense", "_sparse")

    axes: tuple[AxisLabel, ...]
    arities: tuple[int, ...]

    def __init__(
        self,
        axes: Iterable[AxisLabel],
        arities: Iterable[int],
        mass: Mapping[tuple[int, ...], float],
        _validate: bool = True,
    ) -> None:
        axes = tuple(axes)
        arities = tuple(int(a) for a in arities)
        if len(axes) != len(arities):
            raise ShapeMismatch(
                f"{len(axes)} axis labels for {len(arities)} arities"
            )
        if len(set(axes)) != len(axes):
            raise ShapeMismatch("duplicate axis labels")
        if any(a < 1 for a in arities):
            raise ShapeMismatch("arities must be positive")
        self.axes = axes
        self.arities = arities
        if _validate:
            total = 0.0
            for key, value in mass.items():
                self._check_tuple(key)
                if value < 0.0:
                    raise TupleOutOfRange(f"negative mass {value!r} at {key}")
                total += value
            if abs(total - 1.0) > MASS_TOLERANCE:
                raise ZeroTotalCount(
                    f"mass sums to {total!r}, expected 1 within {MASS_TOLERANCE}"
                )
        if _cell_count(self.arities) <= DENSE_CELL_LIMIT:
            dense = np.zeros(self.arities if self.arities else (1,), dtype=np.float64)
            if self.arities:
                for key, value in mass.items():
                    dense[key] += value
            else:
                for key, value in mass.items():
                    dense[0] += value
            self._dense = dense
            self._sparse = None
        else:
            acc: dict[tuple[int, ...], float] = {}
            for key, value in mass.items():
                if value != 0.0:
                    acc[key] = acc.get(key, 0.0) + value
            self._dense = None
            self._sparse = acc

    def _check_tuple(self, key: tuple[int, ...]) -> None:
        if len(key) != len(self.arities):
            raise TupleOutOfRange(
                f"tuple length {len(key)} does not match {len(self.arities)} axes"
            )
        for sym, a in zip(key, self.arities):
            if not 0 <= sym < a:
                raise TupleOutOfRange(f"symbol {sym} outside arity {a} in {key}")

    # -- construction helpers -------------------------------------------------

    @classmethod
    def _from_dense(
        cls,
        axes: tuple[AxisLabel, ...],
        arities: tuple[int, ...],
        dense: np.ndarray,
    ) -> "JointTable":
        table = cls.__new__(cls)
        table.axes = axes
        table.arities = arities
        table._dense = dense
        table._sparse = None
        return table

    @classmethod
    def _from_sparse(
        cls,
        axes: tuple[AxisLabel, ...],
        arities: tuple[int, ...],
        sparse: dict[tuple[int, ...], float],
    ) -> "JointTable":
        table = cls.__new__(cls)
        table.axes = axes
        table.arities = arities
        table._dense = None
        table._sparse = sparse
        return table

    # -- basic queries --------------------------------------------------------

    @property
    def n_axes(self) -> int:
        return len(self.axes)

    @property
    def cells(self) -> int:
        return _cell_count(self.arities)

    @property
    def is_dense(self) -> bool:
        return self._dense is not None

    def probability(self, key: tuple[int, ...]) -> float:
        self._check_tuple(key)
        if self._dense is not None:
            return float(self._dense[key] if self.arities else self._dense[0])
        return self._sparse.get(key, 0.0)

    def items(self) -> Iterator[tuple[tuple[int, ...], float]]:
        """Iterate over (tuple, probability) pairs with nonzero mass."""
        if self._dense is not None:
            flat = self._dense.reshape(-1)
            if not self.arities:
                if flat[0] != 0.0:
                    yield (), float(flat[0])
                return
            for idx in np.flatnonzero(flat):
                key = np.unravel_index(int(idx), self.arities)
                yield tuple(int(s) for s in key), float(flat[idx])
        else:
            yield from self._sparse.items()

    @property
    def mass(self) -> dict[tuple[int, ...], float]:
        """The nonzero probability mass as a plain dict."""
        return {tuple(int(s) for s in key): p for key, p in self.items()}

    def total_mass(self) -> float:
        if self._dense is not None:
            return float(self._dense.sum())
        return float(sum(self._sparse.values()))

    def axis_position(self, label: AxisLabel) -> int:
        try:
            return self.axes.index(label)
        except ValueError:
            raise ShapeMismatch(f"axis {label} not present") from None


def as_axis_set(positions: Iterable[int], n_axes: int) -> AxisSet:
    """Normalize an iterable of axis positions, validating the range."""
    result = frozenset(int(p) for p in positions)
    for p in result:
        if not 0 <= p < n_axes:
            raise ShapeMismatch(f"axis position {p} outside 0..{n_axes - 1}")
    return result


def normalize(
    counts: Mapping[tuple[int, ...], float],
    axes: Iterable[AxisLabel],
    arities: Iterable[int],
) -> JointTable:
    """Turn nonnegative counts into a probability table.

    Raises ZeroTotalCount when the counts carry no mass and TupleOutOfRange
    when a key does not fit the declared arities.
    """
    axes = tuple(axes)
    arities = tuple(int(a) for a in arities)
    probe = JointTable(axes, arities, {}, _validate=False)
    total = 0.0
    for key, value in counts.items():
        probe._check_tuple(key)
        if value < 0:
            raise TupleOutOfRange(f"negative count {value!r} at {key}")
        total += value
    if total <= 0.0:
        raise ZeroTotalCount("counts sum to zero")
    if _cell_count(arities) <= DENSE_CELL_LIMIT:
        dense = np.zeros(arities if arities else (1,), dtype=np.float64)
        for key, value in counts.items():
            dense[key] += value
        dense /= total
        return JointTable._from_dense(axes, arities, dense)
    sparse: dict[tuple[int, ...], float] = {}
    for key, value in counts.items():
        if value != 0:
            key = tuple(int(s) for s in key)
            sparse[key] = sparse.get(key, 0.0) + value / total
    return JointTable._from_sparse(axes, arities, sparse)


def marginalize(table: JointTable, keep: Iterable[int]) -> JointTable:
    """Sum out every axis not in ``keep``.

    The result's axes are the kept ones in their original order.  Keeping
    every axis returns an equivalent table.
    """
    keep_set = as_axis_set(keep, table.n_axes)
    if not keep_set:
        raise EmptyAxisSet("cannot marginalize onto an empty axis set")
    keep_sorted = tuple(sorted(keep_set))
    axes = tuple(table.axes[p] for p in keep_sorted)
    arities = tuple(table.arities[p] for p in keep_sorted)
    if table._dense is not None:
        dropped = tuple(p for p in range(table.n_axes) if p not in keep_set)
        dense = table._dense.sum(axis=dropped) if dropped else table._dense.copy()
        return JointTable._from_dense(axes, arities, dense)
    sparse: dict[tuple[int, ...], float] = {}
    for key, value in table._sparse.items():
        sub = tuple(key[p] for p in keep_sorted)
        sparse[sub] = sparse.get(sub, 0.0) + value
    if _cell_count(arities) <= DENSE_CELL_LIMIT:
        dense = np.zeros(arities, dtype=np.float64)
        for key, value in sparse.items():
            dense[key] += value
        return JointTable._from_dense(axes, arities, dense)
    return JointTable._from_sparse(axes, arities, sparse)
