"""Probability-table storage, normalization, and marginalization."""

import numpy as np
import pytest

import infoflow.table as table_mod
from infoflow.errors import (
    EmptyAxisSet,
    ShapeMismatch,
    TupleOutOfRange,
    ZeroTotalCount,
)
from infoflow.table import AxisLabel, JointTable, as_axis_set, marginalize, normalize


def two_axes():
    return (AxisLabel(0, 1), AxisLabel(1, 1))


def test_axis_label_ordering_and_hash():
    a, b = AxisLabel(0, 1), AxisLabel(0, 2)
    assert a < b
    assert len({a, b, AxisLabel(0, 1)}) == 2


def test_construction_and_probability():
    t = JointTable(two_axes(), (2, 2), {(0, 0): 0.5, (1, 1): 0.5})
    assert t.n_axes == 2
    assert t.cells == 4
    assert t.probability((0, 0)) == 0.5
    assert t.probability((0, 1)) == 0.0
    assert t.total_mass() == pytest.approx(1.0)


def test_mass_must_sum_to_one():
    with pytest.raises(ZeroTotalCount):
        JointTable(two_axes(), (2, 2), {(0, 0): 0.5})


def test_negative_mass_rejected():
    with pytest.raises(TupleOutOfRange):
        JointTable(two_axes(), (2, 2), {(0, 0): 1.5, (1, 1): -0.5})


def test_tuple_validation():
    with pytest.raises(TupleOutOfRange):
        JointTable(two_axes(), (2, 2), {(0, 2): 1.0})
    with pytest.raises(TupleOutOfRange):
        JointTable(two_axes(), (2, 2), {(0,): 1.0})


def test_duplicate_axes_rejected():
    with pytest.raises(ShapeMismatch):
        JointTable((AxisLabel(0, 1), AxisLabel(0, 1)), (2, 2), {(0, 0): 1.0})


def test_axis_arity_count_mismatch():
    with pytest.raises(ShapeMismatch):
        JointTable(two_axes(), (2,), {(0, 0): 1.0})


def test_normalize_counts():
    t = normalize({(0, 0): 3, (1, 0): 1}, two_axes(), (2, 2))
    assert t.probability((0, 0)) == pytest.approx(0.75)
    assert t.probability((1, 0)) == pytest.approx(0.25)


def test_normalize_zero_counts():
    with pytest.raises(ZeroTotalCount):
        normalize({}, two_axes(), (2, 2))
    with pytest.raises(ZeroTotalCount):
        normalize({(0, 0): 0.0}, two_axes(), (2, 2))


def test_normalize_negative_count():
    with pytest.raises(TupleOutOfRange):
        normalize({(0, 0): -1.0, (1, 1): 2.0}, two_axes(), (2, 2))


def test_items_roundtrip():
    mass = {(0, 1): 0.25, (1, 0): 0.75}
    t = JointTable(two_axes(), (2, 2), mass)
    assert dict(t.items()) == pytest.approx(mass)
    assert t.mass == pytest.approx(mass)


def test_marginalize_sums_dropped_axes():
    rng = np.random.default_rng(7)
    probs = rng.dirichlet(np.ones(8)).reshape(2, 2, 2)
    axes = (AxisLabel(0, 1), AxisLabel(1, 1), AxisLabel(2, 1))
    t = JointTable(
        axes, (2, 2, 2), {k: float(probs[k]) for k in np.ndindex(2, 2, 2)}
    )
    m = marginalize(t, {0, 2})
    assert m.axes == (axes[0], axes[2])
    expect = probs.sum(axis=1)
    for key in np.ndindex(2, 2):
        assert m.probability(key) == pytest.approx(float(expect[key]))


def test_marginalize_empty_keep_rejected():
    t = JointTable(two_axes(), (2, 2), {(0, 0): 1.0})
    with pytest.raises(EmptyAxisSet):
        marginalize(t, ())


def test_marginalize_keep_all_is_identity():
    t = JointTable(two_axes(), (2, 2), {(0, 1): 0.4, (1, 0): 0.6})
    m = marginalize(t, (0, 1))
    assert m.mass == pytest.approx(t.mass)


def test_as_axis_set_range_check():
    assert as_axis_set([1, 0, 1], 2) == frozenset({0, 1})
    with pytest.raises(ShapeMismatch):
        as_axis_set([2], 2)


def test_sparse_storage_parity(monkeypatch):
    # force the hash-map path and compare against the dense result cell by cell
    rng = np.random.default_rng(3)
    probs = rng.dirichlet(np.ones(16)).reshape(2, 2, 2, 2)
    axes = tuple(AxisLabel(v, 1) for v in range(4))
    mass = {k: float(probs[k]) for k in np.ndindex(2, 2, 2, 2)}
    dense = JointTable(axes, (2, 2, 2, 2), mass)
    assert dense.is_dense
    monkeypatch.setattr(table_mod, "DENSE_CELL_LIMIT", 8)
    sparse = JointTable(axes, (2, 2, 2, 2), mass)
    assert not sparse.is_dense
    for key in np.ndindex(2, 2, 2, 2):
        assert sparse.probability(key) == pytest.approx(dense.probability(key))
    sub_sparse = marginalize(sparse, (1, 3))
    sub_dense = marginalize(dense, (1, 3))
    assert sub_sparse.mass == pytest.approx(sub_dense.mass)


def test_zero_axis_table():
    t = JointTable((), (), {(): 1.0})
    assert t.n_axes == 0
    assert t.probability(()) == 1.0
    assert list(t.items()) == [((), 1.0)]
