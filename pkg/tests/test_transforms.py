import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from souq.errors import AlreadyCentered, BadWeights, LeavesSimplex, NoRoom, NotZeroSum, ZeroShift
from souq.measures import global_entropy_measures, label_entropy_measures, variance_measures
from souq.simplex import EmpiricalSecondOrder, second_order_mean
from souq.transforms import (
    TransformKind,
    TransformSpec,
    center_shift,
    dirac_mixture,
    location_shift,
    max_center_step,
    mean_preserving_spread,
    spread_offsets,
    spread_variance,
)

from conftest import second_orders


def _q(atoms, weights=None):
    return EmpiricalSecondOrder(np.array(atoms, dtype=float), weights)


def _per_label_var(q):
    return np.array([t.epistemic for t in variance_measures(q).per_label])


def test_spread_of_dirac():
    q2 = mean_preserving_spread(_q([[0.5, 0.5]]), 0.2, seed=0)
    np.testing.assert_allclose(q2.atoms, [[0.7, 0.3], [0.3, 0.7]], atol=1e-15)
    np.testing.assert_array_equal(q2.weights, [0.5, 0.5])
    np.testing.assert_allclose(second_order_mean(q2).probs, [0.5, 0.5], atol=1e-15)


def test_spread_increment_dirac():
    q = _q([[0.5, 0.5]])
    delta = variance_measures(mean_preserving_spread(q, 0.2, 0)).epistemic - variance_measures(q).epistemic
    assert delta == pytest.approx(0.08, abs=1e-15)


def test_spread_no_room_at_vertex():
    with pytest.raises(NoRoom):
        mean_preserving_spread(_q([[1.0, 0.0]]), 0.3, seed=0)


def test_spread_shrinks_near_boundary():
    q2 = mean_preserving_spread(_q([[0.95, 0.05]]), 0.5, seed=0)
    assert q2.atoms.min() >= 0.0
    np.testing.assert_allclose(second_order_mean(q2).probs, [0.95, 0.05], atol=1e-15)


@settings(max_examples=150, deadline=None)
@given(second_orders(), st.floats(0.01, 0.4), st.integers(0, 2**16))
def test_spread_properties(q, magnitude, seed):
    try:
        offsets = spread_offsets(q, magnitude, seed)
    except NoRoom:
        return
    q2 = mean_preserving_spread(q, magnitude, seed)
    np.testing.assert_allclose(second_order_mean(q2).probs, second_order_mean(q).probs, atol=1e-12)
    np.testing.assert_allclose(offsets.sum(axis=1), 0.0, atol=1e-15)
    inc = variance_measures(q2).epistemic - variance_measures(q).epistemic
    assert inc == pytest.approx(spread_variance(q, offsets).sum(), abs=1e-9)
    assert spread_variance(q, offsets).max() > 0
    for f in (global_entropy_measures, lambda x: label_entropy_measures(x).global_):
        a, b = f(q), f(q2)
        assert b.epistemic > a.epistemic
        assert b.total == pytest.approx(a.total, abs=1e-9)


def test_location_shift_translation():
    q2 = location_shift(_q([[0.4, 0.6], [0.6, 0.4]]), [0.1, -0.1])
    np.testing.assert_allclose(q2.atoms, [[0.5, 0.5], [0.7, 0.3]], atol=1e-15)


def test_location_shift_preserves_variance_eu():
    q = _q([[0.4, 0.6], [0.6, 0.4]])
    q2 = location_shift(q, [0.1, -0.1])
    assert variance_measures(q2).epistemic == pytest.approx(variance_measures(q).epistemic, abs=1e-15)
    np.testing.assert_allclose(_per_label_var(q2), _per_label_var(q), atol=1e-12)


@pytest.mark.parametrize("z, err", [
    ([0.5, -0.5], LeavesSimplex),
    ([0.0, 0.0], ZeroShift),
    ([0.1, 0.0], NotZeroSum),
])
def test_location_shift_errors(z, err):
    with pytest.raises(err):
        location_shift(_q([[0.9, 0.1], [0.7, 0.3]]), z)


def test_center_shift_dirac():
    q2 = center_shift(_q([[0.9, 0.1]]), 0.5)
    np.testing.assert_allclose(q2.atoms, [[0.7, 0.3]], atol=1e-15)


def test_center_shift_raises_variance_tu():
    q = _q([[0.9, 0.1]])
    assert variance_measures(q).per_label[0].total == pytest.approx(0.09)
    assert variance_measures(center_shift(q, 0.5)).per_label[0].total == pytest.approx(0.21)


def test_center_shift_already_centered():
    with pytest.raises(AlreadyCentered):
        center_shift(_q([[0.5, 0.5]]), 0.5)


def test_center_shift_moves_mean_toward_barycenter():
    q = _q([[0.6, 0.3, 0.1], [0.5, 0.2, 0.3]])
    lam = 1 - 0.5 * max_center_step(q)
    q2 = center_shift(q, lam)
    expected = lam * second_order_mean(q).probs + (1 - lam) / 3
    np.testing.assert_allclose(second_order_mean(q2).probs, expected, atol=1e-9)
    np.testing.assert_allclose(_per_label_var(q2), _per_label_var(q), atol=1e-12)


def test_dirac_mixture():
    dm = dirac_mixture([1 / 3, 1 / 3, 1 / 3])
    np.testing.assert_array_equal(dm.atoms, np.eye(3))
    assert variance_measures(dm).aleatoric == 0.0
    assert label_entropy_measures(dm).aleatoric == 0.0
    with pytest.raises(BadWeights):
        dirac_mixture([0.5, 0.6])


def test_transform_spec_apply():
    q = _q([[0.5, 0.5]])
    spec = TransformSpec(TransformKind.MeanPreservingSpread, magnitude=0.2, seed=0)
    assert spec.apply(q).M == 2
    assert TransformSpec(TransformKind.CenterShift, lam=0.5).apply(_q([[0.9, 0.1]])).M == 1
