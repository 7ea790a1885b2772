import numpy as np
import pytest

import ssalib
from ssalib import (
    Grouping,
    ParameterError,
    StateError,
    elementary,
    new_session,
    parse_groups,
    reconstruct,
    residuals,
    wcor,
)
from ssalib.reconstruction import wcor_series


def test_parse_groups():
    g = parse_groups("1,4|2,3|5-6")
    assert g.groups == ((1, 4), (2, 3), (5, 6))
    assert g.labels == ("F1", "F2", "F3")
    assert parse_groups("1-10").groups == (tuple(range(1, 11)),)


@pytest.mark.parametrize("bad", ["", "1,,2", "a", "3-1", "1|", "0"])
def test_parse_groups_malformed(bad):
    with pytest.raises(ParameterError):
        parse_groups(bad)


def test_constant_elementary():
    x = np.full(30, 4.0)
    s = new_session(x, L=10)
    np.testing.assert_allclose(elementary(s, 1), x, atol=1e-10)


def test_elementary_cached(rng):
    s = new_session(rng.standard_normal(80), L=20)
    a = elementary(s, 3)
    n = s.elementary_computations
    b = elementary(s, 3)
    assert a is b and s.elementary_computations == n
    assert not a.flags.writeable


def test_full_identity(rng):
    x = rng.standard_normal(120)
    s = new_session(x, L=45, method="eigen")
    total = sum(elementary(s, i) for i in range(1, s.nu + 1))
    np.testing.assert_allclose(total, x, atol=1e-9)
    rec = reconstruct(s, [list(range(1, s.nu + 1))])
    np.testing.assert_allclose(rec.components[0].values, x, atol=1e-9)
    assert np.abs(residuals(rec).values).max() <= 1e-9


def test_components_plus_residual(co2):
    s = new_session(co2, L=120)
    rec = reconstruct(s, [[1, 4], [2, 3], [5, 6]])
    total = sum(c.values for c in rec.components) + rec.residual.values
    np.testing.assert_allclose(total, co2.values, atol=1e-9)
    assert all(c.index == co2.index for c in rec.components)
    assert rec["F2"] is rec.components[1]
    # trend is smooth and increasing; the seasonal pair is centred
    assert np.all(np.diff(rec[0].values) > 0)
    assert abs(rec[1].values.mean()) < 0.1


def test_additivity(rng):
    s = new_session(rng.standard_normal(90), L=30)
    joint = reconstruct(s, [[1, 2, 5]]).components[0].values
    parts = reconstruct(s, [[1, 2], [5]]).components
    np.testing.assert_allclose(joint, parts[0].values + parts[1].values, atol=1e-12)


def test_overlapping_groups_have_no_residual(rng):
    s = new_session(rng.standard_normal(50), L=10)
    rec = reconstruct(s, [[1], [1]])
    assert rec.residual is None
    with pytest.raises(StateError):
        residuals(rec)


def test_index_out_of_range(rng):
    s = new_session(rng.standard_normal(50), L=10)
    with pytest.raises(ParameterError):
        reconstruct(s, [[11]])


def test_grouping_forms(rng):
    s = new_session(rng.standard_normal(60), L=20)
    a = reconstruct(s, {"trend": [1], "rest": [2, 3]})
    assert a.grouping.labels == ("trend", "rest")
    b = reconstruct(s, [1, 2])
    assert len(b) == 1
    c = reconstruct(s, Grouping.elementary([1, 2]))
    np.testing.assert_allclose(b[0].values, c[0].values + c[1].values, atol=1e-12)


def test_separable_sines_wcor():
    # L = K = 60, a multiple of both periods
    n = np.arange(119)
    x = np.sin(2 * np.pi * n / 12) + 0.5 * np.cos(2 * np.pi * n / 4)
    s = new_session(x, L=60, method="eigen")
    w = wcor(s, [[1, 2], [3, 4]]).matrix
    assert abs(w[0, 1]) < 1e-8
    np.testing.assert_allclose(np.diag(w), 1.0)


def test_wcor_properties(rng):
    s = new_session(rng.standard_normal(200), L=50)
    w = wcor(s, Grouping.elementary(range(1, 11)))
    m = w.matrix
    np.testing.assert_allclose(m, m.T)
    np.testing.assert_allclose(np.diag(m), 1.0)
    assert np.abs(m).max() <= 1 + 1e-9


def test_wcor_weights(rng):
    a, b = rng.standard_normal((2, 40))
    L = 13
    w = np.minimum.reduce([np.arange(1, 41), np.full(40, L), np.full(40, 28), 40 - np.arange(40)])
    want = (w * a * b).sum() / np.sqrt((w * a * a).sum() * (w * b * b).sum())
    assert wcor_series([a, b], L).matrix[0, 1] == pytest.approx(want, rel=1e-12)


def test_wcor_zero_component():
    w = wcor_series([np.zeros(20), np.ones(20)], 5)
    assert not w.valid[0] and w.valid[1]
    assert w.matrix[0, 0] == 0 and w.matrix[0, 1] == 0 and w.matrix[1, 1] == 1


def test_wcor_needs_disjoint(rng):
    s = new_session(rng.standard_normal(50), L=10)
    with pytest.raises(ParameterError):
        wcor(s, [[1, 2], [2]])


def test_motor_pair_structure(motor_stage2):
    w = np.abs(wcor(motor_stage2, Grouping.elementary(range(1, 31))).matrix)
    for i in range(0, 10, 2):
        assert w[i, i + 1] > 0.9


def test_motor_stage1_trend(motor):
    s1 = new_session(motor, L=12)
    rec = reconstruct(s1, [[1]])
    assert rec.residual.index == motor.index
    # the stage-1 trend carries most of the energy
    assert np.sum(rec[0].values ** 2) > 0.9 * np.sum(motor.values ** 2)
