import math

import numpy as np
import pytest

from flagflows.config import NotLoxodromic
from flagflows.devmaps import LeafPoint, phi_tan_plus, phi_tr
from flagflows.flows import (
    cocycle,
    decay_experiment,
    flow_orbit,
    flow_period,
    flow_step,
    leaf_context,
    leafwise_distance,
    period_spectrum,
    reference_flow,
    regularity_probe,
    stable_leaf_distance,
)
from flagflows.reps import jordan_projection, root_length
from flagflows.words import GroupWord


def sl2_length(m):
    return 2.0 * math.acosh(abs(np.trace(m)) / 2.0)


def test_leafwise_distance_is_additive_and_signed(exact_curve):
    x, z = 0.5, 3.9
    ctx = leaf_context(exact_curve, (2, 3), x, z)
    images = [phi_tan_plus(exact_curve, LeafPoint(x, y, z)).point
              for y in (1.0, 1.8, 2.9)]
    d01 = leafwise_distance(ctx, images[0], images[1])
    d12 = leafwise_distance(ctx, images[1], images[2])
    d02 = leafwise_distance(ctx, images[0], images[2])
    assert abs(d02 - (d01 + d12)) < 1e-9
    assert d01 == -leafwise_distance(ctx, images[1], images[0])


def test_image_moves_monotonically_in_y(exact_curve):
    x, z = 0.5, 3.9
    for alpha, fn in (((1, 3), phi_tr), ((2, 3), phi_tan_plus)):
        ctx = leaf_context(exact_curve, alpha, x, z)
        coords = [ctx.coordinate(fn(exact_curve, LeafPoint(x, y, z)).point)
                  for y in np.linspace(0.8, 3.6, 12)]
        logs = np.log(np.abs(coords))
        assert np.all(np.diff(logs) > 0) or np.all(np.diff(logs) < 0)


def test_flow_step_is_additive_in_time(exact_curve):
    p = LeafPoint(0.5, 1.5, 3.9)
    for alpha in ((1, 2), (2, 3), (1, 3)):
        q1 = flow_step(exact_curve, alpha, flow_step(exact_curve, alpha, p, 0.4), 0.3)
        q2 = flow_step(exact_curve, alpha, p, 0.7)
        assert abs(q1.y - q2.y) < 1e-8


def test_flow_step_reverses(exact_curve):
    p = LeafPoint(0.5, 1.5, 3.9)
    q = flow_step(exact_curve, (2, 3), flow_step(exact_curve, (2, 3), p, 0.8), -0.8)
    assert abs(q.y - p.y) < 1e-9


def test_flow_orbit_records_increasing_times(exact_curve):
    record = flow_orbit(exact_curve, (2, 3), LeafPoint(0.5, 1.5, 3.9), 1.0, 5)
    ts = [s[0] for s in record.samples]
    assert ts == sorted(ts)
    assert len(record.samples) == 6


def test_flow_period_matches_sl2_lengths(exact_curve, reference):
    w = reference.presentation.parse_word("a1")
    t = sl2_length(reference.matrix(w))
    assert abs(flow_period(exact_curve, (1, 2), w) - t) < 1e-9
    assert abs(flow_period(exact_curve, (2, 3), w) - t) < 1e-9
    assert abs(flow_period(exact_curve, (1, 3), w) - 2 * t) < 1e-9


def test_flow_period_matches_eigenvalue_oracle(exact_curve):
    pres = exact_curve.rep.presentation
    for text in ("a1 b1", "a1 B2", "a2 b2 A1"):
        w = pres.parse_word(text)
        jd = jordan_projection(exact_curve.rep.matrix(w),
                               exact_curve.rep.matrix(w.inverse()))
        for root in ((1, 2), (1, 3), (2, 3)):
            got = flow_period(exact_curve, root, w)
            assert abs(got - root_length(jd, *root)) < 1e-8


def test_period_spectrum_agrees_with_flow_period(exact_curve):
    pres = exact_curve.rep.presentation
    words = [pres.parse_word("a1"), pres.parse_word("a1 b1")]
    spec = period_spectrum(exact_curve, words, [(1, 2), (2, 3)])
    for w in words:
        for root in ((1, 2), (2, 3)):
            assert spec[w][root] == pytest.approx(
                flow_period(exact_curve, root, w), rel=1e-12)


def test_flow_period_rejects_the_identity(exact_curve):
    with pytest.raises(NotLoxodromic):
        flow_period(exact_curve, (1, 2), GroupWord(()))


def test_reference_flow_is_additive():
    x, z, y = 0.3, 3.2, 1.1
    y1 = reference_flow(None, x, z, y, 0.7)
    y2 = reference_flow(None, x, z, y1, 0.5)
    y12 = reference_flow(None, x, z, y, 1.2)
    assert abs(y2 - y12) < 1e-10
    # large positive time converges to x
    far = reference_flow(None, x, z, y, 30.0)
    assert min(abs(far - x), 2 * math.pi - abs(far - x)) < 1e-6


def test_cocycle_identity_and_fuchsian_rate(exact_curve):
    p = LeafPoint(0.5, 1.5, 3.9)
    for (i, j) in ((1, 2), (1, 3), (2, 3)):
        for t in (0.3, 1.0):
            kappa = cocycle(exact_curve, (i, j), p, t)
            assert abs(kappa - (j - i) * t) < 1e-6
    s, t = 0.4, 0.9
    moved = LeafPoint(p.x, reference_flow(None, p.x, p.z, p.y, s), p.z)
    lhs = cocycle(exact_curve, (2, 3), p, s + t)
    rhs = cocycle(exact_curve, (2, 3), moved, t) + cocycle(exact_curve, (2, 3), p, s)
    assert abs(lhs - rhs) < 1e-9


def test_stable_leaf_distance_decays(exact_curve):
    p = LeafPoint(0.5, 0.7, 3.9)
    d0 = abs(stable_leaf_distance(exact_curve, p, 3.5))
    p2 = flow_step(exact_curve, (2, 3), p, 2.0)
    d2 = abs(stable_leaf_distance(exact_curve, p2, 3.5))
    assert d2 < d0


def test_decay_slope_is_minus_one_for_fuchsian(exact_curve):
    slope, samples = decay_experiment(exact_curve, LeafPoint(0.5, 0.7, 3.9),
                                      3.5, 5.0, 20)
    assert abs(slope + 1.0) < 0.05
    assert len(samples) == 21


def test_regularity_probe_in_dim_four(exact_curve4):
    # the closed-form curve is smooth, so both tangent fields are
    # Lipschitz and the comparison inequality holds with slack
    report = regularity_probe(exact_curve4, 0.5, 3.6)
    assert 0.85 < report.exponent_highest < 1.15
    assert report.exponent_highest >= report.exponent_23 - 0.1
    assert len(report.residuals_highest) >= 3
