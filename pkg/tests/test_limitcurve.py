import math

import numpy as np
import pytest
import sympy

from curvehelpers import collinear_degenerate_curve
from flagflows.config import (
    InsufficientSamples,
    NoSecondIntersection,
    NotDefinedHere,
)
from flagflows.limitcurve import (
    BoundaryCurve,
    boundary_regularity_estimate,
    build_convex_domain,
    dual_curve,
    frenet_checks,
    sample_boundary,
    second_boundary_intersection,
)
from flagflows.projective import ProjectiveSubspace, dual, join
from flagflows.reps import sym_power


def _symbolic_veronese(theta_expr):
    """Exact curve point and tangent direction in the symmetric-power basis."""
    u = -sympy.cos(theta_expr / 2)
    v = sympy.sin(theta_expr / 2)
    point = sympy.Matrix([u**2, 2 * u * v, v**2])
    tangent = sympy.diff(point, theta_expr)
    return point, tangent


def test_exact_curve_matches_symbolic_veronese(exact_curve):
    t = sympy.Symbol("theta")
    point_t, tangent_t = _symbolic_veronese(t)
    theta_sym = sympy.Rational(2, 3) * sympy.pi
    point = point_t.subs(t, theta_sym)
    tangent = tangent_t.subs(t, theta_sym)
    theta = float(theta_sym)
    f = exact_curve.flag_at(theta)
    p_exact = np.array([float(sympy.N(c, 30)) for c in point])
    assert f[1].principal_angle(ProjectiveSubspace.point(p_exact)) < 1e-12
    t_exact = np.array([float(sympy.N(c, 30)) for c in tangent])
    want_line = ProjectiveSubspace.from_spanning(np.vstack([p_exact, t_exact]))
    assert f[2].principal_angle(want_line) < 1e-12


def test_interpolation_returns_stored_samples(sampled_curve):
    for i in (0, len(sampled_curve) // 2):
        f = sampled_curve.flag_at(float(sampled_curve.thetas[i]))
        assert f is sampled_curve.flags[i]


def test_interpolation_error_estimate_bounds_midpoint_error(sampled_curve,
                                                            exact_curve):
    worst = 0.0
    thetas = sampled_curve.thetas
    for i in range(0, len(sampled_curve) - 1, 7):
        mid = 0.5 * (thetas[i] + thetas[i + 1])
        got = sampled_curve.flag_at(float(mid))[1]
        exact = exact_curve.exact_eval(float(mid))[1]
        worst = max(worst, got.principal_angle(exact))
    assert worst < 20.0 * sampled_curve.interp_error


def test_second_boundary_intersection_recovers_chord_endpoint(exact_curve):
    t1, t2 = 1.0, 3.0
    line = join([exact_curve.flag_at(t1)[1], exact_curve.flag_at(t2)[1]])
    got = second_boundary_intersection(exact_curve, line, t1)
    assert abs(got - t2) < 1e-9


def test_second_boundary_intersection_rejects_tangents(exact_curve):
    with pytest.raises(NoSecondIntersection):
        second_boundary_intersection(exact_curve, exact_curve.flag_at(1.0)[2], 1.0)


def test_frenet_checks_pass_on_the_conic(exact_curve):
    report = frenet_checks(exact_curve)
    assert report.general_position_ok
    assert report.osculation_ok


def test_frenet_general_position_fails_on_flattened_curve(reference):
    degenerate = collinear_degenerate_curve(reference)
    report = frenet_checks(degenerate)
    assert not report.general_position_ok


def test_convex_domain_is_convex_with_supporting_tangents(exact_curve):
    domain = build_convex_domain(exact_curve)
    assert domain.is_convex()
    assert domain.tangents_support()


def test_dual_curve_entries_are_annihilators(exact_curve):
    dc = dual_curve(exact_curve)
    f = exact_curve.flags[10]
    g = dc.flags[10]
    assert g[1].principal_angle(dual(f[2])) < 1e-12
    assert g[2].principal_angle(dual(f[1])) < 1e-12


def test_regularity_estimate_is_two_for_the_conic(exact_curve):
    lo, hi = boundary_regularity_estimate(exact_curve)
    assert abs(lo - 2.0) < 0.1
    assert abs(hi - 2.0) < 0.1


def test_even_dimension_curve_has_no_global_chart(exact_curve4):
    assert exact_curve4.chart is None
    with pytest.raises(NotDefinedHere):
        exact_curve4.chart_point(1.0)
    # flag evaluation does not need the chart
    f = exact_curve4.flag_at(1.234)
    assert f[3].contains(f[1])


def test_sampled_curve_serialization_roundtrip(sampled_curve):
    back = BoundaryCurve.from_dict(sampled_curve.to_dict())
    assert len(back) == len(sampled_curve)
    i = len(back) // 3
    assert back.flags[i][1].principal_angle(sampled_curve.flags[i][1]) < 1e-12


def test_sample_boundary_requires_enough_words(reference):
    with pytest.raises(InsufficientSamples):
        sample_boundary(sym_power(reference, 3), reference, 1)
