"""Leafwise cross-ratio metrics, refraction flows, periods, and decay probes.

Sign convention used throughout: on the leaf (x, z) the forward direction
is toward the endpoint x^i ∩ z^{n-i+1} (for the tangent type in dimension
three, toward x2 ∩ z2).  With x the attracting and z the repelling fixed
point of a loxodromic element, one period of the flow is then the
positive root length l_i - l_j.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .config import (
    DEFAULT_TOL,
    NotDefinedHere,
    NotLoxodromic,
    PointOutsideSegment,
    RootFindFailure,
    Tolerances,
)
from .devmaps import LeafPoint, geodesic_realization, phi_tan_plus
from .limitcurve import BoundaryCurve, second_boundary_intersection
from .projective import ProjectiveSubspace, cross_ratio, join, meet
from .reps import circular_gap, loxodromic_eigensystem, theta_of_vector
from .words import GroupWord


@dataclass(frozen=True)
class LeafMetricContext:
    """Cross-ratio coordinates on the image segment of one geodesic leaf.

    `forward` and `backward` are the segment endpoints; forward is the
    one the flow moves toward (x^i ∩ z^{n-i+1}).
    """

    x: float
    z: float
    forward: ProjectiveSubspace
    backward: ProjectiveSubspace
    support_line: ProjectiveSubspace

    def __post_init__(self):
        if self.forward.principal_angle(self.backward) < 1e-9:
            raise ValueError("leaf endpoints coincide")
        for p in (self.forward, self.backward):
            if not self.support_line.contains(p):
                raise ValueError("endpoint off the support line")

    def coordinate(self, p: ProjectiveSubspace) -> float:
        """Affine coordinate u with backward at 0 and forward at infinity."""
        basis = np.column_stack([self.forward.vector, self.backward.vector])
        c, *_ = np.linalg.lstsq(basis, p.vector, rcond=None)
        if abs(c[1]) < 1e-14 * abs(c[0]):
            raise PointOutsideSegment("point at the forward endpoint")
        return float(c[0] / c[1])

    def point_at(self, u: float) -> ProjectiveSubspace:
        return ProjectiveSubspace.point(
            u * self.forward.vector + self.backward.vector
        )


def leaf_context(curve: BoundaryCurve, alpha, x: float, z: float,
                 x_flag=None, z_flag=None) -> LeafMetricContext:
    """Metric context for root alpha = (i, j) on the leaf (x, z)."""
    i, j = alpha
    n = curve.n
    if not (1 <= i < j <= n):
        raise ValueError("need 1 <= i < j <= n")
    fx = curve.flag_at(x) if x_flag is None else x_flag
    fz = curve.flag_at(z) if z_flag is None else z_flag

    def pivot(k):
        if k == 1:
            return fx[1]
        if k == n:
            return fz[1]
        return meet([fx[k], fz[n - k + 1]])

    forward, backward = pivot(i), pivot(j)
    return LeafMetricContext(x, z, forward, backward, join([forward, backward]))


def leafwise_distance(ctx: LeafMetricContext, p1: ProjectiveSubspace,
                      p2: ProjectiveSubspace) -> float:
    """Signed log-cross-ratio distance along the leaf segment.

    Positive when p2 is forward of p1; additive along the segment.
    """
    u1, u2 = ctx.coordinate(p1), ctx.coordinate(p2)
    if u1 == 0.0 or u2 == 0.0 or (u1 > 0) != (u2 > 0):
        raise PointOutsideSegment("points on different components of the leaf line")
    return math.log(abs(u2)) - math.log(abs(u1))


@dataclass
class FlowOrbitRecord:
    """Trajectory of one leaf point under a refraction flow."""

    leaf: tuple
    samples: list = field(default_factory=list)  # (t, y, image point)
    period: float = None

    def append(self, t: float, y: float, image: ProjectiveSubspace):
        if self.samples and t <= self.samples[-1][0]:
            raise ValueError("flow times must increase")
        self.samples.append((t, y, image))


def _arc_bisect(curve, alpha, ctx, p: LeafPoint, target_log_u: float, sign: float,
                flags, tol: Tolerances) -> float:
    """Solve log|u(y)| = target on the ccw arc from x to z by bisection."""
    arc = circular_gap(p.x, p.z)

    def value(frac):
        y = (p.x + frac * arc) % (2 * math.pi)
        q = geodesic_realization(curve, alpha[0], alpha[1], LeafPoint(p.x, y, p.z),
                                 flags=(flags[0], curve.flag_at(y), flags[2]))
        u = ctx.coordinate(q)
        if (u > 0) != (sign > 0):
            raise RootFindFailure("image left the segment component")
        return math.log(abs(u)) - target_log_u

    frac0 = circular_gap(p.x, p.y) / arc
    f0 = value(frac0)
    if f0 == 0.0:
        return p.y
    # expand a bracket from the current position
    step = 0.1
    lo, hi = frac0, frac0
    flo = fhi = f0
    eps = 1e-9
    while flo * f0 > 0 and fhi * f0 > 0:
        lo, hi = max(lo - step, eps), min(hi + step, 1.0 - eps)
        flo, fhi = value(lo), value(hi)
        if lo <= eps and hi >= 1.0 - eps and flo * f0 > 0 and fhi * f0 > 0:
            raise RootFindFailure(
                f"no bracket on leaf ({p.x:.6f}, {p.z:.6f}) for target {target_log_u:.3e}"
            )
    if flo * f0 <= 0:
        a, b, fa = lo, frac0, flo
    else:
        a, b, fa = frac0, hi, f0
    while (b - a) * arc > tol.bisection:
        mid = 0.5 * (a + b)
        fm = value(mid)
        if fa * fm <= 0:
            b = mid
        else:
            a, fa = mid, fm
    return (p.x + 0.5 * (a + b) * arc) % (2 * math.pi)


def flow_step(curve: BoundaryCurve, alpha, p: LeafPoint, t: float,
              x_flag=None, z_flag=None, tol: Tolerances = None) -> LeafPoint:
    """Move a leaf point time t along the refraction flow of root alpha.

    The target image point is computed in closed form from the cross-ratio
    equation; the new y is recovered by bisection on the arc parameter.
    """
    tol = curve.tol if tol is None else tol
    if t == 0.0:
        return p
    fx = curve.flag_at(p.x) if x_flag is None else x_flag
    fz = curve.flag_at(p.z) if z_flag is None else z_flag
    ctx = leaf_context(curve, alpha, p.x, p.z, x_flag=fx, z_flag=fz)
    flags = (fx, curve.flag_at(p.y), fz)
    u0 = ctx.coordinate(
        geodesic_realization(curve, alpha[0], alpha[1], p, flags=flags)
    )
    target = math.log(abs(u0)) + t
    y_new = _arc_bisect(curve, alpha, ctx, p, target, math.copysign(1.0, u0),
                        (fx, None, fz), tol)
    return LeafPoint(p.x, y_new, p.z)


def flow_orbit(curve: BoundaryCurve, alpha, p: LeafPoint, t_max: float,
               steps: int) -> FlowOrbitRecord:
    """Integrate an orbit and record (t, y, image) samples."""
    record = FlowOrbitRecord(leaf=(p.x, p.z))
    fx, fz = curve.flag_at(p.x), curve.flag_at(p.z)
    current = p
    for k in range(steps + 1):
        t = t_max * k / steps
        if k > 0:
            current = flow_step(curve, alpha, current, t_max / steps,
                                x_flag=fx, z_flag=fz)
        image = geodesic_realization(
            curve, alpha[0], alpha[1], current,
            flags=(fx, curve.flag_at(current.y), fz))
        record.append(t, current.y, image)
    return record


def flow_period(curve: BoundaryCurve, alpha, gamma: GroupWord,
                y_choices: int = 2, tol: Tolerances = None) -> float:
    """Period of the closed orbit of gamma under the alpha refraction flow.

    Uses exact eigenflags of rep(gamma) at the leaf endpoints; the
    distance from an image point to its gamma image along the leaf is
    independent of the choice of the third parameter, which is verified
    across `y_choices` samples.
    """
    return _word_periods(curve, [alpha], gamma, y_choices, tol)[0]


def period_spectrum(curve: BoundaryCurve, words, roots, y_choices: int = 2,
                    tol: Tolerances = None) -> dict:
    """flow_period for many words and roots, sharing per-word eigendata.

    Returns {word: {root: period}} preserving the input word order.
    """
    out = {}
    for w in words:
        periods = _word_periods(curve, list(roots), w, y_choices, tol)
        out[w] = dict(zip([tuple(r) for r in roots], periods))
    return out


def _word_periods(curve: BoundaryCurve, roots, gamma: GroupWord,
                  y_choices: int, tol: Tolerances) -> list:
    """Shared implementation of flow_period over several roots of one word.

    The leaf endpoints x^i ∩ z^{n-i+1} are exactly the eigenvectors of
    rep(gamma), so the image of the developing map on the leaf through a
    hyperplane with covector m is (m.b) a - (m.a) b in closed form.  The
    period is the log-stretch of the image point's segment coordinate
    under gamma, split into its forward and backward coordinate factors;
    each factor is evaluated by applying gamma or the independently
    assembled gamma^{-1} product, whichever keeps that eigenvalue index
    near the top of the spectrum (applying a word product amplifies
    roundoff in subdominant coordinates by the spectral spread, which
    overwhelms float64 for long words otherwise).
    """
    tol = curve.tol if tol is None else tol
    g_ref = curve.reference.matrix(gamma)
    if abs(np.trace(g_ref)) <= 2.0:
        raise NotLoxodromic("reference image is not hyperbolic")
    n = curve.n
    g = curve.rep.matrix(gamma)
    g_inv = curve.rep.matrix(gamma.inverse())
    vals_g, vecs_g = loxodromic_eigensystem(g, tol.loxodromy_gap)
    vals_i, vecs_i = loxodromic_eigensystem(g_inv, tol.loxodromy_gap)
    lm = np.log(np.abs(vals_g))
    prefer_g = [lm[0] - lm[k] <= lm[k] - lm[n - 1] for k in range(n)]
    amp = [math.exp(min(lm[0] - lm[k], lm[k] - lm[n - 1])) for k in range(n)]

    def eigvec(k):
        return vecs_g[:, k] if prefer_g[k] else vecs_i[:, n - 1 - k]

    covectors = curve.hyperplane_covectors()
    results = []
    for (i, j) in roots:
        if not (1 <= i < j <= n):
            raise ValueError("need 1 <= i < j <= n")
        a, b = eigvec(i - 1), eigvec(j - 1)
        ma, mb = covectors @ a, covectors @ b
        with np.errstate(divide="ignore", invalid="ignore"):
            logs = np.log(np.abs(mb)) - np.log(np.abs(ma))
        ok = np.isfinite(logs)
        if not np.any(ok):
            raise RootFindFailure("no transverse hyperplane sample on the leaf")
        order = np.argsort(np.abs(np.where(ok, logs, np.inf)))
        pinv = np.linalg.pinv(np.column_stack([a, b]))
        values = []
        for idx in order[:y_choices]:
            p = mb[idx] * a - ma[idx] * b
            coords0 = np.array([mb[idx], -ma[idx]])
            factors = []
            for slot, k in ((0, i - 1), (1, j - 1)):
                op = g if prefer_g[k] else g_inv
                c = pinv @ (op @ p)
                stretch = math.log(abs(c[slot] / coords0[slot]))
                factors.append(stretch if prefer_g[k] else -stretch)
            values.append(factors[0] - factors[1])
        mean = float(np.mean(values))
        spread = max(values) - min(values)
        noise_floor = 100.0 * np.finfo(float).eps * (amp[i - 1] + amp[j - 1])
        if spread > max(1e-8 * max(1.0, abs(mean)), noise_floor):
            raise RootFindFailure(f"period varies with y by {spread:.3e}")
        results.append(mean)
    return results


def Flag_apply(g: np.ndarray, flag):
    """Image flag under a matrix (re-orthonormalized levelwise)."""
    from .projective import Flag

    top = flag.subspaces[-1]
    dims = [s.dim for s in flag.subspaces]
    return Flag.from_basis_columns(g @ top.basis, dims=dims)


def reference_flow(reference_unused, x: float, z: float, y: float, t: float) -> float:
    """Unit-speed hyperbolic geodesic flow toward x on the leaf (x, z).

    Normalizes the leaf so that x sits at infinity and z at zero on the
    reference circle; the flow then scales the remaining coordinate by
    e^t.  Independent of the normalizing matrix choice.
    """
    from .reps import boundary_vector

    vx, vz = boundary_vector(x), boundary_vector(z)
    m = np.linalg.inv(np.column_stack([vx, vz]))
    w = m @ boundary_vector(y)
    if abs(w[1]) < 1e-15 * abs(w[0]):
        raise NotDefinedHere("y coincides with x on the leaf")
    s = w[0] / w[1]
    s2 = s * math.exp(t)
    v2 = np.linalg.inv(m) @ np.array([s2, 1.0])
    return theta_of_vector(v2)


def cocycle(curve: BoundaryCurve, alpha, p: LeafPoint, t: float) -> float:
    """Translation cocycle of the alpha flow over the reference geodesic flow."""
    fx, fz = curve.flag_at(p.x), curve.flag_at(p.z)
    ctx = leaf_context(curve, alpha, p.x, p.z, x_flag=fx, z_flag=fz)
    y2 = reference_flow(curve.reference, p.x, p.z, p.y, t)
    img = lambda yy: geodesic_realization(
        curve, alpha[0], alpha[1], LeafPoint(p.x, yy, p.z),
        flags=(fx, curve.flag_at(yy), fz))
    return leafwise_distance(ctx, img(p.y), img(y2))


def stable_leaf_distance(curve: BoundaryCurve, p: LeafPoint, y0: float) -> float:
    """Distance from a tangent-flow point to the stable leaf through (x, y0).

    Measured by a log-cross-ratio on the auxiliary line through the image
    point and x1, against its second boundary intersection and its crossing
    of the stable leaf's support line (the tangent at y0).
    """
    fx = curve.flag_at(p.x)
    f = phi_tan_plus(curve, p)
    line = join([f.point, fx[1]])
    try:
        stable_support = curve.flag_at(y0)[2]
        p_y0 = meet([line, stable_support])
        q_theta = second_boundary_intersection(curve, line, p.x)
    except Exception as exc:
        raise NotDefinedHere(str(exc)) from exc
    q = ProjectiveSubspace.point(curve.aligned_point(q_theta))
    value = cross_ratio(fx[1], q, p_y0, f.point)
    if value == 0.0 or math.isinf(value):
        raise NotDefinedHere("degenerate cross-ratio configuration")
    return math.log(abs(value))


def decay_experiment(curve: BoundaryCurve, p: LeafPoint, y0: float,
                     t_max: float, steps: int):
    """Slope of log stable-leaf distance against tangent-flow time.

    Returns (slope, samples) where samples is a list of (t, distance).
    """
    samples = []
    current = p
    fx, fz = curve.flag_at(p.x), curve.flag_at(p.z)
    for k in range(steps + 1):
        t = t_max * k / steps
        if k > 0:
            current = flow_step(curve, (2, 3), current, t_max / steps,
                                x_flag=fx, z_flag=fz)
        samples.append((t, stable_leaf_distance(curve, current, y0)))
    ts = np.array([s[0] for s in samples])
    ds = np.array([abs(s[1]) for s in samples])
    if np.any(ds <= 0):
        raise NotDefinedHere("stable-leaf distance vanished along the orbit")
    slope = float(np.polyfit(ts, np.log(ds), 1)[0])
    return slope, samples


@dataclass(frozen=True)
class RegularityProbeReport:
    exponent_highest: float
    exponent_23: float
    residuals_highest: tuple
    residuals_23: tuple


def regularity_probe(curve: BoundaryCurve, x: float, z: float,
                     num_scales: int = 6, base_scale: float = 0.2,
                     y_center: float = None) -> RegularityProbeReport:
    """Holder exponent of the tangent field along realized image curves (n >= 4).

    Sweeps the one-parameter family (x + s, y + s, z): both the leaf and
    the flow-line parameter must move, since a single leaf maps to a
    straight segment and the x-only family keeps the (2, 3) image inside
    the fixed line z^{n-1} ∩ y^{n-1}.  Compares the highest root (1, n)
    against (2, 3): tangent directions of the image curve are estimated
    by symmetric differences at dyadic parameter scales and the angle
    between nearby tangents is regressed against the separation in
    log-log coordinates.
    """
    from .config import InsufficientResolution

    n = curve.n
    if n < 4:
        raise ValueError("probe requires n >= 4")
    arc = circular_gap(x, z)
    y_c = (x + arc / 2) % (2 * math.pi) if y_center is None else y_center

    def image(alpha, s):
        return geodesic_realization(
            curve, alpha[0], alpha[1],
            LeafPoint((x + s) % (2 * math.pi), (y_c + s) % (2 * math.pi), z))

    def make_chart(alpha):
        # local chart anchored at the central image point (no global
        # affine chart exists for even n)
        h = image(alpha, 0.0).vector
        q_frame = np.linalg.qr(np.column_stack([h, np.eye(n)]))[0]

        def chart_image(s):
            w = image(alpha, s).vector
            denom = h @ w
            if abs(denom) < 1e-9 * np.linalg.norm(w):
                raise InsufficientResolution("image point left the local chart")
            return (q_frame[:, 1:].T @ w) / denom

        return chart_image

    def tangent_exponent(alpha):
        chart_image = make_chart(alpha)
        logs_h, logs_angle, residuals = [], [], []
        for k in range(num_scales):
            h = base_scale * 0.5**k
            angles = []
            for offset in (-1.0, 0.0, 1.0):
                s0 = offset * 2 * h
                t1 = chart_image(s0 + h) - chart_image(s0 - h)
                t2 = chart_image(s0 + 3 * h) - chart_image(s0 + h)
                c = float(np.dot(t1, t2) / (np.linalg.norm(t1) * np.linalg.norm(t2)))
                angles.append(math.acos(max(-1.0, min(1.0, c))))
            angle = float(np.mean(angles))
            if angle < 1e-13:
                break
            logs_h.append(math.log(h))
            logs_angle.append(math.log(angle))
        if len(logs_h) < 3:
            raise InsufficientResolution("too few usable scales")
        coeffs = np.polyfit(logs_h, logs_angle, 1)
        fit = np.polyval(coeffs, logs_h)
        residuals = tuple(float(r) for r in (np.array(logs_angle) - fit))
        return float(coeffs[0]), residuals

    e_h, r_h = tangent_exponent((1, n))
    e_23, r_23 = tangent_exponent((2, 3))
    return RegularityProbeReport(e_h, e_23, r_h, r_23)
