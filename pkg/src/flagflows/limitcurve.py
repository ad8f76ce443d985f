"""Numerical approximation of equivariant boundary flag curves.

A `BoundaryCurve` holds circularly ordered samples theta -> full flag,
where theta parameterizes the boundary circle through the reference
Fuchsian representation (see `flagflows.reps`).  Samples come from
attracting eigenflags over a word ball; Fuchsian curves can instead be
built in closed form from the symmetric-power embedding, which gives
exact flags at any parameter (used by the high-accuracy experiments).
"""

import bisect
import math
from dataclasses import dataclass, field

import numpy as np

from .config import (
    DEFAULT_TOL,
    AmbiguousBracket,
    InsufficientResolution,
    InsufficientSamples,
    NoSecondIntersection,
    NotDefinedHere,
    NotLoxodromic,
    Tolerances,
)
from .projective import (
    AffineChart,
    Flag,
    ProjectiveSubspace,
    chart_from_four_points,
    dual,
)
from .reps import (
    SurfaceGroupRep,
    boundary_vector,
    circular_gap,
    contragredient,
    fixed_flags,
    sym_matrix,
    theta_of_vector,
)
from .words import enumerate_conjugacy_classes


@dataclass
class BoundaryCurve:
    """Sampled limit curve theta -> flag, with chart and sign conventions.

    `positive_covector` fixes a sign-normalized lift of the curve: every
    xi^1 sample v satisfies positive_covector . v > 0, which makes
    incidence residuals along the curve continuous.
    """

    thetas: np.ndarray
    flags: list
    rep: SurfaceGroupRep
    reference: SurfaceGroupRep
    words: list = None
    exact_eval: object = None  # optional callable theta -> Flag
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        self.thetas = np.asarray(self.thetas, dtype=float)
        order = np.argsort(self.thetas)
        self.thetas = self.thetas[order]
        self.flags = [self.flags[i] for i in order]
        if self.words is not None:
            self.words = [self.words[i] for i in order]
        if np.any(np.diff(self.thetas) < 1e-10):
            raise ValueError("duplicate thetas in curve samples")
        self._build_chart()

    # -- construction helpers ------------------------------------------------

    def _build_chart(self):
        n = self.rep.n
        vecs = np.column_stack([f[1].vector for f in self.flags])
        # chain-align signs along the circular order
        for i in range(1, vecs.shape[1]):
            if vecs[:, i] @ vecs[:, i - 1] < 0:
                vecs[:, i] = -vecs[:, i]
        if vecs.shape[1] >= 3 and vecs[:, 0] @ vecs[:, -1] < 0:
            # odd-degree lift (even n): the curve meets every hyperplane,
            # so no affine chart contains it; chart-based queries disabled
            self.chart = None
            self.positive_covector = None
            self._aligned_points = vecs
            self._interp_error = 1e-12 if self.exact_eval is not None else 1e-6
            return
        barycenter = vecs.mean(axis=1)
        barycenter /= np.linalg.norm(barycenter)
        # The infinity covector is an average of aligned tangent covectors:
        # an interior point of the dual convex domain, so the corresponding
        # hyperplane misses the closed convex hull of the curve.
        covectors = []
        for f in self.flags:
            c = dual(f[n - 1]).vector
            if c @ barycenter < 0:
                c = -c
            covectors.append(c)
        h = np.mean(covectors, axis=0)
        h /= np.linalg.norm(h)
        signs = h @ vecs
        if np.min(signs) <= 0:
            raise ValueError("curve samples are not contained in the chosen affine chart")
        self.positive_covector = h
        # complete h to a basis and recenter/rescale to unit size in the chart
        q = np.linalg.qr(np.column_stack([h, np.eye(n)]))[0]
        raw = (q[:, 1:].T @ vecs) / signs[None, :]
        center = raw.mean(axis=1)
        scale = max(np.abs(raw - center[:, None]).max(), 1e-12)
        frame = np.vstack([(q[:, 1:].T - np.outer(center, h)) / scale, h[None, :]])
        self.chart = AffineChart.from_frame(frame)
        self._aligned_points = vecs / np.abs(signs)[None, :]
        self._interp_error = self._estimate_interp_error()

    def _estimate_interp_error(self) -> float:
        if self.exact_eval is not None:
            return 1e-12
        p = self._aligned_points
        count = p.shape[1]
        if count < 4:
            return 1e-6
        t = self.thetas
        gaps = np.array([circular_gap(t[i], t[(i + 1) % count]) for i in range(count)])
        # local curvature scale from the deviation of each sample off the
        # chord of its neighbors, then worst-gap chord error |f''| g^2 / 8
        curv = np.zeros(count)
        for i in range(count):
            g1, g2 = gaps[i - 1], gaps[i]
            lerp = (g2 * p[:, i - 1] + g1 * p[:, (i + 1) % count]) / (g1 + g2)
            curv[i] = 2.0 * np.linalg.norm(p[:, i] - lerp) / (g1 * g2)
        # cap outlier curvature estimates (tiny-gap triples amplify noise)
        local = np.minimum(np.maximum(curv, np.roll(curv, -1)),
                           np.percentile(curv, 90))
        per_gap = local * gaps**2 / 8.0
        return float(max(per_gap.max(), 1e-12))

    # -- basic queries -------------------------------------------------------

    @property
    def n(self) -> int:
        return self.rep.n

    def __len__(self):
        return self.thetas.size

    @property
    def interp_error(self) -> float:
        return self._interp_error

    def _require_chart(self):
        if self.chart is None:
            raise NotDefinedHere("curve has no global affine chart (even n)")

    def aligned_point(self, theta: float) -> np.ndarray:
        """Sign-normalized xi^1 vector at theta (interpolated if needed)."""
        self._require_chart()
        v = self.flag_at(theta)[1].vector
        s = self.positive_covector @ v
        return v * math.copysign(1.0, s)

    def chart_point(self, theta: float) -> np.ndarray:
        self._require_chart()
        return self.chart.to_chart(self.flag_at(theta)[1])

    def chart_points(self) -> np.ndarray:
        """Chart coordinates of all xi^1 samples, in circular order (N, 2)."""
        self._require_chart()
        w = self.chart.frame @ self._aligned_points
        return (w[:-1] / w[-1]).T

    def hyperplane_covectors(self) -> np.ndarray:
        """Annihilator covectors of the top flag level at every sample (N, n)."""
        if not hasattr(self, "_hyperplane_covectors"):
            self._hyperplane_covectors = np.vstack(
                [dual(f[self.rep.n - 1]).vector for f in self.flags]
            )
        return self._hyperplane_covectors

    def sample_index_near(self, theta: float):
        i = bisect.bisect_left(self.thetas, theta % (2 * math.pi))
        return i % self.thetas.size

    def flag_at(self, theta: float) -> Flag:
        return interpolate(self, theta)

    # -- serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "rep": self.rep.to_dict(),
            "reference": self.reference.to_dict(),
            "samples": [
                {"theta": float(t), "flag": f.to_dict()}
                for t, f in zip(self.thetas, self.flags)
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BoundaryCurve":
        return cls(
            np.array([s["theta"] for s in data["samples"]]),
            [Flag.from_dict(s["flag"]) for s in data["samples"]],
            SurfaceGroupRep.from_dict(data["rep"]),
            SurfaceGroupRep.from_dict(data["reference"]),
        )


def sample_boundary(rep: SurfaceGroupRep, reference: SurfaceGroupRep, max_word_len: int,
                    min_samples: int = 64, tol: Tolerances = DEFAULT_TOL) -> BoundaryCurve:
    """Sample the limit curve at attracting fixed points of a word ball.

    Each conjugacy-class representative (and its inverse, enumerated as a
    separate class) contributes theta = attracting fixed point of the
    reference Mobius action, flag = attracting eigenflag of rep.  Equal
    thetas are resolved by keeping the longest word, whose eigenflag is
    the best converged.
    """
    samples = {}
    for w in enumerate_conjugacy_classes(rep.presentation, max_word_len):
        m2 = reference.matrix(w)
        if abs(np.trace(m2)) <= 2.0:
            raise NotLoxodromic(
                f"reference image of {rep.presentation.format_word(w)} is not hyperbolic"
            )
        vals = np.linalg.eigvals(m2)
        vecs = np.linalg.eig(m2)[1]
        top = np.argmax(np.abs(vals))
        theta = theta_of_vector(vecs[:, top].real)
        try:
            flag, _ = fixed_flags(rep.matrix(w), tol.loxodromy_gap)
        except NotLoxodromic as exc:
            raise NotLoxodromic(
                f"word {rep.presentation.format_word(w)}: {exc}"
            ) from exc
        key = round(theta / 1e-10)
        prev = samples.get(key)
        if prev is None or len(w) > len(prev[2]):
            samples[key] = (theta, flag, w)
    if len(samples) < min_samples:
        raise InsufficientSamples(f"only {len(samples)} distinct boundary samples")
    items = sorted(samples.values(), key=lambda s: s[0])
    return BoundaryCurve(
        np.array([s[0] for s in items]),
        [s[1] for s in items],
        rep,
        reference,
        words=[s[2] for s in items],
        tol=tol,
    )


def _rotation_to(theta: float) -> np.ndarray:
    """SL2 rotation carrying the RP^1 point (1, 0) to boundary_vector(theta)."""
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return np.array([[-c, -s], [s, -c]])


def fuchsian_curve(reference: SurfaceGroupRep, n: int, num_samples: int = 1024,
                   tol: Tolerances = DEFAULT_TOL) -> BoundaryCurve:
    """Closed-form limit curve of the Fuchsian representation sym_power(reference, n).

    The flag at theta is the symmetric power of a rotation applied to the
    coordinate flag (the osculating flag of the moment curve), which is
    exact at every parameter; the curve carries an exact evaluator.
    """
    from .reps import sym_power

    rep = sym_power(reference, n)

    def exact_eval(theta: float) -> Flag:
        m = sym_matrix(_rotation_to(theta), n)
        return Flag.from_basis_columns(m[:, : n - 1], dims=range(1, n))

    thetas = (np.arange(num_samples) + 0.5) * 2 * math.pi / num_samples
    flags = [exact_eval(t) for t in thetas]
    return BoundaryCurve(thetas, flags, rep, reference, exact_eval=exact_eval, tol=tol)


def interpolate(curve: BoundaryCurve, theta: float) -> Flag:
    """Flag at an arbitrary parameter.

    Exact samples are returned as stored; between samples, each flag level
    is interpolated linearly in basis coordinates after sign alignment and
    the result re-orthonormalized into a nested flag.
    """
    theta = theta % (2 * math.pi)
    n_samples = curve.thetas.size
    if n_samples < 2:
        raise InsufficientSamples("need at least two samples to interpolate")
    i = bisect.bisect_left(curve.thetas, theta)
    lo, hi = (i - 1) % n_samples, i % n_samples
    for j in (lo, hi):
        if abs(curve.thetas[j] - theta) < 1e-13 or abs(
            abs(curve.thetas[j] - theta) - 2 * math.pi
        ) < 1e-13:
            return curve.flags[j]
    if curve.exact_eval is not None:
        return curve.exact_eval(theta)
    gap = circular_gap(curve.thetas[lo], curve.thetas[hi])
    lam = circular_gap(curve.thetas[lo], theta) / gap
    f_lo, f_hi = curve.flags[lo], curve.flags[hi]
    columns = []
    for k_index in range(len(f_lo.subspaces)):
        b_lo = f_lo.subspaces[k_index].basis
        b_hi = f_hi.subspaces[k_index].basis
        # Procrustes alignment of the two bases before the linear blend
        u, _, vt = np.linalg.svd(b_hi.T @ b_lo)
        b_hi_aligned = b_hi @ (u @ vt)
        blend = (1.0 - lam) * b_lo + lam * b_hi_aligned
        prev_cols = 0 if k_index == 0 else f_lo.subspaces[k_index - 1].dim
        columns.append(blend[:, prev_cols:])
    stacked = np.hstack(columns)
    dims = [s.dim for s in f_lo.subspaces]
    return Flag.from_basis_columns(stacked, dims=dims)


def second_boundary_intersection(curve: BoundaryCurve, line: ProjectiveSubspace,
                                 known: float, tol: Tolerances = None) -> float:
    """The other parameter at which a line through xi^1(known) meets the curve.

    Works by deflating the known root: the incidence residual divided by
    sin(gap/2) has exactly one sign change on the circle, located at the
    second intersection; that bracket is refined by bisection.
    """
    tol = curve.tol if tol is None else tol
    if line.dim != curve.n - 1:
        raise ValueError("expected a hyperplane (projective line for n=3)")
    covector = dual(line).vector

    def residual(theta):
        return covector @ curve.aligned_point(theta)

    r_known = residual(known)
    if abs(r_known) > 1e-6:
        raise ValueError(f"line misses xi^1(known) by {abs(r_known):.3e}")

    def deflated(theta):
        gap = circular_gap(known, theta)
        return residual(theta) / math.sin(gap / 2.0)

    thetas = curve.thetas
    eps = 1e-7
    grid = [known + eps] + [
        float(t) for t in thetas if min(circular_gap(known, t), circular_gap(t, known)) > eps
    ] + [known + 2 * math.pi - eps]
    grid = sorted(grid, key=lambda t: circular_gap(known, t))
    values = [deflated(t) for t in grid]
    brackets = [
        (grid[i], grid[i + 1])
        for i in range(len(grid) - 1)
        if values[i] * values[i + 1] < 0
    ]
    if not brackets:
        raise NoSecondIntersection("no sign change: line is numerically tangent")
    if len(brackets) > 1:
        raise AmbiguousBracket(f"{len(brackets)} sign changes; samples not convex here")
    a, b = brackets[0]
    fa = deflated(a)
    while circular_gap(a, b) > tol.bisection:
        mid = a + circular_gap(a, b) / 2.0
        fm = deflated(mid)
        if fa * fm <= 0:
            b = mid
        else:
            a, fa = mid, fm
    return (a + circular_gap(a, b) / 2.0) % (2 * math.pi)


def dual_curve(curve: BoundaryCurve) -> BoundaryCurve:
    """The projectively dual curve: flags annihilated entrywise and reversed."""

    def dualize(flag: Flag) -> Flag:
        return Flag(tuple(dual(s) for s in reversed(flag.subspaces)))

    exact = None
    if curve.exact_eval is not None:
        base = curve.exact_eval
        exact = lambda theta: dualize(base(theta))
    return BoundaryCurve(
        curve.thetas.copy(),
        [dualize(f) for f in curve.flags],
        contragredient(curve.rep),
        curve.reference,
        words=list(curve.words) if curve.words is not None else None,
        exact_eval=exact,
        tol=curve.tol,
    )


@dataclass(frozen=True)
class FrenetReport:
    min_triple_singular_value: float
    max_osculation_defect: float
    general_position_ok: bool
    osculation_ok: bool
    general_position_threshold: float
    osculation_threshold: float


def frenet_checks(curve: BoundaryCurve, min_gap: float = 0.1,
                  general_position_threshold: float = 1e-4,
                  osculation_threshold: float = 10.0) -> FrenetReport:
    """Numerical diagnostics for the two hyperconvexity conditions.

    (a) general position: smallest singular value of stacked xi^1 vectors
    over well-separated sample n-tuples; (b) osculation: angle between the
    chord of adjacent samples and the tangent hyperplane, per unit gap.
    """
    if len(curve) < 16:
        raise InsufficientSamples("need at least 16 samples for frenet checks")
    n = curve.n
    thetas = curve.thetas
    count = thetas.size
    min_sv = np.inf
    stride_base = max(1, count // 64)
    for stride in (stride_base, 2 * stride_base, 3 * stride_base + 1):
        for start in range(0, count, max(1, count // 32)):
            idx = [(start + k * stride) % count for k in range(n)]
            pts = [thetas[i] for i in idx]
            gaps_ok = all(
                min(circular_gap(p, q), circular_gap(q, p)) > min_gap
                for a_i, p in enumerate(pts)
                for q in pts[a_i + 1:]
            )
            if not gaps_ok:
                continue
            stacked = np.column_stack([curve.flags[i][1].vector for i in idx])
            sv = np.linalg.svd(stacked, compute_uv=False)
            min_sv = min(min_sv, float(sv[-1]))
    max_defect = 0.0
    for i in range(count):
        j = (i + 1) % count
        gap = circular_gap(thetas[i], thetas[j])
        if gap > 0.5:
            continue
        chord = np.column_stack(
            [curve.flags[i][1].vector, curve.flags[j][1].vector]
        )
        q, _ = np.linalg.qr(chord)
        tangent = curve.flags[i][n - 1].basis  # the hyperplane entry
        # max principal angle of containment of the chord in the tangent
        s = np.linalg.svd(tangent.T @ q[:, :2], compute_uv=False)
        angle = math.acos(min(1.0, float(s[-1])))
        max_defect = max(max_defect, angle / gap)
    return FrenetReport(
        min_triple_singular_value=float(min_sv),
        max_osculation_defect=float(max_defect),
        general_position_ok=bool(min_sv > general_position_threshold),
        osculation_ok=bool(max_defect < osculation_threshold),
        general_position_threshold=general_position_threshold,
        osculation_threshold=osculation_threshold,
    )


@dataclass
class ConvexDomainApprox:
    """Polygonal approximation of the invariant convex domain in a chart."""

    vertices: np.ndarray       # (N, 2) chart coordinates, circular order
    tangents: list             # chart line coefficients (a, b, c) per vertex

    def is_convex(self) -> bool:
        v = self.vertices
        m = v.shape[0]
        e = v[(np.arange(m) + 1) % m] - v
        cross = e[:, 0] * np.roll(e[:, 1], -1) - e[:, 1] * np.roll(e[:, 0], -1)
        return bool(np.all(cross > 0) or np.all(cross < 0))

    def tangents_support(self, tolerance: float = 1e-8) -> bool:
        for (a, b, c) in self.tangents:
            vals = self.vertices @ np.array([a, b]) + c
            if vals.max() > tolerance and vals.min() < -tolerance:
                return False
        return True


def build_convex_domain(curve: BoundaryCurve) -> ConvexDomainApprox:
    verts = curve.chart_points()
    tangents = [curve.chart.line_to_chart(f[curve.n - 1]) for f in curve.flags]
    return ConvexDomainApprox(verts, tangents)


def boundary_regularity_estimate(curve: BoundaryCurve, num_base: int = 64,
                                 window: int = None):
    """Estimate boundary regularity exponents (alpha_hat, beta_hat).

    At many base points, regress log height of the boundary over its
    tangent line against log offset along the tangent; alpha_hat and
    beta_hat are the extreme fitted exponents.  For a conic both are 2.
    """
    if len(curve) < 128:
        raise InsufficientSamples("need at least 128 samples")
    pts = curve.chart_points()
    count = pts.shape[0]
    window = max(8, count // 16) if window is None else window
    exponents = []
    for b_idx in range(0, count, max(1, count // num_base)):
        coeffs = curve.chart.line_to_chart(curve.flags[b_idx][curve.n - 1])
        normal = np.asarray(coeffs[:-1], dtype=float)
        normal /= np.linalg.norm(normal)
        rel = pts[[(b_idx + k) % count for k in range(-window, window + 1) if k != 0]] - pts[b_idx]
        h = rel @ normal
        s = np.linalg.norm(rel - np.outer(h, normal), axis=1)
        if np.median(np.sign(h[np.abs(h) > 0])) < 0:
            h = -h
        mask = (h > 1e-14) & (np.abs(s) > 1e-10)
        if mask.sum() < 8:
            continue
        ls, lh = np.log(np.abs(s[mask])), np.log(h[mask])
        if ls.max() - ls.min() < math.log(10.0):
            continue
        slope = np.polyfit(ls, lh, 1)[0]
        exponents.append(float(slope))
    if not exponents:
        raise InsufficientResolution("no base point spans a decade of offsets")
    return min(exponents), max(exponents)
