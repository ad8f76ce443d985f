"""Numerical projective geometry over R^n.

Subspaces are represented by orthonormal bases (column span), which keeps
join/meet simple: both reduce to SVD rank computations.  Rank decisions
are governed by the tolerances in `flagflows.config`.

All values are immutable after construction and all operations are pure.
"""

from dataclasses import dataclass, field

import numpy as np

from .config import (
    DEFAULT_TOL,
    DegenerateSum,
    DimensionOverflow,
    EmptyIntersection,
    IndeterminateRatio,
    LineMissesBoundary,
    NotCollinear,
    PointOutsideDomain,
    Tolerances,
    UnexpectedDimension,
)


def _orthonormalize(vectors: np.ndarray, rank_tol: float):
    """Orthonormal basis for the column span, with the numerical rank.

    Returns (basis, rank); `basis` has `rank` columns.
    """
    vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
    u, s, _ = np.linalg.svd(vectors, full_matrices=False)
    scale = s[0] if s.size and s[0] > 0 else 1.0
    rank = int(np.sum(s > rank_tol * scale))
    return u[:, :rank], rank


@dataclass(frozen=True)
class ProjectiveSubspace:
    """A k-dimensional linear subspace of R^n up to scale.

    `basis` is an n x k matrix with orthonormal columns whose span defines
    the subspace.  Points are k=1, hyperplanes are k=n-1.
    """

    ambient_dim: int
    basis: np.ndarray

    def __post_init__(self):
        basis = np.asarray(self.basis, dtype=float)
        if basis.ndim == 1:
            basis = basis[:, None]
        object.__setattr__(self, "basis", basis)
        n, k = basis.shape
        if n != self.ambient_dim or not (1 <= k <= n - 1):
            raise ValueError(f"bad basis shape {basis.shape} for ambient dim {self.ambient_dim}")
        gram = basis.T @ basis
        if np.max(np.abs(gram - np.eye(k))) > 1e-10:
            raise ValueError("basis columns are not orthonormal")
        basis.setflags(write=False)

    @classmethod
    def from_spanning(cls, vectors, ambient_dim=None, tol: Tolerances = DEFAULT_TOL):
        """Subspace spanned by the given vectors (rows or a single vector)."""
        arr = np.asarray(vectors, dtype=float)
        if arr.ndim == 1:
            arr = arr[None, :]
        if ambient_dim is None:
            ambient_dim = arr.shape[1]
        basis, rank = _orthonormalize(arr.T, tol.rank)
        if rank == 0:
            raise ValueError("spanning set is numerically zero")
        return cls(ambient_dim, basis)

    @classmethod
    def point(cls, coords):
        """Convenience constructor for a one-dimensional subspace."""
        v = np.asarray(coords, dtype=float)
        return cls(v.size, (v / np.linalg.norm(v))[:, None])

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def vector(self) -> np.ndarray:
        """Spanning vector, for dim-1 subspaces only."""
        if self.dim != 1:
            raise ValueError("vector is only defined for points")
        return self.basis[:, 0]

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.T

    def principal_angle(self, other: "ProjectiveSubspace") -> float:
        """Largest principal angle between two subspaces of equal dimension."""
        s = np.linalg.svd(self.basis.T @ other.basis, compute_uv=False)
        cos_a = float(np.clip(s.min(), -1.0, 1.0))
        if cos_a > 0.99:
            # arccos loses half the significant digits near zero angle;
            # the residual spectral norm is sin of the same angle
            resid = other.basis - self.projector() @ other.basis
            return float(np.arcsin(min(1.0, np.linalg.norm(resid, ord=2))))
        return float(np.arccos(cos_a))

    def contains(self, other: "ProjectiveSubspace", tol: Tolerances = DEFAULT_TOL) -> bool:
        """Whether `other` is contained in this subspace, up to tolerance."""
        if other.dim > self.dim:
            return False
        resid = other.basis - self.projector() @ other.basis
        return bool(np.linalg.norm(resid, ord=2) < max(tol.equality, 1e-9))

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProjectiveSubspace):
            return NotImplemented
        return (
            self.ambient_dim == other.ambient_dim
            and self.dim == other.dim
            and self.principal_angle(other) < 1e-9
        )

    def __hash__(self):
        raise TypeError("ProjectiveSubspace equality is numeric; not hashable")

    def display_coords(self) -> np.ndarray:
        """Spanning vector scaled so its largest-magnitude entry is +1 (cosmetic)."""
        v = self.vector
        return v / v[np.argmax(np.abs(v))]

    def to_dict(self) -> dict:
        return {
            "ambient_dim": self.ambient_dim,
            "basis": [list(map(float, row)) for row in self.basis],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ProjectiveSubspace":
        return cls(int(data["ambient_dim"]), np.asarray(data["basis"], dtype=float))


@dataclass(frozen=True)
class Flag:
    """A nested chain of subspaces of strictly increasing dimension."""

    subspaces: tuple

    def __post_init__(self):
        subs = tuple(self.subspaces)
        object.__setattr__(self, "subspaces", subs)
        dims = [s.dim for s in subs]
        if dims != sorted(set(dims)):
            raise ValueError("flag dimensions must be strictly increasing")
        for small, big in zip(subs, subs[1:]):
            if not big.contains(small):
                raise ValueError("flag subspaces are not nested")

    def __getitem__(self, k: int) -> ProjectiveSubspace:
        """Subspace of dimension k (the superscript index convention)."""
        for s in self.subspaces:
            if s.dim == k:
                return s
        raise KeyError(f"flag has no subspace of dimension {k}")

    def __len__(self):
        return len(self.subspaces)

    @property
    def ambient_dim(self) -> int:
        return self.subspaces[0].ambient_dim

    def to_dict(self) -> dict:
        return {"subspaces": [s.to_dict() for s in self.subspaces]}

    @classmethod
    def from_dict(cls, data: dict) -> "Flag":
        return cls(tuple(ProjectiveSubspace.from_dict(d) for d in data["subspaces"]))

    @classmethod
    def from_basis_columns(cls, columns: np.ndarray, dims=None) -> "Flag":
        """Nested flag whose dimension-k member spans the first k columns."""
        n = columns.shape[0]
        q, _ = np.linalg.qr(columns)
        if dims is None:
            dims = range(1, columns.shape[1] + 1)
        subs = [ProjectiveSubspace(n, q[:, :k].copy()) for k in dims]
        return cls(tuple(subs))


def join(subspaces, tol: Tolerances = DEFAULT_TOL) -> ProjectiveSubspace:
    """Span of a collection of subspaces.

    Raises DimensionOverflow if the dimension count exceeds the ambient
    dimension, and DegenerateSum if the inputs fail to be in general
    position (numerical rank below the sum of dimensions).
    """
    subspaces = list(subspaces)
    n = subspaces[0].ambient_dim
    if any(s.ambient_dim != n for s in subspaces):
        raise ValueError("ambient dimensions disagree")
    total = sum(s.dim for s in subspaces)
    if total > n:
        raise DimensionOverflow(f"join of total dimension {total} in R^{n}")
    stacked = np.hstack([s.basis for s in subspaces])
    basis, rank = _orthonormalize(stacked, tol.rank)
    if rank < total:
        raise DegenerateSum(f"join rank {rank} < expected {total}")
    return ProjectiveSubspace(n, basis)


def dual(s: ProjectiveSubspace) -> ProjectiveSubspace:
    """Annihilator of a subspace; an order-reversing involution."""
    u, _, _ = np.linalg.svd(s.basis, full_matrices=True)
    return ProjectiveSubspace(s.ambient_dim, u[:, s.dim:].copy())


def meet(subspaces, tol: Tolerances = DEFAULT_TOL, strict: bool = False) -> ProjectiveSubspace:
    """Intersection of subspaces, via the null space of stacked annihilators.

    With `strict`, a result exceeding the general-position dimension
    raises UnexpectedDimension (signals tangency or degeneracy).
    """
    subspaces = list(subspaces)
    n = subspaces[0].ambient_dim
    if any(s.ambient_dim != n for s in subspaces):
        raise ValueError("ambient dimensions disagree")
    m = len(subspaces)
    expected = sum(s.dim for s in subspaces) - (m - 1) * n
    annihilators = np.hstack([dual(s).basis for s in subspaces])
    u, sv, _ = np.linalg.svd(annihilators, full_matrices=True)
    sv = np.concatenate([sv, np.zeros(n - sv.size)])
    scale = sv[0] if sv[0] > 0 else 1.0
    actual = int(np.sum(sv <= tol.rank * scale))
    if actual == 0:
        raise EmptyIntersection("numerical intersection is zero-dimensional")
    if strict and expected >= 1 and actual > expected:
        raise UnexpectedDimension(f"intersection dim {actual} > general-position {expected}")
    return ProjectiveSubspace(n, u[:, n - actual:].copy())


def _line_coords(points, tol: Tolerances):
    """2-vector coordinates of dim-1 subspaces on their common line."""
    vectors = np.column_stack([p.vector for p in points])
    u, s, _ = np.linalg.svd(vectors, full_matrices=False)
    if s.size > 2 and s[2] > tol.collinear * s[0]:
        raise NotCollinear(f"collinearity residual {s[2] / s[0]:.3e}")
    frame = u[:, :2]
    return frame.T @ vectors  # 2 x m


def cross_ratio(a, b, p, q, tol: Tolerances = DEFAULT_TOL) -> float:
    """Cross-ratio (a,b;p,q) of four collinear points, as an extended real.

    The value (q-a)(p-b) / ((p-a)(q-b)) in any affine coordinate on the
    common line; independent of that choice and projectively invariant.
    A single degeneracy (a=p or b=q) yields a signed infinity; both at
    once raise IndeterminateRatio.
    """
    coords = _line_coords([a, b, p, q], tol)
    ca, cb, cp, cq = coords.T

    def det(u, v):
        return u[0] * v[1] - u[1] * v[0]

    num = det(cq, ca) * det(cp, cb)
    den = det(cp, ca) * det(cq, cb)
    scale = float(np.max(np.abs(coords))) ** 2
    eps = tol.rank * scale
    if abs(den) <= eps:
        if abs(num) <= eps:
            raise IndeterminateRatio("a=p and b=q simultaneously")
        return float(np.copysign(np.inf, num))
    return float(num / den)


@dataclass(frozen=True)
class AffineChart:
    """An affine chart of RP^{n-1} given by a frame matrix.

    `frame` maps homogeneous coordinates to chart coordinates: the chart
    image of v is (F v)[:-1] / (F v)[-1].  The hyperplane at infinity is
    the kernel of the last row of the frame.
    """

    infinity_hyperplane: ProjectiveSubspace
    frame: np.ndarray = field(repr=False)

    def __post_init__(self):
        frame = np.asarray(self.frame, dtype=float)
        object.__setattr__(self, "frame", frame)
        if abs(np.linalg.det(frame)) < 1e-14:
            raise ValueError("chart frame is singular")
        frame.setflags(write=False)

    @classmethod
    def from_frame(cls, frame: np.ndarray) -> "AffineChart":
        frame = np.asarray(frame, dtype=float)
        n = frame.shape[0]
        h = frame[-1]  # the chart divides by the last coordinate of F v
        inf_basis = np.linalg.svd(h[None, :])[2][1:].T.copy()
        return cls(ProjectiveSubspace(n, inf_basis), frame)

    @classmethod
    def standard(cls, n: int) -> "AffineChart":
        return cls.from_frame(np.eye(n))

    def to_chart(self, point: ProjectiveSubspace) -> np.ndarray:
        w = self.frame @ point.vector
        if abs(w[-1]) < 1e-13 * np.linalg.norm(w):
            raise PointOutsideDomain("point lies on the chart's hyperplane at infinity")
        return w[:-1] / w[-1]

    def contains(self, point: ProjectiveSubspace) -> bool:
        w = self.frame @ point.vector
        return abs(w[-1]) >= 1e-13 * np.linalg.norm(w)

    def line_to_chart(self, line: ProjectiveSubspace) -> np.ndarray:
        """Homogeneous chart coefficients (a, b, c) of a hyperplane: a*u + b*v + c = 0."""
        if line.dim != line.ambient_dim - 1:
            raise ValueError("expected a hyperplane")
        covector = dual(line).vector
        coeffs = np.linalg.solve(self.frame.T, covector)
        return coeffs / np.linalg.norm(coeffs[:-1])


def chart_from_four_points(p1, p2, p3, interior, bounded_direction=True) -> AffineChart:
    """Chart sending p1, p2, p3 to a standard triangle with `interior` at its barycenter.

    The hyperplane at infinity is the plane avoiding the triangle, so a
    convex region through the three points with the given interior point
    maps to a bounded set.
    """
    m = np.column_stack([p.vector for p in (p1, p2, p3)])
    c = np.linalg.solve(m, interior.vector)
    if np.min(np.abs(c)) < 1e-12 * np.max(np.abs(c)):
        raise ValueError("interior point is nearly coplanar with the frame points")
    normalizer = np.linalg.inv(m * c)
    # after normalization the triangle is e1, e2, e3 and interior is (1,1,1);
    # divide by the coordinate sum so the triangle maps into the plane u+v+w=1
    g = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 1.0]])
    return AffineChart.from_frame(g @ normalizer)


def hilbert_distance(boundary: np.ndarray, p: np.ndarray, q: np.ndarray,
                     tol: Tolerances = DEFAULT_TOL) -> float:
    """Hilbert metric log |(a,b;p,q)| on a convex domain sampled as a closed polygon.

    `boundary` is an (m, 2) array of chart points tracing the convex curve;
    a and b are the two intersections of line(p, q) with the polygon,
    ordered so that (a, p, q, b) appear in order along the line.
    """
    boundary = np.asarray(boundary, dtype=float)
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if not (_inside_convex_polygon(boundary, p) and _inside_convex_polygon(boundary, q)):
        raise PointOutsideDomain("p and q must lie strictly inside the boundary polygon")
    if np.linalg.norm(q - p) < 1e-15:
        return 0.0
    d = q - p
    ts = []
    m = boundary.shape[0]
    for i in range(m):
        e0, e1 = boundary[i], boundary[(i + 1) % m]
        a = np.column_stack([d, e0 - e1])
        if abs(np.linalg.det(a)) < 1e-15:
            continue
        t, s = np.linalg.solve(a, e0 - p)
        if -1e-12 <= s <= 1 + 1e-12:
            ts.append(t)
    behind = [t for t in ts if t < 0]
    ahead = [t for t in ts if t > 1]
    if not behind or not ahead:
        raise LineMissesBoundary("chord intersections with the boundary not found")
    ta, tb = max(behind), min(ahead)
    # chart coordinates along the line: a=ta, p=0, q=1, b=tb
    value = ((1 - ta) * (0 - tb)) / ((0 - ta) * (1 - tb))
    return abs(float(np.log(abs(value))))


def _inside_convex_polygon(vertices: np.ndarray, point: np.ndarray, margin: float = 0.0) -> bool:
    """Strict interior test for a convex polygon (either orientation)."""
    m = vertices.shape[0]
    edges = vertices[(np.arange(m) + 1) % m] - vertices
    rel = point[None, :] - vertices
    cross = edges[:, 0] * rel[:, 1] - edges[:, 1] * rel[:, 0]
    lengths = np.linalg.norm(edges, axis=1)
    dist = cross / np.where(lengths > 0, lengths, 1.0)
    return bool(np.all(dist > margin) or np.all(dist < -margin))


def signed_polygon_distance(vertices: np.ndarray, point: np.ndarray) -> float:
    """Minimal signed edge distance to a convex polygon; positive inside."""
    m = vertices.shape[0]
    nxt = vertices[(np.arange(m) + 1) % m]
    edges = nxt - vertices
    rel = point[None, :] - vertices
    cross = edges[:, 0] * rel[:, 1] - edges[:, 1] * rel[:, 0]
    lengths = np.linalg.norm(edges, axis=1)
    dist = cross / np.where(lengths > 0, lengths, 1.0)
    area2 = float(np.sum(vertices[:, 0] * nxt[:, 1] - vertices[:, 1] * nxt[:, 0]))
    if area2 < 0:
        dist = -dist
    return float(np.min(dist))
