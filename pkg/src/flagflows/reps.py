"""Surface-group representations into SL(n, R).

Provides the reference Fuchsian holonomy of the genus-2 surface built
from the regular hyperbolic octagon (vertex angle pi/4), irreducible
embeddings SL2 -> SLn by symmetric powers, bulging deformations,
contragredients, and eigenvalue data (Jordan projections, root lengths,
fixed flags).

Also houses the circle parameterization of the boundary at infinity:
theta in [0, 2pi) corresponds to the point -cot(theta/2) of the real
projective line (the Cayley-transform angle of the disk model), so the
reference SL2 representation acts on theta by Mobius transformations.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .config import (
    DEFAULT_TOL,
    EigenFailure,
    IndexOrder,
    NonLoxodromicCurve,
    NotLoxodromic,
    Tolerances,
)
from .projective import Flag
from .words import GroupWord, SurfaceGroupPresentation, reduce_word

# ---------------------------------------------------------------------------
# circle boundary parameterization


def boundary_vector(theta: float) -> np.ndarray:
    """Homogeneous RP^1 coordinates of the boundary point with parameter theta."""
    return np.array([-math.cos(theta / 2.0), math.sin(theta / 2.0)])


def theta_of_vector(v) -> float:
    """Inverse of `boundary_vector`, defined up to the +- sign of v."""
    phi = math.atan2(v[1], -v[0])
    if phi < 0:
        phi += math.pi
    elif phi >= math.pi:
        phi -= math.pi
    return (2.0 * phi) % (2.0 * math.pi)


def mobius_theta(m: np.ndarray, theta: float) -> float:
    """Action of a real 2x2 matrix on the circle parameter."""
    return theta_of_vector(m @ boundary_vector(theta))


def circular_gap(start: float, end: float) -> float:
    """Counterclockwise angular distance from start to end, in [0, 2pi)."""
    return (end - start) % (2.0 * math.pi)


def positively_oriented(x: float, y: float, z: float) -> bool:
    """Whether the triple is in strict counterclockwise circular order."""
    gy, gz = circular_gap(x, y), circular_gap(x, z)
    return 0.0 < gy < gz


# ---------------------------------------------------------------------------
# eigenvalue data


@dataclass(frozen=True)
class JordanData:
    """Sorted log-moduli of the eigenvalues of a determinant +-1 matrix."""

    log_moduli: tuple

    def __post_init__(self):
        lm = tuple(float(x) for x in self.log_moduli)
        if any(a < b - 1e-12 for a, b in zip(lm, lm[1:])):
            raise ValueError("log-moduli must be sorted nonincreasing")
        if abs(sum(lm)) > 1e-9 * max(1.0, max(abs(x) for x in lm)):
            raise ValueError("log-moduli must sum to zero")
        object.__setattr__(self, "log_moduli", lm)


def jordan_projection(g: np.ndarray, g_inverse: np.ndarray = None) -> JordanData:
    """Sorted log-moduli of the eigenvalues of g (det g = +-1).

    Small eigenvalues of an ill-conditioned word product carry a relative
    error of roughly eps * cond(g); passing the independently computed
    inverse product recovers them as dominant eigenvalues of the inverse,
    keeping every entry accurate.
    """
    g = np.asarray(g, dtype=float)
    try:
        lm = np.sort(np.log(np.abs(np.linalg.eigvals(g))))[::-1]
        if g_inverse is not None:
            lm_inv = np.sort(np.log(np.abs(np.linalg.eigvals(g_inverse))))[::-1]
            n = lm.size
            for k in range(n):
                # entry k is better read from whichever product has it
                # closer to the top of the spectrum
                if lm[0] - lm[k] > lm[k] - lm[n - 1]:
                    lm[k] = -lm_inv[n - 1 - k]
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc
    # float determinants of long word products drift by roughly
    # eps * cond, so scale the unimodularity guard accordingly; the
    # mean-subtraction below removes the drift anyway
    det = np.linalg.det(g)
    drift = 1e3 * np.finfo(float).eps * math.exp(min(lm[0] - lm[-1], 40.0))
    if abs(abs(det) - 1.0) > max(1e-9, min(drift, 0.5)):
        raise ValueError(f"matrix determinant {det} is not +-1")
    lm = lm - lm.mean()  # remove the rounding drift in the zero-sum constraint
    return JordanData(tuple(lm))


def root_length(j: JordanData, i: int, k: int) -> float:
    """The root length l_i - l_k of the Jordan data, for 1 <= i < k <= n."""
    if not (1 <= i < k <= len(j.log_moduli)):
        raise IndexOrder(f"need 1 <= i < k <= n, got ({i}, {k})")
    return j.log_moduli[i - 1] - j.log_moduli[k - 1]


def loxodromic_eigensystem(g: np.ndarray, gap: float = 1e-6):
    """Real eigenvalues and eigenvectors of g sorted by decreasing modulus.

    Raises NotLoxodromic unless all eigenvalue moduli are pairwise
    separated by the relative gap.
    """
    g = np.asarray(g, dtype=float)
    try:
        vals, vecs = np.linalg.eig(g)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc
    order = np.argsort(-np.abs(vals))
    vals, vecs = vals[order], vecs[:, order]
    moduli = np.abs(vals)
    for a, b in zip(moduli, moduli[1:]):
        if (a - b) / a <= gap:
            raise NotLoxodromic(f"eigenvalue moduli gap {(a - b) / a:.3e} below {gap}")
    # distinct moduli force real eigenvalues; strip the numerical phase
    real_vecs = np.empty_like(vecs, dtype=float)
    for k in range(vals.size):
        v = vecs[:, k]
        phase = v[np.argmax(np.abs(v))]
        v = v * np.conj(phase / abs(phase))
        real_vecs[:, k] = v.real / np.linalg.norm(v.real)
    return vals.real, real_vecs


def fixed_flags(g: np.ndarray, gap: float = 1e-6):
    """Attracting and repelling full flags of a loxodromic matrix."""
    _, vecs = loxodromic_eigensystem(g, gap)
    n = g.shape[0]
    attracting = Flag.from_basis_columns(vecs[:, : n - 1], dims=range(1, n))
    repelling = Flag.from_basis_columns(vecs[:, :0:-1], dims=range(1, n))
    return attracting, repelling


# ---------------------------------------------------------------------------
# representations


@dataclass
class SurfaceGroupRep:
    """Generator-to-matrix assignment for a surface group, with det = 1 images."""

    presentation: SurfaceGroupPresentation
    n: int
    images: dict  # generator index (1-based) -> n x n matrix
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        self.images = {
            int(k): np.asarray(v, dtype=float) for k, v in self.images.items()
        }
        if sorted(self.images) != list(range(1, self.presentation.num_generators + 1)):
            raise ValueError("images must cover exactly the presentation generators")
        for k, m in self.images.items():
            if m.shape != (self.n, self.n):
                raise ValueError(f"generator {k} image has shape {m.shape}")
            if abs(np.linalg.det(m) - 1.0) > 1e-6:
                raise ValueError(f"generator {k} image does not have det 1")
        self._cache = {1 * k: m for k, m in self.images.items()}
        self._cache.update({-k: np.linalg.inv(m) for k, m in self.images.items()})
        rel = self.matrix(self.presentation.relator())
        dist = min(
            np.linalg.norm(rel - np.eye(self.n)),
            np.linalg.norm(rel + np.eye(self.n)),
        )
        if dist > self.tol.relator:
            raise ValueError(f"relator image is {dist:.3e} from +-identity")

    def matrix(self, word) -> np.ndarray:
        """Image of a word (GroupWord or letter sequence)."""
        if isinstance(word, GroupWord):
            word = word.letters
        out = np.eye(self.n)
        for x in word:
            out = out @ self._cache[x]
        return out

    def check_loxodromy(self, max_len: int, gap: float = None) -> None:
        """Gate: every nontrivial word image in the ball must be loxodromic."""
        from .words import enumerate_conjugacy_classes

        gap = self.tol.loxodromy_gap if gap is None else gap
        for w in enumerate_conjugacy_classes(self.presentation, max_len):
            try:
                loxodromic_eigensystem(self.matrix(w), gap)
            except NotLoxodromic as exc:
                raise NotLoxodromic(
                    f"word {self.presentation.format_word(w)}: {exc}"
                ) from exc

    def to_dict(self) -> dict:
        return {
            "genus": self.presentation.genus,
            "n": self.n,
            "images": {
                str(k): [list(map(float, row)) for row in m]
                for k, m in sorted(self.images.items())
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SurfaceGroupRep":
        return cls(
            SurfaceGroupPresentation(int(data["genus"])),
            int(data["n"]),
            {int(k): np.asarray(v, dtype=float) for k, v in data["images"].items()},
        )


# ---------------------------------------------------------------------------
# the regular-octagon Fuchsian representation


def _disk_pair_normalizer(p: complex, q: complex) -> np.ndarray:
    """SU(1,1)-type matrix sending p to 0 and q onto the positive real axis."""
    t = np.array([[1.0, -p], [-np.conj(p), 1.0]], dtype=complex)
    t /= math.sqrt(1.0 - abs(p) ** 2)
    tq = (q - p) / (1.0 - np.conj(p) * q)
    phi = np.angle(tq)
    rot = np.array([[np.exp(-1j * phi / 2), 0.0], [0.0, np.exp(1j * phi / 2)]])
    return rot @ t


def _disk_isometry_through(p1, p2, q1, q2) -> np.ndarray:
    """Orientation-preserving disk isometry with p1 -> q1, p2 -> q2."""
    return np.linalg.inv(_disk_pair_normalizer(q1, q2)) @ _disk_pair_normalizer(p1, p2)


_CAYLEY = np.array([[1.0, -1j], [1.0, 1j]])  # z -> (z - i)/(z + i), upper half plane to disk


def _disk_to_real(m: np.ndarray) -> np.ndarray:
    """Conjugate a disk Mobius matrix to SL(2, R) acting on the half plane."""
    g = np.linalg.inv(_CAYLEY) @ m @ _CAYLEY
    g = g / np.sqrt(np.linalg.det(g))
    if abs(g.real).sum() < abs(g.imag).sum():
        g = g * 1j
    if np.abs(g.imag).max() > 1e-10:
        raise ValueError("conjugated matrix is not real")
    g = g.real
    return g / math.copysign(math.sqrt(abs(np.linalg.det(g))), 1.0)


def octagon_vertices() -> np.ndarray:
    """Vertices of the regular octagon with vertex angle pi/4, in the disk model."""
    # right triangle (center, side midpoint, vertex) with angles pi/8, pi/2, pi/8:
    # cosh(center-vertex distance) = cot(pi/8)^2
    cosh_rv = (1.0 + math.sqrt(2.0)) ** 2
    r = math.sqrt((cosh_rv - 1.0) / (cosh_rv + 1.0))  # tanh(rv / 2)
    angles = math.pi / 8.0 + math.pi / 4.0 * np.arange(8)
    return r * np.exp(1j * angles)


def fuchsian_genus2(tol: Tolerances = DEFAULT_TOL) -> SurfaceGroupRep:
    """Discrete faithful SL(2, R) holonomy of the genus-2 surface.

    Side-pairing isometries of the regular octagon with the boundary word
    a1 b1 a1^-1 b1^-1 a2 b2 a2^-1 b2^-1; the relator image is -Id, which
    all downstream uses absorb (PSL2 action or even symmetric powers).
    """
    v = octagon_vertices()
    # side k runs from v[k] to v[k+1]; g_k glues the side two steps ahead
    # back onto side k with reversed orientation
    pairings = []
    for i_pos in (0, 1, 4, 5):
        i_inv = i_pos + 2
        p1, p2 = v[i_inv], v[(i_inv + 1) % 8]
        q1, q2 = v[(i_pos + 1) % 8], v[i_pos]
        pairings.append(_disk_to_real(_disk_isometry_through(p1, p2, q1, q2)))
    g1, g2, g3, g4 = pairings
    # the gluing relation g1 g2 g1' g4' g3 g4 g3' g2' = 1 (primes are inverses)
    # conjugates to the standard commutator relator in these generators:
    images = {
        1: np.linalg.inv(g2),
        2: g1,
        3: np.linalg.inv(g4),
        4: g3,
    }
    return SurfaceGroupRep(SurfaceGroupPresentation(2), 2, images, tol=tol)


# ---------------------------------------------------------------------------
# symmetric powers and deformations


def sym_matrix(a: np.ndarray, m: int) -> np.ndarray:
    """(m-1)-st symmetric power of a 2x2 matrix: action on degree-(m-1) binary forms.

    Basis x^d, x^{d-1} y, ..., y^d with d = m - 1; a diagonal
    diag(l, 1/l) maps to diag(l^d, l^{d-2}, ..., l^-d).
    """
    a = np.asarray(a, dtype=float)
    d = m - 1
    (aa, ab), (ac, ad) = a
    out = np.empty((m, m))
    for k in range(m):
        # image of x^{d-k} y^k under x -> aa x + ac y, y -> ab x + ad y
        p = np.array([1.0])
        for _ in range(d - k):
            p = np.convolve(p, [aa, ac])
        for _ in range(k):
            p = np.convolve(p, [ab, ad])
        out[:, k] = p
    det = np.linalg.det(out)  # equals det(a)^{m(m-1)/2}; 1 for SL2 input
    if det <= 0:
        raise ValueError("symmetric power expects det(a) = 1")
    return out / det ** (1.0 / m)


def sym_power(rep: SurfaceGroupRep, m: int) -> SurfaceGroupRep:
    """Irreducible embedding of an SL2 representation into SL(m, R)."""
    if rep.n != 2:
        raise ValueError("sym_power expects an SL2 representation")
    if m < 2:
        raise ValueError("m must be at least 2")
    images = {k: sym_matrix(v, m) for k, v in rep.images.items()}
    return SurfaceGroupRep(rep.presentation, m, images, tol=rep.tol)


def contragredient(rep: SurfaceGroupRep) -> SurfaceGroupRep:
    """Inverse-transpose on all generators; an involution."""
    images = {k: np.linalg.inv(v).T for k, v in rep.images.items()}
    return SurfaceGroupRep(rep.presentation, rep.n, images, tol=rep.tol)


def bulge_deform(rep: SurfaceGroupRep, s: float) -> SurfaceGroupRep:
    """Bulging deformation of a genus-2 SL3 representation.

    Conjugates a2, b2 by exp(s M) with M traceless and diagonal with
    pattern (1, -2, 1) in the eigenbasis of the separating element
    c = [a1, b1]; M commutes with rep(c), so the relator survives.
    """
    if rep.n != 3 or rep.presentation.genus != 2:
        raise ValueError("bulge_deform expects a genus-2 SL3 representation")
    if s == 0.0:
        return rep
    c = rep.matrix([1, 2, -1, -2])
    try:
        _, vecs = loxodromic_eigensystem(c, rep.tol.loxodromy_gap)
    except NotLoxodromic as exc:
        raise NonLoxodromicCurve(f"separating curve [a1,b1]: {exc}") from exc
    diag = np.diag(np.exp(s * np.array([1.0, -2.0, 1.0])))
    b = vecs @ diag @ np.linalg.inv(vecs)
    b = b / np.linalg.det(b) ** (1.0 / 3.0)
    b_inv = np.linalg.inv(b)
    images = {
        1: rep.images[1],
        2: rep.images[2],
        3: b @ rep.images[3] @ b_inv,
        4: b @ rep.images[4] @ b_inv,
    }
    return SurfaceGroupRep(rep.presentation, 3, images, tol=rep.tol)
