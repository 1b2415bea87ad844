"""Arithmetic on the projective line, Moebius maps and anti-holomorphic involutions.

Points of CP^k are stored as unit vectors with the phase fixed by the first
nonzero entry.  Moebius maps are SL(2, C) lifts with a deterministic sign.
An anti-holomorphic involution is stored through its holomorphic part
``phi``; the involution itself is ``z -> phi(conj(z))``.
"""

import enum
from dataclasses import dataclass

import numpy as np

from .errors import MalformedInvolution, NotInvolutionPair, OffHyperboloid, TypeIIInput

CLASSIFY_TOL = 1e-8
SQUARE_ERROR_TOL = 1e-8
_PHASE_TOL = 1e-10


def normalize_vector(v):
    """Unit-norm representative of ``[v]`` with first nonzero entry real-positive."""
    v = np.asarray(v, dtype=complex).ravel()
    n = np.linalg.norm(v)
    if n == 0.0 or not np.isfinite(n):
        raise ValueError("projective point needs a nonzero finite vector")
    v = v / n
    lead = np.flatnonzero(np.abs(v) > _PHASE_TOL)[0]
    return v * (abs(v[lead]) / v[lead])


def projective_distance(u, v):
    """Chordal distance ``sin(angle)`` between the lines spanned by ``u`` and ``v``.

    Computed as the norm of the part of ``v`` orthogonal to ``u`` so that small
    distances keep full relative precision.
    """
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    u = u / np.linalg.norm(u, axis=-1, keepdims=True)
    v = v / np.linalg.norm(v, axis=-1, keepdims=True)
    overlap = np.sum(np.conj(u) * v, axis=-1, keepdims=True)
    return np.linalg.norm(v - overlap * u, axis=-1)


class ProjectivePoint:
    """A point of complex projective space in homogeneous coordinates."""

    __slots__ = ("coords",)

    def __init__(self, *coords):
        if len(coords) == 1:
            coords = coords[0]
        self.coords = normalize_vector(coords)
        self.coords.setflags(write=False)

    def __len__(self):
        return len(self.coords)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coords, dtype=dtype)

    def __eq__(self, other):
        if not isinstance(other, ProjectivePoint):
            return NotImplemented
        if len(self) != len(other):
            return False
        return bool(projective_distance(self.coords, other.coords) < 1e-10)

    __hash__ = None

    def distance(self, other):
        return float(projective_distance(self.coords, np.asarray(other)))

    def conj(self):
        return ProjectivePoint(np.conj(self.coords))

    def __repr__(self):
        body = ":".join(_fmt_complex(c) for c in self.coords)
        return f"ProjectivePoint([{body}])"


def _fmt_complex(c):
    if abs(c.imag) < 1e-14:
        return f"{c.real:.6g}"
    return f"{c.real:.6g}{c.imag:+.6g}i"


def _lift_normalize(m):
    m = np.asarray(m, dtype=complex).reshape(2, 2)
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if abs(det) < 1e-300:
        raise ValueError("Moebius matrix must be invertible")
    m = m / np.sqrt(det)
    flat = m.ravel()
    lead = flat[np.flatnonzero(np.abs(flat) > 1e-12 * np.abs(flat).max())[0]]
    if abs(lead.real) > 1e-12 * abs(lead):
        sign = np.sign(lead.real)
    else:
        sign = np.sign(lead.imag)
    return m * sign


class MobiusMap:
    """An element of PSL(2, C), stored as its normalized SL(2, C) lift."""

    __slots__ = ("matrix",)

    def __init__(self, matrix):
        self.matrix = _lift_normalize(matrix)
        self.matrix.setflags(write=False)

    @classmethod
    def identity(cls):
        return cls(np.eye(2))

    @property
    def det_residual(self):
        return abs(np.linalg.det(self.matrix) - 1.0)

    def apply_vector(self, v):
        """Apply to raw homogeneous vectors, shape ``(..., 2)``; no rescaling."""
        return np.asarray(v, dtype=complex) @ self.matrix.T

    def __call__(self, p):
        return ProjectivePoint(self.apply_vector(np.asarray(p)))

    def inverse(self):
        a, b, c, d = self.matrix.ravel()
        return MobiusMap([[d, -b], [-c, a]])

    def conjugate(self):
        """``rho0 o self o rho0``, again holomorphic of degree one."""
        return MobiusMap(np.conj(self.matrix))

    def __matmul__(self, other):
        return compose(self, other)

    def __eq__(self, other):
        if not isinstance(other, MobiusMap):
            return NotImplemented
        return psl2_distance(self, other) < 1e-10 * max(1.0, np.abs(self.matrix).max())

    __hash__ = None

    def __repr__(self):
        return f"MobiusMap({np.array2string(self.matrix, precision=6)})"


def psl2_distance(m1, m2):
    """Frobenius distance between lifts, minimized over the sign ambiguity."""
    a = np.asarray(getattr(m1, "matrix", m1))
    b = np.asarray(getattr(m2, "matrix", m2))
    return float(min(np.linalg.norm(a - b), np.linalg.norm(a + b)))


def compose(m1, m2):
    """The map ``m1 o m2``."""
    return MobiusMap(m1.matrix @ m2.matrix)


class InvolutionClass(enum.Enum):
    TYPE_I = "I"
    TYPE_II = "II"


# Panel of points used for residual checks; chosen off any special circle.
SAMPLE_PANEL = np.array(
    [
        [1, 0],
        [0, 1],
        [1, 1],
        [1, -1],
        [1, 1j],
        [1, -1j],
        [1, 2 + 1j],
        [2, -1 + 3j],
    ],
    dtype=complex,
)


class AntiInvolution:
    """The anti-holomorphic map ``z -> phi(conj(z))`` with ``phi = mobius_part``."""

    __slots__ = ("mobius_part", "square_residual")

    def __init__(self, mobius_part):
        if not isinstance(mobius_part, MobiusMap):
            mobius_part = MobiusMap(mobius_part)
        self.mobius_part = mobius_part
        self.square_residual = square_residual(mobius_part)
        if self.square_residual > SQUARE_ERROR_TOL:
            raise MalformedInvolution(
                f"(phi rho0)^2 differs from the identity by {self.square_residual:.3e}"
            )

    @classmethod
    def standard(cls):
        """Complex conjugation ``rho0``."""
        return cls(MobiusMap.identity())

    @classmethod
    def antipodal(cls):
        """The antipodal map ``[z0:z1] -> [conj(z1):-conj(z0)]``."""
        return cls(MobiusMap([[0, 1], [-1, 0]]))

    def apply_vector(self, v):
        return self.mobius_part.apply_vector(np.conj(np.asarray(v, dtype=complex)))

    def __call__(self, p):
        return apply_antiinvolution(self, p)

    def conjugated_by(self, psi):
        """The involution ``psi o self o psi^-1``."""
        return AntiInvolution(psi.matrix @ self.mobius_part.matrix @ np.linalg.inv(np.conj(psi.matrix)))

    @property
    def cls(self):
        return classify_pair(self.mobius_part)

    def __repr__(self):
        return f"AntiInvolution({self.mobius_part!r})"


def square_residual(phi):
    """Sup over the sample panel of the distance between ``(phi rho0)^2 (z)`` and ``z``."""
    m = phi.matrix @ np.conj(phi.matrix)
    return float(projective_distance(SAMPLE_PANEL @ m.T, SAMPLE_PANEL).max())


def apply_antiinvolution(inv, p):
    return ProjectivePoint(inv.apply_vector(np.asarray(p)))


def classify_pair(a):
    """Decide whether ``[A]`` lies in the type I or type II component of the involution space.

    With ``det A = 1`` the condition ``[conj(A)] = [A^-1]`` reads ``A conj(A) = +I``
    (type I) or ``A conj(A) = -I`` (type II).  Both conditions are insensitive
    to the sign of the lift.
    """
    m = a.matrix if isinstance(a, MobiusMap) else _lift_normalize(a)
    prod = m @ np.conj(m)
    eye = np.eye(2)
    r_plus = np.linalg.norm(prod - eye)
    r_minus = np.linalg.norm(prod + eye)
    tol = CLASSIFY_TOL * max(1.0, np.linalg.norm(m) ** 2)
    if min(r_plus, r_minus) > tol:
        raise NotInvolutionPair(
            f"[conj(A)] != [A^-1]: residuals {r_plus:.3e} (+), {r_minus:.3e} (-)"
        )
    return InvolutionClass.TYPE_I if r_plus <= r_minus else InvolutionClass.TYPE_II


class Sheet(enum.Enum):
    PLUS = "plus"
    MINUS = "minus"


def embed_hyperboloid(sheet, x):
    """Lift a hyperboloid point to ``SL(2, C)``.

    ``PLUS`` takes the one-sheeted hyperboloid ``x1^2+x2^2+x3^2-x4^2 = 1`` to
    type I lifts, ``MINUS`` the two-sheeted ``-x1^2-x2^2-x3^2+x4^2 = 1`` to
    type II lifts.
    """
    sheet = Sheet(sheet)
    x1, x2, x3, x4 = np.asarray(x, dtype=float)
    sq = x1 * x1 + x2 * x2 + x3 * x3 - x4 * x4
    target = 1.0 if sheet is Sheet.PLUS else -1.0
    scale = max(1.0, x1 * x1 + x2 * x2 + x3 * x3 + x4 * x4)
    if abs(sq - target) > 1e-10 * scale:
        raise OffHyperboloid(f"quadratic constraint residual {abs(sq - target):.3e}")
    if sheet is Sheet.PLUS:
        m = [[x1 + 1j * x2, 1j * (x3 + x4)], [1j * (x3 - x4), x1 - 1j * x2]]
    else:
        m = [[x1 + 1j * x2, x3 + x4], [x3 - x4, -x1 + 1j * x2]]
    return MobiusMap(m)


def sample_hyperboloid(sheet, rng, size, max_rapidity=1.5):
    """Parametric samples ``(cosh s, sinh s)``-style on either hyperboloid.

    ``s`` is uniform on ``[0, max_rapidity]`` and the spatial direction uniform
    on the sphere; the two-sheeted case picks a sheet at random.
    """
    sheet = Sheet(sheet)
    s = rng.uniform(0.0, max_rapidity, size)
    if sheet is Sheet.PLUS:
        # (x1, x2, x3) = cosh(s) u with u on S^2, x4 = sinh(s) * (+-1)
        u = rng.normal(size=(size, 3))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        sign = rng.choice([-1.0, 1.0], size)
        return np.column_stack([np.cosh(s)[:, None] * u, sign * np.sinh(s)])
    u = rng.normal(size=(size, 3))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    sign = rng.choice([-1.0, 1.0], size)
    return np.column_stack([np.sinh(s)[:, None] * u, sign * np.cosh(s)])


# ---------------------------------------------------------------------------
# Stereographic identification CP^1 = S^2

def to_sphere(z):
    """Hopf map ``[z0:z1] -> S^2``; vectorized over leading axes."""
    z = np.asarray(z, dtype=complex)
    z0, z1 = z[..., 0], z[..., 1]
    w = np.conj(z0) * z1
    n = np.abs(z0) ** 2 + np.abs(z1) ** 2
    return np.stack([2 * w.real / n, 2 * w.imag / n, (np.abs(z1) ** 2 - np.abs(z0) ** 2) / n], axis=-1)


def from_sphere(x):
    """Inverse of :func:`to_sphere`, returning unnormalized homogeneous vectors."""
    x = np.asarray(x, dtype=float)
    x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2]
    south = np.stack([1 - x3 + 0j, x1 + 1j * x2], axis=-1)
    north = np.stack([x1 - 1j * x2, 1 + x3 + 0j], axis=-1)
    use_north = (x3 > 0)[..., None]
    return np.where(use_north, north, south)


def _icosahedron():
    g = (1 + 5 ** 0.5) / 2
    v = []
    for a in (-1, 1):
        for b in (-g, g):
            v += [(0, a, b), (a, b, 0), (b, 0, a)]
    v = np.array(v, dtype=float)
    return v / np.linalg.norm(v, axis=1, keepdims=True)


SEED_GRID = _icosahedron()


@dataclass(frozen=True)
class FixedCircle:
    """A circle on S^2 cut out by the plane ``normal . x = offset``.

    ``anchors`` are the three fixed points used for the fit.
    """

    normal: np.ndarray
    offset: float
    anchors: tuple

    @property
    def center(self):
        return self.offset * self.normal

    @property
    def radius(self):
        return float(np.sqrt(max(0.0, 1.0 - self.offset**2)))

    def sample(self, k=32):
        n = self.normal
        axis = np.eye(3)[np.argmin(np.abs(n))]
        e1 = np.cross(n, axis)
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(n, e1)
        t = np.linspace(0.0, 2 * np.pi, k, endpoint=False)
        pts = self.center + self.radius * (np.cos(t)[:, None] * e1 + np.sin(t)[:, None] * e2)
        return [ProjectivePoint(v) for v in from_sphere(pts)]

    def distance_to(self, p):
        """Distance on R^3 from ``to_sphere(p)`` to the circle."""
        x = to_sphere(np.asarray(p))
        along = x @ self.normal
        planar = x - along * self.normal
        rho = np.linalg.norm(planar)
        return float(np.hypot(along - self.offset, rho - self.radius))


def _fixed_point_newton(m, z, max_iter=60):
    """Damped Gauss-Newton for ``phi(conj z) = z`` in the affine chart where ``|z_k|`` is largest."""
    z = np.asarray(z, dtype=complex)
    swap = abs(z[1]) > abs(z[0])
    if swap:
        p = np.array([[0, 1], [1, 0]])
        m = p @ m @ p
        z = z[::-1]
    a, b, c, d = m.ravel()
    w = z[1] / z[0]

    def resid(w):
        with np.errstate(divide="ignore", invalid="ignore"):
            f = (c + d * np.conj(w)) / (a + b * np.conj(w))
        return f - w

    g = resid(w)
    if not np.isfinite(g):
        # seed sits on the pole of phi; the caller drops non-finite results
        return np.full(2, np.nan, dtype=complex)
    for _ in range(max_iter):
        if abs(g) < 1e-15 * (1 + abs(w)):
            break
        # f is anti-holomorphic: df = kappa dw-bar with kappa = det / (a + b w-bar)^2
        kappa = 1.0 / (a + b * np.conj(w)) ** 2
        jac = np.array([[kappa.real - 1, kappa.imag], [kappa.imag, -kappa.real - 1]])
        step = np.linalg.lstsq(jac, -np.array([g.real, g.imag]), rcond=1e-10)[0]
        t = 1.0
        for _ in range(30):
            w_new = w + t * (step[0] + 1j * step[1])
            g_new = resid(w_new)
            if abs(g_new) < abs(g):
                break
            t *= 0.5
        else:
            break
        w, g = w_new, g_new
    out = np.array([1.0, w], dtype=complex)
    return out[::-1] if swap else out


def find_fixed_points(inv, extra_seeds=()):
    """Fixed points of a type I involution found by Newton from a seed grid.

    The three standard real points ``[1:0], [1:1], [0:1]`` are tried first so
    that ``rho0`` returns them unchanged; the icosahedral grid follows.
    """
    m = inv.mobius_part.matrix
    seeds = [np.array(s, dtype=complex) for s in ([1, 0], [1, 1], [0, 1])]
    seeds += list(from_sphere(SEED_GRID)) + [np.asarray(s, dtype=complex) for s in extra_seeds]
    found = []
    for s in seeds:
        z = _fixed_point_newton(m, s)
        if not np.all(np.isfinite(z)):
            continue
        if projective_distance(inv.apply_vector(z), z) < 1e-12:
            found.append(normalize_vector(z))
    return found


def _spread_triple(points):
    pts = list(points)
    head = pts[:3]
    if len(head) == 3 and min(
        projective_distance(head[i], head[j]) for i in range(3) for j in range(i + 1, 3)
    ) > 1e-2:
        return head
    first = pts[0]
    second = max(pts, key=lambda q: projective_distance(first, q))
    third = max(pts, key=lambda q: min(projective_distance(first, q), projective_distance(second, q)))
    triple = [first, second, third]
    if min(projective_distance(triple[i], triple[j]) for i in range(3) for j in range(i + 1, 3)) < 1e-6:
        raise MalformedInvolution("could not locate three distinct fixed points")
    return triple


def _circle_through(anchors):
    p1, p2, p3 = (to_sphere(a) for a in anchors)
    n = np.cross(p2 - p1, p3 - p1)
    n /= np.linalg.norm(n)
    offset = float(n @ p1)
    if offset < -1e-14 or (abs(offset) <= 1e-14 and n[np.argmax(np.abs(n))] < 0):
        n, offset = -n, -offset
    return FixedCircle(normal=n, offset=offset, anchors=tuple(ProjectivePoint(a) for a in anchors))


def fixed_point_set(inv):
    """Fixed circle of ``inv`` on the Riemann sphere, or ``None`` when it acts freely."""
    if classify_pair(inv.mobius_part) is InvolutionClass.TYPE_II:
        return None
    found = find_fixed_points(inv)
    if len(found) < 3:
        # z + phi(conj z) is an exact fixed vector whenever phi conj(phi) = I.
        m = inv.mobius_part.matrix
        rng = np.random.default_rng(0)
        extra = []
        for v in rng.normal(size=(8, 2)) + 1j * rng.normal(size=(8, 2)):
            extra.append(v + m @ np.conj(v))
        found = find_fixed_points(inv, extra_seeds=extra)
    return _circle_through(_spread_triple(found))


def mobius_from_three_points(src, dst):
    """The unique Moebius map sending ``src[k]`` to ``dst[k]`` for ``k = 0, 1, 2``."""

    def standard(pts):
        # sends [1:0], [1:1], [0:1] to pts[0], pts[1], pts[2]
        z1, z2, z3 = (np.asarray(p, dtype=complex) for p in pts)
        alpha, beta = np.linalg.solve(np.column_stack([z1, z3]), z2)
        return np.column_stack([alpha * z1, beta * z3])

    return MobiusMap(standard(dst) @ np.linalg.inv(standard(src)))


REAL_ANCHORS = (np.array([1, 0], complex), np.array([1, 1], complex), np.array([0, 1], complex))


def conjugator_to_standard(inv):
    """Some ``psi`` with ``inv = psi rho0 psi^-1``.

    ``psi`` sends the real points ``0, 1, oo`` to three fixed points of ``inv``;
    it is determined only up to the stabilizer of the real line.
    """
    if classify_pair(inv.mobius_part) is InvolutionClass.TYPE_II:
        raise TypeIIInput("a fixed-point-free involution is not conjugate to rho0")
    circle = fixed_point_set(inv)
    return mobius_from_three_points(REAL_ANCHORS, [a.coords for a in circle.anchors])


def conjugation_residual(inv, psi, panel=SAMPLE_PANEL):
    """Sup over the panel of the distance between ``inv(z)`` and ``psi rho0 psi^-1 (z)``."""
    other = psi.matrix @ np.linalg.inv(np.conj(psi.matrix))
    lhs = inv.apply_vector(panel)
    rhs = np.conj(panel) @ other.T
    return float(projective_distance(lhs, rhs).max())


def fixed_point_residual(inv, points):
    pts = np.array([np.asarray(p) for p in points])
    return float(projective_distance(inv.apply_vector(pts), pts).max())


def sphere_grid(n_lat=100, n_lon=100):
    """Latitude-longitude grid on S^2 as homogeneous CP^1 vectors, ``n_lat * n_lon`` points."""
    theta = np.arccos(np.linspace(1.0, -1.0, n_lat))
    phi = np.linspace(0.0, 2 * np.pi, n_lon, endpoint=False)
    th, ph = np.meshgrid(theta, phi, indexing="ij")
    pts = np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=-1)
    return from_sphere(pts.reshape(-1, 3))


def min_displacement(inv, grid=None):
    """Minimum over a sphere grid of the distance between ``inv(z)`` and ``z``."""
    grid = sphere_grid() if grid is None else grid
    return float(projective_distance(inv.apply_vector(grid), grid).min())
