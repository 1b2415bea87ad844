"""Smooth projective quadrics, their lines, and the naive count of lines through a point.

A quadric ``Q^n`` in ``CP^{n+1}`` is the zero set of ``z^T B z`` for a complex
symmetric ``(n+2) x (n+2)`` matrix ``B`` of full rank.  Lines are kept as
spanning pairs ``(p, q)`` of isotropic, mutually ``B``-orthogonal vectors.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import special_ortho_group

from .errors import (
    DegenerateSpan,
    DimensionMismatch,
    NonTransverse,
    NotIsotropic,
    NotOnQuadric,
    NotOrthonormal,
    OnHyperplaneAtInfinity,
    PointOnSigma,
    SingularQuadric,
    UnsupportedDimension,
)
from .mobius import ProjectivePoint, normalize_vector

ON_QUADRIC_TOL = 1e-8
TRANSVERSE_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class Quadric:
    B: np.ndarray
    n: int = field(init=False)

    def __post_init__(self):
        b = np.array(self.B, dtype=complex)
        if b.ndim != 2 or b.shape[0] != b.shape[1] or b.shape[0] < 3:
            raise DimensionMismatch(f"B must be square of size >= 3, got {b.shape}")
        b = 0.5 * (b + b.T)
        s = np.linalg.svd(b, compute_uv=False)
        if s[-1] <= 1e-10 * s[0]:
            raise SingularQuadric("B must have maximal rank for a smooth quadric")
        b.setflags(write=False)
        object.__setattr__(self, "B", b)
        object.__setattr__(self, "n", b.shape[0] - 2)

    @classmethod
    def standard(cls, n):
        """``sum_j z_j^2 = 0`` in ``CP^{n+1}``."""
        return cls(np.eye(n + 2))

    @property
    def ambient_size(self):
        return self.n + 2

    def bilinear(self, u, v):
        return np.asarray(u, complex) @ self.B @ np.asarray(v, complex)

    def _vec(self, z):
        z = normalize_vector(np.asarray(z))
        if z.shape[0] != self.ambient_size:
            raise DimensionMismatch(f"expected {self.ambient_size} coordinates, got {z.shape[0]}")
        return z

    def rotated(self, a):
        """The image quadric ``A Q`` for an invertible ``A``."""
        ai = np.linalg.inv(a)
        return Quadric(ai.T @ self.B @ ai)


def contains(quadric, z):
    z = quadric._vec(z)
    return bool(abs(quadric.bilinear(z, z)) < ON_QUADRIC_TOL)


@dataclass(frozen=True, eq=False)
class LineOnQuadric:
    """The line ``[l:m] -> l p + m q`` on ``quadric``; constructed through :func:`make_line`."""

    quadric: Quadric
    p: ProjectivePoint
    q: ProjectivePoint

    @property
    def frame(self):
        return np.array([self.p.coords, self.q.coords])

    def point(self, lam, mu=1.0):
        return ProjectivePoint(lam * self.p.coords + mu * self.q.coords)

    def projector(self):
        return plane_projector(self.frame)

    def residuals(self):
        p, q = self.p.coords, self.q.coords
        b = self.quadric.bilinear
        return abs(b(p, p)), abs(b(p, q)), abs(b(q, q))


LINE_PARAMS = np.array([[1, 0], [0, 1], [1, 1], [1, -2j], [3 + 1j, -1]], dtype=complex)


def make_line(quadric, p, q):
    p, q = quadric._vec(p), quadric._vec(q)
    s = np.linalg.svd(np.array([p, q]), compute_uv=False)
    if s[1] <= 1e-8:
        raise DegenerateSpan("spanning points are proportional")
    b = quadric.bilinear
    res = {"B(p,p)": b(p, p), "B(p,q)": b(p, q), "B(q,q)": b(q, q)}
    bad = {k: abs(v) for k, v in res.items() if abs(v) >= ON_QUADRIC_TOL}
    if bad:
        raise NotIsotropic("pairings do not vanish: " + ", ".join(f"|{k}|={v:.3e}" for k, v in bad.items()))
    line = LineOnQuadric(quadric, ProjectivePoint(p), ProjectivePoint(q))
    for lam, mu in LINE_PARAMS:
        z = normalize_vector(lam * p + mu * q)
        if abs(b(z, z)) >= ON_QUADRIC_TOL:
            raise NotIsotropic("line leaves the quadric at a sample parameter")
    return line


def plane_projector(frame):
    """Hermitian orthogonal projector onto the row span of ``frame``."""
    q, _ = np.linalg.qr(np.asarray(frame, dtype=complex).T)
    return q @ q.conj().T


def plane_distance(frame1, frame2):
    return float(np.linalg.norm(plane_projector(frame1) - plane_projector(frame2)))


# ---------------------------------------------------------------------------
# Q^n as the oriented Grassmannian of 2-planes in R^{n+2}

def plane_to_quadric(x, y):
    """``span(x, y) -> [x + i y]`` for an orthonormal pair of real vectors."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    gram = np.array([[x @ x, x @ y], [y @ x, y @ y]])
    if np.abs(gram - np.eye(2)).max() > 1e-10:
        raise NotOrthonormal(f"Gram matrix deviates from identity by {np.abs(gram - np.eye(2)).max():.3e}")
    return ProjectivePoint(x + 1j * y)


def quadric_to_plane(z):
    """Orthonormal pair ``(x, y)`` with ``[x + i y] = z`` on the standard quadric.

    Any unit representative of ``z`` works: ``sum z^2 = 0`` forces
    ``|Re z| = |Im z|`` and ``Re z . Im z = 0``.
    """
    z = normalize_vector(np.asarray(z))
    if abs(np.sum(z * z)) >= ON_QUADRIC_TOL:
        raise NotOnQuadric("point is not on the standard quadric")
    x, y = z.real, z.imag
    # re-orthonormalize to remove the O(tolerance) defect
    x = x / np.linalg.norm(x)
    y = y - (y @ x) * x
    y = y / np.linalg.norm(y)
    return x, y


def grassmannian_correspondence(direction, *args):
    """Dispatch ``"forward"`` (pair -> point) or ``"inverse"`` (point -> pair)."""
    if direction == "forward":
        return plane_to_quadric(*args)
    if direction == "inverse":
        return quadric_to_plane(*args)
    raise ValueError(f"unknown direction {direction!r}")


def real_plane_projector(x, y):
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    return np.outer(x, x) + np.outer(y, y)


# ---------------------------------------------------------------------------

def tangent_hyperplane(quadric, p):
    """Coefficients of the geometric tangent plane ``{z : B(p, z) = 0}``."""
    v = quadric._vec(p)
    if abs(quadric.bilinear(v, v)) >= ON_QUADRIC_TOL:
        raise NotOnQuadric("tangent plane is only defined at points of the quadric")
    return normalize_vector(quadric.B @ v)


@dataclass(frozen=True, eq=False)
class Decoration:
    """Hyperplane section ``sigma`` of the quadric, a line ``cycle`` inside it, and the class tag."""

    sigma: np.ndarray
    cycle: LineOnQuadric
    class_tag: str = "L"

    def __post_init__(self):
        h = normalize_vector(self.sigma)
        object.__setattr__(self, "sigma", h)
        for v in self.cycle.frame:
            if abs(h @ v) >= ON_QUADRIC_TOL:
                raise PointOnSigma("the cycle must lie inside the hyperplane section")

    def contains(self, z):
        return bool(abs(self.sigma @ normalize_vector(z)) < ON_QUADRIC_TOL)


def standard_decoration(n):
    """``Q_oo = {z_{n+1} = 0}`` with the cycle through ``[1:i:0..]`` and ``[0:0:1:i:0..]``."""
    if n < 3:
        raise UnsupportedDimension("Q_oo contains no lines for n < 3")
    q = Quadric.standard(n)
    e = np.eye(n + 2)
    c1 = e[0] + 1j * e[1]
    c2 = e[2] + 1j * e[3]
    return Decoration(sigma=e[n + 1], cycle=make_line(q, c1, c2))


def rotate_decoration(dec, a):
    """Apply a real orthogonal ``A`` to the hyperplane and the cycle."""
    a = np.asarray(a)
    quadric = dec.cycle.quadric.rotated(a)
    cycle = make_line(quadric, a @ dec.cycle.p.coords, a @ dec.cycle.q.coords)
    return Decoration(sigma=a @ dec.sigma, cycle=cycle, class_tag=dec.class_tag)


def enumerate_lines(quadric, p, dec):
    """All lines on ``quadric`` through ``p`` meeting the cycle of ``dec``.

    A line through ``p`` lies in the tangent plane ``B(p, .) = 0`` and meets the
    hyperplane section in a single point, so it meets the cycle exactly at the
    zeros of the linear form ``[l:m] -> B(p, l c1 + m c2)``.
    """
    if quadric.n < 3:
        raise UnsupportedDimension("enumeration needs lines inside Q_oo, which requires n >= 3")
    v = quadric._vec(p)
    if abs(quadric.bilinear(v, v)) >= ON_QUADRIC_TOL:
        raise NotOnQuadric("base point must lie on the quadric")
    if abs(dec.sigma @ v) < ON_QUADRIC_TOL:
        raise PointOnSigma("base point lies on the hyperplane section")
    c1, c2 = dec.cycle.p.coords, dec.cycle.q.coords
    a1, a2 = quadric.bilinear(v, c1), quadric.bilinear(v, c2)
    if np.hypot(abs(a1), abs(a2)) < TRANSVERSE_TOL:
        raise NonTransverse("the cycle lies in the tangent plane of p; perturb the configuration")
    # the root [l:m] = [a2 : -a1] of l*a1 + m*a2
    q0 = a2 * c1 - a1 * c2
    return [make_line(quadric, v, q0)]


def random_quadric_point(n, rng):
    """Uniform point of the standard quadric via a random orthonormal pair."""
    g = rng.normal(size=(n + 2, 2))
    qmat, _ = np.linalg.qr(g)
    return plane_to_quadric(qmat[:, 0], qmat[:, 1])


def random_rotation(dim, rng):
    return special_ortho_group.rvs(dim, random_state=rng)


def random_configuration(n, rng, max_tries=100):
    """``(Q, p, dec)`` obtained from the standard configuration by a random rotation.

    The base point is the standard affine point ``[1:0:..:0:i]`` rotated along.
    """
    q = Quadric.standard(n)
    dec0 = standard_decoration(n)
    base = np.zeros(n + 2, complex)
    base[0], base[n + 1] = 1.0, 1j
    for _ in range(max_tries):
        a = random_rotation(n + 2, rng)
        dec = rotate_decoration(dec0, a)
        p = ProjectivePoint(a @ base)
        if abs(dec.sigma @ p.coords) > 1e-3:
            return dec.cycle.quadric, p, dec
    raise NonTransverse("no admissible random configuration found")


def random_generic_configuration(n, rng):
    """Rotated decoration with an independent random base point on the quadric."""
    q = Quadric.standard(n)
    a = random_rotation(n + 2, rng)
    dec = rotate_decoration(standard_decoration(n), a)
    while True:
        p = random_quadric_point(n, rng)
        if abs(dec.sigma @ p.coords) > 1e-3:
            return q, p, dec


def affine_chart(quadric, z, chart):
    """Dehomogenize ``z`` in the chart ``z_chart != 0`` and drop that coordinate."""
    v = quadric._vec(z) if quadric is not None else normalize_vector(z)
    if abs(v[chart]) <= 1e-8:
        raise OnHyperplaneAtInfinity(f"coordinate {chart} vanishes")
    w = v / v[chart]
    return np.delete(w, chart)


def rehomogenize(w, chart):
    return ProjectivePoint(np.insert(np.asarray(w, complex), chart, 1.0))
