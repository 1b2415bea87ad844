"""Discrete SFT energy of triangulated disks in a completed Liouville manifold.

A disk map is stored by what the energy needs: a triangulated parameter disk,
per-vertex region tags (``"W"`` for the domain, ``"cyl"`` for the cylindrical
end with its coordinate ``r >= 0``), and per-vertex pullbacks ``a ds + b dt``
of ``lambda`` (in ``W``) or ``alpha`` (on the end).  An optional per-vertex
density of the pulled-back symplectic form gives an independent area
quadrature for the Stokes check.

For a profile ``phi`` the form ``lambda_phi`` is ``phi(0) lambda`` on ``W`` and
``phi(r) alpha`` on the end; ``w^* d lambda_phi`` is integrated exactly for the
affine interpolant of its vertex values.
"""

import json
from dataclasses import dataclass

import numpy as np
from scipy.spatial import Delaunay

from .errors import InconsistentRegionTags, InvalidProfile, NotADisk
from .holcurve import sigma_intersection
from .mobius import normalize_vector

DEFAULT_DELTA = 0.1
AREA_BOUND_TOL = 1e-6


@dataclass(frozen=True)
class TestProfile:
    """Piecewise-linear ``phi: ]-delta, oo[ -> [0, 1]``, constant left of 0 and right of the last knot."""

    __test__ = False  # not a pytest class

    knots: np.ndarray
    values: np.ndarray
    delta: float = DEFAULT_DELTA

    def __post_init__(self):
        knots = np.asarray(self.knots, float)
        values = np.asarray(self.values, float)
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "values", values)
        if not self.delta > 0:
            raise InvalidProfile("delta must be positive")
        if knots.ndim != 1 or knots.shape != values.shape or len(knots) == 0:
            raise InvalidProfile("knots and values must be matching 1-d arrays")
        if np.any(np.diff(knots) <= 0):
            raise InvalidProfile("knots must be increasing")
        if knots[0] > 0:
            raise InvalidProfile("the first knot must not exceed 0")
        if np.any(values < 0) or np.any(values > 1):
            raise InvalidProfile("values must lie in [0, 1]")
        if np.any(np.diff(values) < 0):
            raise InvalidProfile("profile must be nondecreasing")
        # nondecreasing, so constant on ]-delta, 0] iff phi(0) equals the left value
        if np.interp(0.0, knots, values) != values[0]:
            raise InvalidProfile("profile must be constant on ]-delta, 0]")

    @classmethod
    def constant(cls, c, delta=DEFAULT_DELTA):
        return cls(np.array([-delta, 0.0]), np.array([c, c], float), delta)

    @classmethod
    def ramp(cls, start, length, delta=DEFAULT_DELTA):
        """0 up to ``start >= 0``, linear to 1 at ``start + length``."""
        if start < 0 or length <= 0:
            raise InvalidProfile("ramps need start >= 0 and positive length")
        if start == 0:
            return cls(np.array([-delta, 0.0, length]), np.array([0.0, 0.0, 1.0]), delta)
        return cls(np.array([-delta, 0.0, start, start + length]), np.array([0.0, 0.0, 0.0, 1.0]), delta)

    def __call__(self, r):
        return np.interp(np.asarray(r, float), self.knots, self.values)


def profile_family(size, r_max=1.0, delta=DEFAULT_DELTA):
    """First ``size`` profiles of a fixed nested sequence.

    The sequence is the constants 1 and 0, then dyadic ramps: at level ``k``
    the length is ``r_max / 2^k`` and the starts run over ``[0, r_max - length]``
    in steps of half a length.
    """
    out = [TestProfile.constant(1.0, delta), TestProfile.constant(0.0, delta)]
    k = 0
    while len(out) < size:
        length = r_max / 2**k
        for j in range(2 ** (k + 1) - 1):
            out.append(TestProfile.ramp(0.5 * j * length, length, delta))
            if len(out) >= size:
                break
        k += 1
    return out[:size]


# ---------------------------------------------------------------------------
# meshes

def _edges(triangles):
    e = np.concatenate([triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]])
    return e


def signed_areas(vertices, triangles):
    p0, p1, p2 = (vertices[triangles[:, i]] for i in range(3))
    d1, d2 = p1 - p0, p2 - p0
    return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])


@dataclass
class DiscretizedDiskMap:
    vertices: np.ndarray
    triangles: np.ndarray
    boundary: np.ndarray
    region_tags: np.ndarray
    r: np.ndarray
    lambda_pullback: np.ndarray
    omega_density: np.ndarray = None

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, float)
        self.triangles = np.asarray(self.triangles, int)
        self.boundary = np.asarray(self.boundary, int)
        self.region_tags = np.asarray(self.region_tags, dtype=object)
        self.r = np.array([np.nan if v is None else v for v in np.asarray(self.r, dtype=object)], float)
        self.lambda_pullback = np.asarray(self.lambda_pullback, float)
        if self.omega_density is not None:
            self.omega_density = np.asarray(self.omega_density, float)
        nv = len(self.vertices)
        if self.vertices.shape != (nv, 2) or self.lambda_pullback.shape != (nv, 2):
            raise NotADisk("vertices and lambda_pullback must have shape (V, 2)")
        if len(self.region_tags) != nv or len(self.r) != nv:
            raise InconsistentRegionTags("one region tag and r-value per vertex are required")
        cyl = self.region_tags == "cyl"
        inside = self.region_tags == "W"
        if not np.all(cyl | inside):
            raise InconsistentRegionTags("region tags must be 'W' or 'cyl'")
        if np.any(~np.isnan(self.r[inside])):
            raise InconsistentRegionTags("vertices in W carry no r-coordinate")
        if np.any(~np.isfinite(self.r[cyl])) or np.any(self.r[cyl] < 0):
            raise InconsistentRegionTags("cylinder vertices need r >= 0")
        check_disk_topology(self.vertices, self.triangles, self.boundary)

    @property
    def mesh_size(self):
        e = _edges(self.triangles)
        return float(np.linalg.norm(self.vertices[e[:, 0]] - self.vertices[e[:, 1]], axis=1).max())

    def reversed(self):
        """Same map with the boundary loop traversed backwards."""
        return DiscretizedDiskMap(
            self.vertices, self.triangles, self.boundary[::-1], self.region_tags, self.r, self.lambda_pullback, self.omega_density
        )

    def to_record(self):
        return {
            "vertices": self.vertices.tolist(),
            "triangles": self.triangles.tolist(),
            "boundary": self.boundary.tolist(),
            "region_tags": list(self.region_tags),
            "r": [None if np.isnan(v) else float(v) for v in self.r],
            "lambda_pullback": self.lambda_pullback.tolist(),
            "omega_density": None if self.omega_density is None else self.omega_density.tolist(),
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_record(), **kwargs)

    @classmethod
    def from_record(cls, rec):
        return cls(
            rec["vertices"],
            rec["triangles"],
            rec["boundary"],
            rec["region_tags"],
            rec.get("r", [None] * len(rec["vertices"])),
            rec["lambda_pullback"],
            rec.get("omega_density"),
        )

    @classmethod
    def from_json(cls, text):
        return cls.from_record(json.loads(text))


def check_disk_topology(vertices, triangles, boundary):
    """Raise :class:`NotADisk` unless the mesh is a positively oriented disk with the given outer loop."""
    if triangles.ndim != 2 or triangles.shape[1] != 3 or len(triangles) == 0:
        raise NotADisk("triangles must have shape (F, 3)")
    if triangles.min() < 0 or triangles.max() >= len(vertices):
        raise NotADisk("triangle indices out of range")
    if np.any(signed_areas(vertices, triangles) <= 0):
        raise NotADisk("triangles must be positively oriented and non-degenerate")
    e = np.sort(_edges(triangles), axis=1)
    uniq, counts = np.unique(e, axis=0, return_counts=True)
    if np.any(counts > 2):
        raise NotADisk("an edge is shared by more than two triangles")
    used = np.unique(triangles)
    chi = len(used) - len(uniq) + len(triangles)
    if chi != 1 or len(used) != len(vertices):
        raise NotADisk(f"Euler characteristic {chi} (expected 1)")
    outer = {tuple(x) for x in uniq[counts == 1]}
    loop = np.asarray(boundary, int)
    if len(loop) < 3 or len(set(loop.tolist())) != len(loop):
        raise NotADisk("boundary must be a simple loop")
    loop_edges = {tuple(sorted((int(a), int(b)))) for a, b in zip(loop, np.roll(loop, -1))}
    if loop_edges != outer:
        raise NotADisk("boundary loop does not match the single boundary component of the mesh")


def disk_mesh(radius=1.0, rings=8, spherical=False):
    """Delaunay triangulation of concentric rings, ``6k`` points on ring ``k``.

    Ring radii are uniform, or with ``spherical`` uniform in the angle of the
    round sphere under ``w = tan(theta / 2)``.
    """
    if spherical:
        radii = np.tan(np.arange(1, rings + 1) / rings * np.arctan(radius))
    else:
        radii = radius * np.arange(1, rings + 1) / rings
    pts = [np.zeros((1, 2))]
    for k in range(1, rings + 1):
        ang = 2 * np.pi * (np.arange(6 * k) + 0.5 * (k % 2)) / (6 * k)
        pts.append(radii[k - 1] * np.column_stack([np.cos(ang), np.sin(ang)]))
    v = np.concatenate(pts)
    tri = Delaunay(v).simplices
    tri = _orient(v, tri)
    boundary = np.arange(len(v) - 6 * rings, len(v))
    return v, tri, boundary


def square_mesh(n=8, bounds=((0.0, 1.0), (0.0, 1.0))):
    (s0, s1), (t0, t1) = bounds
    s, t = np.meshgrid(np.linspace(s0, s1, n + 1), np.linspace(t0, t1, n + 1), indexing="ij")
    v = np.column_stack([s.ravel(), t.ravel()])
    idx = np.arange((n + 1) ** 2).reshape(n + 1, n + 1)
    a, b, c, d = idx[:-1, :-1].ravel(), idx[1:, :-1].ravel(), idx[1:, 1:].ravel(), idx[:-1, 1:].ravel()
    tri = np.concatenate([np.column_stack([a, b, c]), np.column_stack([a, c, d])])
    boundary = np.concatenate([idx[:, 0], idx[-1, 1:], idx[-2::-1, -1], idx[0, -2:0:-1]])
    return v, tri, boundary


def _orient(v, tri):
    tri = tri.copy()
    flip = signed_areas(v, tri) < 0
    tri[flip] = tri[flip][:, [0, 2, 1]]
    return tri


# ---------------------------------------------------------------------------
# integrals

def _loop_integral(vertices, beta, loop):
    a, b = loop, np.roll(loop, -1)
    terms = np.sum(0.5 * (beta[a] + beta[b]) * (vertices[b] - vertices[a]), axis=1)
    # canonical edge order, so a reversed loop gives exactly the negated sum
    order = np.lexsort((np.maximum(a, b), np.minimum(a, b)))
    return float(np.sum(terms[order]))


def _curl_integral(vertices, triangles, beta):
    # sum of triangle boundary integrals = area * curl of the affine interpolant
    total = 0.0
    for i, j in ((0, 1), (1, 2), (2, 0)):
        a, b = triangles[:, i], triangles[:, j]
        total += np.sum(0.5 * (beta[a] + beta[b]) * (vertices[b] - vertices[a]))
    return float(total)


def profiled_pullback(disk, profile):
    weights = np.where(disk.region_tags == "cyl", profile(np.nan_to_num(disk.r, nan=0.0)), profile(0.0))
    return disk.lambda_pullback * weights[:, None]


def omega_phi_integral(disk, profile):
    """``int w^* d lambda_phi`` for the affine interpolant of the vertex data."""
    return _curl_integral(disk.vertices, disk.triangles, profiled_pullback(disk, profile))


def plain_integral(disk):
    """``int w^* d lambda`` for the affine interpolant (the profile ``phi = 1``)."""
    return _curl_integral(disk.vertices, disk.triangles, disk.lambda_pullback)


def sft_energy_estimate(disk, profile_family_size, delta=DEFAULT_DELTA):
    """Largest ``omega_phi`` integral over the first profiles of :func:`profile_family`.

    The ramps cover ``[0, r_max]`` with ``r_max`` the largest cylinder
    coordinate of the disk; the result is a lower bound for the energy.
    """
    if profile_family_size < 2:
        raise ValueError("the profile family needs at least two members")
    cyl = disk.region_tags == "cyl"
    r_max = float(disk.r[cyl].max()) if np.any(cyl) and disk.r[cyl].max() > 0 else 1.0
    return max(omega_phi_integral(disk, phi) for phi in profile_family(profile_family_size, r_max, delta))


def area_integral(disk):
    """``int w^* omega`` from the density when present, else from the primitive."""
    if disk.omega_density is None:
        return plain_integral(disk)
    areas = signed_areas(disk.vertices, disk.triangles)
    return float(np.sum(areas * disk.omega_density[disk.triangles].mean(axis=1)))


def boundary_integral(disk):
    """``oint w^* lambda`` along ``disk.boundary`` by the trapezoid rule."""
    return _loop_integral(disk.vertices, disk.lambda_pullback, disk.boundary)


def stokes_residual(disk):
    """``|int w^* d lambda - oint w^* lambda|`` with independent interior and boundary quadratures."""
    return abs(area_integral(disk) - boundary_integral(disk))


def disk_bound_check(disk, bound=1.0, tol=AREA_BOUND_TOL):
    value = area_integral(disk)
    return {"pass": bool(value <= bound + tol), "value": value}


# ---------------------------------------------------------------------------
# disk builders

def synthetic_disk(a, b, density, mesh):
    """A disk in ``W`` with pullback ``a ds + b dt`` and density ``db/ds - da/dt``."""
    v, tri, boundary = mesh
    s, t = v[:, 0], v[:, 1]
    lam = np.column_stack([a(s, t), b(s, t)])
    n = len(v)
    return DiscretizedDiskMap(v, tri, boundary, ["W"] * n, [None] * n, lam, density(s, t))


def smooth_test_form():
    """A non-polynomial test primitive and its exact exterior derivative."""
    a = lambda s, t: -(t**3) + s * t
    b = lambda s, t: s**3 + np.sin(s * t)
    dens = lambda s, t: 3 * s**2 + t * np.cos(s * t) + 3 * t**2 - s
    return a, b, dens


def flat_disk(radius=1.0, rings=8, scale=1.0):
    """Euclidean disk with primitive ``scale (s dt - t ds) / 2``; area ``scale pi radius^2``."""
    return synthetic_disk(
        lambda s, t: -0.5 * scale * t,
        lambda s, t: 0.5 * scale * s,
        lambda s, t: scale * np.ones_like(s),
        disk_mesh(radius, rings),
    )


def inflated_disk(area=1.5, rings=8):
    return flat_disk(1.0, rings, scale=area / np.pi)


def constant_disk(rings=4):
    v, tri, boundary = disk_mesh(1.0, rings)
    n = len(v)
    return DiscretizedDiskMap(v, tri, boundary, ["W"] * n, [None] * n, np.zeros((n, 2)), np.zeros(n))


def cylinder_disk(r_center=1.5, rings=16):
    """Unit parameter disk on the end: ``r = r_center + s``, ``w^* alpha = dt``.

    ``int w^* d lambda_phi = int phi'(r_center + s) 2 sqrt(1 - s^2) ds``, whose
    supremum over profiles is 2 (a step at ``s = 0``).
    """
    if r_center < 1:
        raise ValueError("r_center must keep the disk inside r >= 0")
    v, tri, boundary = disk_mesh(1.0, rings)
    n = len(v)
    lam = np.column_stack([np.zeros(n), np.ones(n)])
    return DiscretizedDiskMap(v, tri, boundary, ["cyl"] * n, r_center + v[:, 0], lam, np.zeros(n))


def cylinder_strip(r0=0.5, length=1.0, n=8):
    """Square ``[0, length] x [0, 1]`` on the end with ``r = r0 + s`` and ``w^* alpha = dt``."""
    v, tri, boundary = square_mesh(n, ((0.0, length), (0.0, 1.0)))
    m = len(v)
    lam = np.column_stack([np.zeros(m), np.ones(m)])
    return DiscretizedDiskMap(v, tri, boundary, ["cyl"] * m, r0 + v[:, 0], lam, np.zeros(m))


def line_frame_at_sigma(frame, sigma):
    """Orthonormal ``(p, q)`` spanning the line with ``q`` on the hyperplane ``sigma . z = 0``."""
    frame = np.asarray(frame, complex)
    a, b = sigma @ frame[0], sigma @ frame[1]
    q = normalize_vector(b * frame[0] - a * frame[1])
    other = frame[0] if abs(np.vdot(q, frame[0])) < abs(np.vdot(q, frame[1])) else frame[1]
    p = other - np.vdot(q, other) * q
    return normalize_vector(p), q


def line_disk(line, dec, radius=3.0, rings=16, parametrization="area"):
    """The line minus its point on ``Sigma``, clipped to ``|w| <= radius`` in ``Z(w) = p + w q``.

    ``omega`` is the Fubini-Study form normalized to area 1 on lines; off
    ``Sigma`` it has the primitive ``(Im f ds + Re f dt) / 2 pi`` in ``w = s + i t``
    with ``f = conj(Z) . q / |Z|^2``.  The exact area is
    ``radius^2 / (1 + radius^2)``.

    ``parametrization="area"`` uses ``zeta`` with ``w = zeta / sqrt(1 - |zeta|^2)``,
    which makes the area density uniform.  ``"affine"`` uses ``w`` itself on
    rings graded by spherical angle; its rotational asymmetry in the
    triangulation exposes the second-order quadrature error.
    """
    frame = np.asarray(getattr(line, "frame", line), complex)
    sigma_intersection(frame, dec)
    p, q = line_frame_at_sigma(frame, normalize_vector(getattr(dec, "sigma", dec)))
    if parametrization == "area":
        v, tri, boundary = disk_mesh(radius / np.sqrt(1.0 + radius**2), rings)
        rho2 = np.sum(v**2, axis=1)
        c = (1.0 - rho2) ** -0.5
        dc = 0.5 * (1.0 - rho2) ** -1.5
        wv = c[:, None] * v
        # Jacobian of zeta -> w: c I + 2 c' zeta zeta^T
        jac = c[:, None, None] * np.eye(2) + 2 * dc[:, None, None] * v[:, :, None] * v[:, None, :]
    elif parametrization == "affine":
        v, tri, boundary = disk_mesh(radius, rings, spherical=True)
        wv = v
        jac = np.broadcast_to(np.eye(2), (len(v), 2, 2))
    else:
        raise ValueError(f"unknown parametrization {parametrization!r}")
    w = wv[:, 0] + 1j * wv[:, 1]
    z = p[None, :] + w[:, None] * q[None, :]
    zz = np.sum(np.abs(z) ** 2, axis=1)
    f = (np.conj(z) @ q) / zz
    lam_w = np.column_stack([f.imag, f.real]) / (2 * np.pi)
    lam = np.einsum("nij,ni->nj", jac, lam_w)
    gram = np.vdot(p, p).real * np.vdot(q, q).real - abs(np.vdot(p, q)) ** 2
    dens = gram / (np.pi * zz**2) * np.linalg.det(jac)
    n = len(v)
    return DiscretizedDiskMap(v, tri, boundary, ["W"] * n, [None] * n, lam, dens)


def line_disk_area(radius):
    return radius**2 / (1.0 + radius**2)
