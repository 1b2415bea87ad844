"""Affine quadrics as cotangent bundles of spheres.

Conventions
-----------
* ``C^{n+1}`` carries ``omega0 = sum dx_j ^ dy_j`` (``z = x + i y``) with primitive
  ``lambda0 = 1/2 sum (x_j dy_j - y_j dx_j)``.
* ``T^*R^{n+1}`` carries ``lambda_can = p . dq`` and ``omega_can = sum dq_j ^ dp_j``,
  so that ``omega_can = -d lambda_can``.  With this sign the smooth map
  ``x + i y -> (x/|x|, |x| y)`` pulls ``omega_can`` back to ``omega0``.
* The cone ``V0 = {sum z_j^2 = 0} \\ {0}`` is the symplectization of the unit
  cotangent bundle through ``(t, q, p) -> e^{t/2} (q - i p)``, which pulls
  ``lambda0`` back to ``e^t lambda_can``.  The slice ``t = log 2``
  (``|z| = 2``) is where multiplication by ``i`` sends the Liouville field to
  the Reeb field; it plays the role of the boundary of the domain.

One-forms and involutions are plain callables on phase-space points
``x = (q, p)`` flattened to ``R^{2m}``: a form returns its covector, an
involution returns ``(image, jacobian)``.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space

from .errors import NotAntiSymplectic, NotUnitCovector, WrongVariant

FD_STEP = 1e-4
SFT_LEVEL = np.log(2.0)


@dataclass(frozen=True)
class AffineQuadricPoint:
    z: np.ndarray
    variant: str = "smooth"

    def __post_init__(self):
        z = np.asarray(self.z, dtype=complex)
        object.__setattr__(self, "z", z)
        if self.variant not in ("smooth", "cone"):
            raise ValueError(f"unknown variant {self.variant!r}")
        target = 1.0 if self.variant == "smooth" else 0.0
        scale = max(1.0, float(np.vdot(z, z).real))
        if abs(np.sum(z * z) - target) > 1e-10 * scale:
            raise ValueError(f"point is not on the {self.variant} affine quadric")
        if self.variant == "cone" and np.linalg.norm(z) == 0:
            raise ValueError("the cone excludes the origin")


@dataclass(frozen=True)
class CotangentState:
    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        p = np.asarray(self.p, dtype=float)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)
        if abs(np.linalg.norm(q) - 1.0) > 1e-10:
            raise ValueError("base point must be a unit vector")
        if abs(q @ p) > 1e-10 * max(1.0, np.linalg.norm(p)):
            raise ValueError("covector must be orthogonal to the base point")

    @property
    def x(self):
        return np.concatenate([self.q, self.p])

    @classmethod
    def from_x(cls, x):
        x = np.asarray(x, dtype=float)
        m = len(x) // 2
        return cls(x[:m], x[m:])


def _smooth_map(z):
    # defined on all of {Re z != 0}; used for finite differences off the quadric
    x, y = z.real, z.imag
    r = np.linalg.norm(x)
    return x / r, r * y


def quadric_to_cotangent(z):
    """``x + i y -> (x/|x|, |x| y)`` from ``sum z^2 = 1`` to ``T^*S^n``."""
    if not isinstance(z, AffineQuadricPoint):
        z = AffineQuadricPoint(z)
    if z.variant != "smooth":
        raise WrongVariant("cone points have no image in T^*S^n under this map")
    q, p = _smooth_map(z.z)
    return CotangentState(q, p)


def cotangent_to_quadric(s):
    """Inverse map: ``|x|^2 = (1 + sqrt(1 + 4|p|^2)) / 2``, ``x = |x| q``, ``y = p / |x|``."""
    pp = s.p @ s.p
    r = np.sqrt(0.5 * (1.0 + np.sqrt(1.0 + 4.0 * pp)))
    return AffineQuadricPoint(r * s.q + 1j * s.p / r)


def random_affine_point(n, rng, spread=1.0):
    y = spread * rng.normal(size=n + 1)
    x = rng.normal(size=n + 1)
    if y @ y > 0:
        x -= (x @ y) / (y @ y) * y
    x *= np.sqrt(1.0 + y @ y) / np.linalg.norm(x)
    return AffineQuadricPoint(x + 1j * y)


def random_cotangent_state(n, rng, spread=1.0):
    q = rng.normal(size=n + 1)
    q /= np.linalg.norm(q)
    p = spread * rng.normal(size=n + 1)
    p -= (p @ q) * q
    return CotangentState(q, p)


def random_tangent_vector(z, rng):
    """Random vector ``v`` with ``sum z_j v_j = 0`` (tangent to the affine quadric)."""
    z = np.asarray(getattr(z, "z", z))
    v = rng.normal(size=z.shape) + 1j * rng.normal(size=z.shape)
    return v - (z @ v) / (z @ np.conj(z)) * np.conj(z)


def omega0(v, w):
    return float(np.sum(v.real * w.imag - v.imag * w.real))


def omega_can(a, b):
    """``sum dq ^ dp`` on tangent vectors ``(dq, dp)`` flattened to ``R^{2m}``."""
    m = len(a) // 2
    return float(a[:m] @ b[m:] - a[m:] @ b[:m])


def pushforward(z, v, h=FD_STEP):
    """Central-difference image of ``v`` under the smooth map at ``z``."""
    z = np.asarray(getattr(z, "z", z))
    qp = np.concatenate(_smooth_map(z + h * v))
    qm = np.concatenate(_smooth_map(z - h * v))
    return (qp - qm) / (2 * h)


def pullback_residual(z, v, w, h=FD_STEP):
    """``|omega0(v, w) - omega_can(DF v, DF w)|`` and the scale used to judge it."""
    lhs = omega0(v, w)
    rhs = omega_can(pushforward(z, v, h), pushforward(z, w, h))
    zz = np.asarray(getattr(z, "z", z))
    scale = np.linalg.norm(v) * np.linalg.norm(w) * max(1.0, float(np.vdot(zz, zz).real))
    return abs(lhs - rhs), scale


# ---------------------------------------------------------------------------
# involutions

def signed_conjugation(r, z):
    """``z -> R conj(z)`` on ``C^{n+1}``."""
    z = getattr(z, "z", z)
    return AffineQuadricPoint(np.asarray(r) @ np.conj(z))


def induced_involution(r, s):
    """The involution on ``T^*S^n`` matching ``z -> R conj(z)``: ``(q, p) -> (R q, -R p)``."""
    r = np.asarray(r, dtype=float)
    if np.abs(r @ r.T - np.eye(len(r))).max() > 1e-12:
        raise ValueError("R must be real orthogonal")
    return CotangentState(r @ s.q, -(r @ s.p))


def induced_differential(r):
    r = np.asarray(r, dtype=float)
    zero = np.zeros_like(r)
    return np.block([[r, zero], [zero, -r]])


def canonical_pairing(m):
    """Matrix ``J`` of ``omega_can`` on ``R^{2m}``: ``omega_can(a, b) = a^T J b``."""
    eye, zero = np.eye(m), np.zeros((m, m))
    return np.block([[zero, eye], [-eye, zero]])


def phase_involution(r):
    """``(q, p) -> (R q, -R p)`` as an ``(image, jacobian)`` evaluator on ``R^{2m}``."""
    d = induced_differential(r)
    return lambda x: (d @ np.asarray(x, float), d)


def canonical_primitive(x):
    """``lambda_can = p . dq`` as a covector on ``R^{2m}``."""
    x = np.asarray(x, float)
    m = len(x) // 2
    return np.concatenate([x[m:], np.zeros(m)])


def exterior_derivative(form, x, h=FD_STEP):
    """Antisymmetric matrix ``d(form)_{ij} = d_i form_j - d_j form_i`` by central differences."""
    x = np.asarray(x, float)
    grad = np.empty((len(x), len(x)))
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = h
        grad[i] = (np.asarray(form(x + e)) - np.asarray(form(x - e))) / (2 * h)
    return grad - grad.T


def pullback_covector(form, rho, x):
    y, d = rho(x)
    return d.T @ np.asarray(form(y))


def anti_average_primitive(form, rho, sample_points, h=FD_STEP, tol=1e-4):
    """``1/2 (lambda - rho^* lambda)``, an exactly anti-invariant primitive of ``d lambda``.

    ``rho^* d lambda = -d lambda`` is checked at ``sample_points`` first.
    """
    for x in sample_points:
        x = np.asarray(x, float)
        y, d = rho(x)
        dl = exterior_derivative(form, x, h)
        pulled = d.T @ exterior_derivative(form, y, h) @ d
        resid = np.abs(pulled + dl).max()
        if resid > tol * max(1.0, np.abs(dl).max()):
            raise NotAntiSymplectic(f"rho^* d lambda + d lambda = {resid:.3e} at a sample point")

    def averaged(x):
        return 0.5 * (np.asarray(form(x)) - pullback_covector(form, rho, x))

    return averaged


# ---------------------------------------------------------------------------
# Reeb and Liouville data on the unit cotangent bundle and its cone

def cone_map(t, s):
    """``(t, q, p) -> e^{t/2} (q - i p)`` from the symplectization onto ``V0``."""
    return np.exp(0.5 * t) * (s.q - 1j * s.p)


def cone_map_inverse(z):
    z = np.asarray(getattr(z, "z", z))
    x, y = z.real, z.imag
    r = np.linalg.norm(x)
    return 2.0 * np.log(r), CotangentState(x / r, -y / r)


def cone_differential(t, s, dt, dq, dp):
    return np.exp(0.5 * t) * (0.5 * dt * (s.q - 1j * s.p) + dq - 1j * dp)


def cone_differential_inverse(t, s, w):
    u = np.exp(-0.5 * t) * np.asarray(w)
    dt = 2.0 * float(u.real @ s.q)
    dq = u.real - 0.5 * dt * s.q
    dp = -u.imag - 0.5 * dt * s.p
    return dt, dq, dp


def random_cone_point(n, rng):
    x = rng.normal(size=n + 1)
    y = rng.normal(size=n + 1)
    y -= (y @ x) / (x @ x) * x
    y *= np.linalg.norm(x) / np.linalg.norm(y)
    return AffineQuadricPoint(x + 1j * y, variant="cone")


def geodesic_flow(s, time):
    c, si = np.cos(time), np.sin(time)
    return CotangentState(c * s.q + si * s.p, -si * s.q + c * s.p)


@dataclass(frozen=True)
class ContactData:
    point: CotangentState
    reeb: np.ndarray
    liouville: np.ndarray
    contact_basis: np.ndarray
    cone_point: np.ndarray
    cone_liouville: np.ndarray
    cone_reeb: np.ndarray

    def J(self, w):
        """The complex structure of ``V0`` acting on an ambient tangent vector."""
        return 1j * np.asarray(w)

    def complex_structure(self, dt, dq, dp, t=SFT_LEVEL):
        """``i`` transported to ``R x ST^*S^n`` through the cone map."""
        w = cone_differential(t, self.point, dt, dq, dp)
        return cone_differential_inverse(t, self.point, 1j * w)

    def sft_residuals(self):
        jx = self.J(self.cone_liouville)
        jr = self.J(self.cone_reeb)
        return float(np.linalg.norm(jx - self.cone_reeb)), float(np.linalg.norm(jr + self.cone_liouville))

    def reeb_residuals(self, h=FD_STEP):
        """``alpha(R) - 1`` and ``sup |d alpha(R, v)|`` over the tangent basis."""
        x = self.point.x
        a = canonical_primitive(x)
        dalpha = exterior_derivative(canonical_primitive, x, h)
        tangent = unit_cotangent_tangent_basis(self.point)
        return abs(a @ self.reeb - 1.0), float(np.abs(self.reeb @ dalpha @ tangent).max())


def unit_cotangent_tangent_basis(s):
    q, p = s.q, s.p
    m = len(q)
    zero = np.zeros(m)
    cons = np.array([np.concatenate([q, zero]), np.concatenate([zero, p]), np.concatenate([p, q])])
    return null_space(cons)


def contact_hyperplane_basis(s):
    q, p = s.q, s.p
    zero = np.zeros(len(q))
    cons = np.array(
        [np.concatenate([q, zero]), np.concatenate([zero, p]), np.concatenate([p, q]), np.concatenate([p, zero])]
    )
    return null_space(cons)


def reeb_liouville_fields(s, t=SFT_LEVEL, h=FD_STEP):
    """Reeb, Liouville and contact data at a unit covector, plus their images on the cone.

    The cone fields are transported by central differences through
    :func:`cone_map` at the slice ``t``: the Liouville field is the image of
    ``d/dt`` and the Reeb field the image of the Reeb field of the slice form
    ``e^{t} lambda_can``, i.e. ``e^{-t}`` times the geodesic field.
    """
    if abs(np.linalg.norm(s.p) - 1.0) > 1e-10:
        raise NotUnitCovector(f"|p| = {np.linalg.norm(s.p):.12g}")
    reeb = np.concatenate([s.p, -s.q])
    liouville = np.concatenate([np.zeros_like(s.p), s.p])
    z = cone_map(t, s)
    x_cone = (cone_map(t + h, s) - cone_map(t - h, s)) / (2 * h)
    speed = np.exp(-t)
    r_cone = (cone_map(t, geodesic_flow(s, speed * h)) - cone_map(t, geodesic_flow(s, -speed * h))) / (2 * h)
    return ContactData(
        point=s,
        reeb=reeb,
        liouville=liouville,
        contact_basis=contact_hyperplane_basis(s),
        cone_point=z,
        cone_liouville=x_cone,
        cone_reeb=r_cone,
    )


def sft_residuals_at(z, h=FD_STEP):
    """``(|iX - R|, |iR + X|)`` at a cone point, with fields transported from its ray."""
    t, s = cone_map_inverse(z)
    # Liouville flow moves along the ray; the field at z is the t-derivative there.
    x_cone = (cone_map(t + h, s) - cone_map(t - h, s)) / (2 * h)
    # translation-invariant Reeb field of the boundary slice, evaluated at level t
    speed = np.exp(-SFT_LEVEL)
    r_cone = (cone_map(t, geodesic_flow(s, speed * h)) - cone_map(t, geodesic_flow(s, -speed * h))) / (2 * h)
    return float(np.linalg.norm(1j * x_cone - r_cone)), float(np.linalg.norm(1j * r_cone + x_cone))


def liouville_field_cone(z):
    """Liouville field of ``lambda0``: ``iota_X omega0 = lambda0`` gives ``X = z / 2``."""
    return 0.5 * np.asarray(getattr(z, "z", z))
