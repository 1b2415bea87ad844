"""The involution ``u -> rho o u o rho0`` on parametrized lines of a quadric.

A degree-one map ``CP^1 -> CP^{n+1}`` is a 2 x (n+2) frame ``F`` acting as
``[l:m] -> l F[0] + m F[1]``; frames that differ by a common scalar give the
same map.  Reparametrizing by a Moebius map ``psi`` replaces ``F`` with
``psi^T F``.
"""

import enum
from dataclasses import dataclass

import numpy as np

from .errors import (
    ContainedInSigma,
    DegenerateSpan,
    InvalidInvolution,
    NotIsotropic,
    NotPseudoFixedInput,
    QuadricNotPreserved,
    TypeIIInput,
)
from .mobius import (
    AntiInvolution,
    InvolutionClass,
    MobiusMap,
    classify_pair,
    conjugator_to_standard,
    normalize_vector,
    projective_distance,
    psl2_distance,
)
from .quadric import ON_QUADRIC_TOL, LineOnQuadric, make_line, plane_distance

PLANE_TOL = 1e-8
FIXED_TOL = 1e-8

PARAM_PANEL = np.array(
    [[1, 0], [0, 1], [1, 1], [1, -1], [1, 1j], [1, -1j], [2, 1 + 1j], [1 - 2j, 3]],
    dtype=complex,
)


class RationalLineMap:
    """A degree-one holomorphic map onto a line of ``quadric``."""

    __slots__ = ("quadric", "frame")

    def __init__(self, quadric, frame):
        frame = np.array(frame, dtype=complex)
        if frame.shape != (2, quadric.ambient_size):
            raise DegenerateSpan(f"frame must have shape (2, {quadric.ambient_size})")
        frame = frame / np.linalg.norm(frame)
        s = np.linalg.svd(frame, compute_uv=False)
        if s[1] <= 1e-8 * s[0]:
            raise DegenerateSpan("frame rows are proportional; the map is constant")
        b = quadric.B
        p, q = frame / np.linalg.norm(frame, axis=1, keepdims=True)
        if max(abs(p @ b @ p), abs(p @ b @ q), abs(q @ b @ q)) >= ON_QUADRIC_TOL:
            raise NotIsotropic("frame does not span a line of the quadric")
        self.quadric = quadric
        self.frame = frame

    @classmethod
    def from_line(cls, line):
        return cls(line.quadric, line.frame)

    @property
    def line(self):
        return make_line(self.quadric, self.frame[0], self.frame[1])

    def evaluate(self, params):
        """Homogeneous images of parameters ``[l:m]``, shape ``(k, n+2)``."""
        return np.atleast_2d(np.asarray(params, dtype=complex)) @ self.frame

    def reparametrize(self, psi):
        """The map ``u o psi``."""
        return RationalLineMap(self.quadric, psi.matrix.T @ self.frame)

    def spanning_singular_value(self):
        rows = self.frame / np.linalg.norm(self.frame, axis=1, keepdims=True)
        return float(np.linalg.svd(rows, compute_uv=False)[1])

    def __repr__(self):
        return f"RationalLineMap(n={self.quadric.n}, frame={np.array2string(self.frame, precision=4)})"


class AmbientInvolution:
    """``z -> S conj(z)`` for a signed permutation matrix ``S``.

    ``S`` must square to ``+I`` (a real structure) or ``-I`` (a quaternionic
    structure); both give an involution of projective space.
    """

    __slots__ = ("perm", "signs", "matrix")

    def __init__(self, perm, signs=None):
        perm = np.asarray(perm, dtype=int)
        signs = np.ones(len(perm)) if signs is None else np.asarray(signs, dtype=float)
        if sorted(perm.tolist()) != list(range(len(perm))) or not np.all(perm[perm] == np.arange(len(perm))):
            raise InvalidInvolution("perm must be an involutive permutation")
        if not np.all(np.abs(signs) == 1):
            raise InvalidInvolution("signs must be +1 or -1")
        pair_sign = signs * signs[perm]
        if not (np.all(pair_sign == 1) or np.all(pair_sign == -1)):
            raise InvalidInvolution("signs must square to +I or to -I consistently")
        m = np.zeros((len(perm), len(perm)))
        m[np.arange(len(perm)), perm] = signs
        self.perm, self.signs, self.matrix = perm, signs, m

    @classmethod
    def conjugation(cls, size):
        return cls(np.arange(size))

    @classmethod
    def diagonal(cls, signs):
        return cls(np.arange(len(signs)), signs)

    @property
    def quaternionic(self):
        return bool(self.signs[0] * self.signs[self.perm[0]] < 0)

    def apply_vector(self, v):
        return np.conj(np.asarray(v, dtype=complex)) @ self.matrix.T

    def preserves(self, quadric, tol=1e-12):
        r = self.matrix
        return bool(np.linalg.norm(r.T @ quadric.B @ r - np.conj(quadric.B)) <= tol * np.linalg.norm(quadric.B))

    def preserves_hyperplane(self, h, tol=1e-12):
        """Whether ``{h . z = 0}`` is mapped to itself."""
        h = normalize_vector(h)
        return bool(projective_distance(np.conj(self.matrix.T @ h), h) < tol)

    def __repr__(self):
        return f"AmbientInvolution(perm={self.perm.tolist()}, signs={self.signs.astype(int).tolist()})"


def involute_line(u, rho):
    """``I(u) = rho o u o rho0``; on frames ``F -> conj(F) S^T``."""
    if not rho.preserves(u.quadric):
        raise QuadricNotPreserved("rho does not map the quadric to itself")
    return RationalLineMap(u.quadric, rho.apply_vector(u.frame))


class PseudoFixStatus(enum.Enum):
    FIXED = "fixed"
    PSEUDO_FIXED = "pseudo-fixed"
    NOT_PSEUDO_FIXED = "not-pseudo-fixed"


@dataclass(frozen=True)
class PseudoFixResult:
    status: PseudoFixStatus
    phi: MobiusMap = None
    cls: InvolutionClass = None
    plane_distance: float = 0.0
    residual: float = 0.0


def change_of_parameter(u, v):
    """``phi`` with ``v = u o phi`` when both frames span the same plane.

    Solves ``F_v = phi^T F_u`` in the least-squares sense and reports the sup of
    the pointwise distances on the parameter panel.
    """
    coeffs, *_ = np.linalg.lstsq(u.frame.T, v.frame.T, rcond=None)
    phi = MobiusMap(coeffs)
    return phi, map_distance(u.reparametrize(phi), v)


def map_distance(u, v, panel=PARAM_PANEL):
    """Sup over the parameter panel of the distance between ``u(t)`` and ``v(t)``."""
    return float(projective_distance(u.evaluate(panel), v.evaluate(panel)).max())


def detect_pseudo_fixed(u, rho):
    iu = involute_line(u, rho)
    dist = plane_distance(u.frame, iu.frame)
    if dist > PLANE_TOL:
        return PseudoFixResult(PseudoFixStatus.NOT_PSEUDO_FIXED, plane_distance=dist)
    phi, resid = change_of_parameter(u, iu)
    cls = classify_pair(phi)
    if psl2_distance(phi, MobiusMap.identity()) < FIXED_TOL:
        return PseudoFixResult(PseudoFixStatus.FIXED, phi, cls, dist, resid)
    return PseudoFixResult(PseudoFixStatus.PSEUDO_FIXED, phi, cls, dist, resid)


def fixed_residual(u, rho):
    """Sup over the parameter panel of the distance between ``I(u)(t)`` and ``u(t)``."""
    return map_distance(involute_line(u, rho), u)


def normalize_to_fixed(u, result, rho):
    """Reparametrize a type I pseudo-fixed line into a genuine fixed point of ``I``."""
    if result.status is PseudoFixStatus.FIXED:
        return u
    if result.status is not PseudoFixStatus.PSEUDO_FIXED:
        raise NotPseudoFixedInput("input is not a pseudo-fixed point")
    if result.cls is InvolutionClass.TYPE_II:
        raise TypeIIInput("type II pseudo-fixed points admit no fixed reparametrization")
    psi = conjugator_to_standard(AntiInvolution(result.phi))
    return u.reparametrize(psi)


def sigma_intersection(u, dec):
    """The parameter ``[l:m]`` where ``u`` meets the hyperplane section of ``dec``.

    ``u`` may be a map or a bare frame; ``dec`` a decoration or a hyperplane
    coefficient vector.
    """
    frame = np.asarray(getattr(u, "frame", u), dtype=complex)
    sigma = normalize_vector(getattr(dec, "sigma", dec))
    a, b = sigma @ frame[0], sigma @ frame[1]
    scale = np.linalg.norm(frame, axis=1)
    if max(abs(a) / scale[0], abs(b) / scale[1]) < ON_QUADRIC_TOL:
        raise ContainedInSigma("the line lies inside the hyperplane section")
    # l a + m b = 0
    return normalize_vector([b, -a])


def count_sigma_intersections(u, dec):
    """Number of parameters mapped into the hyperplane section; always 1 for a line not inside it."""
    sigma_intersection(u, dec)
    return 1


def rho_overlap(u, rho, tol=1e-8):
    """Parameters ``w`` with ``u(w)`` on the image line ``rho(u)``.

    Returns ``None`` if the two planes coincide, otherwise a possibly empty
    list with at most one parameter.
    """
    iu = rho.apply_vector(u.frame)
    m = np.column_stack([u.frame[0], u.frame[1], -iu[0], -iu[1]])
    s, vh = np.linalg.svd(m)[1:]
    null = int(np.sum(s <= tol * s[0])) + max(0, 4 - len(s))
    if null >= 2:
        return None
    if null == 0:
        return []
    coeffs = np.conj(vh[-1])
    return [normalize_vector(coeffs[:2])]


def manufacture_pseudo_fixed(u_fixed, psi):
    """``u_fixed o psi``: a type I pseudo-fixed point with ``phi = psi^-1 conj(psi)``."""
    return u_fixed.reparametrize(psi)


def random_mobius(rng, scale=1.0):
    m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    return MobiusMap(np.eye(2) + scale * m)


def search_invariant_lines(quadric, rho, count, seed, max_starts=None):
    """Seeded random search for lines mapped to themselves by ``rho``.

    Each start is a random unit vector ``v``; Gauss-Newton with min-norm steps
    drives ``B(v, v)`` and ``B(v, rho v)`` to zero while keeping ``|v| = 1``,
    after which ``span(v, rho v)`` is a ``rho``-invariant line.  Returns the
    list of maps together with the seed.
    """
    rng = np.random.default_rng(seed)
    b = quadric.B
    r = rho.matrix
    size = quadric.ambient_size
    max_starts = 20 * count if max_starts is None else max_starts

    def residual(x):
        v = x[:size] + 1j * x[size:]
        f1 = v @ b @ v
        f2 = v @ b @ (r @ np.conj(v))
        return np.array([f1.real, f1.imag, f2.real, f2.imag, np.vdot(v, v).real - 1.0])

    def jacobian(x, h=1e-7):
        cols = []
        for k in range(len(x)):
            e = np.zeros_like(x)
            e[k] = h
            cols.append((residual(x + e) - residual(x - e)) / (2 * h))
        return np.array(cols).T

    found = []
    for _ in range(max_starts):
        if len(found) >= count:
            break
        x = rng.normal(size=2 * size)
        x /= np.linalg.norm(x)
        for _ in range(50):
            g = residual(x)
            if np.linalg.norm(g) < 1e-14:
                break
            x = x - np.linalg.lstsq(jacobian(x), g, rcond=1e-12)[0]
        if np.linalg.norm(residual(x)) > 1e-12:
            continue
        v = x[:size] + 1j * x[size:]
        w = r @ np.conj(v)
        frame = np.array([v, w])
        if np.linalg.svd(frame / np.linalg.norm(frame, axis=1, keepdims=True), compute_uv=False)[1] < 1e-6:
            continue
        try:
            found.append(RationalLineMap(quadric, frame))
        except (NotIsotropic, DegenerateSpan):
            continue
    return found
