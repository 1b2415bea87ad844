import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from realsft.cotangent import (
    SFT_LEVEL,
    AffineQuadricPoint,
    CotangentState,
    anti_average_primitive,
    canonical_pairing,
    canonical_primitive,
    cone_map,
    cone_map_inverse,
    contact_hyperplane_basis,
    cotangent_to_quadric,
    exterior_derivative,
    induced_differential,
    induced_involution,
    phase_involution,
    pullback_covector,
    pullback_residual,
    quadric_to_cotangent,
    random_affine_point,
    random_cone_point,
    random_cotangent_state,
    random_tangent_vector,
    reeb_liouville_fields,
    sft_residuals_at,
    signed_conjugation,
)
from realsft.errors import NotAntiSymplectic, NotUnitCovector, WrongVariant

R2 = np.sqrt(2.0)
FLIP = np.diag([1.0, 1.0, -1.0])


def test_map_examples():
    s = quadric_to_cotangent(AffineQuadricPoint([1, 0, 0, 0]))
    assert np.allclose(s.q, [1, 0, 0, 0]) and np.allclose(s.p, 0)
    s = quadric_to_cotangent(AffineQuadricPoint([R2, 1j, 0]))
    assert np.allclose(s.q, [1, 0, 0], atol=1e-15) and np.allclose(s.p, [0, R2, 0], atol=1e-15)
    z = cotangent_to_quadric(CotangentState([1, 0, 0], [0, R2, 0]))
    assert np.allclose(z.z, [R2, 1j, 0], atol=1e-15)
    assert np.allclose(cotangent_to_quadric(CotangentState([1, 0, 0, 0], np.zeros(4))).z, [1, 0, 0, 0])


def test_cone_point_is_wrong_variant():
    with pytest.raises(WrongVariant):
        quadric_to_cotangent(AffineQuadricPoint([1, 1j, 0], variant="cone"))


def test_invalid_points():
    with pytest.raises(ValueError):
        AffineQuadricPoint([1, 1, 0])
    with pytest.raises(ValueError):
        AffineQuadricPoint([0, 0, 0], variant="cone")
    with pytest.raises(ValueError):
        CotangentState([1, 0, 0], [1, 0, 0])


@pytest.mark.parametrize("n", [1, 2, 4])
def test_round_trips(rng, n):
    for _ in range(100):
        z = random_affine_point(n, rng, spread=3.0)
        back = cotangent_to_quadric(quadric_to_cotangent(z))
        assert np.abs(back.z - z.z).max() < 1e-12 * max(1.0, np.abs(z.z).max())
        s = random_cotangent_state(n, rng, spread=3.0)
        again = quadric_to_cotangent(cotangent_to_quadric(s))
        assert np.abs(again.q - s.q).max() < 1e-12
        assert np.abs(again.p - s.p).max() < 1e-12 * max(1.0, np.abs(s.p).max())


def test_pullback_of_canonical_form(rng):
    for _ in range(100):
        z = random_affine_point(2, rng)
        v, w = random_tangent_vector(z, rng), random_tangent_vector(z, rng)
        resid, scale = pullback_residual(z, v, w)
        assert resid < 1e-6 * scale


def test_pullback_fails_for_a_wrong_map(rng):
    # the unscaled projection is not symplectic; the residual detects it
    z = random_affine_point(2, rng, spread=2.0)
    v, w = random_tangent_vector(z, rng), random_tangent_vector(z, rng)
    from realsft.cotangent import omega0, omega_can

    def naive(u):
        return np.concatenate([u.real / np.linalg.norm(u.real), u.imag])

    h = 1e-4
    dv = (naive(z.z + h * v) - naive(z.z - h * v)) / (2 * h)
    dw = (naive(z.z + h * w) - naive(z.z - h * w)) / (2 * h)
    assert abs(omega0(v, w) - omega_can(dv, dw)) > 1e-3


def test_induced_examples(rng):
    s = random_cotangent_state(2, rng)
    t = induced_involution(np.eye(3), s)
    assert np.array_equal(t.q, s.q) and np.array_equal(t.p, -s.p)
    t = induced_involution(FLIP, s)
    assert np.array_equal(t.q, s.q * [1, 1, -1]) and np.array_equal(t.p, s.p * [-1, -1, 1])
    twice = induced_involution(FLIP, t)
    assert np.array_equal(twice.q, s.q) and np.array_equal(twice.p, s.p)


def test_conjugation_diagram(rng):
    perms = [np.eye(3), FLIP, np.array([[0.0, 1, 0], [1, 0, 0], [0, 0, -1]])]
    for k in range(100):
        r = perms[k % 3]
        z = random_affine_point(2, rng, spread=2.0)
        lhs = induced_involution(r, quadric_to_cotangent(z))
        rhs = quadric_to_cotangent(signed_conjugation(r, z))
        assert np.abs(lhs.x - rhs.x).max() < 1e-12


def test_induced_differential_is_anti_symplectic():
    j = canonical_pairing(3)
    for r in (np.eye(3), FLIP, np.array([[0.0, 0, 1], [0, -1, 0], [1, 0, 0]])):
        d = induced_differential(r)
        assert np.abs(d.T @ j @ d + j).max() == 0.0


def _sympy_oracle_form(f_expr, syms):
    m = len(syms) // 2
    flipped = f_expr.subs({syms[m + k]: -syms[m + k] for k in range(m)}, simultaneous=True)
    g = sp.Rational(1, 2) * (f_expr - flipped)
    grad = sp.lambdify([syms], [sp.diff(g, v) for v in syms], "numpy")
    return lambda x: canonical_primitive(x) + np.asarray(grad(x), float)


def test_anti_average_against_symbolic_oracle(rng):
    syms = sp.symbols("q0 q1 q2 p0 p1 p2")
    q0, q1, q2, p0, p1, p2 = syms
    f = sp.sin(q0 * p1) + q2 * p0**3 + sp.exp(q1) * p2 + p0 * p1 * p2
    fgrad = sp.lambdify([syms], [sp.diff(f, v) for v in syms], "numpy")

    def form(x):
        return canonical_primitive(x) + np.asarray(fgrad(x), float)

    rho = phase_involution(np.eye(3))
    pts = [rng.normal(size=6) for _ in range(5)]
    avg = anti_average_primitive(form, rho, pts)
    oracle = _sympy_oracle_form(f, syms)
    for _ in range(20):
        x = rng.normal(size=6)
        assert np.abs(avg(x) - oracle(x)).max() < 1e-12
        assert np.abs(pullback_covector(avg, rho, x) + avg(x)).max() < 1e-10
        assert np.abs(exterior_derivative(avg, x) - exterior_derivative(form, x)).max() < 1e-6


def test_anti_average_fixes_canonical_form(rng):
    rho = phase_involution(FLIP)
    avg = anti_average_primitive(canonical_primitive, rho, [rng.normal(size=6)])
    for _ in range(10):
        x = rng.normal(size=6)
        assert np.abs(avg(x) - canonical_primitive(x)).max() < 1e-15


def test_anti_average_invariant_exact_term_drops(rng):
    q0, q1, q2, p0, p1, p2 = syms = sp.symbols("q0 q1 q2 p0 p1 p2")
    f = sp.cos(q0) * p1**2 + q2 * p0 * p2
    fgrad = sp.lambdify([syms], [sp.diff(f, v) for v in syms], "numpy")
    rho = phase_involution(np.eye(3))
    avg = anti_average_primitive(lambda x: canonical_primitive(x) + np.asarray(fgrad(x), float), rho, [])
    x = rng.normal(size=6)
    assert np.abs(avg(x) - canonical_primitive(x)).max() < 1e-12


def test_identity_is_not_anti_symplectic(rng):
    ident = lambda x: (np.asarray(x, float), np.eye(len(x)))
    with pytest.raises(NotAntiSymplectic):
        anti_average_primitive(canonical_primitive, ident, [rng.normal(size=6)])


def test_reeb_examples():
    data = reeb_liouville_fields(CotangentState([1, 0, 0], [0, 0, 1]))
    assert np.array_equal(data.reeb, [0, 0, 1, -1, 0, 0])
    assert canonical_primitive(data.point.x) @ data.reeb == 1.0
    a1, da = data.reeb_residuals()
    assert a1 < 1e-12 and da < 1e-8
    with pytest.raises(NotUnitCovector):
        reeb_liouville_fields(CotangentState([1, 0, 0], [0, 0, 2]))


def test_reeb_residuals_random(rng):
    for _ in range(20):
        s = random_cotangent_state(2, rng)
        s = CotangentState(s.q, s.p / np.linalg.norm(s.p))
        a1, da = reeb_liouville_fields(s).reeb_residuals()
        assert a1 < 1e-12 and da < 1e-8


def test_sft_likeness(rng):
    for _ in range(20):
        r1, r2 = sft_residuals_at(random_cone_point(2, rng))
        assert r1 < 1e-6 and r2 < 1e-6
        s = random_cotangent_state(3, rng)
        s = CotangentState(s.q, s.p / np.linalg.norm(s.p))
        r1, r2 = reeb_liouville_fields(s).sft_residuals()
        assert r1 < 1e-6 and r2 < 1e-6


def test_complex_structure_preserves_contact_hyperplane(rng):
    for _ in range(10):
        s = random_cotangent_state(2, rng)
        s = CotangentState(s.q, s.p / np.linalg.norm(s.p))
        data = reeb_liouville_fields(s)
        basis = data.contact_basis
        assert basis.shape[1] == 2
        for v in basis.T:
            dt, dq, dp = data.complex_structure(0.0, v[:3], v[3:])
            image = np.concatenate([dq, dp])
            assert abs(dt) < 1e-12
            # inside xi: tangent to the slice, killed by alpha, orthogonal to R
            assert np.abs(basis @ (basis.T @ image) - image).max() < 1e-12
        assert np.abs(contact_hyperplane_basis(s).T @ data.reeb).max() < 1e-12


def test_cone_map_round_trip(rng):
    for _ in range(20):
        z = random_cone_point(3, rng)
        t, s = cone_map_inverse(z)
        assert np.abs(cone_map(t, s) - z.z).max() < 1e-12
        assert abs(np.linalg.norm(s.p) - 1) < 1e-12
    s = CotangentState([1, 0, 0], [0, 1, 0])
    assert abs(np.linalg.norm(cone_map(SFT_LEVEL, s)) - 2.0) < 1e-15


def test_fixed_locus_on_unit_cotangent_sphere(rng):
    # {q3 = 0, p1 = p2 = 0}: equator base points with vertical covector
    for _ in range(10):
        a = rng.uniform(0, 2 * np.pi)
        s = CotangentState([np.cos(a), np.sin(a), 0.0], [0.0, 0.0, rng.choice([-1.0, 1.0])])
        t = induced_involution(FLIP, s)
        assert np.array_equal(t.x, s.x)
    s = random_cotangent_state(2, rng)
    assert not np.allclose(induced_involution(FLIP, s).x, s.x)


@settings(max_examples=50, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.1, 3), st.floats(-3, 3))
def test_round_trip_property(a, b, c, d):
    q = np.array([a, b, c]) / np.linalg.norm([a, b, c])
    p = np.array([d, -d, 0.5])
    p = p - (p @ q) * q
    s = CotangentState(q, p)
    back = quadric_to_cotangent(cotangent_to_quadric(s))
    assert np.abs(back.x - s.x).max() < 1e-12 * max(1.0, np.abs(p).max())
