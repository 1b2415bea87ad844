import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from realsft.errors import MalformedInvolution, NotInvolutionPair, OffHyperboloid, TypeIIInput
from realsft.mobius import (
    REAL_ANCHORS,
    SAMPLE_PANEL,
    AntiInvolution,
    InvolutionClass,
    MobiusMap,
    ProjectivePoint,
    Sheet,
    apply_antiinvolution,
    classify_pair,
    compose,
    conjugation_residual,
    conjugator_to_standard,
    embed_hyperboloid,
    fixed_point_residual,
    fixed_point_set,
    min_displacement,
    mobius_from_three_points,
    psl2_distance,
    sample_hyperboloid,
    to_sphere,
)


def random_sl2(rng):
    m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    return MobiusMap(m)


def test_projective_point_normalized_and_scale_invariant():
    p = ProjectivePoint(3j, 4j)
    assert np.isclose(np.linalg.norm(p.coords), 1.0)
    assert p.coords[0].real > 0 and abs(p.coords[0].imag) < 1e-15
    assert p == ProjectivePoint(3.0, 4.0)
    assert p == ProjectivePoint((2 - 5j) * np.array([3, 4]))
    assert p != ProjectivePoint(4, 3)


def test_mobius_det_one_and_inverse(rng):
    for _ in range(20):
        m = random_sl2(rng)
        assert m.det_residual < 1e-12
        p = ProjectivePoint(rng.normal(size=2) + 1j * rng.normal(size=2))
        assert m(m.inverse()(p)) == p


def test_compose_examples(rng):
    m = random_sl2(rng)
    assert compose(MobiusMap.identity(), m) == m
    assert compose(m, m.inverse()) == MobiusMap.identity()
    s = MobiusMap([[0, 1], [-1, 0]])
    assert compose(s, s) == MobiusMap.identity()


def test_sign_normalization_is_deterministic():
    m = MobiusMap([[0, 1], [-1, 0]])
    assert np.allclose(MobiusMap(-m.matrix).matrix, m.matrix)
    assert psl2_distance(m, MobiusMap(-m.matrix)) < 1e-15


def test_apply_examples():
    assert apply_antiinvolution(AntiInvolution.standard(), ProjectivePoint(1, 0)) == ProjectivePoint(1, 0)
    assert apply_antiinvolution(AntiInvolution.antipodal(), ProjectivePoint(1, 0)) == ProjectivePoint(0, 1)


def test_apply_matches_homogeneous_oracle(rng):
    for _ in range(50):
        x = sample_hyperboloid("plus" if rng.random() < 0.5 else "minus", rng, 1)[0]
        sheet = "plus" if abs(x[:3] @ x[:3] - x[3] ** 2 - 1) < 1e-9 else "minus"
        inv = AntiInvolution(embed_hyperboloid(sheet, x))
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        a = inv.mobius_part.matrix
        # unnormalized 2x2 arithmetic
        w = np.array([a[0, 0] * np.conj(v[0]) + a[0, 1] * np.conj(v[1]), a[1, 0] * np.conj(v[0]) + a[1, 1] * np.conj(v[1])])
        assert inv(ProjectivePoint(v)) == ProjectivePoint(w)
        assert inv(inv(ProjectivePoint(v))) == ProjectivePoint(v)


def test_malformed_involution():
    with pytest.raises(MalformedInvolution):
        AntiInvolution(MobiusMap([[2, 1], [1, 1]]))


def test_classify_examples():
    assert classify_pair(MobiusMap.identity()) is InvolutionClass.TYPE_I
    assert classify_pair(MobiusMap([[0, 1], [-1, 0]])) is InvolutionClass.TYPE_II
    with pytest.raises(NotInvolutionPair):
        classify_pair(MobiusMap([[1, 1], [0, 1]]))


def test_embed_examples():
    assert embed_hyperboloid(Sheet.PLUS, [1, 0, 0, 0]) == MobiusMap.identity()
    assert np.allclose(embed_hyperboloid(Sheet.MINUS, [0, 0, 0, 1]).matrix, [[0, 1], [-1, 0]])
    m = embed_hyperboloid(Sheet.PLUS, [0, 1, 0, 0])
    assert np.allclose(m.matrix, [[1j, 0], [0, -1j]])
    a, b, c, d = m.matrix.ravel()
    # a = conj(d), b and c purely imaginary
    assert np.isclose(a, np.conj(d)) and abs(b.real) < 1e-15 and abs(c.real) < 1e-15
    assert classify_pair(m) is InvolutionClass.TYPE_I
    with pytest.raises(OffHyperboloid):
        embed_hyperboloid(Sheet.PLUS, [1, 1, 0, 0])
    with pytest.raises(OffHyperboloid):
        embed_hyperboloid(Sheet.MINUS, [1, 0, 0, 0])


@settings(max_examples=200, deadline=None)
@given(
    st.floats(-3, 3),
    st.floats(0, np.pi),
    st.floats(0, 2 * np.pi),
    st.sampled_from([Sheet.PLUS, Sheet.MINUS]),
)
def test_classification_matches_sheet_and_sign(s, theta, phi, sheet):
    u = np.array([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])
    if sheet is Sheet.PLUS:
        x = np.concatenate([np.cosh(s) * u, [np.sinh(s)]])
        expected = InvolutionClass.TYPE_I
    else:
        x = np.concatenate([np.sinh(s) * u, [np.cosh(s)]])
        expected = InvolutionClass.TYPE_II
    m = embed_hyperboloid(sheet, x)
    assert classify_pair(m) is expected
    assert classify_pair(-m.matrix) is expected


def test_fixed_set_of_rho0_is_real_line():
    circle = fixed_point_set(AntiInvolution.standard())
    assert abs(circle.offset) < 1e-12 and np.isclose(circle.radius, 1.0)
    # the real points all lie on it
    for t in np.linspace(-5, 5, 11):
        assert circle.distance_to(ProjectivePoint(t, 1)) < 1e-12
    assert circle.distance_to(ProjectivePoint(1, 0)) < 1e-12


def test_antipodal_map_is_free():
    inv = AntiInvolution.antipodal()
    assert fixed_point_set(inv) is None
    assert min_displacement(inv) > 1e-2


def test_fixed_circle_of_conjugated_rho0(rng):
    for _ in range(20):
        psi = random_sl2(rng)
        inv = AntiInvolution.standard().conjugated_by(psi)
        circle = fixed_point_set(inv)
        assert fixed_point_residual(inv, circle.sample(32)) < 1e-8
        # psi-images of real points land on the reported circle
        for t in np.linspace(-4, 4, 32):
            img = psi(ProjectivePoint(t, 1))
            assert circle.distance_to(img) < 1e-8


def test_conjugator_examples(rng):
    psi = conjugator_to_standard(AntiInvolution.standard())
    assert psi == MobiusMap.identity()
    for _ in range(20):
        psi0 = random_sl2(rng)
        inv = AntiInvolution.standard().conjugated_by(psi0)
        psi = conjugator_to_standard(inv)
        assert conjugation_residual(inv, psi, SAMPLE_PANEL) < 1e-8
    with pytest.raises(TypeIIInput):
        conjugator_to_standard(AntiInvolution.antipodal())


def test_three_point_map(rng):
    dst = [rng.normal(size=2) + 1j * rng.normal(size=2) for _ in range(3)]
    m = mobius_from_three_points(REAL_ANCHORS, dst)
    for s, d in zip(REAL_ANCHORS, dst):
        assert m(ProjectivePoint(s)) == ProjectivePoint(d)


def test_conjugate_by_rho0_stays_degree_one(rng):
    for _ in range(20):
        phi = random_sl2(rng)
        # rho0 phi rho0 is the Moebius map with conjugated matrix
        c = phi.conjugate()
        assert c.det_residual < 1e-12
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        direct = np.conj(phi.apply_vector(np.conj(v)))
        assert ProjectivePoint(c.apply_vector(v)) == ProjectivePoint(direct)


def test_to_sphere_round_trip(rng):
    from realsft.mobius import from_sphere

    v = rng.normal(size=(10, 2)) + 1j * rng.normal(size=(10, 2))
    x = to_sphere(v)
    assert np.allclose(np.linalg.norm(x, axis=1), 1.0)
    back = from_sphere(x)
    for a, b in zip(v, back):
        assert ProjectivePoint(a) == ProjectivePoint(b)


def test_conjugator_when_a_seed_hits_the_pole():
    # z -> 1/conj(z) fixes the unit circle; the seed [1:0] is a pole of phi
    inv = AntiInvolution(MobiusMap([[0, 1], [1, 0]]))
    circle = fixed_point_set(inv)
    assert abs(circle.radius - 1) < 1e-12 and np.abs(circle.center).max() < 1e-12
    assert conjugation_residual(inv, conjugator_to_standard(inv)) < 1e-12
