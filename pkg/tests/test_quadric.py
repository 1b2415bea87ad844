import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from realsft.errors import (
    DegenerateSpan,
    DimensionMismatch,
    NotIsotropic,
    NotOnQuadric,
    NotOrthonormal,
    OnHyperplaneAtInfinity,
    PointOnSigma,
    SingularQuadric,
    UnsupportedDimension,
)
from realsft.mobius import ProjectivePoint
from realsft.quadric import (
    Quadric,
    affine_chart,
    contains,
    enumerate_lines,
    grassmannian_correspondence,
    make_line,
    plane_distance,
    random_configuration,
    random_generic_configuration,
    random_quadric_point,
    random_rotation,
    real_plane_projector,
    rehomogenize,
    standard_decoration,
    tangent_hyperplane,
)

I = 1j


def test_quadric_validation():
    q = Quadric(np.array([[1, 2, 0], [0, 3, 0], [0, 0, 1]]))
    assert np.array_equal(q.B, q.B.T)
    with pytest.raises(SingularQuadric):
        Quadric(np.diag([1, 1, 0]))
    with pytest.raises(DimensionMismatch):
        contains(Quadric.standard(2), [1, 0, 0])


def test_contains_examples():
    q = Quadric.standard(2)
    assert contains(q, [1, I, 0, 0])
    assert not contains(q, [1, 0, 0, 0])
    assert contains(Quadric(np.diag([1, 1, -1, -1])), [1, 0, 1, 0])


def test_make_line_examples():
    q = Quadric.standard(2)
    line = make_line(q, [1, I, 0, 0], [0, 0, 1, I])
    assert max(line.residuals()) < 1e-15
    with pytest.raises(NotIsotropic, match="B\\(p,q\\)"):
        make_line(q, [1, I, 0, 0], [1, -I, 0, 0])
    with pytest.raises(DegenerateSpan):
        make_line(q, [1, I, 0, 0], [1, I, 0, 0])


def test_grassmannian_examples():
    e = np.eye(4)
    z = grassmannian_correspondence("forward", e[0], e[1])
    assert z == ProjectivePoint(1, I, 0, 0)
    x, y = grassmannian_correspondence("inverse", [1, I, 0, 0])
    assert np.allclose(real_plane_projector(x, y), real_plane_projector(e[0], e[1]))
    with pytest.raises(NotOrthonormal):
        grassmannian_correspondence("forward", e[0], e[0] + e[1])
    with pytest.raises(NotOnQuadric):
        grassmannian_correspondence("inverse", [1, 0, 0, 0])


def test_grassmannian_round_trip(rng):
    for _ in range(100):
        n = int(rng.integers(1, 6))
        qm, _ = np.linalg.qr(rng.normal(size=(n + 2, 2)))
        x, y = qm[:, 0], qm[:, 1]
        z = grassmannian_correspondence("forward", x, y)
        x2, y2 = grassmannian_correspondence("inverse", z.coords)
        assert np.linalg.norm(real_plane_projector(x, y) - real_plane_projector(x2, y2)) < 1e-10
        assert grassmannian_correspondence("forward", x2, y2) == z


def test_tangent_hyperplane_examples(rng):
    q = Quadric.standard(3)
    h = tangent_hyperplane(q, [1, 0, 0, 0, I])
    assert ProjectivePoint(h) == ProjectivePoint(1, 0, 0, 0, I)
    p = random_quadric_point(3, rng)
    h = tangent_hyperplane(q, p.coords)
    assert abs(q.bilinear(p.coords, p.coords)) < 1e-10
    # B(p, p) = 0 means p satisfies its own tangent equation
    assert abs(h @ p.coords) < 1e-10
    with pytest.raises(NotOnQuadric):
        tangent_hyperplane(q, [1, 0, 0, 0, 0])


def test_enumerate_standard_example():
    q = Quadric.standard(3)
    dec = standard_decoration(3)
    lines = enumerate_lines(q, [1, 0, 0, 0, I], dec)
    assert len(lines) == 1
    line = lines[0]
    assert line.q == ProjectivePoint(0, 0, 1, I, 0)
    assert max(line.residuals()) < 1e-15


def test_enumerate_errors():
    q = Quadric.standard(3)
    dec = standard_decoration(3)
    with pytest.raises(PointOnSigma):
        enumerate_lines(q, [1, I, 0, 0, 0], dec)
    with pytest.raises(NotOnQuadric):
        enumerate_lines(q, [1, 0, 0, 0, 0], dec)
    with pytest.raises(UnsupportedDimension):
        standard_decoration(2)
    with pytest.raises(UnsupportedDimension):
        enumerate_lines(Quadric.standard(2), [1, 0, 0, I], dec)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_count_is_one_for_random_configurations(n, rng):
    for _ in range(20):
        q, p, dec = random_configuration(n, rng)
        lines = enumerate_lines(q, p, dec)
        assert len(lines) == 1
        line = lines[0]
        assert max(line.residuals()) < 1e-8
        # meets the cycle and lies through p
        assert plane_distance(line.frame[:1], p.coords[None]) < 1e-8
        h = dec.sigma
        assert dec.cycle.projector() @ line.q.coords == pytest.approx(line.q.coords)
        assert abs(h @ line.p.coords) > 1e-8


def test_count_with_independent_points(rng):
    for _ in range(20):
        q, p, dec = random_generic_configuration(4, rng)
        assert len(enumerate_lines(q, p, dec)) == 1


def test_so_equivariance(rng):
    q = Quadric.standard(3)
    for _ in range(20):
        a = random_rotation(5, rng)
        z = random_quadric_point(3, rng).coords
        w = rng.normal(size=5) + 1j * rng.normal(size=5)
        assert contains(q, a @ z) == contains(q, z)
        assert contains(q, a @ w) == contains(q, w)
        line = make_line(q, [1, I, 0, 0, 0], [0, 0, 1, I, 0])
        moved = make_line(q, a @ line.p.coords, a @ line.q.coords)
        assert max(moved.residuals()) < 1e-12


def test_affine_chart_examples():
    q = Quadric.standard(3)
    assert np.allclose(affine_chart(q, [1, 0, 0, 0, I], 4), [-I, 0, 0, 0])
    with pytest.raises(OnHyperplaneAtInfinity):
        affine_chart(q, [0, 0, 1, I, 0], 4)
    z = ProjectivePoint(1, 0, 0, 0, I)
    assert rehomogenize(affine_chart(q, z.coords, 4), 4) == z


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_count_invariant_under_rotation(seed):
    rng = np.random.default_rng(seed)
    q, p, dec = random_configuration(3, rng)
    assert len(enumerate_lines(q, p, dec)) == 1
