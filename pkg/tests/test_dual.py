import math

import numpy as np
import pytest

from conftest import SQRT3, equilateral, with_stars
from decdirac.dual import build_dual, circumcenters, dual_polygon, dual_table, hodge_stars, shoelace
from decdirac.errors import NotWellCentered
from decdirac.mesh import build_complex, regular_refine


def circumcenter_oracle(a, b, c):
    """Solve |x-a|^2 = |x-b|^2 = |x-c|^2 as a 2x2 linear system."""
    m = 2 * np.array([b - a, c - a])
    rhs = np.array([b @ b - a @ a, c @ c - a @ a])
    return np.linalg.solve(m, rhs)


def test_equilateral_circumcenter():
    d = build_dual(equilateral())
    np.testing.assert_allclose(d.circumcenters[0], [0.5, SQRT3 / 6], atol=1e-15)


def test_equilateral_dual_edges():
    d = build_dual(equilateral())
    np.testing.assert_allclose(d.dual_edge_length, 1 / (2 * SQRT3), rtol=1e-14)
    np.testing.assert_allclose(d.dual_vertex_area, (SQRT3 / 4) / 3, rtol=1e-14)


def test_circumcenters_match_oracle(square):
    cc = circumcenters(square.vertices, square.triangles)
    for t, p in zip(square.triangles, cc):
        np.testing.assert_allclose(p, circumcenter_oracle(*square.vertices[t]), atol=1e-13)


def test_not_well_centered_refused():
    with pytest.raises(NotWellCentered):
        build_dual(build_complex([[0, 0], [1, 0], [0, 1]], [[0, 1, 2]]))


def test_structured_interior_edge_star(tri):
    _, _, st = with_stars(tri)
    interior = ~tri.boundary_edges
    np.testing.assert_allclose(st.m1[interior], 1 / SQRT3, rtol=1e-12)
    np.testing.assert_allclose(st.m1[~interior], 1 / (2 * SQRT3), rtol=1e-12)


def test_star_entries(any_fixture):
    c, d, st = with_stars(any_fixture)
    np.testing.assert_array_equal(st.m2, 1.0 / c.triangle_areas())
    np.testing.assert_array_equal(st.m0, d.dual_vertex_area)
    assert all((m > 0).all() for m in st.diagonals)
    np.testing.assert_allclose(st.inverse(1) * st.m1, 1.0)


def test_partition_of_domain(any_fixture):
    c, d, _ = with_stars(any_fixture)
    area = c.area()
    assert math.fsum(d.dual_vertex_area) == pytest.approx(area, rel=1e-12)
    poly_area = sum(abs(shoelace(dual_polygon(d, v))) for v in range(c.n_vertices))
    assert poly_area == pytest.approx(area, rel=1e-12)


def test_dual_area_two_ways(any_fixture):
    c, d, _ = with_stars(any_fixture)
    for v in range(c.n_vertices):
        assert shoelace(dual_polygon(d, v)) == pytest.approx(d.dual_vertex_area[v], rel=1e-12)


def test_dual_edges_orthogonal(any_fixture):
    c, d, _ = with_stars(any_fixture)
    t = c.edge_vectors()[d.edge_piece_owner]
    s = d.edge_pieces[:, 1] - d.edge_pieces[:, 0]
    scale = np.linalg.norm(t, axis=1) * np.linalg.norm(s, axis=1)
    assert (np.abs(np.einsum("ij,ij->i", t, s)) <= 1e-10 * scale + 1e-15).all()


def test_dual_edge_crosses_primal_midpoint(any_fixture):
    c, d, _ = with_stars(any_fixture)
    mids = c.edge_midpoints()[d.edge_piece_owner]
    touches = np.minimum(
        np.linalg.norm(d.edge_pieces[:, 0] - mids, axis=1), np.linalg.norm(d.edge_pieces[:, 1] - mids, axis=1)
    )
    assert touches.max() < 1e-14


def test_refinement_keeps_dual_positive(any_fixture):
    c = regular_refine(regular_refine(any_fixture))
    d = build_dual(c)
    assert (d.dual_vertex_area > 0).all() and (d.dual_edge_length > 0).all()


def test_dual_table_rows(tri):
    c, d, st = with_stars(tri)
    rows = dual_table(c, d)
    assert len(rows) == sum(c.shape)
    kinds = [r[0] for r in rows]
    assert kinds.count("vertex") == c.n_vertices and kinds.count("triangle") == c.n_triangles
    ratios = np.array([r[4] for r in rows])
    np.testing.assert_allclose(ratios, np.concatenate(st.diagonals))
