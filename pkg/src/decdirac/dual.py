"""Circumcentric dual cells and diagonal Hodge stars.

Each triangle ``T`` with corners ``a, b, c`` is cut into three kites, one per
corner: the kite of ``a`` is ``(a, mid(ab), cc(T), mid(ca))``.  The dual cell
of a vertex is the union of its kites, which also clips boundary cells at the
boundary edge midpoints.  The dual of an edge is the union of the segments
joining its midpoint to the circumcenters of the incident triangles.

Dual edge orientation: the dual edge of ``e`` runs along the primal edge
direction rotated by +90 degrees, i.e. from the circumcenter on the right
of ``e`` to the circumcenter on its left.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import NotWellCentered
from .mesh import SimplicialComplex, mesh_quality


@dataclass(frozen=True, eq=False)
class DualComplex:
    complex: SimplicialComplex
    circumcenters: np.ndarray  # (F, 2)
    dual_vertex_area: np.ndarray  # (V,)
    dual_edge_length: np.ndarray  # (E,)
    # kite halves: (6F, 3, 2) counterclockwise triangles and their owning vertex
    vertex_pieces: np.ndarray
    vertex_piece_owner: np.ndarray
    # half dual edges: (3F, 2, 2) oriented segments and their owning edge
    edge_pieces: np.ndarray
    edge_piece_owner: np.ndarray


def circumcenters(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    a, b, c = (vertices[triangles[:, i]] for i in range(3))
    ab = b - a
    ac = c - a
    d = 2.0 * (ab[:, 0] * ac[:, 1] - ab[:, 1] * ac[:, 0])
    nab = np.einsum("ij,ij->i", ab, ab)
    nac = np.einsum("ij,ij->i", ac, ac)
    ux = (ac[:, 1] * nab - ab[:, 1] * nac) / d
    uy = (ab[:, 0] * nac - ac[:, 0] * nab) / d
    return a + np.stack([ux, uy], axis=1)


def _double_area(p0, p1, p2):
    return (p1[..., 0] - p0[..., 0]) * (p2[..., 1] - p0[..., 1]) - (p1[..., 1] - p0[..., 1]) * (
        p2[..., 0] - p0[..., 0]
    )


def build_dual(c: SimplicialComplex) -> DualComplex:
    """Circumcentric dual of a strictly well-centered complex.

    Raises
    ------
    NotWellCentered
        Some triangle is not strictly acute.
    """
    q = mesh_quality(c)
    if not q.well_centered:
        raise NotWellCentered(
            f"max triangle angle {math.degrees(q.max_angle):.6f} deg; circumcentric dual "
            "measures would not be positive"
        )
    tri = c.triangles
    nt = len(tri)
    cc = circumcenters(c.vertices, tri)
    p = c.vertices[tri]  # (F, 3, 2)
    mid = 0.5 * (p + np.roll(p, -1, axis=1))  # mid[:, i] is the midpoint of (t[i], t[i+1])

    # kite of corner i: (p_i, mid_i, cc, mid_{i-1})
    cc3 = np.broadcast_to(cc[:, None, :], p.shape)
    mid_prev = np.roll(mid, 1, axis=1)
    first = np.stack([p, mid, cc3], axis=2)  # (F, 3, 3, 2)
    second = np.stack([p, cc3, mid_prev], axis=2)
    vertex_pieces = np.stack([first, second], axis=2).reshape(-1, 3, 2)
    vertex_piece_owner = np.repeat(tri.ravel(), 2)
    piece_area = 0.5 * _double_area(vertex_pieces[:, 0], vertex_pieces[:, 1], vertex_pieces[:, 2])
    dual_vertex_area = np.bincount(vertex_piece_owner, weights=piece_area, minlength=c.n_vertices)

    # the triangle on the left of an edge is the one with sign +1
    signs = c.triangle_edge_signs.ravel()
    m = mid.reshape(-1, 2)
    ccr = np.repeat(cc, 3, axis=0)
    start = np.where(signs[:, None] > 0, m, ccr)
    stop = np.where(signs[:, None] > 0, ccr, m)
    edge_pieces = np.stack([start, stop], axis=1)
    edge_piece_owner = c.triangle_edges.ravel()
    seg_len = np.hypot(*(stop - start).T)
    dual_edge_length = np.bincount(edge_piece_owner, weights=seg_len, minlength=c.n_edges)

    for arr in (cc, dual_vertex_area, dual_edge_length, vertex_pieces, edge_pieces):
        arr.setflags(write=False)
    return DualComplex(
        complex=c,
        circumcenters=cc,
        dual_vertex_area=dual_vertex_area,
        dual_edge_length=dual_edge_length,
        vertex_pieces=vertex_pieces,
        vertex_piece_owner=vertex_piece_owner,
        edge_pieces=edge_pieces,
        edge_piece_owner=edge_piece_owner,
    )


def dual_polygon(d: DualComplex, v: int) -> np.ndarray:
    """Counterclockwise boundary polygon of the dual cell of vertex ``v``.

    Walks the kites around ``v``; for a boundary vertex the polygon starts
    at ``v`` itself.
    """
    c = d.complex
    rows, corner = np.nonzero(c.triangles == v)
    mids = c.edge_midpoints()
    # kite of triangle t at corner i: enters along edge (t[i-1], t[i]), leaves along (t[i], t[i+1])
    step = {}
    for t, i in zip(rows.tolist(), corner.tolist()):
        e_in = int(c.triangle_edges[t, (i - 1) % 3])
        e_out = int(c.triangle_edges[t, i])
        step[e_out] = (t, e_in)
    starts = set(step) - {e_in for _, e_in in step.values()}
    poly = []
    if starts:
        (e,) = starts
        poly.append(c.vertices[v])
    else:
        e = next(iter(step))
    first = e
    while True:
        poly.append(mids[e])
        if e not in step:
            break
        t, e = step[e]
        poly.append(d.circumcenters[t])
        if e == first:
            break
    return np.array(poly)


def shoelace(poly: np.ndarray) -> float:
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


@dataclass(frozen=True, eq=False)
class HodgeStars:
    """Diagonals of the discrete Hodge stars, ``|*s| / |s|`` per simplex."""

    complex: SimplicialComplex
    m0: np.ndarray
    m1: np.ndarray
    m2: np.ndarray

    @property
    def diagonals(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.m0, self.m1, self.m2

    def matrix(self, k: int) -> sp.dia_matrix:
        return sp.diags(self.diagonals[k])

    def inverse(self, k: int) -> np.ndarray:
        return 1.0 / self.diagonals[k]

    def block(self) -> sp.dia_matrix:
        return sp.diags(np.concatenate(self.diagonals))


def hodge_stars(c: SimplicialComplex, d: DualComplex) -> HodgeStars:
    m0 = np.array(d.dual_vertex_area)
    m1 = d.dual_edge_length / c.edge_lengths()
    m2 = 1.0 / c.triangle_areas()
    return HodgeStars(complex=c, m0=m0, m1=m1, m2=m2)


def dual_table(c: SimplicialComplex, d: DualComplex) -> list[tuple[str, int, float, float, float]]:
    """Rows ``(kind, index, |s|, |*s|, ratio)`` for the diagnostic dump."""
    rows = []
    for i, a in enumerate(d.dual_vertex_area.tolist()):
        rows.append(("vertex", i, 1.0, a, a))
    for i, (le, ld) in enumerate(zip(c.edge_lengths().tolist(), d.dual_edge_length.tolist())):
        rows.append(("edge", i, le, ld, ld / le))
    for i, at in enumerate(c.triangle_areas().tolist()):
        rows.append(("triangle", i, at, 1.0, 1.0 / at))
    return rows
