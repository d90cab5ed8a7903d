"""Oriented 2D simplicial complexes with signed coboundary matrices.

Triangles are stored counterclockwise and edges run from the lower to the
higher vertex index.  With these conventions

* ``coboundary0[e, head] = +1`` and ``coboundary0[e, tail] = -1``;
* ``coboundary1[t, e] = +1`` when the counterclockwise boundary of ``t``
  traverses ``e`` from tail to head, ``-1`` otherwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np
import scipy.sparse as sp
from scipy.spatial import cKDTree

from .errors import (
    DuplicateVertex,
    InvertedTriangle,
    MeshError,
    NonManifold,
    ParseError,
    PerturbationBreaksWellCenteredness,
)

DUPLICATE_TOL = 1e-12
ANGLE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SimplicialComplex:
    vertices: np.ndarray  # (V, 2) float
    triangles: np.ndarray  # (F, 3) int, counterclockwise
    edges: np.ndarray  # (E, 2) int, edges[:, 0] < edges[:, 1]
    coboundary0: sp.csr_matrix  # (E, V)
    coboundary1: sp.csr_matrix  # (F, E)
    boundary_vertices: np.ndarray  # (V,) bool
    boundary_edges: np.ndarray  # (E,) bool
    triangle_edges: np.ndarray  # (F, 3): edge of (t[i], t[i+1])
    triangle_edge_signs: np.ndarray  # (F, 3): matching entries of coboundary1

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.n_vertices, self.n_edges, self.n_triangles

    @property
    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + self.n_triangles

    def edge_vectors(self) -> np.ndarray:
        return self.vertices[self.edges[:, 1]] - self.vertices[self.edges[:, 0]]

    def edge_lengths(self) -> np.ndarray:
        return np.hypot(*self.edge_vectors().T)

    def edge_midpoints(self) -> np.ndarray:
        return 0.5 * (self.vertices[self.edges[:, 0]] + self.vertices[self.edges[:, 1]])

    def triangle_areas(self) -> np.ndarray:
        return 0.5 * _signed_double_area(self.vertices, self.triangles)

    def area(self) -> float:
        return float(math.fsum(self.triangle_areas()))

    def same_as(self, other: "SimplicialComplex") -> bool:
        """Bit-exact comparison of coordinates and connectivity."""
        return (
            self.vertices.shape == other.vertices.shape
            and np.array_equal(self.vertices, other.vertices)
            and np.array_equal(self.triangles, other.triangles)
        )


@dataclass(frozen=True)
class MeshQuality:
    h_max: float
    h_min: float
    min_angle: float
    max_angle: float
    well_centered: bool


def _signed_double_area(vertices, triangles):
    a, b, c = (vertices[triangles[:, i]] for i in range(3))
    return (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])


def build_complex(vertices, triangles) -> SimplicialComplex:
    """Assemble an oriented complex from coordinates and index triples.

    Triples with clockwise orientation are silently reordered.

    Raises
    ------
    MeshError
        Bad shapes, indices out of range or unreferenced vertices.
    DuplicateVertex
        Two vertices closer than ``1e-12`` times the coordinate scale.
    InvertedTriangle
        A triangle with zero area.
    NonManifold
        An edge shared by more than two triangles, or by two triangles
        that overlap (same induced orientation).
    """
    vertices = np.array(vertices, dtype=float)
    triangles = np.array(triangles, dtype=np.int64)
    if vertices.ndim != 2 or vertices.shape[1] != 2 or len(vertices) == 0:
        raise MeshError(f"vertices must have shape (N, 2), got {vertices.shape}")
    if triangles.ndim != 2 or triangles.shape[1] != 3 or len(triangles) == 0:
        raise MeshError(f"triangles must have shape (M, 3), got {triangles.shape}")
    if not np.all(np.isfinite(vertices)):
        raise MeshError("non-finite vertex coordinates")
    nv = len(vertices)
    if triangles.min() < 0 or triangles.max() >= nv:
        raise MeshError("triangle vertex index out of range")
    if np.any(np.diff(np.sort(triangles, axis=1), axis=1) == 0):
        raise MeshError("triangle with repeated vertex index")
    used = np.zeros(nv, dtype=bool)
    used[triangles.ravel()] = True
    if not used.all():
        raise MeshError(f"vertex {int(np.flatnonzero(~used)[0])} belongs to no triangle")

    scale = max(float(np.ptp(vertices, axis=0).max()), float(np.abs(vertices).max()), 1e-300)
    pairs = cKDTree(vertices).query_pairs(DUPLICATE_TOL * scale)
    if pairs:
        i, j = min(pairs)
        raise DuplicateVertex(f"vertices {i} and {j} coincide")

    area2 = _signed_double_area(vertices, triangles)
    flip = area2 < 0
    triangles[flip] = triangles[flip][:, [0, 2, 1]]
    area2 = np.abs(area2)
    if np.any(area2 <= (DUPLICATE_TOL * scale) ** 2):
        bad = int(np.flatnonzero(area2 <= (DUPLICATE_TOL * scale) ** 2)[0])
        raise InvertedTriangle(f"triangle {bad} has zero area")

    nt = len(triangles)
    local = np.stack([triangles, np.roll(triangles, -1, axis=1)], axis=-1)  # (F, 3, 2)
    lo = local.min(axis=-1)
    hi = local.max(axis=-1)
    keys = np.stack([lo.ravel(), hi.ravel()], axis=1)
    edges, inverse = np.unique(keys, axis=0, return_inverse=True)
    inverse = inverse.reshape(nt, 3)
    signs = np.where(local[..., 0] < local[..., 1], 1, -1).astype(np.int8)

    ne = len(edges)
    count = np.bincount(inverse.ravel(), minlength=ne)
    if count.max() > 2:
        e = int(np.argmax(count))
        raise NonManifold(f"edge {tuple(edges[e])} is shared by {count[e]} triangles")
    signed_count = np.bincount(inverse.ravel(), weights=signs.ravel(), minlength=ne)
    folded = (count == 2) & (signed_count != 0)
    if folded.any():
        e = int(np.flatnonzero(folded)[0])
        raise NonManifold(f"triangles overlap across edge {tuple(edges[e])}")

    boundary_edges = count == 1
    boundary_vertices = np.zeros(nv, dtype=bool)
    boundary_vertices[edges[boundary_edges].ravel()] = True

    rows = np.repeat(np.arange(ne), 2)
    d0 = sp.csr_matrix(
        (np.tile(np.array([-1, 1], dtype=np.int64), ne), (rows, edges.ravel())), shape=(ne, nv)
    )
    d1 = sp.csr_matrix(
        (signs.ravel().astype(np.int64), (np.repeat(np.arange(nt), 3), inverse.ravel())),
        shape=(nt, ne),
    )
    for arr in (vertices, triangles, edges, boundary_edges, boundary_vertices, inverse, signs):
        arr.setflags(write=False)
    return SimplicialComplex(
        vertices=vertices,
        triangles=triangles,
        edges=edges,
        coboundary0=d0,
        coboundary1=d1,
        boundary_vertices=boundary_vertices,
        boundary_edges=boundary_edges,
        triangle_edges=inverse,
        triangle_edge_signs=signs,
    )


def triangle_angles(c: SimplicialComplex) -> np.ndarray:
    """Interior angles, ``angles[t, i]`` at vertex ``triangles[t, i]``."""
    p = c.vertices[c.triangles]
    out = np.empty(c.triangles.shape)
    for i in range(3):
        u = p[:, (i + 1) % 3] - p[:, i]
        w = p[:, (i + 2) % 3] - p[:, i]
        cross = u[:, 0] * w[:, 1] - u[:, 1] * w[:, 0]
        out[:, i] = np.arctan2(np.abs(cross), np.einsum("ij,ij->i", u, w))
    return out


def mesh_quality(c: SimplicialComplex) -> MeshQuality:
    lengths = c.edge_lengths()
    angles = triangle_angles(c)
    max_angle = float(angles.max())
    return MeshQuality(
        h_max=float(lengths.max()),
        h_min=float(lengths.min()),
        min_angle=float(angles.min()),
        max_angle=max_angle,
        well_centered=max_angle < 0.5 * math.pi - ANGLE_TOL,
    )


def regular_refine(c: SimplicialComplex) -> SimplicialComplex:
    """Split every triangle into four by joining its edge midpoints.

    New vertex ``V + e`` is the midpoint of edge ``e``; parent vertices keep
    their indices and coordinates.
    """
    nv = c.n_vertices
    vertices = np.vstack([c.vertices, c.edge_midpoints()])
    a, b, cc = c.triangles.T
    m_ab, m_bc, m_ca = (nv + c.triangle_edges[:, i] for i in range(3))
    children = np.stack(
        [
            np.stack([a, m_ab, m_ca], axis=1),
            np.stack([m_ab, b, m_bc], axis=1),
            np.stack([m_ca, m_bc, cc], axis=1),
            np.stack([m_ab, m_bc, m_ca], axis=1),
        ],
        axis=1,
    ).reshape(-1, 3)
    return build_complex(vertices, children)


def refine_n(c: SimplicialComplex, times: int) -> SimplicialComplex:
    for _ in range(times):
        c = regular_refine(c)
    return c


def perturb_interior(c: SimplicialComplex, amplitude: float, seed: int) -> SimplicialComplex:
    """Displace interior vertices by deterministic uniform-in-disk offsets.

    The offset radius of vertex ``v`` is at most ``amplitude`` times its
    shortest incident edge.  Boundary vertices stay fixed.

    Raises
    ------
    PerturbationBreaksWellCenteredness
        The displaced mesh has a non-acute triangle.
    """
    if amplitude < 0:
        raise ValueError("amplitude must be nonnegative")
    if not mesh_quality(c).well_centered:
        raise PerturbationBreaksWellCenteredness("input mesh is not well-centered")
    if amplitude == 0:
        return c
    lengths = c.edge_lengths()
    shortest = np.full(c.n_vertices, np.inf)
    np.minimum.at(shortest, c.edges[:, 0], lengths)
    np.minimum.at(shortest, c.edges[:, 1], lengths)

    rng = np.random.default_rng(seed)
    radius = np.sqrt(rng.random(c.n_vertices))
    theta = 2.0 * math.pi * rng.random(c.n_vertices)
    offset = (amplitude * shortest * radius)[:, None] * np.stack([np.cos(theta), np.sin(theta)], axis=1)
    offset[c.boundary_vertices] = 0.0

    out = build_complex(c.vertices + offset, c.triangles)
    q = mesh_quality(out)
    if not q.well_centered:
        raise PerturbationBreaksWellCenteredness(
            f"max angle {math.degrees(q.max_angle):.4f} deg after perturbation "
            f"(amplitude={amplitude}, seed={seed})"
        )
    return out


# -- text format ------------------------------------------------------------

def save_mesh(c: SimplicialComplex, path) -> None:
    lines = ["decmesh 2", f"vertices {c.n_vertices}"]
    lines += [f"{x!r} {y!r}" for x, y in c.vertices.tolist()]
    lines.append(f"triangles {c.n_triangles}")
    lines += ["{} {} {}".format(*t) for t in c.triangles.tolist()]
    Path(path).write_text("\n".join(lines) + "\n")


def parse_mesh(text: str) -> SimplicialComplex:
    """Parse the ``decmesh 2`` text format; see :func:`save_mesh`."""
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append((lineno, line.split()))
    it = iter(rows)

    def take(what):
        try:
            return next(it)
        except StopIteration:
            raise ParseError(f"unexpected end of file, expected {what}") from None

    lineno, tok = take("header")
    if tok != ["decmesh", "2"]:
        raise ParseError("expected header 'decmesh 2'", lineno)

    def section(name):
        lineno, tok = take(f"'{name} N'")
        if len(tok) != 2 or tok[0] != name:
            raise ParseError(f"expected '{name} N'", lineno)
        try:
            n = int(tok[1])
        except ValueError:
            raise ParseError(f"bad count {tok[1]!r}", lineno) from None
        if n < 0:
            raise ParseError("negative count", lineno)
        return n

    nv = section("vertices")
    vertices = np.empty((nv, 2))
    for i in range(nv):
        lineno, tok = take("vertex coordinates")
        if len(tok) != 2:
            raise ParseError("expected 'x y'", lineno)
        try:
            vertices[i] = [float(t) for t in tok]
        except ValueError:
            raise ParseError(f"bad coordinate in {tok}", lineno) from None

    nt = section("triangles")
    triangles = np.empty((nt, 3), dtype=np.int64)
    for i in range(nt):
        lineno, tok = take("triangle indices")
        if len(tok) != 3:
            raise ParseError("expected 'i j k'", lineno)
        try:
            idx = [int(t) for t in tok]
        except ValueError:
            raise ParseError(f"bad index in {tok}", lineno) from None
        if min(idx) < 0 or max(idx) >= nv:
            raise ParseError(f"vertex index out of range 0..{nv - 1}", lineno)
        triangles[i] = idx

    extra = next(it, None)
    if extra is not None:
        raise ParseError("trailing content", extra[0])
    return build_complex(vertices, triangles)


def load_mesh(path) -> SimplicialComplex:
    return parse_mesh(Path(path).read_text())


FIXTURES = ("square", "triangle")


def fixture_path(name: str) -> Path:
    p = resources.files("decdirac") / "fixtures" / f"{name}.mesh"
    if not p.is_file():
        raise FileNotFoundError(f"no mesh fixture named {name!r}")
    return Path(str(p))


def load_fixture(name: str) -> SimplicialComplex:
    return load_mesh(fixture_path(name))
