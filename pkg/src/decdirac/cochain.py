"""Graded cochains on a 2D complex and the DEC Hodge-Dirac operator.

The codifferential is the adjoint of the coboundary in the star-weighted
inner product,

    delta_k = M_{k-1}^{-1} (d^{k-1})^T M_k,

so ``inner(dec_delta(u), v) == inner(u, dec_d(v))`` holds by construction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dual import HodgeStars
from .errors import DimensionMismatch
from .mesh import SimplicialComplex


@dataclass(frozen=True)
class GradedCochain:
    u0: np.ndarray
    u1: np.ndarray
    u2: np.ndarray

    def __post_init__(self):
        for k, u in enumerate(self.parts):
            if np.ndim(u) != 1:
                raise DimensionMismatch(f"grade {k} component must be 1D, got shape {np.shape(u)}")

    @property
    def parts(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.u0, self.u1, self.u2

    @property
    def shape(self) -> tuple[int, int, int]:
        return tuple(len(u) for u in self.parts)

    def flat(self) -> np.ndarray:
        return np.concatenate(self.parts)

    @classmethod
    def from_flat(cls, vec, shape) -> "GradedCochain":
        nv, ne, nt = shape
        vec = np.asarray(vec, dtype=float)
        if len(vec) != nv + ne + nt:
            raise DimensionMismatch(f"flat vector of length {len(vec)} does not fit shape {shape}")
        return cls(vec[:nv].copy(), vec[nv : nv + ne].copy(), vec[nv + ne :].copy())

    @classmethod
    def zeros(cls, c: SimplicialComplex) -> "GradedCochain":
        return cls(np.zeros(c.n_vertices), np.zeros(c.n_edges), np.zeros(c.n_triangles))

    @classmethod
    def random(cls, c: SimplicialComplex, rng) -> "GradedCochain":
        return cls(
            rng.standard_normal(c.n_vertices),
            rng.standard_normal(c.n_edges),
            rng.standard_normal(c.n_triangles),
        )

    def _check(self, other):
        if self.shape != other.shape:
            raise DimensionMismatch(f"cochain shapes differ: {self.shape} vs {other.shape}")

    def __add__(self, other):
        self._check(other)
        return GradedCochain(*(a + b for a, b in zip(self.parts, other.parts)))

    def __sub__(self, other):
        self._check(other)
        return GradedCochain(*(a - b for a, b in zip(self.parts, other.parts)))

    def __mul__(self, s):
        return GradedCochain(*(s * a for a in self.parts))

    __rmul__ = __mul__

    def __neg__(self):
        return GradedCochain(*(-a for a in self.parts))

    def max_abs(self) -> float:
        return max(float(np.abs(u).max(initial=0.0)) for u in self.parts)


def _check_shape(u: GradedCochain, c: SimplicialComplex):
    if u.shape != c.shape:
        raise DimensionMismatch(f"cochain shape {u.shape} does not match complex {c.shape}")


@dataclass(frozen=True)
class ConstraintSpace:
    """Cochains vanishing on boundary vertices/edges with zero triangle sum."""

    interior_vertex_ids: np.ndarray
    interior_edge_ids: np.ndarray
    triangle_ids: np.ndarray
    mean_zero: bool = True

    @classmethod
    def of(cls, c: SimplicialComplex) -> "ConstraintSpace":
        return cls(
            interior_vertex_ids=np.flatnonzero(~c.boundary_vertices),
            interior_edge_ids=np.flatnonzero(~c.boundary_edges),
            triangle_ids=np.arange(c.n_triangles),
        )

    def contains(self, u: GradedCochain, tol: float = 0.0) -> bool:
        bv = np.ones(len(u.u0), dtype=bool)
        bv[self.interior_vertex_ids] = False
        be = np.ones(len(u.u1), dtype=bool)
        be[self.interior_edge_ids] = False
        scale = max(u.max_abs(), 1.0) * len(u.u2)
        return (
            not np.any(u.u0[bv])
            and not np.any(u.u1[be])
            and (not self.mean_zero or abs(math.fsum(u.u2)) <= tol * scale)
        )


def inner(u: GradedCochain, v: GradedCochain, stars: HodgeStars) -> float:
    _check_shape(u, stars.complex)
    _check_shape(v, stars.complex)
    return float(sum(np.dot(m * a, b) for m, a, b in zip(stars.diagonals, u.parts, v.parts)))


def dec_d(u: GradedCochain, c: SimplicialComplex) -> GradedCochain:
    _check_shape(u, c)
    return GradedCochain(np.zeros(c.n_vertices), c.coboundary0 @ u.u0, c.coboundary1 @ u.u1)


def dec_delta(u: GradedCochain, stars: HodgeStars) -> GradedCochain:
    c = stars.complex
    _check_shape(u, c)
    m0, m1, m2 = stars.diagonals
    return GradedCochain(
        (c.coboundary0.T @ (m1 * u.u1)) / m0,
        (c.coboundary1.T @ (m2 * u.u2)) / m1,
        np.zeros(c.n_triangles),
    )


def dec_dirac(u: GradedCochain, stars: HodgeStars) -> GradedCochain:
    return dec_d(u, stars.complex) + dec_delta(u, stars)


def project_constraints(u: GradedCochain, cs: ConstraintSpace) -> GradedCochain:
    """Zero the boundary entries and shift ``u2`` to zero sum."""
    u0 = np.zeros_like(u.u0)
    u0[cs.interior_vertex_ids] = u.u0[cs.interior_vertex_ids]
    u1 = np.zeros_like(u.u1)
    u1[cs.interior_edge_ids] = u.u1[cs.interior_edge_ids]
    u2 = np.array(u.u2, dtype=float)
    if cs.mean_zero and len(u2):
        u2 = u2 - math.fsum(u2) / len(u2)
    return GradedCochain(u0, u1, u2)


def remove_form_mean(u: GradedCochain, c: SimplicialComplex) -> GradedCochain:
    """Subtract the cochain of the constant 2-form with the same total.

    This is the discrete counterpart of subtracting the mean of a 2-form:
    the constant ``m`` has cochain ``m * area(T)``.
    """
    areas = c.triangle_areas()
    m = math.fsum(u.u2) / math.fsum(areas)
    return GradedCochain(u.u0, u.u1, u.u2 - m * areas)


def norms(u: GradedCochain, stars: HodgeStars) -> tuple[float, float]:
    """DEC L2 norm and the H-Lambda norm ``|u| + |du|``."""
    l2 = math.sqrt(max(inner(u, u, stars), 0.0))
    du = dec_d(u, stars.complex)
    return l2, l2 + math.sqrt(max(inner(du, du, stars), 0.0))
