"""Gauss rules on the unit segment and the reference triangle.

Triangle rules are collapsed (Duffy) Gauss-Jacobi products symmetrized over
the six permutations of the barycentric coordinates, so they are exact to
the requested degree and invariant under the symmetries of the triangle.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

# evaluation is chunked to bound the temporary arrays
_CHUNK_POINTS = 1 << 20


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    degree: int
    segment_nodes: np.ndarray  # on [0, 1]
    segment_weights: np.ndarray  # sum to 1
    triangle_nodes: np.ndarray  # (n, 2) on the triangle (0,0), (1,0), (0,1)
    triangle_weights: np.ndarray  # sum to 1/2

    @property
    def triangle_barycentric(self) -> np.ndarray:
        x, y = self.triangle_nodes.T
        return np.stack([1.0 - x - y, x, y], axis=1)


@lru_cache(maxsize=None)
def quadrature_rule(degree: int = 10) -> QuadratureRule:
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    n = degree // 2 + 1  # Gauss with n points is exact to 2n - 1

    t, w = np.polynomial.legendre.leggauss(n)
    seg_x = 0.5 * (t + 1.0)
    seg_w = 0.5 * w

    # x = (1+a)/2 carries the (1-x) Jacobian via the Jacobi weight (1-a)^1
    a, wa = roots_jacobi(n, 1.0, 0.0)
    x = 0.5 * (1.0 + a)
    wx = wa / 4.0
    y = seg_x
    wy = seg_w
    X, Y = np.meshgrid(x, y, indexing="ij")
    W = np.outer(wx, wy)
    px = X.ravel()
    py = ((1.0 - X) * Y).ravel()
    bary = np.stack([1.0 - px - py, px, py], axis=1)
    weights = W.ravel()

    perms = list(itertools.permutations(range(3)))
    nodes = np.concatenate([bary[:, p] for p in perms])
    tri_w = np.tile(weights, len(perms)) / len(perms)
    return QuadratureRule(
        degree=degree,
        segment_nodes=seg_x,
        segment_weights=seg_w,
        triangle_nodes=nodes[:, 1:].copy(),
        triangle_weights=tri_w,
    )


def integrate_triangles(f, p0, p1, p2, rule: QuadratureRule) -> np.ndarray:
    """Integrate scalar ``f(x, y)`` over each triangle ``(p0[i], p1[i], p2[i])``.

    Triangles with clockwise vertices contribute with negative sign.
    """
    p0, p1, p2 = (np.asarray(p, dtype=float) for p in (p0, p1, p2))
    det = (p1[:, 0] - p0[:, 0]) * (p2[:, 1] - p0[:, 1]) - (p1[:, 1] - p0[:, 1]) * (p2[:, 0] - p0[:, 0])
    lam = rule.triangle_barycentric
    out = np.empty(len(p0))
    step = max(1, _CHUNK_POINTS // len(lam))
    for s in range(0, len(p0), step):
        sl = slice(s, s + step)
        pts = lam[None, :, 0, None] * p0[sl, None] + lam[None, :, 1, None] * p1[sl, None] + lam[None, :, 2, None] * p2[sl, None]
        vals = np.broadcast_to(f(pts[..., 0], pts[..., 1]), pts.shape[:2])
        out[sl] = det[sl] * (vals @ rule.triangle_weights)
    return out


def integrate_segments_1form(f1, a, b, rule: QuadratureRule) -> np.ndarray:
    """Integrate the 1-form with proxy ``f1(x, y) -> (p, q)`` along ``a[i] -> b[i]``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    t = rule.segment_nodes
    tangent = b - a
    out = np.empty(len(a))
    step = max(1, _CHUNK_POINTS // len(t))
    for s in range(0, len(a), step):
        sl = slice(s, s + step)
        pts = a[sl, None] + t[None, :, None] * tangent[sl, None]
        p, q = (np.broadcast_to(v, pts.shape[:2]) for v in f1(pts[..., 0], pts[..., 1]))
        line = p * tangent[sl, 0, None] + q * tangent[sl, 1, None]
        out[sl] = line @ rule.segment_weights
    return out


def integral_of_barycentric_monomial(a: int, b: int, c: int, area: float = 0.5) -> float:
    """Exact integral of ``l0^a l1^b l2^c`` over a triangle of the given area."""
    return 2.0 * area * math.factorial(a) * math.factorial(b) * math.factorial(c) / math.factorial(a + b + c + 2)
