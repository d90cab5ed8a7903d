"""Analytic graded forms in 2D vector proxies, the de Rham map and J.

A graded form is ``(u0, (p, q), w)`` standing for
``u0 + (p dx + q dy) + w dx^dy``.  The Euclidean Hodge star on 1-forms is
``*(p dx + q dy) = p dy - q dx``.  In these proxies

    d u     = (0, grad u0, dq/dx - dp/dy)
    delta u = (-(dp/dx + dq/dy), (dw/dy, -dw/dx), 0)
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .cochain import GradedCochain
from .dual import DualComplex
from .errors import MissingDerivatives, UnknownCase
from .mesh import SimplicialComplex, load_fixture
from .quadrature import QuadratureRule, integrate_segments_1form, integrate_triangles, quadrature_rule

Scalar = Callable[[np.ndarray, np.ndarray], np.ndarray]
Pair = Callable[[np.ndarray, np.ndarray], tuple]
Quad = Callable[[np.ndarray, np.ndarray], tuple]


def _zero(x, y):
    return np.zeros(np.broadcast(x, y).shape)


def _zero2(x, y):
    z = _zero(x, y)
    return z, z


@dataclass(frozen=True)
class GradedFormField:
    """Analytic graded form; ``None`` components are identically zero.

    ``grad0`` and ``grad2`` return ``(d/dx, d/dy)`` of the scalar parts,
    ``jac1`` returns ``(dp/dx, dp/dy, dq/dx, dq/dy)``.
    """

    f0: Optional[Scalar] = None
    f1: Optional[Pair] = None
    f2: Optional[Scalar] = None
    grad0: Optional[Pair] = None
    jac1: Optional[Quad] = None
    grad2: Optional[Pair] = None
    name: str = ""

    def u0(self, x, y):
        return _zero(x, y) if self.f0 is None else np.broadcast_to(self.f0(x, y), np.broadcast(x, y).shape)

    def u1(self, x, y):
        return _zero2(x, y) if self.f1 is None else self.f1(x, y)

    def u2(self, x, y):
        return _zero(x, y) if self.f2 is None else np.broadcast_to(self.f2(x, y), np.broadcast(x, y).shape)

    def _require(self, *names):
        for comp, deriv in names:
            if getattr(self, comp) is not None and getattr(self, deriv) is None:
                raise MissingDerivatives(f"field {self.name or '<anonymous>'} lacks {deriv}")

    def d_u0(self, x, y):
        return _zero2(x, y) if self.f0 is None else self.grad0(x, y)

    def d_u1(self, x, y):
        if self.f1 is None:
            z = _zero(x, y)
            return z, z, z, z
        return self.jac1(x, y)

    def d_u2(self, x, y):
        return _zero2(x, y) if self.f2 is None else self.grad2(x, y)

    def __add__(self, other: "GradedFormField") -> "GradedFormField":
        def add(a, b, zero):
            if a is None:
                return b
            if b is None:
                return a
            if zero is _zero:
                return lambda x, y: a(x, y) + b(x, y)
            return lambda x, y: tuple(s + t for s, t in zip(a(x, y), b(x, y)))

        both = all(
            getattr(f, comp) is None or getattr(f, der) is not None
            for f in (self, other)
            for comp, der in (("f0", "grad0"), ("f1", "jac1"), ("f2", "grad2"))
        )
        return GradedFormField(
            f0=add(self.f0, other.f0, _zero),
            f1=add(self.f1, other.f1, _zero2),
            f2=add(self.f2, other.f2, _zero),
            grad0=add(self.grad0, other.grad0, _zero2) if both else None,
            jac1=add(self.jac1, other.jac1, _zero2) if both else None,
            grad2=add(self.grad2, other.grad2, _zero2) if both else None,
            name=f"{self.name}+{other.name}",
        )


def exterior_derivative(u: GradedFormField) -> GradedFormField:
    u._require(("f0", "grad0"), ("f1", "jac1"))
    f1 = None if u.f0 is None else u.grad0

    def f2(x, y):
        _, py, qx, _ = u.jac1(x, y)
        return qx - py

    return GradedFormField(f1=f1, f2=None if u.f1 is None else f2, name=f"d({u.name})")


def codifferential(u: GradedFormField) -> GradedFormField:
    u._require(("f1", "jac1"), ("f2", "grad2"))

    def f0(x, y):
        px, _, _, qy = u.jac1(x, y)
        return -(px + qy)

    def f1(x, y):
        wx, wy = u.grad2(x, y)
        return wy, -wx

    return GradedFormField(
        f0=None if u.f1 is None else f0, f1=None if u.f2 is None else f1, name=f"delta({u.name})"
    )


def continuous_dirac(u: GradedFormField) -> GradedFormField:
    """``D u = d u + delta u`` on the proxies; needs all first derivatives."""
    out = exterior_derivative(u) + codifferential(u)
    return GradedFormField(f0=out.f0, f1=out.f1, f2=out.f2, name=f"D({u.name})")


def derivative_defect(u: GradedFormField, x, y, step: float = 1e-5) -> float:
    """Max deviation of the supplied derivatives from central differences."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)

    def cd(f):
        fx = [(a - b) / (2 * step) for a, b in zip(np.atleast_1d(f(x + step, y)), np.atleast_1d(f(x - step, y)))]
        fy = [(a - b) / (2 * step) for a, b in zip(np.atleast_1d(f(x, y + step)), np.atleast_1d(f(x, y - step)))]
        return fx, fy

    worst = 0.0
    if u.f0 is not None:
        (gx,), (gy,) = cd(lambda a, b: (u.f0(a, b),))
        ex, ey = u.grad0(x, y)
        worst = max(worst, np.abs(gx - ex).max(), np.abs(gy - ey).max())
    if u.f1 is not None:
        (px, qx), (py, qy) = cd(u.f1)
        epx, epy, eqx, eqy = u.jac1(x, y)
        worst = max(worst, *(np.abs(a - b).max() for a, b in ((px, epx), (py, epy), (qx, eqx), (qy, eqy))))
    if u.f2 is not None:
        (gx,), (gy,) = cd(lambda a, b: (u.f2(a, b),))
        ex, ey = u.grad2(x, y)
        worst = max(worst, np.abs(gx - ex).max(), np.abs(gy - ey).max())
    return float(worst)


# -- interpolation ------------------------------------------------------------

def derham_map(u: GradedFormField, c: SimplicialComplex, q: Optional[QuadratureRule] = None) -> GradedCochain:
    """Integrate each component over the simplices of matching dimension."""
    q = q or quadrature_rule()
    v = c.vertices
    tri = c.triangles
    u0 = np.array(u.u0(v[:, 0], v[:, 1]), dtype=float)
    u1 = (
        np.zeros(c.n_edges)
        if u.f1 is None
        else integrate_segments_1form(u.f1, v[c.edges[:, 0]], v[c.edges[:, 1]], q)
    )
    u2 = (
        np.zeros(c.n_triangles)
        if u.f2 is None
        else integrate_triangles(u.f2, v[tri[:, 0]], v[tri[:, 1]], v[tri[:, 2]], q)
    )
    return GradedCochain(u0, u1, u2)


def j_map(u: GradedFormField, d: DualComplex, q: Optional[QuadratureRule] = None) -> GradedCochain:
    """Star, integrate over dual cells, unstar.

    * vertex ``v``: mean of ``u0`` over its dual cell;
    * edge ``e``: ``|e| / |*e|`` times the integral of ``*u1`` over the dual
      edge (equivalently the tangential component ``u1 . t_e`` integrated
      along the dual edge);
    * triangle ``T``: ``area(T) * w(circumcenter(T))``.
    """
    q = q or quadrature_rule()
    c = d.complex
    if u.f0 is None:
        j0 = np.zeros(c.n_vertices)
    else:
        pcs = d.vertex_pieces
        part = integrate_triangles(u.f0, pcs[:, 0], pcs[:, 1], pcs[:, 2], q)
        j0 = np.bincount(d.vertex_piece_owner, weights=part, minlength=c.n_vertices) / d.dual_vertex_area
    if u.f1 is None:
        j1 = np.zeros(c.n_edges)
    else:
        f1 = u.f1

        def star1(x, y):
            p, qq = f1(x, y)
            return -qq, p

        segs = d.edge_pieces
        part = integrate_segments_1form(star1, segs[:, 0], segs[:, 1], q)
        j1 = np.bincount(d.edge_piece_owner, weights=part, minlength=c.n_edges)
        j1 *= c.edge_lengths() / d.dual_edge_length
    cc = d.circumcenters
    j2 = np.zeros(c.n_triangles) if u.f2 is None else c.triangle_areas() * u.u2(cc[:, 0], cc[:, 1])
    return GradedCochain(j0, np.asarray(j1, dtype=float), np.asarray(j2, dtype=float))


# -- manufactured solutions ------------------------------------------------------

@dataclass(frozen=True)
class ManufacturedCase:
    name: str
    mesh: SimplicialComplex
    exact: GradedFormField
    rhs: GradedFormField


def square_solution() -> GradedFormField:
    tp = 2.0 * math.pi

    def f0(x, y):
        return np.sin(tp * x) * np.sin(tp * y)

    def grad0(x, y):
        return tp * np.cos(tp * x) * np.sin(tp * y), tp * np.sin(tp * x) * np.cos(tp * y)

    def f1(x, y):
        return np.sin(tp * y) + 0 * x, np.sin(tp * x) + 0 * y

    def jac1(x, y):
        z = np.zeros(np.broadcast(x, y).shape)
        return z, tp * np.cos(tp * y) + z, tp * np.cos(tp * x) + z, z

    def f2(x, y):
        return np.cos(tp * x) * np.sin(tp * y)

    def grad2(x, y):
        return -tp * np.sin(tp * x) * np.sin(tp * y), tp * np.cos(tp * x) * np.cos(tp * y)

    return GradedFormField(f0, f1, f2, grad0, jac1, grad2, name="square")


TRIANGLE_DOMAIN = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3.0) / 2.0]])


def barycentric_coefficients(corners: np.ndarray) -> np.ndarray:
    """Rows ``(a, b, c)`` with ``lambda_i(x, y) = a + b x + c y``."""
    m = np.column_stack([np.ones(3), corners])
    return np.linalg.inv(m).T


def bubble_mean(corners=TRIANGLE_DOMAIN, q: Optional[QuadratureRule] = None) -> float:
    """Mean of ``2^15 (l0 l1 l2)^3`` over the triangle, by quadrature."""
    q = q or quadrature_rule(10)
    coef = barycentric_coefficients(corners)
    p = corners[None]

    def f(x, y):
        lam = [a + b * x + c * y for a, b, c in coef]
        return 2.0**15 * (lam[0] * lam[1] * lam[2]) ** 3

    total = integrate_triangles(f, p[:, 0], p[:, 1], p[:, 2], q)[0]
    area = 0.5 * abs(np.linalg.det(np.column_stack([corners[1] - corners[0], corners[2] - corners[0]])))
    return float(total / area)


def triangle_solution(corners=TRIANGLE_DOMAIN) -> GradedFormField:
    corners = np.asarray(corners, dtype=float)
    coef = barycentric_coefficients(corners)
    mean = bubble_mean(corners)
    scale = 2.0**15

    def lams(x, y):
        return [a + b * x + c * y for a, b, c in coef]

    def f0(x, y):
        l0, l1, l2 = lams(x, y)
        return scale * (l0 * l1 * l2) ** 3

    def grad0(x, y):
        l0, l1, l2 = lams(x, y)
        prod = l0 * l1 * l2
        outer = 3.0 * scale * prod**2
        dx = l1 * l2 * coef[0, 1] + l0 * l2 * coef[1, 1] + l0 * l1 * coef[2, 1]
        dy = l1 * l2 * coef[0, 2] + l0 * l2 * coef[1, 2] + l0 * l1 * coef[2, 2]
        return outer * dx, outer * dy

    def f1(x, y):
        v = f0(x, y)
        return v, v

    def jac1(x, y):
        gx, gy = grad0(x, y)
        return gx, gy, gx, gy

    def f2(x, y):
        return f0(x, y) - mean

    return GradedFormField(f0, f1, f2, grad0, jac1, grad0, name="triangle")


def builtin_case(name: str) -> ManufacturedCase:
    """Manufactured solution and mesh fixture by name: ``square`` or ``triangle``."""
    if name == "square":
        exact = square_solution()
    elif name == "triangle":
        exact = triangle_solution()
    else:
        raise UnknownCase(f"unknown case {name!r}; expected 'square' or 'triangle'")
    return ManufacturedCase(name, load_fixture(name), exact, continuous_dirac(exact))
