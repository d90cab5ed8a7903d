"""Constrained DEC Hodge-Dirac solve and discretization errors.

The unknown ``u`` lives on interior vertices, interior edges and all
triangles.  It solves

    <d u, v> + <u, d v> = <rhs, v>   for all constrained v,

with the zero-sum condition on the triangle block enforced by one Lagrange
multiplier.  The multiplier row pairs with the cochain of a constant
2-form, which is exactly the harmonic part removed from the problem.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .cochain import ConstraintSpace, GradedCochain, dec_dirac, norms, remove_form_mean
from .dual import DualComplex, HodgeStars
from .errors import DimensionMismatch, SingularSystem, SolverFailure, TopologyError
from .fields import GradedFormField, derham_map
from .mesh import SimplicialComplex
from .quadrature import QuadratureRule

RESIDUAL_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class DiracSystem:
    matrix: sp.csr_matrix  # bordered, symmetric
    rhs: np.ndarray
    dofs: np.ndarray  # constrained dof -> position in the flat graded vector
    shape: tuple[int, int, int]
    stars: HodgeStars
    source: GradedCochain

    @property
    def n_dofs(self) -> int:
        return len(self.dofs)


@dataclass(frozen=True)
class SolveReport:
    residual_norm: float
    dirac_residual: float
    dof_count: int
    nnz_factor: int


def graded_coboundary(c: SimplicialComplex) -> sp.csr_matrix:
    """The block operator ``(u0, u1, u2) -> (0, d0 u0, d1 u1)`` on flat vectors."""
    nv, ne, nt = c.shape
    return sp.bmat(
        [
            [sp.csr_matrix((nv, nv)), None, None],
            [c.coboundary0, sp.csr_matrix((ne, ne)), None],
            [None, c.coboundary1, sp.csr_matrix((nt, nt))],
        ],
        format="csr",
        dtype=float,
    )


def dirac_form_matrix(stars: HodgeStars) -> sp.csr_matrix:
    """Matrix of ``(u, v) -> <d u, v> + <u, d v>`` on flat graded vectors."""
    k = (stars.block() @ graded_coboundary(stars.complex)).tocsr()
    # k and k.T have disjoint sparsity, so the sum is exactly symmetric
    return (k + k.T).tocsr()


def constrained_dofs(c: SimplicialComplex, cs: ConstraintSpace) -> np.ndarray:
    nv, ne, _ = c.shape
    return np.concatenate([cs.interior_vertex_ids, nv + cs.interior_edge_ids, nv + ne + cs.triangle_ids])


def assemble(c: SimplicialComplex, dual: DualComplex, stars: HodgeStars, rhs: GradedCochain, cs: ConstraintSpace) -> DiracSystem:
    """Bordered symmetric system for ``D u = rhs`` tested on constrained cochains."""
    if rhs.shape != c.shape:
        raise DimensionMismatch(f"rhs shape {rhs.shape} does not match complex {c.shape}")
    if c.euler_characteristic != 1:
        raise TopologyError(f"Euler characteristic {c.euler_characteristic} != 1")
    if dual.complex is not c or stars.complex is not c:
        raise DimensionMismatch("dual/stars were built for a different complex")
    dofs = constrained_dofs(c, cs)
    a = dirac_form_matrix(stars)[dofs][:, dofs]
    nt = c.n_triangles
    n = len(dofs)
    border = sp.csr_matrix(
        (np.ones(nt), (np.arange(n - nt, n), np.zeros(nt, dtype=int))), shape=(n, 1)
    )
    matrix = sp.bmat([[a, border], [border.T, None]], format="csr")
    b = np.append((stars.block() @ rhs.flat())[dofs], 0.0)
    return DiracSystem(matrix=matrix, rhs=b, dofs=dofs, shape=c.shape, stars=stars, source=rhs)


def constrained_residual(u: GradedCochain, rhs: GradedCochain, stars: HodgeStars, cs: ConstraintSpace) -> float:
    """Norm of the part of ``D u - rhs`` seen by constrained test cochains.

    The grade-2 residual is taken modulo constant 2-forms, which carry the
    Lagrange multiplier.
    """
    r = remove_form_mean(dec_dirac(u, stars) - rhs, stars.complex)
    keep = ConstraintSpace(cs.interior_vertex_ids, cs.interior_edge_ids, cs.triangle_ids, mean_zero=False)
    r0 = np.zeros_like(r.u0)
    r0[keep.interior_vertex_ids] = r.u0[keep.interior_vertex_ids]
    r1 = np.zeros_like(r.u1)
    r1[keep.interior_edge_ids] = r.u1[keep.interior_edge_ids]
    return norms(GradedCochain(r0, r1, r.u2), stars)[0]


def solve(sys_: DiracSystem, tol: float = RESIDUAL_TOL) -> tuple[GradedCochain, SolveReport]:
    """Sparse LU solve of the bordered system.

    Raises
    ------
    SingularSystem
        The factorization hit an exactly singular pivot.
    SolverFailure
        Relative residual above ``tol`` after one refinement step.
    """
    a = sys_.matrix.tocsc()
    b = sys_.rhs
    bnorm = float(np.linalg.norm(b))
    if bnorm == 0.0:
        x = np.zeros_like(b)
        nnz = 0
    else:
        try:
            lu = spla.splu(a)
        except RuntimeError as exc:
            raise SingularSystem(str(exc)) from exc
        x = lu.solve(b)
        if not np.all(np.isfinite(x)):
            raise SingularSystem("non-finite solution")
        r = b - a @ x
        if np.linalg.norm(r) > tol * bnorm:
            x += lu.solve(r)
        nnz = lu.L.nnz + lu.U.nnz
    res = float(np.linalg.norm(b - a @ x)) / bnorm if bnorm else 0.0
    if res > tol:
        raise SolverFailure(f"relative residual {res:.3e} exceeds {tol:.1e}")

    flat = np.zeros(sum(sys_.shape))
    flat[sys_.dofs] = x[:-1]
    u = GradedCochain.from_flat(flat, sys_.shape)
    # the assembled unknowns already satisfy the sum constraint up to roundoff;
    # remove the remainder so the returned cochain is exactly admissible
    u2 = u.u2 - math.fsum(u.u2) / len(u.u2)
    u = GradedCochain(u.u0, u.u1, u2)
    cs = _constraints_from_dofs(sys_)
    report = SolveReport(
        residual_norm=res,
        dirac_residual=constrained_residual(u, sys_.source, sys_.stars, cs),
        dof_count=len(sys_.dofs),
        nnz_factor=nnz,
    )
    return u, report


def _constraints_from_dofs(sys_: DiracSystem) -> ConstraintSpace:
    nv, ne, nt = sys_.shape
    d = sys_.dofs
    return ConstraintSpace(
        interior_vertex_ids=d[d < nv],
        interior_edge_ids=d[(d >= nv) & (d < nv + ne)] - nv,
        triangle_ids=d[d >= nv + ne] - nv - ne,
    )


def solve_dirac(c: SimplicialComplex, dual: DualComplex, stars: HodgeStars, rhs: GradedCochain):
    cs = ConstraintSpace.of(c)
    return solve(assemble(c, dual, stars, rhs, cs))


def discrete_rhs(f: GradedFormField, c: SimplicialComplex, q: QuadratureRule) -> GradedCochain:
    """``Pi f`` with the constant 2-form part removed."""
    return remove_form_mean(derham_map(f, c, q), c)


def exact_cochain(u_exact: GradedFormField, c: SimplicialComplex, q: QuadratureRule) -> GradedCochain:
    """``Pi u`` with the 2-form mean removed as in the continuous problem."""
    return remove_form_mean(derham_map(u_exact, c, q), c)


def error_norms(u_exact: GradedFormField, u_h: GradedCochain, c: SimplicialComplex, stars: HodgeStars, q: QuadratureRule) -> tuple[float, float]:
    """``(|e|, |e| + |d e|)`` for ``e = Pi u_exact - u_h``."""
    e = exact_cochain(u_exact, c, q) - u_h
    return norms(e, stars)


def error_cochain(u_exact, u_h, c, q) -> GradedCochain:
    return exact_cochain(u_exact, c, q) - u_h


__all__ = [
    "DiracSystem",
    "SolveReport",
    "assemble",
    "solve",
    "solve_dirac",
    "error_norms",
    "discrete_rhs",
    "exact_cochain",
    "dirac_form_matrix",
    "graded_coboundary",
    "constrained_residual",
    "constrained_dofs",
    "error_cochain",
]
