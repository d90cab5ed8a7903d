import math

import numpy as np
import pytest
import scipy.sparse as sp

from conftest import with_stars
from decdirac.cochain import ConstraintSpace, GradedCochain, dec_d, dec_dirac, inner, project_constraints
from decdirac.errors import DimensionMismatch, SingularSystem, SolverFailure, TopologyError
from decdirac.fields import builtin_case, derham_map
from decdirac.mesh import build_complex, refine_n
from decdirac.quadrature import quadrature_rule
from decdirac.solver import (
    assemble,
    constrained_dofs,
    discrete_rhs,
    error_norms,
    exact_cochain,
    solve,
    solve_dirac,
)

Q = quadrature_rule(10)


def random_constrained(c, rng):
    return project_constraints(GradedCochain.random(c, rng), ConstraintSpace.of(c))


def system_for(c, rhs=None):
    c, d, s = with_stars(c)
    rhs = GradedCochain.zeros(c) if rhs is None else rhs
    return c, d, s, assemble(c, d, s, rhs, ConstraintSpace.of(c))


def test_matrix_exactly_symmetric(square):
    *_, sys_ = system_for(square)
    a = sys_.matrix
    assert (a != a.T).nnz == 0
    n = a.shape[0]
    assert a[n - 1, n - 1] == 0


def test_matrix_matches_bilinear_form(square, rng):
    c, d, s, sys_ = system_for(square)
    a = sys_.matrix[:-1, :-1]
    dofs = constrained_dofs(c, ConstraintSpace.of(c))
    for _ in range(10):
        u, v = random_constrained(c, rng), random_constrained(c, rng)
        lhs = v.flat()[dofs] @ (a @ u.flat()[dofs])
        rhs = inner(dec_d(u, c), v, s) + inner(u, dec_d(v, c), s)
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


def test_rhs_dense_oracle(tri, rng):
    c, d, s = with_stars(tri)
    f = GradedCochain.random(c, rng)
    sys_ = assemble(c, d, s, f, ConstraintSpace.of(c))
    dofs = sys_.dofs
    m = np.diag(np.concatenate(s.diagonals))
    for _ in range(5):
        v = random_constrained(c, rng)
        assert sys_.rhs[:-1] @ v.flat()[dofs] == pytest.approx(v.flat() @ m @ f.flat(), rel=1e-12)
    assert sys_.rhs[-1] == 0.0


def test_zero_rhs(square):
    *_, sys_ = system_for(square)
    u, rep = solve(sys_)
    assert u.max_abs() == 0.0 and rep.residual_norm == 0.0


def test_round_trip(any_fixture, rng):
    c, d, s = with_stars(refine_n(any_fixture, 1))
    uh = random_constrained(c, rng)
    u, rep = solve_dirac(c, d, s, dec_dirac(uh, s))
    assert (u - uh).max_abs() <= 1e-10 * uh.max_abs()
    assert rep.residual_norm <= 1e-10


def test_solution_admissible(square, rng):
    c, d, s = with_stars(square)
    u, _ = solve_dirac(c, d, s, GradedCochain.random(c, rng))
    assert not u.u0[c.boundary_vertices].any()
    assert not u.u1[c.boundary_edges].any()
    assert abs(math.fsum(u.u2)) <= 1e-12 * max(u.max_abs(), 1.0)


def test_repeatable(square, rng):
    c, d, s = with_stars(square)
    f = GradedCochain.random(c, rng)
    a, _ = solve_dirac(c, d, s, f)
    b, _ = solve_dirac(c, d, s, f)
    np.testing.assert_array_equal(a.flat(), b.flat())


def test_dirac_residual_level3():
    case = builtin_case("square")
    c, d, s = with_stars(refine_n(case.mesh, 3))
    rhs = discrete_rhs(case.rhs, c, Q)
    _, rep = solve_dirac(c, d, s, rhs)
    scale = math.sqrt(inner(rhs, rhs, s))
    assert rep.dirac_residual <= 1e-9 * scale
    assert rep.residual_norm <= 1e-10


def test_error_of_exact_cochain_vanishes(tri):
    case = builtin_case("triangle")
    c, d, s = with_stars(tri)
    pu = project_constraints(exact_cochain(case.exact, c, Q), ConstraintSpace.of(c))
    l2, hl = error_norms(case.exact, pu, c, s, Q)
    assert l2 < 1e-12 and hl < 1e-12


def test_topology_error():
    # annulus-like strip: a closed ring of triangles has Euler characteristic 0
    n = 8
    ang = 2 * np.pi * np.arange(n) / n
    pts = np.vstack([np.c_[np.cos(ang), np.sin(ang)], 2 * np.c_[np.cos(ang + np.pi / n), np.sin(ang + np.pi / n)]])
    tris = [[i, (i + 1) % n, n + i] for i in range(n)] + [[(i + 1) % n, n + (i + 1) % n, n + i] for i in range(n)]
    c = build_complex(pts, tris)
    assert c.euler_characteristic == 0
    with pytest.raises(TopologyError):
        system_for(c)


def test_dimension_mismatch(square, tri):
    c, d, s = with_stars(square)
    with pytest.raises(DimensionMismatch):
        assemble(c, d, s, GradedCochain.zeros(tri), ConstraintSpace.of(c))


def test_singular_system_reported(square):
    *_, sys_ = system_for(square)
    n = sys_.matrix.shape[0]
    broken = sp.csr_matrix((n, n))
    bad = type(sys_)(broken, np.ones(n), sys_.dofs, sys_.shape, sys_.stars, sys_.source)
    with pytest.raises(SingularSystem):
        solve(bad)


def test_unmet_tolerance(square, rng):
    c, d, s = with_stars(square)
    sys_ = assemble(c, d, s, GradedCochain.random(c, rng), ConstraintSpace.of(c))
    with pytest.raises(SolverFailure):
        solve(sys_, tol=0.0)


def test_error_norms_first_levels(square):
    case = builtin_case("square")
    errs = []
    for k in range(3):
        c, d, s = with_stars(refine_n(square, k))
        u, _ = solve_dirac(c, d, s, discrete_rhs(case.rhs, c, Q))
        errs.append(error_norms(case.exact, u, c, s, Q))
    l2 = [e[0] for e in errs]
    assert l2[0] > l2[1] > l2[2]
    assert all(hl >= l2_ for l2_, hl in errs)


def test_rhs_grade2_zero_sum(square):
    case = builtin_case("square")
    f = discrete_rhs(case.rhs, square, Q)
    assert abs(math.fsum(f.u2)) < 1e-12
    # the Pi of the exact 2-form part already integrates to ~0 over the square
    assert abs(math.fsum(derham_map(case.exact, square, Q).u2)) < 1e-12
