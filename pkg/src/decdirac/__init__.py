"""Discrete exterior calculus Hodge-Dirac solver on well-centered 2D triangulations."""
from .cochain import GradedCochain, dec_d, dec_delta, dec_dirac, inner
from .dual import build_dual, hodge_stars
from .mesh import build_complex, load_fixture, load_mesh, regular_refine
from .solver import solve_dirac

__all__ = [
    "GradedCochain",
    "build_complex",
    "build_dual",
    "dec_d",
    "dec_delta",
    "dec_dirac",
    "hodge_stars",
    "inner",
    "load_fixture",
    "load_mesh",
    "regular_refine",
    "solve_dirac",
]
