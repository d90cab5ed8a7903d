"""Manufactured-solution convergence runs, mesh checks and plots."""
from __future__ import annotations

import csv
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .cochain import ConstraintSpace, norms
from .dual import build_dual, dual_table, hodge_stars
from .errors import NotWellCentered, SolverFailure, UnknownCase
from .fields import builtin_case, derham_map, j_map
from .mesh import SimplicialComplex, load_fixture, load_mesh, mesh_quality, perturb_interior, regular_refine
from .quadrature import quadrature_rule
from .solver import assemble, discrete_rhs, error_norms, solve

log = logging.getLogger(__name__)

TESTS = ("square", "triangle", "perturbed")
DEFAULT_LEVELS = {"square": 4, "triangle": 4, "perturbed": 5}
CSV_HEADER = ("level", "h", "dofs", "err_l2", "err_hlambda", "eoc_l2", "eoc_hlambda", "pij_u")
PARTITION_TOL = 1e-12


@dataclass(frozen=True)
class ConvergenceRecord:
    level: int
    h: float
    dofs: int
    err_l2: float
    err_hlambda: float
    eoc_l2: Optional[float] = None
    eoc_hlambda: Optional[float] = None
    pij_u: Optional[float] = None

    def row(self) -> list[str]:
        def fmt(v):
            return "" if v is None else repr(float(v))

        return [str(self.level), fmt(self.h), str(self.dofs), fmt(self.err_l2), fmt(self.err_hlambda),
                fmt(self.eoc_l2), fmt(self.eoc_hlambda), fmt(self.pij_u)]


@dataclass(frozen=True)
class RunConfig:
    test: str
    levels: Optional[int] = None  # number of refinements; None picks the per-test default
    quad_degree: int = 10
    seed: int = 1
    amplitude: float = 0.05
    out: Optional[Path] = None
    plot: Optional[Path] = None
    dump_matrix: Optional[Path] = None
    dump_dual: Optional[Path] = None
    dump_cochain: Optional[Path] = None
    pij: bool = True

    def resolved_levels(self) -> int:
        return DEFAULT_LEVELS[self.test] if self.levels is None else self.levels

    def run(self) -> list[ConvergenceRecord]:
        records = run_test(
            self.test,
            self.resolved_levels(),
            quad_degree=self.quad_degree,
            seed=self.seed,
            amplitude=self.amplitude,
            out=self.out,
            pij=self.pij,
            dump_matrix=self.dump_matrix,
            dump_dual=self.dump_dual,
            dump_cochain=self.dump_cochain,
        )
        if self.plot is not None:
            emit_plot(records, self.plot, title=self.test)
        return records


def eoc(err_coarse: float, err_fine: float, h_coarse: float, h_fine: float) -> float:
    return math.log(err_coarse / err_fine) / math.log(h_coarse / h_fine)


def coarse_mesh(name: str, seed: int = 1, amplitude: float = 0.05) -> SimplicialComplex:
    if name not in TESTS:
        raise UnknownCase(f"unknown test {name!r}; expected one of {', '.join(TESTS)}")
    if name == "perturbed":
        return perturb_interior(load_fixture("triangle"), amplitude, seed)
    return load_fixture(name)


def run_test(
    name: str,
    levels: int,
    quad_degree: int = 10,
    seed: int = 1,
    amplitude: float = 0.05,
    out=None,
    *,
    pij: bool = True,
    dump_matrix=None,
    dump_dual=None,
    dump_cochain=None,
) -> list[ConvergenceRecord]:
    """Solve on the coarse mesh and ``levels`` regular refinements of it.

    The dump files describe the finest level; ``dump_cochain`` gets the
    discrete solution.
    """
    if levels < 2:
        raise ValueError(f"levels must be >= 2, got {levels}")
    c = coarse_mesh(name, seed, amplitude)
    case = builtin_case("triangle" if name == "perturbed" else name)
    q = quadrature_rule(quad_degree)

    records: list[ConvergenceRecord] = []
    for level in range(levels + 1):
        t0 = time.perf_counter()
        if level:
            c = regular_refine(c)
        try:
            dual = build_dual(c)
        except NotWellCentered as exc:
            raise NotWellCentered(f"level {level}: {exc}") from exc
        stars = hodge_stars(c, dual)
        system = assemble(c, dual, stars, discrete_rhs(case.rhs, c, q), ConstraintSpace.of(c))
        try:
            u, report = solve(system)
        except SolverFailure as exc:
            raise type(exc)(f"level {level}: {exc}") from exc
        e_l2, e_hl = error_norms(case.exact, u, c, stars, q)
        gap = norms(derham_map(case.exact, c, q) - j_map(case.exact, dual, q), stars)[0] if pij else None
        h = mesh_quality(c).h_max
        prev = records[-1] if records else None
        records.append(
            ConvergenceRecord(
                level=level,
                h=h,
                dofs=report.dof_count,
                err_l2=e_l2,
                err_hlambda=e_hl,
                eoc_l2=eoc(prev.err_l2, e_l2, prev.h, h) if prev else None,
                eoc_hlambda=eoc(prev.err_hlambda, e_hl, prev.h, h) if prev else None,
                pij_u=gap,
            )
        )
        log.info("%s level %d: F=%d dofs=%d l2=%.4e hl=%.4e residual=%.1e (%.1fs)",
                 name, level, c.n_triangles, report.dof_count, e_l2, e_hl, report.residual_norm,
                 time.perf_counter() - t0)

    if out is not None:
        write_csv(records, out)
    if dump_matrix is not None:
        write_matrix(system.matrix, dump_matrix)
    if dump_dual is not None:
        write_dual(c, dual, dump_dual)
    if dump_cochain is not None:
        write_cochain(u, dump_cochain)
    return records


def write_csv(records: Sequence[ConvergenceRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in records:
            w.writerow(r.row())


def read_csv(path) -> list[ConvergenceRecord]:
    def opt(s):
        return float(s) if s else None

    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [
        ConvergenceRecord(int(r["level"]), float(r["h"]), int(r["dofs"]), float(r["err_l2"]),
                          float(r["err_hlambda"]), opt(r["eoc_l2"]), opt(r["eoc_hlambda"]), opt(r["pij_u"]))
        for r in rows
    ]


def write_matrix(matrix, path) -> None:
    """One ``row col value`` triple per stored entry, row-major."""
    m = matrix.tocoo()
    order = np.lexsort((m.col, m.row))
    with open(path, "w") as fh:
        for i, j, v in zip(m.row[order], m.col[order], m.data[order]):
            fh.write(f"{i} {j} {float(v)!r}\n")


def write_dual(c, dual, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("kind", "index", "primal_measure", "dual_measure", "ratio"))
        for kind, idx, p, d, r in dual_table(c, dual):
            w.writerow((kind, idx, repr(float(p)), repr(float(d)), repr(float(r))))


def write_cochain(u, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("grade", "index", "value"))
        for k, part in enumerate(u.parts):
            for i, v in enumerate(part):
                w.writerow((k, i, repr(float(v))))


@dataclass
class MeshReport:
    n_vertices: int
    n_edges: int
    n_triangles: int
    euler_characteristic: int
    h_max: float
    h_min: float
    min_angle_deg: float
    max_angle_deg: float
    well_centered: bool
    dual_area_error: Optional[float] = None  # |sum of dual cells - domain area| / area
    problems: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems

    def lines(self) -> list[str]:
        out = [
            f"V={self.n_vertices} E={self.n_edges} F={self.n_triangles}",
            f"euler characteristic: {self.euler_characteristic}",
            f"h_max={self.h_max:.6g} h_min={self.h_min:.6g}",
            f"min angle: {self.min_angle_deg:.4f} deg, max angle: {self.max_angle_deg:.4f} deg",
            f"well-centered: {'yes' if self.well_centered else 'no'}",
        ]
        if self.dual_area_error is not None:
            out.append(f"dual-area partition error: {self.dual_area_error:.3e}")
        out += [f"problem: {p}" for p in self.problems]
        return out


def check_mesh(path_or_complex) -> MeshReport:
    """Validate a mesh file (or complex) for use with the solver.  Raises ParseError."""
    c = path_or_complex if isinstance(path_or_complex, SimplicialComplex) else load_mesh(path_or_complex)
    q = mesh_quality(c)
    rep = MeshReport(
        n_vertices=c.n_vertices,
        n_edges=c.n_edges,
        n_triangles=c.n_triangles,
        euler_characteristic=c.euler_characteristic,
        h_max=q.h_max,
        h_min=q.h_min,
        min_angle_deg=math.degrees(q.min_angle),
        max_angle_deg=math.degrees(q.max_angle),
        well_centered=q.well_centered,
    )
    if rep.euler_characteristic != 1:
        rep.problems.append(f"euler characteristic {rep.euler_characteristic} != 1 (not a disk)")
    if not q.well_centered:
        rep.problems.append("not well-centered: some angle is not strictly acute")
        return rep
    dual = build_dual(c)
    area = c.area()
    rep.dual_area_error = abs(math.fsum(dual.dual_vertex_area) - area) / area
    if rep.dual_area_error > PARTITION_TOL:
        rep.problems.append(f"dual cells do not partition the domain (error {rep.dual_area_error:.3e})")
    return rep


def emit_plot(records: Sequence[ConvergenceRecord], out_svg, title: str = "") -> None:
    """Log-log error plot with slope-1 and slope-2 guides; byte-stable SVG."""
    if not records:
        raise ValueError("no records to plot")
    import matplotlib

    matplotlib.use("Agg")
    from matplotlib.figure import Figure

    h = np.array([r.h for r in records])
    l2 = np.array([r.err_l2 for r in records])
    hl = np.array([r.err_hlambda for r in records])
    with matplotlib.rc_context({"svg.hashsalt": "decdirac", "svg.fonttype": "path"}):
        fig = Figure(figsize=(5.0, 4.0))
        ax = fig.add_subplot()
        ax.loglog(h, l2, "o-", label="L2")
        ax.loglog(h, hl, "s-", label="H-Lambda")
        top = max(l2[0], hl[0])
        for p, style in ((1, "k--"), (2, "k:")):
            ax.loglog(h, 1.5 * top * (h / h[0]) ** p, style, lw=0.8, label=f"slope {p}")
        ax.set_xlabel("h")
        ax.set_ylabel("error")
        if title:
            ax.set_title(title)
        ax.legend()
        ax.grid(True, which="both", lw=0.3)
        fig.savefig(out_svg, format="svg", metadata={"Date": None})
