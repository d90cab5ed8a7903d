import math

import pytest

from decdirac import cli
from decdirac.convergence import (
    CSV_HEADER,
    ConvergenceRecord,
    RunConfig,
    check_mesh,
    emit_plot,
    eoc,
    read_csv,
    run_test,
)
from decdirac.errors import ParseError, UnknownCase
from decdirac.mesh import build_complex, save_mesh


@pytest.fixture(scope="module")
def triangle_records(tmp_path_factory):
    out = tmp_path_factory.mktemp("run") / "tri.csv"
    return run_test("triangle", 2, out=out), out


def test_csv_schema(triangle_records):
    records, out = triangle_records
    lines = out.read_text().splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert len(lines) == 4
    assert lines[1].split(",")[5:7] == ["", ""]
    back = read_csv(out)
    assert back == records


def test_records_invariants(triangle_records):
    records, _ = triangle_records
    for a, b in zip(records, records[1:]):
        assert b.h == pytest.approx(a.h / 2, rel=1e-14)
        assert b.eoc_l2 == pytest.approx(math.log2(a.err_l2 / b.err_l2), rel=1e-12)
    assert all(r.err_l2 >= 0 and r.err_hlambda >= r.err_l2 for r in records)
    assert records[-1].eoc_l2 > 1.8


def test_eoc_definition():
    assert eoc(4.0, 1.0, 0.2, 0.1) == pytest.approx(2.0)
    assert eoc(1.0, 1.0, 0.5, 0.25) == 0.0


def test_deterministic_csv(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run_test("perturbed", 2, seed=3, amplitude=0.05, out=a)
    run_test("perturbed", 2, seed=3, amplitude=0.05, out=b)
    assert a.read_bytes() == b.read_bytes()


def test_levels_validated():
    with pytest.raises(ValueError):
        run_test("square", 1)
    with pytest.raises(UnknownCase):
        run_test("circle", 2)


def test_run_config_defaults():
    assert RunConfig("perturbed").resolved_levels() == 5
    assert RunConfig("square").resolved_levels() == 4
    assert RunConfig("triangle", levels=2).resolved_levels() == 2


def test_plot_deterministic(tmp_path, triangle_records):
    records, _ = triangle_records
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    emit_plot(records, a)
    emit_plot(records, b)
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().lstrip().startswith("<?xml")


def test_plot_two_records(tmp_path):
    recs = [ConvergenceRecord(0, 0.2, 10, 1.0, 2.0), ConvergenceRecord(1, 0.1, 40, 0.25, 0.5, 2.0, 2.0)]
    emit_plot(recs, tmp_path / "p.svg")
    assert (tmp_path / "p.svg").stat().st_size > 0


def test_plot_empty(tmp_path):
    with pytest.raises(ValueError):
        emit_plot([], tmp_path / "x.svg")


def test_check_mesh_fixture(tri):
    rep = check_mesh(tri)
    assert rep.ok and rep.well_centered and rep.euler_characteristic == 1
    assert rep.dual_area_error <= 1e-12


def test_check_mesh_perturbed(perturbed):
    rep = check_mesh(perturbed)
    assert rep.ok and rep.dual_area_error <= 1e-12


def right_grid(path):
    pts = [[i / 2, j / 2] for j in range(3) for i in range(3)]
    tris = []
    for j in range(2):
        for i in range(2):
            a = 3 * j + i
            tris += [[a, a + 1, a + 4], [a, a + 4, a + 3]]
    save_mesh(build_complex(pts, tris), path)


def test_cli_check_mesh(tmp_path, capsys, tri):
    p = tmp_path / "grid.mesh"
    right_grid(p)
    assert cli.main(["check-mesh", str(p)]) == cli.EXIT_INVALID
    assert "well-centered: no" in capsys.readouterr().out
    save_mesh(tri, tmp_path / "t.mesh")
    assert cli.main(["check-mesh", str(tmp_path / "t.mesh")]) == cli.EXIT_OK


def test_cli_parse_error(tmp_path, capsys):
    p = tmp_path / "bad.mesh"
    p.write_text("decmesh 2\nvertices 1\n0 0 0\n")
    assert cli.main(["check-mesh", str(p)]) == cli.EXIT_INVALID
    assert "line 3" in capsys.readouterr().err
    with pytest.raises(ParseError):
        check_mesh(p)


def test_cli_usage_errors(tmp_path):
    with pytest.raises(SystemExit) as info:
        cli.main(["run", "--test", "nope", "--out", str(tmp_path / "x")])
    assert info.value.code == cli.EXIT_USAGE
    with pytest.raises(SystemExit) as info:
        cli.main([])
    assert info.value.code == cli.EXIT_USAGE
    assert cli.main(["run", "--test", "square", "--levels", "1", "--out", str(tmp_path / "x")]) == cli.EXIT_USAGE


def test_cli_validation_failure(tmp_path):
    rc = cli.main(["run", "--test", "perturbed", "--levels", "2", "--amplitude", "0.9", "--out", str(tmp_path / "x")])
    assert rc == cli.EXIT_INVALID


def test_cli_solver_failure(tmp_path, monkeypatch):
    import decdirac.convergence as conv
    from decdirac.errors import SolverFailure

    def boom(sys_):
        raise SolverFailure("forced")

    monkeypatch.setattr(conv, "solve", boom)
    assert cli.main(["run", "--test", "triangle", "--levels", "2", "--out", str(tmp_path / "x")]) == cli.EXIT_SOLVER


def test_cli_run_with_dumps(tmp_path, capsys):
    out = tmp_path / "r.csv"
    args = [
        "run", "--test", "triangle", "--levels", "2", "--out", str(out),
        "--plot", str(tmp_path / "p.svg"),
        "--dump-matrix", str(tmp_path / "m.txt"),
        "--dump-dual", str(tmp_path / "d.csv"),
        "--dump-cochain", str(tmp_path / "u.csv"),
    ]
    assert cli.main(args) == cli.EXIT_OK
    assert capsys.readouterr().out.splitlines()[0] == ",".join(CSV_HEADER)
    rows = [line.split() for line in (tmp_path / "m.txt").read_text().splitlines()]
    entries = {(int(i), int(j)): float(v) for i, j, v in rows}
    assert all(entries[(j, i)] == v for (i, j), v in entries.items())
    assert (tmp_path / "d.csv").read_text().startswith("kind,index,primal_measure,dual_measure,ratio")
    assert (tmp_path / "u.csv").read_text().startswith("grade,index,value")
    assert (tmp_path / "p.svg").exists()
