import math
import pathlib

import pytest

import femscript

CORPUS = pathlib.Path(__file__).resolve().parent.parent / "corpus"


def test_square_mesh():
    th = femscript.Mesh.square(10, 10)
    assert th.nv == 121
    assert th.nt == 200
    assert th.labels == [1, 2, 3, 4]
    assert th.area == pytest.approx(1.0, abs=1e-14)
    assert len(th.triangles()) == th.nt


def test_circle_mesh_area():
    disk = femscript.circle_mesh(64)
    assert disk.area == pytest.approx(math.pi, rel=0.01)


def test_script_values():
    interp = femscript.run("int s=0; for (int i=1;i<=10;i++) s+=i; cout << s << endl;")
    assert interp.number("s") == 55
    assert interp.output == "55\n"
    assert interp.number("missing") is None


def test_poisson_script_matches_reference():
    interp = femscript.Interpreter()
    assert interp.run_file(CORPUS / "varf_poisson.edp") == 0
    assert max(interp.array("uh")) == pytest.approx(0.0737, abs=0.002)
    assert interp.mesh("Th").nv == 121


def test_errors_are_python_exceptions():
    with pytest.raises(femscript.ParseError):
        femscript.run("for(;;) x++;")
    with pytest.raises(femscript.ScriptError):
        femscript.run("real z = nothing + 1;")
    with pytest.raises(femscript.Error):
        femscript.Mesh.load("/nonexistent/file.msh")


def test_studies():
    rows = femscript.poisson_study(2)
    assert [r["N"] for r in rows] == [16, 32]
    assert rows[0]["error"] == pytest.approx(0.0047854, rel=0.05)
    assert rows[1]["rate_space"] == pytest.approx(1.9842, abs=0.05)
    heat = femscript.heat_study(theta=1.0, nref=2)
    assert heat[1]["rate_time"] == pytest.approx(1.0, abs=0.05)
    assert femscript.convergence_rates([4e-3, 1e-3], [0.2, 0.1]) == pytest.approx([2.0])
