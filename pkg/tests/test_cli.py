import json

import pytest

from ivp2Tube.__main__ import main

ZERO = {"schema_version": "1.0", "dimension": 1, "rhs": {"expr": "0"},
        "domain": {"balls": [{"center": ["0", "0"], "radius": "1"}]}, "x0": "0", "y0": ["0"]}


@pytest.fixture(autouse=True)
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("IVP2TUBE_OUT_DIR", raising=False)
    return tmp_path


def write_instance(path, document):
    path.write_text(json.dumps(document), encoding="utf-8")
    return str(path)


def stdout_lines(capsys):
    return [json.loads(line) for line in capsys.readouterr().out.splitlines() if line.strip()]


def test_solve_writes_documents_and_csv(workdir, capsys):
    instance = write_instance(workdir / "zero.json", ZERO)
    assert main(["solve", instance, "--out", str(workdir / "out"), "--grid-depth", "4"]) == 0
    summary = stdout_lines(capsys)[-1]
    assert summary["confirmed"] == 1 and summary["undecided"] == 0
    assert (summary["a"], summary["b"]) == ("-0.375", "0.375")
    document = json.loads((workdir / "out" / "zero.solve.json").read_text())
    assert document["schema_version"] == "1.0" and document["kind"] == "solve_result"
    rows = (workdir / "out" / "zero.tube-000.csv").read_text().splitlines()
    assert rows[0] == "# schema_version 1.0"
    assert rows[1] == "x,lo_1,hi_1" and len(rows) == 19


def test_solve_formats(workdir):
    instance = write_instance(workdir / "zero.json", ZERO)
    assert main(["solve", instance, "--out", "csv-only", "--grid-depth", "3", "--format", "csv"]) == 0
    assert not (workdir / "csv-only" / "zero.solve.json").exists()
    assert (workdir / "csv-only" / "zero.tube-000.csv").exists()


def test_out_dir_from_environment(workdir, monkeypatch):
    monkeypatch.setenv("IVP2TUBE_OUT_DIR", str(workdir / "env-out"))
    instance = write_instance(workdir / "zero.json", ZERO)
    assert main(["solve", instance, "--grid-depth", "3"]) == 0
    assert (workdir / "env-out" / "zero.solve.json").exists()


def test_malformed_expression_exits_3(workdir, capsys):
    instance = write_instance(workdir / "bad.json", dict(ZERO, rhs={"expr": "y1 + * 2"}))
    assert main(["solve", instance]) == 3
    assert "position 5" in capsys.readouterr().err


def test_initial_point_outside_exits_2(workdir):
    instance = write_instance(workdir / "outside.json", dict(ZERO, x0="1"))
    assert main(["solve", instance, "--grid-depth", "3"]) == 2


def test_bad_flags_exit_3(workdir):
    instance = write_instance(workdir / "zero.json", ZERO)
    assert main(["solve", instance, "--precision", "8"]) == 3
    assert main(["solve", str(workdir / "missing.json")]) == 3
    with pytest.raises(SystemExit) as info:
        main(["solve", instance, "--grid-depth", "deep"])
    assert info.value.code == 3
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 3


def test_extend_streams_round_records(workdir, capsys):
    instance = write_instance(workdir / "zero.json", dict(ZERO, domain={"auto_growing": True}))
    assert main(["extend", instance, "--rounds", "3", "--grid-depth", "3", "--out", "ext"]) == 0
    lines = stdout_lines(capsys)
    assert [line["b"] for line in lines[:3]] == ["0.375", "0.75", "1.125"]
    assert lines[-1]["left"] == "growing"
    assert (workdir / "ext" / "zero.extend.csv").read_text().startswith("# schema_version 1.0\n")
    assert json.loads((workdir / "ext" / "zero.extend.json").read_text())["kind"] == "extension"


def test_extend_needs_a_round(workdir):
    instance = write_instance(workdir / "zero.json", ZERO)
    assert main(["extend", instance, "--rounds", "0"]) == 3


def test_gadget_instances(workdir):
    out = workdir / "gadget.json"
    assert main(["gadget", "--streams", "0;2,1", "--cell-budget", "6", "--out", str(out)]) == 0
    document = json.loads(out.read_text())
    assert document["schema_version"] == "1.0"
    assert document["rhs"] == {"gadget": {"streams": [[0], [2, 1]], "cell_budget": 6}}
    assert (document["x0"], document["y0"]) == ("0", ["0"])
    assert len(document["domain"]["balls"]) == 513
    assert main(["gadget", "--streams", "0,1", "--out", str(workdir / "bad.json")]) == 3
    assert main(["gadget", "--streams", "", "--out", str(workdir / "empty.json")]) == 0


def test_decode_round_trip(workdir, capsys):
    instance = str(workdir / "gadget.json")
    assert main(["gadget", "--streams", "0;2,1", "--cell-budget", "6", "--out", instance]) == 0
    assert main(["solve", instance, "--grid-depth", "10", "--refine-rounds", "6", "--max-bisections", "0",
                 "--out", "res"]) == 0
    capsys.readouterr()
    code = main(["decode", str(workdir / "res" / "gadget.solve.json"), instance])
    report = stdout_lines(capsys)[-1]
    assert report["kind"] == "decode_report"
    assert code == 0
    assert report["bits"]["0"]["certified"] and report["bits"]["0"]["bit"] == 1
    assert report["bits"]["1"]["certified"] and report["bits"]["1"]["bit"] == 0


def test_decode_from_an_extension(workdir, capsys):
    instance = write_instance(workdir / "single.json", dict(ZERO, rhs={"gadget": {"stream": [0]}},
                                                            domain={"auto_growing": True}))
    assert main(["extend", instance, "--rounds", "40", "--grid-depth", "5", "--refine-rounds", "6",
                 "--max-bisections", "0", "--format", "structured", "--out", "ext"]) == 0
    capsys.readouterr()
    assert main(["decode", str(workdir / "ext" / "single.extend.json"), instance]) == 0
    bit = stdout_lines(capsys)[-1]["bits"]["0"]
    assert bit["certified"] and bit["bit"] == 1 and bit["sample_point"] == "2"


def test_decode_rejects_other_documents(workdir):
    instance = write_instance(workdir / "single.json", dict(ZERO, rhs={"gadget": {"stream": [0]}}))
    write_instance(workdir / "report.json", {"schema_version": "1.0", "kind": "decode_report", "bits": {}})
    assert main(["decode", str(workdir / "report.json"), instance]) == 3


def test_decode_missing_result(workdir):
    instance = write_instance(workdir / "zero.json", ZERO)
    assert main(["decode", str(workdir / "nothing.json"), instance]) == 3


def test_verify(workdir, capsys):
    assert main(["verify", "--suite", "interval", "--samples", "300"]) == 0
    report = stdout_lines(capsys)[-1]
    assert report["suite"] == "interval" and report["passed"]
    assert main(["verify", "--suite", "speed"]) == 3
