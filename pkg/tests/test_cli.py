import csv
import io
import json
import subprocess
import sys

import pytest

from fracdim.cli import PLOT_COLUMNS, main, read_config
from fracdim.generators import TRIANGLE_DIMENSION, primitives, sierpinski_triangle
from fracdim.imagecore import BinaryImage, read_image, write_image


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("FRACDIM_CONFIG", raising=False)
    return tmp_path


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_generate_triangle(workdir, capsys):
    code, _, _ = run(capsys, "generate", "sierpinski-triangle", "--order", "3", "--out", "t.pbm")
    assert code == 0
    img = read_image("t.pbm")
    assert img.shape == (8, 8) and img.object_count == 27


def test_generate_other_kinds(workdir, capsys):
    assert run(capsys, "generate", "sierpinski-carpet", "--order", "2", "--out", "c.pbm", "--ascii")[0] == 0
    assert read_image("c.pbm").object_count == 64
    assert run(capsys, "generate", "salt-pepper", "--width", "20", "--height", "10", "--density", "1", "--out", "n.pbm")[0] == 0
    assert read_image("n.pbm").object_count == 200
    assert run(capsys, "generate", "ring", "--size", "5", "--out", "r.pbm")[0] == 0
    assert read_image("r.pbm") == primitives("ring", 5)


def test_compute_hfd_json(workdir, capsys):
    write_image("tri9.pbm", sierpinski_triangle(9))
    code, out, _ = run(capsys, "compute", "tri9.pbm", "--method", "hfd")
    assert code == 0
    d = json.loads(out)
    assert d["schema_version"] == 1 and d["method"] == "hfd"
    assert d["value"] == pytest.approx(1.585, abs=1e-3)
    assert [r["count"] for r in d["scale_table"]] == [3 ** (9 - s) for s in range(10)]


def test_compute_blank_is_degenerate(workdir, capsys):
    write_image("blank.pbm", BinaryImage([[0, 0], [0, 0]]))
    code, out, err = run(capsys, "compute", "blank.pbm", "--method", "hfd")
    assert code == 2 and out == ""
    assert "empty object" in err


def test_compute_input_errors(workdir, capsys):
    assert run(capsys, "compute", "missing.pbm")[0] == 1
    (workdir / "bad.pbm").write_bytes(b"P1\n3 3\n1 0")
    code, _, err = run(capsys, "compute", "bad.pbm")
    assert code == 1 and "offset" in err


def test_usage_errors(workdir, capsys):
    assert run(capsys, "compute", "x.pbm", "--frobnicate")[0] == 64
    assert run(capsys, "nonsense")[0] == 64
    assert run(capsys, "compute", "x.pbm", "--c", "2", "--calibrated")[0] == 64
    assert run(capsys)[0] == 64


def test_compute_deterministic_with_seed(workdir, capsys):
    write_image("t.pbm", sierpinski_triangle(7))
    args = ("compute", "t.pbm", "--method", "mhfd", "--seed", "7", "--trials", "3")
    first = run(capsys, *args)
    second = run(capsys, *args)
    assert first == second and first[0] == 0
    assert json.loads(first[1])["seed"] == 7


def test_compute_csv_format(workdir, capsys):
    write_image("t.pbm", sierpinski_triangle(6))
    code, out, _ = run(capsys, "compute", "t.pbm", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 1
    assert float(rows[0]["value"]) == pytest.approx(TRIANGLE_DIMENSION)


def test_plot_data_triangle(workdir, capsys):
    write_image("t4.pbm", sierpinski_triangle(4))
    code, out, _ = run(capsys, "plot-data", "t4.pbm")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == ",".join(PLOT_COLUMNS)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [int(r["count"]) for r in rows] == [81, 27, 9, 3, 1]
    assert all(r["model_fit_y"] for r in rows)


def test_plot_data_saturated_mhfd(workdir, capsys):
    write_image("ones.pbm", primitives("filled_rect", 8))
    code, out, err = run(capsys, "plot-data", "ones.pbm", "--method", "mhfd", "--mode", "expected")
    assert code == 2
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 5  # s = 0 .. S + 1
    assert all(float(r["count"]) == 0 for r in rows)
    assert all(r["log_count"] == r["weight"] == r["model_fit_y"] == "" for r in rows)


def test_plot_data_deflected_weights(workdir, capsys):
    write_image("t.pbm", sierpinski_triangle(6))
    code, out, _ = run(capsys, "plot-data", "t.pbm", "--method", "mhfd", "--mode", "expected", "--regression", "deflected")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert rows[0]["model_fit_y"] == ""  # s = 0 count is always filtered out
    assert float(rows[3]["weight"]) == pytest.approx(0.125)


def test_calibrate_then_compute(workdir, capsys):
    code, out, _ = run(capsys, "calibrate", "--order", "9")
    assert code == 0
    c = float(read_config("fracdim.conf")["normalization_c"])
    assert json.loads(out)["normalization_c"] == c
    write_image("tri9.pbm", sierpinski_triangle(9))
    code, out, _ = run(capsys, "compute", "tri9.pbm", "--method", "mhfd", "--mode", "expected",
                        "--preprocess", "edge", "--calibrated")
    assert code == 0
    assert json.loads(out)["value"] == pytest.approx(TRIANGLE_DIMENSION, abs=1e-6)


def test_config_env_and_flag(workdir, capsys, monkeypatch):
    conf = workdir / "custom.conf"
    conf.write_text("# fracdim settings\nnormalization_c = 2.5\n")
    write_image("t.pbm", sierpinski_triangle(6))
    monkeypatch.setenv("FRACDIM_CONFIG", str(conf))
    code, out, _ = run(capsys, "compute", "t.pbm", "--method", "mhfd", "--mode", "expected", "--calibrated")
    assert code == 0 and json.loads(out)["c"] == 2.5
    monkeypatch.delenv("FRACDIM_CONFIG")
    assert run(capsys, "compute", "t.pbm", "--method", "mhfd", "--calibrated")[0] == 1
    code, out, _ = run(capsys, "compute", "t.pbm", "--method", "mhfd", "--calibrated", "--config", str(conf))
    assert json.loads(out)["c"] == 2.5


def test_eval_command(workdir, capsys):
    names = []
    for k in (6, 7):
        write_image(f"t{k}.pbm", sierpinski_triangle(k))
        names.append(f"t{k}.pbm")
    for i, d in enumerate((0.3, 0.4)):
        from fracdim.generators import salt_pepper

        write_image(f"n{i}.pbm", salt_pepper(64, 64, d, seed=i))
    (workdir / "m.json").write_text(json.dumps({"classes": {"tri": names, "noise": ["n0.pbm", "n1.pbm"]}}))
    code, out, _ = run(capsys, "eval", "--manifest", "m.json", "--csv", "s.csv", "--images-csv", "i.csv")
    assert code == 0
    report = json.loads(out)
    for m in ("hfd", "mhfd"):
        assert {"intra", "inter", "ratio"} <= set(report["methods"][m])
    assert (workdir / "s.csv").read_text().startswith("method,intra,inter,ratio")
    (workdir / "one.json").write_text(json.dumps({"classes": {"tri": names}}))
    assert run(capsys, "eval", "--manifest", "one.json")[0] == 1


def test_console_script_byte_identical(workdir):
    write_image("t.pbm", sierpinski_triangle(7))
    cmd = [sys.executable, "-m", "fracdim.cli", "compute", "t.pbm", "--method", "mhfd", "--seed", "7"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and a.startswith(b"{")
