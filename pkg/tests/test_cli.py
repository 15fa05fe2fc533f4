import json

import numpy as np
import pytest

from psi_lab.cli import EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, main
from psi_lab.transform import CoeffArray


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_gram_summary(capsys):
    code, out, _ = run(capsys, "gram", "--bell", "shannon", "--jmin", "-4", "--jmax", "4",
                       "--kmax", "16", "--summary-only")
    data = json.loads(out)
    assert code == EXIT_OK
    assert data["max_deviation"] <= 1e-8 and data["size"] == 9 * 33
    assert data["config"]["window"] == {"jmin": -4, "jmax": 4, "kmax": 16}
    assert "matrix" not in data


def test_transform_json_roundtrip(capsys):
    code, out, _ = run(capsys, "transform", "--bell", "shannon", "--input", "indicator12",
                       "--jmin", "-1", "--jmax", "1", "--kmax", "3")
    assert code == EXIT_OK
    c = CoeffArray.from_json(out)
    assert abs(c[0, 0] - 1) <= 1e-12
    assert np.sum(np.abs(c.values)) == pytest.approx(1.0, abs=1e-12)
    assert c.meta["config"]["command"] == "transform"


def test_transform_csv_header(capsys):
    code, out, _ = run(capsys, "transform", "--bell", "shannon", "--input", "indicator12",
                       "--jmin", "0", "--jmax", "0", "--kmax", "1", "--format", "csv")
    lines = out.splitlines()
    assert code == EXIT_OK
    assert lines[0].startswith("# config: ")
    assert json.loads(lines[0][len("# config: "):])["format"] == "csv"
    assert lines[1] == "j,k,re,im,abs" and len(lines) == 5


def test_samples_file_input(tmp_path, capsys):
    x = np.linspace(1.0, 2.0, 201)
    path = tmp_path / "samples.csv"
    np.savetxt(path, np.column_stack([x, np.ones_like(x)]), delimiter=",", header="x,y")
    code, out, _ = run(capsys, "transform", "--bell", "shannon", "--input", str(path),
                       "--jmin", "0", "--jmax", "0", "--kmax", "1")
    assert code == EXIT_OK
    assert abs(CoeffArray.from_json(out)[0, 0] - 1) <= 1e-10


def test_classify_sides(capsys):
    code, out, _ = run(capsys, "classify", "--bell", "meyer", "--input", "sinx2")
    flags = json.loads(out)["flags"]
    assert code == EXIT_OK
    assert sorted(f for f, v in flags.items() if v) == ["D'", "E", "O_M", "S'"]
    code, out, _ = run(capsys, "classify", "--input", "bump12", "--side", "coherence",
                       "--kmax", "128", "--format", "csv")
    assert code == EXIT_OK and out.splitlines()[1] == "flag,set"


def test_verify_commands(capsys):
    code, out, _ = run(capsys, "verify", "--lemma", "2", "--n", "0", "--bell", "meyer")
    rep = json.loads(out)["reports"][0]
    assert code == EXIT_OK and rep["margin"] > 0
    code, out, _ = run(capsys, "verify", "--lemma", "1", "--n", "1", "--input", "bump12",
                       "--jmin", "-2", "--jmax", "2", "--kmax", "16", "--format", "table")
    assert code == EXIT_OK and out.splitlines()[-1].split()[-1] == "ok"
    code, out, _ = run(capsys, "verify", "--lemma", "duality", "--bell", "shannon",
                       "--input", "ramp12", "--pair", "square12")
    assert code == EXIT_OK
    assert json.loads(out)["duality"]["direct"][0] == pytest.approx(3.75)


def test_refused_duality_is_a_numeric_warning(capsys):
    code, out, _ = run(capsys, "verify", "--lemma", "duality", "--bell", "meyer")
    assert code == EXIT_NUMERIC
    assert json.loads(out)["duality"]["status"].startswith("refused")


def test_design_and_trace(tmp_path, capsys):
    trace = tmp_path / "trace.csv"
    out_path = tmp_path / "design.json"
    code, _, _ = run(capsys, "design", "--max-iters", "5", "--trace-csv", str(trace),
                     "-o", str(out_path))
    assert code == EXIT_OK
    data = json.loads(out_path.read_text())
    assert data["profile"]["kind"] == "spline"
    lines = trace.read_text().splitlines()
    assert lines[0].startswith("# config: ") and lines[1] == "iter,objective,step_size"
    # the designed profile is a valid bell for the other commands
    bell = tmp_path / "bell.json"
    bell.write_text(json.dumps(data["profile"]))
    code, _, _ = run(capsys, "transform", "--bell", str(bell), "--input", "bump12",
                     "--jmin", "0", "--jmax", "0", "--kmax", "2")
    assert code == EXIT_OK


def test_infeasible_design(capsys):
    code, _, _ = run(capsys, "design", "--support", "0.5", "2.5", "--max-iters", "2")
    assert code == EXIT_NUMERIC


def test_reconstruct(tmp_path, capsys):
    curves = tmp_path / "curves.csv"
    code, out, _ = run(capsys, "reconstruct", "--bell", "shannon", "--input", "indicator12",
                       "--K", "1", "2", "--jmin", "-1", "--jmax", "1", "--kmax", "4",
                       "--curves", str(curves), "--samples", "11")
    assert code == EXIT_OK
    assert json.loads(out)["error"] <= 1e-10
    assert len(curves.read_text().splitlines()) == 2 + 11


@pytest.mark.parametrize("argv", [
    ["transform", "--input", "nope"],
    ["transform", "--input", "bump12", "--jmin", "2", "--jmax", "1"],
    ["transform", "--input", "bump12", "--tol", "-1"],
    ["gram", "--bell", "haar"],
    ["classify", "--input", "bump12", "--ns", "-1"],
    ["reconstruct", "--input", "bump12", "--K", "2", "1"],
    ["verify", "--lemma", "1", "--input", "indicator12", "--n", "1"],
])
def test_usage_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == EXIT_USAGE and out == "" and err.startswith("psi-lab")


def test_argparse_errors_exit_3(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["transform"])
    assert exc.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--lemma", "3"])
    assert exc.value.code == EXIT_USAGE


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"bell": "shannon", "window": {"kmax": 2}}))
    code, out, _ = run(capsys, "gram", "--config", str(cfg), "--jmin", "0", "--jmax", "0",
                       "--summary-only")
    data = json.loads(out)
    assert code == EXIT_OK and data["size"] == 5 and data["config"]["bell"] == "shannon"
    cfg.write_text(json.dumps({"bogus": 1}))
    code, _, err = run(capsys, "gram", "--config", str(cfg))
    assert code == EXIT_USAGE and "bogus" in err


def test_threads_env(monkeypatch, capsys):
    monkeypatch.setenv("PSI_LAB_THREADS", "2")
    code, out, _ = run(capsys, "gram", "--bell", "shannon", "--kmax", "1", "--summary-only")
    assert code == EXIT_OK and json.loads(out)["config"]["threads"] == 2
    monkeypatch.setenv("PSI_LAB_THREADS", "x")
    code, _, _ = run(capsys, "gram", "--kmax", "1")
    assert code == EXIT_USAGE


def test_reruns_are_byte_identical(tmp_path, capsys):
    outs = []
    for name in ("a.json", "b.json"):
        path = tmp_path / name
        code, _, _ = run(capsys, "classify", "--input", "exp_two_sided", "--side", "coherence",
                         "--kmax", "64", "-o", str(path))
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
