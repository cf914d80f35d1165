"""Command-line driver: output shape, determinism, exit codes."""

import json

from kisinlab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_classify_json(capsys):
    code, out, err = run(capsys, "classify", "--p", "3",
                         "--matrix", "1,1;0,u")
    assert code == 0 and err == ""
    assert json.loads(out) == {"case": "nonsplit", "a": "1", "s": 0,
                               "b": "1", "t": 1, "gamma": "u"}


def test_output_is_byte_deterministic(capsys):
    argv = ("enumerate", "--p", "3", "--normal-form", "simple:a=1,s=2",
            "--e", "5", "--r1", "4", "--r2", "0")
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second
    assert first.endswith("\n")
    obj = json.loads(first)
    assert list(obj) == sorted(obj)
    assert obj["size"] == 1 and obj["lattices"] == [
        {"m": 1, "n": 1, "r": "0"}]
    assert obj["strata"] == {"4,2": ["lat(1,1,0)"]}


def test_enumerate_csv(capsys):
    code, out, _ = run(capsys, "enumerate", "--p", "3",
                       "--normal-form", "simple:a=1,s=2",
                       "--e", "5", "--r1", "4", "--r2", "0",
                       "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "lattice,a,b"
    assert lines[1:] == ['"lat(1,1,0)",4,2']  # literal carries a comma


def test_usage_errors_exit_one(capsys):
    code, _, err = run(capsys, "classify", "--p", "3")
    assert code == 1 and "matrix" in err
    code, _, err = run(capsys, "classify", "--p", "3",
                       "--matrix", "1,1;0")
    assert code == 1 and "error" in err
    code, _, _ = run(capsys, "enumerate", "--p", "3",
                     "--normal-form", "simple:a=1,s=2")
    assert code == 1  # missing type parameters
    # argparse failures are folded onto the same exit code
    assert main(["no-such-command"]) == 1


def test_out_file(tmp_path, capsys):
    target = tmp_path / "report.json"
    code, out, _ = run(capsys, "classify", "--p", "3",
                       "--matrix", "0,u^2;1,0", "--out", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text()) == {"case": "simple",
                                              "a": "1", "s": 2}


def test_config_file(tmp_path, capsys):
    conf = tmp_path / "conf.json"
    conf.write_text(json.dumps({"p": 3, "normal-form": "simple:a=1,s=2",
                                "e": 5, "r1": 4, "r2": 0}))
    code, out, _ = run(capsys, "enumerate", "--config", str(conf))
    assert code == 0
    assert json.loads(out)["size"] == 1
    # explicit flags win over the config file
    code, out, _ = run(capsys, "enumerate", "--config", str(conf),
                       "--e", "7", "--r1", "6")
    assert code == 0
    assert json.loads(out)["size"] == 4


def test_strata_subcommand(capsys):
    code, out, _ = run(capsys, "strata", "--p", "3",
                       "--normal-form", "simple:a=1,s=2",
                       "--e", "7", "--r1", "6", "--r2", "0")
    assert code == 0
    obj = json.loads(out)
    assert obj["match"] is True and obj["dim"] == 1
    assert [r["count"] for r in obj["rows"]] == [3, 0, 1, 0]


def test_components_subcommand(capsys):
    code, out, _ = run(capsys, "components", "--p", "3",
                       "--normal-form", "split:a=1,s=0",
                       "--e", "2", "--r1", "2", "--r2", "0")
    assert code == 0
    obj = json.loads(out)
    assert obj["match"] is True
    assert obj["labels"]["X_Ma"]["shape"] == "line"
    assert len(obj["labels"]["X_Ma"]["observed"]) == 4
    assert obj["zero_stratum"] == []


def test_x0_subcommand(capsys):
    code, out, _ = run(capsys, "x0", "--p", "3",
                       "--normal-form", "nonsplit:a=1,s=0,b=1,t=1,gamma=u",
                       "--e", "3", "--r1", "3", "--r2", "0")
    assert code == 0
    obj = json.loads(out)
    assert obj["match"] is True
    assert obj["level"] == 1
    assert obj["n_predicted"] == obj["n_observed"] == 1
    assert obj["connected_classes"] == 1


def test_raynaud_subcommand(capsys):
    code, out, _ = run(capsys, "raynaud", "--p", "3",
                       "--normal-form", "split:a=1,s=0,b=2,t=1", "--e", "3")
    assert code == 0
    obj = json.loads(out)
    assert obj["min"] == "lat(1,1,0)" and obj["max"] == "lat(0,0,0)"
    assert obj["levels"] == {"0": 1, "1": 2, "2": 1}
    assert obj["predicted_matches"] is True


def test_render_dot(capsys):
    code, out, _ = run(capsys, "render", "--p", "3",
                       "--normal-form", "simple:a=1,s=2",
                       "--e", "7", "--r1", "6", "--r2", "0",
                       "--format", "dot")
    assert code == 0
    assert out.startswith("graph")
    assert "simple:a=1,s=2" in out
    assert "lat(1,2,0)" in out


def test_render_ascii(capsys):
    code, out, _ = run(capsys, "render", "--p", "3",
                       "--normal-form", "simple:a=1,s=2",
                       "--e", "5", "--r1", "4", "--r2", "0",
                       "--format", "ascii")
    assert code == 0
    assert "level=2" in out and "lat(1,1,0)" in out


def test_verify_sweeps(capsys):
    code, out, _ = run(capsys, "verify", "--p", "3", "--suite", "distances")
    assert code == 0 and "distances: ok" in out
    code, out, _ = run(capsys, "verify", "--p", "3", "--suite", "raynaud")
    assert code == 0 and "raynaud: ok" in out
