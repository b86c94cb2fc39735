import csv
import io
import json
import shutil
import subprocess
import sys

import pytest

from cayleydiam.cli import main
from cayleydiam.config import load_config, validate_config
from cayleydiam.errors import ConfigError
from cayleydiam.report import csv_text, format_value, run_config

F_EVAL_JOB = {"type": "f_eval", "groups": ["cyclic:5", "dihedral:6", "elem2:4"], "c": [0.25, 0.5, 1, 1.5, 2]}


def write_config(tmp_path, body, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(body))
    return str(path)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def identity_table(n):
    return [[(i + j) % n for j in range(n)] for i in range(n)]


# ---------------------------------------------------------------- schema


def test_unknown_key_names_its_path():
    raw = {"jobs": [{"type": "simulate", "groups": ["cyclic:5"], "p": [0.5], "trails": 10}]}
    with pytest.raises(ConfigError, match=r"unknown key at jobs\[0\]\.trails"):
        validate_config(raw)


@pytest.mark.parametrize(
    "raw,message",
    [
        ({"jobs": [{"type": "simulate", "groups": ["cyclic:5"], "p": [0.5]}]}, r"missing key at jobs\[0\]\.trials"),
        ({"jobs": [{"groups": ["cyclic:5"]}]}, r"missing key at jobs\[0\]\.type"),
        ({"jobs": [{"type": "f_evals"}]}, r"jobs\[0\]\.type must be one of"),
        ({"jobs": [], "sede": 1}, "unknown key at sede"),
        ({"seed": 1}, "missing key at jobs"),
        ({"jobs": [], "seed": -1}, "seed must lie"),
        ({"jobs": [], "seed": 2**64}, "seed must lie"),
        ({"jobs": [], "workers": 0}, "workers must lie"),
        ({"jobs": [{"type": "f_eval", "groups": ["cyclc:5"], "c": [1]}]}, r"jobs\[0\]\.groups\[0\]"),
        ({"jobs": [{"type": "f_eval", "groups": ["cyclic:5"], "c": []}]}, "non-empty"),
        ({"jobs": [{"type": "simulate", "groups": ["cyclic:5"], "p": [1.5], "trials": 3}]}, r"p\[0\] must lie"),
        ({"jobs": [{"type": "simulate", "groups": ["cyclic:5"], "p": [0.5], "c": [1], "trials": 3}]}, "exactly one"),
        ({"jobs": [{"type": "verify_tables"}]}, "exactly one of groups or corpus"),
        ({"jobs": [{"type": "verify_tables", "corpus": "big"}]}, "corpus must be one of"),
        ({"jobs": [{"type": "family", "spec": "thm4:4/3", "k": [1]}]}, r"jobs\[0\]\.spec"),
        ({"jobs": [{"type": "depgraph", "groups": ["cyclic:5"], "name": "a"}, {"type": "depgraph", "groups": ["cyclic:6"], "name": "a"}]}, "duplicate"),
        ({"jobs": [{"type": "depgraph", "groups": ["cyclic:5"], "x": [0]}]}, r"x\[0\] must lie"),
        ({"jobs": [{"type": "f_eval", "groups": ["cyclic:5"], "c": [True]}]}, "must be a number"),
    ],
)
def test_schema_errors(raw, message):
    with pytest.raises(ConfigError, match=message):
        validate_config(raw)


def test_defaults_and_names():
    cfg = validate_config({"jobs": [{"type": "depgraph", "groups": ["cyclic:5"]}, F_EVAL_JOB]})
    assert [j.name for j in cfg.jobs] == ["00_depgraph", "01_f_eval"]
    assert cfg.seed == 0 and cfg.out == "results"
    assert cfg.jobs[1].params["mode"] == "exact"


def test_bad_json_and_missing_file(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    with pytest.raises(ConfigError, match="not valid JSON"):
        load_config(str(bad))
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(str(tmp_path / "nope.json"))


# ---------------------------------------------------------------- hashing


def test_config_hash_tracks_semantic_fields():
    base = {"seed": 3, "jobs": [F_EVAL_JOB]}
    h = validate_config(base).config_hash()
    assert validate_config(json.loads(json.dumps(base))).config_hash() == h
    assert validate_config({**base, "workers": 7, "out": "elsewhere"}).config_hash() == h
    # defaults spelled out explicitly are the same config
    explicit = {**F_EVAL_JOB, "mode": "exact", "x_sample": 4096, "y_sample": 65536}
    assert validate_config({"seed": 3, "jobs": [explicit]}).config_hash() == h
    variants = [
        {**base, "seed": 4},
        {**base, "cap_order": 1000},
        {"seed": 3, "jobs": [{**F_EVAL_JOB, "c": [0.25, 0.5, 1, 1.5, 2.5]}]},
        {"seed": 3, "jobs": [{**F_EVAL_JOB, "groups": ["cyclic:5", "dihedral:6"]}]},
        {"seed": 3, "jobs": [{**F_EVAL_JOB, "mode": "estimate"}]},
        {"seed": 3, "jobs": [{**F_EVAL_JOB, "name": "renamed"}]},
    ]
    hashes = {validate_config(v).config_hash() for v in variants}
    assert h not in hashes and len(hashes) == len(variants)


# ---------------------------------------------------------------- running


def test_f_eval_cardinality(tmp_path):
    cfg = validate_config({"out": str(tmp_path / "out"), "jobs": [F_EVAL_JOB]})
    report = run_config(cfg, workers=1)
    assert report.exit_code == 0
    rows = read_csv(tmp_path / "out" / "00_f_eval.csv")
    assert rows[0] == ["group", "order", "c", "f_total", "log10_f", "f_tilde", "mode", "seed"]
    assert len(rows) == 16
    manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
    assert manifest["config_hash"] == cfg.config_hash()
    assert manifest["jobs"][0]["rows"] == 15
    assert {"cayleydiam", "python", "numpy"} <= set(manifest["versions"])


MIXED = {
    "seed": 12345,
    "jobs": [
        F_EVAL_JOB,
        {"type": "f_eval", "groups": ["product(symmetric:4,cyclic:9)"], "c": [0.5, 1], "mode": "estimate", "y_sample": 50},
        {"type": "simulate", "groups": ["cyclic:31", "dihedral:16"], "c": [0.5, 1, 2], "trials": 30},
        {"type": "exact", "groups": ["cyclic:6", "elem2:3"], "p": [0.2, 0.5]},
        {"type": "depgraph", "groups": ["dicyclic:3", "metacyclic:8.2.5"]},
        {"type": "verify_observations", "corpus": "small:12"},
        {"type": "verify_tables", "groups": ["dihedral:5", "product(cyclic:2,symmetric:3)"]},
        {"type": "family", "spec": "thm5:2", "k": [1, 2, 3], "emit": "threshold"},
        {"type": "family", "spec": "thm3:0.5", "k": [2, 3], "emit": "census"},
    ],
}


def run_dir(tmp_path, name, workers, body=MIXED):
    cfg = validate_config({**body, "out": str(tmp_path / name)})
    report = run_config(cfg, workers=workers)
    files = {j.name: open(j.path, "rb").read() for j in report.jobs}
    return report, files


def test_runs_are_byte_identical_across_workers(tmp_path):
    r1, a = run_dir(tmp_path, "one", 1)
    r2, b = run_dir(tmp_path, "again", 1)
    r8, c = run_dir(tmp_path, "eight", 8)
    assert r1.exit_code == r2.exit_code == r8.exit_code == 0
    assert a == b == c
    for blob in a.values():
        assert b"\r\n" not in blob


def test_capacity_error_is_per_job(tmp_path):
    body = {
        "cap_order": 100,
        "jobs": [
            {"type": "depgraph", "groups": ["cyclic:5", "cyclic:500"]},
            {"type": "f_eval", "groups": ["cyclic:7"], "c": [1]},
        ],
    }
    report, files = run_dir(tmp_path, "cap", 1, body)
    assert report.exit_code == 3
    assert report.jobs[0].capacity_errors == 1 and report.jobs[0].rows == 4
    assert len(files["01_f_eval"].splitlines()) == 2


def test_exit_code_precedence(tmp_path):
    body = {
        "cap_order": 100,
        "jobs": [
            {"type": "depgraph", "groups": ["cyclic:500"]},
            {"type": "depgraph", "groups": ["cyclic:5"], "x": [9]},
        ],
    }
    report, _ = run_dir(tmp_path, "prec", 1, body)
    assert report.exit_code == 2


def test_csv_formatting():
    assert format_value(1 / 3) == "0.333333333333"
    assert format_value(True) == "true" and format_value(None) == ""
    assert format_value(float("-inf")) == "-inf"
    text = csv_text(("a", "b"), [("x,y", 2.0), ('q"', 1e-20)])
    assert text == 'a,b\n"x,y",2\n"q""",1e-20\n'


# ---------------------------------------------------------------- main()


def run_main(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_main_f_eval(capsys):
    code, out, _ = run_main(capsys, "f-eval", "-g", "elem2:3", "--c", "2")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[1][:4] == ["elem2:3", "8", "2", "0.875"]


def test_main_global_flags_either_side(capsys):
    a = run_main(capsys, "--seed", "5", "simulate", "-g", "cyclic:40", "--p", "0.3", "--trials", "20")
    b = run_main(capsys, "simulate", "-g", "cyclic:40", "--p", "0.3", "--trials", "20", "--seed", "5")
    assert a == b and a[0] == 0


def test_main_exit_codes(capsys, tmp_path):
    assert run_main(capsys, "exact", "-g", "cyclic:4", "--p", "0.5", "--x", "1")[0] == 0
    assert run_main(capsys, "exact", "-g", "cyclic:25", "--p", "0.5")[0] == 3
    assert run_main(capsys, "depgraph", "-g", "cyclic:5000", "--cap-order", "100")[0] == 3
    assert run_main(capsys, "depgraph", "-g", "cyclc:5")[0] == 2
    assert run_main(capsys, "depgraph", "-g", "cyclic:5", "--x", "7")[0] == 2
    assert run_main(capsys, "--workers", "0", "depgraph", "-g", "cyclic:5")[0] == 2
    assert run_main(capsys, "--seed", "-3", "depgraph", "-g", "cyclic:5")[0] == 2
    assert run_main(capsys, "run", str(tmp_path / "missing.json"))[0] == 2
    path = write_config(tmp_path, {"jobs": [{"type": "depgraph", "groups": ["cyclic:5"]}], "trails": 1})
    code, _, err = run_main(capsys, "run", path)
    assert code == 2 and "unknown key at trails" in err


def test_main_family(capsys):
    code, out, _ = run_main(capsys, "family", "--spec", "thm5:2", "--k", "6", "--emit", "threshold")
    assert code == 0 and "thm5:2,6,8/5,1.6,3/4" in out
    code, out, _ = run_main(capsys, "family", "--spec", "thm3:0.5", "--k", "4")
    assert code == 0 and '"product(elem2:4,cyclic:16)",256' in out


def test_main_verify_tables_report(capsys):
    code, out, err = run_main(capsys, "verify-tables", "--corpus", "small:16")
    assert code == 0
    report = json.loads(err.strip().splitlines()[-1])
    assert report["violations"] == 0
    assert sum(report["populations"].values()) > 0


def test_main_verify_all_small(capsys, tmp_path):
    code, _, _ = run_main(capsys, "verify-all", "--corpus", "small:10", "--out", str(tmp_path))
    rows = read_csv(tmp_path / "verify_all.csv")
    assert code == 0 and rows[0] == ["check", "checked", "violations"]
    assert all(int(r[2]) == 0 for r in rows[1:]) and all(int(r[1]) > 0 for r in rows[1:])


def test_verify_all_empty_corpus(capsys, caplog):
    code, out, _ = run_main(capsys, "verify-all", "--corpus", "none")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0
    assert all(r[1] == "0" for r in rows[1:])
    assert "empty corpus" in caplog.text


def test_corrupted_table_fails_before_sweep(capsys, tmp_path):
    table = identity_table(5)
    table[2][3], table[2][4] = table[2][4], table[2][3]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(table))
    code, out, err = run_main(capsys, "verify-all", "--corpus", "small:6", "-g", f"table:{path}")
    assert code == 2 and out == "" and "error" in err
    good = tmp_path / "good.json"
    good.write_text(json.dumps(identity_table(5)))
    assert run_main(capsys, "verify-all", "--corpus", "none", "-g", f"table:{good}")[0] == 0


def test_run_subcommand(capsys, tmp_path):
    path = write_config(tmp_path, {"out": str(tmp_path / "o"), "jobs": [F_EVAL_JOB]})
    code, out, _ = run_main(capsys, "run", path, "--workers", "2")
    assert code == 0 and out.strip().endswith("manifest.json")


@pytest.mark.skipif(shutil.which("cayleydiam") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["cayleydiam", "f-eval", "-g", "cyclic:4", "--c", "1"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("group,order")
    proc = subprocess.run([sys.executable, "-m", "cayleydiam.cli", "depgraph", "-g", "bogus"], capture_output=True)
    assert proc.returncode == 2
