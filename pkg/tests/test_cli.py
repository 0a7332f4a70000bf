from __future__ import annotations

import json
import subprocess
import sys

import pytest

from cayleyci.cli import main
from cayleyci.group import GroupSpec, format_group, read_group
from cayleyci.relstruct import read_structure
from cayleyci.witness import load_bundle, regular_conjugator
from cayleyci.z2five import load_counterexample


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def c3(tmp_path):
    path = tmp_path / "c3.rs"
    path.write_text("relstruct n=3 k=2\n0: 0 1\n0: 1 2\n0: 2 0\n")
    return path


@pytest.fixture
def c4_group(tmp_path):
    path = tmp_path / "c4.perm"
    path.write_text("degree 4\n(1,2,3,4)\n")
    return path


def test_witness_build_color(capsys, tmp_path):
    out_dir = tmp_path / "w"
    js = tmp_path / "r.json"
    code, out, _ = run(capsys, "witness", "build", "--p", "3", "--d", "2", "--mode", "color",
                       "--out", str(out_dir), "--json", str(js))
    assert code == 0
    assert out.count("[PASS]") == 5 and "NOT-CI-WITNESS-VALID" in out
    report = json.loads(js.read_text())
    assert set(report) >= {"command", "inputs", "verdicts", "timings_ms", "version"}
    assert [v["status"] for v in report["verdicts"]] == ["PASS"] * 5
    assert report["results"]["beta_examined"] == 12
    bundle = load_bundle(out_dir)
    assert read_structure(out_dir / "X.rs") == bundle.X


def test_witness_build_plain_7_3(capsys):
    code, out, _ = run(capsys, "witness", "build", "--p", "7", "--d", "3", "--mode", "plain")
    assert code == 0 and out.count("[PASS]") == 5


def test_witness_unsupported(capsys):
    code, _, err = run(capsys, "witness", "build", "--p", "3", "--d", "3")
    assert code == 2 and "does not divide" in err


def test_witness_missing_args(capsys):
    code, _, err = run(capsys, "witness", "build")
    assert code == 2 and "--p" in err


def test_witness_verify_round_trip(capsys, tmp_path):
    out_dir = tmp_path / "w"
    assert run(capsys, "witness", "build", "--p", "3", "--d", "2", "--out", str(out_dir))[0] == 0
    js = tmp_path / "v.json"
    code, out, _ = run(capsys, "witness", "verify", "--in", str(out_dir), "--threads", "2", "--json", str(js))
    assert code == 0
    report = json.loads(js.read_text())
    assert len(report["inputs"]) == 5 and all(len(h) == 64 for h in report["inputs"].values())


def test_witness_verify_detects_tampering(capsys, tmp_path):
    out_dir = tmp_path / "w"
    run(capsys, "witness", "build", "--p", "3", "--d", "2", "--out", str(out_dir))
    (out_dir / "Y.rs").write_text((out_dir / "X.rs").read_text())
    code, out, _ = run(capsys, "witness", "verify", "--in", str(out_dir))
    assert code == 1 and "[FAIL]" in out


def test_reports_identical_except_timings(capsys, tmp_path):
    reports = []
    for name in ("a.json", "b.json"):
        run(capsys, "witness", "build", "--p", "3", "--d", "2", "--json", str(tmp_path / name))
        r = json.loads((tmp_path / name).read_text())
        r.pop("timings_ms")
        r["command"] = r["command"][:-2]  # drop the differing --json PATH
        for v in r["verdicts"]:
            v.pop("ms")
        reports.append(r)
    assert reports[0] == reports[1]


def test_aut(capsys, tmp_path, c3):
    out = tmp_path / "aut.perm"
    code, text, _ = run(capsys, "aut", "--in", str(c3), "--out", str(out))
    assert code == 0 and "order: 3" in text
    assert read_group(out).order == 3


def test_aut_parse_error(capsys, tmp_path):
    bad = tmp_path / "bad.rs"
    bad.write_text("relstruct n=3 k=2\n0: 0 1\nx: 1 2\n")
    code, _, err = run(capsys, "aut", "--in", str(bad))
    assert code == 2 and "line 3" in err


def test_aut_budget(capsys, tmp_path, monkeypatch):
    big = tmp_path / "big.rs"
    big.write_text("relstruct n=10 k=2\n0: 0 1\n")
    monkeypatch.setenv("CAYLEYCI_AUT_MAX_N", "8")
    code, _, err = run(capsys, "aut", "--in", str(big))
    assert code == 2 and "budget exceeded" in err and "automorphism search" in err


def test_closure(capsys, tmp_path, c4_group):
    out = tmp_path / "cl.perm"
    code, text, _ = run(capsys, "closure", "--in", str(c4_group), "--k", "2", "--out", str(out))
    assert code == 0 and "closure_order: 4" in text
    assert read_group(out).order == 4


def test_blocks(capsys, c4_group, tmp_path):
    js = tmp_path / "b.json"
    code, _, _ = run(capsys, "blocks", "--in", str(c4_group), "--json", str(js))
    assert code == 0
    systems = json.loads(js.read_text())["results"]["systems"]
    assert systems == [{"block_size": 2, "blocks": [[0, 2], [1, 3]], "quotient_order": 2, "kernel_order": 2}]


def test_blocks_intransitive(capsys, tmp_path):
    g = tmp_path / "g.perm"
    g.write_text("degree 4\n(1,2)\n")
    code, _, err = run(capsys, "blocks", "--in", str(g))
    assert code == 2 and "not transitive" in err


def test_cicheck_cycle(capsys, tmp_path):
    X = tmp_path / "c5.rs"
    X.write_text("relstruct n=5 k=2\n" + "".join(f"0: {i} {(i + 1) % 5}\n" for i in range(5)))
    phi = tmp_path / "phi.perm"
    phi.write_text("degree 5\n(1,2,3,4,5)\n")
    code, out, _ = run(capsys, "cicheck", "--structure", str(X), "--group", "Z5", "--phi", str(phi))
    assert code == 0 and "conjugate: True" in out


def test_cicheck_counterexample(capsys, tmp_path):
    code, _, _ = run(capsys, "z2-5", "export", "--out", str(tmp_path / "z"))
    assert code == 0
    ce = load_counterexample()
    phi = tmp_path / "phi.perm"
    phi.write_text(format_group([regular_conjugator(GroupSpec(1, 5), ce.W)]))
    code, out, _ = run(capsys, "cicheck", "--structure", str(tmp_path / "z" / "X.rs"), "--group", "Z2^5",
                       "--phi", str(phi))
    assert code == 0 and "conjugate: False" in out
    assert read_structure(tmp_path / "z" / "X.rs") == ce.X
    assert read_group(tmp_path / "z" / "G.perm").order == 2048


def test_cicheck_precondition(capsys, tmp_path):
    X = tmp_path / "c5.rs"
    X.write_text("relstruct n=5 k=2\n" + "".join(f"0: {i} {(i + 1) % 5}\n" for i in range(5)))
    phi = tmp_path / "phi.perm"
    phi.write_text("degree 5\n(1,2)\n")
    code, _, err = run(capsys, "cicheck", "--structure", str(X), "--group", "Z5", "--phi", str(phi))
    assert code == 2 and "not contained" in err


def test_z2_5_verify(capsys, tmp_path):
    js = tmp_path / "z.json"
    code, out, _ = run(capsys, "z2-5", "verify", "--json", str(js))
    assert code == 0 and "|G| = 2048" in out
    report = json.loads(js.read_text())
    assert report["results"]["orders"]["G"] == 2048
    assert [v["status"] for v in report["verdicts"]] == ["PASS"] * 5


def test_z2_5_skip(capsys):
    code, out, _ = run(capsys, "z2-5", "verify", "--skip-full-aut")
    assert code == 0 and "[SKIP] d_aut_X_equals_G" in out


def test_usage_errors(capsys):
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys)[0] == 2
    assert run(capsys, "aut")[0] == 2
    assert run(capsys, "witness", "build", "--p", "3", "--d", "2", "--threads", "0")[0] == 2


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "aut", "--in", str(tmp_path / "nope.rs"))
    assert code == 2 and "nope.rs" in err


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cayleyci.cli", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and "0.1.0" in proc.stdout
