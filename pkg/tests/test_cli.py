import json
import subprocess
import sys

import jsonschema
import pytest

from porolab import report
from porolab.cli import main
from porolab.corpus import corpus_texts

F1_TEXT = "set f1 { shape = points(power(alpha=2, x0=1/2)) }\n"


@pytest.fixture
def files(tmp_path):
    texts = dict(corpus_texts())
    out = {}
    for name in ("f1", "f2", "f3", "f5", "geo", "finite_pair"):
        p = tmp_path / f"{name}.germ"
        p.write_text(texts[name + ".germ"])
        out[name] = str(p)
    bad = tmp_path / "broken.germ"
    bad.write_text("set b {\n  shape = points(geometric(r=1/2)\n}\n")
    out["broken"] = str(bad)
    return out


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_analyze_f1(capsys, files):
    code, out, _ = run(capsys, "analyze", files["f1"], "--depth", "64", "--format", "json")
    assert code == 0
    rep = json.loads(out)
    assert rep["csp"]["status"] == "CSP_Certified" and rep["depth"] == 64
    jsonschema.validate(rep, report.schema())


def test_analyze_geo(capsys, files):
    code, out, _ = run(capsys, "analyze", files["geo"])
    rep = json.loads(out)
    assert code == 0 and rep["porosity"]["p_plus"] == "1/2"
    assert rep["csp"]["status"] == "CSP_Refuted"


def test_analyze_parse_error(capsys, files):
    code, _, err = run(capsys, "analyze", files["broken"])
    assert code == 2
    assert "broken.germ:" in err and ":" in err.split("broken.germ:")[1]


def test_analyze_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "analyze", str(tmp_path / "nope.germ"))
    assert code == 2 and "nope.germ" in err


def test_analyze_multiple_files_in_order(capsys, files):
    code, out, _ = run(capsys, "analyze", files["geo"], files["f1"], files["finite_pair"])
    reps = json.loads(out)
    assert code == 0 and [r["name"] for r in reps] == ["geo", "f1", "pair"]
    for r in reps:
        jsonschema.validate(r, report.schema())


def test_analyze_text(capsys, files):
    code, out, _ = run(capsys, "analyze", files["f2"], "--format", "text", "--depth", "32")
    assert code == 0 and "CSP_Certified" in out


def test_depth_env_override(capsys, files, monkeypatch):
    monkeypatch.setenv("POROLAB_DEPTH", "24")
    _, out, _ = run(capsys, "analyze", files["f1"])
    assert json.loads(out)["depth"] == 24
    monkeypatch.setenv("POROLAB_DEPTH", "many")
    code, _, err = run(capsys, "analyze", files["f1"])
    assert code == 2 and "POROLAB_DEPTH" in err
    code, _, _ = run(capsys, "analyze", files["f1"], "--depth", "0")
    assert code == 2


def test_determinism(capsys, files):
    outs = [run(capsys, "analyze", files["f3"], files["f5"])[1] for _ in range(2)]
    assert outs[0] == outs[1]


def test_certify_f2(capsys, files):
    code, out, err = run(capsys, "certify", files["f2"])
    cert = json.loads(out)
    assert code == 0 and cert["status"] == "CSP_Certified"
    from fractions import Fraction
    assert Fraction(cert["q"]) >= 3
    assert cert["recheck"]["ok"] and "re-check passed" in err


def test_certify_refutations(capsys, files):
    code, out, _ = run(capsys, "certify", files["f3"])
    ref = json.loads(out)["refutation"]
    assert code == 0 and ref["M"] == "inf" and "unbounded" in ref["mechanism"]
    code, out, _ = run(capsys, "certify", files["f5"])
    ref = json.loads(out)["refutation"]
    assert code == 0 and "band_witness" in ref


def test_certify_empirical_exit(capsys, tmp_path):
    p = tmp_path / "e.germ"
    p.write_text("set e { shape = ratio_gaps(linear(a=1, b=1), "
                 "interleave(linear(a=1, b=1), linear(a=1, b=1)), seed=1) }\n")
    code, out, err = run(capsys, "certify", str(p), "--depth", "32")
    assert code == 3 and json.loads(out)["status"] == "Empirical(32)"


def test_certify_disagreement_exit(capsys, files, monkeypatch):
    import porolab.cli as cli
    from porolab.csp import Recheck
    monkeypatch.setattr(cli, "verify_certificate", lambda *a: Recheck(False, 1, (("x", 1),)))
    code, _, err = run(capsys, "certify", files["f2"])
    assert code == 4 and "disagrees" in err


def test_render_outputs(capsys, files, tmp_path):
    out = tmp_path / "f3.svg"
    assert run(capsys, "render", files["f3"], "--out", str(out))[0] == 0
    first = out.read_bytes()
    run(capsys, "render", files["f3"], "--out", str(out))
    assert out.read_bytes() == first and first.startswith(b"<svg")
    code, txt, _ = run(capsys, "render", files["geo"], "--ascii")
    assert code == 0 and "b/a = 2" in txt
    code, _, err = run(capsys, "render", files["f1"], "--out", str(tmp_path / "no" / "x.svg"))
    assert code == 3 and "cannot write" in err


def test_verify_suites(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "agreement", "--depth", "64")
    assert code == 0 and "agree" in out
    code, out, _ = run(capsys, "verify", "--suite", "strictify")
    assert code == 0


def test_verify_unknown_suite(capsys):
    with pytest.raises(SystemExit) as e:
        main(["verify", "--suite", "nosuch"])
    assert e.value.code == 2
    err = capsys.readouterr().err
    assert "agreement" in err and "oracle" in err


def test_console_entry_point(files):
    r = subprocess.run([sys.executable, "-m", "porolab", "analyze", files["finite_pair"]],
                       capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["csp"]["status"] == "TriviallyCSP"
    r = subprocess.run([sys.executable, "-m", "porolab", "--version"], capture_output=True,
                       text=True)
    assert r.stdout.strip() == "porolab 0.1.0"
