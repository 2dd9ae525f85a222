import json

import pytest

from hitchinq import io
from hitchinq.cli import main
from hitchinq.linalg import ExactMatrix, dist
from hitchinq.reps import rep_dist
from hitchinq.seeds import surface_seed


def write(path, data):
    path.write_text(json.dumps(data))
    return str(path)


@pytest.fixture
def seed_file(tmp_path):
    out = tmp_path / "seed.json"
    assert main(["--quiet", "seed", "--genus", "3", "--n", "3", "--group", "sl", "-o", str(out)]) == 0
    return out


def test_seed_command(tmp_path, capsys, seed_file):
    data = json.loads(seed_file.read_text())
    assert data["scalar"] == "exact"
    assert all(isinstance(x, str) and "/" in x for row in data["images"]["a1"] for x in row)
    out = tmp_path / "g2.json"
    assert main(["seed", "--genus", "2", "--n", "2", "-o", str(out)]) == 0
    assert io.load_rep(out).images == surface_seed(2).images
    assert "PASS relator (exact)" in capsys.readouterr().out


def test_seed_g2_reports_three_form(tmp_path, capsys):
    assert main(["seed", "--genus", "3", "--n", "7", "--group", "g2", "-o", str(tmp_path / "g.json")]) == 0
    out = capsys.readouterr().out
    assert "3-form residual" in out and "PASS membership in G2(7)" in out


def test_seed_bad_arguments(tmp_path, capsys):
    assert main(["seed", "--genus", "2", "--n", "3", "--group", "sp", "-o", str(tmp_path / "x.json")]) == 2
    assert main(["seed", "--genus", "2", "--n", "5", "--group", "g2", "-o", str(tmp_path / "x.json")]) == 2


def test_twist_time_zero(tmp_path, seed_file):
    sched = write(tmp_path / "s.json", [{"curve": "a1", "t": 0}])
    out = tmp_path / "o.json"
    assert main(["--quiet", "twist", str(seed_file), sched, "--epsilon", "1e-6", "-o", str(out)]) == 0
    assert json.loads(out.read_text())["images"] == json.loads(seed_file.read_text())["images"]


def test_real_versus_rational(tmp_path, seed_file):
    sched = write(tmp_path / "s.json", [{"curve": "a1", "t": 1}, {"curve": "a2", "t": -0.5}])
    real, exact = tmp_path / "r.json", tmp_path / "e.json"
    trace = tmp_path / "t.json"
    assert main(["--quiet", "twist", str(seed_file), sched, "--real", "-o", str(real)]) == 0
    assert main(["--quiet", "twist", str(seed_file), sched, "--epsilon", "1e-4", "-o", str(exact),
                 "--trace", str(trace)]) == 0
    r, e = io.load_rep(real), io.load_rep(exact)
    assert e.exact and not r.exact
    assert rep_dist(r, e) <= 1e-4
    assert json.loads(trace.read_text())["ok"]


def test_malformed_curve_names_stage(tmp_path, seed_file, capsys):
    sched = write(tmp_path / "s.json", [{"curve": "a1", "t": 1}, {"curve": "z9", "t": 1}])
    assert main(["twist", str(seed_file), sched, "--epsilon", "1e-3", "-o", str(tmp_path / "o.json")]) == 2
    assert "stage 1" in capsys.readouterr().err


def test_epsilon_mode_needs_exact_input(tmp_path, seed_file):
    sched = write(tmp_path / "s.json", [{"curve": "a1", "t": 1}])
    real = tmp_path / "r.json"
    io.save_rep(real, io.load_rep(seed_file).to_real())
    assert main(["--quiet", "twist", str(real), sched, "--epsilon", "1e-3", "-o", str(tmp_path / "o.json")]) == 1


def test_verify(tmp_path, seed_file, capsys):
    assert main(["verify", str(seed_file)]) == 0
    data = json.loads(seed_file.read_text())
    data["images"]["b2"][0][0] = "7/5"
    bad = write(tmp_path / "bad.json", data)
    assert main(["verify", bad]) == 1
    out = capsys.readouterr().out
    assert "FAIL relator" in out and "FAIL membership b2" in out


def test_verify_ignores_diagnostics(tmp_path, capsys):
    rep = surface_seed(2)
    flipped = rep.with_images([-rep.images[0]] + list(rep.images[1:]))
    path = tmp_path / "f.json"
    io.save_rep(path, flipped)
    assert main(["verify", str(path)]) == 0
    assert "not real-distinct-positive: a1" in capsys.readouterr().out


def test_traces(tmp_path, seed_file, capsys):
    curves = write(tmp_path / "c.json", ["", "a1", "a1 b1"])
    out = tmp_path / "t.json"
    assert main(["traces", str(seed_file), curves, "-o", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data[0] == {"curve": "", "trace": "3/1"}
    rep = io.load_rep(seed_file)
    assert data[1]["trace"] == io.format_fraction(rep["a1"].trace())
    assert main(["--quiet", "traces", str(seed_file)]) == 0


def test_rationalize(tmp_path, seed_file):
    rep = io.load_rep(seed_file)
    from hitchinq.centralizer import ApproximationRequest
    req = ApproximationRequest(rep.evaluate("a1"), rep.group, 1.0, 1e-2)
    path = write(tmp_path / "q.json", io.request_to_json(req))
    out = tmp_path / "res.json"
    assert main(["--quiet", "rationalize", path, "--epsilon", "1e-6", "-o", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["certify"]["ok"] and data["achieved_error"] <= 1e-6
    B = io.matrix_from_json(data["B"], exact=True)
    assert B.det() == 1 and B.commutes_with(rep.evaluate("a1"))
    # config supplies schedule defaults for requests that omit them
    bare = {k: v for k, v in io.request_to_json(req).items() if k in ("A", "group", "t", "epsilon")}
    path = write(tmp_path / "bare.json", bare)
    tight = write(tmp_path / "c.json", {"max_rounds": 1})
    assert main(["--quiet", "--config", tight, "rationalize", path, "--epsilon", "1e-30", "-o", str(out)]) == 1


def test_pipeline_command(tmp_path, seed_file, capsys):
    sched = write(tmp_path / "s.json", {"stages": [{"curve": "a1", "t": 1}, {"curve": "a2", "t": -0.5}],
                                        "epsilon": 1e-3})
    out, trace = tmp_path / "o.json", tmp_path / "t.json"
    assert main(["pipeline", str(seed_file), sched, "-o", str(out), "--trace", str(trace)]) == 0
    text = capsys.readouterr().out
    assert "final distance" in text and "diagnostics: 9/9" in text
    summary = json.loads(trace.read_text())
    assert summary["final_error"] <= 1e-3 and len(summary["stages"]) == 2
    assert io.load_rep(out).relator_ok()


def test_quiet_and_errors(tmp_path, seed_file, capsys):
    assert main(["--quiet", "verify", str(seed_file)]) == 0
    assert capsys.readouterr().out == ""
    assert main(["verify", str(tmp_path / "missing.json")]) == 2
    bad_cfg = write(tmp_path / "c.json", {"tolerance": -1})
    assert main(["--config", bad_cfg, "verify", str(seed_file)]) == 2
    with pytest.raises(SystemExit):
        main(["seed"])


def test_exact_round_trip_is_bit_exact(tmp_path, seed_file):
    rep = io.load_rep(seed_file)
    again = tmp_path / "again.json"
    io.save_rep(again, rep)
    assert again.read_text() == seed_file.read_text()
    assert dist(rep["a1"], ExactMatrix(rep["a1"].rows)) == 0
