"""Command-line interface: artifacts, manifests, replay, and exit codes."""

import csv
import json

import pytest

from qwsearch.cli import main


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def run(tmp_path, *argv, expect=0, capsys=None):
    code = main([str(a) for a in argv])
    assert code == expect, f"argv {argv} exited {code}, expected {expect}"
    return capsys.readouterr() if capsys else None


class TestBuild:
    def test_crawl_build_reports_pass(self, tmp_path, capsys):
        out = tmp_path / "crawl50.json"
        captured = run(
            tmp_path, "build", "--family", "crawl", "--n", "50", "--gamma", "1.0",
            "--out", out, capsys=capsys,
        )
        assert "conditions: PASS" in captured.out
        data = json.loads(out.read_text())
        assert data["n"] == 50 and data["family"] == "crawl"
        manifest = json.loads((tmp_path / "crawl50.json.manifest.json").read_text())
        assert manifest["command"] == "build"
        assert str(out) in manifest["artifact_paths"]

    def test_sk_build_deterministic(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        run(tmp_path, "build", "--family", "sk", "--n", "30", "--seed", "7", "--out", a)
        run(tmp_path, "build", "--family", "sk", "--n", "30", "--seed", "7", "--out", b)
        assert a.read_bytes() == b.read_bytes()

    def test_single_node_rejected(self, tmp_path):
        run(tmp_path, "build", "--family", "crawl", "--n", "1",
            "--out", tmp_path / "x.json", expect=1)

    def test_spectrum_csv(self, tmp_path):
        out = tmp_path / "funnel.json"
        spectrum = tmp_path / "spectrum.csv"
        run(tmp_path, "build", "--family", "funnel", "--n", "6",
            "--out", out, "--spectrum-csv", spectrum)
        rows = read_rows(spectrum)
        assert [float(r["energy"]) for r in rows] == pytest.approx(list(range(6)), abs=1e-9)
        assert [float(r["p_k"]) for r in rows] == pytest.approx([1 / 6] * 6, abs=1e-12)


class TestDetect:
    def test_crawl_node_three_detected_at_three(self, tmp_path):
        graph = tmp_path / "c.json"
        run(tmp_path, "build", "--family", "crawl", "--n", "50", "--out", graph)
        run(tmp_path, "detect", "--graph", graph, "--psi0", "node:3",
            "--out", tmp_path / "det")
        rows = read_rows(tmp_path / "det.csv")
        assert float(rows[2]["F_n"]) == pytest.approx(1.0, abs=1e-8)
        summary = json.loads((tmp_path / "det.json").read_text())
        assert summary["p_det"] == pytest.approx(1.0, abs=1e-9)
        assert summary["mean_n"] == pytest.approx(3.0, abs=1e-6)

    def test_funnel_return_peak(self, tmp_path):
        run(tmp_path, "detect", "--family", "funnel", "--n", "50", "--psi0", "node:0",
            "--out", tmp_path / "ret")
        rows = read_rows(tmp_path / "ret.csv")
        assert float(rows[49]["F_n"]) == pytest.approx(1.0, abs=1e-8)

    def test_shift_basis_initial_state(self, tmp_path):
        run(tmp_path, "detect", "--family", "crawl", "--n", "3", "--psi0", "qk:2",
            "--out", tmp_path / "qk")
        rows = read_rows(tmp_path / "qk.csv")
        assert float(rows[0]["F_n"]) == pytest.approx(1.0, abs=1e-8)

    def test_vector_file_state(self, tmp_path):
        vec = tmp_path / "state.json"
        vec.write_text(json.dumps({"re": [0, 1, 0, 0], "im": [0, 0, 0, 0]}))
        run(tmp_path, "detect", "--family", "crawl", "--n", "4", "--psi0", vec,
            "--out", tmp_path / "v")
        rows = read_rows(tmp_path / "v.csv")
        assert float(rows[0]["F_n"]) == pytest.approx(1.0, abs=1e-8)

    def test_malformed_state_spec(self, tmp_path):
        run(tmp_path, "detect", "--family", "crawl", "--n", "4",
            "--psi0", "blob:3", "--out", tmp_path / "x", expect=1)


class TestWinding:
    def test_three_node_crawl(self, tmp_path, capsys):
        captured = run(
            tmp_path, "winding", "--family", "crawl", "--n", "3", "--psi0", "qk:0",
            "--out", tmp_path / "w", capsys=capsys,
        )
        assert json.loads(captured.out.strip().splitlines()[-1]) == {"winding": 3}
        summary = json.loads((tmp_path / "w.json").read_text())
        assert summary["winding"] == 3
        assert summary["p_det"] == pytest.approx(1.0, abs=1e-6)
        rows = read_rows(tmp_path / "w.csv")
        assert len(rows) == 1024

    def test_shifted_start_winds_less(self, tmp_path):
        run(tmp_path, "winding", "--family", "crawl", "--n", "3", "--psi0", "qk:2",
            "--out", tmp_path / "w2")
        assert json.loads((tmp_path / "w2.json").read_text())["winding"] == 1


class TestCheck:
    def test_crawl_passes(self, tmp_path, capsys):
        captured = run(tmp_path, "check", "--family", "crawl", "--n", "20",
                       "--out", tmp_path / "ok.json", capsys=capsys)
        assert "PASS" in captured.out
        assert json.loads((tmp_path / "ok.json").read_text())["verdict"] == "pass"

    def test_sk_fails_with_exit_two(self, tmp_path):
        graph = tmp_path / "sk.json"
        run(tmp_path, "build", "--family", "sk", "--n", "20", "--seed", "3", "--out", graph)
        run(tmp_path, "check", "--graph", graph, "--tau", "0.9",
            "--out", tmp_path / "bad.json", expect=2)
        assert json.loads((tmp_path / "bad.json").read_text())["verdict"] == "fail"


class TestNoiseAndSweep:
    def test_noise_artifacts(self, tmp_path, capsys):
        captured = run(
            tmp_path, "noise", "--a", "0.0", "--realizations", "5", "--seed", "1",
            "--n", "10", "--out", tmp_path / "noise", capsys=capsys,
        )
        assert "mean P_det = 1.000000" in captured.out
        rows = read_rows(tmp_path / "noise.csv")
        assert len(rows) == 5
        summary = json.loads((tmp_path / "noise.json").read_text())
        assert summary["mean_p_det"] == pytest.approx(1.0, abs=1e-9)

    def test_sweep_artifacts(self, tmp_path):
        run(tmp_path, "sweep", "--n", "8", "--seed", "2", "--n-max", "10000",
            "--taus", "0.9,1.3", "--out", tmp_path / "sweep")
        rows = read_rows(tmp_path / "sweep.csv")
        assert len(rows) == 2
        assert float(rows[0]["tau"]) == pytest.approx(0.9)


class TestEvolve:
    def test_profile_and_revival(self, tmp_path):
        run(tmp_path, "evolve", "--family", "crawl", "--n", "10", "--psi0", "node:0",
            "--out", tmp_path / "prof")
        summary = json.loads((tmp_path / "prof.json").read_text())
        assert summary["revival_overlap"] == pytest.approx(1.0, abs=1e-8)
        rows = read_rows(tmp_path / "prof.csv")
        assert len(rows) == (10 * 10 + 1) * 10


class TestExceptionalCommand:
    def test_crawl_report(self, tmp_path, capsys):
        captured = run(tmp_path, "exceptional", "--family", "crawl", "--n", "12",
                       "--out", tmp_path / "ep.json", capsys=capsys)
        assert "exceptional: True" in captured.out
        payload = json.loads((tmp_path / "ep.json").read_text())
        assert payload["is_exceptional"] is True
        assert payload["nilpotency_norm"] <= 1e-6


class TestManifests:
    @pytest.mark.parametrize(
        "argv_tail",
        [
            ["build", "--family", "funnel", "--n", "12", "--out", "g.json"],
            ["detect", "--family", "crawl", "--n", "8", "--psi0", "node:2", "--out", "d"],
            ["winding", "--family", "crawl", "--n", "3", "--psi0", "qk:1", "--out", "w"],
            ["noise", "--a", "0.05", "--realizations", "4", "--seed", "9", "--n", "8",
             "--out", "nz"],
        ],
    )
    def test_replay_reproduces_artifacts_bitwise(self, tmp_path, monkeypatch, argv_tail):
        monkeypatch.setenv("QWSEARCH_OUTDIR", str(tmp_path))
        assert main(argv_tail) == 0
        anchor = tmp_path / argv_tail[-1]
        with open(f"{anchor}.manifest.json") as fh:
            manifest = json.load(fh)
        before = {p: open(p, "rb").read() for p in manifest["artifact_paths"]}
        assert main(manifest["argv"]) == 0
        after = {p: open(p, "rb").read() for p in manifest["artifact_paths"]}
        assert before == after

    def test_every_output_has_manifest(self, tmp_path):
        out = tmp_path / "g.json"
        run(tmp_path, "build", "--family", "crawl", "--n", "6", "--out", out)
        manifest_path = tmp_path / "g.json.manifest.json"
        assert manifest_path.exists()
        manifest = json.loads(manifest_path.read_text())
        assert set(manifest) >= {"command", "parameters", "seed", "artifact_paths",
                                 "tool_version", "argv"}


class TestOutputDirectory:
    def test_env_var_prefixes_relative_paths(self, tmp_path, monkeypatch):
        monkeypatch.setenv("QWSEARCH_OUTDIR", str(tmp_path / "artifacts"))
        assert main(["build", "--family", "crawl", "--n", "5", "--out", "c.json"]) == 0
        assert (tmp_path / "artifacts" / "c.json").exists()


class TestUsageErrors:
    def test_unknown_family_is_usage_error(self, tmp_path):
        assert main(["build", "--family", "ring", "--n", "5",
                     "--out", str(tmp_path / "x.json")]) == 1

    def test_missing_required_flag(self):
        assert main(["build", "--family", "crawl", "--n", "5"]) == 1

    def test_version_flag(self, capsys):
        assert main(["--version"]) == 0
        assert capsys.readouterr().out.strip()
