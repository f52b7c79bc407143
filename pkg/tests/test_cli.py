import json

import numpy as np
import pytest
from typer.testing import CliRunner

from layer_0 import STATE_VARS, load_state, momentum_filename, parse_manifest, save_flow_state
from layer_4 import MetricReport
from layer_6 import app

runner = CliRunner()

MANIFEST_HEADER = "hash_id,kaggle_id,description,cluster,nx,ny,nz,split\n"


@pytest.fixture(autouse=True)
def _workdir(monkeypatch, tmp_path):
    monkeypatch.delenv("TSRB_FACTOR", raising=False)
    monkeypatch.chdir(tmp_path)


def _save(state, path, tag="s"):
    save_flow_state(state, path, tag=tag)
    return path


def _write_sample(root, hash_id, state):
    root.mkdir(parents=True, exist_ok=True)
    for var, field in zip(STATE_VARS, state.channels):
        field.values.astype("<f4").tofile(root / momentum_filename(var, hash_id))


def _manifest(path, hashes, n):
    path.write_text(MANIFEST_HEADER + "".join(f"{h},,,,{n},{n},{n},\n" for h in hashes))
    return path


class TestInspect:
    def test_clean_state(self, tmp_path, make_state):
        d = _save(make_state((8, 8, 8)), tmp_path / "fine")
        result = runner.invoke(app, ["inspect", str(d)])
        assert result.exit_code == 0, result.output
        assert "RHO_kgm-3" in result.output
        assert "rho_positive" in result.output and "True" in result.output

    def test_short_file(self, tmp_path, make_state):
        d = _save(make_state((8, 8, 8)), tmp_path / "fine")
        target = d / momentum_filename("UY_ms-1", "s")
        target.write_bytes(target.read_bytes()[:-4])
        result = runner.invoke(app, ["inspect", str(d)])
        assert result.exit_code == 2
        assert "error[E_SIZE]" in result.output

    def test_missing_directory(self, tmp_path):
        result = runner.invoke(app, ["inspect", str(tmp_path / "absent")])
        assert result.exit_code == 2
        assert "error[E_IO]" in result.output

    def test_momentum_hash(self, tmp_path, make_state):
        _write_sample(tmp_path / "hr", "ab12", make_state((8, 8, 8)))
        result = runner.invoke(app, ["inspect", str(tmp_path / "hr"), "--hash", "ab12", "--n", "8"])
        assert result.exit_code == 0, result.output
        assert "8x8x8" in result.output


class TestCoarsenAndBaseline:
    def test_coarsen(self, tmp_path, make_state):
        d = _save(make_state((16, 16, 16)), tmp_path / "fine")
        result = runner.invoke(app, ["coarsen", str(d), str(tmp_path / "coarse"), "--factor", "4"])
        assert result.exit_code == 0, result.output
        assert "4x4x4" in result.output
        coarse = load_state(tmp_path / "coarse")
        assert coarse.grid.shape == (4, 4, 4)
        assert coarse.grid.dx == 4.0

    def test_bad_factor(self, tmp_path, make_state):
        d = _save(make_state((16, 16, 16)), tmp_path / "fine")
        result = runner.invoke(app, ["coarsen", str(d), str(tmp_path / "coarse"), "--factor", "3"])
        assert result.exit_code == 2
        assert "error[E_CONFIG]" in result.output
        assert not (tmp_path / "coarse").exists()

    def test_baseline(self, tmp_path, make_state):
        d = _save(make_state((16, 16, 16)), tmp_path / "fine")
        runner.invoke(app, ["coarsen", str(d), str(tmp_path / "coarse"), "--factor", "4"])
        result = runner.invoke(app, ["baseline", str(tmp_path / "coarse"), str(tmp_path / "up"), "--factor", "4"])
        assert result.exit_code == 0, result.output
        assert str(2738 * 16 ** 3 * 4) in result.output
        assert str(8328 * 16 ** 3 * 4) in result.output
        assert load_state(tmp_path / "up").grid.shape == (16, 16, 16)


class TestEvaluate:
    def test_single_pair(self, tmp_path, make_state):
        d = _save(make_state((24, 24, 24)), tmp_path / "truth")
        result = runner.invoke(app, ["evaluate", str(d), str(d), "--factor", "2", "--out", str(tmp_path / "rep")])
        assert result.exit_code == 0, result.output
        report = MetricReport.load_json(str(tmp_path / "rep" / "report.json"))
        assert report.ssim_rho_u == pytest.approx(1.0, abs=1e-9)
        assert report.mse == 0.0
        lines = (tmp_path / "rep" / "report.csv").read_text().splitlines()
        assert lines[0].startswith("label,") and lines[1].startswith("truth,")

    def test_manifest_batch(self, tmp_path, make_state):
        hashes = ["aa", "bb"]
        for h in hashes:
            truth = make_state((24, 24, 24))
            _write_sample(tmp_path / "truth", h, truth)
            _write_sample(tmp_path / "pred", h, truth)
        manifest = _manifest(tmp_path / "test.csv", hashes, 24)
        result = runner.invoke(app, ["evaluate", str(tmp_path / "pred"), str(tmp_path / "truth"),
                                     "--factor", "2", "--manifest", str(manifest), "--out", str(tmp_path / "rep")])
        assert result.exit_code == 0, result.output
        summary = json.loads((tmp_path / "rep" / "summary.json").read_text())
        assert summary["ssim_rho_u"] == pytest.approx(1.0, abs=1e-9)
        assert summary["nrmse_sgs"] == 0.0
        assert len((tmp_path / "rep" / "report_rows.csv").read_text().splitlines()) == 3

    def test_small_sgs_interior_skips_ssim_sgs(self, tmp_path, make_state):
        d = _save(make_state((16, 16, 16)), tmp_path / "truth")
        result = runner.invoke(app, ["evaluate", str(d), str(d), "--factor", "2", "--out", str(tmp_path / "rep")])
        assert result.exit_code == 0, result.output
        report = MetricReport.load_json(str(tmp_path / "rep" / "report.json"))
        assert report.ssim_sgs is None
        assert report.nrmse_sgs == 0.0 and report.ssim_rho_u == pytest.approx(1.0, abs=1e-9)

    def test_truncated_stats_file(self, tmp_path, make_state):
        d = _save(make_state((24, 24, 24)), tmp_path / "truth")
        stats = tmp_path / "stats.json"
        stats.write_text('{"rho_mean": 1.5, "rho_std": 0.3, "vel_')
        result = runner.invoke(app, ["evaluate", str(d), str(d), "--factor", "2", "--stats", str(stats)])
        assert result.exit_code == 2
        assert "error[E_CONFIG]" in result.output

    def test_stats_file_missing_key(self, tmp_path, make_state):
        d = _save(make_state((24, 24, 24)), tmp_path / "truth")
        stats = tmp_path / "stats.json"
        stats.write_text(json.dumps({"rho_mean": 1.5, "rho_std": 0.3, "vel_mean": 0.0}))
        result = runner.invoke(app, ["evaluate", str(d), str(d), "--factor", "2", "--stats", str(stats)])
        assert result.exit_code == 2
        assert "error[E_CONFIG]" in result.output and "vel_std" in result.output


class TestSample:
    @pytest.fixture
    def manifest(self, tmp_path, make_state):
        hashes = [f"h{i}" for i in range(6)]
        for h in hashes:
            _write_sample(tmp_path / "data", h, make_state((8, 8, 8)))
        return _manifest(tmp_path / "all.csv", hashes, 8)

    def test_repeatable(self, tmp_path, manifest):
        args = ["--data-root", str(tmp_path / "data"), "--k", "2", "--n-target", "4", "--seed", "3"]
        first = runner.invoke(app, ["sample", str(manifest), str(tmp_path / "a.csv")] + args)
        second = runner.invoke(app, ["sample", str(manifest), str(tmp_path / "b.csv")] + args)
        assert first.exit_code == 0, first.output
        assert second.exit_code == 0, second.output
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
        records = parse_manifest(tmp_path / "a.csv")
        assert len(records) == 4
        assert all(r.cluster in (0, 1) and r.split == "train" for r in records)

    def test_target_too_large(self, tmp_path, manifest):
        result = runner.invoke(app, ["sample", str(manifest), str(tmp_path / "a.csv"),
                                     "--data-root", str(tmp_path / "data"), "--n-target", "7"])
        assert result.exit_code == 2
        assert "error[E_SAMPLE]" in result.output
        assert not (tmp_path / "a.csv").exists()


class TestAugmentTest:
    def test_cubic(self, tmp_path, make_state):
        d = _save(make_state((8, 8, 8)), tmp_path / "s")
        result = runner.invoke(app, ["augment-test", str(d)])
        assert result.exit_code == 0, result.output
        assert "max deviation" in result.output
        assert "FAIL" not in result.output

    def test_non_cubic_skips_permutations(self, tmp_path, make_state):
        d = _save(make_state((8, 8, 6)), tmp_path / "s")
        result = runner.invoke(app, ["augment-test", str(d), "--rotations-only"])
        assert result.exit_code == 0, result.output
        assert "skipped (non-cubic)" in result.output


class TestSpectrum:
    def test_writes_table(self, tmp_path, make_state):
        d = _save(make_state((16, 16, 16)), tmp_path / "s")
        out = tmp_path / "spec.csv"
        result = runner.invoke(app, ["spectrum", str(d), str(out)])
        assert result.exit_code == 0, result.output
        assert "parseval" in result.output
        lines = out.read_text().splitlines()
        assert lines[0] == "k,E"
        assert np.isclose(sum(float(line.split(",")[1]) for line in lines[1:]),
                          float(result.output.split("tke = ")[1].split(",")[0]), rtol=1e-6)

    def test_non_cubic(self, tmp_path, make_state):
        d = _save(make_state((16, 16, 8)), tmp_path / "s")
        result = runner.invoke(app, ["spectrum", str(d), str(tmp_path / "spec.csv")])
        assert result.exit_code == 2
        assert "error[E_GRID]" in result.output
