import json

import numpy as np
import pytest

from lagfpt.cli import main


def read_header(path):
    meta = {}
    for line in path.read_text().splitlines():
        if not line.startswith("#"):
            break
        key, _, value = line[1:].partition("=")
        meta[key.strip()] = value.strip()
    return meta


def read_columns(path):
    lines = [l for l in path.read_text().splitlines() if l and not l.startswith("#")]
    names = lines[0].split(",")
    data = np.array([[float(v) for v in l.split(",")] for l in lines[1:]])
    return {name: data[:, i] for i, name in enumerate(names)}


@pytest.fixture(scope="module")
def sample_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "sample.txt"
    rc = main(["simulate", "--preset", "A", "--source", "exact",
               "--paths", "10000", "--seed", "0", "--out", str(path)])
    assert rc == 0
    return path


class TestApprox:
    def test_adaptive_default(self, tmp_path):
        out = tmp_path / "a.csv"
        rc = main(["approx", "--preset", "A", "--out", str(out), "--no-fig"])
        assert rc == 0
        meta = read_header(out)
        assert meta["stop_reason"] == "criterion"
        assert 25 <= int(meta["n"]) <= 40
        assert abs(float(meta["h_hat"]) - 1.0) < 1e-4
        cols = read_columns(out)
        assert set(cols) == {"t", "g_true", "g_hat", "abs_err"}
        np.testing.assert_allclose(cols["abs_err"], np.abs(cols["g_true"] - cols["g_hat"]))

    def test_fixed_degree(self, tmp_path):
        out = tmp_path / "a3.csv"
        rc = main(["approx", "--preset", "A", "--n", "3", "--out", str(out), "--no-fig"])
        assert rc == 0
        meta = read_header(out)
        assert meta["n"] == "3"
        assert meta["stop_reason"] == "fixed"

    def test_preset_c_limit_regime_negative_alpha(self, tmp_path):
        out = tmp_path / "c.csv"
        rc = main(["approx", "--preset", "C", "--out", str(out), "--no-fig"])
        assert rc == 0
        meta = read_header(out)
        assert float(meta["alpha"]) < 0
        assert meta["beta_regime"] == "limit"

    def test_explicit_model_flags(self, tmp_path):
        out = tmp_path / "m.csv"
        rc = main(["approx", "--mu", "4", "--sigma", "1.4", "--S", "10", "--y0", "1",
                   "--out", str(out), "--no-fig"])
        assert rc == 0
        assert float(read_header(out)["sup_abs_err"]) < 0.05

    def test_cap_reached_exits_3(self, tmp_path):
        out = tmp_path / "cap.csv"
        # a huge epsilon never triggers the stop criterion, forcing the cap
        rc = main(["approx", "--preset", "A", "--epsilon", "1e12",
                   "--n-cap", "10", "--out", str(out), "--no-fig"])
        assert rc == 3
        assert out.exists()  # grid still written, degraded result flagged via exit code

    def test_figure_rendered_next_to_csv(self, tmp_path):
        out = tmp_path / "fig.csv"
        rc = main(["approx", "--preset", "A", "--n", "8", "--out", str(out)])
        assert rc == 0
        png = out.with_suffix(".png")
        assert png.exists()
        assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"

    def test_custom_grid(self, tmp_path):
        out = tmp_path / "g.csv"
        rc = main(["approx", "--preset", "A", "--grid", "0.1:2.0:20",
                   "--out", str(out), "--no-fig"])
        assert rc == 0
        t = read_columns(out)["t"]
        assert len(t) == 20
        assert t[0] == pytest.approx(0.1)
        assert t[-1] == pytest.approx(2.0)

    def test_reruns_byte_identical(self, tmp_path):
        out1, out2 = tmp_path / "r1.csv", tmp_path / "r2.csv"
        for out in (out1, out2):
            assert main(["approx", "--preset", "B", "--out", str(out), "--no-fig"]) == 0
        assert out1.read_bytes() == out2.read_bytes()


class TestSimulate:
    def test_deterministic(self, tmp_path):
        out1, out2 = tmp_path / "s1.txt", tmp_path / "s2.txt"
        for out in (out1, out2):
            assert main(["simulate", "--preset", "A", "--paths", "200",
                         "--seed", "9", "--out", str(out)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_short_horizon_exits_3_no_partial_file(self, tmp_path):
        out = tmp_path / "cens.txt"
        rc = main(["simulate", "--preset", "A", "--paths", "500",
                   "--t-max", "0.1", "--out", str(out)])
        assert rc == 3
        assert not out.exists()

    def test_header_metadata(self, tmp_path):
        out = tmp_path / "meta.txt"
        assert main(["simulate", "--preset", "B", "--paths", "50",
                     "--seed", "4", "--out", str(out)]) == 0
        meta = read_header(out)
        assert meta["source"] == "milstein"
        assert meta["seed"] == "4"
        assert meta["mu"] == "2.2"


class TestFit:
    def test_mm(self, sample_file, tmp_path):
        out = tmp_path / "mm.json"
        rc = main(["fit", str(sample_file), "--preset", "A", "--method", "mm",
                   "--out", str(out)])
        assert rc == 0
        payload = json.loads(out.read_text())
        assert payload["method"] == "mm"
        assert payload["mu_rel_err"] < 0.05
        assert payload["sigma2_rel_err"] < 0.05

    def test_mle_reduced_schedule(self, sample_file, tmp_path):
        out = tmp_path / "mle.json"
        rc = main(["fit", str(sample_file), "--preset", "A", "--method", "mle",
                   "--n", "8", "--anneal-stages", "10", "--anneal-proposals", "10",
                   "--out", str(out)])
        assert rc == 0
        payload = json.loads(out.read_text())
        assert payload["method"] == "mle"
        assert payload["n_used"] == 8
        assert payload["mu_rel_err"] < 0.2

    def test_one_point_sample_exits_3(self, tmp_path):
        sample = tmp_path / "one.txt"
        sample.write_text("1.5\n")
        rc = main(["fit", str(sample), "--preset", "A", "--method", "mm"])
        assert rc == 3

    def test_missing_sample_exits_4(self, tmp_path):
        rc = main(["fit", str(tmp_path / "nope.txt"), "--preset", "A", "--method", "mm"])
        assert rc == 4


class TestSampleApprox:
    def test_with_truth_columns(self, sample_file, tmp_path):
        out = tmp_path / "sa.csv"
        rc = main(["sample-approx", str(sample_file), "--preset", "A",
                   "--n-cap", "10", "--out", str(out), "--no-fig"])
        # noisy cumulants keep the criterion quiet through degree 10: cap hit,
        # grid still written, degraded result flagged via the exit code
        assert rc == 3
        meta = read_header(out)
        assert meta["stop_reason"] == "cap"
        assert meta["sample_size"] == "10000"
        assert len(meta["kappa"].split(",")) == 10
        cols = read_columns(out)
        assert set(cols) == {"t", "g_true", "g_hat", "abs_err"}

    def test_without_model(self, sample_file, tmp_path):
        out = tmp_path / "nm.csv"
        rc = main(["sample-approx", str(sample_file), "--n-cap", "10",
                   "--out", str(out), "--no-fig"])
        assert rc in (0, 3)
        cols = read_columns(out)
        assert set(cols) == {"t", "g_hat"}


class TestConfigAndErrors:
    def test_unknown_preset_exits_2(self, tmp_path):
        rc = main(["approx", "--preset", "A", "--out", str(tmp_path / "x.csv")])
        assert rc == 0
        rc = main(["approx", "--mu", "0.5", "--sigma", "1.4", "--S", "10", "--y0", "1",
                   "--out", str(tmp_path / "y.csv")])
        assert rc == 2  # drift below sigma^2/2 is not a valid model

    def test_incomplete_model_exits_2(self, tmp_path):
        rc = main(["approx", "--mu", "4", "--out", str(tmp_path / "x.csv")])
        assert rc == 2

    def test_bad_grid_exits_2(self, tmp_path):
        rc = main(["approx", "--preset", "A", "--grid", "oops",
                   "--out", str(tmp_path / "x.csv"), "--no-fig"])
        assert rc == 2

    def test_config_file_flags_win(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"preset": "A", "n": 5, "no_fig": True}))
        out = tmp_path / "cfg.csv"
        rc = main(["--config", str(cfg), "approx", "--n", "7", "--out", str(out)])
        assert rc == 0
        assert read_header(out)["n"] == "7"

    def test_config_file_alone(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"preset": "B", "n": 4, "no_fig": True}))
        out = tmp_path / "cfg2.csv"
        rc = main(["--config", str(cfg), "approx", "--out", str(out)])
        assert rc == 0
        assert read_header(out)["n"] == "4"

    def test_missing_config_exits_2(self, tmp_path):
        rc = main(["--config", str(tmp_path / "nope.json"), "approx",
                   "--preset", "A", "--out", str(tmp_path / "x.csv")])
        assert rc == 2

    def test_bad_config_json_exits_2(self, tmp_path):
        cfg = tmp_path / "bad.json"
        cfg.write_text("{not json")
        rc = main(["--config", str(cfg), "approx", "--preset", "A",
                   "--out", str(tmp_path / "x.csv")])
        assert rc == 2
