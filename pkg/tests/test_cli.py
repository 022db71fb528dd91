import json

import numpy as np
import pytest

from pdlab.cli import main

DR_LINES_CFG = {
    "seed": 42,
    "space": {"kind": "hilbert", "dim": 2},
    "subspaces": [
        [[[1.0, 0.0], [0.0, 0.0]]],
        [[[0.5, 0.0], [0.8660254037844386, 0.0]]],
    ],
    "operator": {"kind": "dr"},
    "analyses": ["dr-rate"],
    "dr_rate_n": 50,
}


def write_cfg(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def read_report(outdir):
    with open(outdir / "report.json") as fh:
        return json.load(fh)


class TestRun:
    def test_dr_rate_lines(self, tmp_path):
        cfg = write_cfg(tmp_path, DR_LINES_CFG)
        out = tmp_path / "out"
        assert main(["run", "--config", cfg, "--out", str(out)]) == 0
        report = read_report(out)
        assert report["analyses"]["dr-rate"]["c"] == pytest.approx(0.5, abs=1e-12)
        assert report["analyses"]["dr-rate"]["max_excess"] <= 0.0
        assert (out / "dr_rate.csv").exists()

    def test_bad_weights_exit_1(self, tmp_path, capsys):
        cfg = dict(DR_LINES_CFG)
        cfg["operator"] = {"kind": "convex",
                           "terms": [{"weight": 0.4, "product": [1]},
                                     {"weight": 0.5, "product": [2]}]}
        path = write_cfg(tmp_path, cfg)
        assert main(["run", "--config", path, "--out", str(tmp_path / "o")]) == 1
        assert "weight" in capsys.readouterr().err

    def test_unknown_analysis_exit_1(self, tmp_path, capsys):
        cfg = dict(DR_LINES_CFG)
        cfg["analyses"] = ["does-not-exist"]
        path = write_cfg(tmp_path, cfg)
        assert main(["run", "--config", path, "--out", str(tmp_path / "o")]) == 1
        assert "does-not-exist" in capsys.readouterr().err

    def test_ritt_on_map(self, tmp_path):
        cfg = {
            "seed": 3,
            "space": {"kind": "hilbert", "dim": 6},
            "subspaces": {"random": {"count": 2, "dims": [2, 3]}},
            "operator": {"kind": "map"},
            "analyses": ["ritt"],
            "iterations": 300,
        }
        path = write_cfg(tmp_path, cfg)
        out = tmp_path / "out"
        assert main(["run", "--config", path, "--out", str(out)]) == 0
        report = read_report(out)
        assert report["flags"]["ritt"] is True
        header = (out / "ritt.csv").read_text().splitlines()[0]
        assert header == "n,value"

    def test_failing_analysis_exit_2(self, tmp_path, capsys):
        cfg = dict(DR_LINES_CFG)
        cfg["analyses"] = ["slow"]
        cfg["slow_rates"] = [0.5, 0.9]  # not monotone: the check must fail
        path = write_cfg(tmp_path, cfg)
        assert main(["run", "--config", path, "--out", str(tmp_path / "o")]) == 2
        assert "slow" in capsys.readouterr().err

    def test_flags_recomputable_from_csv(self, tmp_path):
        cfg = dict(DR_LINES_CFG)
        path = write_cfg(tmp_path, cfg)
        out = tmp_path / "out"
        main(["run", "--config", path, "--out", str(out)])
        rows = np.loadtxt(out / "dr_rate.csv", delimiter=",", skiprows=1)
        gaps, bounds = rows[:, 1], rows[:, 2]
        assert (gaps <= bounds + 1e-10).all()

    def test_seed_priority(self, tmp_path, monkeypatch):
        cfg = {
            "seed": 1,
            "space": {"kind": "hilbert", "dim": 5},
            "subspaces": {"random": {"count": 2, "dims": [2, 2]}},
            "operator": {"kind": "map"},
            "analyses": ["numrange"],
            "hull_angles": 64,
        }
        path = write_cfg(tmp_path, cfg)
        outs = {}
        for tag, env, flag in (("config", None, None), ("env", "7", None),
                               ("flag", "7", 9)):
            if env is not None:
                monkeypatch.setenv("PDLAB_SEED", env)
            else:
                monkeypatch.delenv("PDLAB_SEED", raising=False)
            args = ["run", "--config", path, "--out", str(tmp_path / tag)]
            if flag is not None:
                args += ["--seed", str(flag)]
            assert main(args) == 0
            outs[tag] = read_report(tmp_path / tag)["seed"]
        assert outs == {"config": 1, "env": 7, "flag": 9}

    def test_svg_emitted_when_requested(self, tmp_path):
        cfg = dict(DR_LINES_CFG)
        cfg["output"] = {"csv": True, "svg": True}
        path = write_cfg(tmp_path, cfg)
        out = tmp_path / "out"
        main(["run", "--config", path, "--out", str(out)])
        svg = (out / "dr_rate.svg").read_text()
        assert svg.startswith("<svg ") and svg.rstrip().endswith("</svg>")


class TestSweep:
    def test_theta_sweep_matches_cosine(self, tmp_path):
        cfg = write_cfg(tmp_path, {"seed": 7, "analyses": ["dr-rate"],
                                   "dr_rate_n": 30})
        out = tmp_path / "sweep"
        rc = main(["sweep", "--param", "theta", "--from", str(np.pi / 64),
                   "--to", str(np.pi / 2), "--steps", "16",
                   "--config", cfg, "--out", str(out), "--jobs", "2"])
        assert rc == 0
        rows = np.loadtxt(out / "sweep.csv", delimiter=",", skiprows=1)
        assert rows.shape[0] == 16
        np.testing.assert_allclose(rows[:, 1], np.cos(rows[:, 0]), atol=1e-6)

    def test_dim_sweep_no_nan(self, tmp_path):
        cfg = write_cfg(tmp_path, {
            "seed": 5,
            "subspaces": {"random": {"count": 2, "dims": [2, 2]}},
            "operator": {"kind": "map"},
            "analyses": ["dichotomy"],
            "iterations": 150,
        })
        out = tmp_path / "sweep"
        rc = main(["sweep", "--param", "dim", "--from", "4", "--to", "8",
                   "--steps", "3", "--config", cfg, "--out", str(out)])
        assert rc == 0
        rows = np.loadtxt(out / "sweep.csv", delimiter=",", skiprows=1)
        assert not np.isnan(rows[:, 2]).any()  # fitted r column

    def test_p_sweep_halperin_finite(self, tmp_path):
        cfg = write_cfg(tmp_path, {
            "seed": 2,
            "space": {"kind": "lp", "dim": 4, "p": 2.0},
            "lp_projections": [
                {"blocks": [[0, 1]], "vectors": [[[1, 0], [1, 0]]]},
                {"blocks": [[2, 3]], "vectors": [[[1, 0], [-1, 0]]]},
            ],
            "operator": {"kind": "map"},
            "analyses": ["halperin"],
            "halperin_samples": 1500,
        })
        out = tmp_path / "sweep"
        rc = main(["sweep", "--param", "p", "--from", "1.5", "--to", "4.0",
                   "--steps", "4", "--config", cfg, "--out", str(out)])
        assert rc == 0
        rows = np.loadtxt(out / "sweep.csv", delimiter=",", skiprows=1)
        assert np.isfinite(rows[:, 5]).all()  # C-hat column

    def test_instance_seeds_xor(self, tmp_path):
        cfg = write_cfg(tmp_path, {"seed": 12, "analyses": ["dr-rate"],
                                   "dr_rate_n": 10})
        out = tmp_path / "sweep"
        main(["sweep", "--param", "theta", "--from", "0.3", "--to", "0.9",
              "--steps", "2", "--config", cfg, "--out", str(out)])
        for idx in (0, 1):
            rep = read_report(out / f"instance_{idx:03d}")
            assert rep["seed"] == 12 ^ idx


class TestSlow:
    def test_geometric_rates_bundle(self, tmp_path):
        rates = tmp_path / "rates.csv"
        rates.write_text("".join(f"{0.5 ** n}\n" for n in range(9)))
        out = tmp_path / "slow"
        assert main(["slow", "--rates", str(rates), "--out", str(out)]) == 0
        rows = np.loadtxt(out / "certificate.csv", delimiter=",", skiprows=1)
        assert (rows[:, 1] >= rows[:, 2]).all()
        meta = json.loads((out / "instance.json").read_text())
        assert meta["kappa"] > 0
        assert (out / "m1_basis.csv").exists() and (out / "x.csv").exists()

    def test_empty_rates_exit_1(self, tmp_path, capsys):
        rates = tmp_path / "rates.csv"
        rates.write_text("")
        assert main(["slow", "--rates", str(rates),
                     "--out", str(tmp_path / "o")]) == 1
        assert "empty" in capsys.readouterr().err

    def test_header_line_tolerated(self, tmp_path):
        rates = tmp_path / "rates.csv"
        rates.write_text("rate\n1.0\n0.5\n0.25\n")
        assert main(["slow", "--rates", str(rates),
                     "--out", str(tmp_path / "o")]) == 0


class TestDeterminism:
    def test_same_seed_identical_csv_bytes(self, tmp_path):
        cfg = write_cfg(tmp_path, {
            "seed": 99,
            "space": {"kind": "hilbert", "dim": 5},
            "subspaces": {"random": {"count": 2, "dims": [2, 3]}},
            "operator": {"kind": "map"},
            "analyses": ["dichotomy", "numrange", "ritt", "superpoly"],
            "iterations": 120,
            "hull_angles": 128,
            "superpoly_n": 60,
        })
        outs = []
        for tag in ("a", "b"):
            out = tmp_path / tag
            assert main(["run", "--config", cfg, "--out", str(out)]) == 0
            outs.append(out)
        csvs = sorted(p.name for p in outs[0].glob("*.csv"))
        assert csvs
        for name in csvs:
            assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()
