import json
import os
from hawkpath.cli import cli_main


def write_config(tmp_path, doc, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc), encoding="utf-8")
    return path


def base_doc(out_dir):
    return {
        "kernel": {"family": "exponential", "params": {"amplitude": 0.604, "decay": 1.0}},
        "jump_rate": {"family": "relu-affine", "params": {"baseline": 1.0}},
        "marks": {"distribution": {"family": "point-mass", "value": 1.0}},
        "horizon": 5.0,
        "delta_ladder": [0.5, 0.25],
        "trials": 40,
        "metrics": ["terminal_count", "skorokhod_upper"],
        "sobolev_eta": 0.25,
        "seed": 11,
        "output_dir": str(out_dir),
    }


class TestExitCodes:
    def test_bounds_success(self, tmp_path, capsys):
        out = tmp_path / "out"
        cfg = write_config(tmp_path, base_doc(out))
        assert cli_main(["bounds", str(cfg)]) == 0
        payload = json.loads((out / "bounds.json").read_text())
        assert set(payload) == {"0.5", "0.25"}
        assert payload["0.25"]["stable_continuous"] is True

    def test_malformed_json_exits_2_without_outputs(self, tmp_path):
        out = tmp_path / "out"
        cfg = tmp_path / "bad.json"
        cfg.write_text("{ not json", encoding="utf-8")
        assert cli_main(["bounds", str(cfg), "--output-dir", str(out)]) == 2
        assert not out.exists()

    def test_invalid_config_exits_2_without_outputs(self, tmp_path):
        out = tmp_path / "out"
        doc = base_doc(out)
        doc["delta_ladder"] = [0.25, 0.5]  # not decreasing
        cfg = write_config(tmp_path, doc)
        assert cli_main(["convergence", str(cfg)]) == 2
        assert not out.exists()

    def test_missing_file_exits_2(self, tmp_path):
        assert cli_main(["bounds", str(tmp_path / "nope.json")]) == 2

    def test_unstable_exits_3(self, tmp_path):
        out = tmp_path / "out"
        doc = base_doc(out)
        doc["kernel"] = {"family": "exponential", "params": {"amplitude": 1.3, "decay": 1.0}}
        cfg = write_config(tmp_path, doc)
        assert cli_main(["bounds", str(cfg)]) == 3
        assert cli_main(["convergence", str(cfg)]) == 3


class TestSubcommands:
    def test_simulate_writes_trajectories(self, tmp_path):
        out = tmp_path / "out"
        cfg = write_config(tmp_path, base_doc(out))
        assert cli_main(["simulate", str(cfg)]) == 0
        for field in ("count", "mass", "risk"):
            text = (out / f"simulate_{field}.csv").read_text()
            assert text.splitlines()[0] == "t,value"
        summary = json.loads((out / "simulate_summary.json").read_text())
        assert summary["events"] >= 0

    def test_couple_writes_pair_and_atoms(self, tmp_path):
        out = tmp_path / "out"
        cfg = write_config(tmp_path, base_doc(out))
        assert cli_main(["couple", str(cfg)]) == 0
        atoms = (out / "couple_atoms.csv").read_text().splitlines()
        assert atoms[0] == "tau,theta,y,strip"
        assert len(atoms) > 1
        summary = json.loads((out / "couple_summary.json").read_text())
        assert summary["delta"] == 0.25

    def test_convergence_csv_layout(self, tmp_path):
        out = tmp_path / "out"
        cfg = write_config(tmp_path, base_doc(out))
        assert cli_main(["convergence", str(cfg)]) == 0
        lines = (out / "convergence.csv").read_text().strip().splitlines()
        assert lines[0] == "delta,metric,mean,stderr,theory_shape,flag"
        assert len(lines) == 1 + 2 * 2
        summary = json.loads((out / "convergence_summary.json").read_text())
        assert "terminal_count" in summary["fits"]

    def test_verify_writes_verdicts(self, tmp_path):
        out = tmp_path / "out"
        doc = base_doc(out)
        doc["trials"] = 60
        cfg = write_config(tmp_path, doc)
        assert cli_main(["verify", str(cfg)]) == 0
        lines = (out / "verify.csv").read_text().splitlines()
        assert lines[0] == "check,statistic,bound,margin,passed,detail"
        names = {line.split(",")[0] for line in lines[1:]}
        assert "mean_intensity_continuous" in names


class TestSeedAndReproducibility:
    def test_seed_flag_overrides_config(self, tmp_path):
        out_a = tmp_path / "a"
        out_b = tmp_path / "b"
        out_c = tmp_path / "c"
        cfg = write_config(tmp_path, base_doc(out_a))
        assert cli_main(["convergence", str(cfg)]) == 0
        assert cli_main(["convergence", str(cfg), "--seed", "999", "--output-dir", str(out_b)]) == 0
        assert cli_main(["convergence", str(cfg), "--seed", "11", "--output-dir", str(out_c)]) == 0
        a = (out_a / "convergence.csv").read_bytes()
        b = (out_b / "convergence.csv").read_bytes()
        c = (out_c / "convergence.csv").read_bytes()
        assert a != b
        assert a == c

    def test_worker_env_does_not_change_bytes(self, tmp_path):
        out_a = tmp_path / "w1"
        out_b = tmp_path / "w2"
        cfg = write_config(tmp_path, base_doc(out_a))
        old = os.environ.get("HAWKPATH_WORKERS")
        try:
            os.environ["HAWKPATH_WORKERS"] = "1"
            assert cli_main(["convergence", str(cfg)]) == 0
            os.environ["HAWKPATH_WORKERS"] = "2"
            assert cli_main(["convergence", str(cfg), "--output-dir", str(out_b)]) == 0
        finally:
            if old is None:
                os.environ.pop("HAWKPATH_WORKERS", None)
            else:
                os.environ["HAWKPATH_WORKERS"] = old
        assert (out_a / "convergence.csv").read_bytes() == (out_b / "convergence.csv").read_bytes()
        assert (out_a / "convergence_summary.json").read_bytes() == (
            out_b / "convergence_summary.json"
        ).read_bytes()
