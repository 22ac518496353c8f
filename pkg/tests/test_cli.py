"""CLI harness: exit codes, determinism, manifests, artifact schemas."""

import hashlib
import json
from pathlib import Path

import pytest
import yaml

from macrogame.cli import default_config_path, main
from macrogame.env import ConfigError, load_scenario

pytestmark = pytest.mark.filterwarnings("ignore::DeprecationWarning")


def run(argv):
    return main(argv)


def read(path):
    return Path(path).read_text()


@pytest.fixture(scope="module")
def imarl_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("imarl")
    assert run(["train-imarl", "--out", str(out), "--episodes", "4", "--seed", "7"]) == 0
    return out


class TestConfig:
    def test_packaged_default_loads(self):
        scenario = load_scenario(default_config_path())
        assert scenario.n_households == 2 and scenario.n_firms == 2
        assert scenario.horizon == 40
        assert scenario.household_params[0].skills[0] == 2.0
        assert scenario.firm_params[1].alpha == 1.0

    def test_unknown_key_is_hard_error(self, tmp_path):
        data = yaml.safe_load(read(default_config_path()))
        data["scenario"]["typo_key"] = 1
        bad = tmp_path / "bad.yaml"
        bad.write_text(yaml.safe_dump(data))
        with pytest.raises(ConfigError, match="typo_key"):
            load_scenario(bad)

    def test_missing_config_exits_2(self, tmp_path):
        code = run(
            ["train-imarl", "--out", str(tmp_path / "x"),
             "--config", str(tmp_path / "nope.yaml"), "--episodes", "1"]
        )
        assert code == 2

    def test_unknown_flag_exits_2(self, tmp_path):
        assert run(["train-imarl", "--out", str(tmp_path), "--bogus"]) == 2

    def test_missing_required_flag_exits_2(self):
        assert run(["train-imarl"]) == 2


class TestTrainImarl:
    def test_outputs_exist(self, imarl_dir):
        assert (imarl_dir / "training_curves.csv").exists()
        assert (imarl_dir / "profile.json").exists()
        assert (imarl_dir / "manifest.json").exists()
        for player in ("household", "firm", "central_bank", "government"):
            assert (imarl_dir / "checkpoints" / f"{player}_00.policy").exists()

    def test_curve_rows(self, imarl_dir):
        lines = read(imarl_dir / "training_curves.csv").splitlines()
        # header + episodes * agents
        assert len(lines) == 1 + 4 * 6

    def test_manifest_lists_every_output_with_matching_hash(self, imarl_dir):
        manifest = json.loads(read(imarl_dir / "manifest.json"))
        listed = {o["path"]: o["sha256"] for o in manifest["outputs"]}
        on_disk = {
            str(p.relative_to(imarl_dir))
            for p in imarl_dir.rglob("*")
            if p.is_file() and p.name != "manifest.json"
        }
        assert set(listed) == on_disk
        for rel, digest in listed.items():
            actual = hashlib.sha256((imarl_dir / rel).read_bytes()).hexdigest()
            assert actual == digest

    def test_rerun_byte_identical_csv(self, imarl_dir, tmp_path):
        out2 = tmp_path / "again"
        assert run(
            ["train-imarl", "--out", str(out2), "--episodes", "4", "--seed", "7"]
        ) == 0
        assert read(out2 / "training_curves.csv") == read(
            imarl_dir / "training_curves.csv"
        )


class TestEvaluate:
    def test_row_counts_and_determinism(self, imarl_dir, tmp_path):
        eval_a = tmp_path / "eval_a"
        eval_b = tmp_path / "eval_b"
        for out in (eval_a, eval_b):
            code = run(
                ["evaluate", "--run", str(imarl_dir), "--out", str(out),
                 "--episodes", "3", "--seed", "11"]
            )
            assert code == 0
        body_a = read(eval_a / "episode_logs.csv")
        assert body_a == read(eval_b / "episode_logs.csv")
        lines = body_a.splitlines()
        # header + episodes * horizon * agents
        assert len(lines) == 1 + 3 * 40 * 6

    def test_checkpoints_not_mutated(self, imarl_dir, tmp_path):
        checkpoint = imarl_dir / "checkpoints" / "household_00.policy"
        before = hashlib.sha256(checkpoint.read_bytes()).hexdigest()
        assert run(
            ["evaluate", "--run", str(imarl_dir), "--out", str(tmp_path / "e"),
             "--episodes", "2", "--seed", "1"]
        ) == 0
        assert hashlib.sha256(checkpoint.read_bytes()).hexdigest() == before

    def test_run_without_profile_errors(self, tmp_path):
        empty = tmp_path / "empty"
        empty.mkdir()
        code = run(
            ["evaluate", "--run", str(empty), "--out", str(tmp_path / "o"),
             "--episodes", "1"]
        )
        assert code == 2


class TestFactsCommand:
    def test_verdicts_written(self, imarl_dir, tmp_path):
        eval_dir = tmp_path / "eval"
        assert run(
            ["evaluate", "--run", str(imarl_dir), "--out", str(eval_dir),
             "--episodes", "4", "--seed", "2"]
        ) == 0
        facts_dir = tmp_path / "facts"
        assert run(
            ["facts", "--log", str(eval_dir / "episode_logs.csv"),
             "--out", str(facts_dir)]
        ) == 0
        verdicts = json.loads(read(facts_dir / "facts.json"))
        assert set(verdicts) == {"law_of_demand", "rate_inflation_relation"}
        for record in verdicts.values():
            assert record["verdict"] in ("pass", "fail", "inconclusive")


class TestPsroPipeline:
    @pytest.fixture(scope="class")
    def psro_dir(self, tmp_path_factory):
        out = tmp_path_factory.mktemp("psro")
        code = run(
            ["train-psro", "--out", str(out), "--epochs", "1", "--episodes", "3",
             "--runs", "1", "--seed", "5"]
        )
        assert code == 0
        return out

    def test_outputs(self, psro_dir):
        profile = json.loads(read(psro_dir / "profile.json"))
        assert profile["scheme"] == "psro"
        for player in ("household", "firm", "central_bank", "government"):
            assert len(profile["strategies"][player]) == 2  # initial + 1 epoch
            assert abs(sum(profile["probs"][player]) - 1.0) < 1e-9
        game = json.loads(read(psro_dir / "game.json"))
        assert game["sizes"] == [2, 2, 2, 2]
        assert len(game["utilities"]) == 16 * 4
        diagnostics = json.loads(read(psro_dir / "diagnostics.json"))
        assert diagnostics[0]["cells_evaluated"] == 15
        tensor_lines = read(psro_dir / "utility_tensor.csv").splitlines()
        assert len(tensor_lines) == 1 + 16 * 4

    def test_export_game(self, psro_dir, tmp_path):
        out = tmp_path / "export"
        assert run(["export-game", "--run", str(psro_dir), "--out", str(out)]) == 0
        exported = json.loads(read(out / "game.json"))
        assert exported["sizes"] == [2, 2, 2, 2]

    def test_regret_command(self, psro_dir, imarl_dir, tmp_path):
        out = tmp_path / "regret"
        code = run(
            ["regret", "--imarl", str(imarl_dir), "--psro", str(psro_dir),
             "--runs", "2", "--out", str(out), "--seed", "5"]
        )
        assert code == 0
        table = read(out / "regret_report.txt")
        assert "Household" in table and "Total" in table
        assert "imarl" in table and "psro" in table
        csv_lines = read(out / "regret_report.csv").splitlines()
        # header + 2 schemes * (4 types + total)
        assert len(csv_lines) == 1 + 2 * 5
        for line in csv_lines[1:]:
            value = float(line.split(",")[3])
            assert value >= 0.0
