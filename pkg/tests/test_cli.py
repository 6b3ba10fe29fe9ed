import json

import pytest
from click.testing import CliRunner

from graphrecourse.cli import main
from graphrecourse.datasets import load_tu


@pytest.fixture
def runner():
    return CliRunner()


def tiny_config(tmp_path, **extra):
    doc = dict(dataset={"synthetic_motif": {"n_graphs": 10, "seed": 3}},
               theta=0.1, delta=0.02, k=3, steps=200, budget=4, seed=0)
    doc.update(extra)
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(doc))
    return str(p)


class TestExplainCommands:
    def test_explain_fcr(self, runner, tmp_path):
        res = runner.invoke(main, ["explain-fcr", "--config",
                                   tiny_config(tmp_path)])
        assert res.exit_code == 0, res.output
        out = json.loads(res.output)
        assert out["method"] == "explain-fcr"
        assert 0.0 <= out["coverage"] <= 1.0

    def test_flag_overrides_config(self, runner, tmp_path):
        cfgp = tiny_config(tmp_path)
        a = runner.invoke(main, ["explain-fcr", "--config", cfgp])
        b = runner.invoke(main, ["explain-fcr", "--config", cfgp,
                                 "--budget", "1"])
        assert a.exit_code == 0 and b.exit_code == 0
        assert json.loads(b.output)["coverage"] <= \
               json.loads(a.output)["coverage"]

    def test_explain_fc(self, runner, tmp_path):
        res = runner.invoke(main, ["explain-fc", "--config",
                                   tiny_config(tmp_path), "--cf-budget", "3"])
        assert res.exit_code == 0, res.output
        assert json.loads(res.output)["method"] == "explain-fc"

    def test_baseline(self, runner, tmp_path):
        res = runner.invoke(main, ["baseline-local-rw", "--config",
                                   tiny_config(tmp_path),
                                   "--baseline-steps-per-input", "20"])
        assert res.exit_code == 0, res.output
        assert json.loads(res.output)["method"] == "baseline-local-rw"

    def test_bad_config_is_clean_error(self, runner, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text(json.dumps({"theta": -1.0}))
        res = runner.invoke(main, ["explain-fcr", "--config", str(p)])
        assert res.exit_code != 0
        assert "bad configuration" in res.output


class TestEval:
    def test_eval_merges_reports(self, runner, tmp_path):
        cfgp = tiny_config(tmp_path, output_dir=None)
        outs = []
        for cmd, d in (("explain-fcr", "a"), ("baseline-local-rw", "b")):
            outdir = tmp_path / d
            res = runner.invoke(main, [cmd, "--config", cfgp,
                                       "--output-dir", str(outdir)])
            assert res.exit_code == 0, res.output
            outs.append(str(outdir / "summary.json"))
        res = runner.invoke(main, ["eval", *outs])
        assert res.exit_code == 0, res.output
        doc = json.loads(res.output)
        assert len(doc["table"]) == 2


class TestFixtures:
    def test_gen_fixture_round_trips(self, runner, tmp_path):
        out = tmp_path / "ds"
        res = runner.invoke(main, ["gen-fixture", "--kind", "synthetic-motif",
                                   "--n-graphs", "15", "--seed", "2",
                                   "--output-dir", str(out)])
        assert res.exit_code == 0, res.output
        ds = load_tu(str(out), name="synthetic-motif")
        assert len(ds) == 15

    def test_oracle_check(self, runner):
        res = runner.invoke(main, ["oracle-check", "--seed", "1"])
        assert res.exit_code == 0, res.output
        assert "all oracle checks passed" in res.output
