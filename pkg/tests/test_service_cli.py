import os

import pytest

from inciplan.service.cli import main


@pytest.fixture(scope="module")
def small_config(tmp_path_factory):
    path = tmp_path_factory.mktemp("cfg") / "small.ini"
    path.write_text(
        "[run]\nseed = 3\n"
        "[predictor]\nhidden_size = 10\nn_layers = 1\ndropout = 0\n"
        "attention_size = 10\nlr = 0.01\nmax_epochs = 3\npatience = 3\n"
    )
    return str(path)


@pytest.fixture(scope="module")
def pipeline_dir(tmp_path_factory, small_config):
    """Run the full verb chain once: generate -> ingest -> train x2 -> replay."""
    base = tmp_path_factory.mktemp("chain")
    train_feeds = str(base / "train-feeds")
    fold_feeds = str(base / "fold-a")
    cfg = ["--config", small_config]

    assert main(cfg + ["scenario", "generate", "--preset", "training", "--out", train_feeds]) == 0
    assert main(cfg + ["scenario", "generate", "--preset", "plan-A", "--out", fold_feeds]) == 0

    network = os.path.join(train_feeds, "network.json")
    plans = os.path.join(train_feeds, "plans.json")
    frames = str(base / "frames.npz")
    pipeline = str(base / "pipeline.json")
    checkpoint = str(base / "predictor.ckpt")
    rank_model = str(base / "rank.json")

    assert main(cfg + [
        "ingest", "--network", network, "--feeds", train_feeds,
        "--out-frames", frames, "--out-pipeline", pipeline,
    ]) == 0
    assert main(cfg + [
        "train-predictor", "--network", network, "--feeds", train_feeds,
        "--out-checkpoint", checkpoint, "--out-pipeline", pipeline,
    ]) == 0
    assert main(cfg + [
        "train-associator", "--network", network, "--plans", plans,
        "--pipeline", pipeline, "--checkpoint", checkpoint,
        "--feeds", fold_feeds, "--out", rank_model,
    ]) == 0
    return {
        "base": base, "config": cfg, "network": network, "plans": plans,
        "frames": frames, "pipeline": pipeline, "checkpoint": checkpoint,
        "rank_model": rank_model, "train_feeds": train_feeds, "fold_feeds": fold_feeds,
    }


def model_args(p):
    return [
        "--network", p["network"], "--plans", p["plans"],
        "--pipeline", p["pipeline"], "--checkpoint", p["checkpoint"],
        "--rank-model", p["rank_model"],
    ]


class TestCliChain:
    def test_artifacts_exist(self, pipeline_dir):
        for key in ("frames", "pipeline", "checkpoint", "rank_model"):
            assert os.path.exists(pipeline_dir[key])

    def test_replay_writes_events_and_report(self, pipeline_dir):
        p = pipeline_dir
        events = str(p["base"] / "events.jsonl")
        report = str(p["base"] / "replay.txt")
        code = main(p["config"] + [
            "replay", *model_args(p), "--feeds", p["fold_feeds"],
            "--out-events", events, "--report", report,
        ])
        assert code == 0
        assert os.path.exists(events)
        assert "macro precision" in open(report).read()

    def test_replay_deterministic_across_runs(self, pipeline_dir):
        p = pipeline_dir
        outs = []
        for name in ("a", "b"):
            events = str(p["base"] / f"det-{name}.jsonl")
            assert main(p["config"] + [
                "replay", *model_args(p), "--feeds", p["fold_feeds"],
                "--out-events", events,
            ]) == 0
            outs.append(open(events, "rb").read())
        assert outs[0] == outs[1]

    def test_evaluate_emits_horizon_tables(self, pipeline_dir, capsys):
        p = pipeline_dir
        report = str(p["base"] / "eval.txt")
        code = main(p["config"] + [
            "evaluate", *model_args(p), "--feeds", p["train_feeds"], "--report", report,
            "--with-lasso", "--lasso-segments", "1",
        ])
        assert code == 0
        text = open(report).read()
        assert "RMSE (mph)" in text
        assert "MAPE (%)" in text
        assert "encoder-decoder-attention" in text
        assert "latest-observation" in text
        assert "historical-average" in text  # row or skip note
        assert "lasso" in text
        assert "30 min" in text


class TestCliContracts:
    def test_help_exits_zero(self):
        with pytest.raises(SystemExit) as exc:
            main(["evaluate", "--help"])
        assert exc.value.code == 0

    def test_unknown_verb_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2
        assert "usage" in capsys.readouterr().err.lower()

    def test_missing_feed_path_reported(self, pipeline_dir, capsys):
        p = pipeline_dir
        code = main(p["config"] + [
            "train-predictor", "--network", p["network"],
            "--feeds", "/nonexistent/feeds",
            "--out-checkpoint", "/tmp/x.ckpt", "--out-pipeline", "/tmp/x.json",
        ])
        assert code == 1
        assert "/nonexistent/feeds" in capsys.readouterr().err
