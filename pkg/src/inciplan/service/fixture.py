"""One-shot builder for a ready-to-serve demo artifact directory."""

from __future__ import annotations

import os

import numpy as np

from inciplan.associator import (
    PairwiseRankLR,
    PlanKeyMatrix,
    build_pairwise_dataset,
    save_plans,
    save_rank_model,
)
from inciplan.domain import save_network
from inciplan.ingest.incidents import status_timeline
from inciplan.ingest.pipeline import (
    FeatureLayout,
    FeaturePipeline,
    concat_scope_indices,
    weather_for_timeline,
)
from inciplan.predictor import build_samples
from inciplan.predictor.seq2seq import Seq2SeqSpeedForecaster
from inciplan.scenario import (
    default_network,
    default_plans,
    generate,
    plan_scenario,
    save_scenario,
    training_scenario,
)
from inciplan.scenario.replay import ReplayEngine, harvest_training_records
from inciplan.service.config import CONFIG_ENV_VAR  # noqa: F401  (documented in README)


def build_demo_artifacts(out_dir, seed: int = 0, quick: bool = True) -> dict:
    """Generate feeds, train both models, and write a pointing config.

    The live feed directory replays plan C's scenario while the rank model
    is trained on plans A, D, and F only, so the served demo exercises the
    zero-shot path. ``quick`` shrinks the forecaster for fast setup.
    """
    os.makedirs(out_dir, exist_ok=True)
    paths = {
        "network": os.path.join(out_dir, "network.json"),
        "plans": os.path.join(out_dir, "plans.json"),
        "pipeline": os.path.join(out_dir, "pipeline.json"),
        "checkpoint": os.path.join(out_dir, "predictor.ckpt"),
        "rank_model": os.path.join(out_dir, "rank_model.json"),
        "engagement_log": os.path.join(out_dir, "engagements.jsonl"),
        "feeds": os.path.join(out_dir, "feeds"),
        "train_feeds": os.path.join(out_dir, "train-feeds"),
        "config": os.path.join(out_dir, "config.ini"),
    }

    model = default_network()
    train_spec = training_scenario(seed=seed, days=2 if quick else 3)
    train_out = generate(train_spec)
    os.makedirs(paths["train_feeds"], exist_ok=True)
    train_out.write(paths["train_feeds"])
    save_scenario(os.path.join(paths["train_feeds"], "scenario.json"), train_spec)

    pipeline = FeaturePipeline(model=model).fit(train_out.speed_frames, train_out.weather)
    model = pipeline.model
    save_network(model, paths["network"])
    save_plans(paths["plans"], default_plans())
    pipeline.save(paths["pipeline"])

    layout = FeatureLayout(
        n_segments=model.n_segments,
        concat_segment_indices=concat_scope_indices(model, "targets"),
    )
    timeline = train_out.timeline
    frames = pipeline.build_frames(
        train_out.speed_frames,
        status_timeline(train_out.alerts, train_out.closures, timeline, model),
        weather_for_timeline(train_out.weather, timeline),
    )
    samples = build_samples(
        pipeline.flatten_frames(frames, layout),
        pipeline.target_scaled(frames),
        timeline,
    )
    forecaster = Seq2SeqSpeedForecaster(
        layout=layout,
        hidden_size=16 if quick else 64,
        n_layers=1 if quick else 2,
        dropout=0.0 if quick else 0.2,
        head_size=16 if quick else 64,
        lr=0.01 if quick else 0.002,
        max_epochs=6 if quick else 60,
        patience=3 if quick else 5,
        seed=seed,
    )
    forecaster.fit(samples)
    forecaster.save(paths["checkpoint"])

    key_matrix = PlanKeyMatrix(default_plans(), model)
    engine = ReplayEngine(
        model=model, pipeline=pipeline, layout=layout, forecaster=forecaster,
        key_matrix=key_matrix, weights=np.zeros(105),
    )
    records = []
    for i, plan in enumerate("ADF"):
        fold_out = generate(plan_scenario(plan, seed=seed + 10 + i))
        records.extend(harvest_training_records(fold_out, engine))
    X, y = build_pairwise_dataset(records, key_matrix)
    rank = PairwiseRankLR(l1_penalty=1.0).fit(X, y)
    save_rank_model(paths["rank_model"], rank.coef_, 1.0)

    live_spec = plan_scenario("C", seed=seed + 99)
    live_out = generate(live_spec)
    os.makedirs(paths["feeds"], exist_ok=True)
    live_out.write(paths["feeds"])
    save_scenario(os.path.join(paths["feeds"], "scenario.json"), live_spec)
    # the service owns its own engagement log; keep the scripted one separate
    os.replace(
        os.path.join(paths["feeds"], "engagements.jsonl"),
        os.path.join(paths["feeds"], "scripted-engagements.jsonl"),
    )

    with open(paths["config"], "w") as fh:
        fh.write(
            "\n".join(
                [
                    "[run]",
                    f"seed = {seed}",
                    "",
                    "[paths]",
                    f"network = {paths['network']}",
                    f"plans = {paths['plans']}",
                    f"feeds = {paths['feeds']}",
                    f"predictor_checkpoint = {paths['checkpoint']}",
                    f"pipeline_state = {paths['pipeline']}",
                    f"rank_model = {paths['rank_model']}",
                    f"engagement_log = {paths['engagement_log']}",
                    "",
                    "[server]",
                    "host = 127.0.0.1",
                    "port = 8732",
                    "step_seconds = 0.05",
                    "",
                ]
            )
        )
    return paths
