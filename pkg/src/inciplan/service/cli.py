"""Command-line interface driving every pipeline stage."""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from inciplan.domain import DomainError, load_network, save_network
from inciplan.numerics import NumericsError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="inciplan",
        description="Incident signal-plan recommendation pipeline",
    )
    parser.add_argument("--config", help="config file (or set INCIPLAN_CONFIG)")
    parser.add_argument("--seed", type=int, help="override the run seed")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("ingest", help="turn raw feeds into model-ready feature frames")
    p.add_argument("--network", required=True)
    p.add_argument("--feeds", required=True)
    p.add_argument("--out-frames", required=True, help="output .npz of feature matrices")
    p.add_argument("--out-pipeline", required=True, help="output scaler/reference state")

    p = sub.add_parser("train-predictor", help="fit the speed forecaster")
    p.add_argument("--network", required=True)
    p.add_argument("--feeds", required=True)
    p.add_argument("--engagement-log", help="exclude engagement days from training")
    p.add_argument("--out-checkpoint", required=True)
    p.add_argument("--out-pipeline", required=True)
    p.add_argument("--no-attention", action="store_true", help="train the ablation baseline")

    p = sub.add_parser("train-associator", help="fit the plan-ranking kernel")
    p.add_argument("--network", required=True)
    p.add_argument("--plans", required=True)
    p.add_argument("--pipeline", required=True)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--feeds", required=True, action="append",
                   help="feed dir with engagements.jsonl (repeatable)")
    p.add_argument("--out", required=True, help="output rank model file")

    p = sub.add_parser("replay", help="replay a feed directory through trained models")
    _replay_args(p)

    p = sub.add_parser("evaluate", help="emit forecast-error and recommendation reports")
    _replay_args(p)
    p.add_argument("--with-lasso", action="store_true", help="include the lasso baseline row")
    p.add_argument("--lasso-segments", type=int, default=4,
                   help="how many target segments the lasso row covers (it fits one model per segment and horizon)")
    p.add_argument("--no-attention-checkpoint", help="include the ablation baseline row")

    p = sub.add_parser("scenario", help="synthetic scenario tools")
    scen = p.add_subparsers(dest="scenario_verb", required=True)
    g = scen.add_parser("generate", help="write synthetic feed files")
    g.add_argument("--out", required=True)
    g.add_argument("--preset", default="training",
                   help="training | plan-A..plan-F | quiet (ignored with --spec)")
    g.add_argument("--spec", help="scenario spec file to generate from")
    g.add_argument("--alert-delay", type=int, default=20)
    r = scen.add_parser("replay", help="alias of the top-level replay verb")
    _replay_args(r)

    p = sub.add_parser("serve", help="run the HTTP service over a feed directory")
    p.add_argument("--feeds", help="feed directory (defaults to config path)")
    p.add_argument("--port", type=int)
    p.add_argument("--host")
    p.add_argument("--step-seconds", type=float, help="wall-clock pacing per 5-min step")

    p = sub.add_parser("init-demo", help="build a ready-to-serve demo artifact directory")
    p.add_argument("--out", required=True)
    p.add_argument("--quick", action="store_true", help="small model, few epochs")

    return parser


def _replay_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--network", required=True)
    p.add_argument("--plans", required=True)
    p.add_argument("--pipeline", required=True)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--rank-model", required=True)
    p.add_argument("--feeds", required=True)
    p.add_argument("--out-events", help="write the event stream as JSONL")
    p.add_argument("--report", help="write the text report here (default stdout)")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        from inciplan.service.config import load_config

        config = load_config(args.config)
        if args.seed is not None:
            config.seed = args.seed
        return _dispatch(args, config)
    except (DomainError, NumericsError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _dispatch(args, config) -> int:
    if args.verb == "ingest":
        return _cmd_ingest(args, config)
    if args.verb == "train-predictor":
        return _cmd_train_predictor(args, config)
    if args.verb == "train-associator":
        return _cmd_train_associator(args, config)
    if args.verb == "replay":
        return _cmd_replay(args, config)
    if args.verb == "evaluate":
        return _cmd_evaluate(args, config)
    if args.verb == "scenario":
        if args.scenario_verb == "generate":
            return _cmd_scenario_generate(args, config)
        return _cmd_replay(args, config)
    if args.verb == "serve":
        return _cmd_serve(args, config)
    if args.verb == "init-demo":
        return _cmd_init_demo(args, config)
    raise DomainError(f"unknown verb {args.verb!r}")


# -- shared assembly ----------------------------------------------------------


def _layout_for(config, model):
    from inciplan.ingest.pipeline import FeatureLayout, concat_scope_indices

    return FeatureLayout(
        n_segments=model.n_segments,
        use_speed=config.features.use_speed,
        use_slowdown=config.features.use_slowdown,
        use_incidents=config.features.use_incidents,
        use_weather=config.features.use_weather,
        use_time=config.features.use_time,
        concat_segment_indices=concat_scope_indices(
            model, config.features.incident_concat_scope
        ),
    )


def _load_feed_output(feed_dir, model):
    from inciplan.service.api import read_feed_directory

    return read_feed_directory(feed_dir, model)


def _fit_pipeline_and_frames(output, model, config, fit_timestamps=None):
    """Fit scalers (training timestamps only, when given) and build frames."""
    from inciplan.ingest.incidents import status_timeline
    from inciplan.ingest.pipeline import FeaturePipeline, weather_for_timeline

    timeline = output.timeline
    weather = weather_for_timeline(output.weather, timeline)
    statuses = status_timeline(output.alerts, output.closures, timeline, model)
    if fit_timestamps is None:
        fit_frames = output.speed_frames
        fit_weather = weather
    else:
        keep = set(fit_timestamps)
        fit_frames = [f for f in output.speed_frames if f.timestamp in keep]
        fit_weather = [w for w, f in zip(weather, output.speed_frames) if f.timestamp in keep]
    pipeline = FeaturePipeline(model=model).fit(fit_frames, fit_weather)
    frames = pipeline.build_frames(output.speed_frames, statuses, weather)
    return pipeline, frames


def _engine_from_paths(args, config):
    from inciplan.associator import PlanKeyMatrix, load_plans, load_rank_model
    from inciplan.ingest.pipeline import FeaturePipeline
    from inciplan.predictor.seq2seq import Seq2SeqSpeedForecaster
    from inciplan.scenario.replay import ReplayEngine

    model = load_network(args.network)
    pipeline = FeaturePipeline.load(args.pipeline, model)
    model = pipeline.model
    plans = PlanKeyMatrix(load_plans(args.plans), model)
    forecaster = Seq2SeqSpeedForecaster.load(args.checkpoint)
    weights, _ = load_rank_model(args.rank_model)
    engine = ReplayEngine(
        model=model,
        pipeline=pipeline,
        layout=_layout_for(config, model),
        forecaster=forecaster,
        key_matrix=plans,
        weights=weights,
        lookback=config.predictor.lookback_steps,
        dwell_minutes=config.associator.dwell_minutes,
    )
    return engine


# -- verbs ---------------------------------------------------------------------


def _cmd_ingest(args, config) -> int:
    model = load_network(args.network)
    output = _load_feed_output(args.feeds, model)
    pipeline, frames = _fit_pipeline_and_frames(output, model, config)
    layout = _layout_for(config, pipeline.model)
    np.savez(
        args.out_frames,
        timestamps=np.array([f.timestamp for f in frames]),
        features=pipeline.flatten_frames(frames, layout),
        tti=np.stack([f.tti for f in frames]),
        targets_scaled=pipeline.target_scaled(frames),
        incident_status=np.stack([f.incident_status for f in frames]),
    )
    pipeline.save(args.out_pipeline)
    print(f"ingested {len(frames)} frames -> {args.out_frames}")
    return 0


def _cmd_train_predictor(args, config) -> int:
    from inciplan.predictor import build_samples, exclude_engagement_days, split_train_test
    from inciplan.predictor.seq2seq import Seq2SeqSpeedForecaster
    from inciplan.associator.evaluation import windows_from_log
    from inciplan.service.eventlog import EngagementLog

    model = load_network(args.network)
    output = _load_feed_output(args.feeds, model)
    pipeline, frames = _fit_pipeline_and_frames(output, model, config)
    model = pipeline.model
    layout = _layout_for(config, model)
    samples = build_samples(
        pipeline.flatten_frames(frames, layout),
        pipeline.target_scaled(frames),
        [f.timestamp for f in frames],
        lookback=config.predictor.lookback_steps,
    )
    if args.engagement_log:
        windows = windows_from_log(EngagementLog(args.engagement_log).records)
        samples = exclude_engagement_days(samples, [(w.start, w.end) for w in windows])
    train_idx, test_idx = split_train_test(samples, seed=config.seed)
    forecaster = Seq2SeqSpeedForecaster(
        layout=layout,
        hidden_size=config.predictor.hidden_size,
        n_layers=config.predictor.n_layers,
        dropout=config.predictor.dropout,
        head_size=config.predictor.attention_size,
        use_attention=not args.no_attention,
        lr=config.predictor.lr,
        teacher_forcing=config.predictor.teacher_forcing,
        batch_size=config.predictor.batch_size,
        max_epochs=config.predictor.max_epochs,
        patience=config.predictor.patience,
        grad_clip=config.predictor.grad_clip,
        seed=config.seed,
    )
    forecaster.fit(samples.subset(train_idx))
    forecaster.save(args.out_checkpoint)
    pipeline.save(args.out_pipeline)
    history = forecaster.history_
    best = history.epochs[history.best_epoch]
    print(
        f"trained {len(train_idx)} samples, {len(history.epochs)} epochs; "
        f"best val loss {best['val_loss']:.6f} (epoch {best['epoch']}) -> {args.out_checkpoint}"
    )
    return 0


def _cmd_train_associator(args, config) -> int:
    from inciplan.associator import PairwiseRankLR, build_pairwise_dataset, save_rank_model
    from inciplan.associator.evaluation import windows_from_log
    from inciplan.associator import PlanKeyMatrix, load_plans
    from inciplan.ingest.pipeline import FeaturePipeline
    from inciplan.predictor.seq2seq import Seq2SeqSpeedForecaster
    from inciplan.scenario.replay import ReplayEngine, harvest_training_records
    from inciplan.scenario.generate import ReplayOutput
    from inciplan.scenario.spec import EngagementScript

    model = load_network(args.network)
    pipeline = FeaturePipeline.load(args.pipeline, model)
    model = pipeline.model
    plans = PlanKeyMatrix(load_plans(args.plans), model)
    forecaster = Seq2SeqSpeedForecaster.load(args.checkpoint)
    engine = ReplayEngine(
        model=model, pipeline=pipeline, layout=_layout_for(config, model),
        forecaster=forecaster, key_matrix=plans, weights=np.zeros(105),
        lookback=config.predictor.lookback_steps,
        dwell_minutes=config.associator.dwell_minutes,
    )
    records = []
    for feed_dir in args.feeds:
        output = _load_feed_output(feed_dir, model)
        windows = windows_from_log(output.engagements)
        output = ReplayOutput(
            **{
                **vars(output),
                "spec": output.spec.__class__(
                    seed=output.spec.seed,
                    start_minute=output.spec.start_minute,
                    duration=output.spec.duration,
                    engagements=tuple(
                        EngagementScript(w.plan_id, w.start, w.end) for w in windows
                    ),
                ),
            }
        )
        records.extend(harvest_training_records(output, engine))
    X, y = build_pairwise_dataset(records, plans)
    rank = PairwiseRankLR(l1_penalty=config.associator.l1_penalty).fit(X, y)
    save_rank_model(args.out, rank.coef_, config.associator.l1_penalty)
    nonzero = int(np.count_nonzero(rank.coef_))
    print(
        f"fitted rank kernel on {len(records)} records ({X.shape[0]} pairs); "
        f"{nonzero}/105 features selected -> {args.out}"
    )
    return 0


def _cmd_replay(args, config) -> int:
    from inciplan.associator.evaluation import evaluate_recommendations, windows_from_log
    from inciplan.scenario.replay import replay

    engine = _engine_from_paths(args, config)
    output = _load_feed_output(args.feeds, engine.model)
    result = replay(output, engine)
    if args.out_events:
        result.write_events(args.out_events)
    lines = [f"replayed {len(result.events)} steps, {len(result.changes)} plan changes"]
    windows = windows_from_log(output.engagements)
    if windows:
        report = evaluate_recommendations(
            result.timeline,
            windows,
            first_alerts=None,
        )
        lines.append(
            f"macro precision {report.macro_precision:.3f}, recall {report.macro_recall:.3f}"
        )
        for plan, coverage in sorted(report.window_coverage.items()):
            lines.append(f"  plan {plan}: window coverage {coverage:.3f}")
    text = "\n".join(lines) + "\n"
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(text)
    print(text, end="")
    return 0


def _cmd_evaluate(args, config) -> int:
    from inciplan.predictor import (
        HistoricalAverageBaseline,
        LassoRegression,
        LatestObservationBaseline,
        build_lagged_matrix,
        build_samples,
        horizon_table,
        mape,
        rmse,
        split_train_test,
    )
    from inciplan.scenario.replay import replay
    from inciplan.associator.evaluation import evaluate_recommendations, windows_from_log

    engine = _engine_from_paths(args, config)
    model = engine.model
    output = _load_feed_output(args.feeds, model)
    pipeline = engine.pipeline
    _, frames = _fit_pipeline_and_frames(output, load_network(args.network), config)
    # frames built with the SERVING pipeline's scalers for consistency
    from inciplan.ingest.incidents import status_timeline
    from inciplan.ingest.pipeline import weather_for_timeline

    timeline = output.timeline
    frames = pipeline.build_frames(
        output.speed_frames,
        status_timeline(output.alerts, output.closures, timeline, model),
        weather_for_timeline(output.weather, timeline),
    )
    samples = build_samples(
        pipeline.flatten_frames(frames, engine.layout),
        pipeline.target_scaled(frames),
        timeline,
        lookback=engine.lookback,
    )
    _, test_idx = split_train_test(samples, seed=config.seed)
    test = samples.subset(test_idx)
    target_idx = model.target_indices()
    actual_mph = np.stack(
        [pipeline.unscale_targets(test.Y[i]) for i in range(len(test))]
    )

    horizons = (5, 10, 15, 20, 25, 30)
    rmse_rows: dict[str, dict[int, float]] = {}
    mape_rows: dict[str, dict[int, float]] = {}
    notes: list[str] = []

    def add_rows(name: str, pred_mph: np.ndarray) -> None:
        rmse_rows[name] = {
            h: rmse(pred_mph[:, k], actual_mph[:, k]) for k, h in enumerate(horizons)
        }
        mape_rows[name] = {
            h: 100.0 * mape(pred_mph[:, k], actual_mph[:, k]) for k, h in enumerate(horizons)
        }

    pred_scaled = engine.forecaster.predict(test.X, test.y0)
    add_rows(
        "encoder-decoder-attention",
        np.stack([pipeline.unscale_targets(pred_scaled[i]) for i in range(len(test))]),
    )

    persistence = LatestObservationBaseline()
    current_mph = np.stack(
        [pipeline.unscale_targets(test.y0[i]) for i in range(len(test))]
    )
    add_rows(
        "latest-observation",
        np.stack([persistence.predict(current_mph[i]) for i in range(len(test))]),
    )

    historical = HistoricalAverageBaseline()
    all_mph = np.stack([f.speeds[target_idx] for f in output.speed_frames])
    historical.fit(timeline, all_mph)
    try:
        historical_pred = [historical.predict(int(t), horizon=6) for t in test.timestamps]
        add_rows("historical-average", np.stack(historical_pred))
    except DomainError:
        notes.append(
            "historical-average skipped: needs same-weekday profiles in the trailing 28 days"
        )

    if args.no_attention_checkpoint:
        from inciplan.predictor.seq2seq import Seq2SeqSpeedForecaster

        ablation = Seq2SeqSpeedForecaster.load(args.no_attention_checkpoint)
        pred_scaled = ablation.predict(test.X, test.y0)
        add_rows(
            "gru-no-attention",
            np.stack([pipeline.unscale_targets(pred_scaled[i]) for i in range(len(test))]),
        )

    if args.with_lasso:
        # one model per (segment, horizon) on the lagged feature matrix;
        # restricted to the first --lasso-segments targets to stay tractable
        feats = pipeline.flatten_frames(frames, engine.layout)
        lagged = build_lagged_matrix(feats, engine.lookback)
        lag_times = timeline[engine.lookback - 1 :]
        time_to_row = {t: i for i, t in enumerate(lag_times)}
        train_idx_set = set(samples.timestamps[split_train_test(samples, seed=config.seed)[0]])
        covered = min(max(args.lasso_segments, 1), len(target_idx))
        pred = actual_mph[:, :, :covered].copy()
        test_rows = np.stack([lagged[time_to_row[t]] for t in test.timestamps])
        for k, h in enumerate(horizons):
            for seg_pos in range(covered):
                seg_i = target_idx[seg_pos]
                ys, rows = [], []
                for i, t in enumerate(samples.timestamps):
                    if t in train_idx_set:
                        rows.append(lagged[time_to_row[t]])
                        ys.append(samples.Y[i, k, seg_pos])
                reg = LassoRegression().fit(np.stack(rows), np.array(ys))
                scaled = np.clip(reg.predict(test_rows), 0.0, 1.0)
                pred[:, k, seg_pos] = (
                    scaled * pipeline.speed_scaler.range_[seg_i]
                    + pipeline.speed_scaler.min_[seg_i]
                )
        name = f"lasso ({covered} segs)" if covered < len(target_idx) else "lasso"
        rmse_rows[name] = {
            h: rmse(pred[:, k], actual_mph[:, k, :covered]) for k, h in enumerate(horizons)
        }
        mape_rows[name] = {
            h: 100.0 * mape(pred[:, k], actual_mph[:, k, :covered])
            for k, h in enumerate(horizons)
        }

    lines = [
        horizon_table(rmse_rows, "RMSE (mph)", horizons),
        "",
        horizon_table(mape_rows, "MAPE (%)", horizons),
    ]
    lines += notes
    windows = windows_from_log(output.engagements)
    if windows:
        result = replay(output, engine)
        report = evaluate_recommendations(result.timeline, windows)
        lines += [
            "",
            f"recommendation macro precision {report.macro_precision:.3f}, "
            f"recall {report.macro_recall:.3f}",
        ]
    text = "\n".join(lines) + "\n"
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(text)
    print(text, end="")
    return 0


def _cmd_scenario_generate(args, config) -> int:
    from inciplan.scenario import (
        ScenarioSpec,
        generate,
        load_scenario,
        plan_scenario,
        save_scenario,
        training_scenario,
    )
    from inciplan.scenario.spec import DAY_START

    if args.spec:
        spec = load_scenario(args.spec)
    elif args.preset == "training":
        spec = training_scenario(seed=config.seed)
    elif args.preset == "quiet":
        spec = ScenarioSpec(seed=config.seed, start_minute=DAY_START, duration=240)
    elif args.preset.startswith("plan-"):
        spec = plan_scenario(args.preset[5:], seed=config.seed, alert_delay=args.alert_delay)
    else:
        raise DomainError(f"unknown scenario preset {args.preset!r}")
    os.makedirs(args.out, exist_ok=True)
    output = generate(spec)
    output.write(args.out)
    save_scenario(os.path.join(args.out, "scenario.json"), spec)
    save_network(output.network, os.path.join(args.out, "network.json"))
    from inciplan.associator import save_plans
    from inciplan.scenario import default_plans

    save_plans(os.path.join(args.out, "plans.json"), default_plans())
    print(f"generated {len(output.speed_frames)} frames -> {args.out}")
    return 0


def _cmd_serve(args, config) -> int:
    from inciplan.service.api import serve

    if args.port is not None:
        config.server.port = args.port
    if args.host is not None:
        config.server.host = args.host
    if args.step_seconds is not None:
        config.server.step_seconds = args.step_seconds
    serve(config, args.feeds)
    return 0


def _cmd_init_demo(args, config) -> int:
    from inciplan.service.fixture import build_demo_artifacts

    build_demo_artifacts(args.out, seed=config.seed, quick=args.quick)
    print(f"demo artifacts ready in {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
