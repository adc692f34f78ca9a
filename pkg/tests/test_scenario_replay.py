import numpy as np
import pytest

from inciplan.associator import (
    EngagementWindow,
    PairwiseRankLR,
    PlanKeyMatrix,
    build_pairwise_dataset,
    evaluate_recommendations,
)
from inciplan.domain import NULL_PLAN, DomainError
from inciplan.ingest.pipeline import FeatureLayout, FeaturePipeline, concat_scope_indices
from inciplan.scenario import (
    DAY_START,
    PersistenceForecaster,
    ReplayEngine,
    ReplayOutput,
    ScenarioSpec,
    default_network,
    default_plans,
    generate,
    plan_scenario,
    replay,
    training_scenario,
)
from inciplan.scenario.generate import first_alert_times
from inciplan.scenario.replay import harvest_training_records


@pytest.fixture(scope="module")
def fitted():
    """Pipeline + key matrix fitted once on the training scenario."""
    model = default_network()
    train_out = generate(training_scenario(seed=42))
    pipeline = FeaturePipeline(model=model).fit(train_out.speed_frames, train_out.weather)
    model = pipeline.model
    layout = FeatureLayout(
        n_segments=model.n_segments,
        concat_segment_indices=concat_scope_indices(model, "targets"),
    )
    plans = PlanKeyMatrix(default_plans(), model)
    return model, pipeline, layout, plans


def make_engine(fitted, weights):
    model, pipeline, layout, plans = fitted
    return ReplayEngine(
        model=model,
        pipeline=pipeline,
        layout=layout,
        forecaster=PersistenceForecaster(),
        key_matrix=plans,
        weights=weights,
    )


@pytest.fixture(scope="module")
def trained_weights(fitted):
    """RankLR weights fitted on the A-scenario engagement records."""
    output = generate(plan_scenario("A", seed=100))
    records = harvest_training_records(output, make_engine(fitted, np.zeros(105)))
    model, pipeline, layout, plans = fitted
    X, y = build_pairwise_dataset(records, plans)
    return PairwiseRankLR(l1_penalty=1.0).fit(X, y).coef_


class TestReplay:
    def test_quiescent_scenario_keeps_null_active(self, fitted, trained_weights):
        quiet = generate(ScenarioSpec(seed=5, start_minute=DAY_START, duration=180))
        result = replay(quiet, make_engine(fitted, trained_weights))
        assert {plan for _, plan in result.timeline} == {NULL_PLAN}

    def test_scripted_incident_recommends_its_plan(self, fitted, trained_weights):
        output = generate(plan_scenario("A", seed=7))
        result = replay(output, make_engine(fitted, trained_weights))
        plan, start, end = output.engagement_windows()[0]
        in_window = [p for t, p in result.timeline if start <= t < end]
        assert in_window.count("A") / len(in_window) >= 0.8

    def test_no_lookahead(self, fitted, trained_weights):
        """Replay reads feeds only through until(now) with a monotone clock."""
        output = generate(plan_scenario("C", seed=9))
        calls = []

        class Guarded(ReplayOutput):
            def until(self, now):
                calls.append(now)
                visible = super().until(now)
                assert all(f.timestamp <= now for f in visible.speed_frames)
                assert all(a.timestamp <= now for a in visible.alerts)
                assert all(w.timestamp <= now for w in visible.weather)
                return visible

        guarded = Guarded(**vars(output))
        result = replay(guarded, make_engine(fitted, trained_weights))
        assert calls == output.timeline  # every step asked once, in order
        assert result.events

    def test_withholding_future_frames_changes_nothing(self, fitted, trained_weights):
        output = generate(plan_scenario("D", seed=11))
        full = replay(output, make_engine(fitted, trained_weights))
        # truncated copy: stop mid-scenario; the shared prefix must agree
        cut = len(output.speed_frames) // 2
        truncated = ReplayOutput(
            network=output.network,
            spec=output.spec,
            speed_frames=output.speed_frames[:cut],
            alerts=output.alerts,
            closures=output.closures,
            weather=output.weather,
            engagements=output.engagements,
        )
        partial = replay(truncated, make_engine(fitted, trained_weights))
        for a, b in zip(partial.events, full.events):
            assert a == b

    def test_replay_is_deterministic(self, fitted, trained_weights):
        output = generate(plan_scenario("F", seed=13))
        a = replay(output, make_engine(fitted, trained_weights))
        b = replay(output, make_engine(fitted, trained_weights))
        assert [e.to_json() for e in a.events] == [e.to_json() for e in b.events]

    def test_dwell_respected_in_replay(self, fitted, trained_weights):
        output = generate(plan_scenario("A", seed=15))
        result = replay(output, make_engine(fitted, trained_weights))
        times = [c.timestamp for c in result.changes]
        assert all(b - a >= 20 for a, b in zip(times, times[1:]))

    def test_network_mismatch_rejected(self, fitted):
        model, pipeline, layout, plans = fitted
        bad_layout = FeatureLayout(n_segments=model.n_segments - 1)
        with pytest.raises(DomainError, match="segments"):
            ReplayEngine(
                model=model, pipeline=pipeline, layout=bad_layout,
                forecaster=PersistenceForecaster(), key_matrix=plans,
                weights=np.zeros(105),
            )


class TestLeaveOneOut:
    def test_held_out_plan_recommended_with_lead(self, fitted):
        model, pipeline, layout, plans = fitted
        folds = {
            p: generate(plan_scenario(p, seed=100 + i, alert_delay=[20, 25, 20, 15][i]))
            for i, p in enumerate("ACDF")
        }
        records = {
            p: harvest_training_records(out, make_engine(fitted, np.zeros(105)))
            for p, out in folds.items()
        }
        held = "C"
        X, y = build_pairwise_dataset(
            [r for p, rs in records.items() if p != held for r in rs], plans
        )
        rank = PairwiseRankLR(l1_penalty=1.0).fit(X, y)
        result = replay(folds[held], make_engine(fitted, rank.coef_))
        plan, start, end = folds[held].engagement_windows()[0]
        report = evaluate_recommendations(
            result.timeline,
            [EngagementWindow(held, start, end)],
            first_alert_times(folds[held]),
        )
        assert report.window_coverage[held] >= 0.8
        assert report.macro_precision >= 0.9
        assert report.lead_time[held] is not None and report.lead_time[held] > 0
