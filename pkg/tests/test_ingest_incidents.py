import numpy as np
import pytest

from inciplan.domain import DomainError
from inciplan.ingest import (
    AlertEvent,
    ClosureEvent,
    filter_alerts,
    filter_closures,
    fuse_incidents,
    interpolate_alert_gap,
    status_timeline,
)


def alert(t, seg, cat="accident"):
    return AlertEvent(timestamp=t, segment_id=seg, category=cat)


class TestMaxGate:
    def test_alert_only_closure_only_both(self, chain_model):
        a = [alert(0, "B")]
        c = [ClosureEvent(0, 10, ("C",))]
        frame = fuse_incidents(a, c, 0, chain_model)
        assert frame.status.tolist() == [0, 1, 2]
        both = fuse_incidents([alert(0, "C")], c, 0, chain_model)
        assert both.status[chain_model.index_of("C")] == 2

    def test_no_sources_all_zero(self, chain_model):
        frame = fuse_incidents([], [], 0, chain_model)
        assert frame.status.tolist() == [0, 0, 0]

    def test_unknown_segment_errors(self, chain_model):
        with pytest.raises(DomainError, match="unknown segment"):
            fuse_incidents([alert(0, "ZZ")], [], 0, chain_model)

    def test_idempotent_without_new_sources(self, chain_model):
        a = [alert(0, "A"), alert(0, "C")]
        once = fuse_incidents(a, [], 0, chain_model)
        again = fuse_incidents(a, [], 0, chain_model)
        assert np.array_equal(once.status, again.status)

    def test_lifecycle_alert_closure_clear(self, chain_model):
        # single segment: user alert, then official closure, then cleared
        alerts = [alert(0, "B"), alert(5, "B")]
        closures = [ClosureEvent(5, 10, ("B",))]
        frames = status_timeline(alerts, closures, [0, 5, 10], chain_model)
        b = chain_model.index_of("B")
        assert [f.status[b] for f in frames] == [1, 2, 0]


class TestGapInterpolation:
    def test_distance_two_fills_middle(self, chain_model):
        assert interpolate_alert_gap({"A", "C"}, chain_model) == {"A", "B", "C"}

    def test_adjacent_unchanged(self, chain_model):
        assert interpolate_alert_gap({"A", "B"}, chain_model) == {"A", "B"}

    def test_distance_three_not_filled(self, long_chain_model):
        assert interpolate_alert_gap({"A", "D"}, long_chain_model) == {"A", "D"}

    def test_fill_applies_before_max_gate(self, chain_model):
        frame = fuse_incidents([alert(0, "A"), alert(0, "C")], [], 0, chain_model)
        assert frame.status.tolist() == [1, 1, 1]


class TestFeedFilters:
    def test_alert_categories(self):
        alerts = [
            alert(0, "A", "accident"),
            alert(0, "A", "jam"),
            alert(0, "A", "police"),
            alert(0, "A", "hazard"),
        ]
        assert [a.category for a in filter_alerts(alerts)] == ["accident", "jam"]

    def test_closures_over_24h_dropped(self):
        keep = ClosureEvent(0, 60, ("A",))
        drop = ClosureEvent(0, 24 * 60 + 5, ("A",))
        assert filter_closures([keep, drop]) == [keep]

    def test_closures_without_segments_dropped(self):
        assert filter_closures([ClosureEvent(0, 60, ())]) == []
