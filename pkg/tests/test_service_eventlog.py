import pytest

from inciplan.domain import DomainError, EngagementRecord
from inciplan.service import EngagementLog


def rec(t, plan="A", action="activate", actor="operator"):
    return EngagementRecord(timestamp=t, plan_id=plan, action=action, actor=actor)


class TestEngagementLog:
    def test_append_and_read_back(self, tmp_path):
        log = EngagementLog(tmp_path / "log.jsonl")
        log.append(rec(100))
        log.append(rec(120, action="stop"))
        reloaded = EngagementLog(tmp_path / "log.jsonl")
        assert reloaded.records == [rec(100), rec(120, action="stop")]

    def test_out_of_order_append_rejected(self, tmp_path):
        log = EngagementLog(tmp_path / "log.jsonl")
        log.append(rec(100))
        with pytest.raises(DomainError, match="out-of-order"):
            log.append(rec(95))

    def test_equal_timestamps_allowed(self, tmp_path):
        log = EngagementLog(tmp_path / "log.jsonl")
        log.append(rec(100))
        log.append(rec(100, plan="B"))
        assert len(log.records) == 2

    def test_actor_field_distinguishes_model_and_operator(self, tmp_path):
        log = EngagementLog(tmp_path / "log.jsonl")
        log.append(rec(100, actor="model"))
        log.append(rec(110, action="override", actor="operator"))
        actors = [r.actor for r in log.records]
        assert actors == ["model", "operator"]

    def test_partial_final_line_ignored(self, tmp_path):
        path = tmp_path / "log.jsonl"
        log = EngagementLog(path)
        log.append(rec(100))
        log.append(rec(120))
        with open(path, "a") as fh:
            fh.write('{"timestamp": 140, "plan_id": "A", "act')  # crash mid-write
        reloaded = EngagementLog(path)
        assert [r.timestamp for r in reloaded.records] == [100, 120]

    def test_unterminated_but_complete_final_line_ignored(self, tmp_path):
        path = tmp_path / "log.jsonl"
        EngagementLog(path).append(rec(100))
        with open(path, "a") as fh:
            fh.write(rec(120).to_json())  # no newline: write did not finish
        assert [r.timestamp for r in EngagementLog(path).records] == [100]

    def test_corruption_in_the_middle_is_an_error(self, tmp_path):
        path = tmp_path / "log.jsonl"
        with open(path, "w") as fh:
            fh.write(rec(100).to_json() + "\n")
            fh.write("not json\n")
            fh.write(rec(120).to_json() + "\n")
        with pytest.raises(DomainError, match="corrupt"):
            EngagementLog(path)

    def test_since_filter(self, tmp_path):
        log = EngagementLog(tmp_path / "log.jsonl")
        for t in (100, 120, 140):
            log.append(rec(t))
        assert [r.timestamp for r in log.since(120)] == [120, 140]
