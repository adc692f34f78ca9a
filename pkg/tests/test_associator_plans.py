import numpy as np
import pytest

from inciplan.associator import PlanDefinition, PlanKeyMatrix, build_query, load_plans, save_plans
from inciplan.domain import NULL_PLAN, DomainError, NetworkModel


@pytest.fixture
def model():
    segs = ("F1", "F2", "A1", "A2")
    return NetworkModel(
        segments=segs,
        upstream={"F2": ("F1",)},
        reference_speed={s: 60.0 for s in segs},
        target_segments=segs,
        roles={"F1": "freeway", "F2": "freeway", "A1": "arterial", "A2": "arterial"},
    )


class TestKeyMatrix:
    def test_encoding(self, model):
        matrix = PlanKeyMatrix(
            [PlanDefinition("A", "favor A1 southbound", ("F1", "F2"), ("A1",))], model
        )
        assert matrix.plans == ("A", NULL_PLAN)
        np.testing.assert_array_equal(matrix.key_row("A"), [1, 1, 2, 0])
        np.testing.assert_array_equal(matrix.key_row(NULL_PLAN), [0, 0, 0, 0])

    def test_plan_needs_both_key_kinds(self, model):
        with pytest.raises(DomainError, match="at least one"):
            PlanKeyMatrix([PlanDefinition("A", "", ("F1",), ())], model)

    def test_unknown_segment_rejected(self, model):
        with pytest.raises(DomainError, match="unknown segment"):
            PlanKeyMatrix([PlanDefinition("A", "", ("NOPE",), ("A1",))], model)

    def test_overlapping_keys_rejected(self, model):
        with pytest.raises(DomainError, match="both incident and arterial"):
            PlanKeyMatrix([PlanDefinition("A", "", ("F1",), ("F1",))], model)

    def test_unknown_plan_lookup(self, model):
        matrix = PlanKeyMatrix([PlanDefinition("A", "", ("F1",), ("A1",))], model)
        with pytest.raises(DomainError, match="unknown plan"):
            matrix.key_row("Z")


def test_plan_file_round_trip(tmp_path, model):
    defs = [
        PlanDefinition("A", "I-79 SB north", ("F1",), ("A1", "A2")),
        PlanDefinition("B", "I-79 NB north", ("F2",), ("A1",)),
    ]
    path = tmp_path / "plans.json"
    save_plans(path, defs)
    assert load_plans(path) == defs


class TestQuery:
    def test_build_from_speeds_and_forecast(self, model):
        current = np.array([30.0, 60.0, 60.0, 60.0])
        forecast = np.full((6, 4), 60.0)
        forecast[:, 0] = 20.0
        query = build_query(100, current, forecast, model)
        assert query.tti_sequence.shape == (7, 4)
        assert query.tti_sequence[0, 0] == pytest.approx(2.0)
        assert query.tti_sequence[1, 0] == pytest.approx(3.0)
        assert np.all(query.tti_sequence >= 1.0)

    def test_bad_forecast_shape(self, model):
        with pytest.raises(DomainError, match="forecast"):
            build_query(0, np.full(4, 60.0), np.full((5, 4), 60.0), model)
