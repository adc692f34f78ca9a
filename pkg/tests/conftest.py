import numpy as np
import pytest

from inciplan.domain import NetworkModel


@pytest.fixture
def chain_model() -> NetworkModel:
    """Three-segment chain A -> B -> C."""
    return NetworkModel(
        segments=("A", "B", "C"),
        upstream={"B": ("A",), "C": ("B",)},
        reference_speed={"A": 60.0, "B": 60.0, "C": 60.0},
        target_segments=("A", "B", "C"),
        roles={"A": "freeway", "B": "freeway", "C": "freeway"},
    )


@pytest.fixture
def long_chain_model() -> NetworkModel:
    """Four-segment chain A -> B -> C -> D."""
    return NetworkModel(
        segments=("A", "B", "C", "D"),
        upstream={"B": ("A",), "C": ("B",), "D": ("C",)},
        reference_speed={s: 60.0 for s in "ABCD"},
        target_segments=("A", "B", "C", "D"),
        roles={s: "freeway" for s in "ABCD"},
    )


def random_network(rng: np.random.Generator, n: int = 8) -> NetworkModel:
    segments = tuple(f"S{i:02d}" for i in range(n))
    upstream = {}
    for i in range(1, n):
        k = int(rng.integers(0, min(i, 3)))
        ups = rng.choice(i, size=k, replace=False) if k else []
        upstream[segments[i]] = tuple(segments[int(j)] for j in ups)
    return NetworkModel(
        segments=segments,
        upstream=upstream,
        reference_speed={s: float(rng.uniform(25, 70)) for s in segments},
        target_segments=segments,
        roles={s: "freeway" for s in segments},
    )
