"""Built-in synthetic network and plan fixtures.

The default network is a township-scale interchange: two 10-segment freeway
corridors (north/southbound), an 8-segment parallel arterial, and four
connector ramps. Small enough for brute-force oracles, rich enough that the
six plans trigger on distinct congestion patterns.
"""

from __future__ import annotations

from inciplan.associator.plans import PlanDefinition
from inciplan.domain import NetworkModel

FREEWAY_REF = 65.0
ARTERIAL_REF = 40.0
RAMP_REF = 30.0

DEFAULT_NETWORK_ID = "township-synthetic"


def default_network() -> NetworkModel:
    sb = [f"FS{i:02d}" for i in range(1, 11)]
    nb = [f"FN{i:02d}" for i in range(1, 11)]
    arterial = [f"AR{i:02d}" for i in range(1, 9)]
    ramps = ["RA1", "RA2", "RA3", "RA4"]
    segments = tuple(sb + nb + arterial + ramps)

    upstream: dict[str, tuple[str, ...]] = {}
    for chain in (sb, nb, arterial):
        for prev, seg in zip(chain, chain[1:]):
            upstream[seg] = (prev,)
    # connectors: freeway off-ramps feed the arterial, RA3/RA4 are
    # turnpike-style links hanging off the arterial and northbound end
    upstream["RA1"] = ("FS05",)
    upstream["AR02"] = ("AR01", "RA1")
    upstream["RA2"] = ("FN05",)
    upstream["AR06"] = ("AR05", "RA2")
    upstream["RA3"] = ("AR05",)
    upstream["RA4"] = ("FN10",)

    roles = {s: "freeway" for s in sb + nb}
    roles.update({s: "arterial" for s in arterial})
    roles.update({s: "ramp" for s in ramps})

    reference = {s: FREEWAY_REF for s in sb + nb}
    reference.update({s: ARTERIAL_REF for s in arterial})
    reference.update({s: RAMP_REF for s in ramps})

    hints: dict[str, tuple[float, float]] = {}
    for i, s in enumerate(sb):
        hints[s] = (float(i), 0.0)
    for i, s in enumerate(nb):
        hints[s] = (float(i), 2.0)
    for i, s in enumerate(arterial):
        hints[s] = (float(i) + 1.0, 1.0)
    hints["RA1"] = (4.0, 0.5)
    hints["RA2"] = (4.0, 1.5)
    hints["RA3"] = (6.0, 1.5)
    hints["RA4"] = (9.0, 1.6)

    return NetworkModel(
        segments=segments,
        upstream=upstream,
        reference_speed=reference,
        target_segments=segments,
        roles=roles,
        display_hints=hints,
    )


def default_plans() -> list[PlanDefinition]:
    return [
        PlanDefinition(
            "A", "SB freeway incident, north section; favor arterial southbound",
            ("FS03", "FS04"), ("AR01", "AR02", "AR03"),
        ),
        PlanDefinition(
            "B", "NB freeway incident, north section; favor arterial northbound",
            ("FN06", "FN07"), ("AR01", "AR02", "AR03"),
        ),
        PlanDefinition(
            "C", "SB freeway incident, south section; favor arterial southbound",
            ("FS07", "FS08"), ("AR05", "AR06", "AR07"),
        ),
        PlanDefinition(
            "D", "NB freeway incident, south section; favor arterial northbound",
            ("FN03", "FN04"), ("AR05", "AR06", "AR07"),
        ),
        PlanDefinition(
            "E", "eastbound connector incident; favor arterial east",
            ("RA3",), ("AR06", "AR07", "AR08"),
        ),
        PlanDefinition(
            "F", "westbound connector incident; favor arterial west",
            ("RA4",), ("AR07", "AR08"),
        ),
    ]


# incident segment used by each plan's scripted demonstration scenario
SCENARIO_INCIDENT_SEGMENT = {
    "A": "FS04",
    "B": "FN07",
    "C": "FS08",
    "D": "FN04",
    "E": "RA3",
    "F": "RA4",
}
