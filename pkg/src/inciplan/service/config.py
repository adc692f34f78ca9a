"""Configuration: INI-style file, env-var discovery, documented defaults."""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field, fields

from inciplan.associator.metrics import TTI_THRESHOLDS
from inciplan.domain import DomainError

CONFIG_ENV_VAR = "INCIPLAN_CONFIG"


@dataclass
class PathsConfig:
    network: str = "network.json"
    plans: str = "plans.json"
    feeds: str = "feeds"
    predictor_checkpoint: str = "predictor.ckpt"
    pipeline_state: str = "pipeline.json"
    rank_model: str = "rank_model.json"
    engagement_log: str = "engagements.jsonl"


@dataclass
class PredictorConfig:
    hidden_size: int = 256
    n_layers: int = 2
    dropout: float = 0.2
    embed_dim: int = 3
    attention_size: int = 256
    lookback_steps: int = 12
    lr: float = 0.0005
    teacher_forcing: float = 0.5
    batch_size: int = 32
    max_epochs: int = 200
    patience: int = 5
    grad_clip: float = 5.0


@dataclass
class AssociatorConfig:
    l1_penalty: float = 1.0
    thresholds: tuple[float, ...] = TTI_THRESHOLDS
    dwell_minutes: int = 20


@dataclass
class FeatureConfig:
    use_speed: bool = True
    use_slowdown: bool = True
    use_incidents: bool = True
    use_weather: bool = True
    use_time: bool = True
    incident_concat_scope: str = "targets"  # targets | targets_upstream | none


@dataclass
class ServerConfig:
    host: str = "127.0.0.1"
    port: int = 8732
    step_seconds: float = 1.0  # wall-clock pacing of one 5-minute replay step


@dataclass
class Config:
    paths: PathsConfig = field(default_factory=PathsConfig)
    predictor: PredictorConfig = field(default_factory=PredictorConfig)
    associator: AssociatorConfig = field(default_factory=AssociatorConfig)
    features: FeatureConfig = field(default_factory=FeatureConfig)
    server: ServerConfig = field(default_factory=ServerConfig)
    seed: int = 0


_SECTIONS = {
    "paths": PathsConfig,
    "predictor": PredictorConfig,
    "associator": AssociatorConfig,
    "features": FeatureConfig,
    "server": ServerConfig,
}


def _coerce(raw: str, kind):
    if kind is bool:
        lowered = raw.strip().lower()
        if lowered in ("1", "true", "yes", "on"):
            return True
        if lowered in ("0", "false", "no", "off"):
            return False
        raise DomainError(f"not a boolean: {raw!r}")
    if kind is int:
        return int(raw)
    if kind is float:
        return float(raw)
    if kind is tuple or str(kind).startswith("tuple"):
        return tuple(float(v) for v in raw.replace(",", " ").split())
    return raw


def load_config(path: str | None = None) -> Config:
    """Load config from ``path``, $INCIPLAN_CONFIG, or defaults.

    Unknown sections or keys are errors; the TTI threshold set must stay the
    canonical five values because the 105-entry metric contract depends on it.
    """
    config = Config()
    if path is None:
        path = os.environ.get(CONFIG_ENV_VAR)
    if path is None:
        return config
    if not os.path.exists(path):
        raise DomainError(f"config file not found: {path}")
    parser = configparser.ConfigParser()
    parser.read(path)
    for section_name in parser.sections():
        if section_name == "run":
            if parser.has_option("run", "seed"):
                config.seed = int(parser.get("run", "seed"))
            extra = set(parser.options("run")) - {"seed"}
            if extra:
                raise DomainError(f"unknown [run] keys: {sorted(extra)}")
            continue
        section_cls = _SECTIONS.get(section_name)
        if section_cls is None:
            raise DomainError(f"unknown config section [{section_name}]")
        target = getattr(config, section_name if section_name != "server" else "server")
        known = {f.name: f.type for f in fields(section_cls)}
        for key, raw in parser.items(section_name):
            if key not in known:
                raise DomainError(f"unknown config key [{section_name}] {key}")
            current = getattr(target, key)
            setattr(target, key, _coerce(raw, type(current)))
    if tuple(config.associator.thresholds) != TTI_THRESHOLDS:
        raise DomainError(
            f"associator thresholds must be {TTI_THRESHOLDS} (the metric contract is 105-dimensional)"
        )
    return config


def write_default_config(path) -> None:
    """Emit a fully-commented config file with every default value."""
    config = Config()
    lines = ["# inciplan configuration (set {} to point here)".format(CONFIG_ENV_VAR)]
    lines.append("\n[run]\nseed = {}".format(config.seed))
    for section_name, section_cls in _SECTIONS.items():
        lines.append(f"\n[{section_name}]")
        target = getattr(config, section_name)
        for f in fields(section_cls):
            value = getattr(target, f.name)
            if isinstance(value, tuple):
                value = " ".join(f"{v:g}" for v in value)
            lines.append(f"{f.name} = {value}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
