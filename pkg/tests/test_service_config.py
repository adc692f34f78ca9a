import pytest

from inciplan.domain import DomainError
from inciplan.service import CONFIG_ENV_VAR, Config, load_config, write_default_config


def test_defaults_match_training_setup():
    config = Config()
    assert config.predictor.hidden_size == 256
    assert config.predictor.n_layers == 2
    assert config.predictor.dropout == 0.2
    assert config.predictor.embed_dim == 3
    assert config.predictor.attention_size == 256
    assert config.predictor.lr == 0.0005
    assert config.predictor.teacher_forcing == 0.5
    assert config.predictor.batch_size == 32
    assert config.predictor.max_epochs == 200
    assert config.predictor.patience == 5
    assert config.associator.l1_penalty == 1.0
    assert config.associator.thresholds == (1.6, 2.0, 2.5, 5.0, 10.0)
    assert config.associator.dwell_minutes == 20


def test_file_overrides_every_section(tmp_path):
    path = tmp_path / "config.ini"
    path.write_text(
        "[run]\nseed = 7\n"
        "[predictor]\nhidden_size = 32\nlr = 0.01\n"
        "[associator]\ndwell_minutes = 25\n"
        "[features]\nuse_weather = false\n"
        "[server]\nport = 9000\n"
        "[paths]\nnetwork = /tmp/net.json\n"
    )
    config = load_config(str(path))
    assert config.seed == 7
    assert config.predictor.hidden_size == 32
    assert config.predictor.lr == 0.01
    assert config.associator.dwell_minutes == 25
    assert config.features.use_weather is False
    assert config.server.port == 9000
    assert config.paths.network == "/tmp/net.json"


def test_env_var_discovery(tmp_path, monkeypatch):
    path = tmp_path / "config.ini"
    path.write_text("[run]\nseed = 41\n")
    monkeypatch.setenv(CONFIG_ENV_VAR, str(path))
    assert load_config().seed == 41


def test_unknown_key_rejected(tmp_path):
    path = tmp_path / "config.ini"
    path.write_text("[predictor]\nbogus = 1\n")
    with pytest.raises(DomainError, match="unknown config key"):
        load_config(str(path))


def test_threshold_set_is_pinned(tmp_path):
    path = tmp_path / "config.ini"
    path.write_text("[associator]\nthresholds = 1.6 2 3\n")
    with pytest.raises(DomainError, match="105"):
        load_config(str(path))


def test_default_config_round_trips(tmp_path):
    path = tmp_path / "config.ini"
    write_default_config(path)
    config = load_config(str(path))
    assert config == Config()
