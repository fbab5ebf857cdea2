"""Config file loading, overrides, and snapshots."""

from pathlib import Path

import pytest
import yaml

from molvae.config import (
    ConfigError,
    apply_overrides,
    build_train_config,
    load_config_file,
    write_snapshot,
)
from molvae.training import TrainConfig


class TestLoadConfigFile:
    def test_mapping_loaded(self, tmp_path):
        path = tmp_path / "r.yaml"
        path.write_text("epochs: 3\nlr: 0.0005\nbeta: 0.1\n")
        config = load_config_file(path)
        assert config == {"epochs": 3, "lr": 0.0005, "beta": 0.1}

    def test_empty_file_is_empty_mapping(self, tmp_path):
        path = tmp_path / "r.yaml"
        path.write_text("")
        assert load_config_file(path) == {}

    def test_non_mapping_rejected(self, tmp_path):
        path = tmp_path / "r.yaml"
        path.write_text("- 1\n- 2\n")
        with pytest.raises(ConfigError):
            load_config_file(path)

    def test_broken_yaml_rejected(self, tmp_path):
        path = tmp_path / "r.yaml"
        path.write_text("a: [unclosed\n")
        with pytest.raises(ConfigError):
            load_config_file(path)


class TestOverrides:
    def test_typed_values(self):
        out = apply_overrides({"epochs": 3}, ["epochs=5", "lr=1e-4",
                                              "beta=null", "alpha=2.0"])
        assert out == {"epochs": 5, "lr": 1e-4, "beta": None, "alpha": 2.0}

    def test_missing_equals_rejected(self):
        with pytest.raises(ConfigError):
            apply_overrides({}, ["epochs"])

    def test_original_untouched(self):
        base = {"epochs": 3}
        apply_overrides(base, ["epochs=9"])
        assert base == {"epochs": 3}


class TestBuildTrainConfig:
    def test_minimal(self):
        cfg = build_train_config({"train_path": "a.smi", "out_dir": "out"})
        assert isinstance(cfg, TrainConfig)
        assert cfg.epochs == 30

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="unknown"):
            build_train_config({"train_path": "a", "out_dir": "b",
                                "learning_rate": 1e-3})

    def test_missing_required(self):
        with pytest.raises(ConfigError, match="missing"):
            build_train_config({"epochs": 2})


class TestSnapshot:
    def test_round_trip(self, tmp_path):
        cfg = TrainConfig(train_path="a.smi", out_dir="out", epochs=4,
                          beta=None, alpha=1.5)
        path = tmp_path / "snap.yaml"
        write_snapshot(cfg, path)
        back = yaml.safe_load(path.read_text())
        assert back["epochs"] == 4
        assert back["alpha"] == 1.5
        assert back["beta"] is None
        assert build_train_config(back) == cfg

    def test_path_fields_become_strings(self, tmp_path):
        # callers hand in Path objects; the snapshot must stay plain YAML
        cfg = TrainConfig(train_path=Path("a.smi"), out_dir=Path("out"),
                          valid_path=Path("v.smi"))
        path = tmp_path / "snap.yaml"
        write_snapshot(cfg, path)
        back = yaml.safe_load(path.read_text())
        assert back["train_path"] == "a.smi"
        assert back["valid_path"] == "v.smi"
