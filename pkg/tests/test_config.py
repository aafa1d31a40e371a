"""Configuration loading, validation, and hashing."""

import dataclasses
import hashlib
import json

import pytest

from depgrowth.config import (
    ConfigError,
    PipelineConfig,
    config_sha256,
    file_sha256,
    load_config,
    resolve_config,
)


class TestValidate:
    def test_defaults_are_valid(self):
        config = PipelineConfig()
        assert config.validate() is config

    @pytest.mark.parametrize(
        "field,value",
        [
            ("grid", (100, 10)),
            ("grid", (365, 45)),
            ("min_dependents", -1),
            ("alpha", 0.0),
            ("alpha", 1.0),
            ("alpha", -0.2),
            ("zero_split", "both"),
            ("ecosystems", ()),
            ("ecosystems", ("npm", "cargo")),
            ("workers", 0),
            ("rate_per_sec", 0.0),
        ],
    )
    def test_invariant_violations(self, field, value):
        config = dataclasses.replace(PipelineConfig(), **{field: value})
        with pytest.raises(ConfigError):
            config.validate()

    def test_all_supported_grids_pass(self):
        for grid in ((180, 45), (365, 90), (730, 180)):
            dataclasses.replace(PipelineConfig(), grid=grid).validate()

    def test_unknown_ecosystem_message_names_offender(self):
        config = dataclasses.replace(PipelineConfig(), ecosystems=("npm", "cargo"))
        with pytest.raises(ConfigError, match="cargo"):
            config.validate()


class TestLoadConfig:
    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "nope.json")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_non_object_document(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text("[1, 2]", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"releases": "r.jsonl", "bogus": 1}), encoding="utf-8")
        with pytest.raises(ConfigError, match="bogus"):
            load_config(path)

    def test_lists_become_tuples(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(
            json.dumps({"ecosystems": ["pypi", "npm"], "grid": [180, 45]}), encoding="utf-8"
        )
        config = load_config(path)
        assert config.ecosystems == ("pypi", "npm")
        assert config.grid == (180, 45)

    def test_invalid_value_rejected_at_load(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"alpha": 2.0}), encoding="utf-8")
        with pytest.raises(ConfigError):
            load_config(path)


class TestResolveConfig:
    def test_defaults_when_nothing_given(self):
        assert resolve_config(None, {}) == PipelineConfig()

    def test_file_overrides_defaults(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"alpha": 0.01, "out_dir": "elsewhere"}), encoding="utf-8")
        config = resolve_config(path, {})
        assert config.alpha == 0.01
        assert config.out_dir == "elsewhere"
        assert config.min_dependents == PipelineConfig().min_dependents

    def test_flags_override_file(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"grid": [365, 90], "alpha": 0.01}), encoding="utf-8")
        config = resolve_config(path, {"grid": (180, 45)})
        assert config.grid == (180, 45)
        assert config.alpha == 0.01

    def test_none_overrides_ignored(self):
        config = resolve_config(None, {"alpha": None, "seed": 3})
        assert config.alpha == PipelineConfig().alpha
        assert config.seed == 3

    def test_resolution_still_validates(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"grid": [365, 90]}), encoding="utf-8")
        with pytest.raises(ConfigError):
            resolve_config(path, {"alpha": 5.0})


class TestHashing:
    def test_config_hash_stable(self):
        assert config_sha256(PipelineConfig()) == config_sha256(PipelineConfig())

    def test_config_hash_sensitive_to_fields(self):
        base = PipelineConfig()
        changed = dataclasses.replace(base, min_dependents=6)
        assert config_sha256(base) != config_sha256(changed)

    def test_file_sha256_matches_direct_digest(self, tmp_path):
        path = tmp_path / "blob.bin"
        payload = b"x" * (1 << 20) + b"tail"
        path.write_bytes(payload)
        assert file_sha256(path) == hashlib.sha256(payload).hexdigest()
