"""Tests for run configuration files."""

import pytest
import yaml

from pylpstruct.config import FORMAT_TAG, RunConfig, load_run_config, save_run_config
from pylpstruct.errors import MalformedInputError


class TestRunConfig:

    def test_defaults(self):
        config = RunConfig()
        assert (config.precision, config.depth, config.workers) == (10, 6, 1)
        assert config.inputs == ()
        assert config.output is None

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"precision": -1},
            {"depth": 1.5},
            {"seed": True},
            {"budget": 0},
            {"workers": 0},
        ],
    )
    def test_out_of_range(self, kwargs):
        with pytest.raises(ValueError):
            RunConfig(**kwargs)

    def test_replace_skips_none(self):
        config = RunConfig(depth=4).replace(depth=None, precision=20)
        assert (config.depth, config.precision) == (4, 20)

    def test_inputs_become_strings(self, tmp_path):
        config = RunConfig(inputs=[tmp_path / "a.yaml"])
        assert config.inputs == (str(tmp_path / "a.yaml"),)


class TestRunDocuments:

    def test_camel_case_keys(self):
        doc = RunConfig(strict_children=True, inputs=("t.yaml",)).to_document()
        assert doc["format"] == FORMAT_TAG
        assert doc["strictChildren"] is True
        assert doc["inputs"] == ["t.yaml"]

    def test_round_trip(self, tmp_path):
        config = RunConfig(precision=14, depth=3, seed=9, inputs=("x.yaml", "y.yaml"))
        path = tmp_path / "run.yaml"
        save_run_config(config, path)
        assert load_run_config(path) == config

    def test_missing_keys_keep_defaults(self, tmp_path):
        path = tmp_path / "run.yaml"
        path.write_text(yaml.safe_dump({"format": FORMAT_TAG, "depth": 2}))
        config = load_run_config(path)
        assert config.depth == 2
        assert config.budget == RunConfig().budget

    @pytest.mark.parametrize(
        "doc",
        [
            {"format": "pylpstruct-presentation/1"},
            {"format": FORMAT_TAG, "colour": "red"},
            {"format": FORMAT_TAG, "inputs": "t.yaml"},
        ],
    )
    def test_malformed(self, doc):
        with pytest.raises(MalformedInputError):
            RunConfig.from_document(doc, "run.yaml")

    def test_bad_value(self):
        with pytest.raises(ValueError):
            RunConfig.from_document({"precision": "high"})
