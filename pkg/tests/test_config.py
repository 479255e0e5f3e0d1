"""Settings, scenario files and seed utilities."""

import numpy as np
import pytest

from mediatrix.config import Settings
from mediatrix.core.exceptions import ConfigOutOfRange, ConfigParseError, SchemaViolation
from mediatrix.schemas.scenario import load_scenario
from mediatrix.services.protocol_service import protocol_service
from mediatrix.utils.seeding import UINT64_MAX, get_generator, spawn_subseeds


class TestSettings:
    def test_defaults(self):
        config = Settings()
        assert config.theorem_tol == 1e-9
        assert config.mediator_dim_cap == 64
        assert config.report_header == "# mediatrix-report-v1"
        assert "app_name" not in Settings.model_fields

    def test_environment_override(self, monkeypatch):
        monkeypatch.setenv("MEDIATRIX_WORKERS", "2")
        monkeypatch.setenv("MEDIATRIX_REPORT_FORMAT", "json")
        config = Settings()
        assert config.workers == 2
        assert config.report_format == "json"


class TestSeeding:
    def test_subseeds_are_prefix_stable(self):
        assert spawn_subseeds(9, 5)[:3] == spawn_subseeds(9, 3)
        assert spawn_subseeds(9, 0) == []

    def test_generator_rejects_bad_seeds(self):
        with pytest.raises(TypeError):
            get_generator(1.5)
        with pytest.raises(ValueError):
            get_generator(UINT64_MAX + 1)
        rng = np.random.default_rng(0)
        assert get_generator(rng) is rng


class TestScenarioFiles:
    def test_bmv_file(self, tmp_path):
        path = tmp_path / "bmv.toml"
        path.write_text('name = "bmv"\nmediator_mode = "classical"\nsteps = "bmv"\n')
        config = load_scenario(path)
        assert config.is_bmv
        assert config.dims == (2, 2, 2)
        assert config.report.format == "csv"

    def test_random_scenario_builds(self, tmp_path):
        path = tmp_path / "random.toml"
        path.write_text(
            'name = "r"\nmediator_mode = "classical"\nseed = 42\n'
            "[layout]\ndA = 2\ndG = 3\ndB = 2\n"
            '[steps]\ncount = 3\ngenerator = "random"\n'
        )
        protocol = protocol_service.build_from_config(load_scenario(path))
        assert len(protocol.steps) == 3
        assert protocol.dims == (2, 3, 2)

    def test_explicit_scenario(self, tmp_path):
        path = tmp_path / "explicit.toml"
        path.write_text(
            'name = "cnot"\nmediator_mode = "quantum"\n'
            "[layout]\ndA = 2\ndG = 2\ndB = 2\n"
            '[steps]\ncount = 1\ngenerator = "explicit"\n'
            '[[steps.explicit]]\nside = "left"\n'
            "[[steps.explicit.interaction]]\n"
            "real = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]\n"
        )
        protocol = protocol_service.build_from_config(load_scenario(path))
        assert len(protocol.steps) == 1
        assert protocol.steps[0].side.value == "left"

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigParseError):
            load_scenario(tmp_path / "absent.toml")

    def test_malformed_toml(self, tmp_path):
        path = tmp_path / "bad.toml"
        path.write_text("name = \n")
        with pytest.raises(ConfigParseError):
            load_scenario(path)

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "extra.toml"
        path.write_text('name = "x"\nmediator_mode = "classical"\nsteps = "bmv"\ncolour = "red"\n')
        with pytest.raises(SchemaViolation, match="colour"):
            load_scenario(path)

    def test_randomized_scenario_needs_seed(self, tmp_path):
        path = tmp_path / "noseed.toml"
        path.write_text(
            'name = "r"\nmediator_mode = "classical"\n'
            "[layout]\ndA = 2\ndG = 2\ndB = 2\n"
            '[steps]\ncount = 1\ngenerator = "random"\n'
        )
        with pytest.raises(SchemaViolation, match="seed"):
            load_scenario(path)

    def test_caps(self, tmp_path):
        path = tmp_path / "big.toml"
        path.write_text(
            'name = "big"\nmediator_mode = "quantum"\nseed = 1\n'
            "[layout]\ndA = 2\ndG = 17\ndB = 2\n"
            '[steps]\ncount = 1\ngenerator = "random"\n'
        )
        with pytest.raises(ConfigOutOfRange, match="dG"):
            load_scenario(path)

    def test_non_finite_kraus_rejected(self, tmp_path):
        path = tmp_path / "nan.toml"
        path.write_text(
            'name = "nan"\nmediator_mode = "quantum"\n'
            "[layout]\ndA = 2\ndG = 2\ndB = 2\n"
            '[steps]\ncount = 1\ngenerator = "explicit"\n'
            '[[steps.explicit]]\nside = "left"\n'
            "[[steps.explicit.interaction]]\n"
            "real = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, inf]]\n"
        )
        with pytest.raises(SchemaViolation, match="interaction"):
            load_scenario(path)

    def test_env_dim_capped(self, tmp_path):
        path = tmp_path / "env.toml"
        path.write_text(
            'name = "env"\nmediator_mode = "classical"\nseed = 1\n'
            "[layout]\ndA = 2\ndG = 2\ndB = 2\n"
            '[steps]\ncount = 1\ngenerator = "random"\nenv_dim = 9\n'
        )
        with pytest.raises(ConfigOutOfRange, match="env_dim"):
            load_scenario(path)
