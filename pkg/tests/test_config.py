import pytest

from swarmnas.config import ConfigError, ExperimentConfig, parse_config

MINIMAL = "seed = 42\n"


class TestDefaults:
    def test_minimal_config_uses_reference_defaults(self):
        cfg = parse_config(MINIMAL)
        assert cfg.population == 20
        assert cfg.generations == 20
        assert cfg.evaluator == "surrogate"
        assert cfg.space.layer_ranges == ((4, 6), (4, 12), (4, 24), (4, 16))
        assert cfg.space.growth_ranges == ((8, 32),) * 4
        assert cfg.epsilon == (0.01, 0.05)
        assert cfg.max_epochs == 300
        assert cfg.patience == 10

    def test_seed_required(self):
        with pytest.raises(ConfigError) as err:
            parse_config("population = 20\n")
        assert err.value.field_name == "seed"


class TestParsing:
    def test_full_roundtrip(self):
        text = """
        # experiment with a bigger swarm
        seed = 7
        population = 50
        generations = 10
        evaluator = zdt1
        zdt_dimensions = 30
        epsilon_accuracy = 0.02
        epsilon_flops = 0.1
        """
        cfg = parse_config(text)
        assert (cfg.population, cfg.generations, cfg.seed) == (50, 10, 7)
        assert cfg.evaluator == "zdt1"
        assert cfg.epsilon == (0.02, 0.1)

    def test_space_overrides(self):
        text = MINIMAL + "num_blocks = 2\nlayer_range_1 = 2:4\ngrowth_range = 8:16\ninput_height = 16\ninput_width = 16\n"
        cfg = parse_config(text)
        assert cfg.space.num_blocks == 2
        assert cfg.space.layer_ranges[0] == (2, 4)
        assert cfg.space.growth_ranges == ((8, 16), (8, 16))
        assert cfg.space.input_height == 16

    def test_workers_parsed(self):
        cfg = parse_config(MINIMAL + "evaluator = remote\nworkers = 127.0.0.1:9001, 127.0.0.1:9002\n")
        assert cfg.workers == ("127.0.0.1:9001", "127.0.0.1:9002")

    def test_workers_env_override(self, monkeypatch):
        monkeypatch.setenv("SWARMNAS_WORKERS", "10.0.0.1:7000")
        cfg = parse_config(MINIMAL + "evaluator = remote\nworkers = 127.0.0.1:9001\n")
        assert cfg.workers == ("10.0.0.1:7000",)


class TestValidation:
    @pytest.mark.parametrize(
        "extra,expected_field",
        [
            ("population = 0\n", "population"),
            ("generations = -1\n", "generations"),
            ("evaluator = magic\n", "evaluator"),
            ("epsilon_accuracy = 0\n", "epsilon_accuracy"),
            ("evaluator = remote\n", "workers"),
            ("layer_range_1 = 4-6\n", "layer_range_1"),
            ("mystery_key = 5\n", "mystery_key"),
        ],
    )
    def test_invalid_fields_named(self, extra, expected_field):
        with pytest.raises(ConfigError) as err:
            parse_config(MINIMAL + extra)
        assert err.value.field_name == expected_field

    def test_unparsable_value_named(self):
        with pytest.raises(ConfigError) as err:
            parse_config("seed = 42\npopulation = many\n")
        assert err.value.field_name == "population"
