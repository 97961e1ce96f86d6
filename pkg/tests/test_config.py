import pytest

from hpimc.config import ExperimentConfig, load_config, parse_config_text
from hpimc.errors import ConfigError


def test_defaults_are_the_figure_parameters():
    c = ExperimentConfig()
    assert (c.mass, c.barrier_frequency, c.barrier_height, c.temperature, c.length) == \
        (1836.0, 500.0, 1500.0, 350.0, 30.0)
    assert c.beta == pytest.approx(902.214, abs=1e-3)
    assert (c.panel_d_qubits, c.panel_d_steps, c.panel_d_ell) == (6, 40, 4)
    assert c.qubits_sweep == (5, 6, 7, 8)


@pytest.mark.parametrize("changes", [
    {},
    {"ell": 16, "steps_sweep": (3, 7), "mc_window": 2, "cache_dir": "/tmp/x y"},
    {"k_values": (0.01, 1.0, 100.0), "mc_times": (0.0, 0.25, 1e-3 + 1), "t_max": 1234.5678901234567},
])
def test_serialize_round_trip(changes):
    c = ExperimentConfig().replace(**changes)
    assert ExperimentConfig.from_text(c.serialize()) == c


def test_comments_blank_lines_and_whitespace():
    text = """
    # panel d, short run
    experiment = fig1
      n_times   =  40   # fewer points
    ell_sweep = 4, 8 ,16
    ell = none
    """
    c = ExperimentConfig.from_text(text)
    assert c.n_times == 40 and c.ell_sweep == (4, 8, 16) and c.ell is None


def test_integer_fields_accept_exponent_notation():
    assert ExperimentConfig.from_text("mc_sweeps = 1e5").mc_sweeps == 100000
    with pytest.raises(ConfigError) as err:
        ExperimentConfig.from_text("n_steps = 2.5")
    assert err.value.field == "n_steps"


@pytest.mark.parametrize("text, field", [
    ("n_times = 1", "n_times"),
    ("m0 = 1.5", "m0"),
    ("real_time = leapfrog", "real_time"),
    ("ell = 0", "ell"),
    ("ell = 300", "ell"),
    ("dimension = 100", "dimension"),
    ("mc_times = 1.0, 0.5", "mc_times"),
    ("temperature = -3", "temperature"),
    ("length = nan", "length"),
    ("qubits_sweep = 5, 13", "qubits_sweep"),
    ("panel_d_ell = 65", "panel_d_ell"),
    ("backward = forward", "backward"),
    ("normalization = peak", "normalization"),
    ("mass = heavy", "mass"),
    ("bogus = 1", "bogus"),
])
def test_validation_names_the_field(text, field):
    with pytest.raises(ConfigError) as err:
        ExperimentConfig.from_text(text)
    assert err.value.field == field
    assert str(err.value).startswith(f"{field}:")


def test_duplicate_and_malformed_lines():
    with pytest.raises(ConfigError) as err:
        parse_config_text("n_times = 3\nn_times = 4\n")
    assert err.value.field == "n_times"
    with pytest.raises(ConfigError, match="line 2"):
        parse_config_text("n_times = 3\njust words\n")
    with pytest.raises(ConfigError, match="empty key"):
        parse_config_text("= 3\n")


def test_direct_construction_is_validated():
    with pytest.raises(ConfigError):
        ExperimentConfig(n_qubits=1)


def test_load_config(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("panel_d_steps = 20\n")
    assert load_config(path).panel_d_steps == 20
    with pytest.raises(ConfigError) as err:
        load_config(tmp_path / "missing.cfg")
    assert err.value.field == "config"
