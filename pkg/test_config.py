"""
Tests for experiment config parsing and validation
"""
import glob
import os

import pytest

from schemas.report import BoundParameters, ExperimentName, HolographyParameters, OutputFormat
from utils.config_file import load_config, parse_config
from utils.validation import ConfigValidationError

HERE = os.path.dirname(os.path.abspath(__file__))

SETTINGS = {
    "LAB_HOOP_COEFFICIENT": 1.0,
    "LAB_CAUSALITY_COEFFICIENT": 1.0,
    "LAB_EPSILON_COUPLING": 1.0,
    "LAB_HOLOGRAPHIC_THRESHOLD": 1.0,
}

MINIMAL = """
[experiment]
name = bound
output_path = reports/bound.csv
"""


def _issues(text, **kwargs):
    kwargs.setdefault("settings", SETTINGS)
    with pytest.raises(ConfigValidationError) as info:
        parse_config(text, **kwargs)
    return info.value.issues


def test_minimal_config_gets_defaults():
    config = parse_config(MINIMAL, settings=SETTINGS)
    assert config.experiment is ExperimentName.BOUND
    assert config.seed == 42
    assert config.output_format is OutputFormat.CSV
    assert config.parameters == BoundParameters()
    assert config.parameters.r == [1.0, 10.0, 100.0]


def test_list_values_and_comments():
    config = parse_config(MINIMAL + "\n[bound]\nr = 2, 20 ; two sizes\nm_grid = 64\n", settings=SETTINGS)
    assert config.parameters.r == [2.0, 20.0]
    assert config.parameters.m_grid == 64


def test_negative_size_is_reported():
    issues = _issues(MINIMAL + "\n[bound]\nr = -1\n")
    assert len(issues) == 1
    assert "r > 0" in issues[0]


def test_unknown_experiment_lists_the_valid_names():
    issues = _issues("[experiment]\nname = foo\noutput_path = out.csv\n")
    assert issues == ["unknown experiment 'foo'; expected one of: bound, distinguish, lattice, circle, holography"]


def test_unknown_key_and_section():
    issues = _issues(MINIMAL + "colour = blue\n\n[bound]\nextra = 1\n\n[lattice]\nn_sites = 8\n")
    assert "unknown key 'colour' in [experiment]" in issues
    assert "unknown key 'extra'" in issues
    assert "unknown section [lattice]" in issues


def test_every_issue_is_collected():
    text = """
[experiment]
name = bound
seed = -3
output_path = out.csv
output_format = xml

[bound]
r = -1
m_grid = 4
"""
    issues = _issues(text)
    assert len(issues) == 4
    assert any(i.startswith("r > 0") for i in issues)
    assert any(i.startswith("m_grid >= 16") for i in issues)
    assert any(i.startswith("seed >= 0") for i in issues)
    assert any(i.startswith("output_format") for i in issues)


def test_scalar_keys_checked_even_with_a_bad_name():
    issues = _issues("[experiment]\nname = nope\nseed = -1\n")
    assert len(issues) == 3
    assert any("output_path" in i for i in issues)
    assert any(i.startswith("seed >= 0") for i in issues)


def test_missing_experiment_section():
    assert _issues("[bound]\nr = 1\n") == ["missing section [experiment]"]


def test_malformed_document():
    issues = _issues("name = bound\n")
    assert issues[0].startswith("malformed config")


def test_holography_regime_is_validated():
    text = "[experiment]\nname = holography\noutput_path = h.jsonl\n\n[holography]\nepsilon = 0.1\n"
    issues = _issues(text)
    assert issues == ["n * epsilon^2 <= 0.1 required for every n in n_values"]


@pytest.mark.parametrize("name, body, fragment", [
    ("bound", "hoop_coefficient = 100\n", "feasible scan mass"),
    ("bound", "causality_coefficient = 0.05\n", "feasible scan time"),
    ("bound", "r = 1, 1e200\n", "<= r <="),
    ("distinguish", "grid_epsilon = 0.001\n", "grid_epsilon >= 0.005"),
    ("lattice", "amplitude_resolution = 0.5\n", "amplitude_resolution < sqrt(2 / n_sites)"),
    ("circle", "times = 0.5, 0.5, 1\n", "three distinct"),
    ("holography", "saturation_n = 100\n", "saturation_n"),
])
def test_runtime_preconditions_are_checked_at_parse_time(name, body, fragment):
    text = f"[experiment]\nname = {name}\noutput_path = out.csv\n\n[{name}]\n{body}"
    issues = _issues(text)
    assert len(issues) == 1
    assert fragment in issues[0]


def test_environment_fills_missing_coefficients():
    settings = dict(SETTINGS, LAB_HOOP_COEFFICIENT=2.0, LAB_EPSILON_COUPLING=0.5)
    config = parse_config(MINIMAL + "\n[bound]\ncausality_coefficient = 3\n", settings=settings)
    assert config.parameters.hoop_coefficient == 2.0
    assert config.parameters.causality_coefficient == 3.0

    text = "[experiment]\nname = holography\noutput_path = h.csv\n\n[holography]\ncoupling = 4\n"
    holo = parse_config(text, settings=settings).parameters
    assert isinstance(holo, HolographyParameters)
    assert holo.coupling == 4.0


def test_command_line_overrides_win():
    config = parse_config(
        MINIMAL + "output_format = csv\n",
        output_path="elsewhere.jsonl",
        output_format="json-lines",
        settings=SETTINGS,
    )
    assert config.output_path == "elsewhere.jsonl"
    assert config.output_format is OutputFormat.JSON_LINES


def test_output_path_may_come_from_the_command_line():
    config = parse_config("[experiment]\nname = bound\n", output_path="x.csv", settings=SETTINGS)
    assert config.output_path == "x.csv"


def test_echo_round_trips_through_the_schema():
    config = parse_config(MINIMAL, settings=SETTINGS)
    echo = config.echo()
    assert echo["experiment"] == "bound"
    assert echo["parameters"]["m_grid"] == 256


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigValidationError) as info:
        load_config(str(tmp_path / "absent.ini"))
    assert info.value.issues[0].startswith("cannot read config")


@pytest.mark.parametrize("path", sorted(glob.glob(os.path.join(HERE, "configs", "*.ini"))))
def test_shipped_configs_validate(path):
    config = load_config(path)
    assert config.experiment.value == os.path.splitext(os.path.basename(path))[0]
