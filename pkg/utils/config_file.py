"""
Experiment config files: INI text in, validated ExperimentConfig out.

    [experiment]
    name = bound
    seed = 42
    output_path = reports/bound.csv
    output_format = csv

    [bound]
    r = 1, 10, 100

Every problem found is collected before failing, so one run of `validate`
reports the whole list.
"""
import configparser
import logging
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from app_env_config import get_settings
from schemas.report import PARAMETER_MODELS, ExperimentConfig, ExperimentName, OutputFormat
from utils.validation import ConfigValidationError

logger = logging.getLogger(__name__)

EXPERIMENT_SECTION = "experiment"
EXPERIMENT_KEYS = ("name", "seed", "output_path", "output_format")

# parameter key -> settings key supplying its default
ENV_DEFAULTS = {
    ExperimentName.BOUND: {
        "hoop_coefficient": "LAB_HOOP_COEFFICIENT",
        "causality_coefficient": "LAB_CAUSALITY_COEFFICIENT",
    },
    ExperimentName.HOLOGRAPHY: {
        "coupling": "LAB_EPSILON_COUPLING",
        "threshold": "LAB_HOLOGRAPHIC_THRESHOLD",
    },
}

_OPERATORS = {
    "greater_than": (">", "gt"),
    "greater_than_equal": (">=", "ge"),
    "less_than": ("<", "lt"),
    "less_than_equal": ("<=", "le"),
}


def _location(loc) -> str:
    name = ""
    for part in loc:
        name += f"[{part}]" if isinstance(part, int) else (f".{part}" if name else str(part))
    return name or "config"


def _number(v):
    if isinstance(v, float) and v.is_integer():
        return int(v)
    return v


def format_validation_errors(exc: ValidationError, prefix: str = "") -> List[str]:
    """Turn pydantic errors into short messages such as 'r > 0' or "unknown key 'x'" """
    issues = []
    for err in exc.errors():
        where = _location(err.get("loc", ()))
        kind = err.get("type", "")
        ctx = err.get("ctx") or {}
        if kind == "extra_forbidden":
            message = f"unknown key '{where}'"
        elif kind in _OPERATORS and _OPERATORS[kind][1] in ctx:
            op, key = _OPERATORS[kind]
            message = f"{where} {op} {_number(ctx[key])} required (got {err.get('input')!r})"
        elif kind == "value_error":
            message = str(err.get("msg", "")).removeprefix("Value error, ")
        elif kind == "missing":
            message = f"missing key '{where}'"
        else:
            message = f"{where}: {err.get('msg')}"
        issues.append(f"{prefix}{message}")
    return issues


def _read_sections(text: str) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    # keep key case as written so error messages match the file
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as e:
        raise ConfigValidationError([f"malformed config: {e}"])
    return parser


def parse_config(
    text: str,
    output_path: Optional[str] = None,
    output_format: Optional[str] = None,
    settings: Optional[Dict[str, Any]] = None,
) -> ExperimentConfig:
    """
    Validate a config document. output_path / output_format override the file.
    Environment settings only fill parameter keys the file leaves out.
    """
    parser = _read_sections(text)
    settings = settings if settings is not None else get_settings()
    issues: List[str] = []

    if not parser.has_section(EXPERIMENT_SECTION):
        raise ConfigValidationError([f"missing section [{EXPERIMENT_SECTION}]"])
    head = dict(parser.items(EXPERIMENT_SECTION))
    for key in head:
        if key not in EXPERIMENT_KEYS:
            issues.append(f"unknown key '{key}' in [{EXPERIMENT_SECTION}]")

    valid_names = ", ".join(e.value for e in ExperimentName)
    experiment = None
    raw_name = head.get("name", "").strip()
    if not raw_name:
        issues.append(f"missing key 'name' in [{EXPERIMENT_SECTION}]; expected one of: {valid_names}")
    else:
        try:
            experiment = ExperimentName(raw_name)
        except ValueError:
            issues.append(f"unknown experiment '{raw_name}'; expected one of: {valid_names}")

    for section in parser.sections():
        if section != EXPERIMENT_SECTION and (experiment is None or section != experiment.value):
            issues.append(f"unknown section [{section}]")

    parameters = None
    if experiment is not None:
        raw = dict(parser.items(experiment.value)) if parser.has_section(experiment.value) else {}
        for key, setting in ENV_DEFAULTS.get(experiment, {}).items():
            if key not in raw and settings.get(setting) is not None:
                raw[key] = settings[setting]
        try:
            parameters = PARAMETER_MODELS[experiment].model_validate(raw)
        except ValidationError as e:
            issues.extend(format_validation_errors(e))

    fields = {
        "experiment": experiment,
        "parameters": parameters,
        "seed": head.get("seed", 42),
        "output_path": output_path or head.get("output_path"),
        "output_format": output_format or head.get("output_format", OutputFormat.CSV.value),
    }
    if fields["output_path"] is None:
        issues.append(f"missing key 'output_path' in [{EXPERIMENT_SECTION}] (or pass --output)")
        fields["output_path"] = "-"

    if experiment is None or parameters is None:
        # still check the scalar keys so every issue surfaces at once
        fields["experiment"] = ExperimentName.BOUND
        fields["parameters"] = PARAMETER_MODELS[ExperimentName.BOUND]()

    try:
        config = ExperimentConfig.model_validate(fields)
    except ValidationError as e:
        issues.extend(format_validation_errors(e))
        config = None

    if issues:
        logger.debug("Config rejected with %d issue(s)", len(issues))
        raise ConfigValidationError(issues)
    return config


def load_config(path: str, **overrides) -> ExperimentConfig:
    """Read and validate a config file"""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ConfigValidationError([f"cannot read config {path}: {e.strerror or e}"])
    return parse_config(text, **overrides)
