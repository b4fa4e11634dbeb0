"""Configuration, verification suites and result persistence."""

from .config import ConfigError, ExperimentConfig, load_config, parse_config, serialize_config
from .report import CSV_HEADER, ResultRecord, emit_report, load_report, parse_report, render_report
from .suites import SUITES, run_suite, suite_names

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "load_config",
    "parse_config",
    "serialize_config",
    "CSV_HEADER",
    "ResultRecord",
    "emit_report",
    "load_report",
    "parse_report",
    "render_report",
    "SUITES",
    "run_suite",
    "suite_names",
]
