"""Suite configuration, orchestration, reports and the command line."""

from .config import DEFAULT_PARAMS, DEFAULT_TOLERANCES, SUITES, SuiteConfig, load_config, parse_config
from .report import CheckReport, emit_report, render_report
from .suites import check_seed, run_suite

__all__ = [
    "DEFAULT_PARAMS",
    "DEFAULT_TOLERANCES",
    "SUITES",
    "SuiteConfig",
    "load_config",
    "parse_config",
    "CheckReport",
    "emit_report",
    "render_report",
    "check_seed",
    "run_suite",
]
