"""Scenario generation, scans, oracles and the command line."""

from .generate import RNG_NAME, TEMPLATES, Bounds, generate_bform, generate_prepared, generate_space
from .io import (REPORT_SCHEMA, SCENARIO_SCHEMA, Config, Scenario, dump_form, dumps_report, load_form,
                 load_scenario, read_scenario)
from .oracles import ChartCheck, check_chart, check_rewrite, oracle_quotient
from .recipes import SPECIALIZATIONS, Rewrite, shift_w, specialize, swap_uv, to_swapped_line
from .scan import ScanReport, semicontinuity_scan
from .scenario import describe, run_scenario
from .suite import PROPERTIES, SuiteConfig, SuiteReport, run_suite

__all__ = [
    "RNG_NAME", "TEMPLATES", "Bounds", "generate_bform", "generate_prepared", "generate_space",
    "REPORT_SCHEMA", "SCENARIO_SCHEMA", "Config", "Scenario", "dump_form", "dumps_report", "load_form",
    "load_scenario", "read_scenario", "ChartCheck", "check_chart", "check_rewrite", "oracle_quotient",
    "SPECIALIZATIONS", "Rewrite", "shift_w", "specialize", "swap_uv", "to_swapped_line", "ScanReport",
    "semicontinuity_scan", "describe", "run_scenario", "PROPERTIES", "SuiteConfig", "SuiteReport",
    "run_suite",
]
