from aafv.metrics.report import build_report, emit_report, format_summary_table, parse_report
from aafv.metrics.stats import summarize, t_two_sided_p, welch_t_test

__all__ = [
    "build_report",
    "emit_report",
    "format_summary_table",
    "parse_report",
    "summarize",
    "t_two_sided_p",
    "welch_t_test",
]
