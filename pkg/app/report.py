from typing import Sequence

import pandas as pd

from .models import PipelineMode, RunReport

_ROWS = ["EM", "F1", "hit-rate", "samples", "failures"]
_MODE_ORDER = {mode: position for position, mode in enumerate(PipelineMode)}


def _column(report: RunReport) -> list:
    aggregates = report.aggregates
    return [aggregates.em, aggregates.f1, aggregates.hit_rate, aggregates.samples, aggregates.failures]


def summary_table(report: RunReport) -> pd.DataFrame:
    return pd.DataFrame({report.label: _column(report)}, index=_ROWS, dtype=object)


def render_report(reports: Sequence[RunReport]) -> pd.DataFrame:
    """Side-by-side aggregates, one column per run in pipeline order"""
    if not reports:
        raise ValueError("no runs to report")
    ordered = sorted(enumerate(reports), key=lambda item: (_MODE_ORDER[item[1].mode], item[0]))
    columns = {}
    for _, report in ordered:
        label = report.label
        suffix = 2
        while label in columns:
            label = f"{report.label} ({suffix})"
            suffix += 1
        columns[label] = _column(report)
    return pd.DataFrame(columns, index=_ROWS, dtype=object)


def format_table(table: pd.DataFrame) -> str:
    def cell(value) -> str:
        if value is None or pd.isna(value):
            return "-"
        if isinstance(value, float):
            return f"{value:.2f}"
        return str(value)

    return table.map(cell).to_string()
