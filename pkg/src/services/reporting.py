"""
This module renders evaluation reports and sweep curves as CSV and markdown text.

CSV rows hold full-precision rates; markdown tables round to two decimals, one table per
noise (SNR rows, method columns, Average row) followed by a cross-noise summary.

Functions:
    - render_report: CSV or markdown text of a report.
    - parse_report_csv: Cells of a report rendered as CSV.
    - render_curve_csv: CSV text of a sweep curve.
"""

import csv
import io
from typing import List

from models.tags import FeatureMethod
from schemas.report import Curve, EvalReport, RateCell
from shared.exceptions import EmptyReport, ReportInvalid


CSV_FIELDS = ["noise_name", "snr_db", "method", "rate", "correct", "total", "failed"]
CURVE_FIELDS = ["x", "rate"]

METHOD_LABELS = {
    FeatureMethod.MFCC: "MFCC",
    FeatureMethod.DMFCC: "ΔMFCC",
    FeatureMethod.DDMFCC: "ΔΔMFCC",
    FeatureMethod.RCC: "RCC",
    FeatureMethod.LPC: "LPC",
    FeatureMethod.LPCC: "LPCC",
}


def snr_label(snr_db: float) -> str:
    return f"{int(snr_db)}dB" if float(snr_db).is_integer() else f"{snr_db:g}dB"


def _fmt(rate) -> str:
    return "" if rate is None else f"{rate:.2f}"


def _table(header: List[str], rows: List[List[str]]) -> List[str]:
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join(["---"] * len(header)) + "|"]
    lines.extend("| " + " | ".join(row) + " |" for row in rows)
    return lines


def _render_csv(report: EvalReport) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for cell in report.cells:
        writer.writerow(
            [cell.noise_name, repr(cell.snr_db), cell.method.value, repr(cell.rate), cell.correct, cell.total, cell.failed]
        )
    return out.getvalue()


def _render_markdown(report: EvalReport) -> str:
    methods = report.methods()
    labels = [METHOD_LABELS[m] for m in methods]
    lines: List[str] = ["# Identification rates (%)", ""]
    for noise in report.noises():
        snrs = sorted({c.snr_db for c in report.cells if c.noise_name == noise}, reverse=True)
        rows = []
        for snr in snrs:
            row = [snr_label(snr)]
            for method in methods:
                cell = report.cell(noise, snr, method)
                row.append(_fmt(cell.rate if cell else None))
            rows.append(row)
        rows.append(["Average"] + [_fmt(report.noise_average(noise, m)) for m in methods])
        lines += [f"## {noise}", ""] + _table(["SNR"] + labels, rows) + [""]

    summary = [[noise] + [_fmt(report.noise_average(noise, m)) for m in methods] for noise in report.noises()]
    summary.append(["Average Identification Rate (%)"] + [_fmt(report.method_average(m)) for m in methods])
    lines += ["## Summary", ""] + _table(["Noise"] + labels, summary)
    return "\n".join(lines) + "\n"


def render_report(report: EvalReport, fmt: str = "csv") -> str:
    """
    Render a report.

    Args:
        report (EvalReport): Report with averages computed.
        fmt (str): "csv" or "markdown".

    Returns:
        str: The rendered text.

    Raises:
        EmptyReport: If the averages have not been computed.
        ReportInvalid: If the format is unknown.
    """
    if not report.cells or not report.has_averages:
        raise EmptyReport("report has no averages to render")
    if fmt == "csv":
        return _render_csv(report)
    if fmt == "markdown":
        return _render_markdown(report)
    raise ReportInvalid(f"unknown report format {fmt!r}", {"allowed": ["csv", "markdown"]})


def parse_report_csv(text: str) -> EvalReport:
    """
    Read the cells of a CSV rendered by render_report; averages are left empty.

    Raises:
        ReportInvalid: If the header or a row is malformed.
    """
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != CSV_FIELDS:
        raise ReportInvalid("unexpected report CSV header", {"header": reader.fieldnames})
    try:
        cells = [
            RateCell(
                noise_name=row["noise_name"],
                snr_db=float(row["snr_db"]),
                method=FeatureMethod(row["method"]),
                rate=float(row["rate"]),
                correct=int(row["correct"]),
                total=int(row["total"]),
                failed=int(row["failed"]),
            )
            for row in reader
        ]
    except (ValueError, TypeError) as e:
        raise ReportInvalid(f"malformed report CSV row: {e}") from e
    return EvalReport(cells=cells)


def render_curve_csv(curve: Curve) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CURVE_FIELDS)
    for point in curve.points:
        writer.writerow([point.x, repr(point.rate)])
    return out.getvalue()
