"""
This module contains the ReportRepository class for evaluation outputs.

Classes:
    - ReportRepository: Writes report CSV, markdown, run metadata and sweep curves.
"""

import json
from pathlib import Path
from typing import List

from repositories.base_repository import BaseRepository, PathLike
from schemas.report import Curve, EvalReport
from services.reporting import parse_report_csv, render_curve_csv, render_report
from shared.constants import REPORT_CSV_NAME, REPORT_MARKDOWN_NAME, REPORT_META_NAME


class ReportRepository(BaseRepository):
    """
    Repository class for a report directory.
    """

    def __init__(self, root: PathLike) -> None:
        super().__init__(class_name=__name__, root=root)

    def save_report(self, report: EvalReport) -> List[Path]:
        """
        Write `report.csv`, `report.md` and `run_meta.json`.

        Args:
            report (EvalReport): Report with averages.

        Returns:
            List[Path]: The written files.
        """
        paths = [
            self.write_text(REPORT_CSV_NAME, render_report(report, "csv")),
            self.write_text(REPORT_MARKDOWN_NAME, render_report(report, "markdown")),
            self.write_text(REPORT_META_NAME, json.dumps(report.run_meta, sort_keys=True, indent=2) + "\n"),
        ]
        self.logger.info("Report saved", {"directory": str(self.root), "cells": len(report.cells)})
        return paths

    def load_report(self) -> EvalReport:
        return parse_report_csv(self.read_text(REPORT_CSV_NAME))

    def save_curve(self, curve: Curve) -> Path:
        path = self.write_text(f"sweep_{curve.param}_{curve.method.value}.csv", render_curve_csv(curve))
        self.logger.info("Curve saved", {"path": str(path), "points": len(curve.points)})
        return path
