"""Report writing for scenario results."""
import json
from pathlib import Path
from typing import Any, Dict, List, Union

import numpy as np

from oamsim.analysis.histogram import export_histogram_csv
from oamsim.core.exceptions import ReportError
from oamsim.models.report import RunReport
from oamsim.utils.logger import setup_logger

logger = setup_logger(__name__)

FORMATS = ("json", "csv")


def _builtin(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


class ReportGenerator:
    """Write run reports as JSON plus an optional CSV table."""

    def render_json(self, report: RunReport) -> str:
        """Canonical JSON text; no timestamps, keys sorted, so equal runs give equal bytes."""
        return json.dumps(report.to_dict(), indent=2, sort_keys=True, ensure_ascii=False, default=_builtin) + "\n"

    def emit_report(self, report: RunReport, fmt: str, path: Union[str, Path]) -> List[Path]:
        """
        Write a report.

        The JSON report goes to path with a .json suffix. With fmt "csv" the
        histogram (bin_start_ps, count) or the sweep table (wavelength_nm,
        transmission) is also written next to it with a .csv suffix.

        Args:
            report: Run report
            fmt: "json" or "csv"
            path: Output path; its suffix is replaced

        Returns:
            Paths written

        Raises:
            ReportError: On an unknown format or a failed write
        """
        if fmt not in FORMATS:
            raise ReportError(f"unknown format '{fmt}', expected one of {FORMATS}")

        base = Path(path)
        json_path = base.with_suffix(".json")
        written = [json_path]
        try:
            json_path.parent.mkdir(parents=True, exist_ok=True)
            json_path.write_text(self.render_json(report), encoding="utf-8")
        except OSError as e:
            raise ReportError(f"cannot write {json_path}: {e}") from e

        if fmt == "csv":
            csv_path = base.with_suffix(".csv")
            if report.histogram is not None:
                export_histogram_csv(report.histogram, csv_path)
                written.append(csv_path)
            elif report.sweep_table is not None:
                try:
                    report.sweep_table.to_csv(csv_path, index=False)
                except OSError as e:
                    raise ReportError(f"cannot write {csv_path}: {e}") from e
                written.append(csv_path)
            else:
                logger.warning("No table to export for this scenario", extra={"kind": report.scenario.kind.value})

        logger.info("Report exported", extra={"paths": [str(p) for p in written]})
        return written

    def summary(self, report: RunReport) -> Dict[str, Any]:
        """Headline numbers for console display."""
        rows: Dict[str, Any] = {
            "scenario": report.scenario.kind.value,
            "seed": report.scenario.seed,
            "config_hash": report.config_hash
        }
        if report.coincidence:
            c = report.coincidence
            rows.update({
                "pulses": report.pulses_simulated,
                "emitting pulses": report.emitting_pulses,
                "CC": c.cc,
                "ACC mean": round(sum(c.acc) / len(c.acc), 2),
                "CAR min/mean/max": f"{c.car_min:.2f} / {c.car_mean:.2f} / {c.car_max:.2f}",
            })
            if c.car_lower_bound:
                rows["CAR note"] = "lower bound (empty side peak)"
        if report.purity:
            rows.update({
                "charge": report.purity.charge,
                "purity": f"{report.purity.purity:.4f} ± {report.purity.std_error:.4f}"
            })
        if report.spectrum:
            fit = report.spectrum["fit"]
            rows.update({"FSR (nm)": round(fit["fsr_nm"], 4), "FWHM (nm)": round(fit["fwhm_nm"], 4)})
        if report.calibration:
            for section, fields in report.calibration["patch"].items():
                for key, value in fields.items():
                    rows[f"{section}.{key}"] = f"{value:.6g}"
        return rows
