"""Report emission: JSON documents, CSV tables and repro cases."""

import csv
import io
import json
import logging
import re
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Union

from pydantic import BaseModel

from normctl.schemas.sweep import CSV_COLUMNS, SweepRow
from normctl.schemas.visibility import PseudospectrumGrid

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _format(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


class ReportRepository:
    """Repository for experiment outputs."""

    @staticmethod
    def _emit(text: str, path: Optional[PathLike]) -> str:
        if path is not None:
            Path(path).write_text(text, encoding="utf-8")
            logger.info(f"Wrote {len(text)} bytes to {path}")
        return text

    @staticmethod
    def write_json(report: BaseModel, path: Optional[PathLike] = None) -> str:
        """Serialise a report; returns the text and writes it when a path is given."""
        return ReportRepository._emit(report.model_dump_json(indent=2) + "\n", path)

    @staticmethod
    def write_sweep_csv(rows: Iterable[SweepRow], path: Optional[PathLike] = None) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            values = row.model_dump()
            writer.writerow([_format(values[column]) for column in CSV_COLUMNS])
        return ReportRepository._emit(buffer.getvalue(), path)

    @staticmethod
    def write_pseudospectrum_csv(grid: PseudospectrumGrid, path: Optional[PathLike] = None) -> str:
        """Columns re, im, resolvent_norm, in_pseudospectrum; one row per grid point."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["re", "im", "resolvent_norm", "in_pseudospectrum"])
        norms = grid.resolvent_norms()
        mask = grid.mask()
        for i, im in enumerate(grid.im):
            for j, re in enumerate(grid.re):
                norm = float(norms[i, j])
                writer.writerow([repr(re), repr(im), "inf" if norm == float("inf") else repr(norm), _format(bool(mask[i, j]))])
        return ReportRepository._emit(buffer.getvalue(), path)

    @staticmethod
    def save_repro_case(name: str, payload: Dict[str, Any], directory: PathLike) -> Path:
        """Dump an invariant counterexample as JSON."""
        target_dir = Path(directory)
        target_dir.mkdir(parents=True, exist_ok=True)
        safe_name = re.sub(r"[^A-Za-z0-9_.,=+-]", "_", name)
        target = target_dir / f"{safe_name}.json"
        target.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        logger.warning(f"Repro case written to {target}")
        return target
