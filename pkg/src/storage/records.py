"""
Tabular outputs: diagnostics record streams, summaries and reports.
Handles CSV / NDJSON serialization and the schema-version header.
"""

import json
import math
from enum import Enum
from pathlib import Path
from typing import Iterable, List, Optional

import pandas as pd
from loguru import logger

SCHEMA_VERSION = 1
SCHEMA_HEADER = f"# schema-version: {SCHEMA_VERSION}"


class OutputFormat(Enum):
    """Record stream formats."""
    CSV = "csv"
    NDJSON = "ndjson"

    @property
    def suffix(self) -> str:
        return ".csv" if self is OutputFormat.CSV else ".ndjson"


class RecordStore:
    """
    File sink for diagnostics and summary tables.

    Layout:
    - diagnostics: one row per record, header line, columns in record order
    - summary / report: '# schema-version: N' line, then a CSV table
    """

    @staticmethod
    def records_frame(rows: Iterable[dict], columns: List[str]) -> pd.DataFrame:
        return pd.DataFrame(list(rows), columns=columns)

    @staticmethod
    def write_records(frame: pd.DataFrame, path: Path, fmt: OutputFormat = OutputFormat.CSV) -> Path:
        """Write a record stream; output is byte-identical for identical frames."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)

        if fmt is OutputFormat.CSV:
            frame.to_csv(path, index=False, float_format='%.17g')
        else:
            with open(path, 'w', encoding='utf-8', newline='\n') as fh:
                for row in frame.to_dict(orient='records'):
                    fh.write(json.dumps(RecordStore._json_row(row), allow_nan=False) + "\n")

        logger.info(f"Wrote {len(frame)} records to {path}")
        return path

    @staticmethod
    def read_records(path: Path, fmt: Optional[OutputFormat] = None) -> pd.DataFrame:
        path = Path(path)
        if fmt is None:
            fmt = OutputFormat.NDJSON if path.suffix == ".ndjson" else OutputFormat.CSV

        if fmt is OutputFormat.CSV:
            return pd.read_csv(path)
        return pd.read_json(path, orient='records', lines=True, precise_float=True)

    @staticmethod
    def _json_row(row: dict) -> dict:
        """Shortest round-trip floats; non-finite values become null."""
        return {
            key: None if isinstance(value, float) and not math.isfinite(value) else value
            for key, value in row.items()
        }

    @staticmethod
    def write_report(frame: pd.DataFrame, path: Path, summary_lines: Iterable[str] = ()) -> Path:
        """
        Versioned CSV report.

        Args:
            frame: Table body
            path: Output file
            summary_lines: Extra '# key: value' lines written after the schema header
        """
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)

        with open(path, 'w', encoding='utf-8', newline='') as fh:
            fh.write(SCHEMA_HEADER + "\n")
            for line in summary_lines:
                fh.write(f"# {line}\n")
            frame.to_csv(fh, index=False, float_format='%.17g')

        logger.info(f"Wrote report {path}")
        return path

    @staticmethod
    def read_report(path: Path) -> pd.DataFrame:
        """Report body; raises ValueError on an unknown schema version."""
        path = Path(path)
        with open(path, encoding='utf-8') as fh:
            first = fh.readline().strip()
        if first != SCHEMA_HEADER:
            raise ValueError(f"{path} does not start with '{SCHEMA_HEADER}' (found '{first}')")
        return pd.read_csv(path, comment='#')

    @staticmethod
    def write_summary(path: Path, line: str) -> Path:
        """One-line summary file behind the schema header."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(f"{SCHEMA_HEADER}\n{line}\n", encoding='utf-8')
        return path
