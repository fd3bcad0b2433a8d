"""
Trace collector for batching finished runs to disk

Solver runs finish on worker threads; they hand their traces to the
collector, which is the only writer of output files.

ac2cd/services/trace_collector.py
"""


import asyncio
import csv
import logging
import math
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from ac2cd.core.config import settings
from ac2cd.models.trace import CurvePoint, RunTrace, SummaryRow

logger = logging.getLogger(__name__)

TRACE_FIELDS = [
    "k", "objective", "kkt_residual", "g_min", "g_max", "partial_count",
    "pair_updates", "skipped", "fixed_index", "wall_time",
]
SUMMARY_FIELDS = [
    "method", "repetition", "final_objective", "outer_iterations",
    "partial_count", "status", "wall_time",
]


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    return str(value)


def _write_csv(path: Path, fieldnames: List[str], rows: List[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.DictWriter(f, fieldnames=fieldnames, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: _cell(row.get(k)) for k in fieldnames})


def write_trace_csv(path: Path, trace: RunTrace, include_wall_time: bool = True) -> Path:
    fields = TRACE_FIELDS if include_wall_time else TRACE_FIELDS[:-1]
    _write_csv(path, fields, [r.model_dump() for r in trace.records])
    return path


def write_curve_csv(path: Path, curve: Sequence[CurvePoint]) -> Path:
    _write_csv(path, ["elapsed_seconds", "normalized_error", "clamped"], [p.model_dump() for p in curve])
    return path


def format_summary_table(rows: Sequence[SummaryRow], include_wall_time: bool = True) -> str:
    """Aligned text table, one line per row."""
    fields = SUMMARY_FIELDS if include_wall_time else SUMMARY_FIELDS[:-1]
    cells = [fields] + [
        [
            f"{v:.10g}" if isinstance(v, float) else str(v)
            for v in (row.model_dump()[f] for f in fields)
        ]
        for row in rows
    ]
    widths = [max(len(line[c]) for line in cells) for c in range(len(fields))]
    lines = ["  ".join(cell.rjust(w) for cell, w in zip(line, widths)) for line in cells]
    return "\n".join(lines) + "\n"


def write_summary(directory: Path, rows: Sequence[SummaryRow], include_wall_time: bool = True) -> Tuple[Path, Path]:
    fields = SUMMARY_FIELDS if include_wall_time else SUMMARY_FIELDS[:-1]
    csv_path = directory / "summary.csv"
    txt_path = directory / "summary.txt"
    _write_csv(csv_path, fields, [r.model_dump() for r in rows])
    txt_path.write_text(format_summary_table(rows, include_wall_time), encoding="utf-8")
    return csv_path, txt_path


class TraceCollector:
    """
    In-memory buffer of finished traces that flushes to the output directory
    once ``flush_threshold`` traces are pending, and on stop.
    """

    def __init__(
        self,
        directory: Optional[str] = None,
        flush_threshold: Optional[int] = None,
        include_wall_time: bool = True,
    ):
        self.directory = Path(directory or settings.OUTPUT_DIR)
        self.flush_threshold = flush_threshold or settings.TRACE_FLUSH_THRESHOLD
        self.include_wall_time = include_wall_time

        # (label, trace, curve) waiting for the next flush
        self.pending: List[Tuple[str, RunTrace, Optional[List[CurvePoint]]]] = []
        self.written: List[Path] = []
        self.flushes = 0

        self._lock = asyncio.Lock()

    async def start(self):
        self.directory.mkdir(parents=True, exist_ok=True)
        logger.info(f"TraceCollector writing to {self.directory} (flush_threshold={self.flush_threshold})")

    async def stop(self):
        """Final flush"""
        await self.flush_all()
        logger.info(f"TraceCollector stopped after writing {len(self.written)} files")

    async def add_trace(self, label: str, trace: RunTrace, curve: Optional[List[CurvePoint]] = None):
        async with self._lock:
            self.pending.append((label, trace, curve))
            if len(self.pending) >= self.flush_threshold:
                await self._flush_pending()

    async def flush_all(self):
        async with self._lock:
            await self._flush_pending()

    async def write_summary(self, rows: Sequence[SummaryRow]) -> Tuple[Path, Path]:
        async with self._lock:
            paths = await asyncio.to_thread(write_summary, self.directory, rows, self.include_wall_time)
            self.written.extend(paths)
            logger.info(f"Wrote summary with {len(rows)} rows")
            return paths

    async def _flush_pending(self):
        if not self.pending:
            return
        batch, self.pending = self.pending, []
        try:
            paths = await asyncio.to_thread(self._write_batch, batch)
        except OSError as e:
            logger.error(f"Error flushing {len(batch)} traces: {e}")
            raise
        self.written.extend(paths)
        self.flushes += 1
        logger.info(f"Flushed {len(batch)} traces")

    def _write_batch(self, batch) -> List[Path]:
        paths = []
        for label, trace, curve in batch:
            paths.append(
                write_trace_csv(self.directory / f"trace_{label}.csv", trace, self.include_wall_time)
            )
            if curve is not None:
                paths.append(write_curve_csv(self.directory / f"curve_{label}.csv", curve))
        return paths
