"""
Run counters, the five evaluation metrics and report serialization
"""
import csv
import io
import logging
import math

from dataclasses import dataclass, field, asdict
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np
import yaml

from .consts import CSV_HEADER
from .errors import UsageError

LOGGER = logging.getLogger(__name__)

FORMAT_CSV = "csv"
FORMAT_TEXT = "text"
REPORT_FORMATS = (FORMAT_CSV, FORMAT_TEXT)


def coefficient_of_variation(counts: Sequence[float]) -> float:
    """
    Population standard deviation over mean, 0 for all-zero counts
    """
    values = np.asarray(counts, dtype=float)

    if values.size == 0:
        raise UsageError("coefficient_of_variation needs at least one count")

    mean = values.mean()
    if mean == 0.0:
        return 0.0

    return float(values.std() / mean)


@dataclass
class RunCounters:
    """
    Mutable tallies owned by one simulation run.

    Consumer side accounting satisfies
    interests_sent == satisfied + timed_out + dropped + pending_at_end
    where dropped counts Interests rejected by the consumer's own node.
    """

    interests_sent: int = 0
    retransmissions: int = 0
    satisfied: int = 0
    timed_out: int = 0
    dropped: int = 0
    pending_at_end: int = 0
    network_drops: int = 0
    cache_hits: int = 0
    retrieval_sum: float = 0.0
    node_requests: Dict[str, int] = field(default_factory=dict)

    def record_retrieval(self, seconds: float) -> None:
        """
        One satisfied Interest, seconds since its original send
        """
        self.satisfied += 1
        self.retrieval_sum += seconds

    def reconciles(self) -> bool:
        """
        True when the consumer accounting identity holds
        """
        accounted = self.satisfied + self.timed_out + self.dropped + self.pending_at_end
        return self.interests_sent == accounted


@dataclass(frozen=True)
class MetricsReport:
    """Immutable outcome of one run."""

    scenario: str = ""
    strategy: str = ""
    seed: int = 0
    rate: float = 0.0
    cache_frac: float = 0.0
    duration: float = 0.0
    throughput: float = 0.0
    isr: float = 0.0
    drop_rate: float = 0.0
    mean_retrieval: float = math.nan
    cov_load: float = 0.0
    interests_sent: int = 0
    retransmissions: int = 0
    data_received: int = 0
    timeouts: int = 0
    dropped: int = 0
    pending_at_end: int = 0
    drops: int = 0
    cache_hits: int = 0
    node_requests: Tuple[Tuple[str, int], ...] = ()

    def row(self) -> Tuple:
        """
        Values in CSV_HEADER order
        """
        return tuple(getattr(self, column) for column in CSV_HEADER)


def finalize_report(
    counters: RunCounters,
    duration: float,
    *,
    scenario: str = "",
    strategy: str = "",
    seed: int = 0,
    rate: float = 0.0,
    cache_frac: float = 0.0,
) -> MetricsReport:
    """
    Turn counters into the report, rates are 0 for a zero duration
    """
    if duration < 0:
        raise UsageError(f"duration must be >= 0, got {duration}")

    sent = counters.interests_sent
    received = counters.satisfied

    throughput = received / duration if duration > 0 else 0.0
    drop_rate = counters.network_drops / duration if duration > 0 else 0.0
    isr = received / sent if sent else 0.0
    mean_retrieval = counters.retrieval_sum / received if received else math.nan

    node_requests = tuple(sorted(counters.node_requests.items()))
    counts = [count for _, count in node_requests]
    cov_load = coefficient_of_variation(counts) if counts else 0.0

    if isr > 1.0:
        raise AssertionError(f"isr {isr} exceeds 1: {received} delivered for {sent} sent")

    return MetricsReport(
        scenario=scenario,
        strategy=strategy,
        seed=seed,
        rate=rate,
        cache_frac=cache_frac,
        duration=duration,
        throughput=throughput,
        isr=isr,
        drop_rate=drop_rate,
        mean_retrieval=mean_retrieval,
        cov_load=cov_load,
        interests_sent=sent,
        retransmissions=counters.retransmissions,
        data_received=received,
        timeouts=counters.timed_out,
        dropped=counters.dropped,
        pending_at_end=counters.pending_at_end,
        drops=counters.network_drops,
        cache_hits=counters.cache_hits,
        node_requests=node_requests,
    )


def _format_field(value) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"

    return str(value)


def write_report(
    reports: Union[MetricsReport, Sequence[MetricsReport]], fmt: str = FORMAT_CSV
) -> bytes:
    """
    Serialize reports as CSV (fixed header) or as YAML text
    """
    if isinstance(reports, MetricsReport):
        reports = [reports]

    if fmt == FORMAT_CSV:
        stream = io.StringIO()
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for report in reports:
            writer.writerow([_format_field(value) for value in report.row()])

        return stream.getvalue().encode("utf-8")

    if fmt == FORMAT_TEXT:
        documents = []
        for report in reports:
            document = asdict(report)
            document["node_requests"] = dict(report.node_requests)
            documents.append(document)

        return yaml.safe_dump(documents, sort_keys=False).encode("utf-8")

    raise UsageError(f"unknown report format {fmt!r}, expected one of {REPORT_FORMATS}")


def read_report_csv(data: bytes) -> List[Dict[str, Union[str, int, float]]]:
    """
    Parse CSV emitted by write_report
    """
    rows = list(csv.reader(io.StringIO(data.decode("utf-8"))))

    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise UsageError(f"report does not start with header {','.join(CSV_HEADER)}")

    records = []
    for row in rows[1:]:
        if not row:
            continue

        if len(row) != len(CSV_HEADER):
            raise UsageError(f"report row has {len(row)} fields, expected {len(CSV_HEADER)}")

        record: Dict[str, Union[str, int, float]] = {}
        for column, text in zip(CSV_HEADER, row):
            if column in ("scenario", "strategy"):
                record[column] = text
            elif column == "seed":
                record[column] = int(text)
            else:
                record[column] = float(text)
        records.append(record)

    return records
