"""Metrics records: one JSON object per line, append-only.

Every record carries step/epoch coordinates and whichever measurements
were taken at that point; absent fields stay None and are omitted from
the serialized form.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path


class MalformedMetrics(ValueError):
    """A metrics file line is not a valid record."""


@dataclass(frozen=True)
class MetricsRecord:
    step: int
    epoch: int
    split: str = "train"
    beta: float | None = None
    alpha: float | None = None
    recon_sum: float | None = None
    recon_per_token: float | None = None
    kl: float | None = None
    total: float | None = None
    mutual_info: float | None = None
    avg_kl: float | None = None
    marginal_kl: float | None = None
    seq_accuracy: float | None = None
    token_accuracy: float | None = None
    validity: float | None = None
    grad_norm: float | None = None
    wall_time: float | None = None

    def to_json(self) -> str:
        payload = {k: v for k, v in asdict(self).items() if v is not None}
        return json.dumps(payload, sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "MetricsRecord":
        try:
            payload = json.loads(line)
        except json.JSONDecodeError as err:
            raise MalformedMetrics(f"unparseable metrics line: {line!r}") from err
        if not isinstance(payload, dict):
            raise MalformedMetrics(f"metrics line is not an object: {line!r}")
        known = set(cls.__dataclass_fields__)
        unknown = set(payload) - known
        if unknown:
            raise MalformedMetrics(f"unknown metrics fields {sorted(unknown)}")
        if "step" not in payload or "epoch" not in payload:
            raise MalformedMetrics(f"metrics line lacks step/epoch: {line!r}")
        return cls(**payload)


def append_record(path: str | Path, record: MetricsRecord) -> None:
    with open(path, "a") as fh:
        fh.write(record.to_json() + "\n")


def read_records(path: str | Path) -> list[MetricsRecord]:
    records = []
    for line in Path(path).read_text().splitlines():
        if line.strip():
            records.append(MetricsRecord.from_json(line))
    return records
