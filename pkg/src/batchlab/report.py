"""Report objects and their stable JSON/CSV forms (schema ``batchlab/1``).

Field order in the JSON is fixed so that identical runs produce
byte-identical files. Wall-clock time is kept on the in-memory objects
but written as null unless timing output is explicitly requested,
because report files are required to be reproducible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

SCHEMA = "batchlab/1"


@dataclass(frozen=True)
class BatchParams:
    """The (n, k, t, m, tau) profile of one batch configuration."""

    n: int
    k: int
    t: int
    m: int
    tau: int

    def __post_init__(self):
        if min(self.n, self.m, self.t, self.tau) < 1 or self.k < 0:
            raise ValueError(f"invalid batch parameters {self}")

    @property
    def feasible(self) -> bool:
        """m*tau >= t: without this no query of t symbols can be served."""
        return self.m * self.tau >= self.t

    def as_dict(self) -> Dict[str, int]:
        return {"n": self.n, "k": self.k, "t": self.t, "m": self.m, "tau": self.tau}


@dataclass
class VerificationReport:
    """Outcome of one batch-property verification run."""

    code_label: str
    params: BatchParams
    verdict: str  # "pass" | "fail" | "refused"
    counterexample: Optional[Tuple[int, ...]]
    queries_checked: int
    mode: str  # "exhaustive" | "sampled"
    seed: Optional[int]
    sample_count: Optional[int]
    max_bucket_load: int
    plan_sizes: Dict[int, int]
    load_histogram: List[List[int]]
    wall_time_ms: Optional[int] = None

    def validate(self) -> None:
        if self.verdict not in ("pass", "fail", "refused"):
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.verdict == "fail" and self.counterexample is None:
            raise ValueError("a fail verdict must carry a counterexample")
        if len(self.load_histogram) != self.params.m:
            raise ValueError("load histogram must have one row per bucket")
        for row in self.load_histogram:
            if sum(row) != self.queries_checked:
                raise ValueError("each bucket's load counts must total queries_checked")

    def to_json_dict(self, include_timing: bool = False) -> dict:
        return {
            "schema": SCHEMA,
            "kind": "verification",
            "code": self.code_label,
            "params": self.params.as_dict(),
            "verdict": self.verdict,
            "counterexample": list(self.counterexample) if self.counterexample else None,
            "queries_checked": self.queries_checked,
            "mode": self.mode,
            "seed": self.seed,
            "sample_count": self.sample_count,
            "max_bucket_load": self.max_bucket_load,
            "plan_sizes": {str(k): self.plan_sizes[k] for k in sorted(self.plan_sizes)},
            "load_histogram": self.load_histogram,
            "wall_time_ms": self.wall_time_ms if include_timing else None,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "VerificationReport":
        if data.get("schema") != SCHEMA:
            raise ValueError(f"unsupported schema {data.get('schema')!r}")
        if data.get("kind") != "verification":
            raise ValueError(f"not a verification report: kind={data.get('kind')!r}")
        p = data["params"]
        ce = data.get("counterexample")
        return cls(
            code_label=data["code"],
            params=BatchParams(p["n"], p["k"], p["t"], p["m"], p["tau"]),
            verdict=data["verdict"],
            counterexample=tuple(ce) if ce else None,
            queries_checked=data["queries_checked"],
            mode=data["mode"],
            seed=data.get("seed"),
            sample_count=data.get("sample_count"),
            max_bucket_load=data["max_bucket_load"],
            plan_sizes={int(k): v for k, v in data.get("plan_sizes", {}).items()},
            load_histogram=[list(r) for r in data["load_histogram"]],
            wall_time_ms=data.get("wall_time_ms"),
        )


@dataclass
class WorkloadStats:
    """Per-bucket read totals accumulated by a seeded workload simulation."""

    code_label: str
    t: int
    tau: int
    query_count: int
    seed: int
    per_bucket_reads: List[int]
    max_single_query_bucket_load: int
    wall_time_ms: Optional[int] = None

    def to_json_dict(self, include_timing: bool = False) -> dict:
        return {
            "schema": SCHEMA,
            "kind": "workload",
            "code": self.code_label,
            "t": self.t,
            "tau": self.tau,
            "query_count": self.query_count,
            "seed": self.seed,
            "per_bucket_reads": list(self.per_bucket_reads),
            "max_single_query_bucket_load": self.max_single_query_bucket_load,
            "wall_time_ms": self.wall_time_ms if include_timing else None,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "WorkloadStats":
        if data.get("schema") != SCHEMA:
            raise ValueError(f"unsupported schema {data.get('schema')!r}")
        if data.get("kind") != "workload":
            raise ValueError(f"not a workload report: kind={data.get('kind')!r}")
        return cls(
            code_label=data["code"],
            t=data["t"],
            tau=data["tau"],
            query_count=data["query_count"],
            seed=data["seed"],
            per_bucket_reads=list(data["per_bucket_reads"]),
            max_single_query_bucket_load=data["max_single_query_bucket_load"],
            wall_time_ms=data.get("wall_time_ms"),
        )


def report_json(r, include_timing: bool = False) -> str:
    return json.dumps(r.to_json_dict(include_timing), indent=2) + "\n"


def report_csv(r) -> str:
    """Per-bucket histogram rows; one row per bucket."""
    if isinstance(r, VerificationReport):
        tau = len(r.load_histogram[0]) - 1 if r.load_histogram else 0
        header = "bucket," + ",".join(f"load_{l}" for l in range(tau + 1))
        lines = [header]
        for b, row in enumerate(r.load_histogram, start=1):
            lines.append(f"{b}," + ",".join(str(c) for c in row))
        return "\n".join(lines) + "\n"
    if isinstance(r, WorkloadStats):
        lines = ["bucket,cumulative_reads"]
        for b, reads in enumerate(r.per_bucket_reads, start=1):
            lines.append(f"{b},{reads}")
        return "\n".join(lines) + "\n"
    raise TypeError(f"cannot render {type(r).__name__} as CSV")


def parse_report(text: str):
    """Re-ingest a JSON report emitted by this package."""
    data = json.loads(text)
    kind = data.get("kind")
    if kind == "verification":
        return VerificationReport.from_json_dict(data)
    if kind == "workload":
        return WorkloadStats.from_json_dict(data)
    raise ValueError(f"unknown report kind {kind!r}")
