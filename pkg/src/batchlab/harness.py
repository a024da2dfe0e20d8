"""Independent verification oracle, workload simulation, report emission.

The oracle shares only the field linear algebra with the main verifier:
it enumerates every dual codeword as a parity equation and searches plans
by plain recursion over the query occurrences, with none of the compiled
masks, candidate ordering, or slot sorting the production path uses. A
disagreement between the two is always a bug.
"""

from __future__ import annotations

import os
import time
from typing import Dict, List, Optional, Sequence

from .batch import (
    BucketPartition,
    QueryMultiset,
    _compile_candidates,
    _search_assignment,
    find_plan,
)
from .codes import LinearCode
from .recovery import SetsSource
from .report import VerificationReport, WorkloadStats, report_csv, report_json, parse_report
from .sampling import sample_ranks, unrank_multiset

ORACLE_MAX_N = 10
ORACLE_MAX_DUAL_DIM = 8
ORACLE_MAX_T = 3


class UnplannableQueryError(RuntimeError):
    """A simulated query admitted no plan; the query is attached."""

    def __init__(self, query):
        super().__init__(f"no plan exists for query {query}")
        self.query = tuple(query)


def oracle_verify(code: LinearCode, buckets: BucketPartition, t: int, tau: int) -> str:
    """Ground-truth verdict ("pass" or "fail") by unpruned exhaustive search."""
    n = code.n
    dual_dim = n - code.k
    if n > ORACLE_MAX_N or dual_dim > ORACLE_MAX_DUAL_DIM or t > ORACLE_MAX_T:
        raise ValueError(
            f"oracle scale exceeded (n={n}, dual dim={dual_dim}, t={t})")
    if buckets.n != n:
        raise ValueError("bucket partition does not match the code length")

    reads_by_coord: List[List[frozenset]] = [[] for _ in range(n + 1)]
    for i in range(1, n + 1):
        reads_by_coord[i].append(frozenset((i,)))
    seen = [set() for _ in range(n + 1)]
    for lam in code.dual().words():
        if lam.weight < 2:
            continue
        supp = [j + 1 for j in lam.support]
        for i in supp:
            reads = frozenset(j for j in supp if j != i)
            if reads not in seen[i]:
                seen[i].add(reads)
                reads_by_coord[i].append(reads)

    from itertools import combinations_with_replacement

    for query in combinations_with_replacement(range(1, n + 1), t):
        if not _oracle_plan_exists(query, reads_by_coord, buckets, tau):
            return "fail"
    return "pass"


def _oracle_plan_exists(query, reads_by_coord, buckets: BucketPartition, tau: int) -> bool:
    t = len(query)

    def recurse(pos: int, used: frozenset, loads: Dict[int, int]) -> bool:
        if pos == t:
            return True
        for reads in reads_by_coord[query[pos]]:
            if used & reads:
                continue
            new_loads = dict(loads)
            ok = True
            for j in reads:
                b = buckets.bucket_index_of(j)
                new_loads[b] = new_loads.get(b, 0) + 1
                if new_loads[b] > tau:
                    ok = False
                    break
            if ok and recurse(pos + 1, used | reads, new_loads):
                return True
        return False

    return recurse(0, frozenset(), {})


def simulate_workload(code: LinearCode, buckets: BucketPartition, tau: int, t: int,
                      count: int, seed: int, sets_source: SetsSource) -> WorkloadStats:
    """Plan ``count`` uniform random size-t multisets and accumulate per-bucket
    reads; deterministic for a given seed. An unplannable query aborts."""
    if count < 0:
        raise ValueError("count must be nonnegative")
    started = time.perf_counter()
    n, m = code.n, buckets.m
    per_coord_map = _compile_candidates(list(range(1, n + 1)), sets_source, buckets, tau)
    per_coord = [per_coord_map[i] for i in range(1, n + 1)]
    per_bucket = [0] * m
    max_single = 0
    for rank in sample_ranks(n, t, count, seed):
        query = unrank_multiset(rank, n, t)
        slot_cands = [per_coord[i - 1] for i in query]
        choice = _search_assignment(slot_cands, tau, m)
        if choice is None:
            raise UnplannableQueryError(query)
        loads: Dict[int, int] = {}
        for s, ci in enumerate(choice):
            _, profile, rs = slot_cands[s][ci]
            for j in rs.reads:
                b = buckets.bucket_index_of(j)
                per_bucket[b] += 1
                loads[b] = loads.get(b, 0) + 1
        if loads:
            max_single = max(max_single, max(loads.values()))
    return WorkloadStats(
        code_label=code.label,
        t=t,
        tau=tau,
        query_count=count,
        seed=seed,
        per_bucket_reads=per_bucket,
        max_single_query_bucket_load=max_single,
        wall_time_ms=int((time.perf_counter() - started) * 1000),
    )


def emit_report(r, format: str = "json", path=None, *, include_timing: bool = False) -> str:
    """Render a report and write it to ``path`` when given; returns the text.

    JSON carries the full report; CSV renders the per-bucket histogram only.
    """
    if format == "json":
        text = report_json(r, include_timing)
    elif format == "csv":
        text = report_csv(r)
    else:
        raise ValueError(f"unknown report format {format!r}")
    if path is not None:
        try:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write report to {path}: {exc}") from exc
    return text


def load_report(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_report(fh.read())
    except OSError as exc:
        raise OSError(f"cannot read report from {path}: {exc}") from exc


def recheck_counterexample(report: VerificationReport, code: LinearCode,
                           buckets: BucketPartition, tau: int,
                           sets_source: SetsSource) -> bool:
    """True iff the report's counterexample still admits no plan."""
    if report.counterexample is None:
        raise ValueError("the report carries no counterexample")
    query = QueryMultiset.of(report.counterexample, code.n)
    return find_plan(code, buckets, query, tau, sets_source) is None
