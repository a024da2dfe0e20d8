"""Bucket partitions, query planning, and multiset batch verification.

The planner model: a query is a size-t multiset of coordinates; a plan
assigns every occurrence a recovery set such that all read sets are
pairwise disjoint (no coordinate is read twice, targets included) and
every bucket supplies at most tau of the union. Direct reads are always
candidates; parity sets come from a pluggable recovery-set source.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from math import comb
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from .codes import LinearCode
from .fields import CapExceededError
from .recovery import RecoverySet, SetsSource, direct_read
from .report import BatchParams, VerificationReport
from .sampling import multiset_count, sample_ranks, unrank_multiset

EXHAUSTIVE_BUDGET = 1 << 21


class BucketPartition:
    """A partition of [1, n] into disjoint nonempty buckets.

    Buckets are kept sorted by smallest element; ``bucket_index_of`` is
    0-based, ``bucket_of`` returns the members of a coordinate's bucket.
    """

    __slots__ = ("n", "buckets", "_index")

    def __init__(self, n: int, buckets: Iterable[Iterable[int]]):
        canon = sorted((tuple(sorted(set(b))) for b in buckets), key=lambda b: b[0])
        index: Dict[int, int] = {}
        for bi, bucket in enumerate(canon):
            if not bucket:
                raise ValueError("buckets must be nonempty")
            for i in bucket:
                if not 1 <= i <= n:
                    raise ValueError(f"coordinate {i} out of range [1,{n}]")
                if i in index:
                    raise ValueError(f"coordinate {i} appears in two buckets")
                index[i] = bi
        if len(index) != n:
            missing = sorted(set(range(1, n + 1)) - set(index))
            raise ValueError(f"partition misses coordinates {missing[:5]}")
        self.n = n
        self.buckets = tuple(canon)
        self._index = index

    @property
    def m(self) -> int:
        return len(self.buckets)

    def bucket_index_of(self, i: int) -> int:
        return self._index[i]

    def bucket_of(self, i: int) -> tuple:
        return self.buckets[self._index[i]]

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, BucketPartition)
                and other.n == self.n and other.buckets == self.buckets)

    def __hash__(self) -> int:
        return hash((self.n, self.buckets))

    def __repr__(self) -> str:
        return f"BucketPartition(n={self.n}, m={self.m})"


def hamming_buckets(s: int) -> BucketPartition:
    """Complementary parity-column pairs: 2^(s-1) buckets, the all-ones
    column alone, every other coordinate with its bitwise complement."""
    if s < 2:
        raise ValueError("Hamming buckets need s >= 2")
    n = (1 << s) - 1
    buckets = [(n,)]
    for j in range(1, n + 1):
        partner = j ^ n
        if j < partner:
            buckets.append((j, partner))
    return BucketPartition(n, buckets)


def rm14_buckets() -> BucketPartition:
    """The 10-bucket partition of [16] used for the first-order length-16 code."""
    return BucketPartition(16, [
        (1,), (2,), (3,), (4,),
        (5, 6), (7, 8), (9, 11), (10, 12), (13, 16), (14, 15),
    ])


def lift_buckets_uv(b: BucketPartition) -> BucketPartition:
    """Double the length, keeping m: coordinate i+n joins the bucket of i."""
    n = b.n
    return BucketPartition(2 * n, [bucket + tuple(i + n for i in bucket)
                                   for bucket in b.buckets])


def lift_buckets_quad(b: BucketPartition) -> BucketPartition:
    """Quadruple the length with 4m buckets: B, B+n, B+2n, B+3n for each B."""
    n = b.n
    out = []
    for bucket in b.buckets:
        for s in range(4):
            out.append(tuple(i + s * n for i in bucket))
    return BucketPartition(4 * n, out)


def merge_buckets(b: BucketPartition, tau: int) -> BucketPartition:
    """Group buckets (sorted by smallest element) into ceil(m/tau) unions of
    at most tau buckets each; a tau=1 pass on b implies a tau pass here."""
    if tau < 1:
        raise ValueError("tau must be at least 1")
    merged = []
    for start in range(0, b.m, tau):
        group: tuple = ()
        for bucket in b.buckets[start:start + tau]:
            group += bucket
        merged.append(group)
    return BucketPartition(b.n, merged)


def write_buckets(b: BucketPartition) -> str:
    """One line per bucket: space-separated sorted 1-based indices."""
    return "\n".join(" ".join(str(i) for i in bucket) for bucket in b.buckets) + "\n"


def parse_buckets(text: str, n: Optional[int] = None) -> BucketPartition:
    buckets = []
    top = 0
    for ln in text.splitlines():
        if not ln.strip():
            continue
        bucket = tuple(int(x) for x in ln.split())
        top = max(top, max(bucket))
        buckets.append(bucket)
    return BucketPartition(n if n is not None else top, buckets)


@dataclass(frozen=True)
class QueryMultiset:
    """A size-t multiset of coordinates, stored as a nondecreasing tuple."""

    indices: Tuple[int, ...]

    @classmethod
    def of(cls, indices: Iterable[int], n: int) -> "QueryMultiset":
        idx = tuple(sorted(indices))
        if not idx:
            raise ValueError("a query must contain at least one index")
        for i in idx:
            if not 1 <= i <= n:
                raise ValueError(f"query index {i} out of range [1,{n}]")
        return cls(idx)

    @property
    def t(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class QueryPlan:
    """One recovery set per query occurrence; reads pairwise disjoint and
    bucket loads at most tau."""

    sets: Tuple[RecoverySet, ...]

    @property
    def total_reads(self) -> int:
        return sum(len(rs.reads) for rs in self.sets)

    def bucket_loads(self, buckets: BucketPartition) -> List[int]:
        loads = [0] * buckets.m
        for rs in self.sets:
            for j in rs.reads:
                loads[buckets.bucket_index_of(j)] += 1
        return loads

    def validate(self, query: QueryMultiset, buckets: BucketPartition, tau: int) -> None:
        if tuple(rs.target for rs in self.sets) != query.indices:
            raise ValueError("plan sets must target the query indices in order")
        used: set = set()
        for rs in self.sets:
            if used & rs.reads:
                raise ValueError("plan read sets must be pairwise disjoint")
            used |= rs.reads
        for b, load in enumerate(self.bucket_loads(buckets)):
            if load > tau:
                raise ValueError(f"bucket {b + 1} load {load} exceeds tau={tau}")

    def decodes(self, code: LinearCode, codeword_values: Sequence[int]) -> bool:
        q = code.q
        return all(rs.decode(codeword_values, q) == codeword_values[rs.target - 1]
                   for rs in self.sets)


def split_code_tau(params: BatchParams) -> BatchParams:
    """The parameter-level transform (n, k, t, m, tau) -> (n*tau, k, t, m*tau, 1)."""
    if not params.feasible:
        raise ValueError(f"{params} is not a feasible batch parameter tuple")
    return BatchParams(params.n * params.tau, params.k, params.t,
                       params.m * params.tau, 1)


class OptimalityCheck(NamedTuple):
    bound: int
    met_with_equality: bool


def optimality_check(params: BatchParams, r: int) -> OptimalityCheck:
    """The lower bound m*tau >= (t-1)*r + 1 for minimal locality r, and whether
    the given parameters meet it with equality (the optimality condition)."""
    if r < 1:
        raise ValueError("locality must be at least 1")
    bound = (params.t - 1) * r + 1
    return OptimalityCheck(bound, params.m * params.tau == bound)


# ---------------------------------------------------------------------------
# planning core
#
# Candidates are compiled to (coordinate mask, bucket usage) pairs. With
# tau == 1 the bucket usage is itself a bitmask and conflict checking is two
# AND operations; larger tau keeps per-bucket counts.


def _compile_candidates(targets: Sequence[int], source: SetsSource,
                        buckets: BucketPartition, tau: int):
    per_target: Dict[int, list] = {}
    for i in targets:
        if i in per_target:
            continue
        cands = []
        for rs in (direct_read(i),) + tuple(source(i)):
            mask = 0
            usage: Dict[int, int] = {}
            for j in rs.reads:
                mask |= 1 << (j - 1)
                b = buckets.bucket_index_of(j)
                usage[b] = usage.get(b, 0) + 1
            if max(usage.values()) > tau:
                continue
            if tau == 1:
                profile = 0
                for b in usage:
                    profile |= 1 << b
            else:
                profile = tuple(sorted(usage.items()))
            cands.append((mask, profile, rs))
        per_target[i] = cands
    return per_target


def _search_assignment(slot_cands: Sequence[Sequence[tuple]], tau: int, m: int):
    """Backtracking over slots ordered fewest-candidates-first; returns the
    chosen candidate index per slot (original order) or None."""
    t = len(slot_cands)
    order = sorted(range(t), key=lambda s: (len(slot_cands[s]), s))
    choice = [0] * t
    if tau == 1:
        def dfs(pos: int, used: int, bused: int) -> bool:
            if pos == t:
                return True
            slot = order[pos]
            for ci, (mask, bmask, _) in enumerate(slot_cands[slot]):
                if used & mask or bused & bmask:
                    continue
                choice[slot] = ci
                if dfs(pos + 1, used | mask, bused | bmask):
                    return True
            return False

        return choice if dfs(0, 0, 0) else None

    loads = [0] * m

    def dfs_general(pos: int, used: int) -> bool:
        if pos == t:
            return True
        slot = order[pos]
        for ci, (mask, profile, _) in enumerate(slot_cands[slot]):
            if used & mask:
                continue
            ok = True
            for b, cnt in profile:
                if loads[b] + cnt > tau:
                    ok = False
                    break
            if not ok:
                continue
            for b, cnt in profile:
                loads[b] += cnt
            choice[slot] = ci
            if dfs_general(pos + 1, used | mask):
                return True
            for b, cnt in profile:
                loads[b] -= cnt
        return False

    return choice if dfs_general(0, 0) else None


def find_plan(code: LinearCode, buckets: BucketPartition, query,
              tau: int, sets_source: SetsSource) -> Optional[QueryPlan]:
    """A valid plan for the query, or None once the source's candidate space
    is exhausted. Budget refusals from the source propagate as
    CapExceededError, distinct from a definitive None."""
    if buckets.n != code.n:
        raise ValueError(f"bucket partition is over [{buckets.n}], code length is {code.n}")
    if tau < 1:
        raise ValueError("tau must be at least 1")
    if not isinstance(query, QueryMultiset):
        query = QueryMultiset.of(query, code.n)
    per_target = _compile_candidates(query.indices, sets_source, buckets, tau)
    slot_cands = [per_target[i] for i in query.indices]
    choice = _search_assignment(slot_cands, tau, buckets.m)
    if choice is None:
        return None
    plan = QueryPlan(tuple(slot_cands[s][ci][2] for s, ci in enumerate(choice)))
    plan.validate(query, buckets, tau)
    return plan


# ---------------------------------------------------------------------------
# verification


def _verify_chunk(payload):
    """Check one contiguous block of query positions; stop at the first
    failure inside the block. Runs in a worker process or inline."""
    (per_coord, n, t, tau, m, lo, hi, ranks) = payload
    nonzero_hist: Dict[tuple, int] = {}
    plan_sizes: Dict[int, int] = {}
    max_load = 0
    planned = 0
    fail_pos = None
    fail_query = None
    for pos in range(lo, hi):
        rank = ranks[pos - lo] if ranks is not None else pos
        query = unrank_multiset(rank, n, t)
        slot_cands = [per_coord[i - 1] for i in query]
        choice = _search_assignment(slot_cands, tau, m)
        if choice is None:
            fail_pos = pos
            fail_query = query
            break
        planned += 1
        union = 0
        loads: Dict[int, int] = {}
        for s, ci in enumerate(choice):
            mask, profile, _ = slot_cands[s][ci]
            union |= mask
            if tau == 1:
                bm = profile
                while bm:
                    low = bm & -bm
                    b = low.bit_length() - 1
                    loads[b] = loads.get(b, 0) + 1
                    bm ^= low
            else:
                for b, cnt in profile:
                    loads[b] = loads.get(b, 0) + cnt
        size = union.bit_count()
        plan_sizes[size] = plan_sizes.get(size, 0) + 1
        for b, load in loads.items():
            key = (b, load)
            nonzero_hist[key] = nonzero_hist.get(key, 0) + 1
            if load > max_load:
                max_load = load
    return (lo, fail_pos, fail_query, planned, nonzero_hist, plan_sizes, max_load)


def verify_batch(code: LinearCode, buckets: BucketPartition, t: int, tau: int,
                 sets_source: SetsSource, mode: str = "exhaustive", *,
                 count: Optional[int] = None, seed: Optional[int] = None,
                 workers: int = 1, budget: int = EXHAUSTIVE_BUDGET,
                 force: bool = False) -> VerificationReport:
    """Verify the batch property for every (or every sampled) size-t multiset.

    Exhaustive mode walks all C(n+t-1, t) multisets lexicographically and
    reports the first failing query; sampled mode draws ``count`` seeded
    uniform multisets. Statistics cover the queries that passed before the
    first failure, so identical runs produce identical reports at any
    worker count.
    """
    if buckets.n != code.n:
        raise ValueError(f"bucket partition is over [{buckets.n}], code length is {code.n}")
    if t < 1 or tau < 1:
        raise ValueError("t and tau must be at least 1")
    started = time.perf_counter()
    n, m = code.n, buckets.m
    if mode == "exhaustive":
        total = multiset_count(n, t)
        if total > budget and not force:
            raise CapExceededError(
                f"{total} multisets exceed the exhaustive budget of {budget}; "
                "switch to sampled mode or force the run")
        ranks_list = None
    elif mode == "sampled":
        if seed is None or count is None:
            raise ValueError("sampled mode requires both a seed and a count")
        total = count
        ranks_list = sample_ranks(n, t, count, seed)
    else:
        raise ValueError(f"unknown mode {mode!r}")

    source_targets = list(range(1, n + 1))
    per_coord_map = _compile_candidates(source_targets, sets_source, buckets, tau)
    per_coord = [per_coord_map[i] for i in source_targets]

    chunk_count = max(1, min(workers, total)) if total else 1
    bounds = [(total * w // chunk_count, total * (w + 1) // chunk_count)
              for w in range(chunk_count)]
    payloads = [(per_coord, n, t, tau, m, lo, hi,
                 ranks_list[lo:hi] if ranks_list is not None else None)
                for lo, hi in bounds if lo < hi]

    if workers > 1 and len(payloads) > 1:
        results = _run_parallel(payloads, workers)
    else:
        results = [_verify_chunk(p) for p in payloads]

    fails = [(r[1], r[2]) for r in results if r[1] is not None]
    fail_pos, fail_query = min(fails) if fails else (None, None)

    planned = 0
    nonzero_hist: Dict[tuple, int] = {}
    plan_sizes: Dict[int, int] = {}
    max_load = 0
    for (lo, _, _, chunk_planned, chunk_hist, chunk_sizes, chunk_max) in results:
        if fail_pos is not None and lo > fail_pos:
            continue
        planned += chunk_planned
        for key, cnt in chunk_hist.items():
            nonzero_hist[key] = nonzero_hist.get(key, 0) + cnt
        for sz, cnt in chunk_sizes.items():
            plan_sizes[sz] = plan_sizes.get(sz, 0) + cnt
        max_load = max(max_load, chunk_max)

    histogram = [[0] * (tau + 1) for _ in range(m)]
    for (b, load), cnt in nonzero_hist.items():
        histogram[b][load] = cnt
    for b in range(m):
        histogram[b][0] = planned - sum(histogram[b][1:])

    report = VerificationReport(
        code_label=code.label,
        params=BatchParams(n, code.k, t, m, tau),
        verdict="pass" if fail_pos is None else "fail",
        counterexample=fail_query,
        queries_checked=planned,
        mode=mode,
        seed=seed,
        sample_count=count if mode == "sampled" else None,
        max_bucket_load=max_load,
        plan_sizes=plan_sizes,
        load_histogram=histogram,
        wall_time_ms=int((time.perf_counter() - started) * 1000),
    )
    report.validate()
    return report


def _run_parallel(payloads, workers: int):
    try:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_verify_chunk, payloads))
    except (OSError, PermissionError, ImportError):
        # restricted environments fall back to the serial path
        return [_verify_chunk(p) for p in payloads]
