"""Recovery sets, locality and availability.

Recovery sets come from dual codewords: a dual word with a nonzero entry
at the target coordinate is a parity equation expressing that coordinate
through the others in its support. For first-order Reed-Muller codes the
dual words of minimal weight correspond to small point configurations
(triples summing to the target point over GF(2), collinear point pairs
otherwise), so those sets are generated directly from point arithmetic.

Coordinate indices in this module are 1-based, matching the bucket and
report layers.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from math import comb
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .codes import EvaluationPointSet, LinearCode, min_weight_cover
from .fields import (
    CapExceededError,
    ENUMERATION_WORD_CAP,
    Field,
    FieldMatrix,
    FieldVector,
    null_space,
)

MAX_PACKING_CANDIDATES = 5000
PACKING_NODE_BUDGET = 2_000_000

# full dual enumeration is used for recovery-set search below this word count
_DUAL_ENUM_CAP = 1 << 18


class UncoveredCoordinateError(ValueError):
    """A coordinate admits no recovery set of the required kind."""


@dataclass(frozen=True)
class RecoverySet:
    """Either the direct read {target} or a parity equation for the target.

    ``coefficients`` maps each read index j to c_j such that the target
    value equals sum(c_j * value_j); it is empty exactly for direct reads.
    Normalization: the target's implicit dual-word coefficient is -1.
    """

    target: int
    reads: frozenset
    coefficients: Tuple[Tuple[int, int], ...] = ()

    @property
    def is_direct(self) -> bool:
        return self.reads == frozenset((self.target,))

    @property
    def size(self) -> int:
        return len(self.reads)

    @property
    def coefficient_map(self) -> Dict[int, int]:
        return dict(self.coefficients)

    def sort_key(self) -> tuple:
        return (len(self.reads), tuple(sorted(self.reads)))

    def decode(self, values: Sequence[int], p: int) -> int:
        """Recover the target entry from a full codeword value list (0-based)."""
        if self.is_direct:
            return values[self.target - 1]
        return sum(c * values[j - 1] for j, c in self.coefficients) % p

    def dual_word(self, fieldobj: Field, n: int) -> FieldVector:
        """The dual word realizing this set: -1 at the target, c_j at reads."""
        if self.is_direct:
            raise ValueError("a direct read has no dual word")
        vals = [0] * n
        vals[self.target - 1] = fieldobj.neg(1)
        for j, c in self.coefficients:
            vals[j - 1] = c
        return FieldVector.from_values(fieldobj, vals)


def direct_read(target: int) -> RecoverySet:
    return RecoverySet(target, frozenset((target,)))


def recovery_set_from_dual(fieldobj: Field, lam: Sequence[int], target: int) -> RecoverySet:
    """Normalize a dual word into the recovery set for ``target`` (1-based)."""
    lt = lam[target - 1] % fieldobj.p
    if lt == 0:
        raise ValueError(f"dual word does not involve coordinate {target}")
    scale = fieldobj.neg(fieldobj.inv(lt))
    coeffs = []
    for j, v in enumerate(lam, start=1):
        if j != target and v % fieldobj.p:
            coeffs.append((j, fieldobj.mul(scale, v)))
    if not coeffs:
        raise ValueError("weight-1 dual word yields an empty read set")
    return RecoverySet(target, frozenset(j for j, _ in coeffs), tuple(coeffs))


def is_valid_recovery_set(code: LinearCode, rs: RecoverySet) -> bool:
    """True iff the set decodes its target on every codeword of ``code``."""
    if not rs.reads:
        return False
    if rs.is_direct:
        return not rs.coefficients and 1 <= rs.target <= code.n
    if rs.target in rs.reads:
        return False
    if not all(1 <= j <= code.n for j in rs.reads):
        return False
    if frozenset(j for j, _ in rs.coefficients) != rs.reads:
        return False
    if any(c % code.q == 0 for _, c in rs.coefficients):
        return False
    lam = rs.dual_word(code.field, code.n)
    return all(g.dot(lam) == 0 for g in code.generator.rows)


def recovery_sets_generic(code: LinearCode, i: int, weight_cap: Optional[int] = None) -> List[RecoverySet]:
    """All recovery sets for coordinate ``i`` arising from dual words of weight
    at most ``weight_cap`` (unlimited when None), deduplicated by read set and
    sorted by (size, reads)."""
    n, q = code.n, code.q
    if not 1 <= i <= n:
        raise ValueError(f"coordinate {i} out of range [1,{n}]")
    dual_dim = n - code.k
    enum_cost = q ** dual_dim
    combo_cost = None
    if weight_cap is not None:
        cap = min(weight_cap, n)
        combo_cost = sum(comb(n - 1, w - 1) * (q - 1) ** (w - 1) for w in range(2, cap + 1))
    if combo_cost is not None and (enum_cost > _DUAL_ENUM_CAP or combo_cost < enum_cost):
        if combo_cost > ENUMERATION_WORD_CAP:
            raise CapExceededError(
                f"recovery-set search for weight cap {weight_cap} exceeds the budget")
        candidates = _recovery_sets_by_support(code, i, cap)
    else:
        if enum_cost > _DUAL_ENUM_CAP:
            raise CapExceededError(
                f"dual enumeration of {q}^{dual_dim} words exceeds the budget; "
                "pass a small weight_cap for a bounded search")
        candidates = []
        for lam in code.dual().words(weight_cap):
            vals = lam.values
            if lam.weight < 2 or vals[i - 1] == 0:
                continue
            candidates.append(recovery_set_from_dual(code.field, vals, i))
    candidates.sort(key=lambda rs: (len(rs.reads), tuple(sorted(rs.reads)), rs.coefficients))
    out = []
    seen = set()
    for rs in candidates:
        if rs.reads not in seen:
            seen.add(rs.reads)
            out.append(rs)
    return out


def _recovery_sets_by_support(code: LinearCode, i: int, cap: int) -> List[RecoverySet]:
    """Bounded search: for every candidate support S containing i with |S| <= cap,
    solve for dual words supported exactly on S."""
    from itertools import combinations

    fieldobj = code.field
    n, q = code.n, code.q
    g_rows = code.generator.rows
    others = [j for j in range(1, n + 1) if j != i]
    out = []
    for w in range(2, cap + 1):
        for extra in combinations(others, w - 1):
            support = (i,) + extra
            cols = FieldMatrix.from_rows(
                fieldobj, [[row[j - 1] for j in support] for row in g_rows],
                col_count=w, packed=False)
            kernel = null_space(cols)
            if kernel.row_count == 0:
                continue
            for lam_small in _nonzero_combinations(kernel, q):
                if any(v == 0 for v in lam_small):
                    continue  # smaller support; found at its own weight
                lam = [0] * n
                for j, v in zip(support, lam_small):
                    lam[j - 1] = v
                out.append(recovery_set_from_dual(fieldobj, lam, i))
    return out


def _nonzero_combinations(basis: FieldMatrix, q: int) -> Iterator[tuple]:
    from itertools import product

    rows = [r.values for r in basis.rows]
    w = basis.col_count
    for coeffs in product(range(q), repeat=basis.row_count):
        if not any(coeffs):
            continue
        vals = tuple(sum(c * row[j] for c, row in zip(coeffs, rows)) % q for j in range(w))
        yield vals


def rm1_dual_membership(lam: Sequence[int], pts: EvaluationPointSet) -> bool:
    """Point-sum test for membership in the dual of RM_q(1, mu):
    the entries must sum to zero and weight each point to a zero vector."""
    values = list(lam.values) if isinstance(lam, FieldVector) else [v % pts.q for v in lam]
    n = pts.q ** pts.mu
    if len(values) != n:
        raise ValueError(f"length mismatch: expected {n}, got {len(values)}")
    q = pts.q
    if sum(values) % q:
        return False
    for coord in range(pts.mu):
        if sum(v * p[coord] for v, p in zip(values, pts.points)) % q:
            return False
    return True


def recovery_sets_rm1_points(q: int, mu: int, i: int) -> Iterator[RecoverySet]:
    """Recovery sets for coordinate ``i`` of RM_q(1, mu), straight from point
    arithmetic: triples of points summing to P_i over GF(2), collinear pairs
    through P_i otherwise."""
    n = q ** mu
    if not 1 <= i <= n:
        raise ValueError(f"coordinate {i} out of range [1,{n}]")
    if q == 2:
        # point at index j is the bitmask j-1
        pm = i - 1
        for b0 in range(n):
            if b0 == pm:
                continue
            for c0 in range(b0 + 1, n):
                if c0 == pm:
                    continue
                d0 = pm ^ b0 ^ c0
                if d0 <= c0:
                    continue
                reads = (b0 + 1, c0 + 1, d0 + 1)
                yield RecoverySet(i, frozenset(reads), tuple((j, 1) for j in reads))
        return
    pts = EvaluationPointSet(q, mu)
    fieldobj = Field(q)
    pa = pts.point(i)
    for b in range(1, n + 1):
        if b == i:
            continue
        pb = pts.point(b)
        for alpha in range(1, q - 1):  # alpha != 0 and alpha != -1
            inv = fieldobj.inv(alpha + 1)
            pc = tuple((inv * (x + alpha * y)) % q for x, y in zip(pa, pb))
            c = pts.index_of(pc)
            if c <= b:
                continue
            # P_a + alpha P_b - (alpha+1) P_c = 0, so
            # value_a = -alpha * value_b + (alpha+1) * value_c
            coeffs = ((b, fieldobj.neg(alpha)), (c, (alpha + 1) % q))
            yield RecoverySet(i, frozenset((b, c)), coeffs)


def locality(code: LinearCode) -> int:
    """All-symbol locality d'-1, where d' is the dual minimum distance.

    Checks that every coordinate lies in the support of some minimum-weight
    dual codeword, which is what makes the bound attained symbol by symbol.
    """
    n = code.n
    for j in range(n):
        if all(row[j] == 0 for row in code.parity.rows):
            raise UncoveredCoordinateError(
                f"coordinate {j + 1} appears in no dual codeword; it cannot be recovered")
    dprime, covered = min_weight_cover(code.dual(), cover=True)
    if len(covered) != n:
        missing = sorted(set(range(n)) - set(covered))[0]
        raise UncoveredCoordinateError(
            f"coordinate {missing + 1} is not in the support of any minimum-weight "
            f"dual codeword; locality {dprime - 1} is not certified")
    return dprime - 1


@dataclass(frozen=True)
class AvailabilityCertificate:
    """Pairwise-disjoint recovery sets for one coordinate, none a direct read."""

    target: int
    sets: Tuple[RecoverySet, ...]
    size_bound: int

    @property
    def size(self) -> int:
        return len(self.sets)

    def validate(self, code: LinearCode) -> None:
        used: set = set()
        for rs in self.sets:
            if rs.is_direct:
                raise ValueError("direct reads do not count toward availability")
            if rs.target != self.target:
                raise ValueError("certificate sets must share the target")
            if self.target in rs.reads:
                raise ValueError("recovery sets must not read the target")
            if len(rs.reads) > self.size_bound:
                raise ValueError(f"read set larger than the bound {self.size_bound}")
            if used & rs.reads:
                raise ValueError("recovery sets must be pairwise disjoint")
            used |= rs.reads
            if not is_valid_recovery_set(code, rs):
                raise ValueError(f"set {sorted(rs.reads)} does not decode {self.target}")


def availability_exact(code: LinearCode, i: int, r: int, *,
                       max_candidates: int = MAX_PACKING_CANDIDATES,
                       node_budget: int = PACKING_NODE_BUDGET) -> AvailabilityCertificate:
    """A maximum-cardinality family of pairwise-disjoint recovery sets for
    coordinate ``i`` with reads of size at most ``r`` (exact set packing)."""
    if r < 1:
        raise ValueError("r must be at least 1")
    candidates = recovery_sets_generic(code, i, weight_cap=r + 1)
    if len(candidates) > max_candidates:
        raise CapExceededError(
            f"{len(candidates)} candidate sets exceed the packing cap of {max_candidates}")
    chosen = _max_disjoint_packing([rs.reads for rs in candidates], node_budget)
    return AvailabilityCertificate(i, tuple(candidates[j] for j in chosen), r)


def _max_disjoint_packing(read_sets: Sequence[frozenset], node_budget: int) -> List[int]:
    """Exact maximum set packing by depth-first branch and bound.

    Candidates are assumed sorted by (size, lexicographic reads), which the
    recovery-set generators guarantee; sizes ascending makes the
    elements-per-set bound monotone.
    """
    coords = sorted({j for s in read_sets for j in s})
    pos = {j: b for b, j in enumerate(coords)}
    masks = []
    for s in read_sets:
        m = 0
        for j in s:
            m |= 1 << pos[j]
        masks.append(m)
    sizes = [m.bit_count() for m in masks]
    count = len(masks)
    total_coords = len(coords)
    best: List[int] = []

    # greedy first-fit gives the initial bound
    used = 0
    greedy = []
    for idx, m in enumerate(masks):
        if not used & m:
            greedy.append(idx)
            used |= m
    best = greedy

    nodes = 0
    chosen: List[int] = []

    def dfs(start: int, used_mask: int) -> None:
        nonlocal best, nodes
        if len(chosen) > len(best):
            best = chosen.copy()
        free = total_coords - used_mask.bit_count()
        for j in range(start, count):
            if len(chosen) + (count - j) <= len(best):
                return
            if sizes[j] and len(chosen) + free // sizes[j] <= len(best):
                return
            m = masks[j]
            if used_mask & m:
                continue
            nodes += 1
            if nodes > node_budget:
                raise CapExceededError(
                    f"set-packing search exceeded the node budget of {node_budget}")
            chosen.append(j)
            dfs(j + 1, used_mask | m)
            chosen.pop()

    dfs(0, 0)
    return best


def availability_construct_even(mu: int) -> List[tuple]:
    """(2^mu - 1)/3 disjoint point triples of F_2^mu summing to zero, covering
    every nonzero point; requires even mu >= 2."""
    if mu < 2 or mu % 2:
        raise ValueError("the even construction needs even mu >= 2")
    triples = [((0, 1), (1, 0), (1, 1))]
    m = 2
    while m < mu:
        triples = _extend_triples(triples, m) + [_tail_triple(m)]
        m += 2
    return triples


def _extend_triples(triples: List[tuple], m: int) -> List[tuple]:
    """Four suffix patterns per triple; each input point is reused with every
    two-bit suffix exactly once, so disjointness is preserved."""
    out = []
    for s1, s2, s3 in triples:
        out.append((s1 + (0, 0), s2 + (0, 0), s3 + (0, 0)))
        out.append((s1 + (1, 0), s2 + (0, 1), s3 + (1, 1)))
        out.append((s1 + (0, 1), s2 + (1, 1), s3 + (1, 0)))
        out.append((s1 + (1, 1), s2 + (1, 0), s3 + (0, 1)))
    return out


def _tail_triple(m: int) -> tuple:
    zero = (0,) * m
    return (zero + (1, 1), zero + (1, 0), zero + (0, 1))


def availability_construct_odd(mu: int) -> List[tuple]:
    """At least (2^mu - 4)/4 disjoint zero-sum point triples of F_2^mu, leaving
    at least three nonzero points unused; requires odd mu >= 3."""
    if mu < 3 or mu % 2 == 0:
        raise ValueError("the odd construction needs odd mu >= 3")
    triples = [((1, 0, 0), (0, 1, 0), (1, 1, 0))]
    m = 3
    while m < mu:
        spares = _unused_points(triples, m)
        if len(spares) < 3:
            raise AssertionError("induction needs three spare points")
        t1, t2, t3 = spares[:3]
        zero = (0,) * m
        extended = _extend_triples(triples, m)
        extended.append((zero + (1, 0), t1 + (0, 1), t1 + (1, 1)))
        extended.append((zero + (0, 1), t2 + (1, 1), t2 + (1, 0)))
        extended.append((zero + (1, 1), t3 + (1, 0), t3 + (0, 1)))
        triples = extended
        m += 2
    return triples


def _unused_points(triples: List[tuple], m: int) -> List[tuple]:
    used = {p for t in triples for p in t}
    out = []
    for idx in range(1, 1 << m):
        p = tuple((idx >> b) & 1 for b in range(m))
        if p not in used:
            out.append(p)
    return out


def availability_construct_qary(q: int, mu: int, i: int) -> AvailabilityCertificate:
    """floor((q^mu - 1)/2) disjoint size-2 recovery sets for coordinate ``i`` of
    RM_q(1, mu) with q an odd prime: each punctured affine line through the
    target point is split into pairs."""
    if q == 2:
        raise ValueError("the pairing construction needs q > 2")
    pts = EvaluationPointSet(q, mu)
    fieldobj = Field(q)
    n = q ** mu
    if not 1 <= i <= n:
        raise ValueError(f"coordinate {i} out of range [1,{n}]")
    pa = pts.point(i)
    sets = []
    for direction in _canonical_directions(q, mu):
        line = []
        for s in range(1, q):
            pb = tuple((x + s * d) % q for x, d in zip(pa, direction))
            line.append((pts.index_of(pb), s))
        line.sort()
        for a in range(0, len(line) - 1, 2):
            (jb, sb), (jc, sc) = line[a], line[a + 1]
            # lam_a = sb - sc, lam_b = sc, lam_c = -sb; normalized below
            inv = fieldobj.inv((sb - sc) % q)
            coeffs = ((jb, fieldobj.mul(fieldobj.neg(sc), inv)),
                      (jc, fieldobj.mul(sb, inv)))
            sets.append(RecoverySet(i, frozenset((jb, jc)), coeffs))
    sets.sort(key=RecoverySet.sort_key)
    return AvailabilityCertificate(i, tuple(sets), 2)


def _canonical_directions(q: int, mu: int) -> Iterator[tuple]:
    """One representative per projective direction: first nonzero entry is 1."""
    def rec(prefix: tuple, seen_one: bool) -> Iterator[tuple]:
        if len(prefix) == mu:
            if seen_one:
                yield prefix
            return
        if seen_one:
            for v in range(q):
                yield from rec(prefix + (v,), True)
        else:
            yield from rec(prefix + (0,), False)
            yield from rec(prefix + (1,), True)

    yield from rec((), False)


def lift_recovery_sets(sets: Iterable[RecoverySet], n: int, quarter: int) -> List[RecoverySet]:
    """Lift recovery sets of a length-n binary code into quarter ``quarter``
    of a length-4n code whose dual admits the two-quarter padding of dual
    words.

    A direct read just shifts. A parity set is shifted into the target's
    quarter and paired with a full copy (reads plus target) in each of the
    three other quarters, one lifted set per pairing, so a planner can pick
    the second quarter.
    """
    if not 0 <= quarter <= 3:
        raise ValueError("quarter must be in 0..3")
    shift = quarter * n
    out = []
    for rs in sets:
        if rs.is_direct:
            out.append(direct_read(rs.target + shift))
            continue
        if any(c != 1 for _, c in rs.coefficients):
            raise ValueError("the quarter lift pads binary parity sets only")
        for other in range(4):
            if other == quarter:
                continue
            oshift = other * n
            coeffs = [(j + shift, 1) for j, _ in rs.coefficients]
            coeffs.extend((j + oshift, 1) for j, _ in rs.coefficients)
            coeffs.append((rs.target + oshift, 1))
            coeffs.sort()
            out.append(RecoverySet(rs.target + shift,
                                   frozenset(j for j, _ in coeffs), tuple(coeffs)))
    return out


SetsSource = Callable[[int], Sequence[RecoverySet]]


def generic_source(code: LinearCode, weight_cap: Optional[int] = None) -> SetsSource:
    """Recovery sets from dual-codeword enumeration, cached per coordinate."""
    cache: Dict[int, tuple] = {}

    def source(i: int) -> Sequence[RecoverySet]:
        if i not in cache:
            cache[i] = tuple(recovery_sets_generic(code, i, weight_cap))
        return cache[i]

    return source


def rm1_points_source(q: int, mu: int) -> SetsSource:
    """Recovery sets for RM_q(1, mu) from point arithmetic, cached per coordinate."""
    cache: Dict[int, tuple] = {}

    def source(i: int) -> Sequence[RecoverySet]:
        if i not in cache:
            sets = sorted(recovery_sets_rm1_points(q, mu, i), key=RecoverySet.sort_key)
            cache[i] = tuple(sets)
        return cache[i]

    return source


def lifted_source(base: SetsSource, base_n: int) -> SetsSource:
    """Recovery sets for a length-4n code lifted from a length-n source."""
    cache: Dict[int, tuple] = {}

    def source(i: int) -> Sequence[RecoverySet]:
        if i not in cache:
            quarter, base_i = divmod(i - 1, base_n)
            lifted = lift_recovery_sets(base(base_i + 1), base_n, quarter)
            lifted.sort(key=RecoverySet.sort_key)
            cache[i] = tuple(lifted)
        return cache[i]

    return source


def rm_general_source(rho: int, mu: int) -> SetsSource:
    """Recovery sets for RM(rho, mu) with mu in {2*rho+2, 2*rho+3}: the
    first-order point sets, quad-lifted rho-1 times."""
    if rho < 1:
        raise ValueError("rho must be at least 1")
    if mu not in (2 * rho + 2, 2 * rho + 3):
        raise ValueError(f"the lift chain needs mu in {{{2*rho+2}, {2*rho+3}}}, got {mu}")
    base_mu = mu - 2 * (rho - 1)
    source = rm1_points_source(2, base_mu)
    n = 1 << base_mu
    for _ in range(rho - 1):
        source = lifted_source(source, n)
        n *= 4
    return source
